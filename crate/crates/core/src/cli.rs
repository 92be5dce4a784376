//! Config files, check orchestration and reports for the `workbench` binary.
//!
//! Config files are flat `key = value` lines with `#` comments and `[a, b]`
//! lists:
//!
//! ```text
//! model = rational
//! N = 2
//! n = 3
//! eta = 1/2
//! hbar = 1/3
//! x = [0, 2/5, 9/7]
//! g = [2, 3]
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use itertools::Itertools;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::chain_model::{
    check_integrals, check_pole_expansion, check_transfer_commutativity, qkz_compatibility, sum_rule, transfer_matrix, ModelConfig,
};
use crate::correspondence::{check_correspondence, diagonalize_sector, momenta_from_eigenvalues, CorrespondenceReport};
use crate::error::{Error, Result};
use crate::par::{with_workers, Execution};
use crate::report::{CheckResult, Comparison, Status};
use crate::rmatrix::{check_twist_commutation, check_unitarity, check_yang_baxter};
use crate::sampling::{random_argument, random_rational, rng_for, FlavorKind};
use crate::scalars::{ComplexDouble, ExactRational, Scalar, DEFAULT_TOL};
use crate::tensor_space::{all_sectors, WeightSector};
use crate::verification::{
    check_det_identity, check_k_projection, check_macdonald_eigenvalue, check_omega_invariance, check_proposition_higher,
    check_symmetric_identity,
};

/// Every check name, in report order.
pub const CHECKS: [&str; 14] = [
    "ybe",
    "unitarity",
    "twist-commute",
    "transfer-commute",
    "pole-expansion",
    "sum-rule",
    "qkz-compat",
    "omega",
    "k-projection",
    "proposition-higher",
    "det-identity",
    "symmetric-identity",
    "macdonald-eigenvalue",
    "correspondence",
];

const SECTOR_CHECKS: [&str; 4] = ["det-identity", "symmetric-identity", "macdonald-eigenvalue", "correspondence"];

/// Random draws per parameter-level check (ybe, unitarity, ...).
const DRAWS: usize = 3;
const MAX_REDRAWS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(Error::Config(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SectorSelection {
    All,
    List(Vec<WeightSector>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: ModelConfig<ExactRational>,
    pub checks: Vec<String>,
    pub sectors: SectorSelection,
    pub tol: f64,
    pub format: Format,
    pub seed: u64,
    pub mode: Mode,
}

impl RunConfig {
    pub fn kind(&self) -> FlavorKind {
        if self.model.flavor.is_trigonometric() { FlavorKind::Trigonometric } else { FlavorKind::Rational }
    }

    pub fn sector_list(&self) -> Vec<WeightSector> {
        match &self.sectors {
            SectorSelection::All => all_sectors(self.model.n_colors, self.model.n_sites),
            SectorSelection::List(v) => v.clone(),
        }
    }

    /// Checks that depend on the final state after command-line overrides.
    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::NonPositiveTolerance(self.tol));
        }
        if let Some(bad) = self.checks.iter().find(|c| !CHECKS.contains(&c.as_str())) {
            return Err(Error::Config(format!("unknown check {bad:?}; known: {}", CHECKS.join(", "))));
        }
        if let SectorSelection::List(v) = &self.sectors {
            for s in v {
                s.check(self.model.n_colors, self.model.n_sites)?;
            }
        }
        self.model.validate()
    }

    /// `all` expands to every check the mode can evaluate; exact mode leaves
    /// out `correspondence`, which needs an eigensolver.
    pub fn set_checks(&mut self, names: &[String]) {
        if names.iter().any(|c| c == "all") {
            self.checks = CHECKS
                .iter()
                .filter(|c| self.mode == Mode::Float || **c != "correspondence")
                .map(|s| s.to_string())
                .collect();
        } else {
            self.checks = names.to_vec();
        }
    }
}

/// Parses `p/q`, an integer, or a plain decimal such as `-0.25` (read
/// exactly as `-1/4`).
pub fn parse_exact(s: &str) -> Result<ExactRational> {
    let s = s.trim();
    let Some((int, frac)) = s.split_once('.') else {
        return s.parse();
    };
    let bad = || Error::ScalarParse(s.to_string());
    let (neg, int) = match int.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, int.strip_prefix('+').unwrap_or(int)),
    };
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || int.len() + frac.len() == 0 {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    ExactRational::normalize(if neg { -digits } else { digits }, den)
}

#[derive(Clone, Debug)]
enum Value {
    Atom(String),
    List(Vec<String>),
}

/// Splits on commas outside parentheses.
fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

struct RawConfig {
    entries: BTreeMap<String, (usize, Value)>,
    last_line: usize,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut last_line = 0;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            last_line = line;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::Parse { line, message: format!("expected `key = value`, got {content:?}") });
            };
            let (key, value) = (key.trim().to_string(), value.trim());
            let value = if let Some(inner) = value.strip_prefix('[') {
                let inner = inner
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Parse { line, message: "unterminated list".into() })?;
                Value::List(split_top_level(inner))
            } else {
                Value::Atom(value.to_string())
            };
            if entries.insert(key.clone(), (line, value)).is_some() {
                return Err(Error::Parse { line, message: format!("duplicate key `{key}`") });
            }
        }
        Ok(Self { entries, last_line })
    }

    fn missing(&self, key: &str) -> Error {
        Error::Parse { line: self.last_line, message: format!("missing key `{key}`") }
    }

    fn atom(&mut self, key: &str) -> Result<Option<(usize, String)>> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, Value::Atom(s))) => Ok(Some((line, s))),
            Some((line, Value::List(_))) => Err(Error::Parse { line, message: format!("`{key}` takes a single value") }),
        }
    }

    fn required_atom(&mut self, key: &str) -> Result<(usize, String)> {
        self.atom(key)?.ok_or_else(|| self.missing(key))
    }

    fn scalar(&mut self, key: &str) -> Result<ExactRational> {
        let (line, s) = self.required_atom(key)?;
        parse_exact(&s).map_err(|e| Error::Parse { line, message: format!("`{key}`: {e}") })
    }

    fn count(&mut self, key: &str) -> Result<usize> {
        let (line, s) = self.required_atom(key)?;
        s.parse().map_err(|_| Error::Parse { line, message: format!("`{key}` must be a positive integer, got {s:?}") })
    }

    fn list(&mut self, key: &str) -> Result<(usize, Vec<String>)> {
        match self.entries.remove(key) {
            None => Err(self.missing(key)),
            Some((line, Value::List(v))) => Ok((line, v)),
            Some((line, Value::Atom(s))) => Ok((line, vec![s])),
        }
    }

    fn scalar_list(&mut self, key: &str, len: usize) -> Result<Vec<ExactRational>> {
        let (line, items) = self.list(key)?;
        if items.len() != len {
            return Err(Error::Parse { line, message: format!("`{key}` needs {len} entries, got {}", items.len()) });
        }
        items
            .iter()
            .map(|s| parse_exact(s).map_err(|e| Error::Parse { line, message: format!("`{key}`: {e}") }))
            .collect()
    }
}

/// Parses config text; generic position is checked as part of loading.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut raw = RawConfig::parse(text)?;
    let (model_line, model) = raw.required_atom("model")?;
    let n_colors = raw.count("N")?;
    let n_sites = raw.count("n")?;
    if n_colors == 0 || n_sites == 0 {
        return Err(Error::Parse { line: model_line, message: "N and n must be positive".into() });
    }
    let model = match model.as_str() {
        "rational" => {
            let eta = raw.scalar("eta")?;
            let hbar = raw.scalar("hbar")?;
            let x = raw.scalar_list("x", n_sites)?;
            let g = raw.scalar_list("g", n_colors)?;
            ModelConfig::rational(eta, hbar, x, g)?
        }
        "trigonometric" | "trig" => {
            let t = raw.scalar("t")?;
            let h = raw.scalar("h")?;
            let u = raw.scalar_list("u", n_sites)?;
            let g = raw.scalar_list("g", n_colors)?;
            ModelConfig::trigonometric(t, h, u, g)?
        }
        other => return Err(Error::Parse { line: model_line, message: format!("unknown model {other:?}") }),
    };
    let seed = match raw.atom("seed")? {
        None => 0,
        Some((line, s)) => s.parse().map_err(|_| Error::Parse { line, message: format!("bad seed {s:?}") })?,
    };
    let tol = match raw.atom("tol")? {
        None => DEFAULT_TOL,
        Some((line, s)) => s.parse().map_err(|_| Error::Parse { line, message: format!("bad tolerance {s:?}") })?,
    };
    let mode = match raw.atom("mode")? {
        None => Mode::Exact,
        Some((_, s)) if s == "exact" => Mode::Exact,
        Some((_, s)) if s == "float" => Mode::Float,
        Some((line, s)) => return Err(Error::Parse { line, message: format!("mode must be exact or float, got {s:?}") }),
    };
    let format = match raw.atom("format")? {
        None => Format::Json,
        Some((line, s)) => s.parse().map_err(|e: Error| Error::Parse { line, message: e.to_string() })?,
    };
    let mut cfg = RunConfig { model, checks: Vec::new(), sectors: SectorSelection::All, tol, format, seed, mode };
    match raw.entries.remove("checks") {
        None => cfg.set_checks(&["all".to_string()]),
        Some((_, Value::Atom(s))) => cfg.set_checks(&[s]),
        Some((_, Value::List(v))) => cfg.set_checks(&v),
    }
    match raw.entries.remove("sectors") {
        None => {}
        Some((_, Value::Atom(s))) if s == "all" => {}
        Some((line, value)) => {
            let items = match value {
                Value::Atom(s) => vec![s],
                Value::List(v) => v,
            };
            let parsed = items
                .iter()
                .map(|s| s.parse::<WeightSector>())
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Parse { line, message: e.to_string() })?;
            cfg.sectors = SectorSelection::List(parsed);
        }
    }
    if let Some((key, (line, _))) = raw.entries.into_iter().next() {
        return Err(Error::Parse { line, message: format!("unknown key `{key}`") });
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Parameters echoed into the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub model: String,
    #[serde(rename = "N")]
    pub n_colors: usize,
    pub n: usize,
    pub params: BTreeMap<String, Vec<String>>,
    pub checks: Vec<String>,
    pub sectors: Vec<String>,
    pub tol: f64,
    pub seed: u64,
    pub mode: Mode,
}

impl ConfigEcho {
    pub fn new(cfg: &RunConfig) -> Self {
        let m = &cfg.model;
        let show = |v: &[ExactRational]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let mut params = BTreeMap::new();
        let (step, coords) = match &m.flavor {
            crate::rmatrix::RFlavor::Rational { eta } => {
                params.insert("eta".to_string(), vec![eta.to_string()]);
                ("hbar", "x")
            }
            crate::rmatrix::RFlavor::Trigonometric { t } => {
                params.insert("t".to_string(), vec![t.to_string()]);
                ("h", "u")
            }
        };
        params.insert(step.to_string(), vec![m.step.to_string()]);
        params.insert(coords.to_string(), show(&m.coords));
        params.insert("g".to_string(), show(&m.twist));
        Self {
            model: m.flavor.name().to_string(),
            n_colors: m.n_colors,
            n: m.n_sites,
            params,
            checks: cfg.checks.clone(),
            sectors: match &cfg.sectors {
                SectorSelection::All => vec!["all".to_string()],
                SectorSelection::List(v) => v.iter().map(|s| s.to_string()).collect(),
            },
            tol: cfg.tol,
            seed: cfg.seed,
            mode: cfg.mode,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ConfigEcho,
    pub results: Vec<CheckResult>,
    pub overall: Status,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.overall.is_pass()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub workers: Option<usize>,
    pub timings: bool,
    pub execution: Execution,
}

/// Folds several results of one check into a single line.
fn merge_results(name: &str, sector: Option<&WeightSector>, parts: Vec<Result<CheckResult>>) -> CheckResult {
    let mut out = CheckResult::from_comparison(name, sector, Comparison::default());
    for part in parts {
        let part = part.unwrap_or_else(|e| CheckResult::errored(name, sector, &e));
        if !part.passed() && out.passed() {
            out.status = Status::Fail;
            out.witness = part.witness.clone();
        }
        out.residual = out.residual.max(part.residual);
    }
    out
}

struct Context<S> {
    cfg: ModelConfig<S>,
    exact: ModelConfig<ExactRational>,
    float: Option<ModelConfig<ComplexDouble>>,
    tol: f64,
    seed: u64,
}

impl<S: Scalar> Context<S> {
    fn lift(&self, v: &ExactRational) -> Result<S> {
        S::from_exact(v)
    }

    /// Draws until `f` stops hitting poles.
    fn with_draws<T>(&self, label: &str, mut f: impl FnMut(&mut rand_chacha::ChaCha8Rng) -> Result<T>) -> Result<T> {
        let mut rng = rng_for(self.seed, label);
        let mut last = None;
        for _ in 0..MAX_REDRAWS {
            match f(&mut rng) {
                Err(e @ Error::PoleHit(_)) => last = Some(e),
                other => return other,
            }
        }
        Err(last.expect("at least one draw"))
    }

    fn argument(&self, rng: &mut rand_chacha::ChaCha8Rng) -> Result<S> {
        self.lift(&random_argument(rng, &self.exact.flavor, self.exact.n_colors))
    }

    /// A point `x0` where the transfer matrix is regular.
    fn transfer_point(&self, rng: &mut rand_chacha::ChaCha8Rng) -> Result<S> {
        let x0 = self.argument(rng)?;
        transfer_matrix(&self.cfg, &x0)?;
        Ok(x0)
    }

    fn z_samples(&self, sector: &WeightSector) -> Result<Vec<S>> {
        let mut rng = rng_for(self.seed, &format!("z samples {sector}"));
        let mut zs: Vec<ExactRational> = Vec::new();
        while zs.len() < self.cfg.n_sites + 1 {
            let z = random_rational(&mut rng, 9, 4);
            if !zs.contains(&z) {
                zs.push(z);
            }
        }
        zs.iter().map(|z| self.lift(z)).collect()
    }

    fn run(&self, name: &str, sector: Option<&WeightSector>) -> CheckResult {
        let (cfg, tol, n) = (&self.cfg, self.tol, self.cfg.n_sites);
        let parts: Vec<Result<CheckResult>> = match (name, sector) {
            ("ybe", _) => (0..DRAWS)
                .map(|k| {
                    self.with_draws(&format!("ybe {k}"), |rng| {
                        let (x, y) = (self.argument(rng)?, self.argument(rng)?);
                        check_yang_baxter(&cfg.flavor, cfg.n_colors, &x, &y, tol)
                    })
                })
                .collect(),
            ("unitarity", _) => (0..DRAWS)
                .map(|k| self.with_draws(&format!("unitarity {k}"), |rng| check_unitarity(&cfg.flavor, cfg.n_colors, &self.argument(rng)?, tol)))
                .collect(),
            ("twist-commute", _) => (0..DRAWS)
                .map(|k| {
                    self.with_draws(&format!("twist {k}"), |rng| check_twist_commutation(&cfg.flavor, &cfg.twist, &self.argument(rng)?, tol))
                })
                .collect(),
            ("transfer-commute", _) => vec![
                self.with_draws("transfer-commute", |rng| {
                    let pairs = (0..DRAWS)
                        .map(|_| Ok((self.transfer_point(rng)?, self.transfer_point(rng)?)))
                        .collect::<Result<Vec<_>>>()?;
                    check_transfer_commutativity(cfg, &pairs, tol)
                }),
                check_integrals(cfg, tol),
            ],
            ("pole-expansion", _) => vec![self.with_draws("pole-expansion", |rng| {
                let samples = (0..n + 2).map(|_| self.transfer_point(rng)).collect::<Result<Vec<_>>>()?;
                check_pole_expansion(cfg, &samples, tol)
            })],
            ("sum-rule", _) => vec![sum_rule(cfg, tol)],
            ("qkz-compat", _) => (1..=n).tuple_combinations().map(|(i, j)| qkz_compatibility(cfg, i, j, tol)).collect(),
            ("omega", _) => vec![check_omega_invariance(cfg, tol)],
            ("k-projection", _) => (1..=n).map(|i| check_k_projection(cfg, i, tol)).collect(),
            ("proposition-higher", _) => (1..=n)
                .flat_map(|d| (1..=n).combinations(d))
                .map(|subset| check_proposition_higher(cfg, &subset, tol))
                .collect(),
            ("det-identity", Some(w)) => vec![self.z_samples(w).and_then(|zs| check_det_identity(cfg, w, &zs, tol))],
            ("symmetric-identity", Some(w)) => (1..=n).map(|d| check_symmetric_identity(cfg, w, d, tol)).collect(),
            ("macdonald-eigenvalue", Some(w)) => (1..=n).map(|d| check_macdonald_eigenvalue(cfg, w, d, tol)).collect(),
            ("correspondence", Some(w)) => vec![match &self.float {
                None => Err(Error::NeedsFloat("correspondence".into())),
                Some(f) => check_correspondence(f, w, self.tol.max(1e-8), self.seed).map(|r| r.to_check_result()),
            }],
            _ => vec![Err(Error::Config(format!("unknown check {name:?}")))],
        };
        merge_results(name, sector, parts)
    }
}

fn run_in<S: Scalar>(ctx: &Context<S>, tasks: &[(String, Option<WeightSector>)], opts: RunOptions) -> Vec<CheckResult> {
    opts.execution.map_slice(tasks, |(name, sector)| {
        let start = Instant::now();
        let mut res = ctx.run(name, sector.as_ref());
        if opts.timings {
            res.millis = Some(start.elapsed().as_millis() as u64);
        }
        res
    })
}

/// Runs every selected check (per sector where applicable).
pub fn run(cfg: &RunConfig, opts: RunOptions) -> Result<RunReport> {
    cfg.validate()?;
    let sectors = cfg.sector_list();
    let mut tasks = Vec::new();
    for name in CHECKS.iter().filter(|c| cfg.checks.iter().any(|s| s == *c)) {
        if SECTOR_CHECKS.contains(name) {
            tasks.extend(sectors.iter().map(|s| (name.to_string(), Some(s.clone()))));
        } else {
            tasks.push((name.to_string(), None));
        }
    }
    let results = with_workers(opts.workers, || -> Result<Vec<CheckResult>> {
        Ok(match cfg.mode {
            Mode::Exact => {
                let ctx = Context { cfg: cfg.model.clone(), exact: cfg.model.clone(), float: None, tol: cfg.tol, seed: cfg.seed };
                run_in(&ctx, &tasks, opts)
            }
            Mode::Float => {
                let float = cfg.model.to_float()?;
                let ctx = Context { cfg: float.clone(), exact: cfg.model.clone(), float: Some(float), tol: cfg.tol, seed: cfg.seed };
                run_in(&ctx, &tasks, opts)
            }
        })
    })?;
    let overall = if results.iter().all(CheckResult::passed) { Status::Pass } else { Status::Fail };
    Ok(RunReport { config: ConfigEcho::new(cfg), results, overall })
}

pub fn emit_json(report: &RunReport) -> String {
    serde_json::to_string_pretty(report).expect("report is serializable")
}

pub fn emit_text(report: &RunReport) -> String {
    let rows: Vec<[String; 4]> = report
        .results
        .iter()
        .map(|r| {
            let status = if r.passed() { "pass" } else { "FAIL" };
            let residual = if r.residual.is_finite() { format!("{:.3e}", r.residual) } else { "-".to_string() };
            [r.name.clone(), r.sector.clone().unwrap_or_else(|| "-".into()), status.to_string(), residual]
        })
        .collect();
    let header = ["check", "sector", "status", "residual"].map(String::from);
    let widths: Vec<usize> = (0..4).map(|c| rows.iter().chain([&header]).map(|r| r[c].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for (k, row) in [&header].into_iter().chain(rows.iter()).enumerate() {
        let line = row.iter().zip(&widths).map(|(cell, w)| format!("{cell:<w$}")).join("  ");
        let _ = writeln!(out, "{}", line.trim_end());
        if k > 0 {
            if let Some(w) = &report.results[k - 1].witness {
                let _ = writeln!(out, "    {w}");
            }
        }
    }
    let overall = if report.passed() { "pass" } else { "FAIL" };
    let _ = writeln!(out, "overall: {overall}");
    out
}

pub fn emit(report: &RunReport, format: Format) -> String {
    match format {
        Format::Json => emit_json(report),
        Format::Text => emit_text(report),
    }
}

fn float_model(cfg: &RunConfig, what: &str) -> Result<ModelConfig<ComplexDouble>> {
    match cfg.mode {
        Mode::Exact => Err(Error::NeedsFloat(what.into())),
        Mode::Float => cfg.model.to_float(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub sector: WeightSector,
    pub states: Vec<crate::correspondence::JointEigenstate>,
    pub momenta: Vec<crate::correspondence::Momenta>,
}

/// Joint spectrum and momenta of each selected sector.
pub fn spectrum(cfg: &RunConfig) -> Result<Vec<SpectrumReport>> {
    let model = float_model(cfg, "spectrum")?;
    cfg.sector_list()
        .into_iter()
        .map(|sector| {
            let states = diagonalize_sector(&model, &sector, cfg.tol, cfg.seed)?;
            let momenta = states.iter().map(|s| momenta_from_eigenvalues(&model, s)).collect::<Result<_>>()?;
            Ok(SpectrumReport { sector, states, momenta })
        })
        .collect()
}

/// Full correspondence reports of each selected sector.
pub fn correspond(cfg: &RunConfig) -> Result<Vec<CorrespondenceReport>> {
    let model = float_model(cfg, "correspond")?;
    cfg.sector_list()
        .into_iter()
        .map(|sector| check_correspondence(&model, &sector, cfg.tol.max(1e-8), cfg.seed))
        .collect()
}

pub fn spectrum_text(reports: &[SpectrumReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(out, "sector {}: {} states", r.sector, r.states.len());
        for (k, (st, m)) in r.states.iter().zip(&r.momenta).enumerate() {
            let show = |v: &[num_complex::Complex64]| v.iter().map(|z| format!("{:.6}{:+.6}i", z.re, z.im)).join(", ");
            let _ = writeln!(out, "  state {k}: H = [{}]", show(&st.h_eigenvalues));
            let _ = writeln!(out, "           p = [{}]", show(&m.momenta));
        }
    }
    out
}

pub fn correspond_text(reports: &[CorrespondenceReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let (state, dev) = r.worst();
        let status = if r.passed() { "pass" } else { "FAIL" };
        let _ = writeln!(out, "sector {}: {} states, worst deviation {dev:.3e} (state {state}) {status}", r.sector, r.states.len());
        let show = |v: &[num_complex::Complex64]| v.iter().map(|z| format!("{:.6}{:+.6}i", z.re, z.im)).join(", ");
        let _ = writeln!(out, "  target: [{}]", show(&r.target));
        for (k, st) in r.states.iter().enumerate() {
            let _ = writeln!(out, "  state {k}: Lax spectrum [{}]", show(&st.lax_spectrum));
        }
    }
    out
}

/// Process exit code for an outcome.
pub fn exit_code(outcome: &Result<bool>) -> i32 {
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(_) => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RATIONAL: &str = "\
# sample chain
model = rational
N = 2
n = 3
eta = 1/2
hbar = 1/3
x = [0, 2/5, 9/7]
g = [2, 3]
";

    #[test]
    fn parses_sample_config() {
        let cfg = parse_config(RATIONAL).unwrap();
        assert_eq!(cfg.model.n_sites, 3);
        assert_eq!(cfg.model.coords[1], ExactRational::new(2, 5).unwrap());
        assert_eq!(cfg.checks.len(), CHECKS.len() - 1);
        let float = parse_config(&format!("{RATIONAL}mode = float\n")).unwrap();
        assert_eq!(float.checks.len(), CHECKS.len());
        assert_eq!(cfg.mode, Mode::Exact);
        assert_eq!(cfg.tol, DEFAULT_TOL);
    }

    #[test]
    fn generic_position_is_enforced_at_load() {
        let text = "model = rational\nN = 2\nn = 2\neta = 1/2\nhbar = 1\nx = [0, 1/2]\ng = [2, 3]\n";
        assert_eq!(parse_config(text).unwrap_err(), Error::GenericPosition("x_2 - x_1 = eta".into()));
    }

    #[test]
    fn missing_trig_parameter_is_a_parse_error() {
        let text = "model = trigonometric\nN = 2\nn = 2\nh = 3/2\nu = [1, 3/2]\ng = [2, 3]\n";
        assert!(matches!(parse_config(text), Err(Error::Parse { .. })));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_config(&format!("{RATIONAL}tol = 0\n")), Err(Error::NonPositiveTolerance(_))));
        assert!(matches!(parse_config(&format!("{RATIONAL}colour = 2\n")), Err(Error::Parse { line: 9, .. })));
        assert!(matches!(parse_config(&format!("{RATIONAL}eta = 1\n")), Err(Error::Parse { line: 9, .. })));
        assert!(matches!(parse_config("model rational\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_config(&RATIONAL.replace("[0, 2/5, 9/7]", "[0, 2/5]")), Err(Error::Parse { line: 7, .. })));
        assert!(matches!(parse_config(&format!("{RATIONAL}checks = [ybe, nope]\n")), Err(Error::Config(_))));
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_exact("-0.25").unwrap(), ExactRational::new(-1, 4).unwrap());
        assert_eq!(parse_exact("3/6").unwrap(), ExactRational::new(1, 2).unwrap());
        assert_eq!(parse_exact("1.").unwrap(), ExactRational::from_int(1));
        assert!(parse_exact("1.2.3").is_err());
        assert!(parse_exact("abc").is_err());
    }

    #[test]
    fn sector_and_check_keys() {
        let cfg = parse_config(&format!("{RATIONAL}checks = [ybe, omega]\nsectors = [(2,1), (0,3)]\n")).unwrap();
        assert_eq!(cfg.checks, vec!["ybe", "omega"]);
        assert_eq!(cfg.sector_list().len(), 2);
        assert!(parse_config(&format!("{RATIONAL}sectors = [(2,2)]\n")).is_err());
    }

    #[test]
    fn single_check_run() {
        let mut cfg = parse_config(RATIONAL).unwrap();
        cfg.set_checks(&["ybe".to_string()]);
        let rep = run(&cfg, RunOptions::default()).unwrap();
        assert_eq!(rep.results.len(), 1);
        assert!(rep.passed());
        assert_eq!(rep.results[0].residual, 0.0);
    }

    #[test]
    fn full_exact_run_passes() {
        let rep = run(&parse_config(RATIONAL).unwrap(), RunOptions::default()).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.results.len(), 10 + 3 * 4);
        assert!(rep.results.iter().all(|r| r.residual == 0.0));
    }

    #[test]
    fn empty_check_list_passes_vacuously() {
        let mut cfg = parse_config(RATIONAL).unwrap();
        cfg.checks.clear();
        let rep = run(&cfg, RunOptions::default()).unwrap();
        assert!(rep.results.is_empty() && rep.passed());
    }

    #[test]
    fn exact_mode_correspondence_needs_float() {
        let mut cfg = parse_config(RATIONAL).unwrap();
        cfg.set_checks(&["correspondence".to_string()]);
        cfg.sectors = SectorSelection::List(vec!["2,1".parse().unwrap()]);
        let rep = run(&cfg, RunOptions::default()).unwrap();
        assert!(!rep.passed());
        assert!(rep.results[0].witness.as_deref().unwrap().contains("floating-point"));
        assert!(matches!(spectrum(&cfg), Err(Error::NeedsFloat(_))));
    }

    #[test]
    fn text_report_shows_failures() {
        let mut rep = RunReport {
            config: ConfigEcho::new(&parse_config(RATIONAL).unwrap()),
            results: vec![CheckResult::from_comparison("ybe", None, Comparison::default())],
            overall: Status::Pass,
        };
        rep.results.push(CheckResult::errored("omega", None, &Error::PoleHit("x".into())));
        rep.results[0].residual = 1.5e-12;
        rep.overall = Status::Fail;
        let text = emit_text(&rep);
        assert!(text.contains("1.500e-12") && text.contains("FAIL") && text.contains("pole hit"));
        let back: RunReport = serde_json::from_str(&emit_json(&rep)).unwrap();
        assert_eq!(back.results, rep.results);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Ok(true)), 0);
        assert_eq!(exit_code(&Ok(false)), 1);
        assert_eq!(exit_code(&Err(Error::Config("x".into()))), 2);
    }
}
