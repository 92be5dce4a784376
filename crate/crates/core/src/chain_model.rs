//! Composite operators of the inhomogeneous twisted spin chain and of the
//! qKZ connection: `K_i^{(ħ)}`, `H_i`, `M_a`, `T(x)` and their sum rules.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::report::{CheckResult, Comparison};
use crate::rmatrix::RFlavor;
use crate::scalars::{ComplexDouble, Scalar};
use crate::tensor_space::{embed, local_diagonal, ChainOperator, Space, WeightSector};

/// Parameters of one chain.
///
/// In the rational flavor `coords` are the inhomogeneities `x_i` and `step` is
/// `ħ`; in the trigonometric flavor `coords` are `u_i = e^{x_i}` and `step` is
/// `h = e^{ηħ}` (with `t = e^η` inside the flavor).
#[derive(Clone, Debug, PartialEq)]
pub struct ModelConfig<S> {
    pub flavor: RFlavor<S>,
    pub n_colors: usize,
    pub n_sites: usize,
    pub step: S,
    pub coords: Vec<S>,
    pub twist: Vec<S>,
}

const COLLISION_TOL: f64 = 1e-12;

impl<S: Scalar> ModelConfig<S> {
    pub fn rational(eta: S, hbar: S, x: Vec<S>, twist: Vec<S>) -> Result<Self> {
        let cfg = Self {
            flavor: RFlavor::Rational { eta },
            n_colors: twist.len(),
            n_sites: x.len(),
            step: hbar,
            coords: x,
            twist,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn trigonometric(t: S, h: S, u: Vec<S>, twist: Vec<S>) -> Result<Self> {
        let cfg = Self {
            flavor: RFlavor::Trigonometric { t },
            n_colors: twist.len(),
            n_sites: u.len(),
            step: h,
            coords: u,
            twist,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Structural checks plus generic position of the inhomogeneities.
    pub fn validate(&self) -> Result<()> {
        if self.n_colors == 0 || self.n_sites == 0 {
            return Err(Error::Config("need at least one color and one site".into()));
        }
        if self.coords.len() != self.n_sites || self.twist.len() != self.n_colors {
            return Err(Error::Config("parameter list lengths disagree with N, n".into()));
        }
        Space::full(self.n_colors, self.n_sites)?;
        if let Some(a) = self.twist.iter().position(Scalar::is_zero) {
            return Err(Error::Config(format!("twist g_{} = 0", a + 1)));
        }
        let eq = |a: &S, b: &S| a.close_to(b, COLLISION_TOL);
        match &self.flavor {
            RFlavor::Rational { eta } => {
                if eta.is_zero() {
                    return Err(Error::Config("eta = 0".into()));
                }
                for j in 0..self.n_sites {
                    for i in 0..j {
                        let d = self.coords[j].clone() - self.coords[i].clone();
                        let (a, b) = (i + 1, j + 1);
                        if d.is_zero() || eq(&d, &S::zero()) {
                            return Err(Error::GenericPosition(format!("x_{b} = x_{a}")));
                        }
                        if eq(&d, eta) {
                            return Err(Error::GenericPosition(format!("x_{b} - x_{a} = eta")));
                        }
                        if eq(&d, &-eta.clone()) {
                            return Err(Error::GenericPosition(format!("x_{b} - x_{a} = -eta")));
                        }
                    }
                }
            }
            RFlavor::Trigonometric { t } => {
                let t2 = t.clone() * t.clone();
                if t.is_zero() || eq(&t2, &S::one()) {
                    return Err(Error::Config("t must satisfy t != 0 and t^2 != 1".into()));
                }
                if self.step.is_zero() {
                    return Err(Error::Config("h = 0".into()));
                }
                if let Some(i) = self.coords.iter().position(Scalar::is_zero) {
                    return Err(Error::Config(format!("u_{} = 0", i + 1)));
                }
                let sq: Vec<S> = self.coords.iter().map(|u| u.clone() * u.clone()).collect();
                for j in 0..self.n_sites {
                    for i in 0..j {
                        let (a, b) = (i + 1, j + 1);
                        if eq(&sq[j], &sq[i]) {
                            return Err(Error::GenericPosition(format!("u_{b}^2 = u_{a}^2")));
                        }
                        if eq(&sq[j], &(sq[i].clone() * t2.clone())) {
                            return Err(Error::GenericPosition(format!("u_{b}^2 = u_{a}^2 t^2")));
                        }
                        if eq(&(sq[j].clone() * t2.clone()), &sq[i]) {
                            return Err(Error::GenericPosition(format!("u_{b}^2 t^2 = u_{a}^2")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn space(&self) -> Space {
        Space::Full { n_colors: self.n_colors, n_sites: self.n_sites }
    }

    /// The same chain with `ħ = 0` (`h = 1`).
    pub fn at_zero_step(&self) -> Self {
        let mut cfg = self.clone();
        cfg.step = match self.flavor {
            RFlavor::Rational { .. } => S::zero(),
            RFlavor::Trigonometric { .. } => S::one(),
        };
        cfg
    }

    /// `c + ηħ`, or `c·h` for exponentials.
    pub fn shifted(&self, c: &S) -> S {
        match &self.flavor {
            RFlavor::Rational { eta } => c.clone() + eta.clone() * self.step.clone(),
            RFlavor::Trigonometric { .. } => c.clone() * self.step.clone(),
        }
    }

    fn coordinate(&self, site: usize, shifted: &BTreeSet<usize>) -> S {
        let c = &self.coords[site - 1];
        if shifted.contains(&site) { self.shifted(c) } else { c.clone() }
    }

    /// Spectral argument `x_i - x_j` of `R_ij` (a ratio for exponentials).
    pub fn argument(&self, i: usize, j: usize) -> Result<S> {
        self.flavor.difference(&self.coords[i - 1], &self.coords[j - 1])
    }

    pub(crate) fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.n_sites {
            return Err(Error::BadSite { site, n_sites: self.n_sites });
        }
        Ok(())
    }

    /// `g^{(i)}`.
    pub fn twist_at(&self, site: usize) -> Result<ChainOperator<S>> {
        embed(&local_diagonal(&self.twist)?, &[site], self.n_sites)
    }

    /// `η` or `sinh η`.
    pub fn deformation_scale(&self) -> S {
        match &self.flavor {
            RFlavor::Rational { eta } => eta.clone(),
            RFlavor::Trigonometric { t } => {
                let t2 = t.clone() * t.clone();
                (t2 - S::one()) * (S::from_int(2) * t.clone()).inv().expect("t != 0")
            }
        }
    }

    /// Factor with `H_i = K_i^{(0)} Π_{j≠i} ratio(i, j)`:
    /// `(x_i - x_j + η)/(x_i - x_j)` or the sinh analog.
    pub fn ratio(&self, i: usize, j: usize) -> Result<S> {
        self.flavor.tilde_factor(&self.argument(i, j)?)
    }

    /// `Π_{j≠i} ratio(i, j)`.
    pub fn ratio_product(&self, i: usize) -> Result<S> {
        let mut acc = S::one();
        for j in (1..=self.n_sites).filter(|&j| j != i) {
            acc = acc * self.ratio(i, j)?;
        }
        Ok(acc)
    }

    /// Entry weight of the determinant matrix:
    /// `η / (x_j - x_i + η)` or `sinh η / sinh(x_j - x_i + η)`.
    pub fn kernel(&self, i: usize, j: usize) -> Result<S> {
        let pole = || Error::PoleHit(format!("kernel({i}, {j})"));
        match &self.flavor {
            RFlavor::Rational { eta } => {
                let den = self.coords[j - 1].clone() - self.coords[i - 1].clone() + eta.clone();
                eta.try_div(&den).map_err(|_| pole())
            }
            RFlavor::Trigonometric { t } => {
                let w = self.argument(j, i)?;
                let t2 = t.clone() * t.clone();
                let den = w.clone() * w.clone() * t2.clone() - S::one();
                ((t2 - S::one()) * w).try_div(&den).map_err(|_| pole())
            }
        }
    }

    /// `η² / (x_i - x_j)²` or `sinh² η / sinh²(x_i - x_j)`.
    pub fn pair_factor(&self, i: usize, j: usize) -> Result<S> {
        let pole = || Error::PoleHit(format!("pair factor ({i}, {j})"));
        match &self.flavor {
            RFlavor::Rational { eta } => {
                let d = self.argument(i, j)?;
                (eta.clone() * eta.clone()).try_div(&(d.clone() * d)).map_err(|_| pole())
            }
            RFlavor::Trigonometric { t } => {
                let w = self.argument(i, j)?;
                let num = (t.clone() * t.clone() - S::one()) * w.clone();
                let den = (w.clone() * w - S::one()) * t.clone();
                let r = num.try_div(&den).map_err(|_| pole())?;
                Ok(r.clone() * r)
            }
        }
    }

    /// `q^{M}` style power `t^k` (trigonometric only).
    fn t_power(&self, k: i32) -> Result<S> {
        self.flavor.q().powi(k)
    }

    /// Per-color contribution to the weight-operator side of the sum rule:
    /// `g_a M_a`, or `g_a sinh(η M_a)/sinh η` evaluated as
    /// `g_a (t^M - t^{-M}) / (t - t^{-1})`.
    pub fn color_energy(&self, color: usize, count: usize) -> Result<S> {
        let g = self.twist[color - 1].clone();
        match &self.flavor {
            RFlavor::Rational { .. } => Ok(g * S::from_int(count as i64)),
            RFlavor::Trigonometric { t } => {
                let m = count as i32;
                let num = self.t_power(m)? - self.t_power(-m)?;
                let den = t.clone() - t.inv()?;
                Ok(g * num.try_div(&den)?)
            }
        }
    }

    /// Eigenvalue `E` of the first Macdonald operator on a sector.
    pub fn sector_energy(&self, weight: &WeightSector) -> Result<S> {
        weight.check(self.n_colors, self.n_sites)?;
        let mut acc = S::zero();
        for a in 1..=self.n_colors {
            acc = acc + self.color_energy(a, weight.count(a))?;
        }
        Ok(acc)
    }

    /// Eigenvalues contributed by one color with `count` sites: `g_a` repeated
    /// (rational) or the string `g_a t^{-(M_a-1)+2α}`, `α < M_a`.
    pub fn color_string(&self, color: usize, count: usize) -> Result<Vec<S>> {
        let g = &self.twist[color - 1];
        (0..count)
            .map(|alpha| match self.flavor {
                RFlavor::Rational { .. } => Ok(g.clone()),
                RFlavor::Trigonometric { .. } => Ok(g.clone() * self.t_power(2 * alpha as i32 + 1 - count as i32)?),
            })
            .collect()
    }

    /// Expected Lax spectrum on a sector, color by color.
    pub fn target_multiset(&self, weight: &WeightSector) -> Result<Vec<S>> {
        weight.check(self.n_colors, self.n_sites)?;
        let mut out = Vec::with_capacity(self.n_sites);
        for a in 1..=self.n_colors {
            out.extend(self.color_string(a, weight.count(a))?);
        }
        Ok(out)
    }

    /// Converts every parameter into another scalar domain.
    pub fn try_map<T: Scalar>(&self, f: impl Fn(&S) -> Result<T>) -> Result<ModelConfig<T>> {
        let flavor = match &self.flavor {
            RFlavor::Rational { eta } => RFlavor::Rational { eta: f(eta)? },
            RFlavor::Trigonometric { t } => RFlavor::Trigonometric { t: f(t)? },
        };
        Ok(ModelConfig {
            flavor,
            n_colors: self.n_colors,
            n_sites: self.n_sites,
            step: f(&self.step)?,
            coords: self.coords.iter().map(&f).collect::<Result<_>>()?,
            twist: self.twist.iter().map(&f).collect::<Result<_>>()?,
        })
    }

    pub fn to_float(&self) -> Result<ModelConfig<ComplexDouble>> {
        self.try_map(Scalar::to_complex)
    }

    /// Copy with a different twist (used to build reference sides).
    pub fn with_twist(&self, twist: &[S]) -> Result<Self> {
        let cfg = Self { twist: twist.to_vec(), ..self.clone() };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// `K_i^{(ħ)} = R_{i,i-1}(x_i - x_{i-1} + ηħ) … R_{i1}(x_i - x_1 + ηħ) g^{(i)}
/// R_{in}(x_i - x_n) … R_{i,i+1}(x_i - x_{i+1})`, after replacing `x_s` by
/// `x_s + ηħ` for every `s` in `shifted_sites`.
pub fn qkz_operator<S: Scalar>(cfg: &ModelConfig<S>, i: usize, shifted_sites: &BTreeSet<usize>) -> Result<ChainOperator<S>> {
    cfg.check_site(i)?;
    if let Some(&s) = shifted_sites.iter().find(|&&s| s == 0 || s > cfg.n_sites) {
        return Err(Error::BadSite { site: s, n_sites: cfg.n_sites });
    }
    let n = cfg.n_sites;
    let xi = cfg.coordinate(i, shifted_sites);
    let mut factors = Vec::with_capacity(n);
    for j in (1..i).rev() {
        let arg = cfg.shifted(&cfg.flavor.difference(&xi, &cfg.coordinate(j, shifted_sites))?);
        factors.push(cfg.flavor.r(cfg.n_colors, i, j, &arg, n)?);
    }
    factors.push(cfg.twist_at(i)?);
    for j in (i + 1..=n).rev() {
        let arg = cfg.flavor.difference(&xi, &cfg.coordinate(j, shifted_sites))?;
        factors.push(cfg.flavor.r(cfg.n_colors, i, j, &arg, n)?);
    }
    ChainOperator::product(&cfg.space(), &factors)
}

/// `K_i^{(0)}`.
pub fn qkz_operator_at_zero<S: Scalar>(cfg: &ModelConfig<S>, i: usize) -> Result<ChainOperator<S>> {
    qkz_operator(&cfg.at_zero_step(), i, &BTreeSet::new())
}

/// `H_i`: the chain product with `R̃` and no shifts.
pub fn hamiltonian<S: Scalar>(cfg: &ModelConfig<S>, i: usize) -> Result<ChainOperator<S>> {
    cfg.check_site(i)?;
    let n = cfg.n_sites;
    let mut factors = Vec::with_capacity(n);
    for j in (1..i).rev() {
        factors.push(cfg.flavor.r_tilde(cfg.n_colors, i, j, &cfg.argument(i, j)?, n)?);
    }
    factors.push(cfg.twist_at(i)?);
    for j in (i + 1..=n).rev() {
        factors.push(cfg.flavor.r_tilde(cfg.n_colors, i, j, &cfg.argument(i, j)?, n)?);
    }
    ChainOperator::product(&cfg.space(), &factors)
}

/// `H_1, …, H_n`.
pub fn hamiltonians<S: Scalar>(cfg: &ModelConfig<S>) -> Result<Vec<ChainOperator<S>>> {
    hamiltonians_with(cfg, Execution::default())
}

pub fn hamiltonians_with<S: Scalar>(cfg: &ModelConfig<S>, exec: Execution) -> Result<Vec<ChainOperator<S>>> {
    exec.map_indexed(cfg.n_sites, |k| hamiltonian(cfg, k + 1)).into_iter().collect()
}

/// `M_a = Σ_l e_aa^{(l)}`.
pub fn weight_operator<S: Scalar>(cfg: &ModelConfig<S>, color: usize) -> Result<ChainOperator<S>> {
    if color == 0 || color > cfg.n_colors {
        return Err(Error::BadColor { color, n_colors: cfg.n_colors });
    }
    Ok(ChainOperator::diagonal(cfg.space(), |s| S::from_int(s.count(color) as i64)))
}

/// Diagonal operator `Σ_a f(a, M_a)` on every basis state.
pub fn weight_function<S: Scalar>(cfg: &ModelConfig<S>, f: impl Fn(usize, usize) -> Result<S>) -> Result<ChainOperator<S>> {
    let space = cfg.space();
    let diag = (0..space.dim())
        .map(|k| {
            let st = space.state(k);
            let mut acc = S::zero();
            for a in 1..=cfg.n_colors {
                acc = acc + f(a, st.count(a))?;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<S>>>()?;
    let rows = diag.into_iter().enumerate().map(|(k, v)| vec![(k, v)]).collect();
    ChainOperator::from_rows(space, rows)
}

/// `T(x0) = tr_0 R̃_{0n}(x0 - x_n) … R̃_{01}(x0 - x_1) g^{(0)}`.
///
/// The auxiliary factor is never materialized: the chain is multiplied as an
/// `N × N` matrix of quantum-space operators, one auxiliary row at a time.
pub fn transfer_matrix<S: Scalar>(cfg: &ModelConfig<S>, x0: &S) -> Result<ChainOperator<S>> {
    transfer_matrix_with(cfg, x0, Execution::default())
}

pub fn transfer_matrix_with<S: Scalar>(cfg: &ModelConfig<S>, x0: &S, exec: Execution) -> Result<ChainOperator<S>> {
    let (nc, n) = (cfg.n_colors, cfg.n_sites);
    // blocks[k][a][b]: (a, b) auxiliary block of R̃_{0k}, embedded on site k
    let mut blocks = Vec::with_capacity(n);
    for k in 1..=n {
        let arg = cfg.flavor.difference(x0, &cfg.coords[k - 1])?;
        let local = cfg.flavor.local_r_tilde(nc, &arg)?;
        let one_site = Space::full(nc, 1)?;
        let mut per_k = Vec::with_capacity(nc);
        for a in 0..nc {
            let mut row = Vec::with_capacity(nc);
            for b in 0..nc {
                let trip = (0..nc).flat_map(|c| (0..nc).map(move |d| (c, d))).filter_map(|(c, d)| {
                    let v = local.get(a * nc + c, b * nc + d);
                    (!v.is_zero()).then_some((c, d, v))
                });
                let block = ChainOperator::from_triplets(one_site.clone(), trip)?;
                row.push(embed(&block, &[k], n)?);
            }
            per_k.push(row);
        }
        blocks.push(per_k);
    }
    let space = cfg.space();
    let diagonal_terms = exec.map_indexed(nc, |a| -> Result<ChainOperator<S>> {
        // row a of the auxiliary product, starting from R̃_{0n}
        let mut cur: Vec<ChainOperator<S>> = blocks[n - 1][a].clone();
        for k in (0..n - 1).rev() {
            let mut next = Vec::with_capacity(nc);
            for b in 0..nc {
                let mut acc = ChainOperator::zero(space.clone());
                for (c, cur_c) in cur.iter().enumerate() {
                    if cur_c.is_zero() || blocks[k][c][b].is_zero() {
                        continue;
                    }
                    acc = acc.add(&cur_c.compose_with(&blocks[k][c][b], Execution::Sequential)?)?;
                }
                next.push(acc);
            }
            cur = next;
        }
        Ok(cur[a].scale(&cfg.twist[a]))
    });
    let mut total = ChainOperator::zero(space);
    for term in diagonal_terms {
        total = total.add(&term?)?;
    }
    Ok(total)
}

/// Coefficient of `H_k` in the pole expansion of `T(x0)`:
/// `η / (x0 - x_k)`, or `sinh η · coth(x0 - x_k)`.
pub fn pole_weight<S: Scalar>(cfg: &ModelConfig<S>, x0: &S, k: usize) -> Result<S> {
    let pole = || Error::PoleHit(format!("x0 at inhomogeneity {k}"));
    match &cfg.flavor {
        RFlavor::Rational { eta } => eta.try_div(&(x0.clone() - cfg.coords[k - 1].clone())).map_err(|_| pole()),
        RFlavor::Trigonometric { .. } => {
            let w = cfg.flavor.difference(x0, &cfg.coords[k - 1])?;
            let w2 = w.clone() * w;
            let coth = (w2.clone() + S::one()).try_div(&(w2 - S::one())).map_err(|_| pole())?;
            Ok(cfg.deformation_scale() * coth)
        }
    }
}

/// Constant term and residues of `T(x)`.
#[derive(Clone, Debug)]
pub struct TransferExpansion<S> {
    /// `tr(g)·I` (rational) or the operator `C` (trigonometric).
    pub constant: ChainOperator<S>,
    /// `H_1, …, H_n`.
    pub residues: Vec<ChainOperator<S>>,
    pub comparison: Comparison,
}

/// Reconstructs `T` from its pole expansion at every sample and compares
/// with the directly built transfer matrix.
///
/// Rational: `T(x) = tr(g) I + Σ_j η H_j / (x - x_j)`.
/// Trigonometric: `T(x) = C + sinh η Σ_k H_k coth(x - x_k)`, where `C` is read
/// off at the first sample and must reproduce `T` at the others; in addition
/// `C ± sinh η Σ_k H_k = Σ_a g_a t^{±M_a}`.
pub fn transfer_expansion<S: Scalar>(cfg: &ModelConfig<S>, samples: &[S], tol: f64) -> Result<TransferExpansion<S>> {
    let residues = hamiltonians(cfg)?;
    let space = cfg.space();
    let pole_sum = |x0: &S| -> Result<ChainOperator<S>> {
        let mut acc = ChainOperator::zero(space.clone());
        for (k, h) in residues.iter().enumerate() {
            acc = acc.add(&h.scale(&pole_weight(cfg, x0, k + 1)?))?;
        }
        Ok(acc)
    };
    let mut cmp = Comparison::default();
    let (constant, checked) = match cfg.flavor {
        RFlavor::Rational { .. } => {
            let trace = cfg.twist.iter().cloned().fold(S::zero(), |a, b| a + b);
            (ChainOperator::identity(space.clone()).scale(&trace), samples)
        }
        RFlavor::Trigonometric { .. } => {
            let (first, rest) = samples
                .split_first()
                .ok_or_else(|| Error::Config("pole expansion needs at least one sample".into()))?;
            let c = transfer_matrix(cfg, first)?.sub(&pole_sum(first)?)?;
            let h_sum = residues.iter().skip(1).try_fold(residues[0].clone(), |a, h| a.add(h))?;
            let scaled = h_sum.scale(&cfg.deformation_scale());
            for sign in [1i32, -1] {
                let lhs = if sign > 0 { c.add(&scaled)? } else { c.sub(&scaled)? };
                let rhs = weight_function(cfg, |a, m| Ok(cfg.twist[a - 1].clone() * cfg.t_power(sign * m as i32)?))?;
                let side = if sign > 0 { "+inf" } else { "-inf" };
                cmp.merge(lhs.compare(&rhs, tol)?.with_context(format!("T({side})")));
            }
            (c, rest)
        }
    };
    for x0 in checked {
        let reconstructed = constant.add(&pole_sum(x0)?)?;
        let direct = transfer_matrix(cfg, x0)?;
        cmp.merge(direct.compare(&reconstructed, tol)?.with_context(format!("x0 = {x0}")));
    }
    Ok(TransferExpansion { constant, residues, comparison: cmp })
}

/// Like [`transfer_expansion`] but turns a mismatch into an error.
pub fn pole_expansion<S: Scalar>(cfg: &ModelConfig<S>, samples: &[S], tol: f64) -> Result<TransferExpansion<S>> {
    let exp = transfer_expansion(cfg, samples, tol)?;
    if !exp.comparison.agree {
        return Err(Error::IdentityViolation {
            name: "pole-expansion".into(),
            witness: exp.comparison.witness.clone().unwrap_or_default(),
        });
    }
    Ok(exp)
}

pub fn check_pole_expansion<S: Scalar>(cfg: &ModelConfig<S>, samples: &[S], tol: f64) -> Result<CheckResult> {
    let exp = transfer_expansion(cfg, samples, tol)?;
    Ok(CheckResult::from_comparison("pole-expansion", None, exp.comparison))
}

/// `Σ_i H_i = Σ_a g_a M_a`, or `Σ_a g_a sinh(η M_a)/sinh η`.
pub fn sum_rule<S: Scalar>(cfg: &ModelConfig<S>, tol: f64) -> Result<CheckResult> {
    let hs = hamiltonians(cfg)?;
    let lhs = hs.iter().skip(1).try_fold(hs[0].clone(), |a, h| a.add(h))?;
    let rhs = weight_function(cfg, |a, m| cfg.color_energy(a, m))?;
    Ok(CheckResult::from_comparison("sum-rule", None, lhs.compare(&rhs, tol)?))
}

/// `(e^{ηħ∂_i} K_j) K_i = (e^{ηħ∂_j} K_i) K_j`.
pub fn qkz_compatibility<S: Scalar>(cfg: &ModelConfig<S>, i: usize, j: usize, tol: f64) -> Result<CheckResult> {
    if i == j {
        return Err(Error::BadSite { site: j, n_sites: cfg.n_sites });
    }
    let none = BTreeSet::new();
    let lhs = qkz_operator(cfg, j, &BTreeSet::from([i]))?.compose(&qkz_operator(cfg, i, &none)?)?;
    let rhs = qkz_operator(cfg, i, &BTreeSet::from([j]))?.compose(&qkz_operator(cfg, j, &none)?)?;
    let cmp = lhs.compare(&rhs, tol)?.with_context(format!("(i, j) = ({i}, {j})"));
    Ok(CheckResult::from_comparison("qkz-compat", None, cmp))
}

/// `[T(x), T(x')] = 0` for each sample pair.
pub fn check_transfer_commutativity<S: Scalar>(cfg: &ModelConfig<S>, pairs: &[(S, S)], tol: f64) -> Result<CheckResult> {
    let mut cmp = Comparison::default();
    for (x, y) in pairs {
        let c = transfer_matrix(cfg, x)?.commutator(&transfer_matrix(cfg, y)?)?;
        cmp.merge(c.compare(&ChainOperator::zero(cfg.space()), tol)?.with_context(format!("[T({x}), T({y})]")));
    }
    Ok(CheckResult::from_comparison("transfer-commute", None, cmp))
}

/// `[H_i, H_j] = [H_i, M_a] = [M_a, M_b] = 0` and
/// `H_i = K_i^{(0)} Π_{j≠i} ratio(i, j)`.
pub fn check_integrals<S: Scalar>(cfg: &ModelConfig<S>, tol: f64) -> Result<CheckResult> {
    let hs = hamiltonians(cfg)?;
    let ms = (1..=cfg.n_colors).map(|a| weight_operator(cfg, a)).collect::<Result<Vec<_>>>()?;
    let zero = ChainOperator::zero(cfg.space());
    let mut cmp = Comparison::default();
    for (i, hi) in hs.iter().enumerate() {
        for (j, hj) in hs.iter().enumerate().skip(i + 1) {
            cmp.merge(hi.commutator(hj)?.compare(&zero, tol)?.with_context(format!("[H_{}, H_{}]", i + 1, j + 1)));
        }
        for (a, m) in ms.iter().enumerate() {
            cmp.merge(hi.commutator(m)?.compare(&zero, tol)?.with_context(format!("[H_{}, M_{}]", i + 1, a + 1)));
        }
        let k0 = qkz_operator_at_zero(cfg, i + 1)?;
        let scaled = k0.scale(&cfg.ratio_product(i + 1)?);
        cmp.merge(hi.compare(&scaled, tol)?.with_context(format!("H_{} vs K_{}^(0)", i + 1, i + 1)));
    }
    for (a, ma) in ms.iter().enumerate() {
        for (b, mb) in ms.iter().enumerate().skip(a + 1) {
            cmp.merge(ma.commutator(mb)?.compare(&zero, tol)?.with_context(format!("[M_{}, M_{}]", a + 1, b + 1)));
        }
    }
    Ok(CheckResult::from_comparison("integrals-commute", None, cmp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::ExactRational;
    use crate::tensor_space::{all_sectors, BasisState};

    type Q = ExactRational;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d).unwrap()
    }

    fn rational_cfg(n_colors: usize, x: &[(i64, i64)]) -> ModelConfig<Q> {
        let twist = (0..n_colors).map(|a| q(2 + a as i64, 1)).collect();
        ModelConfig::rational(q(1, 2), q(1, 3), x.iter().map(|&(n, d)| q(n, d)).collect(), twist).unwrap()
    }

    fn trig_cfg(n_colors: usize, u: &[(i64, i64)]) -> ModelConfig<Q> {
        let twist = (0..n_colors).map(|a| q(2 + a as i64, 1)).collect();
        ModelConfig::trigonometric(q(2, 1), q(5, 4), u.iter().map(|&(n, d)| q(n, d)).collect(), twist).unwrap()
    }

    /// Transfer matrix with the auxiliary space as an explicit extra site,
    /// followed by a partial trace.
    fn transfer_brute(cfg: &ModelConfig<Q>, x0: &Q) -> ChainOperator<Q> {
        let (nc, n) = (cfg.n_colors, cfg.n_sites);
        let mut factors = Vec::new();
        for k in (1..=n).rev() {
            let arg = cfg.flavor.difference(x0, &cfg.coords[k - 1]).unwrap();
            factors.push(cfg.flavor.r_tilde(nc, 1, k + 1, &arg, n + 1).unwrap());
        }
        factors.push(embed(&local_diagonal(&cfg.twist).unwrap(), &[1], n + 1).unwrap());
        let big = ChainOperator::product(&Space::full(nc, n + 1).unwrap(), &factors).unwrap();
        let block = nc.pow(n as u32);
        let trip = (0..block).flat_map(|r| (0..block).map(move |c| (r, c))).map(|(r, c)| {
            let v = (0..nc).fold(Q::zero(), |acc, a| acc + big.get(a * block + r, a * block + c));
            (r, c, v)
        });
        ChainOperator::from_triplets(cfg.space(), trip).unwrap()
    }

    #[test]
    fn transfer_matrix_matches_explicit_partial_trace() {
        let rat = rational_cfg(2, &[(0, 1), (2, 5), (9, 7)]);
        assert_eq!(transfer_matrix(&rat, &q(3, 1)).unwrap(), transfer_brute(&rat, &q(3, 1)));
        let rat3 = rational_cfg(3, &[(0, 1), (2, 5)]);
        assert_eq!(transfer_matrix(&rat3, &q(-7, 2)).unwrap(), transfer_brute(&rat3, &q(-7, 2)));
        let trig = trig_cfg(3, &[(1, 1), (3, 2), (7, 3)]);
        assert_eq!(transfer_matrix(&trig, &q(5, 2)).unwrap(), transfer_brute(&trig, &q(5, 2)));
        assert_eq!(
            transfer_matrix_with(&trig, &q(5, 2), Execution::Sequential).unwrap(),
            transfer_matrix_with(&trig, &q(5, 2), Execution::Parallel).unwrap()
        );
    }

    #[test]
    fn single_site_chain() {
        let cfg = rational_cfg(2, &[(1, 3)]);
        let g = cfg.twist_at(1).unwrap();
        assert_eq!(qkz_operator(&cfg, 1, &BTreeSet::new()).unwrap(), g);
        assert_eq!(hamiltonian(&cfg, 1).unwrap(), g);
        // T(x) = tr(g) I + η g / (x - x_1)
        let x0 = q(2, 1);
        let expect = ChainOperator::identity(cfg.space())
            .scale(&q(5, 1))
            .add(&g.scale(&(q(1, 2) * (x0.clone() - q(1, 3)).inv().unwrap())))
            .unwrap();
        assert_eq!(transfer_matrix(&cfg, &x0).unwrap(), expect);
        let exp = pole_expansion(&cfg, &[q(4, 1), q(-1, 1)], 0.0).unwrap();
        assert_eq!(exp.residues[0], g);
        let m = weight_operator(&cfg, 1).unwrap().scale(&q(2, 1)).add(&weight_operator(&cfg, 2).unwrap().scale(&q(3, 1))).unwrap();
        assert_eq!(g, m);
        assert!(sum_rule(&cfg, 0.0).unwrap().passed());
    }

    #[test]
    fn transfer_matrices_commute() {
        let cfg = rational_cfg(2, &[(0, 1), (2, 5), (9, 7)]);
        let r = check_transfer_commutativity(&cfg, &[(q(3, 1), q(-7, 2))], 0.0).unwrap();
        assert!(r.passed(), "{r:?}");
        let trig = trig_cfg(2, &[(1, 1), (3, 2), (7, 3)]);
        assert!(check_transfer_commutativity(&trig, &[(q(5, 2), q(1, 3))], 0.0).unwrap().passed());
    }

    #[test]
    fn transfer_leading_term_is_trace_of_twist() {
        let cfg = rational_cfg(2, &[(0, 1), (2, 5), (9, 7)]);
        // x (T(x) - tr g) → η Σ H_j, so T(x) - tr g = O(1/x): check at two large points
        let tr = ChainOperator::identity(cfg.space()).scale(&q(5, 1));
        let hs = hamiltonians(&cfg).unwrap();
        let hsum = hs.iter().skip(1).fold(hs[0].clone(), |a, h| a.add(h).unwrap()).scale(&q(1, 2));
        let mut prev = None;
        for big in [1_000_000i64, 1_000_000_000] {
            let x = Q::from_int(big);
            let dev = transfer_matrix(&cfg, &x).unwrap().sub(&tr).unwrap().scale(&x).sub(&hsum).unwrap();
            let c = dev.compare(&ChainOperator::zero(cfg.space()), 1.0).unwrap().residual;
            if let Some(p) = prev {
                assert!(c < p, "subleading term must shrink");
            }
            prev = Some(c);
        }
    }

    #[test]
    fn pole_expansion_rational_and_trig() {
        let cfg = rational_cfg(2, &[(0, 1), (3, 4)]);
        assert!(pole_expansion(&cfg, &[q(5, 1), q(-2, 3), q(7, 9)], 0.0).is_ok());
        let trig = trig_cfg(2, &[(1, 1), (3, 2)]);
        let exp = pole_expansion(&trig, &[q(5, 2), q(1, 3), q(7, 5), q(9, 4)], 0.0).unwrap();
        assert_eq!(exp.residues.len(), 2);
        // residues of a different twist cannot reconstruct T
        let mut other = trig.clone();
        other.twist[0] = q(7, 1);
        let wrong = hamiltonians(&other).unwrap();
        let x0 = q(7, 5);
        let mut rebuilt = exp.constant.clone();
        for (k, h) in wrong.iter().enumerate() {
            rebuilt = rebuilt.add(&h.scale(&pole_weight(&trig, &x0, k + 1).unwrap())).unwrap();
        }
        assert!(!transfer_matrix(&trig, &x0).unwrap().compare(&rebuilt, 0.0).unwrap().agree);
    }

    #[test]
    fn sum_rules_hold() {
        for cfg in [rational_cfg(2, &[(0, 1), (2, 5), (9, 7)]), rational_cfg(3, &[(0, 1), (2, 5), (9, 7)])] {
            assert!(sum_rule(&cfg, 0.0).unwrap().passed());
        }
        let trig = trig_cfg(2, &[(1, 1), (3, 2), (7, 3)]);
        assert!(sum_rule(&trig, 0.0).unwrap().passed());
        // single-state sector (n, 0): g_1 (t^n - t^-n)/(t - t^-1)
        let w = WeightSector::new(vec![3, 0]).unwrap();
        let hs = hamiltonians(&trig).unwrap();
        let total = hs.iter().skip(1).fold(hs[0].clone(), |a, h| a.add(h).unwrap()).restrict(&w).unwrap();
        let t = q(2, 1);
        let expect = q(2, 1) * (t.powi(3).unwrap() - t.powi(-3).unwrap()) * (t.clone() - t.inv().unwrap()).inv().unwrap();
        assert!(total.compare_scalar(&expect, 0.0).unwrap().agree);
    }

    #[test]
    fn weight_operator_examples() {
        let cfg = rational_cfg(2, &[(0, 1), (2, 5), (9, 7)]);
        let m1 = weight_operator(&cfg, 1).unwrap();
        let m2 = weight_operator(&cfg, 2).unwrap();
        let total = m1.add(&m2).unwrap();
        assert_eq!(total, ChainOperator::identity(cfg.space()).scale(&q(3, 1)));
        let s = BasisState::new(vec![1, 1, 2], 2).unwrap();
        let k = cfg.space().position(&s).unwrap();
        assert_eq!(m1.get(k, k), q(2, 1));
        assert!(matches!(weight_operator(&cfg, 3), Err(Error::BadColor { .. })));
    }

    #[test]
    fn hamiltonians_commute_and_match_k_zero() {
        let cfg = rational_cfg(2, &[(0, 1), (2, 5), (9, 7)]);
        assert!(check_integrals(&cfg, 0.0).unwrap().passed());
        let trig = trig_cfg(2, &[(1, 1), (3, 2), (7, 3)]);
        assert!(check_integrals(&trig, 0.0).unwrap().passed());
    }

    #[test]
    fn operators_respect_weight_sectors() {
        let cfg = rational_cfg(2, &[(0, 1), (2, 5), (9, 7)]);
        let trig = trig_cfg(2, &[(1, 1), (3, 2), (7, 3)]);
        for c in [&cfg, &trig] {
            for w in all_sectors(2, 3) {
                for i in 1..=3 {
                    qkz_operator(c, i, &BTreeSet::new()).unwrap().restrict(&w).unwrap();
                    qkz_operator(c, i, &BTreeSet::from([1, 3])).unwrap().restrict(&w).unwrap();
                    hamiltonian(c, i).unwrap().restrict(&w).unwrap();
                }
                transfer_matrix(c, &q(11, 3)).unwrap().restrict(&w).unwrap();
            }
        }
    }

    #[test]
    fn qkz_compatibility_examples() {
        let cfg = rational_cfg(2, &[(0, 1), (2, 5)]);
        assert!(qkz_compatibility(&cfg, 1, 2, 0.0).unwrap().passed());
        let zero = cfg.at_zero_step();
        assert!(qkz_compatibility(&zero, 2, 1, 0.0).unwrap().passed());
        let trig = ModelConfig::trigonometric(q(2, 1), q(5, 4), vec![q(1, 1), q(3, 2), q(7, 3)], vec![q(2, 1), q(3, 1)]).unwrap();
        for (i, j) in [(1, 2), (1, 3), (2, 3)] {
            assert!(qkz_compatibility(&trig, i, j, 0.0).unwrap().passed());
        }
    }

    #[test]
    fn generic_position_violations() {
        let g = vec![q(2, 1), q(3, 1)];
        let err = ModelConfig::rational(q(1, 2), q(1, 3), vec![q(0, 1), q(1, 2)], g.clone()).unwrap_err();
        assert_eq!(err, Error::GenericPosition("x_2 - x_1 = eta".into()));
        let err = ModelConfig::rational(q(1, 2), q(1, 3), vec![q(1, 1), q(1, 2)], g.clone()).unwrap_err();
        assert_eq!(err, Error::GenericPosition("x_2 - x_1 = -eta".into()));
        let err = ModelConfig::rational(q(1, 2), q(1, 3), vec![q(1, 1), q(5, 1), q(1, 1)], g.clone()).unwrap_err();
        assert_eq!(err, Error::GenericPosition("x_3 = x_1".into()));
        let err = ModelConfig::trigonometric(q(2, 1), q(1, 1), vec![q(1, 1), q(2, 1)], g.clone()).unwrap_err();
        assert_eq!(err, Error::GenericPosition("u_2^2 = u_1^2 t^2".into()));
        let err = ModelConfig::trigonometric(q(2, 1), q(1, 1), vec![q(2, 1), q(1, 1)], g.clone()).unwrap_err();
        assert_eq!(err, Error::GenericPosition("u_2^2 t^2 = u_1^2".into()));
        let err = ModelConfig::trigonometric(q(2, 1), q(1, 1), vec![q(2, 1), q(-2, 1)], g.clone()).unwrap_err();
        assert_eq!(err, Error::GenericPosition("u_2^2 = u_1^2".into()));
        assert!(ModelConfig::trigonometric(q(1, 1), q(1, 1), vec![q(2, 1)], g.clone()).is_err());
        assert!(ModelConfig::rational(q(1, 2), q(1, 3), vec![q(0, 1)], vec![q(0, 1), q(1, 1)]).is_err());
    }

    #[test]
    fn trig_targets_and_energy() {
        let trig = trig_cfg(2, &[(1, 1), (3, 2)]);
        let w = WeightSector::new(vec![2, 0]).unwrap();
        assert_eq!(trig.target_multiset(&w).unwrap(), vec![q(1, 1), q(4, 1)]);
        let sum = trig.target_multiset(&w).unwrap().into_iter().fold(Q::zero(), |a, b| a + b);
        assert_eq!(sum, trig.sector_energy(&w).unwrap());
        let rat = rational_cfg(2, &[(0, 1), (2, 5), (9, 7)]);
        let w = WeightSector::new(vec![2, 1]).unwrap();
        assert_eq!(rat.sector_energy(&w).unwrap(), q(7, 1));
    }
}
