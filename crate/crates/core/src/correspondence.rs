//! Joint spectra of `H_i` on weight sectors and the classical Lax matrices
//! they define.
//!
//! Velocities are `ẋ_i = η λ_i` (rational) and `ẋ_i = sinh η · λ_i`
//! (trigonometric); with this normalization `det(z - L)` coincides with the
//! determinant identity evaluated on the eigenstate, so the Lax spectrum is the
//! twist multiset, respectively the multiplicative strings.

use itertools::Itertools;
use nalgebra::{linalg::Schur, DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::chain_model::ModelConfig;
use crate::error::{Error, Result};
use crate::report::{CheckResult, Comparison};
use crate::rmatrix::RFlavor;
use crate::sampling::rng_for;
use crate::scalars::ComplexDouble;
use crate::tensor_space::{ChainOperator, WeightSector};
use crate::verification::sector_hamiltonians;

type C = Complex64;

const SCHUR_MAX_ITER: usize = 10_000;
const REDRAWS: usize = 3;
/// Relative radius within which computed Lax eigenvalues are treated as one
/// (possibly defective) multiple eigenvalue and replaced by their mean.
pub const CLUSTER_RADIUS: f64 = 1e-3;

fn serialize_complex_list<S: Serializer>(v: &[C], ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.collect_seq(v.iter().map(|z| [z.re, z.im]))
}

#[derive(Clone, Debug, Serialize)]
pub struct JointEigenstate {
    pub sector: WeightSector,
    #[serde(serialize_with = "serialize_complex_list")]
    pub vector: Vec<C>,
    #[serde(serialize_with = "serialize_complex_list")]
    pub h_eigenvalues: Vec<C>,
    pub residuals: Vec<f64>,
}

fn to_dense(op: &ChainOperator<ComplexDouble>) -> DMatrix<C> {
    let d = op.dim();
    let mut m = DMatrix::zeros(d, d);
    for (r, row) in op.rows().iter().enumerate() {
        for (c, v) in row {
            m[(r, *c)] = v.0;
        }
    }
    m
}

/// Right eigenvectors of `A = Q T Q*` from the Schur form, by
/// back-substitution on the triangular factor.
fn schur_eigenvectors(a: &DMatrix<C>) -> Result<Vec<DVector<C>>> {
    let n = a.nrows();
    let schur = Schur::try_new(a.clone(), f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::NonConvergence(format!("Schur decomposition of a {n}x{n} matrix")))?;
    let (q, t) = schur.unpack();
    let small = f64::EPSILON * t.norm().max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut y = DVector::<C>::zeros(n);
        y[k] = C::new(1.0, 0.0);
        for j in (0..k).rev() {
            let s: C = (j + 1..=k).map(|l| t[(j, l)] * y[l]).sum();
            let mut den = t[(j, j)] - t[(k, k)];
            if den.norm() < small {
                den = C::new(small, 0.0);
            }
            y[j] = -s / den;
        }
        let v = &q * y;
        out.push(v.normalize());
    }
    Ok(out)
}

fn matrix_eigenvalues(a: &DMatrix<C>) -> Result<Vec<C>> {
    let n = a.nrows();
    let schur = Schur::try_new(a.clone(), f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::NonConvergence(format!("Schur decomposition of a {n}x{n} matrix")))?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|k| t[(k, k)]).collect())
}

/// Joint eigenbasis of `H_1, …, H_n` on a sector, from one generic real
/// combination `Σ c_i H_i`; redrawn up to three times when a residual is too
/// large.
pub fn diagonalize_sector(cfg: &ModelConfig<ComplexDouble>, sector: &WeightSector, tol: f64, seed: u64) -> Result<Vec<JointEigenstate>> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::NonPositiveTolerance(tol));
    }
    let hs: Vec<DMatrix<C>> = sector_hamiltonians(cfg, sector)?.iter().map(to_dense).collect();
    let dim = sector.dimension();
    if dim == 1 {
        return Ok(vec![JointEigenstate {
            sector: sector.clone(),
            vector: vec![C::new(1.0, 0.0)],
            h_eigenvalues: hs.iter().map(|h| h[(0, 0)]).collect(),
            residuals: vec![0.0; hs.len()],
        }]);
    }
    let mut rng = rng_for(seed, &format!("diagonalize {sector}"));
    let mut worst = f64::INFINITY;
    for _ in 0..=REDRAWS {
        let mut combo = DMatrix::<C>::zeros(dim, dim);
        for h in &hs {
            let c: f64 = rng.random_range(0.5..1.5);
            combo += h * C::new(c, 0.0);
        }
        let mut states = Vec::with_capacity(dim);
        let mut attempt_worst: f64 = 0.0;
        for v in schur_eigenvectors(&combo)? {
            let mut lambdas = Vec::with_capacity(hs.len());
            let mut residuals = Vec::with_capacity(hs.len());
            for h in &hs {
                let hv = h * &v;
                let lambda = v.dotc(&hv);
                let res = (hv - &v * lambda).norm();
                attempt_worst = attempt_worst.max(res / h.norm().max(1.0));
                lambdas.push(lambda);
                residuals.push(res);
            }
            states.push(JointEigenstate {
                sector: sector.clone(),
                vector: v.iter().copied().collect(),
                h_eigenvalues: lambdas,
                residuals,
            });
        }
        if attempt_worst <= tol {
            return Ok(states);
        }
        worst = worst.min(attempt_worst);
    }
    Err(Error::DegeneracyUnresolved { sector: sector.to_string(), residual: worst })
}

/// `η` (rational) or `ln t` (trigonometric, principal branch).
pub fn log_step(cfg: &ModelConfig<ComplexDouble>) -> C {
    match &cfg.flavor {
        RFlavor::Rational { eta } => eta.0,
        RFlavor::Trigonometric { t } => t.0.ln(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Momenta {
    /// Eigenvalues `e^{η p_i}` of `K_i^{(0)}`.
    #[serde(serialize_with = "serialize_complex_list")]
    pub k_eigenvalues: Vec<C>,
    /// Principal-branch `p_i = log(e^{η p_i}) / η`.
    #[serde(serialize_with = "serialize_complex_list")]
    pub momenta: Vec<C>,
    #[serde(serialize_with = "serialize_complex_list")]
    pub velocities: Vec<C>,
}

/// `K_i^{(0)}` eigenvalues, momenta and velocities of one eigenstate.
pub fn momenta_from_eigenvalues(cfg: &ModelConfig<ComplexDouble>, st: &JointEigenstate) -> Result<Momenta> {
    let eta = log_step(cfg);
    let scale = cfg.deformation_scale().0;
    let mut out = Momenta { k_eigenvalues: Vec::new(), momenta: Vec::new(), velocities: Vec::new() };
    for (k, lambda) in st.h_eigenvalues.iter().enumerate() {
        let kappa = lambda / cfg.ratio_product(k + 1)?.0;
        if kappa.norm() == 0.0 {
            return Err(Error::ZeroEigenvalue { site: k + 1 });
        }
        out.k_eigenvalues.push(kappa);
        out.momenta.push(kappa.ln() / eta);
        out.velocities.push(lambda * scale);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct LaxMatrix {
    pub entries: DMatrix<C>,
    pub flavor: &'static str,
}

/// `sinh(x_i - x_j + η)` from exponentials (`w = u_i/u_j`), or
/// `x_i - x_j + η` in the rational case.
fn lax_denominator(cfg: &ModelConfig<ComplexDouble>, i: usize, j: usize) -> Result<C> {
    match &cfg.flavor {
        RFlavor::Rational { eta } => Ok(cfg.coords[i - 1].0 - cfg.coords[j - 1].0 + eta.0),
        RFlavor::Trigonometric { t } => {
            let e = cfg.coords[i - 1].0 / cfg.coords[j - 1].0 * t.0;
            Ok((e - e.inv()) / 2.0)
        }
    }
}

/// `L_ij = ẋ_j / (x_i - x_j + η)` or `ẋ_j / sinh(x_i - x_j + η)`.
pub fn build_lax(cfg: &ModelConfig<ComplexDouble>, velocities: &[C]) -> Result<LaxMatrix> {
    let n = cfg.n_sites;
    if velocities.len() != n {
        return Err(Error::DimensionMismatch(format!("{} velocities for {n} particles", velocities.len())));
    }
    let mut m = DMatrix::zeros(n, n);
    for i in 1..=n {
        for j in 1..=n {
            let den = lax_denominator(cfg, i, j)?;
            if den.norm() == 0.0 {
                return Err(Error::PoleHit(format!("Lax entry ({i}, {j})")));
            }
            m[(i - 1, j - 1)] = velocities[j - 1] / den;
        }
    }
    Ok(LaxMatrix { entries: m, flavor: cfg.flavor.name() })
}

/// `H_d`, `d = 1..n`, from `det(z - L) = Σ_d (-1)^d z^{n-d} H_d`, computed with
/// the Faddeev-LeVerrier recursion (no eigenvalues involved).
pub fn classical_hamiltonians(l: &LaxMatrix) -> Vec<C> {
    let a = &l.entries;
    let n = a.nrows();
    let id = DMatrix::<C>::identity(n, n);
    // char poly c_n z^n + … + c_0 with c_n = 1
    let mut coeffs = vec![C::new(0.0, 0.0); n + 1];
    coeffs[n] = C::new(1.0, 0.0);
    let mut m = DMatrix::<C>::zeros(n, n);
    for k in 1..=n {
        m = a * &m + &id * coeffs[n - k + 1];
        coeffs[n - k] = -(a * &m).trace() / (k as f64);
    }
    (1..=n).map(|d| if d % 2 == 0 { coeffs[n - d] } else { -coeffs[n - d] }).collect()
}

/// `e_d` of a complex multiset, `d = 1..len`.
pub fn elementary_values(values: &[C]) -> Vec<C> {
    let n = values.len();
    let mut e = vec![C::new(0.0, 0.0); n + 1];
    e[0] = C::new(1.0, 0.0);
    for v in values {
        for k in (1..=n).rev() {
            e[k] = e[k] + e[k - 1] * v;
        }
    }
    e.split_off(1)
}

fn sort_lex(values: &mut [C]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Replaces every cluster of values closer than `radius · max(1, |v|)` by its
/// mean; a defective eigenvalue of multiplicity `k` splits by about
/// `ε^{1/k}`, while the cluster mean stays accurate to `ε`.
pub fn average_clusters(values: &[C], radius: f64) -> Vec<C> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for (i, j) in (0..n).tuple_combinations() {
        let scale = values[i].norm().max(values[j].norm()).max(1.0);
        if (values[i] - values[j]).norm() <= radius * scale {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            parent[ri] = rj;
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    let mut out: Vec<C> = (0..n)
        .map(|i| {
            let members: Vec<C> = (0..n).filter(|&j| roots[j] == roots[i]).map(|j| values[j]).collect();
            members.iter().sum::<C>() / members.len() as f64
        })
        .collect();
    sort_lex(&mut out);
    out
}

fn rel_dev(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// Smallest achievable maximum relative deviation over all pairings of the
/// two multisets (exhaustive for up to 8 values, greedy nearest beyond).
pub fn matching_distance(computed: &[C], target: &[C]) -> f64 {
    if computed.len() != target.len() {
        return f64::INFINITY;
    }
    let n = target.len();
    if n <= 8 {
        return (0..n)
            .permutations(n)
            .map(|p| p.iter().enumerate().map(|(i, &j)| rel_dev(computed[j], target[i])).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min);
    }
    let mut left: Vec<C> = computed.to_vec();
    let mut worst: f64 = 0.0;
    for t in target {
        let (k, d) = left
            .iter()
            .enumerate()
            .map(|(k, c)| (k, rel_dev(*c, *t)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("same length");
        worst = worst.max(d);
        left.swap_remove(k);
    }
    worst
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenstateReport {
    #[serde(serialize_with = "serialize_complex_list")]
    pub h_eigenvalues: Vec<C>,
    pub residuals: Vec<f64>,
    pub momenta: Momenta,
    /// Sorted, with clusters averaged.
    #[serde(serialize_with = "serialize_complex_list")]
    pub lax_spectrum: Vec<C>,
    #[serde(serialize_with = "serialize_complex_list")]
    pub classical_hamiltonians: Vec<C>,
    pub matching_distance: f64,
    pub hamiltonian_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrespondenceReport {
    pub sector: WeightSector,
    #[serde(serialize_with = "serialize_complex_list")]
    pub target: Vec<C>,
    #[serde(serialize_with = "serialize_complex_list")]
    pub target_hamiltonians: Vec<C>,
    pub states: Vec<EigenstateReport>,
    pub tol: f64,
}

impl CorrespondenceReport {
    /// Largest deviation over all eigenstates and the index of the state.
    pub fn worst(&self) -> (usize, f64) {
        self.states
            .iter()
            .map(|s| s.matching_distance.max(s.hamiltonian_deviation))
            .enumerate()
            .fold((0, 0.0), |acc, (k, d)| if d > acc.1 || d.is_nan() { (k, d) } else { acc })
    }

    pub fn passed(&self) -> bool {
        let (_, d) = self.worst();
        d <= self.tol
    }

    /// `Ok(self)` when every eigenstate matches, `MatchFailure` otherwise.
    pub fn require(self) -> Result<Self> {
        let (state, deviation) = self.worst();
        if deviation <= self.tol {
            Ok(self)
        } else {
            Err(Error::MatchFailure { sector: self.sector.to_string(), state, deviation })
        }
    }

    pub fn to_check_result(&self) -> CheckResult {
        let (state, deviation) = self.worst();
        let cmp = if deviation <= self.tol {
            Comparison { agree: true, residual: deviation, witness: None }
        } else {
            let err = Error::MatchFailure { sector: self.sector.to_string(), state, deviation };
            Comparison::failure(deviation, err.to_string())
        };
        CheckResult::from_comparison("correspondence", Some(&self.sector), cmp)
    }
}

/// Diagonalizes the sector, builds the Lax matrix of every joint eigenstate
/// and compares its spectrum and characteristic coefficients with the
/// target multiset.
pub fn check_correspondence(cfg: &ModelConfig<ComplexDouble>, sector: &WeightSector, tol: f64, seed: u64) -> Result<CorrespondenceReport> {
    correspondence_against(cfg, sector, &cfg.twist, tol, seed)
}

/// As [`check_correspondence`] with targets built from `reference_twist`.
pub fn correspondence_against(
    cfg: &ModelConfig<ComplexDouble>,
    sector: &WeightSector,
    reference_twist: &[ComplexDouble],
    tol: f64,
    seed: u64,
) -> Result<CorrespondenceReport> {
    let mut target: Vec<C> = cfg.with_twist(reference_twist)?.target_multiset(sector)?.iter().map(|z| z.0).collect();
    sort_lex(&mut target);
    let target_hamiltonians = elementary_values(&target);
    let mut states = Vec::new();
    for st in diagonalize_sector(cfg, sector, tol, seed)? {
        let momenta = momenta_from_eigenvalues(cfg, &st)?;
        let lax = build_lax(cfg, &momenta.velocities)?;
        let lax_spectrum = average_clusters(&matrix_eigenvalues(&lax.entries)?, CLUSTER_RADIUS);
        let classical = classical_hamiltonians(&lax);
        let hamiltonian_deviation = classical
            .iter()
            .zip(&target_hamiltonians)
            .map(|(a, b)| rel_dev(*a, *b))
            .fold(0.0, f64::max);
        states.push(EigenstateReport {
            matching_distance: matching_distance(&lax_spectrum, &target),
            h_eigenvalues: st.h_eigenvalues,
            residuals: st.residuals,
            momenta,
            lax_spectrum,
            classical_hamiltonians: classical,
            hamiltonian_deviation,
        });
    }
    Ok(CorrespondenceReport { sector: sector.clone(), target, target_hamiltonians, states, tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::ExactRational;
    use crate::tensor_space::all_sectors;

    fn q(n: i64, d: i64) -> ExactRational {
        ExactRational::new(n, d).unwrap()
    }

    fn qs(v: &[(i64, i64)]) -> Vec<ExactRational> {
        v.iter().map(|&(n, d)| q(n, d)).collect()
    }

    fn rational3() -> ModelConfig<ComplexDouble> {
        ModelConfig::rational(q(1, 2), q(1, 3), qs(&[(0, 1), (2, 5), (9, 7)]), qs(&[(2, 1), (3, 1)]))
            .unwrap()
            .to_float()
            .unwrap()
    }

    fn trig(u: &[(i64, i64)]) -> ModelConfig<ComplexDouble> {
        ModelConfig::trigonometric(q(2, 1), q(3, 2), qs(u), qs(&[(2, 1), (3, 1)])).unwrap().to_float().unwrap()
    }

    fn sector(c: &[usize]) -> WeightSector {
        WeightSector::new(c.to_vec()).unwrap()
    }

    fn c(re: f64) -> C {
        C::new(re, 0.0)
    }

    #[test]
    fn single_site() {
        let cfg = ModelConfig::rational(q(1, 2), q(1, 3), qs(&[(1, 4)]), qs(&[(2, 1), (3, 1)])).unwrap().to_float().unwrap();
        let st = diagonalize_sector(&cfg, &sector(&[0, 1]), 1e-10, 0).unwrap();
        assert_eq!(st.len(), 1);
        assert!((st[0].h_eigenvalues[0] - c(3.0)).norm() < 1e-14);
        let m = momenta_from_eigenvalues(&cfg, &st[0]).unwrap();
        assert!((m.momenta[0] - c(3f64.ln() / 0.5)).norm() < 1e-12);
        let lax = build_lax(&cfg, &m.velocities).unwrap();
        assert!((lax.entries[(0, 0)] - c(3.0)).norm() < 1e-14);
        assert!((classical_hamiltonians(&lax)[0] - c(3.0)).norm() < 1e-14);
        assert!(check_correspondence(&cfg, &sector(&[0, 1]), 1e-8, 0).unwrap().passed());
    }

    #[test]
    fn one_dimensional_sector_obeys_sum_rule() {
        let cfg = ModelConfig::rational(q(1, 2), q(1, 3), qs(&[(0, 1), (2, 5)]), qs(&[(2, 1), (3, 1)])).unwrap().to_float().unwrap();
        let st = diagonalize_sector(&cfg, &sector(&[2, 0]), 1e-10, 0).unwrap();
        assert_eq!(st.len(), 1);
        let sum: C = st[0].h_eigenvalues.iter().sum();
        assert!((sum - c(4.0)).norm() < 1e-12);
    }

    #[test]
    fn eigenvalue_sums_follow_sum_rule() {
        let cfg = rational3();
        let st = diagonalize_sector(&cfg, &sector(&[2, 1]), 1e-10, 3).unwrap();
        assert_eq!(st.len(), 3);
        for s in &st {
            let sum: C = s.h_eigenvalues.iter().sum();
            assert!((sum - c(7.0)).norm() < 1e-10, "{sum}");
            assert!((s.vector.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn momenta_consistency() {
        let cfg = rational3();
        for s in diagonalize_sector(&cfg, &sector(&[2, 1]), 1e-10, 1).unwrap() {
            let m = momenta_from_eigenvalues(&cfg, &s).unwrap();
            for i in 0..3 {
                let back = (m.momenta[i] * 0.5).exp() * cfg.ratio_product(i + 1).unwrap().0 * 0.5;
                assert!((back - m.velocities[i]).norm() < 1e-10);
            }
            // trace of L equals the first classical Hamiltonian
            let lax = build_lax(&cfg, &m.velocities).unwrap();
            let h = classical_hamiltonians(&lax);
            assert!((h[0] - lax.entries.trace()).norm() < 1e-12);
            assert!((h[2] - lax.entries.determinant()).norm() < 1e-9);
        }
    }

    #[test]
    fn faddeev_leverrier_matches_eigenvalues() {
        let m = DMatrix::from_row_slice(3, 3, &[c(2.0), c(1.0), c(0.0), c(0.5), c(-1.0), c(4.0), c(3.0), c(0.0), c(1.5)]);
        let lax = LaxMatrix { entries: m.clone(), flavor: "rational" };
        let from_eigs = elementary_values(&matrix_eigenvalues(&m).unwrap());
        for (a, b) in classical_hamiltonians(&lax).iter().zip(&from_eigs) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn cluster_averaging_and_matching() {
        let v = [c(2.0 + 1e-7), c(3.0), c(2.0 - 1e-7)];
        let avg = average_clusters(&v, CLUSTER_RADIUS);
        assert!((avg[0] - c(2.0)).norm() < 1e-15 && (avg[1] - c(2.0)).norm() < 1e-15);
        assert!(matching_distance(&[c(3.0), c(2.0)], &[c(2.0), c(3.0)]) == 0.0);
        assert!(matching_distance(&[c(3.0), c(2.5)], &[c(2.0), c(3.0)]) > 0.1);
        assert_eq!(matching_distance(&[c(1.0)], &[c(1.0), c(2.0)]), f64::INFINITY);
    }

    #[test]
    fn relabeling_particles_permutes_lax_spectrum() {
        let cfg = rational3();
        let vel = [C::new(0.7, 0.1), c(-0.3), c(1.9)];
        let spec = average_clusters(&matrix_eigenvalues(&build_lax(&cfg, &vel).unwrap().entries).unwrap(), 0.0);
        let mut swapped = cfg.clone();
        swapped.coords.swap(0, 2);
        let vel2 = [vel[2], vel[1], vel[0]];
        let spec2 = average_clusters(&matrix_eigenvalues(&build_lax(&swapped, &vel2).unwrap().entries).unwrap(), 0.0);
        assert!(matching_distance(&spec, &spec2) < 1e-12);
    }

    #[test]
    fn rational_correspondence_all_sectors() {
        let cfg = rational3();
        for w in all_sectors(2, 3) {
            let rep = check_correspondence(&cfg, &w, 1e-8, 11).unwrap();
            assert_eq!(rep.states.len(), w.dimension());
            assert!(rep.passed(), "{w}: {:?}", rep.worst());
        }
    }

    #[test]
    fn trig_strings() {
        let cfg = trig(&[(1, 1), (3, 2)]);
        let rep = check_correspondence(&cfg, &sector(&[2, 0]), 1e-8, 0).unwrap();
        assert!((rep.target[0] - c(1.0)).norm() < 1e-15 && (rep.target[1] - c(4.0)).norm() < 1e-15);
        assert!(rep.passed(), "{:?}", rep.worst());
        let cfg = trig(&[(1, 1), (3, 2), (7, 3)]);
        for w in all_sectors(2, 3) {
            let rep = check_correspondence(&cfg, &w, 1e-8, 5).unwrap();
            assert!(rep.passed(), "{w}: {:?}", rep.worst());
            // string centers multiply to g_a^{M_a}
            let prod: C = rep.target.iter().product();
            let expect = 2f64.powi(w.count(1) as i32) * 3f64.powi(w.count(2) as i32);
            assert!((prod - c(expect)).norm() < 1e-12);
        }
    }

    #[test]
    fn wrong_targets_fail() {
        let cfg = rational3();
        let bumped = [ComplexDouble::new(3.0, 0.0), ComplexDouble::new(3.0, 0.0)];
        let rep = correspondence_against(&cfg, &sector(&[2, 1]), &bumped, 1e-8, 0).unwrap();
        assert!(!rep.passed());
        assert!(matches!(rep.clone().require(), Err(Error::MatchFailure { .. })));
        assert!(!rep.to_check_result().passed());
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let cfg = rational3();
        let a = serde_json::to_string(&check_correspondence(&cfg, &sector(&[2, 1]), 1e-8, 9).unwrap()).unwrap();
        let b = serde_json::to_string(&check_correspondence(&cfg, &sector(&[2, 1]), 1e-8, 9).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
