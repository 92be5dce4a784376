//! Covector lemmas, the projection identities for `K_i`, the determinant and
//! symmetric-function identities, and the Macdonald eigenvalues built on them.

use std::collections::BTreeSet;

use itertools::Itertools;

use crate::chain_model::{hamiltonians, qkz_operator, qkz_operator_at_zero, weight_function, ModelConfig};
use crate::error::{Error, Result};
use crate::report::{CheckResult, Comparison};
use crate::rmatrix::RFlavor;
use crate::scalars::{relative_deviation, Scalar};
use crate::tensor_space::{omega_q, permutation, ChainOperator, Covector, Space, WeightSector};

/// `⟨Ω_q|` with `q = t`, or `⟨Ω|` in the rational case.
pub fn projection_covector<S: Scalar>(cfg: &ModelConfig<S>) -> Result<Covector<S>> {
    omega_q(&cfg.space(), &cfg.flavor.q())
}

pub fn compare_scalars<S: Scalar>(lhs: &S, rhs: &S, tol: f64, context: impl std::fmt::Display) -> Comparison {
    let residual = relative_deviation(lhs, rhs);
    if lhs.close_to(rhs, tol) {
        Comparison { agree: true, residual, witness: None }
    } else {
        Comparison::failure(residual, format!("{context}: {lhs} vs {rhs}"))
    }
}

/// Spectral arguments used by the covector checks: every `x_i - x_j` and its
/// `ηħ`-shifted version.
pub fn spectral_samples<S: Scalar>(cfg: &ModelConfig<S>) -> Result<Vec<S>> {
    let mut out: Vec<S> = Vec::new();
    for (i, j) in (1..=cfg.n_sites).tuple_combinations() {
        for arg in [cfg.argument(i, j)?, cfg.argument(j, i)?] {
            for v in [cfg.shifted(&arg), arg] {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
    }
    Ok(out)
}

/// Compares `⟨Ω_q| R_ij(arg)` with `⟨Ω_q| P_ij`.
pub fn omega_relation<S: Scalar>(cfg: &ModelConfig<S>, i: usize, j: usize, arg: &S, tol: f64) -> Result<Comparison> {
    let om = projection_covector(cfg)?;
    let lhs = om.apply_left(&cfg.flavor.r(cfg.n_colors, i, j, arg, cfg.n_sites)?)?;
    let rhs = om.apply_left(&permutation(cfg.n_colors, i, j, cfg.n_sites)?)?;
    Ok(lhs.compare(&rhs, tol)?.with_context(format!("R_{i}{j}({arg})")))
}

/// Rational: `⟨Ω| R_ij(x) = ⟨Ω|` for every ordered pair.
/// Trigonometric: `⟨Ω_q| R_{i,i-1}(x) = ⟨Ω_q| P_{i,i-1}` for `i = 2..n`.
pub fn check_omega_invariance<S: Scalar>(cfg: &ModelConfig<S>, tol: f64) -> Result<CheckResult> {
    let samples = spectral_samples(cfg)?;
    let n = cfg.n_sites;
    let pairs: Vec<(usize, usize)> = match cfg.flavor {
        RFlavor::Rational { .. } => (1..=n).cartesian_product(1..=n).filter(|(i, j)| i != j).collect(),
        RFlavor::Trigonometric { .. } => (2..=n).map(|i| (i, i - 1)).collect(),
    };
    let mut cmp = Comparison::default();
    if matches!(cfg.flavor, RFlavor::Rational { .. }) {
        let om = projection_covector(cfg)?;
        for &(i, j) in &pairs {
            let pij = permutation(cfg.n_colors, i, j, n)?;
            cmp.merge(om.apply_left(&pij)?.compare(&om, tol)?.with_context(format!("P_{i}{j}")));
        }
    }
    for &(i, j) in &pairs {
        for arg in &samples {
            cmp.merge(omega_relation(cfg, i, j, arg, tol)?);
        }
    }
    Ok(CheckResult::from_comparison("omega", None, cmp))
}

/// `⟨Ω_q| K_i^{(ħ)} = ⟨Ω_q| K_i^{(0)}`, together with the intermediate
/// `⟨Ω_q| R⁺_{i,i-1} … R⁺_{i1} = ⟨Ω_q| P_{i,i-1} … P_{i1}`.
pub fn check_k_projection<S: Scalar>(cfg: &ModelConfig<S>, i: usize, tol: f64) -> Result<CheckResult> {
    cfg.check_site(i)?;
    let om = projection_covector(cfg)?;
    let space = cfg.space();
    let lhs = om.apply_left(&qkz_operator(cfg, i, &BTreeSet::new())?)?;
    let rhs = om.apply_left(&qkz_operator_at_zero(cfg, i)?)?;
    let mut cmp = lhs.compare(&rhs, tol)?.with_context(format!("K_{i}"));
    if i > 1 {
        let mut r_chain = Vec::with_capacity(i - 1);
        let mut p_chain = Vec::with_capacity(i - 1);
        for j in (1..i).rev() {
            let arg = cfg.shifted(&cfg.argument(i, j)?);
            r_chain.push(cfg.flavor.r(cfg.n_colors, i, j, &arg, cfg.n_sites)?);
            p_chain.push(permutation(cfg.n_colors, i, j, cfg.n_sites)?);
        }
        let lhs = om.apply_left(&ChainOperator::product(&space, &r_chain)?)?;
        let rhs = om.apply_left(&ChainOperator::product(&space, &p_chain)?)?;
        cmp.merge(lhs.compare(&rhs, tol)?.with_context(format!("shifted chain of site {i}")));
    }
    Ok(CheckResult::from_comparison("k-projection", None, cmp))
}

fn validate_subset(cfg: &ModelConfig<impl Scalar>, subset: &[usize]) -> Result<()> {
    if subset.is_empty() || subset.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!("site subset {subset:?} must be nonempty and increasing")));
    }
    subset.iter().try_for_each(|&s| cfg.check_site(s))
}

/// `⟨Ω_q| K_{i_d}(x_{i_1..i_{d-1}} + ηħ) … K_{i_2}(x_{i_1} + ηħ) K_{i_1}
/// = ⟨Ω_q| K_{i_1}^{(0)} … K_{i_d}^{(0)}`, plus independence of the right side
/// from the order of the `K^{(0)}` factors.
pub fn check_proposition_higher<S: Scalar>(cfg: &ModelConfig<S>, subset: &[usize], tol: f64) -> Result<CheckResult> {
    validate_subset(cfg, subset)?;
    let om = projection_covector(cfg)?;
    // the covector meets the leftmost factor K_{i_d} first
    let mut lhs = om.clone();
    for k in (0..subset.len()).rev() {
        let shifted: BTreeSet<usize> = subset[..k].iter().copied().collect();
        lhs = lhs.apply_left(&qkz_operator(cfg, subset[k], &shifted)?)?;
    }
    let k0: Vec<ChainOperator<S>> = subset.iter().map(|&i| qkz_operator_at_zero(cfg, i)).collect::<Result<_>>()?;
    let project = |order: &[usize]| -> Result<Covector<S>> { order.iter().try_fold(om.clone(), |acc, &k| acc.apply_left(&k0[k])) };
    let natural: Vec<usize> = (0..subset.len()).collect();
    let rhs = project(&natural)?;
    let mut cmp = lhs.compare(&rhs, tol)?.with_context(format!("I = {subset:?}"));
    for order in natural.iter().copied().permutations(subset.len()).skip(1) {
        let sites: Vec<usize> = order.iter().map(|&k| subset[k]).collect();
        cmp.merge(project(&order)?.compare(&rhs, tol)?.with_context(format!("K^(0) order {sites:?}")));
    }
    Ok(CheckResult::from_comparison("proposition-higher", None, cmp))
}

/// `H_1, …, H_n` restricted to a sector.
pub fn sector_hamiltonians<S: Scalar>(cfg: &ModelConfig<S>, sector: &WeightSector) -> Result<Vec<ChainOperator<S>>> {
    sector.check(cfg.n_colors, cfg.n_sites)?;
    hamiltonians(cfg)?.iter().map(|h| h.restrict(sector)).collect()
}

/// `[H_i, H_j] = 0` for all pairs.
pub fn commutation(hs: &[ChainOperator<impl Scalar>], tol: f64) -> Result<Comparison> {
    let mut cmp = Comparison::default();
    for ((i, a), (j, b)) in hs.iter().enumerate().tuple_combinations() {
        let zero = ChainOperator::zero(a.space().clone());
        cmp.merge(a.commutator(b)?.compare(&zero, tol)?.with_context(format!("[H_{}, H_{}]", i + 1, j + 1)));
    }
    Ok(cmp)
}

fn permutation_sign(p: &[usize]) -> bool {
    let inversions = p.iter().tuple_combinations().filter(|(a, b)| a > b).count();
    inversions % 2 == 0
}

/// Signed permutation sum with each term multiplied in row order; meaningful
/// when the entries commute.
pub fn operator_determinant<S: Scalar>(space: &Space, entries: &[Vec<ChainOperator<S>>]) -> Result<ChainOperator<S>> {
    let n = entries.len();
    let mut det = ChainOperator::zero(space.clone());
    for p in (0..n).permutations(n) {
        if p.iter().enumerate().any(|(r, &c)| entries[r][c].is_zero()) {
            continue;
        }
        let term = ChainOperator::product(space, p.iter().enumerate().map(|(r, &c)| &entries[r][c]))?;
        det = if permutation_sign(&p) { det.add(&term)? } else { det.sub(&term)? };
    }
    Ok(det)
}

/// `e_d` of a list of values.
pub fn elementary_symmetric<S: Scalar>(values: &[S], d: usize) -> S {
    let mut e = vec![S::zero(); d + 1];
    e[0] = S::one();
    for v in values {
        for k in (1..=d).rev() {
            e[k] = e[k].clone() + e[k - 1].clone() * v.clone();
        }
    }
    e[d].clone()
}

/// Coefficients (ascending powers of `z`) of `Π (z - τ)`.
pub fn monic_from_roots<S: Scalar>(roots: &[S]) -> Vec<S> {
    let n = roots.len();
    (0..=n)
        .map(|m| {
            let e = elementary_symmetric(roots, n - m);
            if (n - m).is_multiple_of(2) { e } else { -e }
        })
        .collect()
}

/// Interpolates operator values `values[k] = P(zs[k])`; returns the
/// coefficients of `P` in ascending powers.
pub fn interpolate<S: Scalar>(space: &Space, zs: &[S], values: &[ChainOperator<S>]) -> Result<Vec<ChainOperator<S>>> {
    let m = zs.len();
    let mut coeffs = vec![ChainOperator::zero(space.clone()); m];
    for (k, value) in values.iter().enumerate() {
        // Lagrange basis polynomial ℓ_k
        let mut basis = vec![S::one()];
        let mut denom = S::one();
        for (l, zl) in zs.iter().enumerate().filter(|&(l, _)| l != k) {
            let mut next = vec![S::zero(); basis.len() + 1];
            for (p, b) in basis.iter().enumerate() {
                next[p + 1] = next[p + 1].clone() + b.clone();
                next[p] = next[p].clone() - b.clone() * zl.clone();
            }
            basis = next;
            denom = denom * (zs[k].clone() - zs[l].clone());
        }
        let scale = denom.inv().map_err(|_| Error::Config("interpolation nodes must be distinct".into()))?;
        for (p, b) in basis.iter().enumerate() {
            if !b.is_zero() {
                coeffs[p] = coeffs[p].add(&value.scale(&(b.clone() * scale.clone())))?;
            }
        }
    }
    Ok(coeffs)
}

/// `det(z δ_ij - kernel(i, j) H_i) = Π_a (z - g_a)^{M_a}` (string roots in the
/// trigonometric case) on one sector, at every `z` sample, plus agreement of
/// the interpolated `z`-coefficients with signed `e_d` of the roots.
pub fn check_det_identity<S: Scalar>(cfg: &ModelConfig<S>, sector: &WeightSector, zs: &[S], tol: f64) -> Result<CheckResult> {
    det_identity_against(cfg, sector, zs, &cfg.twist, tol)
}

/// As [`check_det_identity`] with the right side built from `reference_twist`.
pub fn det_identity_against<S: Scalar>(
    cfg: &ModelConfig<S>,
    sector: &WeightSector,
    zs: &[S],
    reference_twist: &[S],
    tol: f64,
) -> Result<CheckResult> {
    let n = cfg.n_sites;
    if zs.len() < n + 1 {
        return Err(Error::Config(format!("det identity needs at least {} z samples, got {}", n + 1, zs.len())));
    }
    if zs.iter().tuple_combinations().any(|(a, b)| a == b) {
        return Err(Error::Config("z samples must be distinct".into()));
    }
    let roots = cfg.with_twist(reference_twist)?.target_multiset(sector)?;
    let hs = sector_hamiltonians(cfg, sector)?;
    let space = hs[0].space().clone();
    let mut cmp = commutation(&hs, tol)?;
    if !cmp.agree {
        return Ok(CheckResult::from_comparison("det-identity", Some(sector), cmp));
    }
    let mut off = Vec::with_capacity(n);
    for i in 1..=n {
        let row = (1..=n).map(|j| Ok(hs[i - 1].scale(&-cfg.kernel(i, j)?))).collect::<Result<Vec<_>>>()?;
        off.push(row);
    }
    let id = ChainOperator::identity(space.clone());
    let target = monic_from_roots(&roots);
    let mut dets = Vec::with_capacity(zs.len());
    for z in zs {
        let mut entries = off.clone();
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = row[i].add(&id.scale(z))?;
        }
        let det = operator_determinant(&space, &entries)?;
        let rhs = roots.iter().fold(S::one(), |acc, r| acc * (z.clone() - r.clone()));
        cmp.merge(det.compare_scalar(&rhs, tol)?.with_context(format!("z = {z}")));
        dets.push(det);
    }
    let coeffs = interpolate(&space, &zs[..=n], &dets[..=n])?;
    for (m, (c, expect)) in coeffs.iter().zip(&target).enumerate() {
        cmp.merge(c.compare_scalar(expect, tol)?.with_context(format!("coefficient of z^{m}")));
    }
    Ok(CheckResult::from_comparison("det-identity", Some(sector), cmp))
}

/// `Σ_{|I| = d} H_{i_1} … H_{i_d} Π_{α<β} (1 - pair(i_α, i_β))^{-1}`.
pub fn symmetric_lhs<S: Scalar>(cfg: &ModelConfig<S>, hs: &[ChainOperator<S>], d: usize) -> Result<ChainOperator<S>> {
    let space = hs[0].space().clone();
    let mut acc = ChainOperator::zero(space.clone());
    for subset in (1..=cfg.n_sites).combinations(d) {
        let mut weight = S::one();
        for (a, b) in subset.iter().tuple_combinations() {
            weight = weight * (S::one() - cfg.pair_factor(*a, *b)?);
        }
        let weight = weight.inv().map_err(|_| Error::PoleHit(format!("pair factor equal to 1 in {subset:?}")))?;
        let prod = ChainOperator::product(&space, subset.iter().map(|&i| &hs[i - 1]))?;
        acc = acc.add(&prod.scale(&weight))?;
    }
    Ok(acc)
}

/// Diagonal `P_k = Σ_a Σ_{roots ρ of color a} ρ^k`, i.e. `Σ_a M_a g_a^k` in
/// the rational case.
pub fn power_sum_operator<S: Scalar>(cfg: &ModelConfig<S>, k: usize) -> Result<ChainOperator<S>> {
    weight_function(cfg, |a, m| {
        let string = cfg.color_string(a, m)?;
        string.iter().try_fold(S::zero(), |acc, r| Ok(acc + r.powi(k as i32)?))
    })
}

/// Newton's identities `m e_m = Σ_{k=1}^m (-1)^{k-1} e_{m-k} P_k` on commuting
/// operators; returns `e_0, …, e_d`.
pub fn elementary_from_power_sums<S: Scalar>(space: &Space, power_sums: &[ChainOperator<S>], d: usize) -> Result<Vec<ChainOperator<S>>> {
    let mut e = vec![ChainOperator::identity(space.clone())];
    for m in 1..=d {
        let mut acc = ChainOperator::zero(space.clone());
        for k in 1..=m {
            let term = e[m - k].compose(&power_sums[k - 1])?;
            acc = if k % 2 == 1 { acc.add(&term)? } else { acc.sub(&term)? };
        }
        e.push(acc.scale(&S::from_int(m as i64).inv()?));
    }
    Ok(e)
}

/// Closed forms of `e_1, e_2, e_3` in the power sums.
pub fn explicit_elementary<S: Scalar>(p: &[S], d: usize) -> Option<S> {
    let half = || S::from_int(2).inv().expect("2 is invertible");
    match d {
        1 => Some(p[0].clone()),
        2 => Some(half() * (p[0].clone() * p[0].clone() - p[1].clone())),
        3 => {
            let sixth = S::from_int(6).inv().ok()?;
            let third = S::from_int(3).inv().ok()?;
            Some(
                sixth * p[0].clone() * p[0].clone() * p[0].clone() - half() * p[1].clone() * p[0].clone()
                    + third * p[2].clone(),
            )
        }
        _ => None,
    }
}

fn check_degree(cfg: &ModelConfig<impl Scalar>, d: usize) -> Result<()> {
    if d == 0 || d > cfg.n_sites {
        return Err(Error::Config(format!("degree d = {d} outside 1..={}", cfg.n_sites)));
    }
    Ok(())
}

/// Left side of the symmetric identity equals `e_d({P_k})` on the sector as
/// a full matrix; the right side is cross-checked against the closed forms
/// for `d ≤ 3` and against `e_d` of the root multiset.
pub fn check_symmetric_identity<S: Scalar>(cfg: &ModelConfig<S>, sector: &WeightSector, d: usize, tol: f64) -> Result<CheckResult> {
    symmetric_identity_against(cfg, sector, d, &cfg.twist, tol)
}

pub fn symmetric_identity_against<S: Scalar>(
    cfg: &ModelConfig<S>,
    sector: &WeightSector,
    d: usize,
    reference_twist: &[S],
    tol: f64,
) -> Result<CheckResult> {
    check_degree(cfg, d)?;
    let reference = cfg.with_twist(reference_twist)?;
    let hs = sector_hamiltonians(cfg, sector)?;
    let space = hs[0].space().clone();
    let mut cmp = commutation(&hs, tol)?;
    if !cmp.agree {
        return Ok(CheckResult::from_comparison("symmetric-identity", Some(sector), cmp));
    }
    let lhs = symmetric_lhs(cfg, &hs, d)?;
    let power_sums = (1..=d)
        .map(|k| power_sum_operator(&reference, k)?.restrict(sector))
        .collect::<Result<Vec<_>>>()?;
    let rhs = elementary_from_power_sums(&space, &power_sums, d)?.pop().expect("d >= 1");
    cmp.merge(lhs.compare(&rhs, tol)?.with_context(format!("e_{d}")));

    let roots = reference.target_multiset(sector)?;
    let brute = elementary_symmetric(&roots, d);
    cmp.merge(rhs.compare_scalar(&brute, tol)?.with_context(format!("e_{d} of roots")));
    let p_scalars: Vec<S> = (1..=d.min(3))
        .map(|k| roots.iter().try_fold(S::zero(), |acc, r| Ok(acc + r.powi(k as i32)?)))
        .collect::<Result<_>>()?;
    if let Some(closed) = explicit_elementary(&p_scalars, d) {
        cmp.merge(compare_scalars(&closed, &brute, tol, format!("closed form of e_{d}")));
    }
    Ok(CheckResult::from_comparison("symmetric-identity", Some(sector), cmp))
}

/// Coefficient of `Π_{i∈I} e^{ηħ∂_i}` in `Ĥ_d`, written as the product over
/// `s ∈ I`, `r ∉ I`.
pub fn macdonald_coefficient<S: Scalar>(cfg: &ModelConfig<S>, subset: &[usize]) -> Result<S> {
    let mut acc = S::one();
    for &s in subset {
        for r in (1..=cfg.n_sites).filter(|r| !subset.contains(r)) {
            acc = acc * cfg.ratio(s, r)?;
        }
    }
    Ok(acc)
}

/// The same coefficient in the factorized form: full products per site times
/// the inverse pair factors.
pub fn macdonald_coefficient_factorized<S: Scalar>(cfg: &ModelConfig<S>, subset: &[usize]) -> Result<S> {
    let mut acc = S::one();
    for &s in subset {
        acc = acc * cfg.ratio_product(s)?;
    }
    for (a, b) in subset.iter().tuple_combinations() {
        acc = acc.try_div(&(S::one() - cfg.pair_factor(*a, *b)?))?;
    }
    Ok(acc)
}

/// `E_d = e_d(roots)` is the sector-scalar value of the symmetric left side;
/// for `d = 1` also equals the closed energy, and in the rational case `E_d`
/// agrees with Newton's identities on `Σ_a M_a g_a^k`.
pub fn check_macdonald_eigenvalue<S: Scalar>(cfg: &ModelConfig<S>, sector: &WeightSector, d: usize, tol: f64) -> Result<CheckResult> {
    check_degree(cfg, d)?;
    let roots = cfg.target_multiset(sector)?;
    let e_d = elementary_symmetric(&roots, d);
    let mut cmp = Comparison::default();
    if d == 1 {
        cmp.merge(compare_scalars(&e_d, &cfg.sector_energy(sector)?, tol, "root sum vs energy"));
    }
    if let RFlavor::Rational { .. } = cfg.flavor {
        let p: Vec<S> = (1..=d)
            .map(|k| {
                (1..=cfg.n_colors).try_fold(S::zero(), |acc, a| {
                    Ok(acc + S::from_int(sector.count(a) as i64) * cfg.twist[a - 1].powi(k as i32)?)
                })
            })
            .collect::<Result<_>>()?;
        let mut e = vec![S::one()];
        for m in 1..=d {
            let mut acc = S::zero();
            for k in 1..=m {
                let term = e[m - k].clone() * p[k - 1].clone();
                acc = if k % 2 == 1 { acc + term } else { acc - term };
            }
            e.push(acc.try_div(&S::from_int(m as i64))?);
        }
        cmp.merge(compare_scalars(&e[d], &e_d, tol, "E_d from power sums"));
    }
    for subset in (1..=cfg.n_sites).combinations(d) {
        let a = macdonald_coefficient(cfg, &subset)?;
        let b = macdonald_coefficient_factorized(cfg, &subset)?;
        cmp.merge(compare_scalars(&a, &b, tol, format!("coefficient forms for I = {subset:?}")));
    }
    let hs = sector_hamiltonians(cfg, sector)?;
    let lhs = symmetric_lhs(cfg, &hs, d)?;
    cmp.merge(lhs.compare_scalar(&e_d, tol)?.with_context(format!("E_{d}")));
    Ok(CheckResult::from_comparison("macdonald-eigenvalue", Some(sector), cmp))
}
