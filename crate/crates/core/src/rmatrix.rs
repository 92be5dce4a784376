//! Rational and trigonometric R-matrices on two tensor factors.
//!
//! Rational spectral arguments are additive (`x = x_i - x_j`); trigonometric
//! ones are multiplicative exponentials (`u = e^{x_i - x_j}`, `t = e^eta`),
//! which keeps every matrix entry a rational function of the parameters.

use crate::error::{Error, Result};
use crate::report::{CheckResult, Comparison};
use crate::scalars::Scalar;
use crate::tensor_space::{embed, local_diagonal, local_permutation, local_q_permutation, ChainOperator, Space};

#[derive(Clone, Debug, PartialEq)]
pub enum RFlavor<S> {
    Rational { eta: S },
    Trigonometric { t: S },
}

impl<S: Scalar> RFlavor<S> {
    pub fn name(&self) -> &'static str {
        match self {
            RFlavor::Rational { .. } => "rational",
            RFlavor::Trigonometric { .. } => "trigonometric",
        }
    }

    pub fn is_trigonometric(&self) -> bool {
        matches!(self, RFlavor::Trigonometric { .. })
    }

    /// Spectral argument of `R(a - b)`: `a - b`, or `a / b` for exponentials.
    pub fn difference(&self, a: &S, b: &S) -> Result<S> {
        match self {
            RFlavor::Rational { .. } => Ok(a.clone() - b.clone()),
            RFlavor::Trigonometric { .. } => a.try_div(b).map_err(|_| Error::PoleHit("zero exponential coordinate".into())),
        }
    }

    /// Spectral argument of `R(-x)`.
    pub fn reverse(&self, arg: &S) -> Result<S> {
        match self {
            RFlavor::Rational { .. } => Ok(-arg.clone()),
            RFlavor::Trigonometric { .. } => arg.inv().map_err(|_| Error::PoleHit("u = 0".into())),
        }
    }

    /// Scalar turning `R` into `R̃`: `(x+eta)/x`, or `sinh(x+eta)/sinh(x)`.
    pub fn tilde_factor(&self, arg: &S) -> Result<S> {
        match self {
            RFlavor::Rational { eta } => (arg.clone() + eta.clone())
                .try_div(arg)
                .map_err(|_| Error::PoleHit(format!("R~ at x = 0 (x = {arg})"))),
            RFlavor::Trigonometric { t } => {
                let u2 = arg.clone() * arg.clone();
                let num = u2.clone() * t.clone() * t.clone() - S::one();
                let den = t.clone() * (u2 - S::one());
                num.try_div(&den).map_err(|_| Error::PoleHit(format!("R~ at u^2 = 1 (u = {arg})")))
            }
        }
    }

    /// Deformation parameter of the q-permutation (`1` in the rational case).
    pub fn q(&self) -> S {
        match self {
            RFlavor::Rational { .. } => S::one(),
            RFlavor::Trigonometric { t } => t.clone(),
        }
    }

    pub fn local_r(&self, n_colors: usize, arg: &S) -> Result<ChainOperator<S>> {
        match self {
            RFlavor::Rational { eta } => local_r_rational(n_colors, arg, eta),
            RFlavor::Trigonometric { t } => local_r_trig(n_colors, arg, t),
        }
    }

    pub fn local_r_tilde(&self, n_colors: usize, arg: &S) -> Result<ChainOperator<S>> {
        match self {
            RFlavor::Rational { eta } => local_r_rational_tilde(n_colors, arg, eta),
            RFlavor::Trigonometric { t } => local_r_trig_tilde(n_colors, arg, t),
        }
    }

    /// `R_ij(arg)` on `V^{⊗n}`.
    pub fn r(&self, n_colors: usize, i: usize, j: usize, arg: &S, n_sites: usize) -> Result<ChainOperator<S>> {
        embed(&self.local_r(n_colors, arg)?, &[i, j], n_sites)
    }

    pub fn r_tilde(&self, n_colors: usize, i: usize, j: usize, arg: &S, n_sites: usize) -> Result<ChainOperator<S>> {
        embed(&self.local_r_tilde(n_colors, arg)?, &[i, j], n_sites)
    }
}

fn identity2<S: Scalar>(n_colors: usize) -> Result<ChainOperator<S>> {
    Ok(ChainOperator::identity(Space::full(n_colors, 2)?))
}

/// `(x I + eta P) / (x + eta)`.
pub fn local_r_rational<S: Scalar>(n_colors: usize, x: &S, eta: &S) -> Result<ChainOperator<S>> {
    let norm = (x.clone() + eta.clone())
        .inv()
        .map_err(|_| Error::PoleHit(format!("R at x = -eta (x = {x})")))?;
    identity2(n_colors)?
        .scale(x)
        .add(&local_permutation(n_colors)?.scale(eta))
        .map(|m| m.scale(&norm))
}

/// `I + (eta / x) P`.
pub fn local_r_rational_tilde<S: Scalar>(n_colors: usize, x: &S, eta: &S) -> Result<ChainOperator<S>> {
    let c = eta.try_div(x).map_err(|_| Error::PoleHit("R~ at x = 0".into()))?;
    identity2(n_colors)?.add(&local_permutation(n_colors)?.scale(&c))
}

/// `sinh x / sinh(x + eta) = (u^2 - 1) t / (u^2 t^2 - 1)`.
fn trig_ratio<S: Scalar>(u: &S, t: &S) -> Result<S> {
    if u.is_zero() {
        return Err(Error::PoleHit("u = 0".into()));
    }
    let u2 = u.clone() * u.clone();
    let den = u2.clone() * t.clone() * t.clone() - S::one();
    ((u2 - S::one()) * t.clone())
        .try_div(&den)
        .map_err(|_| Error::PoleHit(format!("R at u^2 t^2 = 1 (u = {u})")))
}

/// Trigonometric R in the permutation form `P + [sinh x / sinh(x+eta)] (I - P^q)`, `q = t`.
pub fn local_r_trig<S: Scalar>(n_colors: usize, u: &S, t: &S) -> Result<ChainOperator<S>> {
    let s = trig_ratio(u, t)?;
    let i_minus_pq = identity2(n_colors)?.sub(&local_q_permutation(n_colors, t)?)?;
    local_permutation(n_colors)?.add(&i_minus_pq.scale(&s))
}

/// Trigonometric R from its explicit entry table:
/// `Σ e_aa⊗e_aa + s Σ_{a≠b} e_aa⊗e_bb + (t²-1)/(u²t²-1) Σ_{a<b} (u² e_ab⊗e_ba + e_ba⊗e_ab)`.
pub fn local_r_trig_table<S: Scalar>(n_colors: usize, u: &S, t: &S) -> Result<ChainOperator<S>> {
    let s = trig_ratio(u, t)?;
    let u2 = u.clone() * u.clone();
    let off = (t.clone() * t.clone() - S::one())
        .try_div(&(u2.clone() * t.clone() * t.clone() - S::one()))
        .map_err(|_| Error::PoleHit(format!("R at u^2 t^2 = 1 (u = {u})")))?;
    let n = n_colors;
    let mut trip = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let diag = a * n + b;
            if a == b {
                trip.push((diag, diag, S::one()));
            } else {
                trip.push((diag, diag, s.clone()));
            }
            if a < b {
                // e_ab ⊗ e_ba : e_b ⊗ e_a ↦ e_a ⊗ e_b
                trip.push((a * n + b, b * n + a, u2.clone() * off.clone()));
                // e_ba ⊗ e_ab : e_a ⊗ e_b ↦ e_b ⊗ e_a
                trip.push((b * n + a, a * n + b, off.clone()));
            }
        }
    }
    ChainOperator::from_triplets(Space::full(n_colors, 2)?, trip)
}

/// `I - P^q + [sinh(x+eta)/sinh x] P`.
pub fn local_r_trig_tilde<S: Scalar>(n_colors: usize, u: &S, t: &S) -> Result<ChainOperator<S>> {
    let c = RFlavor::Trigonometric { t: t.clone() }.tilde_factor(u)?;
    identity2(n_colors)?
        .sub(&local_q_permutation(n_colors, t)?)?
        .add(&local_permutation(n_colors)?.scale(&c))
}

pub fn r_rational<S: Scalar>(n_colors: usize, i: usize, j: usize, x: &S, eta: &S, n_sites: usize) -> Result<ChainOperator<S>> {
    embed(&local_r_rational(n_colors, x, eta)?, &[i, j], n_sites)
}

pub fn r_rational_tilde<S: Scalar>(n_colors: usize, i: usize, j: usize, x: &S, eta: &S, n_sites: usize) -> Result<ChainOperator<S>> {
    embed(&local_r_rational_tilde(n_colors, x, eta)?, &[i, j], n_sites)
}

pub fn r_trig<S: Scalar>(n_colors: usize, i: usize, j: usize, u: &S, t: &S, n_sites: usize) -> Result<ChainOperator<S>> {
    embed(&local_r_trig(n_colors, u, t)?, &[i, j], n_sites)
}

pub fn r_trig_tilde<S: Scalar>(n_colors: usize, i: usize, j: usize, u: &S, t: &S, n_sites: usize) -> Result<ChainOperator<S>> {
    embed(&local_r_trig_tilde(n_colors, u, t)?, &[i, j], n_sites)
}

/// `R_12(x-y) R_13(x) R_23(y) = R_23(y) R_13(x) R_12(x-y)` on `V^{⊗3}`.
/// For the trigonometric flavor `x`, `y` are exponentials.
pub fn check_yang_baxter<S: Scalar>(flavor: &RFlavor<S>, n_colors: usize, x: &S, y: &S, tol: f64) -> Result<CheckResult> {
    let xy = flavor.difference(x, y)?;
    let r12 = flavor.r(n_colors, 1, 2, &xy, 3)?;
    let r13 = flavor.r(n_colors, 1, 3, x, 3)?;
    let r23 = flavor.r(n_colors, 2, 3, y, 3)?;
    let lhs = r12.compose(&r13)?.compose(&r23)?;
    let rhs = r23.compose(&r13)?.compose(&r12)?;
    let cmp = lhs.compare(&rhs, tol)?.with_context(format!("x = {x}, y = {y}"));
    Ok(CheckResult::from_comparison("ybe", None, cmp))
}

/// `R_12(s) R_21(-s) = I` for both `R` and (up to its scalar) the normalization.
pub fn check_unitarity<S: Scalar>(flavor: &RFlavor<S>, n_colors: usize, arg: &S, tol: f64) -> Result<CheckResult> {
    let fwd = flavor.r(n_colors, 1, 2, arg, 2)?;
    let back = flavor.r(n_colors, 2, 1, &flavor.reverse(arg)?, 2)?;
    let prod = fwd.compose(&back)?;
    let cmp = prod.compare_scalar(&S::one(), tol)?.with_context(format!("s = {arg}"));
    Ok(CheckResult::from_comparison("unitarity", None, cmp))
}

/// `[g ⊗ g, R(s)] = 0` and `[g ⊗ g, R̃(s)] = 0` for diagonal `g`.
pub fn check_twist_commutation<S: Scalar>(flavor: &RFlavor<S>, twist: &[S], arg: &S, tol: f64) -> Result<CheckResult> {
    let n_colors = twist.len();
    let g = local_diagonal(twist)?;
    let gg = embed(&g, &[1], 2)?.compose(&embed(&g, &[2], 2)?)?;
    let zero = ChainOperator::zero(gg.space().clone());
    let mut cmp = Comparison::default();
    for (label, r) in [("R", flavor.local_r(n_colors, arg)?), ("R~", flavor.local_r_tilde(n_colors, arg)?)] {
        cmp.merge(gg.commutator(&r)?.compare(&zero, tol)?.with_context(format!("[g x g, {label}({arg})]")));
    }
    Ok(CheckResult::from_comparison("twist-commute", None, cmp))
}
