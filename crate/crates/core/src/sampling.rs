//! Seeded random draws: per-check generators and generic parameter sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain_model::ModelConfig;
use crate::error::Result;
use crate::rmatrix::RFlavor;
use crate::scalars::{ExactRational, Scalar};

/// Generator derived from a run seed and a label, so that every check draws
/// the same numbers no matter which other checks run or in what order.
pub fn rng_for(seed: u64, label: &str) -> ChaCha8Rng {
    // FNV-1a over the label, mixed into the seed
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h.rotate_left(17))
}

/// `p/q` with `|p| ≤ max_num`, `1 ≤ q ≤ max_den`.
pub fn random_rational(rng: &mut impl Rng, max_num: i64, max_den: i64) -> ExactRational {
    let p = rng.random_range(-max_num..=max_num);
    let q = rng.random_range(1..=max_den);
    ExactRational::new(p, q).expect("positive denominator")
}

pub fn random_nonzero(rng: &mut impl Rng, max_num: i64, max_den: i64) -> ExactRational {
    loop {
        let r = random_rational(rng, max_num, max_den);
        if !r.is_zero() {
            return r;
        }
    }
}

/// Positive rational in `[1/max_den, max_num/1]`.
pub fn random_positive(rng: &mut impl Rng, max_num: i64, max_den: i64) -> ExactRational {
    let p = rng.random_range(1..=max_num);
    let q = rng.random_range(1..=max_den);
    ExactRational::new(p, q).expect("positive denominator")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlavorKind {
    Rational,
    Trigonometric,
}

/// Shifted arguments `x_i - x_j + ηħ` (or `u_i h / u_j`) must stay away from the
/// `R`-matrix pole, since the qKZ operators evaluate them.
fn shifted_arguments_regular(cfg: &ModelConfig<ExactRational>) -> bool {
    let n = cfg.n_sites;
    for i in 1..=n {
        for j in (1..=n).filter(|&j| j != i) {
            let Ok(arg) = cfg.argument(i, j) else { return false };
            let shifted = cfg.shifted(&arg);
            if cfg.flavor.local_r(cfg.n_colors, &shifted).is_err() {
                return false;
            }
        }
    }
    true
}

/// Random parameters in generic position, redrawn until valid.
pub fn random_config(rng: &mut impl Rng, kind: FlavorKind, n_colors: usize, n_sites: usize) -> Result<ModelConfig<ExactRational>> {
    loop {
        let twist: Vec<ExactRational> = (0..n_colors).map(|_| random_nonzero(rng, 9, 4)).collect();
        let candidate = match kind {
            FlavorKind::Rational => {
                let eta = random_nonzero(rng, 5, 4);
                let hbar = random_nonzero(rng, 5, 4);
                let x = (0..n_sites).map(|_| random_rational(rng, 12, 5)).collect();
                ModelConfig::rational(eta, hbar, x, twist)
            }
            FlavorKind::Trigonometric => {
                let t = random_positive(rng, 7, 3);
                let h = random_positive(rng, 7, 3);
                let u = (0..n_sites).map(|_| random_positive(rng, 9, 4)).collect();
                ModelConfig::trigonometric(t, h, u, twist)
            }
        };
        if let Ok(cfg) = candidate {
            if shifted_arguments_regular(&cfg) {
                return Ok(cfg);
            }
        }
    }
}

/// Random spectral argument of the given flavor, avoiding both the `R` and
/// `R̃` poles.
pub fn random_argument(rng: &mut impl Rng, flavor: &RFlavor<ExactRational>, n_colors: usize) -> ExactRational {
    loop {
        let arg = match flavor {
            RFlavor::Rational { .. } => random_nonzero(rng, 12, 5),
            RFlavor::Trigonometric { .. } => random_positive(rng, 9, 4),
        };
        if flavor.local_r(n_colors, &arg).is_ok() && flavor.local_r_tilde(n_colors, &arg).is_ok() {
            return arg;
        }
    }
}
