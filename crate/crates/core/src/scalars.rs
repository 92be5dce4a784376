//! Scalar domains.
//!
//! Every operator in the workbench is generic over [`Scalar`]. Two domains are
//! provided: [`ExactRational`] (arbitrary precision, exact equality) and
//! [`ComplexDouble`] (double precision, tolerance-based equality). The
//! trigonometric model is kept inside the rational domain by working with the
//! exponentials `u = e^x`, `t = e^eta`, `h = e^(eta hbar)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default relative tolerance for the floating domain.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Field operations shared by both domains.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// True when equality is exact and residuals of passing checks are zero.
    const EXACT: bool;
    const DOMAIN: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    fn from_exact(v: &ExactRational) -> Result<Self>;

    fn is_zero(&self) -> bool;
    fn inv(&self) -> Result<Self>;
    fn magnitude(&self) -> f64;
    fn to_complex(&self) -> Result<ComplexDouble>;

    /// Equality in the domain; `tol` is ignored by exact domains.
    fn close_to(&self, other: &Self, tol: f64) -> bool;

    fn try_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.clone() * rhs.inv()?)
    }

    fn powi(&self, exp: i32) -> Result<Self> {
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * sq.clone();
            }
            e >>= 1;
            if e > 0 {
                sq = sq.clone() * sq;
            }
        }
        Ok(acc)
    }

    /// `self += a * b`
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self = self.clone() + a.clone() * b.clone();
    }

    fn parse_param(s: &str) -> Result<Self> {
        Self::from_exact(&s.parse::<ExactRational>()?)
    }
}

/// Reduced fraction with positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        Self::normalize(BigInt::from(num), BigInt::from(den))
    }

    pub fn normalize(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self(BigRational::new(num, den)))
    }

    pub fn from_int(v: i64) -> Self {
        Self(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn to_float(&self) -> Result<ComplexDouble> {
        match self.0.to_f64() {
            Some(v) if v.is_finite() => Ok(ComplexDouble::new(v, 0.0)),
            _ => Err(Error::Overflow(self.to_string())),
        }
    }
}

impl From<BigRational> for ExactRational {
    fn from(v: BigRational) -> Self {
        Self(v)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for ExactRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::ScalarParse(s.to_string());
        let (num, den) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        Self::normalize(num, den)
    }
}

macro_rules! forward_binop {
    ($ty:ident, $trait:ident, $method:ident) => {
        impl $trait for $ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                $ty(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a $ty> for &'a $ty {
            type Output = $ty;
            fn $method(self, rhs: &'a $ty) -> $ty {
                $ty((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(ExactRational, Add, add);
forward_binop!(ExactRational, Sub, sub);
forward_binop!(ExactRational, Mul, mul);

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl Scalar for ExactRational {
    const EXACT: bool = true;
    const DOMAIN: &'static str = "exact";

    fn zero() -> Self {
        Self(BigRational::zero())
    }
    fn one() -> Self {
        Self(BigRational::one())
    }
    fn from_int(v: i64) -> Self {
        ExactRational::from_int(v)
    }
    fn from_exact(v: &ExactRational) -> Result<Self> {
        Ok(v.clone())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn inv(&self) -> Result<Self> {
        if self.0.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(Self(self.0.recip()))
        }
    }
    fn magnitude(&self) -> f64 {
        self.0.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn to_complex(&self) -> Result<ComplexDouble> {
        self.to_float()
    }
    fn close_to(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        self.0 += &a.0 * &b.0;
    }
}

/// Complex double with finite components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexDouble(pub Complex64);

impl ComplexDouble {
    pub const fn new(re: f64, im: f64) -> Self {
        Self(Complex64::new(re, im))
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }

    pub fn abs(&self) -> f64 {
        self.0.norm()
    }

    pub fn is_finite(&self) -> bool {
        self.0.re.is_finite() && self.0.im.is_finite()
    }
}

impl From<Complex64> for ComplexDouble {
    fn from(v: Complex64) -> Self {
        Self(v)
    }
}

impl fmt::Display for ComplexDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.im == 0.0 {
            write!(f, "{:e}", self.0.re)
        } else {
            write!(f, "{:e}{:+e}i", self.0.re, self.0.im)
        }
    }
}

forward_binop!(ComplexDouble, Add, add);
forward_binop!(ComplexDouble, Sub, sub);
forward_binop!(ComplexDouble, Mul, mul);

impl Neg for ComplexDouble {
    type Output = ComplexDouble;
    fn neg(self) -> ComplexDouble {
        ComplexDouble(-self.0)
    }
}

impl Scalar for ComplexDouble {
    const EXACT: bool = false;
    const DOMAIN: &'static str = "float";

    fn zero() -> Self {
        Self::new(0.0, 0.0)
    }
    fn one() -> Self {
        Self::new(1.0, 0.0)
    }
    fn from_int(v: i64) -> Self {
        Self::new(v as f64, 0.0)
    }
    fn from_exact(v: &ExactRational) -> Result<Self> {
        v.to_float()
    }
    fn is_zero(&self) -> bool {
        self.0.re == 0.0 && self.0.im == 0.0
    }
    fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let r = Self(self.0.inv());
        if r.is_finite() {
            Ok(r)
        } else {
            Err(Error::Overflow(format!("1/({self})")))
        }
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn to_complex(&self) -> Result<ComplexDouble> {
        Ok(*self)
    }
    fn close_to(&self, other: &Self, tol: f64) -> bool {
        let scale = 1f64.max(self.abs()).max(other.abs());
        (*self - *other).abs() <= tol * scale
    }
}

/// `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn approx_eq(a: ComplexDouble, b: ComplexDouble, tol: f64) -> Result<bool> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::NonPositiveTolerance(tol));
    }
    Ok(a.close_to(&b, tol))
}

/// Relative deviation used as the residual of a single entry comparison.
pub fn relative_deviation<S: Scalar>(a: &S, b: &S) -> f64 {
    let delta = a.clone() - b.clone();
    if delta.is_zero() {
        return 0.0;
    }
    let diff = delta.magnitude();
    let scale = 1f64.max(a.magnitude()).max(b.magnitude());
    // an exact mismatch never reports as zero, however small
    (diff / scale).max(f64::MIN_POSITIVE)
}
