//! Arithmetic backends: floating point for production, exact rationals for
//! oracle tests. Predicates take a relative tolerance which the rational
//! backend treats as exact zero.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar field the geometric kernel is generic over.
///
/// All comparisons against tolerances go through [`Scalar::below_tol`], which
/// an exact backend implements as an exact zero test.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True for backends where `==` is a meaningful exact comparison.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Conversion from a float; exact backends represent the float exactly.
    fn from_f64_lossy(x: f64) -> Self;
    /// Lossy conversion for diagnostics and reporting.
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Square root, when representable in the backend.
    fn sqrt(&self) -> Option<Self>;

    /// `|value| <= tol * scale`, with the rational backend reading this as
    /// `value == 0`. `scale` is expected to be nonnegative.
    fn below_tol(value: &Self, scale: &Self, tol: f64) -> bool;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_f64_lossy(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn sqrt(&self) -> Option<Self> {
        if *self >= 0.0 {
            Some(f64::sqrt(*self))
        } else {
            None
        }
    }
    fn below_tol(value: &Self, scale: &Self, tol: f64) -> bool {
        f64::abs(*value) <= tol * f64::abs(*scale)
    }
}

/// Exact rational scalar (arbitrary precision).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Rat(pub BigRational);

impl Rat {
    pub fn new(num: i64, den: i64) -> Self {
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Exact rational from an `f64` (every finite float is rational).
    pub fn from_f64_exact(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Rat)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

macro_rules! rat_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                Rat(self.0.$m(rhs.0))
            }
        }
    };
}
rat_binop!(Add, add);
rat_binop!(Sub, sub);
rat_binop!(Mul, mul);
rat_binop!(Div, div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

fn bigint_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

impl Scalar for Rat {
    const EXACT: bool = true;

    fn zero() -> Self {
        Rat(BigRational::zero())
    }
    fn one() -> Self {
        Rat(BigRational::one())
    }
    fn from_i64(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rat::new(num, den)
    }
    fn from_f64_lossy(x: f64) -> Self {
        Rat::from_f64_exact(x).unwrap_or_else(|| Rat(BigRational::zero()))
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
    fn abs(&self) -> Self {
        Rat(self.0.abs())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn sqrt(&self) -> Option<Self> {
        // Exact only for perfect squares of numerator and denominator.
        let num = bigint_sqrt_exact(self.0.numer())?;
        let den = bigint_sqrt_exact(self.0.denom())?;
        Some(Rat(BigRational::new(num, den)))
    }
    fn below_tol(value: &Self, _scale: &Self, _tol: f64) -> bool {
        value.0.is_zero()
    }
}

/// Arithmetic backend selector used by the CLI and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Float,
    Rational,
}

impl Backend {
    /// Reads `LATTICE_LIE_BACKEND` (`float` | `rational`), defaulting to float.
    pub fn from_env() -> Self {
        match std::env::var("LATTICE_LIE_BACKEND").as_deref() {
            Ok("rational") => Backend::Rational,
            _ => Backend::Float,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Float => "float",
            Backend::Rational => "rational",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rat_sqrt_exact_only() {
        assert_eq!(Rat::new(9, 4).sqrt(), Some(Rat::new(3, 2)));
        assert_eq!(Rat::new(2, 1).sqrt(), None);
        assert_eq!(Rat::new(-1, 1).sqrt(), None);
    }

    #[test]
    fn tolerance_semantics() {
        assert!(f64::below_tol(&1e-12, &1.0, 1e-9));
        assert!(!f64::below_tol(&1e-6, &1.0, 1e-9));
        assert!(Rat::below_tol(&Rat::zero(), &Rat::one(), 1e-9));
        assert!(!Rat::below_tol(&Rat::new(1, 1_000_000_000_000), &Rat::one(), 1e-9));
    }
}
