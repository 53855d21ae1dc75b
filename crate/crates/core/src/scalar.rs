//! Exact scalars: arbitrary-precision rationals and Gaussian rationals.
//!
//! A value is stored in canonical form: rationals are always reduced with a
//! positive denominator (delegated to `BigRational`), and a Gaussian rational
//! with zero imaginary part collapses to the plain rational variant, so
//! structural equality coincides with mathematical equality.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Which exact field a computation runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarDomain {
    Rational,
    GaussianRational,
}

impl fmt::Display for ScalarDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarDomain::Rational => write!(f, "rational"),
            ScalarDomain::GaussianRational => write!(f, "gaussian-rational"),
        }
    }
}

/// An exact rational or Gaussian-rational number.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(BigRational),
    /// Real and imaginary parts; the imaginary part is never zero.
    Gauss(BigRational, BigRational),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rat(BigRational::one())
    }

    pub fn i() -> Self {
        Scalar::Gauss(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Rat(BigRational::from_integer(BigInt::from(n)))
    }

    /// Exact fraction `num/den`. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    fn from_parts(re: BigRational, im: BigRational) -> Self {
        if im.is_zero() {
            Scalar::Rat(re)
        } else {
            Scalar::Gauss(re, im)
        }
    }

    pub fn re(&self) -> &BigRational {
        match self {
            Scalar::Rat(r) => r,
            Scalar::Gauss(r, _) => r,
        }
    }

    pub fn im(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rat(_) => None,
            Scalar::Gauss(_, i) => Some(i),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_one())
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Scalar::Rat(_))
    }

    pub fn conj(&self) -> Self {
        match self {
            Scalar::Rat(r) => Scalar::Rat(r.clone()),
            Scalar::Gauss(r, i) => Scalar::Gauss(r.clone(), -i.clone()),
        }
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self) -> Result<Self> {
        match self {
            Scalar::Rat(r) => {
                if r.is_zero() {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(Scalar::Rat(r.recip()))
                }
            }
            Scalar::Gauss(r, i) => {
                // 1/(a+bi) = (a-bi)/(a^2+b^2); a^2+b^2 > 0 since b != 0.
                let norm = r * r + i * i;
                Ok(Scalar::from_parts(r / &norm, -(i / &norm)))
            }
        }
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    /// Integer power; negative exponents invert, so the base must be nonzero.
    pub fn pow(&self, exp: i64) -> Result<Self> {
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut result = Scalar::one();
        let mut b = base;
        let mut e = exp.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        Ok(result)
    }

    /// Sign of a rational scalar: -1, 0 or 1. None for Gaussian values.
    pub fn sign(&self) -> Option<i32> {
        match self {
            Scalar::Rat(r) => Some(if r.is_zero() {
                0
            } else if r.is_positive() {
                1
            } else {
                -1
            }),
            Scalar::Gauss(..) => None,
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        match self {
            Scalar::Rat(r) => rational_to_f64(r),
            Scalar::Gauss(..) => None,
        }
    }

    fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if r.denom().is_one() {
            write!(f, "{}", r.numer())
        } else {
            write!(f, "{}/{}", r.numer(), r.denom())
        }
    }
}

fn rational_to_f64(r: &BigRational) -> Option<f64> {
    use num_traits::ToPrimitive;
    r.to_f64()
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => Scalar::fmt_rational(r, f),
            Scalar::Gauss(r, i) => {
                Scalar::fmt_rational(r, f)?;
                if i.is_negative() {
                    write!(f, "-")?;
                } else {
                    write!(f, "+")?;
                }
                Scalar::fmt_rational(&i.abs(), f)?;
                write!(f, "*i")
            }
        }
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n = BigInt::from_str(num.trim()).ok()?;
    let d = BigInt::from_str(den.trim()).ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts `p/q` or `p/q+r/s*i` (sign of the imaginary part may be `-`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let err = || Error::ParseScalar(s.to_string());
        if let Some(body) = s.strip_suffix("*i") {
            // Split re and im on the last top-level sign (skipping index 0).
            let bytes = body.as_bytes();
            let mut split = None;
            for k in (1..bytes.len()).rev() {
                if (bytes[k] == b'+' || bytes[k] == b'-')
                    && bytes[k - 1] != b'+'
                    && bytes[k - 1] != b'-'
                    && bytes[k - 1] != b'/'
                {
                    split = Some(k);
                    break;
                }
            }
            let k = split.ok_or_else(err)?;
            let re = parse_rational(&body[..k]).ok_or_else(err)?;
            let sign = if bytes[k] == b'-' { -1 } else { 1 };
            let im = parse_rational(&body[k + 1..]).ok_or_else(err)?
                * BigRational::from_integer(BigInt::from(sign));
            Ok(Scalar::from_parts(re, im))
        } else {
            Ok(Scalar::Rat(parse_rational(s).ok_or_else(err)?))
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, |$a:ident, $b:ident, $c:ident, $d:ident| $re:expr, $im:expr) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                let zero = BigRational::zero();
                let ($a, $b) = match self {
                    Scalar::Rat(r) => (r, &zero),
                    Scalar::Gauss(r, i) => (r, i),
                };
                let ($c, $d) = match rhs {
                    Scalar::Rat(r) => (r, &zero),
                    Scalar::Gauss(r, i) => (r, i),
                };
                Scalar::from_parts($re, $im)
            }
        }
    };
}

scalar_binop!(Add, add, |a, b, c, d| a + c, b + d);
scalar_binop!(Sub, sub, |a, b, c, d| a - c, b - d);
scalar_binop!(Mul, mul, |a, b, c, d| a * c - b * d, a * d + b * c);

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    /// Panics on division by zero; use `checked_div` for a fallible version.
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("scalar division by zero")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r.clone()),
            Scalar::Gauss(r, i) => Scalar::Gauss(-r.clone(), -i.clone()),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}
