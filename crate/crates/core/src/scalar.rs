//! Scalar abstraction shared by the linear algebra, polynomial and q-series code.
//!
//! Exact work uses [`Rational`]; numeric work (quadrature, float views of
//! embeddings, lattice pruning) uses `f64` or `f32`. Everything that only needs
//! field operations is written once against [`Scalar`].

use std::fmt::Debug;
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

use crate::Rational;

/// A field element usable by the generic algorithms in this crate.
pub trait Scalar:
    Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static
{
    fn from_i64(n: i64) -> Self;

    fn from_bigint(n: &BigInt) -> Self;

    fn from_rational(q: &Rational) -> Self;

    /// True when arithmetic introduces no rounding.
    fn is_exact() -> bool;

    /// Pivot preference for elimination: larger is better, `0.0` means unusable.
    fn pivot_weight(&self) -> f64;

    /// Zero test with a tolerance appropriate for the type.
    fn is_negligible(&self) -> bool;

    fn to_f64_lossy(&self) -> f64;
}

macro_rules! float_scalar {
    ($t:ty, $eps:expr) => {
        impl Scalar for $t {
            fn from_i64(n: i64) -> Self {
                n as $t
            }

            fn from_bigint(n: &BigInt) -> Self {
                n.to_f64().unwrap_or(f64::NAN) as $t
            }

            fn from_rational(q: &Rational) -> Self {
                rational_to_f64(q) as $t
            }

            fn is_exact() -> bool {
                false
            }

            fn pivot_weight(&self) -> f64 {
                self.abs() as f64
            }

            fn is_negligible(&self) -> bool {
                self.abs() <= $eps
            }

            fn to_f64_lossy(&self) -> f64 {
                *self as f64
            }
        }
    };
}

float_scalar!(f64, 1e-12);
float_scalar!(f32, 1e-5);

impl Scalar for BigRational {
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn is_exact() -> bool {
        true
    }

    fn pivot_weight(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn to_f64_lossy(&self) -> f64 {
        rational_to_f64(self)
    }
}

/// Nearest-ish `f64` for a big rational (relative error a few ulps).
pub fn rational_to_f64(q: &Rational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let num = q.numer();
    let den = q.denom();
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    // scale so the integer quotient carries ~64 significant bits
    let shift = 64 - (nb - db);
    let quotient = if shift >= 0 {
        (num << (shift as usize)) / den
    } else {
        num / (den << ((-shift) as usize))
    };
    let mant = quotient.to_f64().unwrap_or(f64::NAN);
    mant * 2f64.powi(-(shift as i32))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_big(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

/// Error from parsing a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational {0:?}")]
pub struct ParseRationalError(pub String);

/// Parses `"p/q"` or `"p"` (q may not be zero).
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let s = s.trim();
    let err = || ParseRationalError(s.to_string());
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| err())?)),
    }
}

/// Canonical `"p/q"` form: q > 0, gcd 1, denominator always written.
pub fn format_rational(q: &Rational) -> String {
    // Ratio keeps itself reduced with a positive denominator.
    format!("{}/{}", q.numer(), q.denom())
}

pub fn is_integral(q: &Rational) -> bool {
    q.denom().is_one()
}

/// Integer nearest to `q` (ties away from zero).
pub fn round_rational(q: &Rational) -> BigInt {
    q.round().to_integer()
}

pub fn abs_rational(q: &Rational) -> Rational {
    q.abs()
}

/// Best rational approximation within `[x - tol, x + tol]` with the smallest
/// denominator, via the Stern–Brocot / continued fraction walk.
pub fn simplest_rational_in(x: f64, tol: f64) -> Option<Rational> {
    if !x.is_finite() || !(tol > 0.0) {
        return None;
    }
    let lo = x - tol;
    let hi = x + tol;
    simplest_between(lo, hi)
}

fn simplest_between(lo: f64, hi: f64) -> Option<Rational> {
    if lo > hi {
        return None;
    }
    if lo <= 0.0 && hi >= 0.0 {
        return Some(Rational::zero());
    }
    if hi < 0.0 {
        return simplest_between(-hi, -lo).map(|q| -q);
    }
    let fl = lo.floor();
    if fl + 1.0 <= hi || fl == lo {
        // an integer lies in the interval
        let n = if fl == lo { fl } else { fl + 1.0 };
        return BigInt::from_f64(n).map(Rational::from_integer);
    }
    // lo, hi share integer part; recurse on reciprocals of fractional parts
    let a = BigInt::from_f64(fl)?;
    let inner_lo = 1.0 / (hi - fl);
    let inner_hi = 1.0 / (lo - fl);
    if !inner_lo.is_finite() || !inner_hi.is_finite() || inner_lo > 1e18 {
        return None;
    }
    let inner = simplest_between(inner_lo, inner_hi)?;
    if inner.is_zero() {
        return None;
    }
    Some(Rational::from_integer(a) + inner.recip())
}

/// Number of significant decimal digits printed in `s` (as `0.0052682944` → 8).
pub fn printed_significant_digits(s: &str) -> usize {
    let mantissa = s
        .trim()
        .trim_start_matches('-')
        .split(['e', 'E'])
        .next()
        .unwrap_or("");
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let trimmed = digits.trim_start_matches('0');
    trimmed.len().max(1)
}

/// `f64` printed with `sig` significant digits in plain or exponent notation.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&exp) {
        return format!("{:.*e}", sig.saturating_sub(1), x);
    }
    let decimals = (sig as i32 - 1 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

pub fn bigint_pow(base: &BigInt, exp: u64) -> BigInt {
    num_traits::pow(base.clone(), exp as usize)
}

pub fn i64_from_rational(q: &Rational) -> Option<i64> {
    if is_integral(q) {
        q.numer().to_i64()
    } else {
        None
    }
}

pub fn signum_rational(q: &Rational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}
