//! Scalar abstraction shared by every numeric kernel in this crate.
//!
//! All core types are generic over [`Scalar`], which is implemented for
//! binary floating point (`f32`, `f64`) and for exact rationals
//! ([`num_rational::BigRational`]). Exact mode exists so that the classical
//! polynomial generator pair can be checked bit-for-bit against brute-force
//! oracles; float mode is the default everywhere else.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Field scalar used throughout the crate.
///
/// `EXACT` switches comparison semantics: exact scalars compare with `==`,
/// floats compare against a relative tolerance.
pub trait Scalar:
    Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + PartialOrd
    + Clone
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
{
    const EXACT: bool;

    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("i64 fits in every scalar")
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_int(num) / Self::from_int(den)
    }

    /// Lossy view of the scalar, for diagnostics and float-tolerance checks.
    fn approx_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Parses "3", "-2/7", "0.125" or (float mode) anything `f64` accepts.
    fn parse_scalar(text: &str) -> Result<Self, String>;

    /// Tolerance acceptance in the sense used by identity reports:
    /// `|self - other| <= tol * max(1, |self|)`, or exact equality in
    /// exact mode.
    fn within(&self, other: &Self, tol: f64) -> bool {
        if Self::EXACT {
            self == other
        } else {
            let a = self.approx_f64();
            let b = other.approx_f64();
            (a - b).abs() <= tol * a.abs().max(1.0)
        }
    }

    fn from_json(value: &serde_json::Value) -> Result<Self, String> {
        match value {
            serde_json::Value::Number(n) => {
                let v = n.as_f64().ok_or_else(|| format!("bad number {n}"))?;
                Self::from_f64(v).ok_or_else(|| format!("cannot represent {v}"))
            }
            serde_json::Value::String(s) => Self::parse_scalar(s),
            other => Err(format!("expected number or string, got {other}")),
        }
    }

    /// Exact scalars serialize as strings ("5", "-7/3") so they survive a
    /// round-trip; floats serialize as JSON numbers.
    fn to_json(&self) -> serde_json::Value {
        if Self::EXACT {
            serde_json::Value::String(self.to_string())
        } else {
            serde_json::Number::from_f64(self.approx_f64())
                .map(serde_json::Value::Number)
                .unwrap_or_else(|| serde_json::Value::String(self.to_string()))
        }
    }
}

/// Scalars with transcendental functions: the floating-point types.
///
/// Non-polynomial generator pairs (trig, hyperbolic, Müntz) evaluate sines,
/// powers and the like, so they are only constructible over a `RealScalar`.
pub trait RealScalar: Scalar + num_traits::Float {}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn parse_scalar(text: &str) -> Result<Self, String> {
        if let Some((n, d)) = text.split_once('/') {
            let n: f64 = n.trim().parse().map_err(|e| format!("{e}: {text}"))?;
            let d: f64 = d.trim().parse().map_err(|e| format!("{e}: {text}"))?;
            if d == 0.0 {
                return Err(format!("zero denominator in {text}"));
            }
            return Ok(n / d);
        }
        text.trim().parse().map_err(|e| format!("{e}: {text}"))
    }
}
impl RealScalar for f64 {}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn parse_scalar(text: &str) -> Result<Self, String> {
        f64::parse_scalar(text).map(|v| v as f32)
    }
}
impl RealScalar for f32 {}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn parse_scalar(text: &str) -> Result<Self, String> {
        parse_rational(text.trim()).ok_or_else(|| format!("cannot parse rational from {text:?}"))
    }
}

/// Accepts integers, `a/b` fractions, and decimal literals with an optional
/// exponent; decimals parse exactly (`0.1` becomes `1/10`, not the nearest
/// binary float).
fn parse_rational(text: &str) -> Option<BigRational> {
    if text.is_empty() {
        return None;
    }
    if let Some((n, d)) = text.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exp) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, i32::from_str(e).ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return None;
    }
    let numer = BigInt::from_str(&digits).ok()?;
    let scale = frac_part.len() as i32 - exp;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::new(numer, ten.pow(scale as u32))
    } else {
        BigRational::from(numer * ten.pow((-scale) as u32))
    };
    Some(value)
}

/// `n!` as a scalar. Degrees in this crate stay small, so `i64` is ample.
pub fn factorial<S: Scalar>(n: usize) -> S {
    let mut acc: i64 = 1;
    for k in 2..=n as i64 {
        acc *= k;
    }
    S::from_int(acc)
}

/// Generalized binomial `C(k, d) = k(k-1)...(k-d+1) / d!` for integer `k` of
/// either sign. Zero exactly when `0 <= k < d`.
pub fn falling_binomial<S: Scalar>(k: i64, d: usize) -> S {
    let mut numer: i128 = 1;
    for i in 0..d as i128 {
        numer *= k as i128 - i;
    }
    let mut denom: i128 = 1;
    for i in 2..=d as i128 {
        denom *= i;
    }
    // products of d consecutive integers are divisible by d!
    S::from_int((numer / denom) as i64)
}

/// Ordinary binomial coefficient as a scalar.
pub fn binomial<S: Scalar>(n: usize, k: usize) -> S {
    if k > n {
        return S::zero();
    }
    falling_binomial(n as i64, k)
}

/// Convenience: `(lo + hi) / 2` without assuming a float scalar.
pub fn midpoint<S: Scalar>(lo: &S, hi: &S) -> S {
    (lo.clone() + hi.clone()) / S::from_int(2)
}

pub use num_traits::{One as ScalarOne, Zero as ScalarZero};

#[allow(unused_imports)]
pub(crate) use num_traits::{One as _, Zero as _};

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing_is_exact() {
        let half = BigRational::parse_scalar("0.5").unwrap();
        assert_eq!(half, BigRational::from_ratio(1, 2));
        let v = BigRational::parse_scalar("-2.75e1").unwrap();
        assert_eq!(v, BigRational::from_ratio(-55, 2));
        let f = BigRational::parse_scalar("3/12").unwrap();
        assert_eq!(f, BigRational::from_ratio(1, 4));
        assert!(BigRational::parse_scalar("1/0").is_err());
    }

    #[test]
    fn falling_binomials() {
        assert_eq!(falling_binomial::<f64>(5, 2), 10.0);
        assert_eq!(falling_binomial::<f64>(-1, 3), -1.0);
        assert_eq!(falling_binomial::<f64>(-2, 1), -2.0);
        assert_eq!(falling_binomial::<f64>(2, 3), 0.0);
        assert_eq!(
            falling_binomial::<BigRational>(-1, 4),
            BigRational::one()
        );
    }

    #[test]
    fn within_semantics_differ_by_mode() {
        assert!(1.0f64.within(&(1.0 + 1e-12), 1e-9));
        let a = BigRational::one();
        let b = &a + BigRational::from_ratio(1, 1_000_000_000_000);
        assert!(!a.within(&b, 1e-9));
        assert!(a.within(&a.clone(), 0.0));
    }
}
