//! Scalar field abstraction: exact rationals for verification, doubles for search.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub trait Scalar:
    Clone + Debug + Display + PartialEq + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// True when arithmetic is exact (no rounding).
    const EXACT: bool;

    fn from_f64(x: f64) -> Self;
    fn from_ratio(p: i64, q: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn from_big(r: &BigRational) -> Self;

    fn from_i64(p: i64) -> Self {
        Self::from_ratio(p, 1)
    }

    /// `|self| <= tol`, with the tolerance converted into the field.
    fn within(&self, tol: f64) -> bool {
        self.abs() <= Self::from_f64(tol)
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_f64(x: f64) -> Self {
        x
    }

    fn from_ratio(p: i64, q: i64) -> Self {
        p as f64 / q as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_big(r: &BigRational) -> Self {
        Scalar::to_f64(r)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    /// Exact binary expansion of the double.
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite scalar")
    }

    fn from_ratio(p: i64, q: i64) -> Self {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // numerator/denominator too large for a direct conversion
            let n = self.numer().to_f64().unwrap_or(f64::NAN);
            let d = self.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }

    fn from_big(r: &BigRational) -> Self {
        r.clone()
    }
}

/// Parses `"p/q"`, an integer, or a decimal literal (`"-0.125"`, `"1e-3"`).
///
/// Decimal literals are read exactly, so `"0.1"` becomes `1/10` in rational mode.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("invalid scalar {text:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(all_digits.parse::<BigInt>().map_err(|_| bad())?);
    let shift = exponent - frac_part.len() as i64;
    let ten = BigRational::from_integer(BigInt::from(10));
    let pow = num_traits::pow(ten, shift.unsigned_abs() as usize);
    if shift >= 0 {
        value *= pow;
    } else {
        value /= pow;
    }
    Ok(if neg { -value } else { value })
}

/// Parses a scalar into the requested field.
pub fn parse_scalar<S: Scalar>(text: &str) -> Result<S> {
    Ok(S::from_big(&parse_rational(text)?))
}

/// Formats a scalar for reports: `"p/q"` in exact mode, 17 significant digits otherwise.
pub fn format_scalar<S: Scalar>(x: &S) -> String {
    if S::EXACT {
        format!("{x}")
    } else {
        format_f64(x.to_f64())
    }
}

pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.16e}")
}

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!(parse_rational("1/20").unwrap(), rat(1, 20));
        assert_eq!(parse_rational("0.1").unwrap(), rat(1, 10));
        assert_eq!(parse_rational("-2.5e-1").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("3").unwrap(), rat(3, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn conversion_into_both_fields() {
        let r = rat(-123_456_789_012, 987_654_321);
        assert_eq!(parse_scalar::<BigRational>("-123456789012/987654321").unwrap(), r);
        assert_eq!(parse_scalar::<f64>("1/4").unwrap(), 0.25);
    }

    #[test]
    fn formatting() {
        assert_eq!(format_scalar(&rat(3, 16)), "3/16");
        assert_eq!(format_f64(0.5), "5.0000000000000000e-1");
    }
}
