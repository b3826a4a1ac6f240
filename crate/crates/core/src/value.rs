//! Exact value rings used for valuations.
//!
//! Everything in this crate is generic over [`Value`]: an ordered commutative
//! ring with exact arithmetic. The two instantiations are [`Rational`] (plain
//! instances) and [`crate::EpsPoly`] (instances with an infinitesimal).

use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::Value as Json;

use crate::error::FormatError;

/// Arbitrary-precision rational, always kept in lowest terms.
pub type Rational = num_rational::BigRational;

/// An exactly represented, totally ordered ring element.
pub trait Value:
    Clone
    + Debug
    + Ord
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    fn is_negative_value(&self) -> bool {
        *self < Self::zero()
    }

    fn to_json(&self) -> Json;

    fn from_json(json: &Json) -> Result<Self, FormatError>;

    /// Human-readable rendering used by the CLI summaries.
    fn display(&self) -> String;
}

impl Value for Rational {
    fn to_json(&self) -> Json {
        rational_to_json(self)
    }

    fn from_json(json: &Json) -> Result<Self, FormatError> {
        rational_from_json(json)
    }

    fn display(&self) -> String {
        format_rational(self)
    }
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `"p/q"` or `"p"`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(text: &str) -> Result<Rational, FormatError> {
    let text = text.trim();
    let bad = || FormatError::BadNumber(text.to_string());
    match text.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => BigInt::from_str(text)
            .map(Rational::from_integer)
            .map_err(|_| bad()),
    }
}

/// Integers are emitted as JSON numbers when they fit in an `i64`, everything
/// else as a `"p/q"` string.
pub fn rational_to_json(r: &Rational) -> Json {
    if r.denom().is_one() {
        if let Ok(n) = i64::try_from(r.numer()) {
            return Json::from(n);
        }
    }
    Json::String(format_rational(r))
}

pub fn rational_from_json(json: &Json) -> Result<Rational, FormatError> {
    match json {
        Json::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(int(i))
            } else if let Some(u) = n.as_u64() {
                Ok(Rational::from_integer(BigInt::from(u)))
            } else {
                // floats are refused
                Err(FormatError::BadNumber(n.to_string()))
            }
        }
        Json::String(s) => parse_rational(s),
        other => Err(FormatError::BadNumber(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_in_lowest_terms() {
        let r = parse_rational("2/6").unwrap();
        assert_eq!(r, rational(1, 3));
        assert_eq!(format_rational(&r), "1/3");
    }

    #[test]
    fn json_forms() {
        assert_eq!(rational_from_json(&serde_json::json!(7)).unwrap(), int(7));
        assert_eq!(
            rational_from_json(&serde_json::json!("1/3")).unwrap(),
            rational(1, 3)
        );
        assert!(rational_from_json(&serde_json::json!(1.5)).is_err());
        assert!(rational_from_json(&serde_json::json!("1/0")).is_err());
        assert!(rational_from_json(&serde_json::json!("x")).is_err());
        assert_eq!(rational_to_json(&rational(4, 2)), serde_json::json!(2));
        assert_eq!(rational_to_json(&rational(-1, 3)), serde_json::json!("-1/3"));
    }
}
