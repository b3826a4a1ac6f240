//! Univariate polynomials in an infinitesimal `ε > 0`.
//!
//! Polynomials are ordered by their behaviour as `ε -> 0+`: `p > q` iff the
//! lowest-degree nonzero coefficient of `p - q` is positive. This is a total
//! order compatible with the ring operations, so the polynomials can stand in
//! for valuations directly.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Pow, Signed, Zero};
use serde_json::{Map, Value as Json};

use crate::error::FormatError;
use crate::value::{format_rational, rational_from_json, Rational, Value};

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct EpsPoly {
    // degree -> coefficient; zero coefficients never stored
    coeffs: BTreeMap<u32, Rational>,
}

impl EpsPoly {
    pub fn constant(c: Rational) -> Self {
        Self::term(c, 0)
    }

    pub fn term(c: Rational, degree: u32) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(degree, c);
        }
        EpsPoly { coeffs }
    }

    /// `ε` itself.
    pub fn eps() -> Self {
        Self::term(Rational::one(), 1)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u32, Rational)>) -> Self {
        terms
            .into_iter()
            .fold(EpsPoly::zero(), |acc, (d, c)| acc + EpsPoly::term(c, d))
    }

    pub fn coefficient(&self, degree: u32) -> Rational {
        self.coeffs.get(&degree).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.coeffs.iter().map(|(d, c)| (*d, c))
    }

    /// Substitutes a concrete rational for `ε`.
    pub fn eval(&self, eps: &Rational) -> Rational {
        self.coeffs
            .iter()
            .fold(Rational::zero(), |acc, (d, c)| acc + c * Pow::pow(eps, *d))
    }

    /// Sign of `self` as `ε -> 0+`.
    pub fn signum(&self) -> Ordering {
        match self.coeffs.values().next() {
            None => Ordering::Equal,
            Some(c) if c.is_positive() => Ordering::Greater,
            Some(_) => Ordering::Less,
        }
    }

    fn insert_add(&mut self, degree: u32, c: Rational) {
        let entry = self.coeffs.entry(degree).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&degree);
        }
    }
}

/// Limit order as `ε -> 0+`.
pub fn compare_eps(p: &EpsPoly, q: &EpsPoly) -> Ordering {
    p.cmp(q)
}

impl Ord for EpsPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        // Walk degrees upward; the first coefficient that differs decides.
        let mut a = self.coeffs.iter().peekable();
        let mut b = other.coeffs.iter().peekable();
        let zero = Rational::zero();
        loop {
            let (da, db) = (a.peek().map(|t| *t.0), b.peek().map(|t| *t.0));
            let (ca, cb) = match (da, db) {
                (None, None) => return Ordering::Equal,
                (Some(x), Some(y)) if x == y => (a.next().unwrap().1, b.next().unwrap().1),
                (Some(x), Some(y)) if x < y => (a.next().unwrap().1, &zero),
                (Some(_), None) => (a.next().unwrap().1, &zero),
                _ => (&zero, b.next().unwrap().1),
            };
            match ca.cmp(cb) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
    }
}

impl PartialOrd for EpsPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for EpsPoly {
    type Output = EpsPoly;
    fn add(mut self, rhs: EpsPoly) -> EpsPoly {
        for (d, c) in rhs.coeffs {
            self.insert_add(d, c);
        }
        self
    }
}

impl Neg for EpsPoly {
    type Output = EpsPoly;
    fn neg(self) -> EpsPoly {
        EpsPoly {
            coeffs: self.coeffs.into_iter().map(|(d, c)| (d, -c)).collect(),
        }
    }
}

impl Sub for EpsPoly {
    type Output = EpsPoly;
    fn sub(self, rhs: EpsPoly) -> EpsPoly {
        self + (-rhs)
    }
}

impl Mul for EpsPoly {
    type Output = EpsPoly;
    fn mul(self, rhs: EpsPoly) -> EpsPoly {
        let mut out = EpsPoly::zero();
        for (da, ca) in &self.coeffs {
            for (db, cb) in &rhs.coeffs {
                out.insert_add(da + db, ca * cb);
            }
        }
        out
    }
}

impl Zero for EpsPoly {
    fn zero() -> Self {
        EpsPoly::default()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for EpsPoly {
    fn one() -> Self {
        EpsPoly::constant(Rational::one())
    }
}

impl From<Rational> for EpsPoly {
    fn from(c: Rational) -> Self {
        EpsPoly::constant(c)
    }
}

impl fmt::Display for EpsPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (k, (d, c)) in self.coeffs.iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let coef = format_rational(&mag);
            match d {
                0 => write!(f, "{coef}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{coef}")?;
                    }
                    if *d == 1 {
                        write!(f, "ε")?;
                    } else {
                        write!(f, "ε^{d}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for EpsPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EpsPoly({self})")
    }
}

impl Value for EpsPoly {
    /// `{"0": "10", "5": "3"}` for `10 + 3ε^5`.
    fn to_json(&self) -> Json {
        let mut obj = Map::new();
        for (d, c) in &self.coeffs {
            obj.insert(d.to_string(), Json::String(format_rational(c)));
        }
        Json::Object(obj)
    }

    /// Accepts the degree map, or a plain rational for a constant.
    fn from_json(json: &Json) -> Result<Self, FormatError> {
        match json {
            Json::Object(obj) => {
                let mut p = EpsPoly::zero();
                for (d, c) in obj {
                    let degree: u32 = d.parse().map_err(|_| FormatError::BadDegree(d.clone()))?;
                    p = p + EpsPoly::term(rational_from_json(c)?, degree);
                }
                Ok(p)
            }
            other => rational_from_json(other).map(EpsPoly::constant),
        }
    }

    fn display(&self) -> String {
        self.to_string()
    }
}
