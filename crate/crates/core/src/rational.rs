//! Exact rational scalars for distances and tree labels.
//!
//! Every decision in this crate (spectrum ranks, diametrical pairs, ball
//! membership) hinges on exact equality, so there is no floating point
//! anywhere behind this type.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// An exact rational number, always kept in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// `(self + other) / 2`.
    pub fn midpoint(&self, other: &Rational) -> Rational {
        let two = BigRational::from_integer(BigInt::from(2));
        Rational((&self.0 + &other.0) / two)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `"a"` or `"a/b"` with `b > 0`. Surrounding whitespace is not
    /// allowed.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::InvalidRational(s.to_string());
        match s.split_once('/') {
            None => Ok(Rational(BigRational::from_integer(parse_int(s).ok_or_else(bad)?))),
            Some((n, d)) => {
                let n = parse_int(n).ok_or_else(bad)?;
                if d.starts_with('-') {
                    return Err(bad());
                }
                let d = parse_int(d).ok_or_else(bad)?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(Rational(BigRational::new(n, d)))
            }
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
