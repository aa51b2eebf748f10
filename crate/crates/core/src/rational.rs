//! Exact rational arithmetic helpers.
//!
//! Every quantity in this crate is a [`Rational`]. Values cross file
//! boundaries as strings of the form `"p/q"` or `"p"`, never as floats.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalError {
    #[error("malformed rational `{0}` (expected \"p/q\" or an integer string)")]
    Malformed(String),
    #[error("lambda must lie in (0, 1], got {0}")]
    BadLambda(String),
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"` or `"p"` (optionally signed). Decimal or exponent notation is rejected.
pub fn parse(text: &str) -> Result<Rational, RationalError> {
    let trimmed = text.trim();
    let well_formed = !trimmed.is_empty()
        && trimmed
            .chars()
            .all(|c| c.is_ascii_digit() || c == '/' || c == '-' || c == '+');
    if !well_formed {
        return Err(RationalError::Malformed(text.to_string()));
    }
    let value = Rational::from_str(trimmed).map_err(|_| RationalError::Malformed(text.to_string()))?;
    Ok(value)
}

pub fn format(value: &Rational) -> String {
    value.to_string()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn max_of<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> Rational {
    values
        .into_iter()
        .fold(Rational::zero(), |acc, v| if *v > acc { v.clone() } else { acc })
}

/// Smallest integer `>= value`.
pub fn ceil(value: &Rational) -> BigInt {
    value.ceil().to_integer()
}

/// Tradeoff parameter, always in `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lambda(Rational);

impl Lambda {
    pub fn new(value: Rational) -> Result<Self, RationalError> {
        if value.is_positive() && value <= Rational::one() {
            Ok(Lambda(value))
        } else {
            Err(RationalError::BadLambda(value.to_string()))
        }
    }

    pub fn one() -> Self {
        Lambda(Rational::one())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }
}

impl FromStr for Lambda {
    type Err = RationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Lambda::new(parse(s)?)
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Serde adapters: rationals as strings.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

pub mod serde_rational_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&format(v))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| parse(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod serde_rational_opt {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => s.serialize_some(&format(v)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let text = Option::<String>::deserialize(d)?;
        text.map(|t| parse(&t).map_err(serde::de::Error::custom)).transpose()
    }
}

/// Wrapper used where a rational must appear as a standalone serde value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub Rational);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serde_rational::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        serde_rational::deserialize(d).map(Exact)
    }
}

impl Serialize for Lambda {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serde_rational::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Lambda {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let value = serde_rational::deserialize(d)?;
        Lambda::new(value).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse("-6/4").unwrap(), ratio(-3, 2));
        assert_eq!(parse("7").unwrap(), int(7));
    }

    #[test]
    fn rejects_floats() {
        assert!(parse("0.5").is_err());
        assert!(parse("1e3").is_err());
        assert!(parse("").is_err());
        assert!(parse("1/0").is_err());
    }

    #[test]
    fn lambda_range() {
        assert!(Lambda::new(int(0)).is_err());
        assert!(Lambda::new(ratio(3, 2)).is_err());
        assert!(Lambda::new(ratio(-1, 2)).is_err());
        assert!(Lambda::new(int(1)).unwrap().is_one());
        assert_eq!("1/4".parse::<Lambda>().unwrap().value(), &ratio(1, 4));
    }

    #[test]
    fn ceil_rounds_up() {
        assert_eq!(ceil(&ratio(3, 1)), BigInt::from(3));
        assert_eq!(ceil(&ratio(1, 4)), BigInt::from(1));
        assert_eq!(ceil(&ratio(-1, 4)), BigInt::from(0));
    }

    proptest! {
        #[test]
        fn string_round_trip_is_exact(n in any::<i64>(), d in 1i64..i64::MAX) {
            let v = ratio(n, d);
            let back = parse(&format(&v)).unwrap();
            prop_assert_eq!(&back, &v);
            prop_assert_eq!(format(&back), format(&v));
        }
    }
}
