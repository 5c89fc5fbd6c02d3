//! Scalar abstraction shared by the exact and floating-point paths.
//!
//! Exact code (`Ratio<i64>`, `BigRational`) and `f64` both satisfy
//! [`Scalar`]. Only exact scalars make equality assertions meaningful.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{FromPrimitive, Num, Signed};

use crate::error::{Error, Result};

pub trait Scalar:
    Num
    + Signed
    + FromPrimitive
    + Clone
    + PartialOrd
    + Debug
    + Display
    + FromStr
    + Send
    + Sync
    + 'static
{
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar")
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl<T> Scalar for T where
    T: Num
        + Signed
        + FromPrimitive
        + Clone
        + PartialOrd
        + Debug
        + Display
        + FromStr
        + Send
        + Sync
        + 'static
{
}

/// Parses `"p/q"` or `"n"`. Decimal strings are rejected by the rational types.
pub fn parse_scalar<S: Scalar>(text: &str) -> Result<S> {
    text.trim()
        .parse::<S>()
        .map_err(|_| Error::Parse(format!("not an exact rational: {text:?}")))
}

pub fn sum<'a, S: Scalar>(values: impl IntoIterator<Item = &'a S>) -> S {
    values.into_iter().fold(S::zero(), |acc, v| acc + v.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Rational, Rational64};

    #[test]
    fn parses_fractions_and_integers() {
        let half: Rational64 = parse_scalar("1/2").unwrap();
        assert_eq!(half, Rational64::new(1, 2));
        let three: Rational = parse_scalar("3").unwrap();
        assert_eq!(three, Rational::from_integer(3.into()));
        assert_eq!(
            parse_scalar::<Rational64>("4/8").unwrap().to_string(),
            "1/2"
        );
    }

    #[test]
    fn rejects_decimals() {
        assert!(parse_scalar::<Rational64>("0.5").is_err());
        assert!(parse_scalar::<Rational>("abc").is_err());
    }
}
