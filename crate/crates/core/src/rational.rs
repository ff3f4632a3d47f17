//! Scalar layer: arbitrary-precision rationals and one extended value.
//!
//! Every quantity in this crate (edge lengths, resistances, measures, the
//! invariants themselves) is a [`Rat`]. The single point at infinity exists
//! only because the deleted-edge resistance of a bridge is infinite; it never
//! enters any other arithmetic.

use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, Zero};
use thiserror::Error;

/// Exact rational scalar. Stored in lowest terms with positive denominator.
pub type Rat = BigRational;

/// Shorthand for the rational `n/d`. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// A rational or the value `+inf`.
///
/// The infinite value arises exactly when a quantity is the effective
/// resistance between the endpoints of a deleted bridge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtendedRational {
    Finite(Rat),
    Infinite,
}

impl ExtendedRational {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedRational::Infinite)
    }

    pub fn finite(&self) -> Option<&Rat> {
        match self {
            ExtendedRational::Finite(x) => Some(x),
            ExtendedRational::Infinite => None,
        }
    }
}

impl From<Rat> for ExtendedRational {
    fn from(x: Rat) -> Self {
        ExtendedRational::Finite(x)
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedRational::Finite(x) => write!(f, "{}", x),
            ExtendedRational::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RationalParseError {
    #[error("cannot parse {input:?} as a rational: expected \"p\" or \"p/q\"")]
    Malformed { input: String },
    #[error("zero denominator in {input:?}")]
    ZeroDenominator { input: String },
}

/// Parses `"p"` or `"p/q"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Rat, RationalParseError> {
    let trimmed = s.trim();
    if let Some((_, den)) = trimmed.split_once('/') {
        if let Ok(d) = BigInt::from_str(den.trim()) {
            if d.is_zero() {
                return Err(RationalParseError::ZeroDenominator {
                    input: s.to_string(),
                });
            }
        }
    }
    Rat::from_str(trimmed).map_err(|_| RationalParseError::Malformed {
        input: s.to_string(),
    })
}

/// Decimal expansion of `x` with `digits` fractional digits, rounded half away
/// from zero. The result is an approximation whenever the denominator has a
/// prime factor other than 2 and 5.
pub fn decimal_string(x: &Rat, digits: usize) -> String {
    let sign = if x.is_negative() { "-" } else { "" };
    let num = x.numer().abs();
    let den = x.denom().clone();
    let scale = BigInt::from(10u32).pow(digits as u32);
    // round(num * scale / den), half away from zero
    let scaled = (num * &scale * 2u32 + &den) / (den * 2u32);
    if digits == 0 {
        return format!("{}{}", sign, scaled);
    }
    let s = scaled.to_string();
    if s.len() > digits {
        let (int_part, frac_part) = s.split_at(s.len() - digits);
        format!("{}{}.{}", sign, int_part, frac_part)
    } else {
        format!("{}0.{}{}", sign, "0".repeat(digits - s.len()), s)
    }
}
