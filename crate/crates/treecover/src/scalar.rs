//! The scalar type underlying all lengths, offsets and distances.
//!
//! Every metric quantity in this crate is an element of an ordered field
//! with exact comparisons, so that identities like the four-point
//! condition can be checked with zero tolerance. The canonical choice is
//! an arbitrary-precision rational ([`num_rational::BigRational`]); the
//! fixed-width `Ratio<i64>` / `Ratio<i128>` variants also qualify for
//! small inputs.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Num, Signed};

/// An exactly-comparable ordered field element.
///
/// `Num` supplies the field operations and `from_str_radix` (which for
/// `Ratio` types understands `"p/q"` strings); `Ord + Eq + Hash` make
/// scalars usable as keys and in canonical sort orders.
pub trait Scalar: Num + Signed + Ord + Eq + Hash + Clone + Debug + Display + 'static {
    /// Builds the scalar `numer / denom`. Panics if `denom == 0`.
    fn from_fraction(numer: i64, denom: i64) -> Self;

    /// Builds a whole-number scalar.
    fn from_int(value: i64) -> Self {
        Self::from_fraction(value, 1)
    }

    /// Exact halving, used by the Gromov-product cross-check.
    fn half(&self) -> Self {
        self.clone() / Self::from_int(2)
    }
}

impl Scalar for Ratio<BigInt> {
    fn from_fraction(numer: i64, denom: i64) -> Self {
        Ratio::new(BigInt::from(numer), BigInt::from(denom))
    }
}

impl Scalar for Ratio<i64> {
    fn from_fraction(numer: i64, denom: i64) -> Self {
        Ratio::new(numer, denom)
    }
}

impl Scalar for Ratio<i128> {
    fn from_fraction(numer: i64, denom: i64) -> Self {
        Ratio::new(numer as i128, denom as i128)
    }
}

/// Parses a scalar from `p/q` or decimal notation (`3/4`, `2`, `0.75`,
/// `-1.5`). Exact: decimals become fractions over a power of ten.
pub fn parse_scalar<S: Scalar>(text: &str) -> Result<S, ScalarParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ScalarParseError(text.to_string()));
    }
    let (sign, body) = match text.strip_prefix('-') {
        Some(rest) => (-S::one(), rest),
        None => (S::one(), text.strip_prefix('+').unwrap_or(text)),
    };
    if let Some((int_part, frac_part)) = body.split_once('.') {
        if body.contains('/') || frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ScalarParseError(text.to_string()));
        }
        let int_part = if int_part.is_empty() { "0" } else { int_part };
        if !int_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ScalarParseError(text.to_string()));
        }
        let whole = S::from_str_radix(&format!("{int_part}/1"), 10)
            .map_err(|_| ScalarParseError(text.to_string()))?;
        let mut num = S::zero();
        let mut den = S::one();
        let ten = S::from_int(10);
        for b in frac_part.bytes() {
            num = num * ten.clone() + S::from_int(i64::from(b - b'0'));
            den = den * ten.clone();
        }
        Ok(sign * (whole + num / den))
    } else {
        // Ratio's from_str_radix insists on the p/q form.
        let normalized = if body.contains('/') {
            body.to_string()
        } else {
            format!("{body}/1")
        };
        let value = S::from_str_radix(&normalized, 10)
            .map_err(|_| ScalarParseError(text.to_string()))?;
        if value < S::zero() {
            // Reject forms like "1/-2"; the sign belongs up front.
            return Err(ScalarParseError(text.to_string()));
        }
        Ok(sign * value)
    }
}

/// Renders a scalar in the canonical `p/q` form (`q` omitted when 1).
pub fn scalar_string<S: Scalar>(value: &S) -> String {
    value.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational: {0:?}")]
pub struct ScalarParseError(pub String);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_fraction(n, d)
    }

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_scalar::<Rational>("3/4").unwrap(), q(3, 4));
        assert_eq!(parse_scalar::<Rational>("2").unwrap(), q(2, 1));
        assert_eq!(parse_scalar::<Rational>("0.75").unwrap(), q(3, 4));
        assert_eq!(parse_scalar::<Rational>("-1.5").unwrap(), q(-3, 2));
        assert_eq!(parse_scalar::<Rational>("-7/2").unwrap(), q(-7, 2));
        assert_eq!(parse_scalar::<Rational>(".5").unwrap(), q(1, 2));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "a", "1/", "/2", "1.2.3", "1/-2", "--1", "1.2/3"] {
            assert!(parse_scalar::<Rational>(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn canonical_rendering() {
        assert_eq!(scalar_string(&q(6, 8)), "3/4");
        assert_eq!(scalar_string(&q(4, 2)), "2");
    }

    #[test]
    fn generic_over_fixed_width_rationals() {
        let x: Ratio<i64> = parse_scalar("5/10").unwrap();
        assert_eq!(x, Ratio::new(1, 2));
        assert_eq!(x.half(), Ratio::new(1, 4));
    }
}
