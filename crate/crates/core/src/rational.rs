//! Exact rational arithmetic.
//!
//! Every fraction, load and capacity in the crate is an arbitrary-precision
//! rational kept in canonical reduced form (positive denominator, coprime
//! parts). The text form is `p/q`, with `/q` omitted when `q == 1`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use num_rational::BigRational as Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct RationalParseError(pub String);

/// Parses `p`, `p/q` or `-p/q`. The result is reduced.
pub fn parse_rational(s: &str) -> Result<Rational, RationalParseError> {
    let err = || RationalParseError(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let digits_ok = |t: &str, signed: bool| {
        let t = if signed {
            t.strip_prefix('-').unwrap_or(t)
        } else {
            t
        };
        !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit())
    };
    if !digits_ok(num, true) {
        return Err(err());
    }
    let numer: BigInt = num.parse().map_err(|_| err())?;
    let denom: BigInt = match den {
        Some(d) => {
            if !digits_ok(d, false) {
                return Err(err());
            }
            d.parse().map_err(|_| err())?
        }
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(numer, denom))
}

/// Canonical text form.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Display adaptor, for use inside `format!`.
pub struct Frac<'a>(pub &'a Rational);

impl fmt::Display for Frac<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn ceil_u64(r: &Rational) -> u64 {
    r.ceil().to_integer().to_u64().unwrap_or(0)
}

pub fn floor_i64(r: &Rational) -> i64 {
    r.floor()
        .to_integer()
        .to_i64()
        .expect("rational out of i64 range")
}

pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}

/// Least common multiple of the denominators.
pub fn lcm_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("9/2").unwrap(), ratio(9, 2));
        assert_eq!(parse_rational("6/4").unwrap(), ratio(3, 2));
        assert_eq!(parse_rational("-1/3").unwrap(), ratio(-1, 3));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "/", "1/", "/2", "1/0", "a", "1.5", "1/-2", "+3", "1/2/3"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn canonical_output() {
        assert_eq!(format_rational(&ratio(4, 2)), "2");
        assert_eq!(format_rational(&ratio(2, 4)), "1/2");
        assert_eq!(Frac(&ratio(-3, 6)).to_string(), "-1/2");
    }

    #[test]
    fn ceil_and_lcm() {
        assert_eq!(ceil_u64(&ratio(7, 2)), 4);
        assert_eq!(ceil_u64(&int(3)), 3);
        let vals = [ratio(1, 4), ratio(1, 6), int(2)];
        assert_eq!(lcm_denominators(vals.iter()), BigInt::from(12));
    }
}
