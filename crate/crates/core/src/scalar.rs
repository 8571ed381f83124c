//! Scalar abstraction shared by every module.
//!
//! Table spaces run on exact rationals so that triangle inequalities and
//! fixed-set checks hold with equality; the Euclidean backend runs on
//! `f64` (or `f32`). Both go through the [`Scalar`] trait.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact arbitrary-precision rational.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiteralError {
    #[error("empty numeric literal")]
    Empty,
    #[error("malformed numeric literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Number type the metric machinery is generic over.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// `true` when arithmetic is exact and comparisons need no tolerance.
    const EXACT: bool;

    /// Two points closer than this are the same point (zero when exact).
    fn dedup_epsilon() -> Self;

    /// Relative slack allowed in metric-axiom checks (zero when exact).
    fn relative_tolerance() -> Self;

    /// Square root. Exact for rationals that are perfect squares; otherwise
    /// the nearest representable value.
    fn sqrt(&self) -> Self;

    /// Parses `p/q`, integer, decimal or scientific literals.
    fn from_literal(s: &str) -> Result<Self, LiteralError>;

    /// Canonical text form: `p/q` (or `p`) for rationals, shortest
    /// round-trip decimal for floats.
    fn to_literal(&self) -> String;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `a <= b` up to the scalar's relative tolerance.
    fn le_tol(a: &Self, b: &Self) -> bool {
        if Self::EXACT {
            a <= b
        } else {
            let slack = Self::relative_tolerance() * (a.abs() + b.abs()) + Self::dedup_epsilon();
            *a <= b.clone() + slack
        }
    }
}

/// Larger of two partially ordered values (left-biased on ties).
pub fn max_of<S: PartialOrd + Clone>(a: &S, b: &S) -> S {
    if b > a {
        b.clone()
    } else {
        a.clone()
    }
}

/// Smaller of two partially ordered values (left-biased on ties).
pub fn min_of<S: PartialOrd + Clone>(a: &S, b: &S) -> S {
    if b < a {
        b.clone()
    } else {
        a.clone()
    }
}

/// Parses a literal into an exact rational.
///
/// Accepted forms: `7`, `-3/4`, `0.125`, `1e-3`, `2.5E+2`.
pub fn parse_rational(text: &str) -> Result<Rational, LiteralError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(LiteralError::Empty);
    }
    let malformed = || LiteralError::Malformed(s.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_rational(num)?;
        let d = parse_rational(den)?;
        if d.is_zero() {
            return Err(LiteralError::ZeroDenominator(s.to_string()));
        }
        return Ok(n / d);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().map_err(|_| malformed())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(malformed());
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(malformed());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer: BigInt = all_digits.parse().map_err(|_| malformed())?;
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 4096 {
        return Err(malformed());
    }
    let pow = BigInt::from(10u32).pow(scale.unsigned_abs() as u32);
    let mut value = if scale >= 0 {
        Rational::from_integer(numer * pow)
    } else {
        Rational::new(numer, pow)
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Text form of a rational: `p` when integral, `p/q` otherwise.
pub fn rational_literal(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer(), r.denom());
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(Rational::new(rn, rd))
    } else {
        None
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn dedup_epsilon() -> Self {
        Rational::zero()
    }

    fn relative_tolerance() -> Self {
        Rational::zero()
    }

    fn sqrt(&self) -> Self {
        exact_sqrt(self).unwrap_or_else(|| {
            let approx = self.to_f64().unwrap_or(0.0).sqrt();
            Rational::from_f64(approx).unwrap_or_else(Rational::zero)
        })
    }

    fn from_literal(s: &str) -> Result<Self, LiteralError> {
        parse_rational(s)
    }

    fn to_literal(&self) -> String {
        rational_literal(self)
    }
}

macro_rules! float_scalar {
    ($t:ty, $eps:expr, $rel:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn dedup_epsilon() -> Self {
                $eps
            }

            fn relative_tolerance() -> Self {
                $rel
            }

            fn sqrt(&self) -> Self {
                <$t>::sqrt(*self)
            }

            fn from_literal(s: &str) -> Result<Self, LiteralError> {
                let r = parse_rational(s)?;
                r.to_f64()
                    .map(|v| v as $t)
                    .ok_or_else(|| LiteralError::Malformed(s.to_string()))
            }

            fn to_literal(&self) -> String {
                format!("{:?}", self)
            }
        }
    };
}

float_scalar!(f64, 1e-12, 1e-9);
float_scalar!(f32, 1e-6, 1e-5);
