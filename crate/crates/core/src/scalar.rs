//! Arithmetic backends.
//!
//! Every value in the library is generic over [`Scalar`]. Two backends are
//! provided: [`Rational`] (arbitrary precision, exact comparisons) and `f64`
//! (comparisons within a tolerance carried by the owning space).

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Arbitrary precision rational number.
pub type Rational = BigRational;

/// Arithmetic used by a computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NumericMode {
    ExactRational,
    Float64 { tolerance: f64 },
}

impl NumericMode {
    pub const DEFAULT_TOLERANCE: f64 = 1e-9;

    pub fn float() -> Self {
        NumericMode::Float64 {
            tolerance: Self::DEFAULT_TOLERANCE,
        }
    }

    /// Comparison slack; zero in exact mode.
    pub fn tolerance(&self) -> f64 {
        match self {
            NumericMode::ExactRational => 0.0,
            NumericMode::Float64 { tolerance } => *tolerance,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NumericMode::ExactRational => "rational",
            NumericMode::Float64 { .. } => "float",
        }
    }
}

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + 'static
{
    /// True when comparisons are exact and the tolerance is ignored.
    const EXACT: bool;

    fn to_f64(&self) -> f64;

    /// Parses `p/q` fractions and decimal literals (`0.25`, `-1e-3`, `7`).
    fn parse_literal(s: &str) -> Result<Self, Error>;

    /// Exact rational value, available only for exact backends.
    fn to_rational(&self) -> Option<Rational>;

    fn from_rational(r: &Rational) -> Self;

    fn approx_eq(&self, other: &Self, tol: f64) -> bool;

    /// `self <= other`, allowing `tol` of slack in float mode.
    fn approx_le(&self, other: &Self, tol: f64) -> bool;

    /// Human-readable value: a reduced fraction for exact scalars.
    fn render(&self) -> String;

    fn min_of(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    fn max_of(a: &Self, b: &Self) -> Self {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    fn is_approx_zero(&self, tol: f64) -> bool {
        self.approx_eq(&Self::zero(), tol)
    }

    /// Strictly positive beyond the tolerance.
    fn is_positive(&self, tol: f64) -> bool {
        !self.approx_le(&Self::zero(), tol)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse_literal(s: &str) -> Result<Self, Error> {
        parse_rational(s)
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn approx_le(&self, other: &Self, _tol: f64) -> bool {
        self <= other
    }

    fn render(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn to_f64(&self) -> f64 {
        *self
    }

    fn parse_literal(s: &str) -> Result<Self, Error> {
        let t = s.trim();
        if t.contains('/') {
            let r = parse_rational(t)?;
            return Ok(Scalar::to_f64(&r));
        }
        let v: f64 = t.parse().map_err(|_| Error::Parse(format!("not a number: `{s}`")))?;
        if !v.is_finite() {
            return Err(Error::Parse(format!("not a finite number: `{s}`")));
        }
        Ok(v)
    }

    fn to_rational(&self) -> Option<Rational> {
        None
    }

    fn from_rational(r: &Rational) -> Self {
        Scalar::to_f64(r)
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }

    fn approx_le(&self, other: &Self, tol: f64) -> bool {
        *self <= *other + tol
    }

    fn render(&self) -> String {
        format!("{self:.8}")
    }
}

/// Parses a fraction `p/q` (decimal integers, `q > 0`) or a decimal literal
/// into an exact rational. Decimal literals are read digit by digit, so
/// `0.1` becomes exactly `1/10`.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = parse_integer(p.trim()).ok_or_else(|| Error::Parse(format!("bad numerator in `{s}`")))?;
        let q = parse_integer(q.trim()).ok_or_else(|| Error::Parse(format!("bad denominator in `{s}`")))?;
        if !q.is_positive() {
            return Err(Error::Parse(format!("denominator must be positive in `{s}`")));
        }
        return Ok(Rational::new(p, q));
    }
    parse_decimal(t).ok_or_else(|| Error::Parse(format!("not a number: `{s}`")))
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.strip_prefix('+').unwrap_or(s).parse().ok()
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().ok()?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, body) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if all_digits.is_empty() {
        BigInt::zero()
    } else {
        all_digits.parse().ok()?
    };
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// Shorthand for building small exact constants in code and tests.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Absolute value for any scalar.
pub fn abs<S: Scalar>(x: &S) -> S {
    if *x < S::zero() {
        S::zero() - x.clone()
    } else {
        x.clone()
    }
}

/// True when `r` is an integer multiple of `step`.
pub fn is_multiple_of(r: &Rational, step: &Rational) -> bool {
    (r / step).is_integer()
}

/// `gcd` of two positive rationals (largest rational dividing both).
pub fn rational_gcd(a: &Rational, b: &Rational) -> Rational {
    let numer = a.numer() * b.denom();
    let other = b.numer() * a.denom();
    Rational::new(numer.gcd(&other), a.denom() * b.denom())
}
