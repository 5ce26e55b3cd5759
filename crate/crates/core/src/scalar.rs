//! Numeric abstraction shared by every module.
//!
//! All box algebra, measures and the simplex engine are written once against
//! [`Scalar`]. The exact instantiation ([`Rational`]) is what the analysis
//! pipeline uses; `f64`/`f32` instantiations exist for quick plotting and
//! cross-checks and compare with a small tolerance instead of exactly.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, the exact scalar of the crate.
pub type Rational = BigRational;

/// Field-like scalar used throughout the crate.
pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + for<'a> DivAssign<&'a Self>
{
    /// True when arithmetic is exact and comparisons use no tolerance.
    const EXACT: bool;

    /// `num / den`. Panics if `den == 0`.
    fn ratio(num: i64, den: i64) -> Self;

    /// Magnitude below which a value counts as zero. Zero for exact types.
    fn tolerance() -> Self;

    /// Human/JSON representation: `num/den` for rationals, decimal for floats.
    fn render(&self) -> String;

    /// Exact value, `None` for non-finite floats.
    fn to_rational(&self) -> Option<Rational>;

    /// Nearest representable value.
    fn from_rational(r: &Rational) -> Self;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Sign of `self` with the type's tolerance applied.
    fn sign(&self) -> Ordering {
        let tol = Self::tolerance();
        if *self > tol {
            Ordering::Greater
        } else if *self < -tol {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }

    fn is_negligible(&self) -> bool {
        self.sign() == Ordering::Equal
    }

    fn is_positive_tol(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    fn is_negative_tol(&self) -> bool {
        self.sign() == Ordering::Less
    }

    /// Tolerance-aware comparison.
    fn cmp_tol(&self, other: &Self) -> Ordering {
        let mut d = self.clone();
        d -= other;
        d.sign()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self.cmp_tol(other) == Ordering::Equal
    }

    fn mul_ref(&self, other: &Self) -> Self {
        let mut t = self.clone();
        t *= other;
        t
    }

    fn add_ref(&self, other: &Self) -> Self {
        let mut t = self.clone();
        t += other;
        t
    }

    fn sub_ref(&self, other: &Self) -> Self {
        let mut t = self.clone();
        t -= other;
        t
    }

    fn div_ref(&self, other: &Self) -> Self {
        let mut t = self.clone();
        t /= other;
        t
    }

    fn half() -> Self {
        Self::ratio(1, 2)
    }

    fn two() -> Self {
        Self::ratio(2, 1)
    }

    fn max_of(a: &Self, b: &Self) -> Self {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    fn min_of(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn tolerance() -> Self {
        Self::zero()
    }

    fn render(&self) -> String {
        format_rational(self)
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    // Exact types skip the subtraction in the default implementation.
    fn sign(&self) -> Ordering {
        self.numer().sign_cmp()
    }

    fn cmp_tol(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn tolerance() -> Self {
        1e-9
    }

    fn render(&self) -> String {
        format!("{self}")
    }

    fn to_rational(&self) -> Option<Rational> {
        Rational::from_float(*self)
    }

    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn ratio(num: i64, den: i64) -> Self {
        num as f32 / den as f32
    }

    fn tolerance() -> Self {
        1e-5
    }

    fn render(&self) -> String {
        format!("{self}")
    }

    fn to_rational(&self) -> Option<Rational> {
        Rational::from_float(*self)
    }

    fn from_rational(r: &Rational) -> Self {
        r.to_f32().unwrap_or(f32::NAN)
    }
}

trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp(&self) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalParseError {
    #[error("empty rational string")]
    Empty,
    #[error("malformed rational {0:?}: expected \"num/den\" or an integer")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

/// Canonical text form: lowest terms, positive denominator, always `num/den`.
pub fn format_rational(r: &Rational) -> String {
    // BigRational is kept reduced with a positive denominator.
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational, RationalParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(RationalParseError::Empty);
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| RationalParseError::Malformed(s.to_string()))?;
    let den = BigInt::from_str(den).map_err(|_| RationalParseError::Malformed(s.to_string()))?;
    if den.is_zero() {
        return Err(RationalParseError::ZeroDenominator(s.to_string()));
    }
    Ok(BigRational::new(num, den))
}

/// Decimal rendering with exactly `digits` places after the point, rounded
/// half away from zero.
pub fn rational_to_decimal(r: &Rational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = r * BigRational::from_integer(scale.clone());
    let neg = scaled.is_negative();
    let abs = scaled.abs();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let rounded = (abs + half).floor().to_integer();
    let int_part = &rounded / &scale;
    let frac_part = &rounded % &scale;
    let sign = if neg && !rounded.is_zero() { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = digits)
    }
}

/// Plain-notation rendering of a float with `sig` significant digits.
pub fn format_significant(x: f64, sig: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return format!("{:.*}", sig.saturating_sub(1), 0.0);
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (sig as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Serde adapters rendering rationals as `"num/den"` strings.
pub mod serde_rational {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for any [`Scalar`] field, using [`Scalar::render`].
pub mod serde_scalar {
    use super::Scalar;
    use serde::ser::SerializeSeq;
    use serde::Serializer;

    pub fn serialize<T: Scalar, S: Serializer>(x: &T, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.render())
    }

    pub fn serialize_seq<T: Scalar, S: Serializer>(xs: &[T], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&x.render())?;
        }
        seq.end()
    }
}
