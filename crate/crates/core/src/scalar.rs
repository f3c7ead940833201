//! Numeric scalars.
//!
//! Everything in the crate is generic over [`Scalar`]. Two implementations
//! ship: [`Rational`], an exact arbitrary-precision fraction (the default, and
//! the only mode in which "= 0" and "≥ 0" verdicts are exact), and [`Float`],
//! an `f64` whose comparisons all go through one absolute tolerance
//! ([`FLOAT_TOLERANCE`]).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Tolerance applied to every comparison in float mode.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// Environment variable selecting the numeric mode of the command-line tool.
pub const NUMERIC_MODE_ENV: &str = "PMSEP_NUMERIC";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NumericMode {
    Rational,
    Float,
}

impl NumericMode {
    /// Reads [`NUMERIC_MODE_ENV`]; unset means rational.
    pub fn from_env() -> Result<Self, ParseScalarError> {
        match std::env::var(NUMERIC_MODE_ENV) {
            Err(_) => Ok(NumericMode::Rational),
            Ok(v) => v.parse(),
        }
    }
}

impl std::str::FromStr for NumericMode {
    type Err = ParseScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "" | "rational" | "exact" => Ok(NumericMode::Rational),
            "float" | "f64" => Ok(NumericMode::Float),
            _ => Err(ParseScalarError::new(s)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse `{input}` as a number")]
pub struct ParseScalarError {
    pub input: String,
}

impl ParseScalarError {
    fn new(input: &str) -> Self {
        ParseScalarError {
            input: input.to_string(),
        }
    }
}

/// Ordered field used throughout the crate.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + AddAssign
    + SubAssign
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
{
    const MODE: NumericMode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_integer(n: i64) -> Self;
    /// `num / den`; panics when `den == 0`.
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Accepts `"p/q"`, integers and decimals (`"-0.25"`, `"1e-3"`).
    fn parse_str(s: &str) -> Result<Self, ParseScalarError>;
    fn to_f64(&self) -> f64;
    /// Authoritative text form: `"p/q"` for rationals, shortest round-trip
    /// decimal for floats.
    fn exact_string(&self) -> String;
    /// Sign, with zero decided by the mode's comparison rule.
    fn sign(&self) -> Ordering;

    fn compare(&self, other: &Self) -> Ordering {
        (self.clone() - other).sign()
    }

    fn is_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }

    fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }

    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Multiplies a row by a positive constant so that every entry is an
    /// integer (used when exporting programs). Floats are returned unchanged.
    fn scale_to_integers(row: &[Self]) -> Vec<Self> {
        row.to_vec()
    }
}

pub fn max<S: Scalar>(a: S, b: S) -> S {
    if a.compare(&b) == Ordering::Less {
        b
    } else {
        a
    }
}

pub fn min<S: Scalar>(a: S, b: S) -> S {
    if b.compare(&a) == Ordering::Less {
        b
    } else {
        a
    }
}

pub fn sum<'a, S: Scalar, I: IntoIterator<Item = &'a S>>(items: I) -> S {
    items.into_iter().fold(S::zero(), |acc, x| acc + x)
}

// ---------------------------------------------------------------------------
// Rational
// ---------------------------------------------------------------------------

/// Exact fraction in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: BigInt, den: BigInt) -> Self {
        Rational(BigRational::new(num, den))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

macro_rules! forward_binop {
    ($ty:ident, $tr:ident, $method:ident, $op:tt) => {
        impl $tr for $ty {
            type Output = $ty;
            #[inline]
            fn $method(self, rhs: $ty) -> $ty {
                $ty(self.0 $op rhs.0)
            }
        }
        impl<'a> $tr<&'a $ty> for $ty {
            type Output = $ty;
            #[inline]
            fn $method(self, rhs: &'a $ty) -> $ty {
                $ty(self.0 $op &rhs.0)
            }
        }
        impl<'a, 'b> $tr<&'b $ty> for &'a $ty {
            type Output = $ty;
            #[inline]
            fn $method(self, rhs: &'b $ty) -> $ty {
                $ty(&self.0 $op &rhs.0)
            }
        }
    };
}

forward_binop!(Rational, Add, add, +);
forward_binop!(Rational, Sub, sub, -);
forward_binop!(Rational, Mul, mul, *);
forward_binop!(Rational, Div, div, /);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl<'a> AddAssign<&'a Rational> for Rational {
    fn add_assign(&mut self, rhs: &'a Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        self.0 -= rhs.0;
    }
}

impl<'a> SubAssign<&'a Rational> for Rational {
    fn sub_assign(&mut self, rhs: &'a Rational) {
        self.0 -= &rhs.0;
    }
}

fn parse_bigint(s: &str) -> Option<BigInt> {
    let t = s.trim();
    let t = t.strip_prefix('+').unwrap_or(t);
    if t.is_empty() {
        return None;
    }
    t.parse::<BigInt>().ok()
}

/// Parses a decimal literal (optional sign, fraction and exponent) exactly.
fn parse_decimal(s: &str) -> Option<BigRational> {
    let t = s.trim();
    let (negative, t) = match t.as_bytes().first()? {
        b'-' => (true, &t[1..]),
        b'+' => (false, &t[1..]),
        _ => (false, t),
    };
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    if negative {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

fn parse_rational(s: &str) -> Result<BigRational, ParseScalarError> {
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p = parse_bigint(p).ok_or_else(|| ParseScalarError::new(s))?;
        let q = parse_bigint(q).ok_or_else(|| ParseScalarError::new(s))?;
        if q.is_zero() {
            return Err(ParseScalarError::new(s));
        }
        Ok(BigRational::new(p, q))
    } else {
        parse_decimal(t).ok_or_else(|| ParseScalarError::new(s))
    }
}

impl Scalar for Rational {
    const MODE: NumericMode = NumericMode::Rational;

    fn zero() -> Self {
        Rational(BigRational::zero())
    }

    fn one() -> Self {
        Rational(BigRational::one())
    }

    fn from_integer(n: i64) -> Self {
        Rational::from(n)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    fn parse_str(s: &str) -> Result<Self, ParseScalarError> {
        parse_rational(s).map(Rational)
    }

    fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    fn exact_string(&self) -> String {
        self.to_string()
    }

    fn sign(&self) -> Ordering {
        if self.0.is_zero() {
            Ordering::Equal
        } else if self.0.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    fn compare(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    fn scale_to_integers(row: &[Self]) -> Vec<Self> {
        let lcm = row
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.0.denom()));
        let factor = BigRational::from_integer(lcm);
        row.iter().map(|x| Rational(&x.0 * &factor)).collect()
    }
}

// ---------------------------------------------------------------------------
// Float
// ---------------------------------------------------------------------------

/// `f64` scalar whose comparisons treat `|x| <= FLOAT_TOLERANCE` as zero.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Float(pub f64);

impl Float {
    #[inline]
    fn checked(v: f64) -> Float {
        debug_assert!(v.is_finite(), "non-finite float scalar");
        Float(v)
    }
}

impl fmt::Display for Float {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

macro_rules! float_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr for Float {
            type Output = Float;
            #[inline]
            fn $method(self, rhs: Float) -> Float {
                Float::checked(self.0 $op rhs.0)
            }
        }
        impl<'a> $tr<&'a Float> for Float {
            type Output = Float;
            #[inline]
            fn $method(self, rhs: &'a Float) -> Float {
                Float::checked(self.0 $op rhs.0)
            }
        }
        impl<'a, 'b> $tr<&'b Float> for &'a Float {
            type Output = Float;
            #[inline]
            fn $method(self, rhs: &'b Float) -> Float {
                Float::checked(self.0 $op rhs.0)
            }
        }
    };
}

float_binop!(Add, add, +);
float_binop!(Sub, sub, -);
float_binop!(Mul, mul, *);
float_binop!(Div, div, /);

impl Neg for Float {
    type Output = Float;
    fn neg(self) -> Float {
        Float(-self.0)
    }
}

impl AddAssign for Float {
    fn add_assign(&mut self, rhs: Float) {
        self.0 += rhs.0;
    }
}

impl<'a> AddAssign<&'a Float> for Float {
    fn add_assign(&mut self, rhs: &'a Float) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Float {
    fn sub_assign(&mut self, rhs: Float) {
        self.0 -= rhs.0;
    }
}

impl<'a> SubAssign<&'a Float> for Float {
    fn sub_assign(&mut self, rhs: &'a Float) {
        self.0 -= rhs.0;
    }
}

impl Scalar for Float {
    const MODE: NumericMode = NumericMode::Float;

    fn zero() -> Self {
        Float(0.0)
    }

    fn one() -> Self {
        Float(1.0)
    }

    fn from_integer(n: i64) -> Self {
        Float(n as f64)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Float(num as f64 / den as f64)
    }

    fn parse_str(s: &str) -> Result<Self, ParseScalarError> {
        let r = parse_rational(s)?;
        r.to_f64()
            .filter(|v| v.is_finite())
            .map(Float)
            .ok_or_else(|| ParseScalarError::new(s))
    }

    fn to_f64(&self) -> f64 {
        self.0
    }

    fn exact_string(&self) -> String {
        format!("{:?}", self.0)
    }

    fn sign(&self) -> Ordering {
        if self.0.abs() <= FLOAT_TOLERANCE {
            Ordering::Equal
        } else if self.0 > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    fn abs(&self) -> Self {
        Float(self.0.abs())
    }
}
