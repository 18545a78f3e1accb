//! Dual-mode scalars.
//!
//! Every geometric computation in this crate is generic over [`Scalar`]. Two
//! implementations exist:
//!
//! * [`BigRational`]: exact rational arithmetic. Used whenever the slope and
//!   all inputs are rational; comparisons are exact.
//! * [`Approx`]: an `f64` midpoint carrying a rigorous bound on its accumulated
//!   error. Comparisons through [`Scalar::tcmp`] report `Equal` whenever the two
//!   error balls overlap, so decisions are never made below the noise floor.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Numeric field used by all maps, points and chains.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `true` for exact rational arithmetic.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// Converts an `f64` without loss (every finite double is a dyadic rational).
    fn from_f64(x: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// Upper bound on `|self - true value|`; zero in exact mode.
    fn error_bound(&self) -> f64;

    /// Parses `p/q`, an integer, or a decimal with optional exponent.
    fn parse_str(s: &str) -> Result<Self>;

    /// Comparison that treats values whose error balls overlap as equal.
    fn tcmp(&self, other: &Self) -> Ordering;

    /// Nearest double with an error bound covering the conversion.
    fn to_approx(&self) -> Approx {
        let v = self.to_f64();
        Approx::new(
            v,
            self.error_bound() + v.abs() * f64::EPSILON + f64::MIN_POSITIVE,
        )
    }

    fn zero() -> Self {
        Self::from_ratio(0, 1)
    }

    fn one() -> Self {
        Self::from_ratio(1, 1)
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }

    fn teq(&self, other: &Self) -> bool {
        self.tcmp(other) == Ordering::Equal
    }

    fn tlt(&self, other: &Self) -> bool {
        self.tcmp(other) == Ordering::Less
    }

    fn tle(&self, other: &Self) -> bool {
        self.tcmp(other) != Ordering::Greater
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn pow(&self, exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

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
}

/// Parses an exact rational from `p/q`, an integer, or a decimal literal such
/// as `-1.25e-3`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a number: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..].parse().map_err(|_| bad())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(if all_digits.is_empty() {
        "0"
    } else {
        &all_digits
    })
    .map_err(|_| bad())?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite float")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn error_bound(&self) -> f64 {
        0.0
    }

    fn parse_str(s: &str) -> Result<Self> {
        parse_rational(s)
    }

    fn tcmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

/// A double-precision value with a rigorous accumulated error bound.
///
/// Equality and ordering look at the midpoint only; use [`Scalar::tcmp`] for
/// error-aware decisions.
#[derive(Clone, Copy, Debug)]
pub struct Approx {
    value: f64,
    err: f64,
}

fn rounding(v: f64) -> f64 {
    v.abs() * f64::EPSILON + f64::MIN_POSITIVE
}

impl Approx {
    pub fn new(value: f64, err: f64) -> Self {
        Approx {
            value,
            err: err.abs(),
        }
    }

    /// An exactly known double.
    pub fn exact(value: f64) -> Self {
        Approx { value, err: 0.0 }
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

impl PartialEq for Approx {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl PartialOrd for Approx {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

impl fmt::Display for Approx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.value, f)
    }
}

impl Add for Approx {
    type Output = Approx;
    fn add(self, rhs: Approx) -> Approx {
        let value = self.value + rhs.value;
        Approx {
            value,
            err: self.err + rhs.err + rounding(value),
        }
    }
}

impl Sub for Approx {
    type Output = Approx;
    fn sub(self, rhs: Approx) -> Approx {
        let value = self.value - rhs.value;
        Approx {
            value,
            err: self.err + rhs.err + rounding(value),
        }
    }
}

impl Mul for Approx {
    type Output = Approx;
    fn mul(self, rhs: Approx) -> Approx {
        let value = self.value * rhs.value;
        let err = self.value.abs() * rhs.err + rhs.value.abs() * self.err + self.err * rhs.err;
        Approx {
            value,
            err: err + rounding(value),
        }
    }
}

impl Div for Approx {
    type Output = Approx;
    fn div(self, rhs: Approx) -> Approx {
        let value = self.value / rhs.value;
        let margin = rhs.value.abs() - rhs.err;
        let err = if margin > 0.0 {
            (self.err + value.abs() * rhs.err) / margin
        } else {
            f64::INFINITY
        };
        Approx {
            value,
            err: err + rounding(value),
        }
    }
}

impl Neg for Approx {
    type Output = Approx;
    fn neg(self) -> Approx {
        Approx {
            value: -self.value,
            err: self.err,
        }
    }
}

impl Scalar for Approx {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        let value = num as f64 / den as f64;
        let exact = den.unsigned_abs().is_power_of_two() && num.unsigned_abs() < (1u64 << 53);
        Approx {
            value,
            err: if exact { 0.0 } else { rounding(value) },
        }
    }

    fn from_f64(x: f64) -> Self {
        Approx::exact(x)
    }

    fn to_f64(&self) -> f64 {
        self.value
    }

    fn error_bound(&self) -> f64 {
        self.err
    }

    fn parse_str(s: &str) -> Result<Self> {
        let exact = parse_rational(s)?;
        let value = ToPrimitive::to_f64(&exact).unwrap_or(f64::NAN);
        if !value.is_finite() {
            return Err(Error::Parse(format!("not representable as f64: {s:?}")));
        }
        let represented = BigRational::from_float(value).expect("finite float");
        let err =
            ToPrimitive::to_f64(&Signed::abs(&(exact - represented))).unwrap_or(f64::INFINITY);
        // The conversion error is itself rounded; widen by one ulp of it.
        let err = if err == 0.0 {
            0.0
        } else {
            err * (1.0 + f64::EPSILON) + f64::MIN_POSITIVE
        };
        Ok(Approx { value, err })
    }

    fn tcmp(&self, other: &Self) -> Ordering {
        let diff = self.value - other.value;
        if diff.abs() <= self.err + other.err {
            Ordering::Equal
        } else if diff < 0.0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    fn abs(&self) -> Self {
        Approx {
            value: self.value.abs(),
            err: self.err,
        }
    }
}
