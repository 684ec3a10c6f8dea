//! Exact rational values.
//!
//! Every real quantity in the crate (digit-string values, fixed points,
//! distances, interval endpoints, Lipschitz constants) is carried as an
//! [`ExactValue`], so strict inequalities such as `|x - x*| < r^-D` are
//! decided without rounding.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseValueError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Arbitrary-precision rational in lowest terms with a positive denominator.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactValue(BigRational);

impl ExactValue {
    /// Builds `num/den`. Returns `None` for a zero denominator.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Option<Self> {
        let den = den.into();
        if den.is_zero() {
            return None;
        }
        Some(ExactValue(BigRational::new(num.into(), den)))
    }

    /// `num/den` for small literals; panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::new(num, den).expect("zero denominator")
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        ExactValue(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        ExactValue(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactValue(BigRational::one())
    }

    /// `radix^exp` for any signed exponent.
    pub fn radix_pow(radix: u32, exp: i64) -> Self {
        let base = BigInt::from(radix);
        let mag = num_traits::pow(base, exp.unsigned_abs() as usize);
        if exp >= 0 {
            ExactValue::from_integer(mag)
        } else {
            ExactValue(BigRational::new(BigInt::one(), mag))
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        ExactValue(self.0.abs())
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        match self.0.cmp(&BigRational::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn floor(&self) -> BigInt {
        self.0.numer().div_floor(self.0.denom())
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(ExactValue(self.0.recip()))
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        ExactValue(num_traits::pow(self.0.clone(), exp as usize))
    }

    /// Nearest multiple of `step` (> 0); exact ties go toward zero.
    pub fn round_to_multiple(&self, step: &ExactValue) -> ExactValue {
        assert!(step.signum() > 0, "rounding step must be positive");
        let q = &self.0 / &step.0;
        let fl = q.numer().div_floor(q.denom());
        let frac = &q - BigRational::from_integer(fl.clone());
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let k = match frac.cmp(&half) {
            Ordering::Less => fl,
            Ordering::Greater => fl + 1,
            // candidates fl and fl+1; pick the one closer to zero
            Ordering::Equal => {
                if fl.is_negative() {
                    fl + 1
                } else {
                    fl
                }
            }
        };
        ExactValue(BigRational::from_integer(k) * &step.0)
    }

    /// Minimal `f >= 0` with `self * radix^f` an integer, if one exists.
    ///
    /// That is the number of fractional radix-`radix` digits needed to write
    /// the value exactly; `None` when the expansion does not terminate.
    pub fn radix_fraction_digits(&self, radix: u32) -> Option<u64> {
        let mut den = self.denom().clone();
        let r = BigInt::from(radix);
        let mut count = 0u64;
        while !den.is_one() {
            let g = den.gcd(&r);
            if g.is_one() {
                return None;
            }
            // multiplying the value by r turns den into den / gcd(den, r)
            den = &den / &g;
            count += 1;
        }
        Some(count)
    }

    /// Decimal string if the value has a terminating decimal expansion,
    /// otherwise the `num/den` form.
    pub fn to_decimal_string(&self) -> String {
        match self.radix_fraction_digits(10) {
            None => self.to_string(),
            Some(places) => {
                let scaled = &self.0 * BigRational::from_integer(num_traits::pow(BigInt::from(10), places as usize));
                let n = scaled.to_integer();
                let neg = n.is_negative();
                let digits = n.abs().to_string();
                let places = places as usize;
                let body = if places == 0 {
                    format!("{digits}.0")
                } else if digits.len() > places {
                    let (i, f) = digits.split_at(digits.len() - places);
                    format!("{i}.{f}")
                } else {
                    format!("0.{}{}", "0".repeat(places - digits.len()), digits)
                };
                if neg {
                    format!("-{body}")
                } else {
                    body
                }
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_big_rational(self) -> BigRational {
        self.0
    }
}

impl From<BigRational> for ExactValue {
    fn from(r: BigRational) -> Self {
        ExactValue(r)
    }
}

impl From<i64> for ExactValue {
    fn from(n: i64) -> Self {
        ExactValue::from_integer(n)
    }
}

impl From<i32> for ExactValue {
    fn from(n: i32) -> Self {
        ExactValue::from_integer(n)
    }
}

impl fmt::Display for ExactValue {
    /// Always `num/den`, including integers (`3/1`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for ExactValue {
    type Err = ParseValueError;

    /// Accepts `num/den`, plain integers, and decimal literals like `-0.125`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.is_empty() {
            return Err(ParseValueError::Empty);
        }
        let bad = || ParseValueError::Invalid(t.to_string());
        if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            return ExactValue::new(n, d).ok_or_else(|| ParseValueError::ZeroDenominator(t.into()));
        }
        if let Some((int_part, frac_part)) = t.split_once('.') {
            let (neg, int_digits) = match int_part.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, int_part.strip_prefix('+').unwrap_or(int_part)),
            };
            let all_digits = |p: &str| p.chars().all(|c| c.is_ascii_digit());
            if !all_digits(int_digits) || !all_digits(frac_part) || (int_digits.is_empty() && frac_part.is_empty()) {
                return Err(bad());
            }
            let joined = format!("{int_digits}{frac_part}");
            let mag: BigInt = if joined.is_empty() { BigInt::zero() } else { joined.parse().map_err(|_| bad())? };
            let den = num_traits::pow(BigInt::from(10), frac_part.len());
            let v = ExactValue::new(if neg { -mag } else { mag }, den).ok_or_else(bad)?;
            return Ok(v);
        }
        let n: BigInt = t.parse().map_err(|_| bad())?;
        Ok(ExactValue::from_integer(n))
    }
}

impl Serialize for ExactValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(n) => Ok(ExactValue::from_integer(n)),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<ExactValue> for ExactValue {
            type Output = ExactValue;
            fn $method(self, rhs: ExactValue) -> ExactValue {
                ExactValue(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a ExactValue> for ExactValue {
            type Output = ExactValue;
            fn $method(self, rhs: &'a ExactValue) -> ExactValue {
                ExactValue(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $trait<ExactValue> for &'a ExactValue {
            type Output = ExactValue;
            fn $method(self, rhs: ExactValue) -> ExactValue {
                ExactValue((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b ExactValue> for &'a ExactValue {
            type Output = ExactValue;
            fn $method(self, rhs: &'b ExactValue) -> ExactValue {
                ExactValue((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for ExactValue {
    type Output = ExactValue;
    fn neg(self) -> ExactValue {
        ExactValue(-self.0)
    }
}

impl Neg for &ExactValue {
    type Output = ExactValue;
    fn neg(self) -> ExactValue {
        ExactValue(-&self.0)
    }
}

impl std::iter::Sum for ExactValue {
    fn sum<I: Iterator<Item = ExactValue>>(iter: I) -> Self {
        iter.fold(ExactValue::zero(), |a, b| a + b)
    }
}

/// Infinity norm of the componentwise difference `a - b`.
///
/// Panics if the slices have different lengths.
pub fn inf_norm_diff(a: &[ExactValue], b: &[ExactValue]) -> ExactValue {
    assert_eq!(a.len(), b.len(), "vector length mismatch");
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).max().unwrap_or_else(ExactValue::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> ExactValue {
        s.parse().unwrap()
    }

    #[test]
    fn parses_all_literal_forms() {
        assert_eq!(v("3/4"), ExactValue::ratio(3, 4));
        assert_eq!(v("-6/8"), ExactValue::ratio(-3, 4));
        assert_eq!(v("0.125"), ExactValue::ratio(1, 8));
        assert_eq!(v("-1.5"), ExactValue::ratio(-3, 2));
        assert_eq!(v(".5"), ExactValue::ratio(1, 2));
        assert_eq!(v("7"), ExactValue::from_integer(7));
        assert!("1/0".parse::<ExactValue>().is_err());
        assert!("abc".parse::<ExactValue>().is_err());
        assert!(".".parse::<ExactValue>().is_err());
        assert!("".parse::<ExactValue>().is_err());
    }

    #[test]
    fn display_is_num_over_den() {
        assert_eq!(ExactValue::ratio(2, 4).to_string(), "1/2");
        assert_eq!(ExactValue::from_integer(3).to_string(), "3/1");
        assert_eq!(ExactValue::ratio(-1, 3).to_string(), "-1/3");
    }

    #[test]
    fn serde_uses_strings() {
        let x = ExactValue::ratio(-15, 32);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, "\"-15/32\"");
        let back: ExactValue = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        let int: ExactValue = serde_json::from_str("4").unwrap();
        assert_eq!(int, ExactValue::from_integer(4));
    }

    #[test]
    fn radix_powers() {
        assert_eq!(ExactValue::radix_pow(2, -3), ExactValue::ratio(1, 8));
        assert_eq!(ExactValue::radix_pow(10, 2), ExactValue::from_integer(100));
        assert_eq!(ExactValue::radix_pow(3, 0), ExactValue::one());
    }

    #[test]
    fn rounding_ties_go_toward_zero() {
        let step = ExactValue::ratio(1, 4);
        assert_eq!(ExactValue::ratio(3, 8).round_to_multiple(&step), ExactValue::ratio(1, 4));
        assert_eq!(ExactValue::ratio(-3, 8).round_to_multiple(&step), ExactValue::ratio(-1, 4));
        assert_eq!(ExactValue::ratio(5, 16).round_to_multiple(&step), ExactValue::ratio(1, 4));
        assert_eq!(ExactValue::ratio(7, 16).round_to_multiple(&step), ExactValue::ratio(1, 2));
        assert_eq!(ExactValue::ratio(-7, 16).round_to_multiple(&step), ExactValue::ratio(-1, 2));
    }

    #[test]
    fn fraction_digit_counts() {
        assert_eq!(ExactValue::ratio(1, 8).radix_fraction_digits(2), Some(3));
        assert_eq!(ExactValue::ratio(3, 1).radix_fraction_digits(2), Some(0));
        assert_eq!(ExactValue::ratio(1, 3).radix_fraction_digits(2), None);
        assert_eq!(ExactValue::ratio(1, 8).radix_fraction_digits(10), Some(3));
        assert_eq!(ExactValue::ratio(1, 12).radix_fraction_digits(6), Some(2));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(ExactValue::ratio(33, 64).to_decimal_string(), "0.515625");
        assert_eq!(ExactValue::from_integer(1).to_decimal_string(), "1.0");
        assert_eq!(ExactValue::ratio(-3, 2).to_decimal_string(), "-1.5");
        assert_eq!(ExactValue::ratio(1, 3).to_decimal_string(), "1/3");
    }

    #[test]
    fn inf_norm_picks_largest_component() {
        let a = [ExactValue::ratio(3, 4), ExactValue::ratio(2, 5)];
        let b = [ExactValue::ratio(1, 2), ExactValue::ratio(1, 2)];
        assert_eq!(inf_norm_diff(&a, &b), ExactValue::ratio(1, 4));
    }
}
