//! Symmetric signed-digit numbers.
//!
//! A [`SignedDigitNumber`] is a finite radix-`r` digit string `d1 d2 ... dn`
//! whose first digit has weight `r^e`, with every digit drawn from the
//! symmetric set `{-g, ..., g}` described by a [`DigitSet`]. Values are exact
//! rationals.
//!
//! For the maximally redundant digit set (`g = r - 1`) the values reachable by
//! appending digits to a number with `D` fractional digits fill the open
//! interval `(x - r^-D, x + r^-D)`. [`SignedDigitNumber::representation_interval`]
//! returns that interval and [`SignedDigitNumber::append_digits`] walks into
//! it with a deterministic greedy digit selection.

mod format;

pub use format::{ParseSdError, SdJson};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::ExactValue;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SdError {
    #[error("radix must be at least 2, got {0}")]
    InvalidRadix(u32),
    #[error("digit bound {gamma} outside [{min}, {max}] for radix {radix}")]
    InvalidGamma { radix: u32, gamma: u32, min: u32, max: u32 },
    #[error("digit {digit} at position {position} exceeds the digit bound {gamma}")]
    DigitOutOfRange { position: usize, digit: i32, gamma: u32 },
    #[error("a signed-digit number needs at least one digit")]
    EmptyDigits,
    #[error("{len} digits cannot reach the units position for msd exponent {msd_exponent}")]
    MissingUnitsDigit { len: usize, msd_exponent: i64 },
    #[error("digit set r={radix} g={gamma} is not maximally redundant")]
    NotMaximallyRedundant { radix: u32, gamma: u32 },
    #[error("target {target} lies outside the representation interval ({}, {})", .interval.lo(), .interval.hi())]
    TargetOutsideInterval { target: Box<ExactValue>, interval: Box<OpenInterval> },
    #[error("digit strings differ in digit set or msd exponent")]
    MismatchedFormat,
    #[error("at least one digit must be appended")]
    NoDigitsRequested,
}

/// The digit set `{-gamma, ..., gamma}` of a radix-`radix` representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDigitSet")]
pub struct DigitSet {
    radix: u32,
    gamma: u32,
}

#[derive(Deserialize)]
struct RawDigitSet {
    radix: u32,
    gamma: u32,
}

impl TryFrom<RawDigitSet> for DigitSet {
    type Error = SdError;
    fn try_from(raw: RawDigitSet) -> Result<Self, SdError> {
        DigitSet::new(raw.radix, raw.gamma)
    }
}

impl DigitSet {
    /// Requires `radix >= 2` and `ceil(radix/2) <= gamma <= radix - 1`.
    pub fn new(radix: u32, gamma: u32) -> Result<Self, SdError> {
        if radix < 2 || radix > i32::MAX as u32 {
            return Err(SdError::InvalidRadix(radix));
        }
        let min = radix.div_ceil(2);
        let max = radix - 1;
        if gamma < min || gamma > max {
            return Err(SdError::InvalidGamma { radix, gamma, min, max });
        }
        Ok(DigitSet { radix, gamma })
    }

    /// The maximally redundant set `{-(r-1), ..., r-1}`.
    pub fn maximal(radix: u32) -> Result<Self, SdError> {
        DigitSet::new(radix, radix.saturating_sub(1))
    }

    pub fn radix(&self) -> u32 {
        self.radix
    }

    pub fn gamma(&self) -> u32 {
        self.gamma
    }

    pub fn is_maximally_redundant(&self) -> bool {
        self.gamma == self.radix - 1
    }

    pub fn contains(&self, digit: i32) -> bool {
        digit.unsigned_abs() <= self.gamma
    }

    pub(crate) fn require_maximal(&self) -> Result<(), SdError> {
        if self.is_maximally_redundant() {
            Ok(())
        } else {
            Err(SdError::NotMaximallyRedundant { radix: self.radix, gamma: self.gamma })
        }
    }
}

/// Open interval `(lo, hi)` with exact endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenInterval {
    lo: ExactValue,
    hi: ExactValue,
}

impl OpenInterval {
    /// `None` unless `lo < hi`.
    pub fn new(lo: ExactValue, hi: ExactValue) -> Option<Self> {
        (lo < hi).then_some(OpenInterval { lo, hi })
    }

    /// `(center - radius, center + radius)`; `None` for a non-positive radius.
    pub fn centered(center: &ExactValue, radius: &ExactValue) -> Option<Self> {
        OpenInterval::new(center - radius, center + radius)
    }

    pub fn lo(&self) -> &ExactValue {
        &self.lo
    }

    pub fn hi(&self) -> &ExactValue {
        &self.hi
    }

    /// Strict on both ends.
    pub fn contains(&self, x: &ExactValue) -> bool {
        &self.lo < x && x < &self.hi
    }
}

/// Finite signed-digit string with an explicit leading-weight exponent.
///
/// The value is `sum_i d_i * r^(e - i + 1)` for `i = 1..=n`. Construction
/// enforces that the digits reach at least the units position, so the number
/// of fractional digits `D = n - e - 1` is never negative.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedDigitNumber {
    digit_set: DigitSet,
    msd_exponent: i64,
    digits: Vec<i32>,
}

impl SignedDigitNumber {
    pub fn new(digit_set: DigitSet, msd_exponent: i64, digits: Vec<i32>) -> Result<Self, SdError> {
        if digits.is_empty() {
            return Err(SdError::EmptyDigits);
        }
        if let Some((position, &digit)) = digits.iter().enumerate().find(|(_, d)| !digit_set.contains(**d)) {
            return Err(SdError::DigitOutOfRange { position, digit, gamma: digit_set.gamma });
        }
        if (digits.len() as i64) < msd_exponent + 1 {
            return Err(SdError::MissingUnitsDigit { len: digits.len(), msd_exponent });
        }
        Ok(SignedDigitNumber { digit_set, msd_exponent, digits })
    }

    pub fn digit_set(&self) -> DigitSet {
        self.digit_set
    }

    pub fn radix(&self) -> u32 {
        self.digit_set.radix
    }

    pub fn msd_exponent(&self) -> i64 {
        self.msd_exponent
    }

    pub fn digits(&self) -> &[i32] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Number of digits after the radix point, i.e. the `D` of `r^-D`.
    pub fn frac_digit_count(&self) -> u64 {
        (self.digits.len() as i64 - self.msd_exponent - 1) as u64
    }

    /// Exponent of the last digit's weight, `e - n + 1 = -D`.
    fn lsd_exponent(&self) -> i64 {
        -(self.frac_digit_count() as i64)
    }

    /// Exact value `sum_i d_i r^(e-i+1)`.
    pub fn value(&self) -> ExactValue {
        let r = BigInt::from(self.radix());
        let scaled = self.digits.iter().fold(BigInt::zero(), |acc, &d| acc * &r + BigInt::from(d));
        ExactValue::from_integer(scaled) * ExactValue::radix_pow(self.radix(), self.lsd_exponent())
    }

    /// `(x - r^-D, x + r^-D)`: every value reachable by appending digits.
    pub fn representation_interval(&self) -> Result<OpenInterval, SdError> {
        self.digit_set.require_maximal()?;
        let radius = ExactValue::radix_pow(self.radix(), self.lsd_exponent());
        Ok(OpenInterval::centered(&self.value(), &radius).expect("positive radius"))
    }

    /// Whether `target` is reachable exactly by appending `extra` digits.
    ///
    /// With `delta = target - x`, that holds iff `delta * r^(D+extra)` is an
    /// integer `m` with `|m| <= r^extra - 1`.
    pub fn exact_extension_exists(&self, target: &ExactValue, extra: u32) -> Result<bool, SdError> {
        self.digit_set.require_maximal()?;
        if extra == 0 {
            return Err(SdError::NoDigitsRequested);
        }
        let r = self.radix();
        let delta = target - self.value();
        let scaled = delta * ExactValue::radix_pow(r, self.frac_digit_count() as i64 + extra as i64);
        if !scaled.is_integer() {
            return Ok(false);
        }
        let limit = num_traits::pow(BigInt::from(r), extra as usize) - BigInt::one();
        Ok(scaled.numer().abs() <= limit)
    }

    /// Appends up to `max_extra` digits so the value moves onto (or as close
    /// as possible to) `target`, leaving every existing digit untouched.
    ///
    /// Digits are chosen greedily: at each new position of weight `w`, the
    /// digit minimising `|delta - d*w|` wins, ties going to the smaller `|d|`
    /// and then to the non-negative digit. At least one digit is appended;
    /// after that the walk stops as soon as the residual is exactly zero.
    /// If no exact extension fits, the result is within `r^-(D+max_extra)`
    /// of `target` and `target` stays inside its representation interval.
    pub fn append_digits(&self, target: &ExactValue, max_extra: u32) -> Result<SignedDigitNumber, SdError> {
        self.digit_set.require_maximal()?;
        if max_extra == 0 {
            return Err(SdError::NoDigitsRequested);
        }
        let interval = self.representation_interval()?;
        if !interval.contains(target) {
            return Err(SdError::TargetOutsideInterval {
                target: Box::new(target.clone()),
                interval: Box::new(interval),
            });
        }
        // residual measured in units of the first appended weight r^-(D+1)
        let scaled = (target - self.value()) * ExactValue::radix_pow(self.radix(), self.frac_digit_count() as i64 + 1);
        let mut tail = GreedyDigits::new(scaled, self.digit_set);
        let mut digits = self.digits.clone();
        digits.push(tail.next_digit());
        for _ in 1..max_extra {
            if tail.is_exact() {
                break;
            }
            digits.push(tail.next_digit());
        }
        Ok(SignedDigitNumber { digit_set: self.digit_set, msd_exponent: self.msd_exponent, digits })
    }

    /// Same value written with digits in `{0, ..., r-1}` carrying one overall
    /// sign (all digits non-positive for a negative value).
    ///
    /// The msd exponent and length are kept; the result is tagged with the
    /// maximally redundant digit set of the same radix, which contains every
    /// standard digit.
    pub fn to_nonredundant(&self) -> SignedDigitNumber {
        let r = self.radix();
        let rb = BigInt::from(r);
        let scaled = self.digits.iter().fold(BigInt::zero(), |acc, &d| acc * &rb + BigInt::from(d));
        let negative = scaled.is_negative();
        let mut mag = scaled.abs();
        let mut digits = vec![0i32; self.digits.len()];
        for slot in digits.iter_mut().rev() {
            let (q, rem) = mag.div_rem(&rb);
            let d = rem.to_i32().expect("digit fits in i32");
            *slot = if negative { -d } else { d };
            mag = q;
        }
        debug_assert!(mag.is_zero(), "magnitude below r^(e+1) always fits");
        SignedDigitNumber {
            digit_set: DigitSet::maximal(r).expect("radix already validated"),
            msd_exponent: self.msd_exponent,
            digits,
        }
    }

    /// Length of the longest common leading digit run.
    pub fn common_prefix_len(&self, other: &SignedDigitNumber) -> Result<usize, SdError> {
        if self.digit_set != other.digit_set || self.msd_exponent != other.msd_exponent {
            return Err(SdError::MismatchedFormat);
        }
        Ok(common_prefix(&self.digits, &other.digits))
    }

    /// Number made of the first `len` digits. `None` when that prefix would
    /// not reach the units position or `len` exceeds the length.
    pub fn prefix(&self, len: usize) -> Option<SignedDigitNumber> {
        if len > self.digits.len() || len == 0 || (len as i64) < self.msd_exponent + 1 {
            return None;
        }
        Some(SignedDigitNumber {
            digit_set: self.digit_set,
            msd_exponent: self.msd_exponent,
            digits: self.digits[..len].to_vec(),
        })
    }

    pub(crate) fn from_parts_unchecked(digit_set: DigitSet, msd_exponent: i64, digits: Vec<i32>) -> Self {
        debug_assert!(digits.iter().all(|d| digit_set.contains(*d)));
        SignedDigitNumber { digit_set, msd_exponent, digits }
    }
}

fn common_prefix(a: &[i32], b: &[i32]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Greedy digit choice for a residual expressed in units of the current
/// position's weight: the nearest integer to `scaled`, ties toward the smaller
/// magnitude, clamped to `[-gamma, gamma]`.
pub(crate) fn select_digit(scaled: &ExactValue, gamma: u32) -> i32 {
    let num = scaled.numer();
    let den = scaled.denom();
    let (fl, rem) = num.div_mod_floor(den);
    let twice: BigInt = rem * 2;
    let nearest = match twice.cmp(den) {
        std::cmp::Ordering::Less => fl,
        std::cmp::Ordering::Greater => fl + 1,
        // a tie sits between two integers of different magnitude
        std::cmp::Ordering::Equal if fl.is_negative() => fl + 1,
        std::cmp::Ordering::Equal => fl,
    };
    let g = BigInt::from(gamma);
    let clamped = if nearest > g {
        g
    } else if nearest < -&g {
        -g
    } else {
        nearest
    };
    clamped.to_i32().expect("gamma fits in i32")
}

/// Stream of greedy digits toward a target.
///
/// `scaled` is the remaining residual divided by the weight of the next
/// digit position; after emitting `d` it becomes `(scaled - d) * r`.
#[derive(Debug, Clone)]
pub(crate) struct GreedyDigits {
    scaled: ExactValue,
    gamma: u32,
    radix: ExactValue,
}

impl GreedyDigits {
    pub(crate) fn new(scaled: ExactValue, digit_set: DigitSet) -> Self {
        GreedyDigits { scaled, gamma: digit_set.gamma, radix: ExactValue::from_integer(digit_set.radix) }
    }

    pub(crate) fn is_exact(&self) -> bool {
        self.scaled.is_zero()
    }

    pub(crate) fn next_digit(&mut self) -> i32 {
        let d = select_digit(&self.scaled, self.gamma);
        self.scaled = (&self.scaled - ExactValue::from(d)) * &self.radix;
        d
    }
}
