//! Fejér monotonicity and stable most-significant digits.
//!
//! An [`IterateSequence`] is Fejér monotone with respect to its fixed point
//! when the infinity-norm distance to that point never increases. Once an
//! element sits within `r^-D` of the fixed point, every later element lies
//! in the open interval around the fixed point that a `D`-fractional-digit
//! redundant prefix can still reach, so the leading digits can be kept fixed
//! while later iterates only append digits. [`build_stable_trace`] builds
//! such a representation for every component and records how many leading
//! digits each element shares with all of its successors.

mod export;

pub use export::{trace_csv, trace_json, TraceRecord};

use thiserror::Error;

use crate::exact::{inf_norm_diff, ExactValue};
use crate::sdrep::{DigitSet, GreedyDigits, SdError, SignedDigitNumber};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StabilityError {
    #[error("an iterate sequence needs at least one iterate")]
    EmptySequence,
    #[error("vectors must have dimension >= 1")]
    ZeroDimension,
    #[error("iterate {index} has {found} components, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },
    #[error("sequence is not Fejér monotone: element {element} moves away from the fixed point")]
    NotFejerMonotone { element: usize },
    #[error("component {component} of iterate {iteration} needs more than {budget} digits to be represented exactly")]
    ExactRepresentationExceedsBudget { iteration: usize, component: usize, budget: usize },
    #[error("Lipschitz constant {0} is not below 1")]
    NotContractive(ExactValue),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Digits(#[from] SdError),
}

/// Ordered exact-valued vectors plus the point they are measured against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterateSequence {
    iterates: Vec<Vec<ExactValue>>,
    fixed_point: Vec<ExactValue>,
}

impl IterateSequence {
    pub fn new(iterates: Vec<Vec<ExactValue>>, fixed_point: Vec<ExactValue>) -> Result<Self, StabilityError> {
        if fixed_point.is_empty() {
            return Err(StabilityError::ZeroDimension);
        }
        if iterates.is_empty() {
            return Err(StabilityError::EmptySequence);
        }
        let m = fixed_point.len();
        if let Some((index, v)) = iterates.iter().enumerate().find(|(_, v)| v.len() != m) {
            return Err(StabilityError::DimensionMismatch { index, expected: m, found: v.len() });
        }
        Ok(IterateSequence { iterates, fixed_point })
    }

    /// One-dimensional sequence.
    pub fn from_scalars(values: Vec<ExactValue>, fixed_point: ExactValue) -> Result<Self, StabilityError> {
        IterateSequence::new(values.into_iter().map(|v| vec![v]).collect(), vec![fixed_point])
    }

    pub fn dimension(&self) -> usize {
        self.fixed_point.len()
    }

    pub fn len(&self) -> usize {
        self.iterates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterates.is_empty()
    }

    pub fn iterates(&self) -> &[Vec<ExactValue>] {
        &self.iterates
    }

    pub fn fixed_point(&self) -> &[ExactValue] {
        &self.fixed_point
    }

    pub(crate) fn push(&mut self, x: Vec<ExactValue>) {
        debug_assert_eq!(x.len(), self.dimension());
        self.iterates.push(x);
    }

    /// `||x^(k) - x||_inf` for every element.
    pub fn distances(&self) -> Vec<ExactValue> {
        self.iterates.iter().map(|x| inf_norm_diff(x, &self.fixed_point)).collect()
    }

    /// Values of one component across the sequence.
    pub fn component(&self, index: usize) -> Vec<ExactValue> {
        self.iterates.iter().map(|x| x[index].clone()).collect()
    }
}

/// 1-based element number of the first element that is farther from the
/// fixed point than its predecessor, if any.
pub fn fejer_violation(seq: &IterateSequence) -> Option<usize> {
    let d = seq.distances();
    d.windows(2).position(|w| w[1] > w[0]).map(|i| i + 2)
}

pub fn is_fejer_monotone(seq: &IterateSequence) -> bool {
    fejer_violation(seq).is_none()
}

/// How many fractional digits a distance pins down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum StableDigits {
    /// Distance is at least 1: not even `D = 0` satisfies `dist < r^-D`.
    Unresolved,
    /// Largest `D >= 0` with `dist < r^-D`.
    Digits(u64),
    /// Distance is zero, so every `D` qualifies.
    Unbounded,
}

impl StableDigits {
    pub fn count(self) -> Option<u64> {
        match self {
            StableDigits::Digits(d) => Some(d),
            _ => None,
        }
    }

    /// Whether `dist < r^-d` holds for this count.
    pub fn covers(self, d: u64) -> bool {
        match self {
            StableDigits::Unresolved => false,
            StableDigits::Digits(n) => d <= n,
            StableDigits::Unbounded => true,
        }
    }
}

/// Largest `D >= 0` with `||x_n - x_star||_inf < r^-D` (strict).
pub fn stable_digit_count(x_n: &[ExactValue], x_star: &[ExactValue], radix: u32) -> StableDigits {
    digits_below(&inf_norm_diff(x_n, x_star), radix)
}

pub(crate) fn digits_below(dist: &ExactValue, radix: u32) -> StableDigits {
    if dist.is_zero() {
        return StableDigits::Unbounded;
    }
    // dist < r^-D  <=>  num * r^D < den
    let num = dist.numer().clone();
    let den = dist.denom();
    if &num >= den {
        return StableDigits::Unresolved;
    }
    let mut d = 0u64;
    let mut scaled = num * radix;
    while &scaled < den {
        d += 1;
        scaled *= radix;
    }
    StableDigits::Digits(d)
}

/// Smallest `k` with `L^k / (1 - L) * ||x1 - x0||_inf < r^-D`.
///
/// This is the a-priori bound for a contraction with constant `L`; the
/// observed stabilisation index of a run can only be earlier.
pub fn predict_stability_index(
    lipschitz: &ExactValue,
    x0: &[ExactValue],
    x1: &[ExactValue],
    digits: u64,
    radix: u32,
) -> Result<u64, StabilityError> {
    if lipschitz >= &ExactValue::one() {
        return Err(StabilityError::NotContractive(lipschitz.clone()));
    }
    if lipschitz.is_negative() {
        return Err(StabilityError::InvalidArgument("Lipschitz constant must be non-negative".into()));
    }
    if digits == 0 {
        return Err(StabilityError::InvalidArgument("digit count must be at least 1".into()));
    }
    if x0.len() != x1.len() {
        return Err(StabilityError::DimensionMismatch { index: 1, expected: x0.len(), found: x1.len() });
    }
    let threshold = ExactValue::radix_pow(radix, -(digits as i64));
    let mut bound = inf_norm_diff(x1, x0) / (ExactValue::one() - lipschitz);
    let mut k = 0u64;
    while bound >= threshold {
        bound = bound * lipschitz;
        k += 1;
    }
    Ok(k)
}

/// Per-component digit representations of a sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitTrace {
    pub component_index: usize,
    pub representations: Vec<SignedDigitNumber>,
    /// Digits element `n` shares with every later element, reading missing
    /// trailing digits as zeros.
    pub stable_prefix: Vec<usize>,
    /// Infinity-norm distance of each full iterate to the fixed point.
    pub distances: Vec<ExactValue>,
    /// Whether a representation stops short of the iterate value.
    pub truncated: Vec<bool>,
}

impl DigitTrace {
    pub fn len(&self) -> usize {
        self.representations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representations.is_empty()
    }

    pub fn msd_exponent(&self) -> i64 {
        self.representations[0].msd_exponent()
    }

    /// Digits of weight at least `r^-d`.
    pub fn digits_through(&self, d: u64) -> usize {
        (self.msd_exponent() + 1) as usize + d as usize
    }

    /// First element whose digits of weight `>= r^-d` never change again.
    ///
    /// An element whose stable prefix reaches the longest representation in
    /// the trace agrees with every later element on all digits, so it counts
    /// for any `d`.
    pub fn first_stable_index(&self, d: u64) -> Option<usize> {
        let need = self.digits_through(d);
        let full = self.representations.iter().map(SignedDigitNumber::len).max().unwrap_or(0);
        self.stable_prefix.iter().position(|&s| s >= need || s >= full)
    }
}

/// Options for [`build_stable_trace_with`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceOptions {
    /// Maximum digits appended below the kept prefix for one element.
    pub max_digits_per_step: usize,
    /// Maximum digits of the fixed point's expansion used as anchor.
    pub max_anchor_digits: usize,
    /// Record truncated representations instead of failing.
    pub allow_truncation: bool,
}

impl TraceOptions {
    pub fn new(max_digits_per_step: usize) -> Self {
        TraceOptions { max_digits_per_step, max_anchor_digits: 4096, allow_truncation: false }
    }
}

/// [`build_stable_trace_with`] with default anchor length and strict
/// exactness.
pub fn build_stable_trace(
    seq: &IterateSequence,
    digit_set: DigitSet,
    max_digits_per_step: usize,
) -> Result<Vec<DigitTrace>, StabilityError> {
    build_stable_trace_with(seq, digit_set, &TraceOptions::new(max_digits_per_step))
}

/// Builds one [`DigitTrace`] per component of a Fejér monotone sequence.
///
/// Each component uses a single msd exponent (the smallest `e >= 0` with
/// every iterate and the fixed point below `r^(e+1)` in magnitude). The
/// first iterate is written greedily; the fixed point is then reached by
/// appending digits to the longest prefix of that string that stays within
/// `(1 - 1/r)` of the fixed point's interval radius at every level. That
/// string, followed by zeros once it ends, is the anchor. Every iterate
/// (including the first) keeps the longest anchor prefix whose
/// representation interval still contains it and appends greedy digits from
/// there.
///
/// When an element is within `r^-D` of the fixed point, all later elements
/// are too, so they keep at least the anchor digits of weight `>= r^-(D-1)`;
/// if the fixed point itself terminates within `D` fractional digits they
/// keep every digit of weight `>= r^-D`.
pub fn build_stable_trace_with(
    seq: &IterateSequence,
    digit_set: DigitSet,
    opts: &TraceOptions,
) -> Result<Vec<DigitTrace>, StabilityError> {
    digit_set.require_maximal()?;
    if let Some(element) = fejer_violation(seq) {
        return Err(StabilityError::NotFejerMonotone { element });
    }
    let distances = seq.distances();
    (0..seq.dimension())
        .map(|c| {
            let values = seq.component(c);
            let builder = ComponentBuilder::new(&values, &seq.fixed_point()[c], digit_set, opts);
            let mut representations = Vec::with_capacity(values.len());
            let mut truncated = Vec::with_capacity(values.len());
            for (iteration, v) in values.iter().enumerate() {
                let (rep, exact) = builder.represent(v);
                if !exact && !opts.allow_truncation {
                    return Err(StabilityError::ExactRepresentationExceedsBudget {
                        iteration,
                        component: c,
                        budget: opts.max_digits_per_step,
                    });
                }
                representations.push(rep);
                truncated.push(!exact);
            }
            let stable_prefix = stable_prefixes(&representations);
            Ok(DigitTrace {
                component_index: c,
                representations,
                stable_prefix,
                distances: distances.clone(),
                truncated,
            })
        })
        .collect()
}

/// `s[n] = min_{k > n} cpl(rep_n, rep_k)`, where digits past the end of a
/// representation count as zeros and the result is capped at the longest
/// representation in the trace (which is also the last element's value).
///
/// Common prefix length over zero-extended strings is an ultrametric, so the
/// running minimum of consecutive common prefixes gives the same value.
pub(crate) fn stable_prefixes(reps: &[SignedDigitNumber]) -> Vec<usize> {
    let cap = reps.iter().map(SignedDigitNumber::len).max().unwrap_or(0);
    let mut out = vec![cap; reps.len()];
    let mut running = cap;
    for n in (0..reps.len().saturating_sub(1)).rev() {
        running = running.min(zero_extended_prefix(reps[n].digits(), reps[n + 1].digits()));
        out[n] = running;
    }
    out
}

/// First position where the zero-extended strings differ, `usize::MAX` when
/// they never do.
fn zero_extended_prefix(a: &[i32], b: &[i32]) -> usize {
    let n = a.len().max(b.len());
    let at = |s: &[i32], i: usize| s.get(i).copied().unwrap_or(0);
    (0..n).find(|&i| at(a, i) != at(b, i)).unwrap_or(usize::MAX)
}

struct ComponentBuilder<'a> {
    digit_set: DigitSet,
    msd_exponent: i64,
    anchor: Vec<i32>,
    opts: &'a TraceOptions,
}

impl<'a> ComponentBuilder<'a> {
    fn new(values: &[ExactValue], fixed: &ExactValue, digit_set: DigitSet, opts: &'a TraceOptions) -> Self {
        let radix = digit_set.radix();
        let peak = values.iter().chain(std::iter::once(fixed)).map(ExactValue::abs).max().unwrap();
        let mut msd_exponent = 0i64;
        while peak >= ExactValue::radix_pow(radix, msd_exponent + 1) {
            msd_exponent += 1;
        }
        let mut builder = ComponentBuilder { digit_set, msd_exponent, anchor: Vec::new(), opts };

        // seed: the first iterate written greedily from scratch
        let (seed, _) = builder.extend(&[], &values[0], opts.max_anchor_digits);
        // keep the seed's digits while they stay well inside the fixed
        // point's interval at every level
        let bound = ExactValue::one() - ExactValue::ratio(1, radix as i64);
        let r = ExactValue::from_integer(radix);
        let mut scaled = fixed / ExactValue::radix_pow(radix, msd_exponent + 1);
        let mut keep = 0;
        for &d in &seed {
            let next = &scaled * &r - ExactValue::from(d);
            if next.abs() > bound {
                break;
            }
            scaled = next;
            keep += 1;
        }
        let mut greedy = GreedyDigits::new(&scaled * &r, digit_set);
        let mut anchor = seed[..keep].to_vec();
        while !greedy.is_exact() && anchor.len() < opts.max_anchor_digits {
            anchor.push(greedy.next_digit());
        }
        builder.anchor = anchor;
        builder
    }

    fn anchor_digit(&self, i: usize) -> i32 {
        self.anchor.get(i).copied().unwrap_or(0)
    }

    /// Greedy digits after `prefix` toward `target`; returns the digits
    /// (prefix included) and whether the value is exact.
    fn extend(&self, prefix: &[i32], target: &ExactValue, budget: usize) -> (Vec<i32>, bool) {
        let radix = self.digit_set.radix();
        let prefix_value = prefix_value(prefix, self.msd_exponent, radix);
        let next_exp = self.msd_exponent - prefix.len() as i64;
        let scaled = (target - prefix_value) / ExactValue::radix_pow(radix, next_exp);
        let mut greedy = GreedyDigits::new(scaled, self.digit_set);
        let mut digits = prefix.to_vec();
        let mut appended = 0;
        while !greedy.is_exact() && appended < budget {
            digits.push(greedy.next_digit());
            appended += 1;
        }
        (digits, greedy.is_exact())
    }

    fn represent(&self, target: &ExactValue) -> (SignedDigitNumber, bool) {
        let radix = self.digit_set.radix();
        let r = ExactValue::from_integer(radix);
        let one = ExactValue::one();
        // u = (target - anchor_prefix) / r^(e - p + 1); admitted iff |u| < 1
        let mut u = target / ExactValue::radix_pow(radix, self.msd_exponent + 1);
        let mut p = 0usize;
        let units = (self.msd_exponent + 1) as usize;
        loop {
            if u.is_zero() && p >= self.anchor.len() && p >= units {
                break;
            }
            if p >= self.opts.max_anchor_digits.max(units) {
                break;
            }
            let next = &u * &r - ExactValue::from(self.anchor_digit(p));
            if next.abs() >= one {
                break;
            }
            u = next;
            p += 1;
        }
        let prefix: Vec<i32> = (0..p).map(|i| self.anchor_digit(i)).collect();
        let (mut digits, exact) = self.extend(&prefix, target, self.opts.max_digits_per_step);
        if digits.len() < units {
            digits.resize(units, 0);
        }
        (SignedDigitNumber::from_parts_unchecked(self.digit_set, self.msd_exponent, digits), exact)
    }
}

fn prefix_value(digits: &[i32], msd_exponent: i64, radix: u32) -> ExactValue {
    if digits.is_empty() {
        return ExactValue::zero();
    }
    let r = num_bigint::BigInt::from(radix);
    let scaled = digits.iter().fold(num_bigint::BigInt::from(0), |acc, &d| acc * &r + num_bigint::BigInt::from(d));
    ExactValue::from_integer(scaled) * ExactValue::radix_pow(radix, msd_exponent - digits.len() as i64 + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> ExactValue {
        ExactValue::ratio(n, d)
    }

    fn worked_example() -> IterateSequence {
        let vals = [(1, 1), (1, 8), (3, 4), (3, 8), (9, 16), (15, 32), (33, 64)];
        IterateSequence::from_scalars(vals.iter().map(|&(n, d)| q(n, d)).collect(), q(1, 2)).unwrap()
    }

    /// Direct definition of the stable prefix, used as an oracle: pad every
    /// representation with zeros to a common length, then take the minimum
    /// explicit common prefix with each later element.
    fn stable_prefix_oracle(reps: &[SignedDigitNumber]) -> Vec<usize> {
        let width = reps.iter().map(|r| r.len()).max().unwrap();
        let padded: Vec<SignedDigitNumber> = reps
            .iter()
            .map(|r| {
                let mut d = r.digits().to_vec();
                d.resize(width, 0);
                SignedDigitNumber::new(r.digit_set(), r.msd_exponent(), d).unwrap()
            })
            .collect();
        (0..reps.len())
            .map(|n| {
                ((n + 1)..reps.len()).map(|k| padded[n].common_prefix_len(&padded[k]).unwrap()).min().unwrap_or(width)
            })
            .collect()
    }

    #[test]
    fn reaching_the_fixed_point_exactly_stabilises_everything() {
        let seq = IterateSequence::from_scalars(vec![q(1, 1), q(1, 4), q(0, 1), q(0, 1)], q(0, 1)).unwrap();
        let t = build_stable_trace(&seq, DigitSet::maximal(2).unwrap(), 16).unwrap().remove(0);
        assert_eq!(t.stable_prefix, stable_prefix_oracle(&t.representations));
        assert_eq!(t.stable_prefix[2], t.stable_prefix[3]);
        assert_eq!(t.first_stable_index(40), Some(2));
        assert!(t.stable_prefix.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn sequence_shape_checks() {
        assert!(matches!(IterateSequence::new(vec![], vec![q(0, 1)]), Err(StabilityError::EmptySequence)));
        assert!(matches!(IterateSequence::new(vec![vec![]], vec![]), Err(StabilityError::ZeroDimension)));
        assert!(matches!(
            IterateSequence::new(vec![vec![q(1, 1)], vec![q(1, 1), q(0, 1)]], vec![q(0, 1)]),
            Err(StabilityError::DimensionMismatch { index: 1, expected: 1, found: 2 })
        ));
    }

    #[test]
    fn fejer_checks() {
        assert!(is_fejer_monotone(&worked_example()));
        let constant = IterateSequence::from_scalars(vec![q(1, 2); 4], q(1, 2)).unwrap();
        assert!(is_fejer_monotone(&constant));
        let bad = IterateSequence::from_scalars(vec![q(2, 5), q(7, 10)], q(1, 2)).unwrap();
        assert!(!is_fejer_monotone(&bad));
        assert_eq!(fejer_violation(&bad), Some(2));
        let single = IterateSequence::from_scalars(vec![q(3, 1)], q(0, 1)).unwrap();
        assert!(is_fejer_monotone(&single));
    }

    #[test]
    fn worked_example_distances() {
        let expect = [(1, 2), (3, 8), (1, 4), (1, 8), (1, 16), (1, 32), (1, 64)];
        let got = worked_example().distances();
        let want: Vec<_> = expect.iter().map(|&(n, d)| q(n, d)).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn stable_digit_counts() {
        assert_eq!(stable_digit_count(&[q(15, 32)], &[q(1, 2)], 2), StableDigits::Digits(4));
        assert_eq!(stable_digit_count(&[q(1, 2)], &[q(1, 2)], 2), StableDigits::Unbounded);
        assert_eq!(stable_digit_count(&[q(3, 4), q(2, 5)], &[q(1, 2), q(1, 2)], 2), StableDigits::Digits(1));
        assert_eq!(stable_digit_count(&[q(3, 1)], &[q(1, 1)], 2), StableDigits::Unresolved);
        assert_eq!(stable_digit_count(&[q(0, 1)], &[q(1, 1)], 2), StableDigits::Unresolved);
        assert_eq!(stable_digit_count(&[q(1, 1000)], &[q(0, 1)], 10), StableDigits::Digits(2));
        assert_eq!(stable_digit_count(&[q(9, 1000)], &[q(0, 1)], 10), StableDigits::Digits(2));
    }

    #[test]
    fn stable_digits_covers() {
        assert!(StableDigits::Digits(3).covers(3));
        assert!(!StableDigits::Digits(3).covers(4));
        assert!(StableDigits::Unbounded.covers(100));
        assert!(!StableDigits::Unresolved.covers(0));
    }

    #[test]
    fn predicted_indices() {
        let one = [q(1, 1)];
        let zero = [q(0, 1)];
        assert_eq!(predict_stability_index(&q(1, 2), &zero, &one, 1, 2).unwrap(), 3);
        assert_eq!(predict_stability_index(&q(1, 2), &one, &one, 1, 2).unwrap(), 0);
        assert_eq!(predict_stability_index(&q(9, 10), &zero, &one, 3, 10).unwrap(), 88);
        assert!(matches!(predict_stability_index(&q(1, 1), &zero, &one, 1, 2), Err(StabilityError::NotContractive(_))));
        assert!(predict_stability_index(&q(1, 2), &zero, &one, 0, 2).is_err());
        // L = 0: one step lands on the fixed point
        assert_eq!(predict_stability_index(&q(0, 1), &zero, &one, 4, 2).unwrap(), 1);
    }

    #[test]
    fn worked_example_trace_digits() {
        let ds = DigitSet::maximal(2).unwrap();
        let traces = build_stable_trace(&worked_example(), ds, 64).unwrap();
        assert_eq!(traces.len(), 1);
        let t = &traces[0];
        let digits: Vec<Vec<i32>> = t.representations.iter().map(|r| r.digits().to_vec()).collect();
        assert_eq!(
            digits,
            vec![
                vec![1],
                vec![1, -1, -1, -1],
                vec![1, -1, 1],
                vec![1, -1, 0, -1],
                vec![1, -1, 0, 0, 1],
                vec![1, -1, 0, 0, 0, -1],
                vec![1, -1, 0, 0, 0, 0, 1],
            ]
        );
        assert_eq!(t.stable_prefix, vec![1, 2, 2, 3, 4, 5, 7]);
        assert_eq!(t.stable_prefix, stable_prefix_oracle(&t.representations));
        assert_eq!(t.first_stable_index(1), Some(1));
        assert_eq!(t.first_stable_index(2), Some(3));
        for (rep, v) in t.representations.iter().zip(worked_example().component(0)) {
            assert_eq!(rep.value(), v);
        }
    }

    #[test]
    fn single_element_trace() {
        let seq = IterateSequence::from_scalars(vec![q(3, 8)], q(3, 8)).unwrap();
        let t = &build_stable_trace(&seq, DigitSet::maximal(2).unwrap(), 16).unwrap()[0];
        assert_eq!(t.len(), 1);
        assert_eq!(t.stable_prefix, vec![t.representations[0].len()]);
        assert_eq!(t.representations[0].value(), q(3, 8));
    }

    #[test]
    fn next_element_is_one_appended_digit_away() {
        let seq = IterateSequence::from_scalars(vec![q(1, 8), q(3, 16)], q(3, 16)).unwrap();
        let t = &build_stable_trace(&seq, DigitSet::maximal(2).unwrap(), 16).unwrap()[0];
        let first = &t.representations[0];
        assert_eq!(first.value(), q(1, 8));
        assert!(first.exact_extension_exists(&q(3, 16), 1).unwrap());
        let appended = first.append_digits(&q(3, 16), 1).unwrap();
        assert_eq!(appended.value(), q(3, 16));
        assert_eq!(appended.len(), first.len() + 1);
        assert_eq!(t.representations[1].value(), q(3, 16));
    }

    #[test]
    fn trace_rejects_non_monotone_and_non_maximal() {
        let bad = IterateSequence::from_scalars(vec![q(2, 5), q(7, 10)], q(1, 2)).unwrap();
        let ds = DigitSet::maximal(2).unwrap();
        assert!(matches!(build_stable_trace(&bad, ds, 16), Err(StabilityError::NotFejerMonotone { element: 2 })));
        let non_max = DigitSet::new(10, 6).unwrap();
        assert!(matches!(
            build_stable_trace(&worked_example(), non_max, 16),
            Err(StabilityError::Digits(SdError::NotMaximallyRedundant { .. }))
        ));
    }

    #[test]
    fn inexact_iterates_hit_the_budget() {
        let seq = IterateSequence::from_scalars(vec![q(1, 3), q(1, 3)], q(1, 3)).unwrap();
        let ds = DigitSet::maximal(2).unwrap();
        assert!(matches!(
            build_stable_trace(&seq, ds, 12),
            Err(StabilityError::ExactRepresentationExceedsBudget { iteration: 0, component: 0, budget: 12 })
        ));
        let opts = TraceOptions { max_digits_per_step: 12, max_anchor_digits: 40, allow_truncation: true };
        let t = &build_stable_trace_with(&seq, ds, &opts).unwrap()[0];
        assert_eq!(t.truncated, vec![true, true]);
        for rep in &t.representations {
            assert!((rep.value() - q(1, 3)).abs() < ExactValue::radix_pow(2, -12));
        }
    }

    #[test]
    fn large_magnitudes_pick_a_shared_exponent() {
        let seq = IterateSequence::from_scalars(vec![q(-7, 1), q(5, 1), q(-3, 1), q(2, 1)], q(0, 1)).unwrap();
        let t = &build_stable_trace(&seq, DigitSet::maximal(2).unwrap(), 32).unwrap()[0];
        assert_eq!(t.msd_exponent(), 2);
        for (rep, v) in t.representations.iter().zip(seq.component(0)) {
            assert_eq!(rep.msd_exponent(), 2);
            assert_eq!(rep.value(), v);
        }
    }

    #[test]
    fn vector_sequences_trace_each_component() {
        let seq = IterateSequence::new(
            vec![vec![q(0, 1), q(0, 1)], vec![q(3, 2), q(3, 2)], vec![q(3, 4), q(3, 4)], vec![q(9, 8), q(9, 8)]],
            vec![q(1, 1), q(1, 1)],
        )
        .unwrap();
        let traces = build_stable_trace(&seq, DigitSet::maximal(2).unwrap(), 32).unwrap();
        assert_eq!(traces.len(), 2);
        for t in &traces {
            assert_eq!(t.stable_prefix, stable_prefix_oracle(&t.representations));
            assert_eq!(t.distances, seq.distances());
        }
    }

    #[test]
    fn radix_ten_trace() {
        let vals = vec![q(3, 1), q(1, 1), q(23, 10), q(19, 10), q(201, 100)];
        let seq = IterateSequence::from_scalars(vals.clone(), q(2, 1)).unwrap();
        let t = &build_stable_trace(&seq, DigitSet::maximal(10).unwrap(), 16).unwrap()[0];
        for (rep, v) in t.representations.iter().zip(&vals) {
            assert_eq!(&rep.value(), v);
        }
        assert_eq!(t.stable_prefix, stable_prefix_oracle(&t.representations));
    }
}
