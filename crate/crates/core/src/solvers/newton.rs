//! Newton's method `x <- x - f(x)/f'(x)` on rational polynomials.

use super::SolverError;
use crate::exact::ExactValue;
use crate::sdrep::OpenInterval;
use crate::stability::IterateSequence;

/// Polynomial with exact coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPolynomial {
    coefficients: Vec<ExactValue>,
}

impl RationalPolynomial {
    /// Trailing zero coefficients are dropped; the zero polynomial has none.
    pub fn new(mut coefficients: Vec<ExactValue>) -> Self {
        while coefficients.last().is_some_and(ExactValue::is_zero) {
            coefficients.pop();
        }
        RationalPolynomial { coefficients }
    }

    pub fn from_i64(coefficients: &[i64]) -> Self {
        RationalPolynomial::new(coefficients.iter().map(|&c| ExactValue::from(c)).collect())
    }

    pub fn coefficients(&self) -> &[ExactValue] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn eval(&self, x: &ExactValue) -> ExactValue {
        self.coefficients.iter().rev().fold(ExactValue::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> RationalPolynomial {
        RationalPolynomial::new(
            self.coefficients.iter().enumerate().skip(1).map(|(k, c)| c * ExactValue::from(k as i64)).collect(),
        )
    }
}

pub fn newton_step(f: &RationalPolynomial, x: &ExactValue) -> Result<ExactValue, SolverError> {
    let d = f.derivative().eval(x);
    if d.is_zero() {
        return Err(SolverError::DerivativeZero { at: x.clone() });
    }
    Ok(x - f.eval(x) / d)
}

/// Largest `|f f'' / f'^2|` over `samples` evenly spaced points of the
/// closed interval (endpoints included). A sampled estimate only.
pub fn newton_contraction(
    f: &RationalPolynomial,
    interval: &OpenInterval,
    samples: usize,
) -> Result<ExactValue, SolverError> {
    if samples < 2 {
        return Err(SolverError::InvalidArgument("need at least 2 samples".into()));
    }
    let df = f.derivative();
    let ddf = df.derivative();
    let step = (interval.hi() - interval.lo()) / ExactValue::from((samples - 1) as i64);
    let mut worst = ExactValue::zero();
    for i in 0..samples {
        let x = interval.lo() + &step * ExactValue::from(i as i64);
        let d = df.eval(&x);
        if d.is_zero() {
            return Err(SolverError::DerivativeZero { at: x });
        }
        let t = (f.eval(&x) * ddf.eval(&x) / (&d * &d)).abs();
        if t > worst {
            worst = t;
        }
    }
    Ok(worst)
}

/// Bisects a sign change of `f` on `[lo, hi]` until the enclosure is no
/// wider than `tol`. Returns the final enclosure.
pub fn bisect_root(
    f: &RationalPolynomial,
    lo: ExactValue,
    hi: ExactValue,
    tol: &ExactValue,
) -> Result<(ExactValue, ExactValue), SolverError> {
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut s_lo = f.eval(&lo).signum();
    let s_hi = f.eval(&hi).signum();
    if s_lo == 0 {
        return Ok((lo.clone(), lo));
    }
    if s_hi == 0 {
        return Ok((hi.clone(), hi));
    }
    if s_lo == s_hi {
        return Err(SolverError::NoBracket { near: (lo + hi) / ExactValue::from(2) });
    }
    let half = ExactValue::ratio(1, 2);
    while &(&hi - &lo) > tol {
        let mid = (&lo + &hi) * &half;
        let s = f.eval(&mid).signum();
        if s == 0 {
            return Ok((mid.clone(), mid));
        }
        if s == s_lo {
            lo = mid;
            s_lo = s;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

// Widens a symmetric bracket around `x` from `h` by doubling.
fn enclose_root_near(
    f: &RationalPolynomial,
    x: &ExactValue,
    h: ExactValue,
    tol: &ExactValue,
) -> Result<(ExactValue, ExactValue), SolverError> {
    let mut h = h;
    for _ in 0..256 {
        let (lo, hi) = (x - &h, x + &h);
        if f.eval(&lo).signum() * f.eval(&hi).signum() <= 0 {
            return bisect_root(f, lo, hi, tol);
        }
        h = h * ExactValue::from(2);
    }
    Err(SolverError::NoBracket { near: x.clone() })
}

/// Output of [`run_newton`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonRun {
    pub sequence: IterateSequence,
    /// Enclosure of the root the fixed point was taken from, when it was
    /// bisected rather than supplied.
    pub root_enclosure: Option<(ExactValue, ExactValue)>,
    /// Index of the iterate whose derivative vanished, if the run stopped
    /// early.
    pub halted_at: Option<usize>,
}

/// Runs `iters` Newton steps from `x0`, rounding every new iterate to the
/// nearest multiple of `radix^-digit_budget` (ties toward zero).
///
/// Without `fixed_point` the root nearest the last iterate is bisected to
/// within `radix^-(digit_budget + 2)` and the midpoint of that enclosure is
/// used. A vanishing derivative on the first step is an error; later it
/// truncates the run and sets `halted_at`.
pub fn run_newton(
    f: &RationalPolynomial,
    x0: ExactValue,
    iters: usize,
    digit_budget: u32,
    radix: u32,
    fixed_point: Option<ExactValue>,
) -> Result<NewtonRun, SolverError> {
    if iters == 0 {
        return Err(SolverError::InvalidArgument("iters must be at least 1".into()));
    }
    if radix < 2 {
        return Err(SolverError::InvalidArgument(format!("radix {radix} < 2")));
    }
    let quantum = ExactValue::radix_pow(radix, -i64::from(digit_budget));
    let mut xs = vec![x0];
    let mut halted_at = None;
    for k in 0..iters {
        let last = xs.last().expect("non-empty");
        match newton_step(f, last) {
            Ok(next) => {
                let rounded = next.round_to_multiple(&quantum);
                xs.push(rounded);
            }
            Err(e @ SolverError::DerivativeZero { .. }) if k == 0 => return Err(e),
            Err(SolverError::DerivativeZero { .. }) => {
                halted_at = Some(k);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let (fixed, root_enclosure) = match fixed_point {
        Some(p) => (p, None),
        None => {
            let tol = ExactValue::radix_pow(radix, -(i64::from(digit_budget) + 2));
            let (lo, hi) = enclose_root_near(f, xs.last().expect("non-empty"), quantum, &tol)?;
            ((&lo + &hi) / ExactValue::from(2), Some((lo, hi)))
        }
    };
    let sequence = IterateSequence::new(xs.into_iter().map(|x| vec![x]).collect(), vec![fixed])?;
    Ok(NewtonRun { sequence, root_enclosure, halted_at })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::is_fejer_monotone;

    fn q(n: i64, d: i64) -> ExactValue {
        ExactValue::ratio(n, d)
    }

    fn sqrt2_poly() -> RationalPolynomial {
        RationalPolynomial::from_i64(&[-2, 0, 1])
    }

    #[test]
    fn polynomial_basics() {
        let f = RationalPolynomial::new(vec![q(1, 1), q(0, 1), q(0, 1)]);
        assert_eq!(f.degree(), Some(0));
        assert!(RationalPolynomial::from_i64(&[0, 0]).is_zero());
        let g = sqrt2_poly();
        assert_eq!(g.eval(&q(3, 2)), q(1, 4));
        assert_eq!(g.derivative(), RationalPolynomial::from_i64(&[0, 2]));
        assert_eq!(g.derivative().derivative().derivative(), RationalPolynomial::new(vec![]));
    }

    #[test]
    fn newton_steps() {
        let f = sqrt2_poly();
        assert_eq!(newton_step(&f, &q(1, 1)).unwrap(), q(3, 2));
        assert_eq!(newton_step(&f, &q(3, 2)).unwrap(), q(17, 12));
        assert!(matches!(newton_step(&f, &q(0, 1)), Err(SolverError::DerivativeZero { .. })));
        let g = RationalPolynomial::from_i64(&[-6, 1, 1]); // roots 2, -3
        assert_eq!(newton_step(&g, &q(2, 1)).unwrap(), q(2, 1));
        assert_eq!(newton_step(&g, &q(-3, 1)).unwrap(), q(-3, 1));
    }

    #[test]
    fn contraction_estimates() {
        let f = sqrt2_poly();
        let iv = OpenInterval::new(q(13, 10), q(16, 10)).unwrap();
        let c = newton_contraction(&f, &iv, 31).unwrap();
        // oracle: |x^2 - 2| / (2 x^2) over the same grid
        let oracle = (0..31)
            .map(|i| {
                let x = q(13, 10) + q(3, 10) * q(i, 30);
                ((&x * &x - q(2, 1)) / (q(2, 1) * &x * &x)).abs()
            })
            .max()
            .unwrap();
        assert_eq!(c, oracle);
        assert!(c < q(1, 4));
        let lin = RationalPolynomial::from_i64(&[-5, 3]);
        assert_eq!(newton_contraction(&lin, &iv, 7).unwrap(), ExactValue::zero());
        let around_zero = OpenInterval::new(q(-1, 1), q(1, 1)).unwrap();
        assert!(matches!(newton_contraction(&f, &around_zero, 3), Err(SolverError::DerivativeZero { .. })));
        assert!(newton_contraction(&f, &iv, 1).is_err());
    }

    #[test]
    fn bisection_encloses_the_root() {
        let f = sqrt2_poly();
        let tol = ExactValue::radix_pow(2, -40);
        let (lo, hi) = bisect_root(&f, q(1, 1), q(2, 1), &tol).unwrap();
        assert!(&hi - &lo <= tol);
        assert!(f.eval(&lo).is_negative() && !f.eval(&hi).is_negative());
        assert!(bisect_root(&f, q(2, 1), q(3, 1), &tol).is_err());
        assert!(bisect_root(&f, q(-3, 1), q(0, 1), &tol).unwrap().0 < q(0, 1));
    }

    #[test]
    fn rounded_run_tracks_exact_newton() {
        let f = sqrt2_poly();
        let run = run_newton(&f, q(3, 2), 4, 64, 2, None).unwrap();
        let xs: Vec<ExactValue> = run.sequence.component(0);
        let mut exact = q(3, 2);
        let tol = ExactValue::radix_pow(2, -64);
        for x in xs.iter().skip(1) {
            exact = newton_step(&f, &exact).unwrap();
            assert!((x - &exact).abs() <= tol);
        }
        assert_eq!(xs[1], q(17, 12).round_to_multiple(&tol));
        for (i, target) in [q(17, 12), q(577, 408), q(665857, 470832)].iter().enumerate() {
            assert!((&xs[i + 1] - target).abs() <= tol);
        }
        let (lo, hi) = run.root_enclosure.clone().unwrap();
        assert!(&hi - &lo <= ExactValue::radix_pow(2, -66));
        assert!(is_fejer_monotone(&run.sequence));
        assert_eq!(run.halted_at, None);
    }

    #[test]
    fn linear_polynomial_converges_in_one_step() {
        let f = RationalPolynomial::from_i64(&[-3, 4]);
        let run = run_newton(&f, q(10, 1), 3, 16, 2, None).unwrap();
        let xs = run.sequence.component(0);
        assert!(xs[1..].iter().all(|x| x == &q(3, 4)));
        assert_eq!(run.sequence.fixed_point(), &[q(3, 4)]);
    }

    #[test]
    fn derivative_zero_handling() {
        let f = sqrt2_poly();
        assert!(matches!(run_newton(&f, q(0, 1), 3, 16, 2, None), Err(SolverError::DerivativeZero { .. })));
        // x^2 halves each iterate; with quantum 1/4 the tie 1/8 rounds to 0
        let g = RationalPolynomial::from_i64(&[0, 0, 1]);
        let run = run_newton(&g, q(1, 1), 10, 2, 2, Some(q(0, 1))).unwrap();
        assert_eq!(run.halted_at, Some(3));
        assert_eq!(run.sequence.component(0), vec![q(1, 1), q(1, 2), q(1, 4), q(0, 1)]);
    }
}
