//! Stationary splitting iterations `x <- (I - M^-1 A) x + M^-1 b`.

use serde::{Deserialize, Serialize};

use super::{RationalMatrix, SolverError};
use crate::exact::ExactValue;
use crate::stability::IterateSequence;

/// Choice of `M` in `A = M - N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SplittingKind {
    /// `M = diag(A)`.
    Jacobi,
    /// `M` = lower triangle of `A` including the diagonal.
    GaussSeidel,
    /// `M = D/omega + L`, `L` the strictly lower triangle of `A`.
    Sor { omega: ExactValue },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StationarySplitting {
    a: RationalMatrix,
    b: Vec<ExactValue>,
    kind: SplittingKind,
}

impl StationarySplitting {
    pub fn new(a: RationalMatrix, b: Vec<ExactValue>, kind: SplittingKind) -> Result<Self, SolverError> {
        if !a.is_square() {
            return Err(SolverError::Shape("A must be square".into()));
        }
        if b.len() != a.rows() {
            return Err(SolverError::Shape(format!("b has {} entries, A has {} rows", b.len(), a.rows())));
        }
        if let SplittingKind::Sor { omega } = &kind {
            if omega <= &ExactValue::zero() || omega >= &ExactValue::from(2) {
                return Err(SolverError::InvalidRelaxation(omega.clone()));
            }
        }
        if let Some(i) = (0..a.rows()).find(|&i| a.get(i, i).is_zero()) {
            return Err(SolverError::SingularSplitting { row: i });
        }
        Ok(StationarySplitting { a, b, kind })
    }

    pub fn a(&self) -> &RationalMatrix {
        &self.a
    }

    pub fn b(&self) -> &[ExactValue] {
        &self.b
    }

    pub fn kind(&self) -> &SplittingKind {
        &self.kind
    }

    pub fn dimension(&self) -> usize {
        self.b.len()
    }

    /// Entry `(i, j)` of `M` (zero above the diagonal for every kind).
    fn m_entry(&self, i: usize, j: usize) -> ExactValue {
        let aij = self.a.get(i, j);
        match (&self.kind, i.cmp(&j)) {
            (_, std::cmp::Ordering::Less) => ExactValue::zero(),
            (SplittingKind::Jacobi, std::cmp::Ordering::Greater) => ExactValue::zero(),
            (SplittingKind::Sor { omega }, std::cmp::Ordering::Equal) => aij / omega,
            _ => aij.clone(),
        }
    }

    pub fn m_matrix(&self) -> RationalMatrix {
        let n = self.dimension();
        let mut m = RationalMatrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.m_entry(i, j));
            }
        }
        m
    }

    /// Solves `M y = rhs` by forward substitution.
    fn solve_m(&self, rhs: &[ExactValue]) -> Vec<ExactValue> {
        let n = self.dimension();
        let mut y: Vec<ExactValue> = Vec::with_capacity(n);
        for (i, r) in rhs.iter().enumerate().take(n) {
            let mut acc = r.clone();
            if !matches!(self.kind, SplittingKind::Jacobi) {
                for (j, yj) in y.iter().enumerate() {
                    acc = acc - self.a.get(i, j) * yj;
                }
            }
            y.push(acc / self.m_entry(i, i));
        }
        y
    }

    /// `T(x) = x + M^-1 (b - A x)`.
    pub fn step(&self, x: &[ExactValue]) -> Result<Vec<ExactValue>, SolverError> {
        if x.len() != self.dimension() {
            return Err(SolverError::Shape(format!("x has {} entries, expected {}", x.len(), self.dimension())));
        }
        let ax = self.a.mul_vec(x);
        let residual: Vec<ExactValue> = self.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let corr = self.solve_m(&residual);
        Ok(x.iter().zip(corr).map(|(xi, ci)| xi + ci).collect())
    }

    /// `G = I - M^-1 A`, column by column.
    pub fn iteration_matrix(&self) -> RationalMatrix {
        let n = self.dimension();
        let mut g = RationalMatrix::identity(n);
        for j in 0..n {
            let col = self.solve_m(&self.a.column(j));
            for (i, v) in col.into_iter().enumerate() {
                let id = if i == j { ExactValue::one() } else { ExactValue::zero() };
                g.set(i, j, id - v);
            }
        }
        g
    }

    /// `L = ||I - M^-1 A||_inf`.
    pub fn lipschitz(&self) -> ExactValue {
        self.iteration_matrix().inf_norm()
    }

    /// Exact solution `A^-1 b`.
    pub fn exact_solution(&self) -> Result<Vec<ExactValue>, SolverError> {
        self.a.solve(&self.b)
    }

    /// `x0` followed by `iters` applications of [`Self::step`], measured
    /// against the exact solution.
    pub fn run(&self, x0: Vec<ExactValue>, iters: usize) -> Result<IterateSequence, SolverError> {
        if iters == 0 {
            return Err(SolverError::InvalidArgument("iters must be at least 1".into()));
        }
        let fixed = self.exact_solution()?;
        let mut x = x0;
        let mut seq = IterateSequence::new(vec![x.clone()], fixed)?;
        for _ in 0..iters {
            x = self.step(&x)?;
            seq.push(x.clone());
        }
        Ok(seq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::inf_norm_diff;
    use crate::stability::is_fejer_monotone;

    fn q(n: i64, d: i64) -> ExactValue {
        ExactValue::ratio(n, d)
    }

    fn demo(kind: SplittingKind) -> StationarySplitting {
        let a = RationalMatrix::from_i64(&[&[2, 1], &[1, 2]]).unwrap();
        StationarySplitting::new(a, vec![q(3, 1), q(3, 1)], kind).unwrap()
    }

    #[test]
    fn jacobi_step_matches_componentwise_formula() {
        let s = demo(SplittingKind::Jacobi);
        assert_eq!(s.step(&[q(0, 1), q(0, 1)]).unwrap(), vec![q(3, 2), q(3, 2)]);
        assert_eq!(s.step(&[q(1, 1), q(1, 1)]).unwrap(), vec![q(1, 1), q(1, 1)]);
        let x = [q(1, 3), q(-2, 5)];
        let expect: Vec<ExactValue> = (0..2)
            .map(|i| {
                let off: ExactValue = (0..2).filter(|&j| j != i).map(|j| s.a().get(i, j) * &x[j]).sum();
                (&s.b()[i] - off) / s.a().get(i, i)
            })
            .collect();
        assert_eq!(s.step(&x).unwrap(), expect);
    }

    #[test]
    fn identity_matrix_maps_everything_to_b() {
        let b = vec![q(5, 7), q(-3, 1), q(1, 2)];
        for kind in [SplittingKind::Jacobi, SplittingKind::GaussSeidel, SplittingKind::Sor { omega: q(3, 2) }] {
            let s = StationarySplitting::new(RationalMatrix::identity(3), b.clone(), kind.clone()).unwrap();
            if !matches!(kind, SplittingKind::Sor { .. }) {
                assert_eq!(s.step(&[q(0, 1), q(0, 1), q(0, 1)]).unwrap(), b);
                assert_eq!(s.lipschitz(), ExactValue::zero());
            }
        }
    }

    #[test]
    fn lipschitz_constants() {
        assert_eq!(demo(SplittingKind::Jacobi).lipschitz(), q(1, 2));
        let a = RationalMatrix::from_i64(&[&[1, 2], &[2, 1]]).unwrap();
        let s = StationarySplitting::new(a, vec![q(1, 1), q(1, 1)], SplittingKind::Jacobi).unwrap();
        assert_eq!(s.lipschitz(), q(2, 1));
        // Gauss-Seidel on the demo: G = [[0, -1/2], [0, 1/4]]
        let g = demo(SplittingKind::GaussSeidel).iteration_matrix();
        assert_eq!(g.row(0), &[q(0, 1), q(-1, 2)]);
        assert_eq!(g.row(1), &[q(0, 1), q(1, 4)]);
        assert_eq!(demo(SplittingKind::GaussSeidel).lipschitz(), q(1, 2));
    }

    #[test]
    fn sor_with_unit_omega_is_gauss_seidel() {
        let gs = demo(SplittingKind::GaussSeidel);
        let sor = demo(SplittingKind::Sor { omega: q(1, 1) });
        assert_eq!(gs.m_matrix(), sor.m_matrix());
        let x = [q(1, 5), q(7, 3)];
        assert_eq!(gs.step(&x).unwrap(), sor.step(&x).unwrap());
    }

    #[test]
    fn step_agrees_with_iteration_matrix() {
        for kind in [SplittingKind::Jacobi, SplittingKind::GaussSeidel, SplittingKind::Sor { omega: q(5, 4) }] {
            let s = demo(kind);
            let g = s.iteration_matrix();
            let c = s.step(&[q(0, 1), q(0, 1)]).unwrap();
            let x = [q(3, 7), q(-1, 9)];
            let via_g: Vec<ExactValue> = g.mul_vec(&x).into_iter().zip(&c).map(|(a, b)| a + b).collect();
            assert_eq!(s.step(&x).unwrap(), via_g);
        }
    }

    #[test]
    fn splitting_validation() {
        let a = RationalMatrix::from_i64(&[&[0, 1], &[1, 2]]).unwrap();
        assert!(matches!(
            StationarySplitting::new(a, vec![q(1, 1), q(1, 1)], SplittingKind::Jacobi),
            Err(SolverError::SingularSplitting { row: 0 })
        ));
        let a = RationalMatrix::from_i64(&[&[2, 1], &[1, 2]]).unwrap();
        for omega in [q(0, 1), q(2, 1), q(-1, 2)] {
            assert!(matches!(
                StationarySplitting::new(a.clone(), vec![q(1, 1), q(1, 1)], SplittingKind::Sor { omega }),
                Err(SolverError::InvalidRelaxation(_))
            ));
        }
        let rect = RationalMatrix::from_i64(&[&[2, 1, 0], &[1, 2, 0]]).unwrap();
        assert!(StationarySplitting::new(rect, vec![q(1, 1), q(1, 1)], SplittingKind::Jacobi).is_err());
    }

    #[test]
    fn demo_run_errors_halve() {
        let seq = demo(SplittingKind::Jacobi).run(vec![q(0, 1), q(0, 1)], 5).unwrap();
        assert_eq!(seq.fixed_point(), &[q(1, 1), q(1, 1)]);
        let expect: Vec<_> = [1, 2, 4, 8, 16, 32].iter().map(|&d| q(1, d)).collect();
        assert_eq!(seq.distances(), expect);
        assert!(is_fejer_monotone(&seq));
    }

    #[test]
    fn starting_at_the_solution_stays_there() {
        let seq = demo(SplittingKind::GaussSeidel).run(vec![q(1, 1), q(1, 1)], 3).unwrap();
        assert!(seq.iterates().iter().all(|x| x == &vec![q(1, 1), q(1, 1)]));
    }

    #[test]
    fn divergent_run_is_not_fejer() {
        let a = RationalMatrix::from_i64(&[&[1, 2], &[2, 1]]).unwrap();
        let s = StationarySplitting::new(a, vec![q(3, 1), q(3, 1)], SplittingKind::Jacobi).unwrap();
        let seq = s.run(vec![q(0, 1), q(0, 1)], 4).unwrap();
        assert!(!is_fejer_monotone(&seq));
    }

    #[test]
    fn singular_system_run() {
        let a = RationalMatrix::from_i64(&[&[1, 1], &[1, 1]]).unwrap();
        let s = StationarySplitting::new(a, vec![q(1, 1), q(1, 1)], SplittingKind::Jacobi).unwrap();
        assert!(matches!(s.run(vec![q(0, 1), q(0, 1)], 2), Err(SolverError::SingularSystem)));
        assert!(matches!(
            demo(SplittingKind::Jacobi).run(vec![q(0, 1), q(0, 1)], 0),
            Err(SolverError::InvalidArgument(_))
        ));
    }

    #[test]
    fn composed_steps_equal_a_longer_run() {
        let s = demo(SplittingKind::Sor { omega: q(9, 8) });
        let seq = s.run(vec![q(1, 3), q(2, 1)], 6).unwrap();
        let mut x = vec![q(1, 3), q(2, 1)];
        for k in 1..=6 {
            x = s.step(&x).unwrap();
            assert_eq!(inf_norm_diff(&x, &seq.iterates()[k]), ExactValue::zero());
        }
    }
}
