use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::SolverError;
use crate::exact::ExactValue;

/// Dense row-major matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<ExactValue>,
}

impl RationalMatrix {
    pub fn from_rows(rows: Vec<Vec<ExactValue>>) -> Result<Self, SolverError> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if n_rows == 0 || n_cols == 0 {
            return Err(SolverError::Shape("matrix must be non-empty".into()));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != n_cols) {
            return Err(SolverError::Shape(format!("row {i} has {} entries, expected {n_cols}", rows[i].len())));
        }
        Ok(RationalMatrix { rows: n_rows, cols: n_cols, entries: rows.into_iter().flatten().collect() })
    }

    /// Convenience constructor from small integers.
    pub fn from_i64(rows: &[&[i64]]) -> Result<Self, SolverError> {
        RationalMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| ExactValue::from(v)).collect()).collect())
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![ExactValue::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = ExactValue::one();
        }
        RationalMatrix { rows: n, cols: n, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &ExactValue {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: ExactValue) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[ExactValue] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<ExactValue> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul_vec(&self, x: &[ExactValue]) -> Vec<ExactValue> {
        assert_eq!(x.len(), self.cols, "dimension mismatch");
        (0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> ExactValue {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(ExactValue::abs).sum::<ExactValue>())
            .max()
            .expect("non-empty matrix")
    }

    /// Solves `self * x = b` exactly.
    ///
    /// Each row of `[A | b]` is scaled to integers, then eliminated with
    /// Bareiss' fraction-free scheme (every division is exact), and the
    /// triangular system is back-substituted in rationals.
    pub fn solve(&self, b: &[ExactValue]) -> Result<Vec<ExactValue>, SolverError> {
        if !self.is_square() {
            return Err(SolverError::Shape("solve needs a square matrix".into()));
        }
        if b.len() != self.rows {
            return Err(SolverError::Shape(format!("right-hand side has {} entries, expected {}", b.len(), self.rows)));
        }
        let n = self.rows;
        let mut m: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                let row: Vec<&ExactValue> = self.row(i).iter().chain(std::iter::once(&b[i])).collect();
                let lcm = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
                row.iter().map(|v| v.numer() * (&lcm / v.denom())).collect()
            })
            .collect();
        let mut prev = BigInt::one();
        for k in 0..n {
            let pivot = (k..n).find(|&i| !m[i][k].is_zero()).ok_or(SolverError::SingularSystem)?;
            m.swap(k, pivot);
            for i in (k + 1)..n {
                for j in (k + 1)..=n {
                    let v = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                    debug_assert!((&v % &prev).is_zero());
                    m[i][j] = v / &prev;
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        let mut x = vec![ExactValue::zero(); n];
        for i in (0..n).rev() {
            let mut acc = ExactValue::from_integer(m[i][n].clone());
            for j in (i + 1)..n {
                acc = acc - ExactValue::from_integer(m[i][j].clone()) * &x[j];
            }
            x[i] = acc / ExactValue::from_integer(m[i][i].clone());
        }
        Ok(x)
    }
}
