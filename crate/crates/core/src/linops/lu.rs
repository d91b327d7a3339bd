use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

use super::matrix::ComplexMatrix;

/// Ratio of extreme pivots above which a factorization is flagged as
/// ill-conditioned.
pub const CONDITION_WARNING: f64 = 1e14;

/// Trailing block size above which elimination is spread over threads.
const PARALLEL_WORK: usize = 64 * 64;

/// LU factorization with partial pivoting, `P A = L U`, packed in place.
#[derive(Debug, Clone)]
pub struct LuFactorization<T> {
    lu: ComplexMatrix<T>,
    perm: Vec<usize>,
    pivot_ratio: T,
}

impl<T: Real> LuFactorization<T> {
    pub fn new(a: &ComplexMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "LU of a non-square {}x{} matrix",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let floor = T::epsilon() * T::from_usize_lossy(n.max(1)) * a.max_abs();
        let mut pmin = T::infinity();
        let mut pmax = T::zero();
        for col in 0..n {
            let (piv_row, piv_abs) = (col..n)
                .map(|r| (r, lu[(r, col)].norm()))
                .fold((col, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(piv_abs > floor) {
                return Err(Error::Singular {
                    column: col,
                    pivot: piv_abs.to_f64().unwrap_or(0.0),
                });
            }
            pmin = pmin.min(piv_abs);
            pmax = pmax.max(piv_abs);
            if piv_row != col {
                perm.swap(piv_row, col);
                for j in 0..n {
                    let tmp = lu[(piv_row, j)];
                    lu[(piv_row, j)] = lu[(col, j)];
                    lu[(col, j)] = tmp;
                }
            }
            let inv = lu[(col, col)].inv();
            let (head, tail) = lu.as_mut_slice().split_at_mut((col + 1) * n);
            let pivot_row = &head[col * n..];
            let eliminate = |row: &mut [Cx<T>]| {
                let factor = row[col] * inv;
                row[col] = factor;
                if factor == Cx::default() {
                    return;
                }
                for (x, &u) in row[col + 1..].iter_mut().zip(&pivot_row[col + 1..]) {
                    *x -= factor * u;
                }
            };
            if (n - col) * (n - col) > PARALLEL_WORK {
                tail.par_chunks_mut(n).for_each(eliminate);
            } else {
                tail.chunks_mut(n).for_each(eliminate);
            }
        }
        let pivot_ratio = if n == 0 { T::one() } else { pmax / pmin };
        Ok(Self {
            lu,
            perm,
            pivot_ratio,
        })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// `max |u_ii| / min |u_ii|`, a cheap condition estimate.
    pub fn pivot_ratio(&self) -> T {
        self.pivot_ratio
    }

    pub fn ill_conditioned(&self) -> bool {
        self.pivot_ratio > T::lit(CONDITION_WARNING)
    }

    pub fn solve_vec(&self, b: &[Cx<T>]) -> Result<Vec<Cx<T>>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::Dimension(format!(
                "right-hand side of length {} for dimension {n}",
                b.len()
            )));
        }
        let mut x: Vec<Cx<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in 0..i {
                s -= row[j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= row[j] * x[j];
            }
            x[i] = s / row[i];
        }
        Ok(x)
    }

    pub fn solve(&self, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if b.rows() != self.dim() {
            return Err(Error::Dimension(format!(
                "right-hand side with {} rows for dimension {}",
                b.rows(),
                self.dim()
            )));
        }
        let cols = (0..b.cols())
            .into_par_iter()
            .map(|j| self.solve_vec(&b.column(j)))
            .collect::<Result<Vec<_>>>()?;
        ComplexMatrix::from_columns(&cols).map(|m| {
            if b.cols() == 0 {
                ComplexMatrix::zeros(b.rows(), 0)
            } else {
                m
            }
        })
    }
}

/// Solves `A X = B` by partial-pivoted elimination.
pub fn solve<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    LuFactorization::new(a)?.solve(b)
}
