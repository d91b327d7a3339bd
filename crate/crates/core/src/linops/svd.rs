use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

use super::matrix::{dot, norm2, ComplexMatrix};

const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `A = U diag(s) V^*`, singular values
/// descending.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: ComplexMatrix<T>,
    pub singular_values: Vec<T>,
    pub v: ComplexMatrix<T>,
}

/// One-sided (Hestenes) Jacobi SVD for `rows >= cols`.
pub fn jacobi_svd<T: Real>(a: &ComplexMatrix<T>) -> Result<Svd<T>> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(Error::Dimension(format!(
            "one-sided Jacobi SVD needs rows >= cols, got {m}x{n}"
        )));
    }
    let mut cols: Vec<Vec<Cx<T>>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<Cx<T>>> = (0..n)
        .map(|j| {
            let mut e = vec![Cx::default(); n];
            e[j] = Cx::new(T::one(), T::zero());
            e
        })
        .collect();
    let tol = T::epsilon() * T::from_usize_lossy(m.max(1));

    let mut sweep = 0;
    loop {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha = norm2(&cols[i]).powi(2);
                let beta = norm2(&cols[j]).powi(2);
                let gamma = dot(&cols[i], &cols[j]);
                let g = gamma.norm();
                if g == T::zero() || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (g + g);
                let t = if zeta >= T::zero() {
                    T::one() / (zeta + (T::one() + zeta * zeta).sqrt())
                } else {
                    -T::one() / (-zeta + (T::one() + zeta * zeta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let back = phase.conj();
                for (x, y) in pair_mut(&mut cols, i, j) {
                    let yt = *y * back;
                    let xi = *x;
                    *x = xi * c - yt * s;
                    *y = xi * s + yt * c;
                }
                for (x, y) in pair_mut(&mut v, i, j) {
                    let yt = *y * back;
                    let xi = *x;
                    *x = xi * c - yt * s;
                    *y = xi * s + yt * c;
                }
            }
        }
        if !rotated {
            break;
        }
        sweep += 1;
        if sweep == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                what: "one-sided Jacobi SVD",
                iterations: sweep,
            });
        }
    }

    let mut sv: Vec<(T, usize)> = cols.iter().enumerate().map(|(j, c)| (norm2(c), j)).collect();
    sv.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let singular_values: Vec<T> = sv.iter().map(|x| x.0).collect();
    let u_cols: Vec<Vec<Cx<T>>> = sv
        .iter()
        .map(|&(s, j)| {
            if s > T::zero() {
                cols[j].iter().map(|&x| x / s).collect()
            } else {
                vec![Cx::default(); m]
            }
        })
        .collect();
    let v_cols: Vec<Vec<Cx<T>>> = sv.iter().map(|&(_, j)| v[j].clone()).collect();
    let u = if n == 0 {
        ComplexMatrix::zeros(m, 0)
    } else {
        ComplexMatrix::from_columns(&u_cols)?
    };
    let v = if n == 0 {
        ComplexMatrix::zeros(0, 0)
    } else {
        ComplexMatrix::from_columns(&v_cols)?
    };
    Ok(Svd {
        u,
        singular_values,
        v,
    })
}

fn pair_mut<T>(cols: &mut [Vec<T>], i: usize, j: usize) -> impl Iterator<Item = (&mut T, &mut T)> {
    debug_assert!(i < j);
    let (lo, hi) = cols.split_at_mut(j);
    lo[i].iter_mut().zip(hi[0].iter_mut())
}

/// Minimum-norm least-squares solution with a relative spectral cut-off.
#[derive(Debug, Clone)]
pub struct CutoffSolution<T> {
    pub x: Vec<Cx<T>>,
    /// Number of singular values kept.
    pub rank: usize,
    pub singular_values: Vec<T>,
    /// Set when every singular value fell below the cut-off.
    pub all_cut: bool,
}

/// Solves `min ||V x - y||` keeping only singular values `>= cutoff * s_max`.
pub fn cutoff_least_squares<T: Real>(
    v: &ComplexMatrix<T>,
    y: &[Cx<T>],
    cutoff: T,
) -> Result<CutoffSolution<T>> {
    if y.len() != v.rows() {
        return Err(Error::Dimension(format!(
            "right-hand side of length {} for {} rows",
            y.len(),
            v.rows()
        )));
    }
    let svd = jacobi_svd(v)?;
    let smax = svd.singular_values.first().copied().unwrap_or_else(T::zero);
    let mut x = vec![Cx::default(); v.cols()];
    let mut rank = 0;
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if !(s > T::zero()) || s < cutoff * smax {
            continue;
        }
        rank += 1;
        let coef = dot(&svd.u.column(k), y) / s;
        for (xi, vk) in x.iter_mut().zip(svd.v.column(k)) {
            *xi += vk * coef;
        }
    }
    Ok(CutoffSolution {
        x,
        rank,
        singular_values: svd.singular_values,
        all_cut: rank == 0,
    })
}
