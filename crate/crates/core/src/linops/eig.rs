use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

use super::matrix::ComplexMatrix;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in descending order with the matching orthonormal eigenvectors
/// stored as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigensystem<T> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigensystem<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `Q f(Lambda) Q^*`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let n = self.dim();
        let q = &self.vectors;
        let fv: Vec<T> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| q[(i, k)] * q[(j, k)].conj() * fv[k])
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.reconstruct_with(|l| l)
    }

    /// Coefficients `(v, q_k)` of `v` in the eigenbasis, i.e. `Q^* v`.
    pub fn coefficients(&self, v: &[Cx<T>]) -> Result<Vec<Cx<T>>> {
        self.vectors.adjoint_matvec(v)
    }
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized as `(A + A^*) / 2` first. Sweeps stop once the
/// off-diagonal Frobenius norm drops below `tol * ||A||_F`.
pub fn hermitian_eig<T: Real>(a: &ComplexMatrix<T>, tol: T) -> Result<HermitianEigensystem<T>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::Parameter("matrix has non-finite entries".into()));
    }
    let n = a.rows();
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm();
    let threshold = tol.max(T::epsilon()) * scale;

    let off_norm = |m: &ComplexMatrix<T>| -> T {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = scale == T::zero() || off_norm(&m) <= threshold;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                what: "Jacobi eigenvalue sweeps",
                iterations: sweeps,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        converged = off_norm(&m) <= threshold;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].re.partial_cmp(&m[(i, i)].re).unwrap());
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(HermitianEigensystem { values, vectors })
}

/// Annihilates `m[(p, q)]` with the unitary `G = diag(1, e^{-i phi}) R(theta)`.
fn rotate<T: Real>(m: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let z = m[(p, q)];
    let r = z.norm();
    if r == T::zero() {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // skip rotations that cannot change the diagonal at working precision
    if r <= T::epsilon() * T::lit(1e-3) * (app.abs() + aqq.abs()) {
        m[(p, q)] = Cx::default();
        m[(q, p)] = Cx::default();
        return;
    }
    let phase = z / r;
    let tau = (aqq - app) / (r + r);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    let conj_phase = phase.conj();
    // G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
    let g_pp = Cx::new(c, T::zero());
    let g_pq = Cx::new(s, T::zero());
    let g_qp = conj_phase * (-s);
    let g_qq = conj_phase * c;
    let n = m.rows();

    // M <- M G
    for k in 0..n {
        let mp = m[(k, p)];
        let mq = m[(k, q)];
        m[(k, p)] = mp * g_pp + mq * g_qp;
        m[(k, q)] = mp * g_pq + mq * g_qq;
    }
    // M <- G^* M
    for k in 0..n {
        let mp = m[(p, k)];
        let mq = m[(q, k)];
        m[(p, k)] = g_pp.conj() * mp + g_qp.conj() * mq;
        m[(q, k)] = g_pq.conj() * mp + g_qq.conj() * mq;
    }
    m[(p, q)] = Cx::default();
    m[(q, p)] = Cx::default();
    m[(p, p)] = Cx::new(m[(p, p)].re, T::zero());
    m[(q, q)] = Cx::new(m[(q, q)].re, T::zero());
    // V <- V G
    for k in 0..n {
        let vp = v[(k, p)];
        let vq = v[(k, q)];
        v[(k, p)] = vp * g_pp + vq * g_qp;
        v[(k, q)] = vp * g_pq + vq * g_qq;
    }
}
