use crate::scalar::{Cx, Real};

use super::matrix::{norm2, ComplexMatrix};

pub const POWER_TOLERANCE: f64 = 1e-12;
pub const POWER_MAX_ITERATIONS: usize = 10_000;

/// Largest singular value by power iteration on `A^* A`.
///
/// Stops once the Rayleigh quotient changes by less than `1e-12` relative, or
/// after 10 000 iterations. A zero matrix has norm 0.
pub fn spectral_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    let n = a.cols();
    if n == 0 || a.max_abs() == T::zero() {
        return T::zero();
    }
    let tol = T::tol(POWER_TOLERANCE);
    // deterministic start with no special alignment to the grid
    let mut v: Vec<Cx<T>> = (0..n)
        .map(|k| {
            let t = T::from_usize_lossy(k + 1);
            Cx::new(T::one() + (t * T::lit(0.618_033_988_749_894_8)).fract(), (t * T::lit(0.414_213_562_373_095)).fract())
        })
        .collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x = *x / nv);

    let mut mu = T::zero();
    for _ in 0..POWER_MAX_ITERATIONS {
        let av = a.matvec(&v).expect("dimensions checked");
        let next_mu = norm2(&av).powi(2);
        let w = a.adjoint_matvec(&av).expect("dimensions checked");
        let nw = norm2(&w);
        if nw == T::zero() {
            return next_mu.sqrt();
        }
        v = w.into_iter().map(|x| x / nw).collect();
        let done = (next_mu - mu).abs() <= tol * next_mu;
        mu = next_mu;
        if done {
            break;
        }
    }
    mu.sqrt()
}
