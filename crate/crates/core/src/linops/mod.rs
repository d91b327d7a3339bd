//! Dense complex linear algebra for matrices of at most a few hundred rows.

mod eig;
mod lu;
mod matrix;
mod power;
mod svd;

pub use eig::{hermitian_eig, HermitianEigensystem};
pub use lu::{solve, LuFactorization, CONDITION_WARNING};
pub use matrix::{dot, norm2, ComplexMatrix};
pub use power::{spectral_norm, POWER_MAX_ITERATIONS, POWER_TOLERANCE};
pub use svd::{cutoff_least_squares, jacobi_svd, CutoffSolution, Svd};

/// Default off-diagonal tolerance of the Jacobi eigensolver.
pub const EIG_TOLERANCE: f64 = 1e-13;
