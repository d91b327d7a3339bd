pub mod disk;
pub mod error;
pub mod farfield;
pub mod forward;
pub mod geometry;
pub mod ldsm;
pub mod linops;
pub mod quadrature;
pub mod scalar;
pub mod specfun;

pub use error::{Error, Result};
pub use scalar::{Cx, Real};

pub type Complex64 = Cx<f64>;
pub type ComplexMatrix64 = linops::ComplexMatrix<f64>;
pub type BoundaryCurve64 = geometry::BoundaryCurve<f64>;
pub type Medium64 = forward::Medium<f64>;
pub type ForwardSolver64 = forward::ForwardSolver<f64>;
pub type FarFieldMatrix64 = farfield::FarFieldMatrix<f64>;
pub type DiskScatterer64 = disk::DiskScatterer<f64>;
pub type FSharp64 = ldsm::FSharp<f64>;
pub type FilterSpec64 = ldsm::FilterSpec<f64>;
pub type FilterPolynomial64 = ldsm::FilterPolynomial<f64>;
pub type ImagingGrid64 = ldsm::ImagingGrid<f64>;

pub type FarFieldMatrix32 = farfield::FarFieldMatrix<f32>;
pub type ForwardSolver32 = forward::ForwardSolver<f32>;
