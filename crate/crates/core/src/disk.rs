//! Separation-of-variables far field of a conductive disk.
//!
//! ```text
//! u_inf(theta, phi) = (4/i) sum_p a_p e^{ip(theta - phi)}
//! a_p = -[kappa J_p(kR) J_p'(kappa R) - J_p(kappa R)(k J_p'(kR) + eta J_p(kR))]
//!     / [kappa H_p(kR) J_p'(kappa R) - J_p(kappa R)(k H_p'(kR) + eta H_p(kR))]
//! ```

use crate::error::{Error, Result};
use crate::farfield::FarFieldMatrix;
use crate::forward::Medium;
use crate::linops::{spectral_norm, ComplexMatrix};
use crate::scalar::{cx, re, Cx, Real};
use crate::specfun::{bessel_j_sequence, bessel_j_sequence_real, hankel1_sequence, MAX_ORDER};

/// Order cap of the series.
pub const MAX_SERIES_ORDER: usize = 60;
const _: () = assert!(MAX_SERIES_ORDER as i32 <= MAX_ORDER);

/// Orders added per step of the automatic truncation search.
const ORDER_STEP: usize = 10;

/// Tail bound: the last three coefficients must fall below this.
const TAIL_BOUND: f64 = 1e-15;

/// Direction count of the validation grid.
pub const VALIDATION_DIRECTIONS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskScatterer<T> {
    pub radius: T,
    pub medium: Medium<T>,
}

impl<T: Real> DiskScatterer<T> {
    pub fn new(radius: T, medium: Medium<T>) -> Result<Self> {
        if !(radius > T::zero() && radius.is_finite()) {
            return Err(Error::Parameter(format!("disk radius must be > 0, got {radius}")));
        }
        Ok(Self { radius, medium })
    }

    /// `a_0 ..= a_pmax`.
    pub fn coefficients(&self, pmax: usize) -> Result<Vec<Cx<T>>> {
        if pmax > MAX_SERIES_ORDER {
            return Err(Error::UnsupportedOrder {
                order: pmax as i32,
                max: MAX_SERIES_ORDER as i32,
            });
        }
        let k = self.medium.k;
        let kappa = self.medium.interior_wavenumber();
        let eta = self.medium.eta;
        let x = k * self.radius;
        let z = kappa * self.radius;
        let jx = bessel_j_sequence_real(pmax + 1, x)?;
        let hx = hankel1_sequence(pmax + 1, x)?;
        let jz = bessel_j_sequence(pmax + 1, z)?;
        // f_p' = f_{p-1} - (p/x) f_p, and f_0' = -f_1
        let prime = |seq: &dyn Fn(usize) -> Cx<T>, p: usize, arg: Cx<T>| {
            if p == 0 {
                -seq(1)
            } else {
                seq(p - 1) - seq(p) * T::from_usize_lossy(p) / arg
            }
        };
        let mut out = Vec::with_capacity(pmax + 1);
        for p in 0..=pmax {
            let fjx = |q: usize| re(jx[q]);
            let fhx = |q: usize| hx[q];
            let fjz = |q: usize| jz[q];
            let djx = prime(&fjx, p, re(x));
            let dhx = prime(&fhx, p, re(x));
            let djz = prime(&fjz, p, z);
            let num_a = kappa * jx[p] * djz;
            let num_b = jz[p] * (djx * k + eta * jx[p]);
            let den_a = kappa * hx[p] * djz;
            let den_b = jz[p] * (dhx * k + eta * hx[p]);
            let den = den_a - den_b;
            let scale = den_a.norm() + den_b.norm();
            if !(den.norm() > T::epsilon() * T::lit(4.0) * scale) {
                return Err(Error::Resonance {
                    order: p as i32,
                    k: k.to_f64().unwrap_or(f64::NAN),
                });
            }
            out.push(-(num_a - num_b) / den);
        }
        Ok(out)
    }

    /// `a_p` for any integer `p`; the coefficients are even in `p`.
    pub fn mie_coefficient(&self, p: i32) -> Result<Cx<T>> {
        let n = p.unsigned_abs() as usize;
        Ok(self.coefficients(n)?[n])
    }

    /// Smallest order passing the tail test, searched from `ceil(kR) + 20` in
    /// steps of ten.
    pub fn auto_order(&self) -> Result<usize> {
        let kr = (self.medium.k * self.radius).to_f64().unwrap_or(f64::INFINITY);
        let mut pmax = kr.ceil() as usize + 20;
        loop {
            let capped = pmax.min(MAX_SERIES_ORDER);
            let a = self.coefficients(capped)?;
            let tail_ok = a[capped.saturating_sub(2)..]
                .iter()
                .all(|v| v.norm() < T::lit(TAIL_BOUND));
            if tail_ok {
                return Ok(capped);
            }
            if capped == MAX_SERIES_ORDER {
                return Err(Error::Truncation {
                    cap: MAX_SERIES_ORDER as i32,
                });
            }
            pmax += ORDER_STEP;
        }
    }

    /// Series far field with coefficients precomputed.
    pub fn far_field(&self, pmax: Option<usize>) -> Result<DiskFarField<T>> {
        let pmax = match pmax {
            Some(p) => p,
            None => self.auto_order()?,
        };
        Ok(DiskFarField {
            coefficients: self.coefficients(pmax)?,
        })
    }
}

/// Truncated far-field series `(4/i) sum_{|p| <= pmax} a_p e^{ip t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskFarField<T> {
    pub coefficients: Vec<Cx<T>>,
}

impl<T: Real> DiskFarField<T> {
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Value at the angle difference `theta - phi`.
    pub fn at_difference(&self, diff: T) -> Cx<T> {
        let mut sum = self.coefficients[0];
        for (p, a) in self.coefficients.iter().enumerate().skip(1) {
            sum += *a * (T::lit(2.0) * (T::from_usize_lossy(p) * diff).cos());
        }
        // 4 / i = -4 i
        sum * cx(T::zero(), -T::lit(4.0))
    }

    pub fn value(&self, obs_angle: T, inc_angle: T) -> Cx<T> {
        self.at_difference(obs_angle - inc_angle)
    }
}

/// `u_inf(theta, phi)` for the disk; `pmax = None` selects the order automatically.
pub fn far_field_series<T: Real>(
    disk: &DiskScatterer<T>,
    obs_angle: T,
    inc_angle: T,
    pmax: Option<usize>,
) -> Result<Cx<T>> {
    Ok(disk.far_field(pmax)?.value(obs_angle, inc_angle))
}

/// Exact far-field matrix on `n` equispaced directions. Entry `(i, j)`
/// depends only on `(i - j) mod n`.
pub fn analytic_matrix<T: Real>(disk: &DiskScatterer<T>, n: usize) -> Result<FarFieldMatrix<T>> {
    if n < 2 {
        return Err(Error::Parameter(format!("need at least 2 directions, got {n}")));
    }
    let series = disk.far_field(None)?;
    let step = T::TAU() / T::from_usize_lossy(n);
    let column: Vec<Cx<T>> = (0..n)
        .map(|d| series.at_difference(step * T::from_usize_lossy(d)))
        .collect();
    let entries = ComplexMatrix::from_fn(n, n, |i, j| column[(i + n - j) % n]);
    FarFieldMatrix::new(disk.medium.k, entries)
}

/// `|| F_exact - F ||_2` on the same direction grid.
pub fn far_field_error<T: Real>(ff: &FarFieldMatrix<T>, disk: &DiskScatterer<T>) -> Result<T> {
    let k = disk.medium.k;
    if (ff.k - k).abs() > T::tol(1e-12) * k {
        return Err(Error::Metadata(format!(
            "far-field wavenumber {} differs from disk wavenumber {k}",
            ff.k
        )));
    }
    let exact = analytic_matrix(disk, ff.n())?;
    Ok(spectral_norm(&exact.entries.sub(&ff.entries)?))
}

/// The validation metric on the 64-direction grid.
pub fn validation_error<T: Real>(curve_ff: &FarFieldMatrix<T>, disk: &DiskScatterer<T>) -> Result<T> {
    if curve_ff.n() != VALIDATION_DIRECTIONS {
        return Err(Error::Metadata(format!(
            "expected {VALIDATION_DIRECTIONS} directions, got {}",
            curve_ff.n()
        )));
    }
    far_field_error(curve_ff, disk)
}
