//! Cylindrical Bessel and Hankel functions of integer order.
//!
//! `J_n` is computed from a single backward (Miller) recurrence sweep,
//! normalized with the Jacobi-Anger sums
//!
//! ```text
//! 1       = J_0(x) + 2 sum_k J_2k(x)            (real x)
//! e^{-iz} = J_0(z) + 2 sum_k (-i)^k J_k(z)      (complex z, Im z >= 0)
//! ```
//!
//! and replaced by the ascending series for `|z| < 1`. `Y_0`, `Y_1` come
//! from the Neumann series
//!
//! ```text
//! Y_0(z) = (2/pi) (ln(z/2) + gamma) J_0(z) - (4/pi) sum_k (-1)^k J_2k(z) / k
//! ```
//!
//! and its derivative, so the whole family shares one `J` sweep. Higher
//! orders of `Y` use forward recurrence, which is stable for that family.

use crate::error::{Error, Result};
use crate::scalar::{cx, i_unit, re, Cx, Real};

/// Largest supported `|order|`.
pub const MAX_ORDER: i32 = 60;

/// Largest supported `|argument|`.
pub const MAX_ARGUMENT: f64 = 1.0e4;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this modulus the ascending series replaces the Miller sweep.
const SERIES_RADIUS: f64 = 1.0;

fn check_order(p: i32) -> Result<usize> {
    if p.abs() > MAX_ORDER {
        return Err(Error::UnsupportedOrder {
            order: p,
            max: MAX_ORDER,
        });
    }
    Ok(p.unsigned_abs() as usize)
}

fn check_argument<T: Real>(modulus: T) -> Result<()> {
    if !modulus.is_finite() || modulus > T::lit(MAX_ARGUMENT) {
        return Err(Error::Domain(format!(
            "|x| = {modulus} exceeds the supported range {MAX_ARGUMENT}"
        )));
    }
    Ok(())
}

#[inline]
fn parity_sign(p: i32) -> bool {
    p < 0 && p % 2 != 0
}

/// Miller start index for orders up to `nmax` at argument modulus `absz`.
fn miller_start(nmax: usize, absz: f64) -> usize {
    let top = (nmax as f64).max(absz);
    let m = top.ceil() as usize + 20 + (40.0 * top).sqrt().ceil() as usize;
    m + (m & 1)
}

/// Orders of `J_2k` retained by the Neumann series for `Y_0`.
fn neumann_len(absz: f64) -> usize {
    absz.ceil() as usize + 24 + (30.0 * absz).sqrt().ceil() as usize
}

/// Ascending series for `J_0 .. J_nmax` at complex `z`. Intended for `|z| < 1`.
fn series_sequence<T: Real>(nmax: usize, z: Cx<T>) -> Vec<Cx<T>> {
    let half = z * T::lit(0.5);
    let q = -half * half;
    let mut out = Vec::with_capacity(nmax + 1);
    // (z/2)^n / n!
    let mut lead = re(T::one());
    for n in 0..=nmax {
        if n > 0 {
            lead = lead * half / T::from_usize_lossy(n);
        }
        let mut term = re(T::one());
        let mut sum = term;
        for k in 1..60 {
            let kf = T::from_usize_lossy(k);
            term = term * q / (kf * (kf + T::from_usize_lossy(n)));
            sum += term;
            if term.norm() <= T::epsilon() * sum.norm() {
                break;
            }
        }
        out.push(lead * sum);
    }
    out
}

/// `J_0 .. J_nmax` at complex `z` with `Im z >= 0`.
fn miller_complex<T: Real>(nmax: usize, start: usize, z: Cx<T>) -> Vec<Cx<T>> {
    let big = T::max_value().sqrt();
    let inv_big = big.recip();
    let two_over_z = z.inv() * T::lit(2.0);

    let mut stored = vec![Cx::<T>::default(); nmax + 1];
    let mut above = re(T::zero());
    let mut cur = re(T::epsilon().sqrt());
    // (-i)^m cycles with period four.
    let phase = [
        re(T::one()),
        cx(T::zero(), -T::one()),
        re(-T::one()),
        cx(T::zero(), T::one()),
    ];
    let mut norm_sum = re(T::zero());
    for m in (0..=start).rev() {
        if m <= nmax {
            stored[m] = cur;
        }
        if m == 0 {
            norm_sum += cur;
        } else {
            norm_sum += phase[m % 4] * cur * T::lit(2.0);
        }
        if m == 0 {
            break;
        }
        let below = two_over_z * T::from_usize_lossy(m) * cur - above;
        above = cur;
        cur = below;
        if cur.norm() > big {
            cur = cur * inv_big;
            above = above * inv_big;
            norm_sum = norm_sum * inv_big;
            for v in stored.iter_mut().skip(m.saturating_sub(1)) {
                *v = *v * inv_big;
            }
        }
    }
    // divide by the modulus first: |norm_sum|^2 can overflow in single precision
    let modulus = norm_sum.norm();
    let scale = (-i_unit::<T>() * z).exp() * (norm_sum / modulus).conj() / modulus;
    stored.iter().map(|&v| v * scale).collect()
}

/// `J_0 .. J_nmax` at real `x > 0`.
fn miller_real<T: Real>(nmax: usize, x: T) -> Vec<T> {
    let start = miller_start(nmax, x.to_f64().unwrap_or(0.0));
    let big = T::max_value().sqrt();
    let inv_big = big.recip();
    let two_over_x = T::lit(2.0) / x;

    let mut stored = vec![T::zero(); nmax + 1];
    let mut above = T::zero();
    let mut cur = T::epsilon().sqrt();
    let mut norm_sum = T::zero();
    for m in (0..=start).rev() {
        if m <= nmax {
            stored[m] = cur;
        }
        if m == 0 {
            norm_sum += cur;
            break;
        }
        if m % 2 == 0 {
            norm_sum += T::lit(2.0) * cur;
        }
        let below = two_over_x * T::from_usize_lossy(m) * cur - above;
        above = cur;
        cur = below;
        if cur.abs() > big {
            cur *= inv_big;
            above *= inv_big;
            norm_sum *= inv_big;
            for v in stored.iter_mut().skip(m.saturating_sub(1)) {
                *v *= inv_big;
            }
        }
    }
    stored.iter().map(|&v| v / norm_sum).collect()
}

/// `J_0(z) .. J_nmax(z)` for any complex `z` in range.
pub fn bessel_j_sequence<T: Real>(nmax: usize, z: Cx<T>) -> Result<Vec<Cx<T>>> {
    check_argument(z.norm())?;
    if z.im < T::zero() {
        // J_n(conj z) = conj J_n(z)
        return Ok(bessel_j_sequence(nmax, z.conj())?
            .into_iter()
            .map(|v| v.conj())
            .collect());
    }
    if z.norm() < T::lit(SERIES_RADIUS) {
        Ok(series_sequence(nmax, z))
    } else {
        let start = miller_start(nmax, z.norm().to_f64().unwrap_or(0.0));
        Ok(miller_complex(nmax, start, z))
    }
}

/// `J_0(x) .. J_nmax(x)` for real `x` in range (real arithmetic throughout).
pub fn bessel_j_sequence_real<T: Real>(nmax: usize, x: T) -> Result<Vec<T>> {
    check_argument(x.abs())?;
    if x < T::zero() {
        // J_n(-x) = (-1)^n J_n(x)
        let mut seq = bessel_j_sequence_real(nmax, -x)?;
        seq.iter_mut().skip(1).step_by(2).for_each(|v| *v = -*v);
        return Ok(seq);
    }
    if x < T::lit(SERIES_RADIUS) {
        Ok(series_sequence(nmax, re(x)).into_iter().map(|v| v.re).collect())
    } else {
        Ok(miller_real(nmax, x))
    }
}

/// `J_p(z)` for complex `z`; negative orders via `J_{-p} = (-1)^p J_p`.
pub fn bessel_j<T: Real>(p: i32, z: Cx<T>) -> Result<Cx<T>> {
    let n = check_order(p)?;
    let v = bessel_j_sequence(n, z)?[n];
    Ok(if parity_sign(p) { -v } else { v })
}

/// `J_p(x)` for real `x`.
pub fn bessel_j_real<T: Real>(p: i32, x: T) -> Result<T> {
    let n = check_order(p)?;
    let v = bessel_j_sequence_real(n, x)?[n];
    Ok(if parity_sign(p) { -v } else { v })
}

/// `J_p'(z) = (J_{p-1}(z) - J_{p+1}(z)) / 2`.
pub fn bessel_j_prime<T: Real>(p: i32, z: Cx<T>) -> Result<Cx<T>> {
    let n = check_order(p)?;
    let seq = bessel_j_sequence(n + 1, z)?;
    let lower = if n == 0 { -seq[1] } else { seq[n - 1] };
    let d = (lower - seq[n + 1]) * T::lit(0.5);
    Ok(if parity_sign(p) { -d } else { d })
}

/// `J_0, J_1, Y_0, Y_1` at a common argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cylinder01<T: Real> {
    pub j0: Cx<T>,
    pub j1: Cx<T>,
    pub y0: Cx<T>,
    pub y1: Cx<T>,
}

impl<T: Real> Cylinder01<T> {
    pub fn h0(&self) -> Cx<T> {
        self.j0 + i_unit::<T>() * self.y0
    }

    pub fn h1(&self) -> Cx<T> {
        self.j1 + i_unit::<T>() * self.y1
    }
}

/// Orders zero and one of `J`, `Y` at complex `z` with `z != 0` and `z` off the
/// negative real axis.
///
/// The interior single-layer operator of a lossy medium evaluates the
/// fundamental solution at `k sqrt(n) |x - y|`, which is complex.
pub fn cylinder01<T: Real>(z: Cx<T>) -> Result<Cylinder01<T>> {
    let absz = z.norm();
    if absz == T::zero() || (z.im == T::zero() && z.re < T::zero()) {
        return Err(Error::Domain(format!(
            "Y is singular or on its branch cut at z = {z}"
        )));
    }
    check_argument(absz)?;
    if z.im < T::zero() {
        let c = cylinder01(z.conj())?;
        return Ok(Cylinder01 {
            j0: c.j0.conj(),
            j1: c.j1.conj(),
            y0: c.y0.conj(),
            y1: c.y1.conj(),
        });
    }
    let len = neumann_len(absz.to_f64().unwrap_or(0.0));
    // Orders past `len` are negligible, so the sweep may start just above it.
    let j = if absz < T::lit(SERIES_RADIUS) {
        series_sequence(len + 1, z)
    } else {
        miller_complex(len + 1, len + 12 + (len & 1), z)
    };
    let two_over_pi = T::lit(2.0) * T::FRAC_1_PI();
    let four_over_pi = T::lit(2.0) * two_over_pi;
    let log_term = (z * T::lit(0.5)).ln() + T::lit(EULER_GAMMA);

    // sum_k (-1)^k J_2k / k and its derivative sum_k (-1)^k J_2k' / k
    let mut sum = re(T::zero());
    let mut dsum = re(T::zero());
    let mut k = 1;
    while 2 * k < len {
        let sign = if k % 2 == 0 { T::one() } else { -T::one() };
        let kf = T::from_usize_lossy(k);
        sum += j[2 * k] * (sign / kf);
        let dj = (j[2 * k - 1] - j[2 * k + 1]) * T::lit(0.5);
        dsum += dj * (sign / kf);
        k += 1;
    }
    let y0 = log_term * j[0] * two_over_pi - sum * four_over_pi;
    // Y_1 = -Y_0'
    let dy0 = (j[0] / z - log_term * j[1]) * two_over_pi - dsum * four_over_pi;
    Ok(Cylinder01 {
        j0: j[0],
        j1: j[1],
        y0,
        y1: -dy0,
    })
}

/// `H_0^(1)(z)` and `H_1^(1)(z)` for complex `z` with `Im z >= 0`.
pub fn hankel01<T: Real>(z: Cx<T>) -> Result<(Cx<T>, Cx<T>)> {
    let c = cylinder01(z)?;
    Ok((c.h0(), c.h1()))
}

fn positive_argument<T: Real>(x: T) -> Result<()> {
    if x <= T::zero() || x.is_nan() {
        return Err(Error::Domain(format!(
            "Y and H require x > 0, got {x}"
        )));
    }
    Ok(())
}

/// `Y_0(x) .. Y_nmax(x)` for `x > 0`.
pub fn bessel_y_sequence<T: Real>(nmax: usize, x: T) -> Result<Vec<T>> {
    positive_argument(x)?;
    let c = cylinder01(re(x))?;
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(c.y0.re);
    if nmax >= 1 {
        out.push(c.y1.re);
    }
    for m in 1..nmax {
        let next = T::lit(2.0) * T::from_usize_lossy(m) / x * out[m] - out[m - 1];
        out.push(next);
    }
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(format!(
            "Y_{nmax}({x}) overflows the scalar range"
        )));
    }
    Ok(out)
}

/// `Y_p(x)` for `x > 0`.
pub fn bessel_y<T: Real>(p: i32, x: T) -> Result<T> {
    let n = check_order(p)?;
    let v = bessel_y_sequence(n, x)?[n];
    Ok(if parity_sign(p) { -v } else { v })
}

/// `H_0^(1)(x) .. H_nmax^(1)(x)` for `x > 0`.
pub fn hankel1_sequence<T: Real>(nmax: usize, x: T) -> Result<Vec<Cx<T>>> {
    let y = bessel_y_sequence(nmax, x)?;
    let j = bessel_j_sequence_real(nmax, x)?;
    Ok(j.into_iter().zip(y).map(|(j, y)| cx(j, y)).collect())
}

/// `H_p^(1)(x) = J_p(x) + i Y_p(x)` for `x > 0`.
pub fn hankel1<T: Real>(p: i32, x: T) -> Result<Cx<T>> {
    let n = check_order(p)?;
    let v = hankel1_sequence(n, x)?[n];
    Ok(if parity_sign(p) { -v } else { v })
}

/// `H_p^(1)'(x)` by the order recurrence.
pub fn hankel1_prime<T: Real>(p: i32, x: T) -> Result<Cx<T>> {
    let n = check_order(p)?;
    let seq = hankel1_sequence(n + 1, x)?;
    let lower = if n == 0 { -seq[1] } else { seq[n - 1] };
    let d = (lower - seq[n + 1]) * T::lit(0.5);
    Ok(if parity_sign(p) { -d } else { d })
}

/// `j_0(x) = sin(x) / x`, with `j_0(0) = 1`.
pub fn spherical_j0<T: Real>(x: T) -> T {
    if x == T::zero() {
        T::one()
    } else {
        x.sin() / x
    }
}

/// `J_p(z)` for `|p| <= nmax` returned for every order `-nmax..=nmax`.
///
/// Index `p + nmax` holds order `p`.
pub fn bessel_j_symmetric<T: Real>(nmax: usize, z: Cx<T>) -> Result<Vec<Cx<T>>> {
    let pos = bessel_j_sequence(nmax, z)?;
    let mut out = Vec::with_capacity(2 * nmax + 1);
    for p in (1..=nmax).rev() {
        out.push(if p % 2 == 1 { -pos[p] } else { pos[p] });
    }
    out.extend_from_slice(&pos);
    Ok(out)
}
