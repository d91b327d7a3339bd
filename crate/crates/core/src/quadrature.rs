//! Gauss rules on `[0, 1]`: plain Legendre and the `-ln x` weight.

use crate::error::Result;
use crate::linops::{hermitian_eig, ComplexMatrix};
use crate::scalar::{Cx, Real};

/// Nodes and weights of a quadrature rule on an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> Rule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Affine image of a rule on `[0, 1]` onto `[a, b]`.
    pub fn mapped(&self, a: T, b: T) -> Self {
        let h = b - a;
        Self {
            nodes: self.nodes.iter().map(|&x| a + h * x).collect(),
            weights: self.weights.iter().map(|&w| w * h).collect(),
        }
    }
}

/// `n`-point Gauss-Legendre rule on `[0, 1]`, nodes ascending.
pub fn gauss_legendre<T: Real>(n: usize) -> Rule<T> {
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = T::from_usize_lossy(n);
    let half = T::lit(0.5);
    for i in 0..(n + 1) / 2 {
        // Newton iteration for the i-th root of P_n on [-1, 1], counted from +1
        let mut x = (T::PI() * (T::from_usize_lossy(i) + T::lit(0.75)) / (nf + half)).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= T::epsilon() * T::lit(2.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d.is_finite() { d } else { dp };
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        // map to [0, 1]
        nodes[n - 1 - i] = half * (T::one() + x);
        nodes[i] = half * (T::one() - x);
        weights[n - 1 - i] = half * w;
        weights[i] = half * w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = half;
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (T::one(), T::zero());
    }
    for k in 2..=n {
        let kf = T::from_usize_lossy(k);
        let p2 = ((kf + kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_usize_lossy(n);
    (p1, nf * (x * p1 - p0) / (x * x - T::one()))
}

/// `n`-point Gauss rule for `int_0^1 f(x) (-ln x) dx`.
///
/// Recurrence coefficients come from the modified Chebyshev algorithm with
/// shifted Legendre modified moments
/// `m_0 = 1`, `m_k = (-1)^k (k!)^2 / (k (k+1) (2k)!)`, and the rule from the
/// eigenvalues of the resulting Jacobi matrix. The construction is
/// ill-conditioned, so it always runs in `f64` and is rounded to `T`.
pub fn gauss_log<T: Real>(n: usize) -> Result<Rule<T>> {
    let rule = modified_chebyshev_log::<f64>(n)?;
    Ok(Rule {
        nodes: rule.nodes.into_iter().map(T::lit).collect(),
        weights: rule.weights.into_iter().map(T::lit).collect(),
    })
}

fn modified_chebyshev_log<T: Real>(n: usize) -> Result<Rule<T>> {
    if n == 0 {
        return Ok(Rule {
            nodes: vec![],
            weights: vec![],
        });
    }
    let moments = log_moments::<T>(2 * n);
    // monic shifted Legendre: a_k = 1/2, b_k = k^2 / (4 (4 k^2 - 1))
    let a = |_: usize| T::lit(0.5);
    let b = |k: usize| {
        let kf = T::from_usize_lossy(k);
        kf * kf / (T::lit(4.0) * (T::lit(4.0) * kf * kf - T::one()))
    };

    let mut alpha = vec![T::zero(); n];
    let mut beta = vec![T::zero(); n];
    alpha[0] = a(0) + moments[1] / moments[0];
    beta[0] = moments[0];
    let mut sigma_prev = vec![T::zero(); 2 * n];
    let mut sigma = moments.clone();
    for k in 1..n {
        let mut next = vec![T::zero(); 2 * n];
        for l in k..(2 * n - k) {
            next[l] = sigma[l + 1] - (alpha[k - 1] - a(l)) * sigma[l] - beta[k - 1] * sigma_prev[l]
                + b(l) * sigma[l - 1];
        }
        alpha[k] = a(k) + next[k + 1] / next[k] - sigma[k] / sigma[k - 1];
        beta[k] = next[k] / sigma[k - 1];
        sigma_prev = sigma;
        sigma = next;
    }

    let jacobi = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Cx::new(alpha[i], T::zero())
        } else if i + 1 == j {
            Cx::new(beta[j].sqrt(), T::zero())
        } else if j + 1 == i {
            Cx::new(beta[i].sqrt(), T::zero())
        } else {
            Cx::default()
        }
    });
    let eig = hermitian_eig(&jacobi, T::epsilon())?;
    let mut pairs: Vec<(T, T)> = (0..n)
        .map(|k| (eig.values[k], beta[0] * eig.vectors[(0, k)].norm_sqr()))
        .collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    Ok(Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

fn log_moments<T: Real>(count: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(count);
    out.push(T::one());
    // (k!)^2 / (2k)! updated by the factor k / (2 (2k - 1))
    let mut ratio = T::one();
    for k in 1..count {
        let kf = T::from_usize_lossy(k);
        ratio = ratio * kf / (T::lit(2.0) * (T::lit(2.0) * kf - T::one()));
        let sign = if k % 2 == 0 { T::one() } else { -T::one() };
        out.push(sign * ratio / (kf * (kf + T::one())));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_exact_for_polynomials() {
        for n in 1..=32 {
            let r = gauss_legendre::<f64>(n);
            for m in 0..(2 * n) {
                let v = r.integrate(|x| x.powi(m as i32));
                let expect = 1.0 / (m as f64 + 1.0);
                assert!((v - expect).abs() < 1e-14, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn legendre_single_point_is_midpoint() {
        let r = gauss_legendre::<f64>(1);
        assert_eq!(r.nodes, vec![0.5]);
        assert_eq!(r.weights, vec![1.0]);
    }

    #[test]
    fn legendre_symmetric() {
        let r = gauss_legendre::<f64>(32);
        for i in 0..32 {
            assert!((r.nodes[i] + r.nodes[31 - i] - 1.0).abs() < 1e-15);
            assert!((r.weights[i] - r.weights[31 - i]).abs() < 1e-15);
        }
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn log_rule_exact_for_polynomials() {
        // int_0^1 x^m (-ln x) dx = 1 / (m+1)^2
        for n in [1, 2, 4, 8, 12, 16] {
            let r = gauss_log::<f64>(n).unwrap();
            assert!(r.nodes.iter().all(|&x| x > 0.0 && x < 1.0));
            assert!(r.weights.iter().all(|&w| w > 0.0));
            for m in 0..(2 * n) {
                let v = r.integrate(|x| x.powi(m as i32));
                let expect = 1.0 / ((m as f64 + 1.0) * (m as f64 + 1.0));
                assert!((v - expect).abs() < 1e-13, "n={n} m={m} v={v}");
            }
        }
    }

    #[test]
    fn log_rule_on_smooth_integrand() {
        // int_0^1 cos(x) (-ln x) dx = Si(1) = 0.946083070367183...
        let r = gauss_log::<f64>(12).unwrap();
        let v = r.integrate(f64::cos);
        assert!((v - 0.946_083_070_367_183_0).abs() < 1e-14);
    }
}
