//! One-dimensional quadrature: the composite trapezoid rule on mesh nodes,
//! its explicit-partition form with the classical error bound, and
//! Gauss-Legendre rules of arbitrary order.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mesh::Mesh1D;

/// Gauss-Legendre rule on the reference interval `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    points: Vec<f64>,
    weights: Vec<f64>,
}

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

impl GaussRule {
    /// Nodes are the roots of `P_order`, found by Newton iteration from the
    /// Chebyshev-like initial guess; weights are `2 / ((1 - x^2) P'(x)^2)`.
    pub fn legendre(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("Gauss rule order must be >= 1".into()));
        }
        let n = order;
        let mut points = vec![0.0; n];
        let mut weights = vec![0.0; n];
        // roots are symmetric; compute the upper half and reflect
        let half = n.div_ceil(2);
        for i in 0..half {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..NEWTON_MAX_ITER {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < NEWTON_TOL {
                    dp = legendre_with_derivative(n, x).1;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            points[n - 1 - i] = x;
            points[i] = -x;
            weights[n - 1 - i] = w;
            weights[i] = w;
        }
        if n % 2 == 1 {
            points[n / 2] = 0.0;
        }
        Ok(GaussRule { points, weights })
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Affine map to `[a, b]`: yields `(x, w)` pairs.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.points
            .iter()
            .zip(&self.weights)
            .map(move |(&t, &w)| (mid + half * t, half * w))
    }

    /// Integrates `g` over `[a, b]` without argument checks.
    #[inline]
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F, a: f64, b: f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * g(x)).sum()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, dp)
}

/// Gauss-Legendre integration of `g` over `[a, b]` with `order` points.
pub fn gauss_integrate<F: Fn(f64) -> f64>(g: F, a: f64, b: f64, order: usize) -> Result<f64> {
    if !(a < b) {
        return Err(Error::InvalidArgument(format!("need a < b, got [{a}, {b}]")));
    }
    Ok(GaussRule::legendre(order)?.integrate(g, a, b))
}

/// Composite trapezoid rule on the mesh nodes for a function vanishing at
/// both ends, given by its interior values: `sum theta_i (h_i + h_{i+1}) / 2`.
pub fn ctr(theta_interior: &[f64], mesh: &Mesh1D) -> Result<f64> {
    if theta_interior.len() != mesh.interior_len() {
        return Err(Error::LengthMismatch {
            expected: mesh.interior_len(),
            found: theta_interior.len(),
        });
    }
    let h = mesh.widths();
    Ok(theta_interior
        .iter()
        .enumerate()
        .map(|(i, &t)| t * (h[i] + h[i + 1]) / 2.0)
        .sum())
}

/// Trapezoid sum of `theta` over an explicit partition `t_0 < ... < t_m`,
/// endpoint values included.
pub fn ctr_interval<F: Fn(f64) -> f64>(theta: F, partition: &[f64]) -> Result<f64> {
    if partition.len() < 2 {
        return Err(Error::InvalidArgument("partition needs at least two points".into()));
    }
    if let Some(w) = partition.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument(format!(
            "partition is not strictly increasing at {} -> {}",
            w[0], w[1]
        )));
    }
    let values: Vec<f64> = partition.iter().map(|&t| theta(t)).collect();
    Ok(partition
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| (t[1] - t[0]) * (v[0] + v[1]) / 2.0)
        .sum())
}

/// `(length / 12) h^2 sup|theta''|`, the classical composite trapezoid error bound.
pub fn ctr_error_bound(h: f64, length: f64, theta_second_sup: f64) -> Result<f64> {
    for (name, v) in [("h", h), ("length", length), ("sup|theta''|", theta_second_sup)] {
        if !(v >= 0.0) {
            return Err(Error::InvalidArgument(format!("{name} must be nonnegative, got {v}")));
        }
    }
    Ok(length / 12.0 * h * h * theta_second_sup)
}

/// Sample count used by [`estimate_sup`].
pub const SUP_SAMPLES: usize = 2048;

/// Estimated `max |g|` over `[a, b]` from [`SUP_SAMPLES`] equispaced samples
/// (endpoints included). An estimate, not a certified supremum.
pub fn estimate_sup<F: Fn(f64) -> f64>(g: F, a: f64, b: f64) -> f64 {
    let m = SUP_SAMPLES - 1;
    (0..=m)
        .map(|k| g(a + (b - a) * k as f64 / m as f64).abs())
        .fold(0.0, f64::max)
}
