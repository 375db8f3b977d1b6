//! The stiffness matrix shared by the finite-difference and finite-element
//! systems, the trapezoid weight matrix, both load vectors, and a direct
//! tridiagonal solver.

use crate::error::{Error, Result};
use crate::mesh::Mesh1D;
use crate::quadrature::GaussRule;

/// Default Gauss order for element integrals of `f * phi_j`.
pub const DEFAULT_QUAD_ORDER: usize = 10;

/// Pivot magnitude below which elimination is declared broken.
pub const PIVOT_FLOOR: f64 = 1e-300;

/// Coefficients `(c_minus, c_center, c_plus)` of the three-point
/// approximation of `-u''(x_j)` from the quadratic through
/// `x_{j-1}, x_j, x_{j+1}`, with `h_left = x_j - x_{j-1}` and
/// `h_right = x_{j+1} - x_j`.
pub fn fd_stencil(h_left: f64, h_right: f64) -> Result<(f64, f64, f64)> {
    if !(h_left > 0.0 && h_right > 0.0) || !h_left.is_finite() || !h_right.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "stencil widths must be positive, got ({h_left}, {h_right})"
        )));
    }
    let sum = h_left + h_right;
    Ok((
        -2.0 / (h_left * sum),
        2.0 / (h_left * h_right),
        -2.0 / (h_right * sum),
    ))
}

/// Tridiagonal `m x m` matrix in band storage.
#[derive(Debug, Clone, PartialEq)]
pub struct TriDiagonalMatrix {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl TriDiagonalMatrix {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let m = diag.len();
        if m == 0 {
            return Err(Error::InvalidArgument("empty tridiagonal matrix".into()));
        }
        for band in [&lower, &upper] {
            if band.len() != m - 1 {
                return Err(Error::LengthMismatch { expected: m - 1, found: band.len() });
            }
        }
        Ok(TriDiagonalMatrix { lower, diag, upper })
    }

    /// `S`: diagonal `1/h_j + 1/h_{j+1}`, off-diagonals `-1/h_{j+1}`.
    pub fn stiffness(mesh: &Mesh1D) -> Self {
        let h = mesh.widths();
        let m = mesh.interior_len();
        let diag = (0..m).map(|i| 1.0 / h[i] + 1.0 / h[i + 1]).collect();
        let off: Vec<f64> = (1..m).map(|i| -1.0 / h[i]).collect();
        TriDiagonalMatrix { lower: off.clone(), diag, upper: off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Entry `(i, j)`, zero outside the bands.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if j == i + 1 {
            self.upper[i]
        } else if i == j + 1 {
            self.lower[j]
        } else {
            0.0
        }
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        let m = self.dim();
        if v.len() != m {
            return Err(Error::LengthMismatch { expected: m, found: v.len() });
        }
        Ok((0..m)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.lower[i - 1] * v[i - 1];
                }
                if i + 1 < m {
                    s += self.upper[i] * v[i + 1];
                }
                s
            })
            .collect())
    }

    /// `alpha^T S alpha`.
    pub fn quadratic_form(&self, alpha: &[f64]) -> Result<f64> {
        Ok(self.matvec(alpha)?.iter().zip(alpha).map(|(a, b)| a * b).sum())
    }
}

/// Convenience wrapper for [`TriDiagonalMatrix::stiffness`].
pub fn stiffness(mesh: &Mesh1D) -> TriDiagonalMatrix {
    TriDiagonalMatrix::stiffness(mesh)
}

/// Diagonal of `W`: `(h_j + h_{j+1}) / 2`, which is also `\int phi_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalWeights {
    weights: Vec<f64>,
}

impl DiagonalWeights {
    pub fn new(mesh: &Mesh1D) -> Self {
        let h = mesh.widths();
        let weights = (0..mesh.interior_len()).map(|i| (h[i] + h[i + 1]) / 2.0).collect();
        DiagonalWeights { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Component-wise product `W v`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.weights.len() {
            return Err(Error::LengthMismatch { expected: self.weights.len(), found: v.len() });
        }
        Ok(self.weights.iter().zip(v).map(|(w, x)| w * x).collect())
    }
}

pub fn weight_matrix(mesh: &Mesh1D) -> DiagonalWeights {
    DiagonalWeights::new(mesh)
}

fn finite_or_err(stage: &'static str, x: f64, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { stage, x, value })
    }
}

/// Right-hand side of the scaled finite-difference system: `W f~`, i.e.
/// `(h_j + h_{j+1}) / 2 * f(x_j)`.
pub fn fd_load<F: Fn(f64) -> f64>(f: F, mesh: &Mesh1D) -> Result<Vec<f64>> {
    let w = DiagonalWeights::new(mesh);
    mesh.interior()
        .iter()
        .zip(w.weights())
        .map(|(&x, &wj)| Ok(wj * finite_or_err("fd_load", x, f(x))?))
        .collect()
}

/// Finite-element load `(f, phi_j)` by per-element Gauss quadrature of the
/// given order. Each element contributes to its two end nodes.
pub fn fe_load<F: Fn(f64) -> f64>(f: F, mesh: &Mesh1D, quad_order: usize) -> Result<Vec<f64>> {
    let rule = GaussRule::legendre(quad_order)?;
    fe_load_with_rule(&f, mesh, &rule)
}

pub(crate) fn fe_load_with_rule<F: Fn(f64) -> f64>(
    f: &F,
    mesh: &Mesh1D,
    rule: &GaussRule,
) -> Result<Vec<f64>> {
    let m = mesh.interior_len();
    let nodes = mesh.nodes();
    let mut load = vec![0.0; m];
    for (k, pair) in nodes.windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        let h = b - a;
        let (mut left, mut right) = (0.0, 0.0);
        for (x, w) in rule.mapped(a, b) {
            let fx = finite_or_err("fe_load", x, f(x))?;
            left += w * fx * (b - x) / h;
            right += w * fx * (x - a) / h;
        }
        // element k spans [x_k, x_{k+1}]; interior index of x_k is k - 1
        if k >= 1 {
            load[k - 1] += left;
        }
        if k < m {
            load[k] += right;
        }
    }
    Ok(load)
}

/// Direct elimination without pivoting; returns the solution and the
/// max-norm residual `||S y - b||_inf`.
pub fn solve_tridiagonal(s: &TriDiagonalMatrix, b: &[f64]) -> Result<(Vec<f64>, f64)> {
    let m = s.dim();
    if b.len() != m {
        return Err(Error::LengthMismatch { expected: m, found: b.len() });
    }
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut pivot = s.diag[0];
    if pivot.abs() < PIVOT_FLOOR {
        return Err(Error::Breakdown { row: 0, pivot });
    }
    if m > 1 {
        c[0] = s.upper[0] / pivot;
    }
    d[0] = b[0] / pivot;
    for i in 1..m {
        pivot = s.diag[i] - s.lower[i - 1] * c[i - 1];
        if !(pivot.abs() >= PIVOT_FLOOR) {
            return Err(Error::Breakdown { row: i, pivot });
        }
        if i + 1 < m {
            c[i] = s.upper[i] / pivot;
        }
        d[i] = (b[i] - s.lower[i - 1] * d[i - 1]) / pivot;
    }
    let mut y = d;
    for i in (0..m.saturating_sub(1)).rev() {
        y[i] -= c[i] * y[i + 1];
    }
    let sy = s.matvec(&y)?;
    let residual = sy.iter().zip(b).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok((y, residual))
}
