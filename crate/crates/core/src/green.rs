//! Green function of `-u'' = f` on `(0, 1)` with homogeneous Dirichlet data,
//! the scaled hat `phi_s`, and the dense Green matrix over interior nodes.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::mesh::Mesh1D;

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidArgument(format!("{name} = {v} is outside [0, 1]")));
    }
    Ok(())
}

/// `G(x, s) = s(1 - x)` for `s <= x`, `x(1 - s)` otherwise.
pub fn green_eval(x: f64, s: f64) -> Result<f64> {
    check_unit("x", x)?;
    check_unit("s", s)?;
    Ok(green_unchecked(x, s))
}

#[inline]
pub(crate) fn green_unchecked(x: f64, s: f64) -> f64 {
    if s <= x {
        s * (1.0 - x)
    } else {
        x * (1.0 - s)
    }
}

/// The hat function on the two-element mesh `{0, s, 1}`: `x/s` on `[0, s]`,
/// `(1 - x)/(1 - s)` on `(s, 1]`.
pub fn phi_s_eval(s: f64, x: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidArgument(format!("hat peak s = {s} must lie in (0, 1)")));
    }
    check_unit("x", x)?;
    Ok(if x <= s { x / s } else { (1.0 - x) / (1.0 - s) })
}

/// Dense symmetric `(n-1) x (n-1)` matrix `G(x_i, x_j)` over interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl GreenMatrix {
    pub fn new(mesh: &Mesh1D) -> Self {
        Self::with_execution(mesh, Execution::default())
    }

    /// Builds the lower triangle and mirrors it, so symmetry is exact.
    pub fn with_execution(mesh: &Mesh1D, exec: Execution) -> Self {
        let x = mesh.interior();
        let dim = x.len();
        let rows = exec.map_indexed(dim, |i| {
            (0..=i).map(|j| green_unchecked(x[i], x[j])).collect::<Vec<f64>>()
        });
        let mut entries = vec![0.0; dim * dim];
        for (i, row) in rows.iter().enumerate() {
            for (j, &g) in row.iter().enumerate() {
                entries[i * dim + j] = g;
                entries[j * dim + i] = g;
            }
        }
        GreenMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.matvec_with(v, Execution::default())
    }

    pub fn matvec_with(&self, v: &[f64], exec: Execution) -> Result<Vec<f64>> {
        if v.len() != self.dim {
            return Err(Error::LengthMismatch { expected: self.dim, found: v.len() });
        }
        Ok(exec.map_indexed(self.dim, |i| {
            self.row(i).iter().zip(v).map(|(g, b)| g * b).sum()
        }))
    }
}

/// Convenience wrapper for [`GreenMatrix::new`].
pub fn green_matrix(mesh: &Mesh1D) -> GreenMatrix {
    GreenMatrix::new(mesh)
}
