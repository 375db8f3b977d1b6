//! Manufactured problems, the FD and FE solves, Green-formula evaluations and
//! the structural identity checks between them.

use std::f64::consts::{E, PI};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::assembly::{self, TriDiagonalMatrix};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::green::{green_unchecked, GreenMatrix};
use crate::mesh::Mesh1D;
use crate::quadrature::GaussRule;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Gauss order on each side of the kink in [`green_point_value`].
pub const GREEN_POINT_ORDER: usize = 20;

/// A two-point problem `-u'' = f`, `u(0) = u(1) = 0`.
#[derive(Clone)]
pub struct Problem {
    name: String,
    f: ScalarFn,
    f_prime: Option<ScalarFn>,
    f_second: Option<ScalarFn>,
    u_exact: Option<ScalarFn>,
    sup_f_prime: Option<f64>,
    sup_f_second: Option<f64>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("has_u_exact", &self.u_exact.is_some())
            .field("sup_f_prime", &self.sup_f_prime)
            .field("sup_f_second", &self.sup_f_second)
            .finish()
    }
}

const CONSISTENCY_SAMPLES: usize = 64;
const CONSISTENCY_STEP: f64 = 1e-3;
const CONSISTENCY_TOL: f64 = 1e-4;

impl Problem {
    /// A problem with only a right-hand side.
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Problem {
            name: name.into(),
            f: Arc::new(f),
            f_prime: None,
            f_second: None,
            u_exact: None,
            sup_f_prime: None,
            sup_f_second: None,
        }
    }

    /// Registers the exact solution after checking `-u'' = f` at interior
    /// sample points with a central second difference.
    pub fn with_exact(mut self, u: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let d = CONSISTENCY_STEP;
        for k in 0..CONSISTENCY_SAMPLES {
            let x = d + (1.0 - 2.0 * d) * (k as f64 + 0.5) / CONSISTENCY_SAMPLES as f64;
            let second = (u(x - d) - 2.0 * u(x) + u(x + d)) / (d * d);
            let residual = (-second - (self.f)(x)).abs();
            if !(residual <= CONSISTENCY_TOL) {
                return Err(Error::InconsistentProblem { name: self.name, x, residual });
            }
        }
        self.u_exact = Some(Arc::new(u));
        Ok(self)
    }

    pub fn with_derivatives(
        mut self,
        f_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f_second: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.f_prime = Some(Arc::new(f_prime));
        self.f_second = Some(Arc::new(f_second));
        self
    }

    /// Closed-form `||f'||_inf` and `||f''||_inf`.
    pub fn with_sup_norms(mut self, sup_f_prime: f64, sup_f_second: f64) -> Self {
        self.sup_f_prime = Some(sup_f_prime);
        self.sup_f_second = Some(sup_f_second);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn f(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn rhs(&self) -> &ScalarFn {
        &self.f
    }

    pub fn u_exact(&self) -> Option<&ScalarFn> {
        self.u_exact.as_ref()
    }

    pub fn f_prime(&self) -> Option<&ScalarFn> {
        self.f_prime.as_ref()
    }

    pub fn f_second(&self) -> Option<&ScalarFn> {
        self.f_second.as_ref()
    }

    pub fn registered_sup_f_prime(&self) -> Option<f64> {
        self.sup_f_prime
    }

    pub fn registered_sup_f_second(&self) -> Option<f64> {
        self.sup_f_second
    }

    pub fn require_exact(&self) -> Result<&ScalarFn> {
        self.u_exact
            .as_ref()
            .ok_or_else(|| Error::MissingExactSolution(self.name.clone()))
    }

    /// The built-in catalog: `constant`, `sine`, `cubic`, `bump`.
    pub fn builtin(name: &str) -> Result<Self> {
        let p = match name {
            "constant" => Problem::new("constant", |_| 1.0)
                .with_exact(|x| x * (1.0 - x) / 2.0)?
                .with_derivatives(|_| 0.0, |_| 0.0)
                .with_sup_norms(0.0, 0.0),
            "sine" => Problem::new("sine", |x| PI * PI * (PI * x).sin())
                .with_exact(|x| (PI * x).sin())?
                .with_derivatives(|x| PI.powi(3) * (PI * x).cos(), |x| -PI.powi(4) * (PI * x).sin())
                .with_sup_norms(PI.powi(3), PI.powi(4)),
            // u = x(1 - x)(1 + x)/2 = (x - x^3)/2
            "cubic" => Problem::new("cubic", |x| 3.0 * x)
                .with_exact(|x| (x - x * x * x) / 2.0)?
                .with_derivatives(|_| 3.0, |_| 0.0)
                .with_sup_norms(3.0, 0.0),
            // u = x(1 - x) e^x; f' and f'' are positive and increasing on [0, 1]
            "bump" => Problem::new("bump", |x| x * (x + 3.0) * x.exp())
                .with_exact(|x| x * (1.0 - x) * x.exp())?
                .with_derivatives(
                    |x| (x * x + 5.0 * x + 3.0) * x.exp(),
                    |x| (x * x + 7.0 * x + 8.0) * x.exp(),
                )
                .with_sup_norms(9.0 * E, 16.0 * E),
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown problem '{other}' (known: {})",
                    Self::BUILTIN_NAMES.join(", ")
                )))
            }
        };
        Ok(p)
    }

    pub const BUILTIN_NAMES: [&'static str; 4] = ["constant", "sine", "cubic", "bump"];

    pub fn catalog() -> Vec<Problem> {
        Self::BUILTIN_NAMES
            .iter()
            .map(|n| Self::builtin(n).expect("built-in problems are consistent"))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fd,
    Fe,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Fd => "fd",
            Method::Fe => "fe",
        })
    }
}

/// Interior nodal values `[u_1 .. u_{n-1}]` of a discrete solution.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalSolution {
    pub values: Vec<f64>,
    pub mesh: Mesh1D,
    pub method: Method,
    /// `||S u - rhs||_inf`
    pub residual: f64,
    /// `||rhs||_inf`
    pub rhs_norm: f64,
}

impl NodalSolution {
    pub fn relative_residual(&self) -> f64 {
        if self.rhs_norm == 0.0 {
            self.residual
        } else {
            self.residual / self.rhs_norm
        }
    }

    /// Nodal values including the two zero boundary values.
    pub fn with_boundary(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.values.len() + 2);
        v.push(0.0);
        v.extend_from_slice(&self.values);
        v.push(0.0);
        v
    }
}

fn solve_with(mesh: &Mesh1D, rhs: Vec<f64>, method: Method) -> Result<NodalSolution> {
    let s = TriDiagonalMatrix::stiffness(mesh);
    let (values, residual) = assembly::solve_tridiagonal(&s, &rhs)?;
    let rhs_norm = rhs.iter().map(|v| v.abs()).fold(0.0, f64::max);
    Ok(NodalSolution { values, mesh: mesh.clone(), method, residual, rhs_norm })
}

/// `S u = W f~`.
pub fn solve_fd(problem: &Problem, mesh: &Mesh1D) -> Result<NodalSolution> {
    let rhs = assembly::fd_load(problem.rhs().as_ref(), mesh)?;
    solve_with(mesh, rhs, Method::Fd)
}

/// `S u = [(f, phi_j)]`, the load integrated with `quad_order` Gauss points per element.
pub fn solve_fe(problem: &Problem, mesh: &Mesh1D, quad_order: usize) -> Result<NodalSolution> {
    let rhs = assembly::fe_load(problem.rhs().as_ref(), mesh, quad_order)?;
    solve_with(mesh, rhs, Method::Fe)
}

/// `G~ W f~` by dense multiplication: the trapezoid approximation of
/// `u(x_j) = \int G(x_j, x) f(x) dx` on the mesh nodes.
pub fn green_nodal_fd(problem: &Problem, mesh: &Mesh1D) -> Result<Vec<f64>> {
    green_nodal_fd_with(problem, mesh, Execution::default())
}

pub fn green_nodal_fd_with(problem: &Problem, mesh: &Mesh1D, exec: Execution) -> Result<Vec<f64>> {
    let wf = assembly::fd_load(problem.rhs().as_ref(), mesh)?;
    GreenMatrix::with_execution(mesh, exec).matvec_with(&wf, exec)
}

/// `u(s) = s(1 - s) \int phi_s f`, integrated separately on `[0, s]` and
/// `[s, 1]` so the kink of `phi_s` is never inside a Gauss cell.
pub fn green_point_value<F: Fn(f64) -> f64>(f: F, s: f64) -> Result<f64> {
    green_point_value_with_order(f, s, GREEN_POINT_ORDER)
}

pub fn green_point_value_with_order<F: Fn(f64) -> f64>(f: F, s: f64, order: usize) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidArgument(format!("evaluation point s = {s} must lie in (0, 1)")));
    }
    let rule = GaussRule::legendre(order)?;
    let left = rule.integrate(|x| x / s * f(x), 0.0, s);
    let right = rule.integrate(|x| (1.0 - x) / (1.0 - s) * f(x), s, 1.0);
    Ok(s * (1.0 - s) * (left + right))
}

/// Max over interior nodes of
/// `| (f, phi_j) - [ -u(x_{j-1})/h_j + (1/h_j + 1/h_{j+1}) u(x_j) - u(x_{j+1})/h_{j+1} ] |`.
pub fn dual_identity_check(problem: &Problem, mesh: &Mesh1D, quad_order: usize) -> Result<f64> {
    let u = problem.require_exact()?;
    let load = assembly::fe_load(problem.rhs().as_ref(), mesh, quad_order)?;
    let x = mesh.nodes();
    let h = mesh.widths();
    let ux: Vec<f64> = x.iter().map(|&t| u(t)).collect();
    Ok(load
        .iter()
        .enumerate()
        .map(|(i, &fj)| {
            let j = i + 1;
            let diff = -ux[j - 1] / h[j - 1] + (1.0 / h[j - 1] + 1.0 / h[j]) * ux[j] - ux[j + 1] / h[j];
            (fj - diff).abs()
        })
        .fold(0.0, f64::max))
}

/// `||S G~ - I||_max`, with both factors from their closed forms.
pub fn inverse_identity_check(mesh: &Mesh1D) -> f64 {
    inverse_identity_check_with(mesh, Execution::default())
}

pub fn inverse_identity_check_with(mesh: &Mesh1D, exec: Execution) -> f64 {
    let s = TriDiagonalMatrix::stiffness(mesh);
    let g = GreenMatrix::with_execution(mesh, exec);
    let m = g.dim();
    // column j of S G~ is S applied to column j of G~ (= row j, by symmetry)
    let col_max = exec.map_indexed(m, |j| {
        let col = s.matvec(g.row(j)).expect("dimensions agree");
        col.iter()
            .enumerate()
            .map(|(i, &v)| (v - if i == j { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max)
    });
    col_max.into_iter().fold(0.0, f64::max)
}

/// `\int_0^1 G(s, x) f(x) dx` evaluated through the kernel itself rather than
/// the scaled hat; used to cross-check [`green_point_value`].
pub fn green_kernel_integral<F: Fn(f64) -> f64>(f: F, s: f64, order: usize) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidArgument(format!("evaluation point s = {s} must lie in (0, 1)")));
    }
    let rule = GaussRule::legendre(order)?;
    Ok(rule.integrate(|x| green_unchecked(s, x) * f(x), 0.0, s)
        + rule.integrate(|x| green_unchecked(s, x) * f(x), s, 1.0))
}
