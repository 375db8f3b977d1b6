//! Energy norms, the a priori error bounds, the dual functional `F_h`, and
//! convergence studies over mesh families.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::assembly;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::mesh::Mesh1D;
use crate::pipeline::{self, NodalSolution, Problem};
use crate::quadrature::{estimate_sup, GaussRule};

/// Absolute allowance for floating-point noise when comparing an error with
/// a bound that is exactly zero (e.g. `f` constant, where FD is exact).
pub const ROUNDOFF_SLACK: f64 = 1e-11;

fn check_len(coeffs: &[f64], mesh: &Mesh1D) -> Result<()> {
    if coeffs.len() != mesh.interior_len() {
        return Err(Error::LengthMismatch { expected: mesh.interior_len(), found: coeffs.len() });
    }
    Ok(())
}

/// Element slopes times `h_i`, i.e. `alpha_i - alpha_{i-1}` with zero
/// boundary coefficients.
fn increments(coeffs: &[f64]) -> impl Iterator<Item = f64> + '_ {
    let m = coeffs.len();
    (0..=m).map(move |i| {
        let right = if i < m { coeffs[i] } else { 0.0 };
        let left = if i > 0 { coeffs[i - 1] } else { 0.0 };
        right - left
    })
}

/// `a_h(alpha, beta) = sum (Delta alpha_i)(Delta beta_i) / h_i`, the exact
/// `\int v_h' w_h'` for the piecewise-linear functions with these coefficients.
pub fn energy_bilinear(alpha: &[f64], beta: &[f64], mesh: &Mesh1D) -> Result<f64> {
    check_len(alpha, mesh)?;
    check_len(beta, mesh)?;
    Ok(increments(alpha)
        .zip(increments(beta))
        .zip(mesh.widths())
        .map(|((da, db), h)| da * db / h)
        .sum())
}

/// `|v_h|_a = sqrt(\int (v_h')^2)`.
pub fn energy_norm(coeffs: &[f64], mesh: &Mesh1D) -> Result<f64> {
    Ok(energy_bilinear(coeffs, coeffs, mesh)?.sqrt())
}

/// `max_j |u(x_j) - u_j|`.
pub fn inf_node_error<F: Fn(f64) -> f64>(sol: &NodalSolution, u_exact: F) -> f64 {
    sol.mesh
        .interior()
        .iter()
        .zip(&sol.values)
        .map(|(&x, &v)| (u_exact(x) - v).abs())
        .fold(0.0, f64::max)
}

fn check_nonneg(pairs: &[(&str, f64)]) -> Result<()> {
    for &(name, v) in pairs {
        if !(v >= 0.0) {
            return Err(Error::InvalidArgument(format!("{name} must be nonnegative, got {v}")));
        }
    }
    Ok(())
}

/// Nodal error bound for the FD solution on an arbitrary mesh:
/// `h^2/48 (4 ||f'|| + ||f''||)`.
pub fn bound_inf(h: f64, sup_f_prime: f64, sup_f_second: f64) -> Result<f64> {
    check_nonneg(&[("h", h), ("sup|f'|", sup_f_prime), ("sup|f''|", sup_f_second)])?;
    Ok(h * h / 48.0 * (4.0 * sup_f_prime + sup_f_second))
}

/// Classical uniform-mesh nodal bound `h^2/96 ||f''||`.
pub fn bound_inf_uniform(h: f64, sup_f_second: f64) -> Result<f64> {
    check_nonneg(&[("h", h), ("sup|f''|", sup_f_second)])?;
    Ok(h * h / 96.0 * sup_f_second)
}

/// Bound on `|u_h^FE - u_h^FD|_a`: `h^2 (||f''||/12 + ||f'||/6)`.
pub fn bound_energy_gap(h: f64, sup_f_prime: f64, sup_f_second: f64) -> Result<f64> {
    check_nonneg(&[("h", h), ("sup|f'|", sup_f_prime), ("sup|f''|", sup_f_second)])?;
    Ok(h * h * (sup_f_second / 12.0 + sup_f_prime / 6.0))
}

/// `F_h(v_h) = \int f v_h - T_n(f v_h)`; the integral uses per-element Gauss
/// of the given order, the trapezoid part is `sum (W f~)_j alpha_j`.
pub fn fh_functional<F: Fn(f64) -> f64>(
    f: F,
    vh_coeffs: &[f64],
    mesh: &Mesh1D,
    quad_order: usize,
) -> Result<f64> {
    check_len(vh_coeffs, mesh)?;
    let rule = GaussRule::legendre(quad_order)?;
    let m = vh_coeffs.len();
    let coeff = |node: usize| if node == 0 || node > m { 0.0 } else { vh_coeffs[node - 1] };
    let integral: f64 = mesh
        .nodes()
        .windows(2)
        .enumerate()
        .map(|(k, pair)| {
            let (a, b) = (pair[0], pair[1]);
            let (ca, cb) = (coeff(k), coeff(k + 1));
            let h = b - a;
            rule.integrate(|x| f(x) * (ca * (b - x) + cb * (x - a)) / h, a, b)
        })
        .sum();
    let trapezoid: f64 = assembly::fd_load(&f, mesh)?
        .iter()
        .zip(vh_coeffs)
        .map(|(w, a)| w * a)
        .sum();
    Ok(integral - trapezoid)
}

/// Sup norms used by the bounds, with a flag telling whether they were
/// sampled rather than registered in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupNorms {
    pub f_prime: f64,
    pub f_second: f64,
    pub estimated: bool,
}

impl SupNorms {
    pub fn for_problem(problem: &Problem) -> Self {
        if let (Some(a), Some(b)) = (problem.registered_sup_f_prime(), problem.registered_sup_f_second()) {
            return SupNorms { f_prime: a, f_second: b, estimated: false };
        }
        let (f_prime, f_second) = match (problem.f_prime(), problem.f_second()) {
            (Some(d1), Some(d2)) => (
                estimate_sup(d1.as_ref(), 0.0, 1.0),
                estimate_sup(d2.as_ref(), 0.0, 1.0),
            ),
            _ => {
                // difference quotients of f on a slightly shrunk interval
                let d = 1e-4;
                let f = problem.rhs().clone();
                let g = f.clone();
                (
                    estimate_sup(move |x| (f(x + d) - f(x - d)) / (2.0 * d), d, 1.0 - d),
                    estimate_sup(move |x| (g(x + d) - 2.0 * g(x) + g(x - d)) / (d * d), d, 1.0 - d),
                )
            }
        };
        SupNorms { f_prime, f_second, estimated: true }
    }
}

/// Mesh family indexed by element count.
#[derive(Debug, Clone, PartialEq)]
pub enum MeshFamily {
    Uniform,
    Graded { beta: f64 },
    Perturbed { rho: f64, seed: u64 },
}

impl MeshFamily {
    pub fn build(&self, n: usize) -> Result<Mesh1D> {
        match *self {
            MeshFamily::Uniform => Mesh1D::uniform(n),
            MeshFamily::Graded { beta } => Mesh1D::graded(n, beta),
            MeshFamily::Perturbed { rho, seed } => Mesh1D::perturbed(n, rho, seed),
        }
    }
}

impl FromStr for MeshFamily {
    type Err = Error;

    /// Accepts `uniform`, `graded:<beta>`, `perturbed:<rho>:<seed>`, and the
    /// same with an `{n}` placeholder in the element-count slot of a mesh
    /// descriptor (`graded:<beta>:{n}`, `perturbed:<rho>:{n}:<seed>`).
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').filter(|p| *p != "{n}").collect();
        let num = |v: &str, what: &str| -> Result<f64> {
            v.parse().map_err(|_| Error::Parse(format!("bad {what} '{v}' in mesh family '{s}'")))
        };
        let family = match parts.as_slice() {
            ["uniform"] => MeshFamily::Uniform,
            ["graded", beta] => MeshFamily::Graded { beta: num(beta, "beta")? },
            ["perturbed", rho, seed] => MeshFamily::Perturbed {
                rho: num(rho, "rho")?,
                seed: seed
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad seed '{seed}' in mesh family '{s}'")))?,
            },
            _ => {
                return Err(Error::Parse(format!(
                    "unrecognized mesh family '{s}' (expected uniform, graded:<beta> or perturbed:<rho>:<seed>)"
                )))
            }
        };
        // surface invalid parameters at parse time
        family.build(2)?;
        Ok(family)
    }
}

impl fmt::Display for MeshFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshFamily::Uniform => write!(f, "uniform"),
            MeshFamily::Graded { beta } => write!(f, "graded:{beta}"),
            MeshFamily::Perturbed { rho, seed } => write!(f, "perturbed:{rho}:{seed}"),
        }
    }
}

/// One refinement level of a convergence study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub err_inf_fd: f64,
    pub bound_inf: f64,
    pub err_energy_gap: f64,
    pub bound_energy_gap: f64,
    pub err_energy_fd: f64,
    pub rate_inf: Option<f64>,
    pub rate_gap: Option<f64>,
}

pub const CSV_HEADER: &str =
    "n,h,err_inf_fd,bound_inf,err_energy_gap,bound_energy_gap,err_energy_fd,rate_inf,rate_gap";

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub problem: String,
    pub family: String,
    pub sup_norms: SupNorms,
    pub quad_order: usize,
    pub rows: Vec<ConvergenceRow>,
}

/// `log(e1/e2) / log(h1/h2)`; `None` when either error is not positive.
pub fn observed_rate(e1: f64, e2: f64, h1: f64, h2: f64) -> Option<f64> {
    if e1 > 0.0 && e2 > 0.0 && h1 > 0.0 && h2 > 0.0 && h1 != h2 {
        Some((e1 / e2).ln() / (h1 / h2).ln())
    } else {
        None
    }
}

impl ConvergenceReport {
    /// First row where an error exceeds its bound (plus [`ROUNDOFF_SLACK`]).
    pub fn first_violation(&self) -> Option<Error> {
        self.rows.iter().enumerate().find_map(|(row, r)| {
            if !(r.err_inf_fd <= r.bound_inf + ROUNDOFF_SLACK) {
                Some(Error::BoundViolated {
                    row,
                    n: r.n,
                    quantity: "err_inf_fd",
                    error: r.err_inf_fd,
                    bound: r.bound_inf,
                })
            } else if !(r.err_energy_gap <= r.bound_energy_gap + ROUNDOFF_SLACK) {
                Some(Error::BoundViolated {
                    row,
                    n: r.n,
                    quantity: "err_energy_gap",
                    error: r.err_energy_gap,
                    bound: r.bound_energy_gap,
                })
            } else {
                None
            }
        })
    }

    pub fn verify_bounds(&self) -> Result<()> {
        match self.first_violation() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
        }
        if self.rows.is_empty() {
            return Ok(format!("{CSV_HEADER}\n"));
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    /// JSON array of row objects.
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.rows).map_err(|e| Error::Io(e.to_string()))
    }
}

/// Per-level quantities before rates are attached.
fn study_level(
    problem: &Problem,
    mesh: &Mesh1D,
    sup: &SupNorms,
    quad_order: usize,
) -> Result<ConvergenceRow> {
    let u = problem.require_exact()?;
    let fd = pipeline::solve_fd(problem, mesh)?;
    let fe = pipeline::solve_fe(problem, mesh, quad_order)?;
    let h = mesh.max_h();
    let gap: Vec<f64> = fe.values.iter().zip(&fd.values).map(|(a, b)| a - b).collect();
    let interp_minus_fd: Vec<f64> = mesh
        .interior()
        .iter()
        .zip(&fd.values)
        .map(|(&x, &v)| u(x) - v)
        .collect();
    Ok(ConvergenceRow {
        n: mesh.n(),
        h,
        err_inf_fd: inf_node_error(&fd, u.as_ref()),
        bound_inf: bound_inf(h, sup.f_prime, sup.f_second)?,
        err_energy_gap: energy_norm(&gap, mesh)?,
        bound_energy_gap: bound_energy_gap(h, sup.f_prime, sup.f_second)?,
        err_energy_fd: energy_norm(&interp_minus_fd, mesh)?,
        rate_inf: None,
        rate_gap: None,
    })
}

/// Runs FD and FE on `family` with `n = 2^level` for each level and collects
/// errors, bounds and consecutive-level rates. Bound dominance is checked
/// separately by [`ConvergenceReport::verify_bounds`].
pub fn convergence_study(
    problem: &Problem,
    family: &MeshFamily,
    levels: RangeInclusive<u32>,
    quad_order: usize,
    exec: Execution,
) -> Result<ConvergenceReport> {
    let (lo, hi) = (*levels.start(), *levels.end());
    if hi <= lo {
        return Err(Error::InvalidArgument(format!(
            "need at least two levels to compute a rate, got {lo}..{hi}"
        )));
    }
    if lo < 1 || hi > 24 {
        return Err(Error::InvalidArgument(format!("levels must lie in 1..=24, got {lo}..{hi}")));
    }
    problem.require_exact()?;
    let sup = SupNorms::for_problem(problem);
    let levels: Vec<u32> = levels.collect();
    let results = exec.map_slice(&levels, |&level| {
        let mesh = family.build(1usize << level)?;
        study_level(problem, &mesh, &sup, quad_order)
    });
    let mut rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    for i in 1..rows.len() {
        let (prev, cur) = (&rows[i - 1], &rows[i]);
        let rate_inf = observed_rate(prev.err_inf_fd, cur.err_inf_fd, prev.h, cur.h);
        let rate_gap = observed_rate(prev.err_energy_gap, cur.err_energy_gap, prev.h, cur.h);
        rows[i].rate_inf = rate_inf;
        rows[i].rate_gap = rate_gap;
    }
    Ok(ConvergenceReport {
        problem: problem.name().to_string(),
        family: family.to_string(),
        sup_norms: sup,
        quad_order,
        rows,
    })
}
