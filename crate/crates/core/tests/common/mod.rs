//! Independent reference computations for the integration tests.
#![allow(dead_code)]

use fdfe_core::Mesh1D;

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f((a + b) / 2.0), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = (a + b) / 2.0;
    let (lm, rm) = ((a + m) / 2.0, (m + b) / 2.0);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson over each mesh element (integrands with kinks at nodes).
pub fn piecewise_integral<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], tol: f64) -> f64 {
    breaks.windows(2).map(|w| adaptive_simpson(f, w[0], w[1], tol)).sum()
}

/// Hat function of interior node `j` (1-based) evaluated at `x`.
pub fn hat(mesh: &Mesh1D, j: usize, x: f64) -> f64 {
    let n = mesh.nodes();
    let (l, c, r) = (n[j - 1], n[j], n[j + 1]);
    if x <= l || x >= r {
        0.0
    } else if x <= c {
        (x - l) / (c - l)
    } else {
        (r - x) / (r - c)
    }
}

/// Cholesky factorization of a dense symmetric matrix; `None` if a pivot is
/// not strictly positive.
pub fn cholesky(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let m = a.len();
    let mut l = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if d.is_nan() || d <= 0.0 {
                    return None;
                }
                l[i][j] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    Some(l)
}

/// The 12 meshes used by the nodal-exactness checks: uniform, graded 1.5,
/// graded 2 and perturbed (0.45, seed 7), each at n = 16, 64, 256.
pub fn mesh_suite() -> Vec<(String, Mesh1D)> {
    let mut out = Vec::new();
    for n in [16, 64, 256] {
        out.push((format!("uniform:{n}"), Mesh1D::uniform(n).unwrap()));
        out.push((format!("graded:1.5:{n}"), Mesh1D::graded(n, 1.5).unwrap()));
        out.push((format!("graded:2:{n}"), Mesh1D::graded(n, 2.0).unwrap()));
        out.push((format!("perturbed:0.45:{n}:7"), Mesh1D::perturbed(n, 0.45, 7).unwrap()));
    }
    out
}
