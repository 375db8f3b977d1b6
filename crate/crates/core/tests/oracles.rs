//! Library results against independently computed references.

mod common;

use approx::assert_relative_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use common::{adaptive_simpson, cholesky, hat, piecewise_integral};
use fdfe_core::assembly::{fd_load, fe_load};
use fdfe_core::green::green_eval;
use fdfe_core::pipeline::{green_point_value, Problem};
use fdfe_core::quadrature::{ctr, gauss_integrate};
use fdfe_core::{GreenMatrix, Mesh1D};

#[test]
fn fe_load_matches_adaptive_integration() {
    let f = |x: f64| PI * PI * (PI * x).sin();
    for mesh in [Mesh1D::uniform(8).unwrap(), Mesh1D::graded(20, 2.0).unwrap(), Mesh1D::perturbed(33, 0.45, 3).unwrap()] {
        let load = fe_load(f, &mesh, 10).unwrap();
        for (i, &l) in load.iter().enumerate() {
            let j = i + 1;
            let reference = piecewise_integral(&|x| f(x) * hat(&mesh, j, x), &mesh.nodes()[j - 1..=j + 1], 1e-15);
            assert_relative_eq!(l, reference, max_relative = 1e-12);
        }
    }
}

#[test]
fn green_point_value_matches_adaptive_integration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for problem in Problem::catalog() {
        for _ in 0..16 {
            let s: f64 = rng.random_range(0.01..0.99);
            let integrand = |x: f64| green_eval(x, s).unwrap() * problem.f(x);
            let reference = adaptive_simpson(&integrand, 0.0, s, 1e-15) + adaptive_simpson(&integrand, s, 1.0, 1e-15);
            let got = green_point_value(problem.rhs().as_ref(), s).unwrap();
            assert!((got - reference).abs() < 1e-12, "{} at s = {s}: {got} vs {reference}", problem.name());
        }
    }
}

#[test]
fn fd_load_is_trapezoid_of_f_times_hat() {
    let f = |x: f64| x.exp() * (3.0 * x).cos();
    let mesh = Mesh1D::perturbed(40, 0.3, 9).unwrap();
    let load = fd_load(f, &mesh).unwrap();
    for (i, &l) in load.iter().enumerate() {
        let j = i + 1;
        let theta: Vec<f64> = mesh.interior().iter().map(|&x| f(x) * hat(&mesh, j, x)).collect();
        assert_relative_eq!(l, ctr(&theta, &mesh).unwrap(), max_relative = 4.0 * f64::EPSILON);
    }
}

#[test]
fn trapezoid_equals_integral_of_interpolant() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..100 {
        let n = rng.random_range(2..200usize);
        let mesh = match case % 3 {
            0 => Mesh1D::uniform(n),
            1 => Mesh1D::graded(n, rng.random_range(1.0..3.0)),
            _ => Mesh1D::perturbed(n, rng.random_range(0.0..0.9), rng.random()),
        }
        .unwrap();
        let theta: Vec<f64> = (0..mesh.interior_len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let interp = |x: f64| -> f64 { (1..=theta.len()).map(|j| theta[j - 1] * hat(&mesh, j, x)).sum() };
        let nodes = mesh.nodes();
        let reference: f64 =
            nodes.windows(2).map(|w| gauss_integrate(interp, w[0], w[1], 2).unwrap()).sum();
        assert!((ctr(&theta, &mesh).unwrap() - reference).abs() < 1e-13, "case {case}");
    }
}

#[test]
fn green_matrix_is_positive_definite() {
    for mesh in [Mesh1D::uniform(32).unwrap(), Mesh1D::graded(40, 3.0).unwrap(), Mesh1D::perturbed(50, 0.45, 1).unwrap()] {
        let g = GreenMatrix::new(&mesh);
        let dense: Vec<Vec<f64>> = (0..g.dim()).map(|i| g.row(i).to_vec()).collect();
        assert!(cholesky(&dense).is_some());
    }
}
