//! Two planar identities built from one-function discretizations:
//!
//! * on the unit square split along `x = y`, the 1D Green function read as
//!   `G(x, y)` gives `\int_Gamma u ds = (1/sqrt 2) \int f G`;
//! * on an equilateral triangle `T`, the bubble `B = l1 l2 l3` has constant
//!   `-Delta B = 1 / (sqrt 3 |T|)`, which gives `\int u = sqrt 3 |T| \int f B`.
//!
//! Integrals use symmetric triangle rules with optional uniform 4-way
//! refinement. Cells never straddle the diagonal of the square.

use std::f64::consts::SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::green::green_unchecked;
use crate::quadrature::GaussRule;

pub type Point2 = [f64; 2];

/// Highest polynomial degree for which a triangle rule is generated.
pub const MAX_RULE_DEGREE: usize = 20;

const EQUILATERAL_TOL: f64 = 1e-12;
const INSIDE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    vertices: [Point2; 3],
    area: f64,
}

impl Triangle {
    /// Reorders to counterclockwise if needed; rejects degenerate input.
    pub fn new(a: Point2, b: Point2, c: Point2) -> Result<Self> {
        let signed = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
        if !(signed.abs() > 0.0) || !signed.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "degenerate triangle {a:?}, {b:?}, {c:?}"
            )));
        }
        let vertices = if signed > 0.0 { [a, b, c] } else { [a, c, b] };
        Ok(Triangle { vertices, area: signed.abs() })
    }

    /// Equilateral triangle with one horizontal edge starting at the origin.
    pub fn equilateral(side: f64) -> Result<Self> {
        if !(side > 0.0) || !side.is_finite() {
            return Err(Error::InvalidArgument(format!("side must be positive, got {side}")));
        }
        Triangle::new([0.0, 0.0], [side, 0.0], [0.5 * side, 0.5 * 3f64.sqrt() * side])
    }

    pub fn vertices(&self) -> &[Point2; 3] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn side_lengths(&self) -> [f64; 3] {
        let d = |p: Point2, q: Point2| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
        let [a, b, c] = self.vertices;
        [d(b, c), d(c, a), d(a, b)]
    }

    pub fn require_equilateral(&self) -> Result<()> {
        let s = self.side_lengths();
        let max = s.iter().copied().fold(0.0, f64::max);
        let min = s.iter().copied().fold(f64::INFINITY, f64::min);
        if max - min > EQUILATERAL_TOL * max {
            return Err(Error::NotEquilateral(s));
        }
        Ok(())
    }

    /// Barycentric coordinates `(l1, l2, l3)` of `p`, `li(z_j) = delta_ij`.
    pub fn barycentric(&self, p: Point2) -> [f64; 3] {
        let [a, b, c] = self.vertices;
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let l2 = ((p[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (p[1] - a[1])) / det;
        let l3 = ((b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])) / det;
        [1.0 - l2 - l3, l2, l3]
    }

    pub fn point_at(&self, bary: [f64; 3]) -> Point2 {
        let [a, b, c] = self.vertices;
        [
            bary[0] * a[0] + bary[1] * b[0] + bary[2] * c[0],
            bary[0] * a[1] + bary[1] * b[1] + bary[2] * c[1],
        ]
    }

    /// The four congruent children obtained by joining edge midpoints.
    pub fn subdivide(&self) -> [Triangle; 4] {
        let [a, b, c] = self.vertices;
        let mid = |p: Point2, q: Point2| [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
        let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
        let area = 0.25 * self.area;
        let t = |vertices| Triangle { vertices, area };
        [t([a, ab, ca]), t([ab, b, bc]), t([ca, bc, c]), t([ab, bc, ca])]
    }

    /// All cells of `depth` rounds of uniform subdivision (`4^depth` cells).
    pub fn refined(&self, depth: u32) -> Vec<Triangle> {
        let mut cells = vec![*self];
        for _ in 0..depth {
            cells = cells.iter().flat_map(|t| t.subdivide()).collect();
        }
        cells
    }
}

/// Fully symmetric triangle rule in barycentric form, weights normalized to
/// sum to one (multiply by the area).
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleQuadRule {
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
    degree: usize,
}

impl TriangleQuadRule {
    /// Collapsed-square Gauss product rule, exact to `degree`, averaged over
    /// the six vertex permutations to make it symmetric.
    pub fn new(degree: usize) -> Result<Self> {
        if degree == 0 || degree > MAX_RULE_DEGREE {
            return Err(Error::UnavailableDegree(degree));
        }
        // the collapse Jacobian (1 - s) adds one degree in s
        let k = (degree + 2).div_ceil(2);
        let gauss = GaussRule::legendre(k)?;
        let line: Vec<(f64, f64)> = gauss.mapped(0.0, 1.0).collect();
        const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut points = Vec::with_capacity(6 * k * k);
        let mut weights = Vec::with_capacity(6 * k * k);
        for &(s, ws) in &line {
            for &(t, wt) in &line {
                let bary = [s, (1.0 - s) * t, (1.0 - s) * (1.0 - t)];
                let w = 2.0 * ws * wt * (1.0 - s) / 6.0;
                for p in PERMS {
                    points.push([bary[p[0]], bary[p[1]], bary[p[2]]]);
                    weights.push(w);
                }
            }
        }
        Ok(TriangleQuadRule { points, weights, degree })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<G: Fn(Point2) -> f64>(&self, g: &G, tri: &Triangle) -> f64 {
        let sum: f64 = self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(&b, &w)| w * g(tri.point_at(b)))
            .sum();
        sum * tri.area()
    }
}

/// Quadrature of `g` over `tri` with a rule of the given degree.
pub fn triangle_integrate<G: Fn(Point2) -> f64>(g: G, tri: &Triangle, degree: usize) -> Result<f64> {
    Ok(TriangleQuadRule::new(degree)?.integrate(&g, tri))
}

/// Composite quadrature over `4^refine` congruent cells. Cell integrals are
/// collected in cell order before summation, so the result does not depend
/// on the execution policy.
pub fn triangle_integrate_refined<G>(
    g: G,
    tri: &Triangle,
    degree: usize,
    refine: u32,
    exec: Execution,
) -> Result<f64>
where
    G: Fn(Point2) -> f64 + Sync + Send,
{
    let rule = TriangleQuadRule::new(degree)?;
    let cells = tri.refined(refine);
    let parts = exec.map_slice(&cells, |cell| rule.integrate(&g, cell));
    Ok(parts.iter().sum())
}

/// Left side, right side and their absolute difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityResult {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

impl IdentityResult {
    fn new(lhs: f64, rhs: f64) -> Self {
        IdentityResult { lhs, rhs, residual: (lhs - rhs).abs() }
    }
}

/// Lower (`y <= x`) and upper (`y >= x`) halves of the unit square.
pub fn unit_square_halves() -> [Triangle; 2] {
    [
        Triangle::new([0.0, 0.0], [1.0, 0.0], [1.0, 1.0]).expect("valid"),
        Triangle::new([0.0, 0.0], [1.0, 1.0], [0.0, 1.0]).expect("valid"),
    ]
}

/// Compares `\int_Gamma u ds` on the diagonal `x = y` with
/// `(1/sqrt 2) \int_Omega f G` on the unit square, where `G(x, y)` is the 1D
/// Green function. Each half of the square is integrated separately (the
/// kink of `G` lies on their common edge). The line integral is
/// `sqrt 2 \int_0^1 u(t, t) dt` by composite Gauss on `2^refine` segments,
/// the same subdivision the triangle cells induce on the diagonal.
pub fn diagonal_green_identity<F, U>(
    f2d: F,
    u_on_diagonal: U,
    degree: usize,
    refine: u32,
    exec: Execution,
) -> Result<IdentityResult>
where
    F: Fn(Point2) -> f64 + Sync + Send,
    U: Fn(f64) -> f64,
{
    let [lower, upper] = unit_square_halves();
    // on each half G is the single smooth branch s(1 - x) / x(1 - s)
    let lower_part = triangle_integrate_refined(
        |p: Point2| f2d(p) * p[1] * (1.0 - p[0]),
        &lower,
        degree,
        refine,
        exec,
    )?;
    let upper_part = triangle_integrate_refined(
        |p: Point2| f2d(p) * p[0] * (1.0 - p[1]),
        &upper,
        degree,
        refine,
        exec,
    )?;
    let rhs = (lower_part + upper_part) / SQRT_2;

    let rule = GaussRule::legendre(degree / 2 + 1)?;
    let segments = 1usize << refine;
    let line: f64 = (0..segments)
        .map(|k| {
            let a = k as f64 / segments as f64;
            let b = (k + 1) as f64 / segments as f64;
            rule.integrate(&u_on_diagonal, a, b)
        })
        .sum();
    Ok(IdentityResult::new(SQRT_2 * line, rhs))
}

/// `G` as a function on the square; the branch is chosen by `y <= x`.
pub fn green_2d(p: Point2) -> f64 {
    green_unchecked(p[0], p[1])
}

/// `B = l1 l2 l3` at `p`; rejects points outside the closed triangle.
pub fn bubble_eval(tri: &Triangle, p: Point2) -> Result<f64> {
    let l = tri.barycentric(p);
    if l.iter().any(|&v| v < -INSIDE_TOL) {
        return Err(Error::OutsideTriangle { x: p[0], y: p[1] });
    }
    Ok(l[0] * l[1] * l[2])
}

fn bubble_unchecked(tri: &Triangle, p: Point2) -> f64 {
    let l = tri.barycentric(p);
    l[0] * l[1] * l[2]
}

/// The constant `1 / (sqrt 3 |T|)` that `-Delta B` equals on an equilateral
/// triangle.
pub fn bubble_laplacian_constant(tri: &Triangle) -> f64 {
    1.0 / (3f64.sqrt() * tri.area())
}

/// Five-point `-Delta_h B` (step `1e-4 * side`) at `sample_count` interior
/// points; returns the largest deviation from `1 / (sqrt 3 |T|)`.
pub fn bubble_laplacian_check(tri: &Triangle, sample_count: usize) -> Result<f64> {
    tri.require_equilateral()?;
    let side = tri.side_lengths()[0];
    let d = 1e-4 * side;
    let target = bubble_laplacian_constant(tri);
    let mut rng = ChaCha8Rng::seed_from_u64(0xB0BB1E);
    let mut worst: f64 = 0.0;
    for _ in 0..sample_count {
        // keep every barycentric coordinate >= 0.05 so the stencil stays inside
        let (a, b) = (rng.random_range(0.0..1.0f64), rng.random_range(0.0..1.0f64));
        let (a, b) = if a + b > 1.0 { (1.0 - a, 1.0 - b) } else { (a, b) };
        let raw = [a, b, 1.0 - a - b];
        let bary = raw.map(|v| 0.05 + 0.85 * v);
        let p = tri.point_at(bary);
        let b = |dx: f64, dy: f64| bubble_unchecked(tri, [p[0] + dx, p[1] + dy]);
        let lap = (b(d, 0.0) + b(-d, 0.0) + b(0.0, d) + b(0.0, -d) - 4.0 * b(0.0, 0.0)) / (d * d);
        worst = worst.max((-lap - target).abs());
    }
    Ok(worst)
}

/// Compares `\int_T u` with `sqrt 3 |T| \int_T f B`.
pub fn bubble_mean_identity<F, U>(
    f2d: F,
    u2d: U,
    tri: &Triangle,
    degree: usize,
    refine: u32,
    exec: Execution,
) -> Result<IdentityResult>
where
    F: Fn(Point2) -> f64 + Sync + Send,
    U: Fn(Point2) -> f64 + Sync + Send,
{
    tri.require_equilateral()?;
    let lhs = triangle_integrate_refined(&u2d, tri, degree, refine, exec)?;
    let fb = triangle_integrate_refined(|p| f2d(p) * bubble_unchecked(tri, p), tri, degree, refine, exec)?;
    Ok(IdentityResult::new(lhs, 3f64.sqrt() * tri.area() * fb))
}

/// Built-in `(u, f = -Delta u)` pairs on the unit square with `u = 0` on the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalCase {
    /// `u = sin(pi x) sin(pi y)`
    SinSin,
    /// `u = x(1 - x) y(1 - y)`
    Poly,
    Zero,
}

impl DiagonalCase {
    pub const NAMES: [&'static str; 3] = ["sinsin", "poly", "zero"];

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "sinsin" => Ok(DiagonalCase::SinSin),
            "poly" => Ok(DiagonalCase::Poly),
            "zero" => Ok(DiagonalCase::Zero),
            other => Err(Error::InvalidArgument(format!(
                "unknown diagonal case '{other}' (known: {})",
                Self::NAMES.join(", ")
            ))),
        }
    }

    pub fn u(self, p: Point2) -> f64 {
        use std::f64::consts::PI;
        let [x, y] = p;
        match self {
            DiagonalCase::SinSin => (PI * x).sin() * (PI * y).sin(),
            DiagonalCase::Poly => x * (1.0 - x) * y * (1.0 - y),
            DiagonalCase::Zero => 0.0,
        }
    }

    pub fn f(self, p: Point2) -> f64 {
        use std::f64::consts::PI;
        let [x, y] = p;
        match self {
            DiagonalCase::SinSin => 2.0 * PI * PI * (PI * x).sin() * (PI * y).sin(),
            DiagonalCase::Poly => 2.0 * y * (1.0 - y) + 2.0 * x * (1.0 - x),
            DiagonalCase::Zero => 0.0,
        }
    }

    /// Closed-form `\int_Gamma u ds`.
    pub fn exact_line_integral(self) -> f64 {
        match self {
            DiagonalCase::SinSin => SQRT_2 / 2.0,
            DiagonalCase::Poly => SQRT_2 / 30.0,
            DiagonalCase::Zero => 0.0,
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            DiagonalCase::SinSin => 1e-6,
            DiagonalCase::Poly | DiagonalCase::Zero => 1e-10,
        }
    }

    pub fn run(self, degree: usize, refine: u32, exec: Execution) -> Result<IdentityResult> {
        diagonal_green_identity(|p| self.f(p), |t| self.u([t, t]), degree, refine, exec)
    }
}

/// Built-in `(u, f = -Delta u)` pairs on an equilateral triangle, with `u`
/// vanishing on the boundary. `g = |grad l_i|^2 = 1 / (sqrt 3 |T|)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BubbleCase {
    /// `f = 1`, `u = sqrt 3 |T| B`
    Constant,
    /// `u = B (l1 - l2)`, `f = g (l1 - l2)(1 + 3 l3)`
    Antisymmetric,
    /// `u = B l1`, `f = g (l1 + l1 l2 + l1 l3 - 2 l2 l3)`
    Linear,
    Zero,
}

impl BubbleCase {
    pub const NAMES: [&'static str; 4] = ["constant", "antisym", "linear", "zero"];

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "constant" => Ok(BubbleCase::Constant),
            "antisym" => Ok(BubbleCase::Antisymmetric),
            "linear" => Ok(BubbleCase::Linear),
            "zero" => Ok(BubbleCase::Zero),
            other => Err(Error::InvalidArgument(format!(
                "unknown bubble case '{other}' (known: {})",
                Self::NAMES.join(", ")
            ))),
        }
    }

    pub fn u(self, tri: &Triangle, p: Point2) -> f64 {
        let [l1, l2, l3] = tri.barycentric(p);
        let b = l1 * l2 * l3;
        match self {
            BubbleCase::Constant => 3f64.sqrt() * tri.area() * b,
            BubbleCase::Antisymmetric => b * (l1 - l2),
            BubbleCase::Linear => b * l1,
            BubbleCase::Zero => 0.0,
        }
    }

    pub fn f(self, tri: &Triangle, p: Point2) -> f64 {
        let [l1, l2, l3] = tri.barycentric(p);
        let g = bubble_laplacian_constant(tri);
        match self {
            BubbleCase::Constant => 1.0,
            BubbleCase::Antisymmetric => g * (l1 - l2) * (1.0 + 3.0 * l3),
            BubbleCase::Linear => g * (l1 + l1 * l2 + l1 * l3 - 2.0 * l2 * l3),
            BubbleCase::Zero => 0.0,
        }
    }

    pub fn default_tolerance(self) -> f64 {
        1e-10
    }

    pub fn run(self, tri: &Triangle, degree: usize, refine: u32, exec: Execution) -> Result<IdentityResult> {
        let t = *tri;
        bubble_mean_identity(move |p| self.f(&t, p), move |p| self.u(&t, p), tri, degree, refine, exec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn factorial(k: u32) -> f64 {
        (1..=k).map(|v| v as f64).product()
    }

    #[test]
    fn triangle_basics() {
        let t = Triangle::new([0.0, 0.0], [0.0, 1.0], [1.0, 0.0]).unwrap();
        assert_eq!(t.area(), 0.5);
        // reordered to counterclockwise
        assert_eq!(t.vertices()[1], [1.0, 0.0]);
        assert!(Triangle::new([0.0, 0.0], [1.0, 1.0], [2.0, 2.0]).is_err());
        let e = Triangle::equilateral(1.0).unwrap();
        assert_abs_diff_eq!(e.area(), 3f64.sqrt() / 4.0, epsilon = 1e-16);
        assert!(e.require_equilateral().is_ok());
        assert!(t.require_equilateral().is_err());
        let cells = e.refined(3);
        assert_eq!(cells.len(), 64);
        assert_abs_diff_eq!(cells.iter().map(|c| c.area()).sum::<f64>(), e.area(), epsilon = 1e-15);
    }

    #[test]
    fn barycentric_round_trip() {
        let t = Triangle::new([0.3, -0.2], [2.0, 0.1], [0.7, 1.9]).unwrap();
        for (i, v) in t.vertices().iter().enumerate() {
            let l = t.barycentric(*v);
            for (j, &lj) in l.iter().enumerate() {
                assert_abs_diff_eq!(lj, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-15);
            }
        }
        let p = t.point_at([0.2, 0.3, 0.5]);
        let l = t.barycentric(p);
        assert_abs_diff_eq!(l[0], 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(l[2], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn rule_weights_and_symmetry() {
        for degree in 1..=MAX_RULE_DEGREE {
            let r = TriangleQuadRule::new(degree).unwrap();
            assert_abs_diff_eq!(r.weights().iter().sum::<f64>(), 1.0, epsilon = 1e-14);
            assert!(r.weights().iter().all(|&w| w > 0.0));
            assert!(r.points().iter().all(|b| b.iter().all(|&v| v > 0.0)));
        }
        assert!(TriangleQuadRule::new(0).is_err());
        assert!(matches!(TriangleQuadRule::new(MAX_RULE_DEGREE + 1), Err(Error::UnavailableDegree(_))));
    }

    #[test]
    fn barycentric_monomial_ladder() {
        let tri = Triangle::new([0.1, 0.2], [1.3, -0.4], [0.5, 1.1]).unwrap();
        for degree in 1..=MAX_RULE_DEGREE {
            let rule = TriangleQuadRule::new(degree).unwrap();
            for a in 0..=degree as u32 {
                for b in 0..=(degree as u32 - a) {
                    for c in 0..=(degree as u32 - a - b) {
                        let exact = factorial(a) * factorial(b) * factorial(c) * 2.0
                            / factorial(a + b + c + 2)
                            * tri.area();
                        let got = rule.integrate(
                            &|p| {
                                let l = tri.barycentric(p);
                                l[0].powi(a as i32) * l[1].powi(b as i32) * l[2].powi(c as i32)
                            },
                            &tri,
                        );
                        assert!((got - exact).abs() < 1e-13, "deg {degree} ({a},{b},{c}): {got} vs {exact}");
                    }
                }
            }
        }
    }

    #[test]
    fn integrate_examples() {
        let tri = Triangle::new([0.0, 0.0], [1.0, 0.0], [0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(triangle_integrate(|_| 1.0, &tri, 1).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(triangle_integrate(|p| p[0] * p[0], &tri, 2).unwrap(), 1.0 / 12.0, epsilon = 1e-16);
        let e = Triangle::equilateral(2.0).unwrap();
        let bubble = |p| bubble_eval(&e, p).unwrap_or(0.0);
        assert_abs_diff_eq!(triangle_integrate(bubble, &e, 3).unwrap(), e.area() / 60.0, epsilon = 1e-15);
        let refined = triangle_integrate_refined(bubble, &e, 3, 2, Execution::Parallel).unwrap();
        assert_abs_diff_eq!(refined, e.area() / 60.0, epsilon = 1e-15);
        let seq = triangle_integrate_refined(bubble, &e, 3, 2, Execution::Sequential).unwrap();
        assert_eq!(refined, seq);
        assert!(triangle_integrate(|_| 1.0, &tri, 99).is_err());
    }

    #[test]
    fn bubble_eval_examples() {
        let t = Triangle::equilateral(1.0).unwrap();
        let [a, b, c] = *t.vertices();
        let centroid = [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0];
        assert_abs_diff_eq!(bubble_eval(&t, centroid).unwrap(), 1.0 / 27.0, epsilon = 1e-16);
        for v in [a, b, c] {
            assert_abs_diff_eq!(bubble_eval(&t, v).unwrap(), 0.0, epsilon = 1e-16);
        }
        let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        assert_abs_diff_eq!(bubble_eval(&t, mid).unwrap(), 0.0, epsilon = 1e-16);
        assert!(matches!(bubble_eval(&t, [2.0, 2.0]), Err(Error::OutsideTriangle { .. })));
    }

    #[test]
    fn bubble_invariant_under_vertex_relabeling() {
        let t = Triangle::new([0.1, 0.2], [1.3, -0.4], [0.5, 1.1]).unwrap();
        let [a, b, c] = *t.vertices();
        let p = t.point_at([0.2, 0.5, 0.3]);
        let base = bubble_eval(&t, p).unwrap();
        for (x, y, z) in [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
            let r = Triangle::new(x, y, z).unwrap();
            assert_abs_diff_eq!(bubble_eval(&r, p).unwrap(), base, epsilon = 1e-16);
        }
    }

    #[test]
    fn bubble_laplacian_examples() {
        let t1 = Triangle::equilateral(1.0).unwrap();
        assert_abs_diff_eq!(bubble_laplacian_constant(&t1), 4.0 / 3.0, epsilon = 1e-15);
        assert!(bubble_laplacian_check(&t1, 100).unwrap() < 1e-6);
        let t2 = Triangle::equilateral(2.0).unwrap();
        assert_abs_diff_eq!(bubble_laplacian_constant(&t2), 1.0 / 3.0, epsilon = 1e-15);
        assert!(bubble_laplacian_check(&t2, 100).unwrap() < 1e-6);
        let t3 = Triangle::equilateral(3.0).unwrap();
        assert_abs_diff_eq!(
            bubble_laplacian_constant(&t3) * 9.0,
            bubble_laplacian_constant(&t1),
            epsilon = 1e-14
        );
        let skew = Triangle::new([0.0, 0.0], [1.0, 0.0], [0.2, 0.9]).unwrap();
        assert!(matches!(bubble_laplacian_check(&skew, 10), Err(Error::NotEquilateral(_))));
    }

    /// Five-point `-Delta_h u` compared with the closed-form `f` of a built-in pair.
    fn check_pde_pair(u: impl Fn(Point2) -> f64, f: impl Fn(Point2) -> f64, points: &[Point2], tol: f64) {
        let d = 1e-4;
        for &p in points {
            let lap = (u([p[0] + d, p[1]]) + u([p[0] - d, p[1]]) + u([p[0], p[1] + d]) + u([p[0], p[1] - d])
                - 4.0 * u(p))
                / (d * d);
            assert!((-lap - f(p)).abs() < tol, "at {p:?}: {} vs {}", -lap, f(p));
        }
    }

    #[test]
    fn builtin_pairs_solve_the_pde() {
        let square: Vec<Point2> = (1..10).flat_map(|i| (1..10).map(move |j| [i as f64 / 10.0, j as f64 / 10.0])).collect();
        for case in [DiagonalCase::SinSin, DiagonalCase::Poly] {
            check_pde_pair(|p| case.u(p), |p| case.f(p), &square, 1e-5);
        }
        let tri = Triangle::equilateral(1.3).unwrap();
        let inside: Vec<Point2> = [[0.2, 0.3, 0.5], [0.6, 0.2, 0.2], [1.0 / 3.0; 3], [0.1, 0.1, 0.8]]
            .iter()
            .map(|&b| tri.point_at(b))
            .collect();
        for case in [BubbleCase::Constant, BubbleCase::Antisymmetric, BubbleCase::Linear] {
            check_pde_pair(|p| case.u(&tri, p), |p| case.f(&tri, p), &inside, 1e-5);
        }
        // boundary values vanish
        for case in [BubbleCase::Antisymmetric, BubbleCase::Linear] {
            for b in [[0.0, 0.3, 0.7], [0.5, 0.0, 0.5], [0.9, 0.1, 0.0]] {
                assert_abs_diff_eq!(case.u(&tri, tri.point_at(b)), 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn diagonal_identity_examples() {
        let r = DiagonalCase::SinSin.run(10, 6, Execution::default()).unwrap();
        assert_abs_diff_eq!(r.lhs, SQRT_2 / 2.0, epsilon = 1e-12);
        assert!(r.residual < 1e-6, "{r:?}");
        let r = DiagonalCase::Poly.run(4, 0, Execution::Sequential).unwrap();
        assert_abs_diff_eq!(r.lhs, SQRT_2 / 30.0, epsilon = 1e-15);
        assert!(r.residual < 1e-10, "{r:?}");
        let r = DiagonalCase::Zero.run(3, 1, Execution::Sequential).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    }

    #[test]
    fn diagonal_green_matches_branchwise_definition() {
        assert_eq!(green_2d([0.7, 0.2]), 0.2 * (1.0 - 0.7));
        assert_eq!(green_2d([0.2, 0.7]), 0.2 * (1.0 - 0.7));
    }

    #[test]
    fn diagonal_residual_converges_at_second_order() {
        let residuals: Vec<f64> = (1..=5)
            .map(|k| DiagonalCase::SinSin.run(1, k, Execution::default()).unwrap().residual)
            .collect();
        for w in residuals.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 1.9, "{residuals:?}");
        }
    }

    #[test]
    fn bubble_mean_examples() {
        let tri = Triangle::equilateral(1.0).unwrap();
        let r = BubbleCase::Constant.run(&tri, 6, 0, Execution::Sequential).unwrap();
        assert_abs_diff_eq!(r.lhs, 3f64.sqrt() / 320.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.rhs, 3f64.sqrt() / 320.0, epsilon = 1e-15);
        for case in [BubbleCase::Antisymmetric, BubbleCase::Linear] {
            let r = case.run(&tri, 6, 0, Execution::Sequential).unwrap();
            assert!(r.residual < 1e-12, "{case:?} {r:?}");
        }
        let r = BubbleCase::Linear.run(&tri, 6, 0, Execution::Sequential).unwrap();
        // \int B l1 = 2! 1! 1! 2! / 6! |T|
        assert_abs_diff_eq!(r.lhs, tri.area() / 180.0, epsilon = 1e-15);
        let r = BubbleCase::Zero.run(&tri, 3, 0, Execution::Sequential).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        let skew = Triangle::new([0.0, 0.0], [1.0, 0.0], [0.2, 0.9]).unwrap();
        assert!(BubbleCase::Constant.run(&skew, 6, 0, Execution::Sequential).is_err());
    }
}
