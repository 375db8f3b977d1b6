//! Finite-difference and piecewise-linear finite-element discretizations of
//! the two-point boundary value problem
//!
//! ```text
//!     -u''(x) = f(x),  0 < x < 1,    u(0) = u(1) = 0
//! ```
//!
//! on arbitrary (non-uniform) meshes of the unit interval, together with the
//! machinery needed to check the identities linking them: the Green matrix as
//! the exact inverse of the shared stiffness matrix, the finite-difference
//! solution as a trapezoid approximation of the Green representation, the
//! nodal exactness of the finite-element solution, and the a priori bounds on
//! the nodal error and on the FE/FD energy gap.
//!
//! Two 2D special cases are covered in [`geometry2d`]: the diagonal Green
//! identity on the unit square and the bubble-function mean identity on an
//! equilateral triangle.
//!
//! Data-parallel loops (convergence levels, dense Green products, refined 2D
//! quadrature cells) run on rayon when the `parallel` feature is enabled and
//! fall back to plain iterators otherwise. See [`exec::Execution`].

// `!(x >= 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod assembly;
pub mod error;
pub mod exec;
pub mod geometry2d;
pub mod green;
pub mod mesh;
pub mod pipeline;
pub mod quadrature;

pub use analysis::{ConvergenceReport, ConvergenceRow, MeshFamily};
pub use assembly::{DiagonalWeights, TriDiagonalMatrix};
pub use error::{Error, Result};
pub use exec::Execution;
pub use green::GreenMatrix;
pub use mesh::Mesh1D;
pub use pipeline::{Method, NodalSolution, Problem};
pub use quadrature::GaussRule;
