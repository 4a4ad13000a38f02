//! # `fracdiff`: time-fractional diffusion in expanding media
//!
//! Solves
//!
//! ```text
//! ∂W/∂t = κ(t) Δ[ ₀D_t^{1−α} W ] + f(x, t),   x ∈ (0, 1),  t ∈ (0, T]
//! W(x, 0) = W₀(x),   W(0, t) = W(1, t) = 0
//! ```
//!
//! where `₀D_t^{1−α}` is the Riemann–Liouville derivative and `κ(t) = 1/a²(t)` is
//! the diffusivity of an expanding medium. Space is discretized with
//! piecewise-linear finite elements on a uniform mesh, time with backward-Euler
//! convolution quadrature.
//!
//! Modules:
//! - [`fem1d`]: mesh, mass/stiffness assembly, projections, norms, prolongation,
//!   tridiagonal solves
//! - [`cq_weights`]: convolution-quadrature weights and history sums
//! - [`solver`]: the fully discrete time stepper
//! - [`ml_oracle`]: Mittag-Leffler function and the closed-form single-mode solution
//! - [`experiments`]: self-convergence and oracle studies, rate tables, CSV output
//! - [`cli`]: experiment configuration files and the command-line driver
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! `f64` aliases below are what the CLI and the convergence studies use.
//!
//! # Example
//! ```
//! use fracdiff::{CoefficientLaw, PiecewiseFn, ProblemSpec, SourceTerm};
//!
//! let spec = ProblemSpec::new(
//!     0.5,
//!     1.0,
//!     CoefficientLaw::power(1.0, 1.01),
//!     PiecewiseFn::characteristic(0.5, 1.0).unwrap(),
//!     SourceTerm::zero(),
//! )
//! .unwrap();
//! let run = fracdiff::solve(&spec, 32, 20).unwrap();
//! assert_eq!(run.trajectory().len(), 21);
//! ```
// `!(x >= 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod cli;
pub mod cq_weights;
mod error;
pub mod experiments;
pub mod fem1d;
pub mod ml_oracle;
mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use cq_weights::CqWeights;
pub use experiments::{Axis, RateTable};
pub use fem1d::{Mesh1D, NodalVector, PiecewiseFn, TriDiagMatrix};
pub use solver::{solve, CoefficientLaw, DiscreteRun, ProblemSpec, SourceTerm, TimeProfile};

/// Double-precision mesh.
pub type Mesh = fem1d::Mesh1D<f64>;
/// Double-precision tridiagonal operator.
pub type TriDiag = fem1d::TriDiagMatrix<f64>;
/// Double-precision interior-node vector.
pub type Nodal = fem1d::NodalVector<f64>;
/// Double-precision spatial function description.
pub type Piecewise = fem1d::PiecewiseFn<f64>;
/// Double-precision convolution-quadrature weights.
pub type Weights = cq_weights::CqWeights<f64>;
/// Double-precision problem description.
pub type Problem = solver::ProblemSpec<f64>;
/// Double-precision trajectory.
pub type Run = solver::DiscreteRun<f64>;
/// Double-precision convergence table.
pub type Table = experiments::RateTable<f64>;
