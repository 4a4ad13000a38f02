//! Uniform piecewise-linear finite elements on Ω = (0, 1) with homogeneous
//! Dirichlet boundary values eliminated: every vector and matrix lives on the
//! `n_cells − 1` interior nodes.
mod mesh;
mod piecewise;
mod projection;
pub(crate) mod quadrature;
mod tridiag;

pub use mesh::{build_mesh, l2_norm, prolong, Mesh1D, NodalVector};
pub use piecewise::{Piece, PiecewiseFn};
pub use projection::{interpolate, l2_project, ritz_project};
pub use tridiag::{assemble_mass, assemble_stiffness, solve_tridiag, TriDiagMatrix};
