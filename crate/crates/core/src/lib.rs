//! Numerical periodic homogenization of matrix elliptic operators and of the
//! associated wave equation in a bounded box with Dirichlet conditions.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`]: periodicity lattice, dual lattice, frequency sets;
//! * [`coefficients`]: the symbol `b(xi)`, periodic fields `g`, `a_j`, `Q` and a catalog;
//! * [`cell`]: Fourier–Galerkin cell problems, effective matrix, `V`, `W`;
//! * [`dirichlet`]: meshes, discrete operators, extension, Steklov smoothing, correctors;
//! * [`evolution`]: cosine/sine operator functions, Duhamel solutions, leapfrog oracle;
//! * [`study`]: convergence sweeps, rate fits, reports and the command line.

pub mod cell;
pub mod coefficients;
pub mod dirichlet;
pub mod error;
pub mod evolution;
pub mod lattice;
pub mod linalg;
pub mod spectral;
pub mod study;

pub use error::{Error, Result};
pub use lattice::Lattice;
