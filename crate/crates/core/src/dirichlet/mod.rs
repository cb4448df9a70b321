//! Dirichlet problems on boxes: finite element discretisations of the oscillating and
//! effective operators, the extension and smoothing operators and the first-order corrector.

mod assemble;
mod banded;
mod corrector;
mod extension;
mod lambda;
mod mesh;
mod norms;
mod resolvent;
mod steklov;

pub use assemble::{assemble_b0, assemble_b_eps, DiscreteOperator, OperatorTag};
pub use banded::{smallest_eigenvalue, BandLu, BandedMatrix, Cholesky};
pub use corrector::{apply_symbol_fd, corrector_apply, CorrectorTerms};
pub use extension::ExtensionOperator;
pub use lambda::{choose_lambda, coercivity};
pub use mesh::{GridFunction, Mesh};
pub use norms::{
    fe_gradient, fe_value, grid_quadrature, h1_norm_closed, l2_norm, l2_norm_closed, quadrature_points, QuadPoint,
};
pub use resolvent::resolvent;
pub use steklov::{steklov, steklov_offsets, steklov_periodic, STEKLOV_POINTS};

/// Default ratio `h / eps` of mesh width to period.
pub const DEFAULT_H_OVER_EPS: f64 = 1.0 / 16.0;
