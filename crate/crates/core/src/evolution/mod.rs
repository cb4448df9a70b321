//! Hyperbolic evolution by spectral calculus: operator cosine and sine, the Duhamel
//! solution, first-order approximations, fluxes and a time-stepping cross-check.

mod approx;
mod ibvp;
mod leapfrog;
mod spectral;

pub use approx::{
    corrected, first_order_approx, flux, flux_approx, flux_approx_plain, quadrature_distance, FirstOrder,
};
pub use ibvp::{solve_ibvp, EvolutionResult, Forcing, NaturalSpline};
pub use leapfrog::{largest_eigenvalue, leapfrog_oracle, LeapfrogResult};
pub use spectral::{op_cosine, op_sine_scaled, sine_scaled, spectral_decompose, EigenBasis, MAX_DENSE};

#[cfg(test)]
mod tests;
