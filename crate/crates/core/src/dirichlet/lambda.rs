use std::f64::consts::PI;

use crate::cell::CellSolution;
use crate::coefficients::CoefficientSet;
use crate::error::{Error, Result};
use crate::lattice::Lattice;

use super::assemble::{b0_matrix, b_eps_matrix};
use super::banded::{smallest_eigenvalue, BandedMatrix};
use super::mesh::Mesh;

/// Largest shift tried by [`choose_lambda`].
pub const LAMBDA_MAX: f64 = 65536.0;

/// Coercivity constant `c_* = alpha0 / (4 |g^{-1}|_inf)` of the principal part.
pub fn coercivity(coeffs: &CoefficientSet) -> f64 {
    0.25 * coeffs.symbol.alpha0() / coeffs.g.inv_sup_norm()
}

/// Smallest eigenvalue probe, `None` when the matrix is not positive definite.
fn probe(a: &BandedMatrix) -> Option<f64> {
    let chol = a.cholesky().ok()?;
    Some(smallest_eigenvalue(a, &chol))
}

/// Smallest `lambda` in `{0, 1, 2, 4, ..., 2^16}` for which `B_eps` (every `eps` in the list,
/// on the mesh returned by `mesh_for`) and `B0` have smallest eigenvalue at least
/// `0.25 c_* pi^2 / (max L_k)^2`.
pub fn choose_lambda(
    mesh_for: &dyn Fn(f64) -> Result<Mesh>,
    coeffs: &CoefficientSet,
    cell: &CellSolution,
    lat: &Lattice,
    eps_list: &[f64],
) -> Result<f64> {
    if eps_list.is_empty() {
        return Err(Error::InvalidParameter("choose_lambda needs at least one eps".into()));
    }
    let meshes: Vec<(f64, Mesh)> = eps_list.iter().map(|&e| Ok((e, mesh_for(e)?))).collect::<Result<_>>()?;
    let l_max = meshes[0].1.lengths().iter().copied().fold(0.0, f64::max);
    let margin = 0.25 * coercivity(coeffs) * PI * PI / (l_max * l_max);

    // The shift enters as lambda * I, so the smallest eigenvalue at lambda = 0 decides.
    let base = coeffs.with_lambda(0.0);
    let matrices: Vec<BandedMatrix> = meshes
        .iter()
        .flat_map(|(e, mesh)| [b_eps_matrix(mesh, &base, lat, *e), b0_matrix(mesh, cell, &base)])
        .collect();
    let mut candidates = vec![0.0];
    let mut c = 1.0;
    while c <= LAMBDA_MAX {
        candidates.push(c);
        c *= 2.0;
    }
    'outer: for &lambda in &candidates {
        for a in &matrices {
            let shifted = a.shifted(crate::spectral::C64::new(-lambda, 0.0));
            match probe(&shifted) {
                Some(mu) if mu >= margin => {}
                _ => continue 'outer,
            }
        }
        return Ok(lambda);
    }
    Err(Error::LambdaSearchFailed(LAMBDA_MAX))
}
