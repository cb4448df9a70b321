use crate::cell::CellSolution;
use crate::coefficients::CoefficientSet;
use crate::dirichlet::{
    corrector_apply, fe_gradient, fe_value, CorrectorTerms, ExtensionOperator, GridFunction, Mesh, QuadPoint,
};
use crate::error::Result;
use crate::lattice::Lattice;
use crate::linalg::CMat;
use crate::spectral::{C64, ZERO};

use super::ibvp::EvolutionResult;

/// First-order approximation `v = u0 + eps K u0` on the closed mesh together with the
/// corrector pieces it was built from.
#[derive(Debug, Clone)]
pub struct FirstOrder {
    pub value: GridFunction,
    pub terms: CorrectorTerms,
}

/// `u0 + eps R_O (Lambda^eps b(D) + Lambda~^eps) S_eps P_O u0` for an interior vector `u0`.
pub fn corrected(mesh: &Mesh, u0: &[C64], cell: &CellSolution, eps: f64, smoothed: bool) -> Result<FirstOrder> {
    let n = cell.symbol.n();
    let closed = mesh.to_closed(u0, n);
    let ext = ExtensionOperator::for_eps(mesh, &cell.lattice, eps)?;
    let extended = ext.extend(&closed)?;
    let terms = corrector_apply(cell, eps, &extended, &ext, smoothed)?;
    let mut value = closed;
    for (v, k) in value.data.iter_mut().zip(&terms.value.data) {
        *v += k * eps;
    }
    Ok(FirstOrder { value, terms })
}

/// First-order approximation at every time of an effective solution path.
pub fn first_order_approx(
    u0: &EvolutionResult,
    cell: &CellSolution,
    eps: f64,
    smoothed: bool,
) -> Result<Vec<FirstOrder>> {
    u0.u.iter()
        .map(|u| corrected(&u0.mesh, u, cell, eps, smoothed))
        .collect()
}

/// `b(D) u` of the finite element function at a quadrature point.
fn symbol_of_gradient(mats: &[CMat], grad: &[Vec<C64>]) -> Vec<C64> {
    let (m, n) = mats[0].shape();
    let mut out = vec![ZERO; m];
    for (bl, gl) in mats.iter().zip(grad) {
        for r in 0..m {
            for c in 0..n {
                out[r] += bl[(r, c)] * C64::new(0.0, -1.0) * gl[c];
            }
        }
    }
    out
}

fn mat_vec(a: &CMat, v: &[C64]) -> Vec<C64> {
    (0..a.nrows())
        .map(|r| (0..a.ncols()).map(|c| a[(r, c)] * v[c]).sum())
        .collect()
}

/// Flux `p = g^eps b(D) u` of an interior vector at the stiffness quadrature points.
pub fn flux(
    mesh: &Mesh,
    u: &[C64],
    coeffs: &CoefficientSet,
    lat: &Lattice,
    eps: f64,
    points: &[QuadPoint],
) -> Vec<Vec<C64>> {
    let closed = mesh.to_closed(u, coeffs.symbol.n());
    let xs: Vec<Vec<f64>> = points.iter().map(|q| q.x.clone()).collect();
    let g = coeffs.g.eval_scaled(lat, eps, &xs);
    points
        .iter()
        .zip(&g)
        .map(|(q, gq)| mat_vec(gq, &symbol_of_gradient(coeffs.symbol.mats(), &fe_gradient(&closed, q))))
        .collect()
}

/// `g~^eps w_b + (g b(D) Lambda~)^eps w_u` at the quadrature points, with the smoothed
/// fields of `terms` interpolated from the nodes.
pub fn flux_approx(terms: &CorrectorTerms, cell: &CellSolution, eps: f64, points: &[QuadPoint]) -> Vec<Vec<C64>> {
    let xs: Vec<Vec<f64>> = points.iter().map(|q| q.x.clone()).collect();
    let gt = cell.g_tilde.eval_scaled(&cell.lattice, eps, &xs);
    let gbl = if cell.g_b_lambda_tilde.max_abs() > 0.0 {
        Some(cell.g_b_lambda_tilde.eval_scaled(&cell.lattice, eps, &xs))
    } else {
        None
    };
    points
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let mut p = mat_vec(&gt[i], &fe_value(&terms.smoothed_b, q));
            if let Some(gbl) = &gbl {
                let extra = mat_vec(&gbl[i], &fe_value(&terms.smoothed_u, q));
                p.iter_mut().zip(extra).for_each(|(a, b)| *a += b);
            }
            p
        })
        .collect()
}

/// `g~^eps b(D) u0 + (g b(D) Lambda~)^eps u0` at the quadrature points, without smoothing;
/// with vanishing cell correctors this is `g0 b(D) u0`.
pub fn flux_approx_plain(
    mesh: &Mesh,
    u0: &[C64],
    cell: &CellSolution,
    eps: f64,
    points: &[QuadPoint],
) -> Vec<Vec<C64>> {
    let closed = mesh.to_closed(u0, cell.symbol.n());
    let xs: Vec<Vec<f64>> = points.iter().map(|q| q.x.clone()).collect();
    let gt = cell.g_tilde.eval_scaled(&cell.lattice, eps, &xs);
    let gbl = if cell.g_b_lambda_tilde.max_abs() > 0.0 {
        Some(cell.g_b_lambda_tilde.eval_scaled(&cell.lattice, eps, &xs))
    } else {
        None
    };
    points
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let mut p = mat_vec(
                &gt[i],
                &symbol_of_gradient(cell.symbol.mats(), &fe_gradient(&closed, q)),
            );
            if let Some(gbl) = &gbl {
                let extra = mat_vec(&gbl[i], &fe_value(&closed, q));
                p.iter_mut().zip(extra).for_each(|(a, b)| *a += b);
            }
            p
        })
        .collect()
}

/// Quadrature `L_2` distance between two vector fields sampled at the same points.
pub fn quadrature_distance(points: &[QuadPoint], a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    points
        .iter()
        .zip(a.iter().zip(b))
        .map(|(q, (x, y))| q.weight * x.iter().zip(y).map(|(u, v)| (u - v).norm_sqr()).sum::<f64>())
        .sum::<f64>()
        .sqrt()
}
