use crate::cell::CellSolution;
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::spectral::{C64, ZERO};

use super::extension::ExtensionOperator;
use super::mesh::GridFunction;
use super::steklov::steklov;

/// Pieces of the first-order corrector on the closed mesh of the box.
#[derive(Debug, Clone)]
pub struct CorrectorTerms {
    /// `Lambda^eps w_b + Lambda~^eps w_u` (`n` components).
    pub value: GridFunction,
    /// `w_b = S_eps b(D) u` (or `b(D) u` without smoothing), `m` components.
    pub smoothed_b: GridFunction,
    /// `w_u = S_eps u` (or `u` without smoothing), `n` components.
    pub smoothed_u: GridFunction,
}

/// `b(D) u` by centred differences at every node that has both neighbours on each axis;
/// the outermost layer is set to zero.
pub fn apply_symbol_fd(u: &GridFunction, mats: &[CMat]) -> GridFunction {
    let d = u.dim();
    let (m, n) = mats[0].shape();
    let mut out = GridFunction::zeros(u.dims.clone(), u.origin.clone(), u.h.clone(), m);
    for flat in 0..u.n_nodes() {
        let idx = u.index(flat);
        if (0..d).any(|k| idx[k] == 0 || idx[k] + 1 >= u.dims[k]) {
            continue;
        }
        let mut acc = vec![ZERO; m];
        for (l, bl) in mats.iter().enumerate() {
            let mut plus = idx.clone();
            plus[l] += 1;
            let mut minus = idx.clone();
            minus[l] -= 1;
            let (up, um) = (u.node(u.flat(&plus)), u.node(u.flat(&minus)));
            let scale = C64::new(0.0, -1.0 / (2.0 * u.h[l]));
            for c in 0..n {
                let du = (up[c] - um[c]) * scale;
                for (r, a) in acc.iter_mut().enumerate() {
                    *a += bl[(r, c)] * du;
                }
            }
        }
        out.node_mut(flat).copy_from_slice(&acc);
    }
    out
}

/// Corrector `R_O (Lambda^eps b(D) + Lambda~^eps) S_eps u_ext` (without the factor `eps`);
/// with `smoothed = false` the Steklov smoothing is skipped.
pub fn corrector_apply(
    cell: &CellSolution,
    eps: f64,
    u_ext: &GridFunction,
    ext: &ExtensionOperator,
    smoothed: bool,
) -> Result<CorrectorTerms> {
    let sym = &cell.symbol;
    let (m, n) = (sym.m(), sym.n());
    if u_ext.components() != n {
        return Err(Error::Shape(format!("corrector expects {n} components")));
    }
    let mesh = ext.mesh();
    let b_u = apply_symbol_fd(u_ext, sym.mats());
    let (smoothed_b, smoothed_u) = if smoothed {
        let closed = mesh.closed_grid(1);
        let targets = closed.points();
        let wb = steklov(&b_u, &cell.lattice, eps, &targets)?;
        let wu = steklov(u_ext, &cell.lattice, eps, &targets)?;
        (
            closed.map_nodes(m, |k, _| wb[k].clone()),
            closed.map_nodes(n, |k, _| wu[k].clone()),
        )
    } else {
        (ext.restrict(&b_u), ext.restrict(u_ext))
    };
    let points = smoothed_b.points();
    let lam = cell.lambda.field.eval_scaled(&cell.lattice, eps, &points);
    let lam_t = if cell.lambda_tilde.field.max_abs() > 0.0 {
        Some(cell.lambda_tilde.field.eval_scaled(&cell.lattice, eps, &points))
    } else {
        None
    };
    let value = smoothed_b.map_nodes(n, |k, wb| {
        let mut out: Vec<C64> = (0..n).map(|r| (0..m).map(|c| lam[k][(r, c)] * wb[c]).sum()).collect();
        if let Some(lt) = &lam_t {
            let wu = smoothed_u.node(k);
            for (r, o) in out.iter_mut().enumerate() {
                *o += (0..n).map(|c| lt[k][(r, c)] * wu[c]).sum::<C64>();
            }
        }
        out
    });
    Ok(CorrectorTerms {
        value,
        smoothed_b,
        smoothed_u,
    })
}
