//! Periodic cell problems, effective matrix `g0`, interaction matrices `V`, `W` and the
//! Voigt–Reuss bracketing.

mod solve;

use log::warn;

use crate::coefficients::{CoefficientSet, PeriodicField, Symbol};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{hermitian_eigenvalues, hermitize, skew_norm, CMat};
use crate::spectral::{C64, ZERO};

use solve::CellOperator;
pub use solve::CG_TOL;

/// A zero-mean periodic corrector together with its solver diagnostics.
#[derive(Debug, Clone)]
pub struct Corrector {
    pub field: PeriodicField,
    /// Relative residual per right-hand-side column.
    pub residuals: Vec<f64>,
    pub iterations: Vec<usize>,
}

/// Everything the effective and corrector stages need from the cell.
#[derive(Debug, Clone)]
pub struct CellSolution {
    pub n: usize,
    pub lattice: Lattice,
    pub symbol: Symbol,
    /// `Lambda`, `n x m`.
    pub lambda: Corrector,
    /// `Lambda~`, `n x n`.
    pub lambda_tilde: Corrector,
    /// `d Lambda / d y_i` per Cartesian axis.
    pub grad_lambda: Vec<PeriodicField>,
    pub grad_lambda_tilde: Vec<PeriodicField>,
    /// `b(D) Lambda~`, `m x n`.
    pub b_lambda_tilde: PeriodicField,
    /// `g~ = g (b(D) Lambda + 1)` on the doubled grid.
    pub g_tilde: PeriodicField,
    /// `g b(D) Lambda~` on the doubled grid.
    pub g_b_lambda_tilde: PeriodicField,
    pub g0: CMat,
    /// `m x n`.
    pub v: CMat,
    pub w: CMat,
}

impl CellSolution {
    /// `|Lambda|_2 + |Lambda~|_2` (root-mean-square over the grid).
    pub fn corrector_size(&self) -> f64 {
        self.lambda.field.rms() + self.lambda_tilde.field.rms()
    }

    pub fn max_residual(&self) -> f64 {
        self.lambda
            .residuals
            .iter()
            .chain(&self.lambda_tilde.residuals)
            .fold(0.0, |a, &b| a.max(b))
    }
}

/// Outcome of the bracketing check `g_lower <= g0 <= g_upper`.
#[derive(Debug, Clone)]
pub struct VoigtReuss {
    /// Harmonic mean `(mean g^{-1})^{-1}`.
    pub g_lower: CMat,
    /// Arithmetic mean of `g`.
    pub g_upper: CMat,
    /// Smallest eigenvalue of `g0 - g_lower`.
    pub lower_margin: f64,
    /// Smallest eigenvalue of `g_upper - g0`.
    pub upper_margin: f64,
    pub tolerance: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

fn check_resolution(n: usize) -> Result<()> {
    if n % 2 != 0 {
        return Err(Error::OddResolution(n));
    }
    if n < 8 {
        return Err(Error::InvalidParameter(format!(
            "cell resolution must be >= 8, got {n}"
        )));
    }
    Ok(())
}

fn check_dims(sym: &Symbol, g: &PeriodicField, lat: &Lattice) -> Result<()> {
    if sym.dim() != lat.dim() || g.dim() != lat.dim() {
        return Err(Error::Shape("symbol, field and lattice dimensions differ".into()));
    }
    if g.shape() != (sym.m(), sym.m()) {
        return Err(Error::Shape(format!("g must be {0} x {0}", sym.m())));
    }
    Ok(())
}

/// Assembles a field with `cols` columns from per-column coefficient vectors.
fn field_from_columns(lat: &Lattice, n: usize, rows: usize, columns: &[Vec<Vec<C64>>]) -> Result<PeriodicField> {
    let cols = columns.len();
    let mut coeffs = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for col in columns {
            coeffs.push(col[r].clone());
        }
    }
    PeriodicField::from_coefficients(lat.dim(), n, rows, cols, coeffs)
}

fn solve_columns(op: &CellOperator, rhs: Vec<Vec<Vec<C64>>>) -> Result<(Vec<Vec<Vec<C64>>>, Vec<f64>, Vec<usize>)> {
    use rayon::prelude::*;
    let results: Vec<Result<(Vec<Vec<C64>>, f64, usize)>> = rhs
        .par_iter()
        .map(|f| {
            let (u, _, it) = op.solve(f)?;
            Ok((u.clone(), op.residual(&u, f), it))
        })
        .collect();
    let mut sols = Vec::new();
    let mut res = Vec::new();
    let mut its = Vec::new();
    for r in results {
        let (u, rr, it) = r?;
        sols.push(u);
        res.push(rr);
        its.push(it);
    }
    Ok((sols, res, its))
}

/// Solves `b(D)* g (b(D) Lambda + 1_m) = 0` with zero mean, one column at a time.
pub fn solve_lambda(sym: &Symbol, g: &PeriodicField, lat: &Lattice, n: usize) -> Result<Corrector> {
    check_resolution(n)?;
    check_dims(sym, g, lat)?;
    let g = g.resampled(n)?;
    let op = CellOperator::new(sym, &g, lat, n)?;
    let (m, cols) = (sym.m(), sym.n());
    let rhs: Vec<Vec<Vec<C64>>> = (0..m)
        .map(|k| {
            let column: Vec<Vec<C64>> = (0..m).map(|r| g.coefficients(r, k).to_vec()).collect();
            let mut f = op.apply_b_adjoint(&column);
            negate(&mut f);
            f
        })
        .collect();
    let (sols, residuals, iterations) = solve_columns(&op, rhs)?;
    Ok(Corrector {
        field: field_from_columns(lat, n, cols, &sols)?,
        residuals,
        iterations,
    })
}

/// Solves `b(D)* g b(D) Lambda~ + sum_j D_j a_j* = 0` with zero mean.
pub fn solve_lambda_tilde(
    sym: &Symbol,
    g: &PeriodicField,
    a: &[PeriodicField],
    lat: &Lattice,
    n: usize,
) -> Result<Corrector> {
    check_resolution(n)?;
    check_dims(sym, g, lat)?;
    let cols = sym.n();
    if a.is_empty() {
        return Ok(Corrector {
            field: PeriodicField::zeros(lat.dim(), n, cols, cols),
            residuals: vec![0.0; cols],
            iterations: vec![0; cols],
        });
    }
    if a.len() != lat.dim() {
        return Err(Error::Shape(format!("expected {} lower-order fields", lat.dim())));
    }
    let g = g.resampled(n)?;
    let op = CellOperator::new(sym, &g, lat, n)?;
    let a_adj: Vec<PeriodicField> = a
        .iter()
        .map(|f| f.resampled(n)?.map(|v| v.adjoint()))
        .collect::<Result<_>>()?;
    let total = op.total();
    let rhs: Vec<Vec<Vec<C64>>> = (0..cols)
        .map(|k| {
            let mut f = vec![vec![ZERO; total]; cols];
            for (j, aj) in a_adj.iter().enumerate() {
                for (r, fr) in f.iter_mut().enumerate() {
                    let c = aj.coefficients(r, k);
                    for flat in 0..total {
                        fr[flat] -= c[flat] * op.xi[flat][j];
                    }
                }
            }
            op.project(&mut f);
            f
        })
        .collect();
    let (sols, residuals, iterations) = solve_columns(&op, rhs)?;
    Ok(Corrector {
        field: field_from_columns(lat, n, cols, &sols)?,
        residuals,
        iterations,
    })
}

fn negate(f: &mut [Vec<C64>]) {
    for c in f.iter_mut() {
        for v in c.iter_mut() {
            *v = -*v;
        }
    }
}

/// `b(D) u` for a field `u` with `n` rows, computed on its Fourier coefficients.
pub fn apply_symbol(field: &PeriodicField, sym: &Symbol, lat: &Lattice) -> Result<PeriodicField> {
    let (rows, cols) = field.shape();
    if rows != sym.n() {
        return Err(Error::Shape(format!("b(D) needs {} rows, got {rows}", sym.n())));
    }
    let n = field.n();
    let xi = dual_points(lat, n);
    let m = sym.m();
    let bx: Vec<CMat> = xi.iter().map(|x| sym.eval(x)).collect();
    let mut coeffs = Vec::with_capacity(m * cols);
    for r in 0..m {
        for c in 0..cols {
            let v: Vec<C64> = (0..bx.len())
                .map(|flat| {
                    (0..rows)
                        .map(|k| bx[flat][(r, k)] * field.coefficients(k, c)[flat])
                        .sum()
                })
                .collect();
            coeffs.push(v);
        }
    }
    PeriodicField::from_coefficients(lat.dim(), n, m, cols, coeffs)
}

/// Cartesian partial derivatives `d/dy_i` of a field, computed spectrally.
pub fn cartesian_gradient(field: &PeriodicField, lat: &Lattice) -> Result<Vec<PeriodicField>> {
    let (rows, cols) = field.shape();
    let n = field.n();
    let xi = dual_points(lat, n);
    let half = (n / 2) as i64;
    (0..lat.dim())
        .map(|i| {
            let mut coeffs = Vec::with_capacity(rows * cols);
            for r in 0..rows {
                for c in 0..cols {
                    let src = field.coefficients(r, c);
                    coeffs.push(
                        (0..xi.len())
                            .map(|flat| {
                                let nyquist = crate::spectral::unflatten(flat, n, lat.dim())
                                    .iter()
                                    .any(|&k| crate::spectral::signed_frequency(k, n) == -half);
                                if nyquist {
                                    ZERO
                                } else {
                                    src[flat] * C64::new(0.0, xi[flat][i])
                                }
                            })
                            .collect(),
                    );
                }
            }
            PeriodicField::from_coefficients(lat.dim(), n, rows, cols, coeffs)
        })
        .collect()
}

fn dual_points(lat: &Lattice, n: usize) -> Vec<Vec<f64>> {
    let dim = lat.dim();
    (0..n.pow(dim as u32))
        .map(|flat| {
            let nu: Vec<i64> = crate::spectral::unflatten(flat, n, dim)
                .into_iter()
                .map(|k| crate::spectral::signed_frequency(k, n))
                .collect();
            lat.dual_point(&nu)
        })
        .collect()
}

/// Pointwise products on a grid fine enough to hold them exactly.
fn pointwise(
    a: &PeriodicField,
    b: &PeriodicField,
    n: usize,
    f: impl Fn(&CMat, &CMat) -> CMat,
) -> Result<PeriodicField> {
    let a = a.resampled(n)?;
    let b = b.resampled(n)?;
    let values = a.values().iter().zip(b.values()).map(|(x, y)| f(x, y)).collect();
    PeriodicField::from_samples(a.dim(), n, values)
}

/// `g~ = g (b(D) Lambda + 1_m)` on the doubled grid and its hermitised mean `g0`.
pub fn effective_matrix(
    g: &PeriodicField,
    lambda: &PeriodicField,
    sym: &Symbol,
    lat: &Lattice,
) -> Result<(PeriodicField, CMat)> {
    let n = lambda.n();
    let b_lambda = apply_symbol(lambda, sym, lat)?;
    let id = CMat::identity(sym.m(), sym.m());
    let g_tilde = pointwise(g, &b_lambda, 2 * n, |gv, bl| gv * (bl + &id))?;
    let raw = g_tilde.mean();
    let skew = skew_norm(&raw);
    if skew > 1e-8 * raw.norm() {
        warn!("effective matrix has skew part {skew:e}; hermitising");
    }
    Ok((g_tilde, hermitize(&raw)))
}

/// `V = mean((b(D)Lambda)* g b(D)Lambda~)` and `W = mean((b(D)Lambda~)* g b(D)Lambda~)`.
pub fn interaction_matrices(
    g: &PeriodicField,
    lambda: &PeriodicField,
    lambda_tilde: &PeriodicField,
    sym: &Symbol,
    lat: &Lattice,
) -> Result<(CMat, CMat)> {
    let n = lambda.n().max(lambda_tilde.n());
    let bl = apply_symbol(&lambda.resampled(n)?, sym, lat)?.resampled(2 * n)?;
    let blt = apply_symbol(&lambda_tilde.resampled(n)?, sym, lat)?.resampled(2 * n)?;
    let g2 = g.resampled(2 * n)?;
    let count = C64::new(g2.len() as f64, 0.0);
    let mut v = CMat::zeros(sym.m(), sym.n());
    let mut w = CMat::zeros(sym.n(), sym.n());
    for ((x, gv), y) in bl.values().iter().zip(g2.values()).zip(blt.values()) {
        let gy = gv * y;
        v += x.adjoint() * &gy;
        w += y.adjoint() * &gy;
    }
    Ok((v / count, hermitize(&(w / count))))
}

/// Checks `g_lower <= g0 <= g_upper` with tolerance `-1e-9 |g|_inf`.
pub fn voigt_reuss(g: &PeriodicField, g0: &CMat) -> Result<VoigtReuss> {
    let g_upper = hermitize(&g.mean());
    let g_lower = hermitize(&g.mean_inverse()?.try_inverse().ok_or(Error::NotPositiveField(0.0))?);
    let lower_margin = hermitian_eigenvalues(&(g0 - &g_lower))[0];
    let upper_margin = hermitian_eigenvalues(&(&g_upper - g0))[0];
    let tolerance = 1e-9 * g.sup_norm();
    Ok(VoigtReuss {
        lower_ok: lower_margin >= -tolerance,
        upper_ok: upper_margin >= -tolerance,
        g_lower,
        g_upper,
        lower_margin,
        upper_margin,
        tolerance,
    })
}

/// Runs both cell problems and every derived quantity on an `n^d` grid.
pub fn solve_cell(coeffs: &CoefficientSet, lat: &Lattice, n: usize) -> Result<CellSolution> {
    let sym = &coeffs.symbol;
    let lambda = solve_lambda(sym, &coeffs.g, lat, n)?;
    let lambda_tilde = solve_lambda_tilde(sym, &coeffs.g, &coeffs.a, lat, n)?;
    let (g_tilde, g0) = effective_matrix(&coeffs.g, &lambda.field, sym, lat)?;
    let (v, w) = interaction_matrices(&coeffs.g, &lambda.field, &lambda_tilde.field, sym, lat)?;
    let b_lambda_tilde = apply_symbol(&lambda_tilde.field, sym, lat)?;
    let g_b_lambda_tilde = pointwise(&coeffs.g, &b_lambda_tilde, 2 * n, |gv, y| gv * y)?;
    Ok(CellSolution {
        n,
        lattice: lat.clone(),
        symbol: sym.clone(),
        grad_lambda: cartesian_gradient(&lambda.field, lat)?,
        grad_lambda_tilde: cartesian_gradient(&lambda_tilde.field, lat)?,
        lambda,
        lambda_tilde,
        b_lambda_tilde,
        g_tilde,
        g_b_lambda_tilde,
        g0,
        v,
        w,
    })
}
