//! Fourier–Galerkin discretisation of `b(D)* g b(D) u = f` on the cell and its PCG solver.

use crate::coefficients::{PeriodicField, Symbol};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::CMat;
use crate::spectral::{pad_coefficients, signed_frequency, truncate_coefficients, unflatten, GridFft, C64, ZERO};

pub const CG_TOL: f64 = 1e-12;

/// Truncated operator `u -> b(D)* g b(D) u` on modes with `0 < |nu_j| < N/2`.
pub(crate) struct CellOperator {
    dim: usize,
    n: usize,
    m_pad: usize,
    m: usize,
    cols: usize,
    pad_fft: GridFft,
    /// `g` sampled on the padded grid.
    g_pad: Vec<CMat>,
    /// `b(xi_nu)` per flat FFT index of the `N` grid.
    b_xi: Vec<CMat>,
    /// Cartesian `xi_nu` per flat FFT index.
    pub(crate) xi: Vec<Vec<f64>>,
    pub(crate) active: Vec<bool>,
    precond: Vec<CMat>,
}

impl CellOperator {
    pub(crate) fn new(sym: &Symbol, g: &PeriodicField, lat: &Lattice, n: usize) -> Result<Self> {
        let dim = lat.dim();
        let total = n.pow(dim as u32);
        let m_pad = 3 * n / 2;
        let pad_fft = GridFft::new(m_pad, dim);
        let (m, cols) = (sym.m(), sym.n());

        let mut g_pad = vec![CMat::zeros(m, m); m_pad.pow(dim as u32)];
        for r in 0..m {
            for c in 0..m {
                let mut data = pad_coefficients(g.coefficients(r, c), n, m_pad, dim);
                pad_fft.inverse(&mut data);
                for (v, x) in g_pad.iter_mut().zip(data) {
                    v[(r, c)] = x;
                }
            }
        }
        let g_mean = g.mean();

        let mut xi = Vec::with_capacity(total);
        let mut active = Vec::with_capacity(total);
        let mut b_xi = Vec::with_capacity(total);
        let mut precond = Vec::with_capacity(total);
        let half = (n / 2) as i64;
        for flat in 0..total {
            let nu: Vec<i64> = unflatten(flat, n, dim)
                .into_iter()
                .map(|k| signed_frequency(k, n))
                .collect();
            let on = nu.iter().any(|&k| k != 0) && nu.iter().all(|&k| k > -half && k < half);
            let x = lat.dual_point(&nu);
            let b = sym.eval(&x);
            let p = if on {
                let s = b.adjoint() * &g_mean * &b;
                s.try_inverse()
                    .ok_or_else(|| Error::SolverBreakdown(format!("singular preconditioner at nu = {nu:?}")))?
            } else {
                CMat::zeros(cols, cols)
            };
            xi.push(x);
            active.push(on);
            b_xi.push(b);
            precond.push(p);
        }
        Ok(Self {
            dim,
            n,
            m_pad,
            m,
            cols,
            pad_fft,
            g_pad,
            b_xi,
            xi,
            active,
            precond,
        })
    }

    pub(crate) fn total(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// `b(D) u` coefficients (`m` components) of an `n`-component coefficient vector.
    pub(crate) fn apply_b(&self, u: &[Vec<C64>]) -> Vec<Vec<C64>> {
        let total = self.total();
        let mut w = vec![vec![ZERO; total]; self.m];
        for flat in 0..total {
            if !self.active[flat] {
                continue;
            }
            let b = &self.b_xi[flat];
            for (c, wc) in w.iter_mut().enumerate() {
                wc[flat] = (0..self.cols).map(|k| b[(c, k)] * u[k][flat]).sum();
            }
        }
        w
    }

    /// `b(xi)*` applied modewise to `m`-component coefficients, restricted to active modes.
    pub(crate) fn apply_b_adjoint(&self, z: &[Vec<C64>]) -> Vec<Vec<C64>> {
        let total = self.total();
        let mut out = vec![vec![ZERO; total]; self.cols];
        for flat in 0..total {
            if !self.active[flat] {
                continue;
            }
            let b = &self.b_xi[flat];
            for (k, ok) in out.iter_mut().enumerate() {
                ok[flat] = (0..self.m).map(|c| b[(c, k)].conj() * z[c][flat]).sum();
            }
        }
        out
    }

    pub(crate) fn apply(&self, u: &[Vec<C64>]) -> Vec<Vec<C64>> {
        let w = self.apply_b(u);
        let mut phys: Vec<Vec<C64>> = w
            .iter()
            .map(|wc| {
                let mut data = pad_coefficients(wc, self.n, self.m_pad, self.dim);
                self.pad_fft.inverse(&mut data);
                data
            })
            .collect();
        let points = self.g_pad.len();
        let mut tmp = vec![ZERO; self.m];
        for p in 0..points {
            let g = &self.g_pad[p];
            for (r, t) in tmp.iter_mut().enumerate() {
                *t = (0..self.m).map(|c| g[(r, c)] * phys[c][p]).sum();
            }
            for (r, t) in tmp.iter().enumerate() {
                phys[r][p] = *t;
            }
        }
        let z: Vec<Vec<C64>> = phys
            .into_iter()
            .map(|mut data| {
                self.pad_fft.forward(&mut data);
                truncate_coefficients(&data, self.m_pad, self.n, self.dim)
            })
            .collect();
        self.apply_b_adjoint(&z)
    }

    fn precondition(&self, r: &[Vec<C64>]) -> Vec<Vec<C64>> {
        let total = self.total();
        let mut out = vec![vec![ZERO; total]; self.cols];
        for flat in 0..total {
            if !self.active[flat] {
                continue;
            }
            let p = &self.precond[flat];
            for (k, ok) in out.iter_mut().enumerate() {
                ok[flat] = (0..self.cols).map(|c| p[(k, c)] * r[c][flat]).sum();
            }
        }
        out
    }

    /// Restricts a coefficient vector to the active modes.
    pub(crate) fn project(&self, f: &mut [Vec<C64>]) {
        for comp in f.iter_mut() {
            for (v, &on) in comp.iter_mut().zip(&self.active) {
                if !on {
                    *v = ZERO;
                }
            }
        }
    }

    /// Preconditioned conjugate gradients; returns (solution, relative residual, iterations).
    pub(crate) fn solve(&self, rhs: &[Vec<C64>]) -> Result<(Vec<Vec<C64>>, f64, usize)> {
        let total = self.total();
        let zero = vec![vec![ZERO; total]; self.cols];
        let rhs_norm = norm(rhs);
        if rhs_norm == 0.0 {
            return Ok((zero, 0.0, 0));
        }
        let max_iter = 10 * total;
        let mut x = zero;
        let mut r = rhs.to_vec();
        let mut z = self.precondition(&r);
        let mut p = z.clone();
        let mut rz = dot(&r, &z).re;
        for it in 0..max_iter {
            let rel = norm(&r) / rhs_norm;
            if rel <= CG_TOL {
                return Ok((x, rel, it));
            }
            let ap = self.apply(&p);
            let pap = dot(&p, &ap).re;
            if !(pap > 0.0) {
                return Err(Error::SolverBreakdown(format!(
                    "non-positive curvature {pap:e} at iteration {it}"
                )));
            }
            let alpha = rz / pap;
            axpy(&mut x, C64::new(alpha, 0.0), &p);
            axpy(&mut r, C64::new(-alpha, 0.0), &ap);
            z = self.precondition(&r);
            let rz_new = dot(&r, &z).re;
            let beta = rz_new / rz;
            rz = rz_new;
            for (pc, zc) in p.iter_mut().zip(&z) {
                for (pv, zv) in pc.iter_mut().zip(zc) {
                    *pv = zv + *pv * beta;
                }
            }
        }
        let rel = norm(&r) / rhs_norm;
        if rel <= 1e-10 {
            return Ok((x, rel, max_iter));
        }
        Err(Error::SolverBreakdown(format!(
            "no convergence in {max_iter} iterations (relative residual {rel:e})"
        )))
    }

    /// Relative residual `|L u - f| / |f|` (zero when `f = 0` and `u = 0`).
    pub(crate) fn residual(&self, u: &[Vec<C64>], rhs: &[Vec<C64>]) -> f64 {
        let mut lu = self.apply(u);
        axpy(&mut lu, C64::new(-1.0, 0.0), rhs);
        let denom = norm(rhs);
        if denom == 0.0 {
            norm(&lu)
        } else {
            norm(&lu) / denom
        }
    }
}

fn dot(a: &[Vec<C64>], b: &[Vec<C64>]) -> C64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u.conj() * v).sum::<C64>())
        .sum()
}

fn norm(a: &[Vec<C64>]) -> f64 {
    a.iter()
        .flat_map(|c| c.iter())
        .map(|v| v.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn axpy(y: &mut [Vec<C64>], a: C64, x: &[Vec<C64>]) {
    for (yc, xc) in y.iter_mut().zip(x) {
        for (yv, xv) in yc.iter_mut().zip(xc) {
            *yv += a * xv;
        }
    }
}
