use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::config::{data_profile, time_profile, DataProfile, SweepConfig};
use super::report::{Estimate, RateReport};
use crate::cell::{solve_cell, CellSolution};
use crate::coefficients::CoefficientSet;
use crate::dirichlet::{
    assemble_b0, assemble_b_eps, choose_lambda, h1_norm_closed, l2_norm, quadrature_points, resolvent, CorrectorTerms,
    DiscreteOperator, Mesh, QuadPoint,
};
use crate::error::{Error, Result};
use crate::evolution::{
    corrected, flux, flux_approx, flux_approx_plain, op_cosine, quadrature_distance, solve_ibvp, spectral_decompose,
    EigenBasis, Forcing,
};
use crate::lattice::Lattice;
use crate::spectral::C64;

/// Sampling step of the forcing in time.
pub const FORCING_DT: f64 = 0.02;
/// Sine modes per axis mixed into the random resolvent data.
pub const RESOLVENT_MODES: u32 = 8;

/// Minimal slopes of the strict estimates.
pub const L2_THRESHOLD: f64 = 0.9;
pub const H1_THRESHOLD: f64 = 0.45;

/// Cell correctors at or below this size count as zero.
pub const ZERO_CORRECTOR: f64 = 1e-12;

/// Everything a sweep shares across `eps`: the coefficients with their shift, the cell
/// solution and the lattice.
#[derive(Debug, Clone)]
pub struct Study {
    pub cfg: SweepConfig,
    pub lattice: Lattice,
    pub coeffs: CoefficientSet,
    pub cell: CellSolution,
    pub eps: Vec<f64>,
}

/// Operators at one `eps`.
pub struct Case {
    pub eps: f64,
    pub mesh: Mesh,
    pub b_eps: DiscreteOperator,
    pub b0: DiscreteOperator,
}

impl Study {
    pub fn prepare(cfg: &SweepConfig) -> Result<Self> {
        cfg.validate()?;
        let lattice = cfg.lattice()?;
        let coeffs = cfg.coefficients()?;
        let cell = solve_cell(&coeffs, &lattice, cfg.cell.n)?;
        let eps = cfg.eps_list();
        let lambda = match cfg.sweep.lambda {
            Some(l) => l,
            None => choose_lambda(&|e| cfg.mesh_for(e), &coeffs, &cell, &lattice, &eps)?.max(coeffs.lambda),
        };
        Ok(Self {
            cfg: cfg.clone(),
            lattice,
            coeffs: coeffs.with_lambda(lambda),
            cell,
            eps,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.coeffs.lambda
    }

    pub fn n(&self) -> usize {
        self.coeffs.symbol.n()
    }

    pub fn case(&self, eps: f64) -> Result<Case> {
        let mesh = self.cfg.mesh_for(eps)?;
        let b_eps = assemble_b_eps(&mesh, &self.coeffs, &self.lattice, eps, self.cfg.mesh.h_over_eps)?;
        let b0 = assemble_b0(&mesh, &self.cell, &self.coeffs)?;
        Ok(Case { eps, mesh, b_eps, b0 })
    }

    /// `(B0)^{-2} f` for the named data function.
    pub fn regularized(&self, case: &Case, name: &str) -> Result<Vec<C64>> {
        let f = data_profile(name)?.sample(&case.mesh, self.n());
        Ok(case.b0.solve(&case.b0.solve(&f)))
    }

    /// Forcing `profile(t) (B0)^{-2} f_F` sampled on `[0, t_max]`; `None` when identically zero.
    pub fn forcing(&self, case: &Case, t_max: f64) -> Result<Option<Forcing>> {
        let profile = time_profile(&self.cfg.data.forcing_profile)?;
        if data_profile(&self.cfg.data.forcing)? == DataProfile::Zero || self.cfg.data.forcing_profile == "zero" {
            return Ok(None);
        }
        let base = self.regularized(case, &self.cfg.data.forcing)?;
        Ok(Some(Forcing::sample(t_max.max(FORCING_DT), FORCING_DT, |t| {
            let s = profile(t);
            base.iter().map(|v| v * s).collect()
        })))
    }

    pub fn smoothed(&self) -> bool {
        self.cfg.corrector.smoothed
    }

    /// Flux approximation of `u0`: smoothed unless smoothing is switched off or the cell
    /// correctors vanish, in which case it is `g0 b(D) u0`.
    pub fn flux_approximation(
        &self,
        case: &Case,
        u0: &[C64],
        terms: &CorrectorTerms,
        points: &[QuadPoint],
    ) -> Vec<Vec<C64>> {
        if self.smoothed() && self.cell.corrector_size() > ZERO_CORRECTOR {
            flux_approx(terms, &self.cell, case.eps, points)
        } else {
            flux_approx_plain(&case.mesh, u0, &self.cell, case.eps, points)
        }
    }

    /// Runs `f` for every `eps` in parallel and returns the results in sweep order.
    fn per_eps<T: Send>(&self, f: impl Fn(&Case) -> Result<T> + Sync) -> Result<Vec<T>> {
        self.eps
            .par_iter()
            .map(|&e| f(&self.case(e)?))
            .collect::<Vec<Result<T>>>()
            .into_iter()
            .collect()
    }
}

fn difference(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Closed-mesh `H^1` distance between an interior vector and a closed-grid approximation.
fn h1_distance(mesh: &Mesh, u: &[C64], v: &crate::dirichlet::GridFunction) -> f64 {
    let mut d = mesh.to_closed(u, v.components());
    for (a, b) in d.data.iter_mut().zip(&v.data) {
        *a -= b;
    }
    h1_norm_closed(&d)
}

/// Columns of `(eps, error)` pairs, one column per estimate.
fn columns(eps: &[f64], rows: &[Vec<f64>]) -> Vec<Vec<(f64, f64)>> {
    let width = rows.first().map_or(0, Vec::len);
    (0..width)
        .map(|j| eps.iter().zip(rows).map(|(&e, r)| (e, r[j])).collect())
        .collect()
}

/// Solution-level estimates at every `t`: `u_eps - u0` in `L_2` (full data), and with
/// `phi = 0` the corrected `H^1` error and the flux error.
pub fn convergence_sweep(cfg: &SweepConfig) -> Result<RateReport> {
    let start = Instant::now();
    let study = Study::prepare(cfg)?;
    let times = cfg.sweep.t.clone();
    let t_max = times.iter().copied().fold(0.0, f64::max);
    let rows = study.per_eps(|case| {
        let eb_eps = spectral_decompose(&case.b_eps)?;
        let eb0 = spectral_decompose(&case.b0)?;
        let phi = study.regularized(case, &cfg.data.phi)?;
        let psi = study.regularized(case, &cfg.data.psi)?;
        let forcing = study.forcing(case, t_max)?;
        let full_eps = solve_ibvp(&eb_eps, &phi, &psi, forcing.as_ref(), &times)?;
        let full_0 = solve_ibvp(&eb0, &phi, &psi, forcing.as_ref(), &times)?;
        let zero = vec![C64::new(0.0, 0.0); phi.len()];
        let part_eps = solve_ibvp(&eb_eps, &zero, &psi, forcing.as_ref(), &times)?;
        let part_0 = solve_ibvp(&eb0, &zero, &psi, forcing.as_ref(), &times)?;
        let points = quadrature_points(&case.mesh);
        let mut row = Vec::with_capacity(4 * times.len());
        for k in 0..times.len() {
            row.push(l2_norm(&case.mesh, &difference(&full_eps.u[k], &full_0.u[k])));
            row.push(l2_norm(&case.mesh, &difference(&full_eps.du_dt[k], &full_0.du_dt[k])));
            let v = corrected(&case.mesh, &part_0.u[k], &study.cell, case.eps, study.smoothed())?;
            row.push(h1_distance(&case.mesh, &part_eps.u[k], &v.value));
            let p = flux(
                &case.mesh,
                &part_eps.u[k],
                &study.coeffs,
                &study.lattice,
                case.eps,
                &points,
            );
            let pa = study.flux_approximation(case, &part_0.u[k], &v.terms, &points);
            row.push(quadrature_distance(&points, &p, &pa));
        }
        Ok(row)
    })?;
    let cols = columns(&study.eps, &rows);
    let mut estimates = Vec::new();
    for (k, &t) in times.iter().enumerate() {
        let c = |j: usize| cols[4 * k + j].clone();
        estimates.push(Estimate::new("solution-l2", Some(t), "L2", c(0), Some(L2_THRESHOLD)));
        estimates.push(Estimate::new("velocity-l2", Some(t), "L2", c(1), None));
        estimates.push(Estimate::new(
            "solution-h1-corrector",
            Some(t),
            "H1",
            c(2),
            Some(H1_THRESHOLD),
        ));
        estimates.push(Estimate::new("flux-l2", Some(t), "L2", c(3), Some(H1_THRESHOLD)));
    }
    Ok(RateReport {
        dim: cfg.dim(),
        estimates,
        wall_time: start.elapsed(),
    })
}

/// Normalized random combination of the first sine modes, seeded per `(seed, sample)` so
/// that the same function is drawn for every `eps`.
pub fn random_data(mesh: &Mesh, n: usize, seed: u64, sample: usize) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(sample as u64));
    let d = mesh.dim();
    let modes = RESOLVENT_MODES.pow(d as u32) as usize;
    let weights: Vec<f64> = (0..modes * n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mut f: Vec<C64> = Vec::with_capacity(mesh.n_interior() * n);
    for x in mesh.interior_points() {
        for c in 0..n {
            let mut v = 0.0;
            for m in 0..modes {
                let mut basis = 1.0;
                let mut r = m;
                for (xk, lk) in x.iter().zip(mesh.lengths()) {
                    let k = (r % RESOLVENT_MODES as usize + 1) as f64;
                    r /= RESOLVENT_MODES as usize;
                    basis *= (k * std::f64::consts::PI * xk / lk).sin();
                }
                v += weights[m * n + c] * basis;
            }
            f.push(C64::new(v, 0.0));
        }
    }
    let s = l2_norm(mesh, &f);
    f.iter_mut().for_each(|v| *v /= s);
    f
}

/// Resolvent estimates at the real shift `sweep.zeta`, and `B^{-1/2}` in `L_2`; each error
/// is the maximum over `sweep.samples` random data.
pub fn resolvent_sweep(cfg: &SweepConfig) -> Result<RateReport> {
    let start = Instant::now();
    let study = Study::prepare(cfg)?;
    let zeta = C64::new(cfg.sweep.zeta, 0.0);
    let rows = study.per_eps(|case| {
        let eb_eps = spectral_decompose(&case.b_eps)?;
        let eb0 = spectral_decompose(&case.b0)?;
        let mut row = vec![0.0f64; 3];
        for s in 0..cfg.sweep.samples {
            let f = random_data(&case.mesh, study.n(), cfg.sweep.seed, s);
            let r_eps = resolvent(&case.b_eps, zeta, &f)?;
            let r0 = resolvent(&case.b0, zeta, &f)?;
            let v = corrected(&case.mesh, &r0, &study.cell, case.eps, study.smoothed())?;
            let sq_eps = eb_eps.apply_function(|mu| mu.powf(-0.5), &f);
            let sq0 = eb0.apply_function(|mu| mu.powf(-0.5), &f);
            let errs = [
                l2_norm(&case.mesh, &difference(&r_eps, &r0)),
                h1_distance(&case.mesh, &r_eps, &v.value),
                l2_norm(&case.mesh, &difference(&sq_eps, &sq0)),
            ];
            for (m, e) in row.iter_mut().zip(errs) {
                *m = m.max(e);
            }
        }
        Ok(row)
    })?;
    let cols = columns(&study.eps, &rows);
    Ok(RateReport {
        dim: cfg.dim(),
        estimates: vec![
            Estimate::new("resolvent-l2", None, "L2", cols[0].clone(), Some(L2_THRESHOLD)),
            Estimate::new(
                "resolvent-h1-corrector",
                None,
                "H1",
                cols[1].clone(),
                Some(H1_THRESHOLD),
            ),
            Estimate::new("inverse-sqrt-l2", None, "L2", cols[2].clone(), Some(H1_THRESHOLD)),
        ],
        wall_time: start.elapsed(),
    })
}

/// `cos(t B^{1/2}) B^{-1}` applied to `w = (B0)^{-1} f_phi`, compared in `H^1` with the
/// corrected effective analogue; the plain cosine error on `(B0)^{-2} f_phi` is reported
/// without a verdict.
pub fn cosine_corrector_sweep(cfg: &SweepConfig) -> Result<RateReport> {
    let start = Instant::now();
    let times = cfg.sweep.t.clone();
    if times.iter().any(|&t| t == 0.0) {
        return Err(Error::Config("the cosine sweep needs nonzero times".into()));
    }
    let study = Study::prepare(cfg)?;
    let smoothed_cos = |eb: &EigenBasis, t: f64, w: &[C64]| eb.apply_function(|mu| (t * mu.sqrt()).cos() / mu, w);
    let rows = study.per_eps(|case| {
        let eb_eps = spectral_decompose(&case.b_eps)?;
        let eb0 = spectral_decompose(&case.b0)?;
        let f = data_profile(&cfg.data.phi)?.sample(&case.mesh, study.n());
        let w = case.b0.solve(&f);
        let phi = case.b0.solve(&w);
        let mut row = Vec::with_capacity(2 * times.len());
        for &t in &times {
            let a = smoothed_cos(&eb_eps, t, &w);
            let v = corrected(
                &case.mesh,
                &smoothed_cos(&eb0, t, &w),
                &study.cell,
                case.eps,
                study.smoothed(),
            )?;
            row.push(h1_distance(&case.mesh, &a, &v.value));
            let plain = difference(&op_cosine(&eb_eps, t, &phi), &op_cosine(&eb0, t, &phi));
            row.push(h1_norm_closed(&case.mesh.to_closed(&plain, study.n())));
        }
        Ok(row)
    })?;
    let cols = columns(&study.eps, &rows);
    let mut estimates = Vec::new();
    for (k, &t) in times.iter().enumerate() {
        estimates.push(Estimate::new(
            "cosine-smoothed-h1-corrector",
            Some(t),
            "H1",
            cols[2 * k].clone(),
            Some(H1_THRESHOLD),
        ));
        estimates.push(Estimate::new(
            "cosine-plain-h1",
            Some(t),
            "H1",
            cols[2 * k + 1].clone(),
            None,
        ));
    }
    Ok(RateReport {
        dim: cfg.dim(),
        estimates,
        wall_time: start.elapsed(),
    })
}
