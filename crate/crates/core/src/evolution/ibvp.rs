use crate::dirichlet::Mesh;
use crate::error::{Error, Result};
use crate::linalg::gauss_legendre;
use crate::spectral::{C64, ZERO};

use super::spectral::{sine_scaled, EigenBasis};

/// Gauss nodes per panel of the Duhamel integral.
const PANEL_DEGREE: usize = 8;
/// Largest panel width of the Duhamel integral.
const PANEL_WIDTH: f64 = 0.1;

/// Right-hand side `F(., t)` sampled on a time grid starting at 0.
#[derive(Debug, Clone)]
pub struct Forcing {
    pub times: Vec<f64>,
    pub values: Vec<Vec<C64>>,
}

impl Forcing {
    /// Samples `f` at `0, dt, 2 dt, ...` up to (and including) `t_max`.
    pub fn sample(t_max: f64, dt: f64, f: impl Fn(f64) -> Vec<C64>) -> Self {
        let steps = (t_max / dt - 1e-9).ceil().max(3.0) as usize;
        let h = t_max / steps as f64;
        let times: Vec<f64> = (0..=steps).map(|k| k as f64 * h).collect();
        let values = times.iter().map(|&t| f(t)).collect();
        Self { times, values }
    }
}

/// Natural cubic spline through vector-valued samples.
#[derive(Debug, Clone)]
pub struct NaturalSpline {
    t: Vec<f64>,
    y: Vec<Vec<C64>>,
    m: Vec<Vec<C64>>,
}

impl NaturalSpline {
    pub fn new(t: Vec<f64>, y: Vec<Vec<C64>>) -> Result<Self> {
        let k = t.len();
        if k < 2 || y.len() != k || t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "spline needs at least 2 increasing knots".into(),
            ));
        }
        let width = y[0].len();
        let mut m = vec![vec![ZERO; width]; k];
        if k > 2 {
            // Thomas algorithm for the interior second derivatives.
            let inner = k - 2;
            let mut diag = vec![0.0; inner];
            let mut rhs = vec![vec![ZERO; width]; inner];
            let mut upper = vec![0.0; inner];
            for i in 0..inner {
                let (h0, h1) = (t[i + 1] - t[i], t[i + 2] - t[i + 1]);
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                for c in 0..width {
                    rhs[i][c] = 6.0 * ((y[i + 2][c] - y[i + 1][c]) / h1 - (y[i + 1][c] - y[i][c]) / h0);
                }
            }
            for i in 1..inner {
                let lower = t[i + 1] - t[i];
                let f = lower / diag[i - 1];
                diag[i] -= f * upper[i - 1];
                let (prev, cur) = rhs.split_at_mut(i);
                for c in 0..width {
                    cur[0][c] -= prev[i - 1][c] * f;
                }
            }
            for i in (0..inner).rev() {
                for c in 0..width {
                    let mut v = rhs[i][c];
                    if i + 1 < inner {
                        v -= m[i + 2][c] * upper[i];
                    }
                    m[i + 1][c] = v / diag[i];
                }
            }
        }
        Ok(Self { t, y, m })
    }

    pub fn eval(&self, s: f64) -> Vec<C64> {
        let k = self.t.len();
        let i = match self.t.partition_point(|&x| x <= s) {
            0 => 0,
            p if p >= k => k - 2,
            p => p - 1,
        };
        let h = self.t[i + 1] - self.t[i];
        let a = (self.t[i + 1] - s) / h;
        let b = (s - self.t[i]) / h;
        (0..self.y[i].len())
            .map(|c| {
                self.y[i][c] * a
                    + self.y[i + 1][c] * b
                    + (self.m[i][c] * (a.powi(3) - a) + self.m[i + 1][c] * (b.powi(3) - b)) * (h * h / 6.0)
            })
            .collect()
    }
}

/// Solution of `u'' + A u = F`, `u(0) = phi`, `u'(0) = psi` at the requested times.
#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub u: Vec<Vec<C64>>,
    pub du_dt: Vec<Vec<C64>>,
    pub energy: Vec<f64>,
    pub mesh: Mesh,
    pub n: usize,
}

/// Duhamel formula
/// `u(t) = cos(t A^{1/2}) phi + A^{-1/2} sin(t A^{1/2}) psi + int_0^t A^{-1/2} sin((t - s) A^{1/2}) F(s) ds`
/// evaluated per eigenmode; the forcing is interpolated by a natural cubic spline in
/// eigen-coordinates and integrated by Gauss panels.
pub fn solve_ibvp(
    eb: &EigenBasis,
    phi: &[C64],
    psi: &[C64],
    forcing: Option<&Forcing>,
    times: &[f64],
) -> Result<EvolutionResult> {
    let size = eb.size();
    if phi.len() != size || psi.len() != size {
        return Err(Error::Shape(format!("initial data must have length {size}")));
    }
    if times.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
        return Err(Error::InvalidParameter(
            "output times must be finite and nonnegative".into(),
        ));
    }
    let t_max = times.iter().copied().fold(0.0, f64::max);
    let spline = match forcing {
        Some(f) => Some(forcing_spline(eb, f, t_max)?),
        None => None,
    };
    let phi_c = eb.project(phi);
    let psi_c = eb.project(psi);
    let roots: Vec<f64> = eb.eigenvalues.iter().map(|mu| mu.sqrt()).collect();

    let mut result = EvolutionResult {
        times: times.to_vec(),
        u: Vec::with_capacity(times.len()),
        du_dt: Vec::with_capacity(times.len()),
        energy: Vec::with_capacity(times.len()),
        mesh: eb.mesh.clone(),
        n: eb.n,
    };
    for &t in times {
        let mut c = vec![ZERO; size];
        let mut dc = vec![ZERO; size];
        for k in 0..size {
            let (mu, s) = (eb.eigenvalues[k], roots[k]);
            let (cos, sin) = ((s * t).cos(), (s * t).sin());
            c[k] = phi_c[k] * cos + psi_c[k] * sine_scaled(mu, t);
            dc[k] = -phi_c[k] * (s * sin) + psi_c[k] * cos;
        }
        if let (Some(sp), true) = (&spline, t > 0.0) {
            for (s_node, w) in duhamel_nodes(t) {
                let f = sp.eval(s_node);
                for k in 0..size {
                    let tau = t - s_node;
                    c[k] += f[k] * (w * sine_scaled(eb.eigenvalues[k], tau));
                    dc[k] += f[k] * (w * (roots[k] * tau).cos());
                }
            }
        }
        let u = eb.expand(&c);
        let du = eb.expand(&dc);
        result.energy.push(eb.energy(&u, &du));
        result.u.push(u);
        result.du_dt.push(du);
    }
    Ok(result)
}

/// Composite Gauss rule on `[0, t]` with panel width at most `min(0.1, t / 4)`.
pub(crate) fn duhamel_nodes(t: f64) -> Vec<(f64, f64)> {
    let width = PANEL_WIDTH.min(t / 4.0);
    let panels = (t / width - 1e-9).ceil().max(1.0) as usize;
    let h = t / panels as f64;
    (0..panels)
        .flat_map(|p| gauss_legendre(PANEL_DEGREE, p as f64 * h, (p + 1) as f64 * h))
        .collect()
}

fn forcing_spline(eb: &EigenBasis, f: &Forcing, t_max: f64) -> Result<NaturalSpline> {
    if f.times.len() < 4 || f.values.len() != f.times.len() {
        return Err(Error::ForcingGridTooCoarse(format!(
            "need at least 4 samples, got {}",
            f.times.len()
        )));
    }
    let (first, last) = (f.times[0], *f.times.last().unwrap());
    if first.abs() > 1e-12 || last < t_max - 1e-12 {
        return Err(Error::ForcingGridTooCoarse(format!(
            "samples cover [{first}, {last}] but [0, {t_max}] is required"
        )));
    }
    if f.values.iter().any(|v| v.len() != eb.size()) {
        return Err(Error::Shape(format!("forcing samples must have length {}", eb.size())));
    }
    let coeffs = f.values.iter().map(|v| eb.project(v)).collect();
    NaturalSpline::new(f.times.clone(), coeffs)
}
