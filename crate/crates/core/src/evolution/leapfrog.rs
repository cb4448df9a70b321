use crate::dirichlet::DiscreteOperator;
use crate::error::{Error, Result};
use crate::spectral::C64;

/// Stability factor: `dt sqrt(mu_max) <= 1.9`.
const CFL: f64 = 1.9;

/// Largest eigenvalue estimate by power iteration, inflated by 2% for safety.
pub fn largest_eigenvalue(op: &DiscreteOperator) -> f64 {
    let n = op.size();
    let mut x: Vec<C64> = (0..n).map(|i| C64::new(1.0 + ((i * 7919) % 13) as f64, 0.0)).collect();
    let mut mu = 0.0;
    for _ in 0..300 {
        let s = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= s);
        let y = op.apply(&x);
        let next: f64 = y.iter().zip(&x).map(|(a, b)| (b.conj() * a).re).sum();
        let done = (next - mu).abs() <= 1e-10 * next.abs();
        mu = next;
        x = y;
        if done {
            break;
        }
    }
    1.02 * mu
}

/// Final state and energy record of a leapfrog run.
#[derive(Debug, Clone)]
pub struct LeapfrogResult {
    pub u: Vec<C64>,
    pub du_dt: Vec<C64>,
    pub steps: usize,
    /// Largest relative deviation of the energy from its initial value.
    pub energy_drift: f64,
}

/// Velocity Verlet for `u'' = -A u + F(t)` from `(phi, psi)` to time `t` with step at most `dt`.
pub fn leapfrog_oracle(
    op: &DiscreteOperator,
    phi: &[C64],
    psi: &[C64],
    forcing: Option<&dyn Fn(f64) -> Vec<C64>>,
    t: f64,
    dt: f64,
) -> Result<LeapfrogResult> {
    let limit = CFL / largest_eigenvalue(op).sqrt();
    if !(dt > 0.0) || dt > limit {
        return Err(Error::CflViolation { dt, limit });
    }
    let steps = (t.abs() / dt - 1e-9).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let accel = |u: &[C64], s: f64| -> Vec<C64> {
        let mut a: Vec<C64> = op.apply(u).iter().map(|v| -v).collect();
        if let Some(f) = forcing {
            a.iter_mut().zip(f(s)).for_each(|(x, y)| *x += y);
        }
        a
    };
    let energy = |u: &[C64], v: &[C64]| -> f64 {
        let au = op.apply(u);
        let form: f64 = au.iter().zip(u).map(|(a, b)| (b.conj() * a).re).sum();
        v.iter().map(|x| x.norm_sqr()).sum::<f64>() + form
    };
    let mut u = phi.to_vec();
    let mut v = psi.to_vec();
    let e0 = energy(&u, &v);
    let mut drift = 0.0f64;
    let mut a = accel(&u, 0.0);
    for k in 0..steps {
        for i in 0..u.len() {
            v[i] += a[i] * (0.5 * h);
            u[i] += v[i] * h;
        }
        a = accel(&u, (k + 1) as f64 * h);
        for i in 0..u.len() {
            v[i] += a[i] * (0.5 * h);
        }
        if forcing.is_none() && e0 > 0.0 {
            drift = drift.max((energy(&u, &v) - e0).abs() / e0);
        }
    }
    Ok(LeapfrogResult {
        u,
        du_dt: v,
        steps,
        energy_drift: drift,
    })
}
