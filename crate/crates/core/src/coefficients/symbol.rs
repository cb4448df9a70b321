use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, CMat};
use crate::spectral::C64;

/// First-order symbol `b(xi) = sum_l b_l xi_l` with constant `m x n` matrices `b_l`.
#[derive(Debug, Clone)]
pub struct Symbol {
    mats: Vec<CMat>,
    m: usize,
    n: usize,
    alpha0: f64,
    alpha1: f64,
}

impl Symbol {
    pub fn new(mats: Vec<CMat>) -> Result<Self> {
        let (alpha0, alpha1) = symbol_bounds(&mats)?;
        let (m, n) = mats[0].shape();
        Ok(Self {
            mats,
            m,
            n,
            alpha0,
            alpha1,
        })
    }

    /// The gradient symbol `b(D) = D` acting on scalar functions (`m = d`, `n = 1`).
    pub fn gradient(dim: usize) -> Self {
        let mats = (0..dim)
            .map(|l| CMat::from_fn(dim, 1, |r, _| C64::new(if r == l { 1.0 } else { 0.0 }, 0.0)))
            .collect();
        Self::new(mats).expect("gradient symbol has full rank")
    }

    pub fn dim(&self) -> usize {
        self.mats.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn mats(&self) -> &[CMat] {
        &self.mats
    }

    pub fn mat(&self, l: usize) -> &CMat {
        &self.mats[l]
    }

    pub fn eval(&self, xi: &[f64]) -> CMat {
        let mut out = CMat::zeros(self.m, self.n);
        for (b, &x) in self.mats.iter().zip(xi) {
            out += b * C64::new(x, 0.0);
        }
        out
    }
}

/// Sampled ellipticity bounds `alpha0 <= b(theta)* b(theta) <= alpha1` over unit vectors.
pub fn symbol_bounds(mats: &[CMat]) -> Result<(f64, f64)> {
    let d = mats.len();
    if d == 0 {
        return Err(Error::Shape("symbol needs at least one matrix".into()));
    }
    let (m, n) = mats[0].shape();
    if n == 0 || m < n || mats.iter().any(|b| b.shape() != (m, n)) {
        return Err(Error::Shape(format!(
            "symbol matrices must share a shape m x n with m >= n >= 1, first is {m} x {n}"
        )));
    }
    let products: Vec<Vec<CMat>> = mats
        .iter()
        .map(|bl| mats.iter().map(|bk| bl.adjoint() * bk).collect())
        .collect();

    let mut alpha0 = f64::INFINITY;
    let mut alpha1 = 0.0f64;
    for theta in unit_samples(d) {
        let mut s = CMat::zeros(n, n);
        for l in 0..d {
            for k in 0..d {
                s += &products[l][k] * C64::new(theta[l] * theta[k], 0.0);
            }
        }
        let ev = hermitian_eigenvalues(&s);
        alpha0 = alpha0.min(ev[0]);
        alpha1 = alpha1.max(ev[n - 1]);
    }
    if alpha0 <= 1e-10 * alpha1 {
        return Err(Error::RankDeficientSymbol { alpha0, alpha1 });
    }
    Ok((alpha0, alpha1))
}

fn unit_samples(d: usize) -> Vec<Vec<f64>> {
    match d {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..360)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / 360.0;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => {
            let count = 360 * 360;
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let phi = golden * k as f64;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            (0..360 * 360)
                .map(|_| {
                    let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    v.into_iter().map(|x| x / norm).collect()
                })
                .collect()
        }
    }
}

#[cfg(test)]
pub(crate) fn real_column(entries: &[f64]) -> CMat {
    nalgebra::DMatrix::from_fn(entries.len(), 1, |r, _| C64::new(entries[r], 0.0))
}
