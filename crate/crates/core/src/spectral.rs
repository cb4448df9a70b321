//! Tensor-product FFT helpers on uniform periodic grids.
//!
//! Grid values are stored with the first axis varying slowest. Fourier coefficients
//! use the natural FFT order along every axis (index `k` stands for `k` when `k < N/2`
//! and for `k - N` otherwise) and are normalised so that
//! `f(tau) = sum_nu c_nu exp(2 pi i nu . tau)`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);

/// Signed frequency carried by FFT index `k` on an `n`-point axis.
pub fn signed_frequency(k: usize, n: usize) -> i64 {
    if k < n / 2 || n % 2 == 1 && k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// FFT index of the signed frequency `nu` on an `n`-point axis.
pub fn fft_index(nu: i64, n: usize) -> usize {
    nu.rem_euclid(n as i64) as usize
}

/// Multi-index (first axis slowest) of flat position `flat`.
pub fn unflatten(mut flat: usize, n: usize, dim: usize) -> Vec<usize> {
    let mut idx = vec![0usize; dim];
    for j in (0..dim).rev() {
        idx[j] = flat % n;
        flat /= n;
    }
    idx
}

pub fn flatten(idx: &[usize], n: usize) -> usize {
    idx.iter().fold(0usize, |acc, &k| acc * n + k)
}

/// Planned forward/inverse transforms for an `n^dim` grid.
#[derive(Clone)]
pub struct GridFft {
    n: usize,
    dim: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for GridFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridFft")
            .field("n", &self.n)
            .field("dim", &self.dim)
            .finish()
    }
}

impl GridFft {
    pub fn new(n: usize, dim: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            dim,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid values to Fourier coefficients (divides by `n^dim`).
    pub fn forward(&self, data: &mut [C64]) {
        self.apply(data, true);
        let scale = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|v| *v *= scale);
    }

    /// Fourier coefficients to grid values.
    pub fn inverse(&self, data: &mut [C64]) {
        self.apply(data, false);
    }

    fn apply(&self, data: &mut [C64], forward: bool) {
        assert_eq!(data.len(), self.len(), "grid length mismatch");
        let plan = if forward { &self.forward } else { &self.inverse };
        let n = self.n;
        let mut line = vec![ZERO; n];
        for axis in 0..self.dim {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            let outer = self.len() / (n * stride);
            for o in 0..outer {
                for s in 0..stride {
                    let base = o * n * stride + s;
                    for k in 0..n {
                        line[k] = data[base + k * stride];
                    }
                    plan.process(&mut line);
                    for k in 0..n {
                        data[base + k * stride] = line[k];
                    }
                }
            }
        }
    }
}

/// Maps coefficients of an `n^dim` grid onto an `m^dim` grid (`m >= n`) by zero padding.
/// The Nyquist coefficient of each axis is split evenly between `+-n/2`.
pub fn pad_coefficients(coeffs: &[C64], n: usize, m: usize, dim: usize) -> Vec<C64> {
    assert!(m >= n);
    let mut out = vec![ZERO; m.pow(dim as u32)];
    let total = n.pow(dim as u32);
    for flat in 0..total {
        let c = coeffs[flat];
        if c == ZERO {
            continue;
        }
        let idx = unflatten(flat, n, dim);
        // Each Nyquist axis doubles the number of targets.
        let mut targets: Vec<(Vec<usize>, f64)> = vec![(Vec::with_capacity(dim), 1.0)];
        for &k in &idx {
            let nu = signed_frequency(k, n);
            let is_nyquist = n % 2 == 0 && nu == -(n as i64 / 2) && m > n;
            let mut next = Vec::with_capacity(targets.len() * 2);
            for (t, w) in targets {
                if is_nyquist {
                    let mut a = t.clone();
                    a.push(fft_index(nu, m));
                    next.push((a, w * 0.5));
                    let mut b = t;
                    b.push(fft_index(-nu, m));
                    next.push((b, w * 0.5));
                } else {
                    let mut a = t;
                    a.push(fft_index(nu, m));
                    next.push((a, w));
                }
            }
            targets = next;
        }
        for (t, w) in targets {
            out[flatten(&t, m)] += c * w;
        }
    }
    out
}

/// Restricts coefficients of an `m^dim` grid to the modes representable on `n^dim`
/// (`n <= m`), dropping everything else including the Nyquist modes of the coarse grid.
pub fn truncate_coefficients(coeffs: &[C64], m: usize, n: usize, dim: usize) -> Vec<C64> {
    let mut out = vec![ZERO; n.pow(dim as u32)];
    let half = (n / 2) as i64;
    for (flat, slot) in out.iter_mut().enumerate() {
        let idx = unflatten(flat, n, dim);
        let mut src = Vec::with_capacity(dim);
        let mut keep = true;
        for &k in &idx {
            let nu = signed_frequency(k, n);
            if nu <= -half || nu >= half {
                keep = false;
                break;
            }
            src.push(fft_index(nu, m));
        }
        if keep {
            *slot = coeffs[flatten(&src, m)];
        }
    }
    out
}
