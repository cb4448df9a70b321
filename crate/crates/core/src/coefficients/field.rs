use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{hermitian_eigenvalues, op_norm, CMat};
use crate::spectral::{flatten, pad_coefficients, unflatten, GridFft, C64, ZERO};

/// Tolerance for the hermitian flag on samples.
const HERMITIAN_TOL: f64 = 1e-12;
/// Points closer than this (in units of the grid step) to a node are evaluated at the node.
const NODE_SNAP: f64 = 1e-9;
/// Quantisation used to share evaluations between numerically identical cell coordinates.
const DEDUP_SCALE: f64 = (1u64 << 40) as f64;

/// A Γ-periodic matrix-valued field sampled on the uniform grid `tau = k / N` of the cell
/// (fractional coordinates), with trigonometric interpolation in between.
#[derive(Debug, Clone)]
pub struct PeriodicField {
    dim: usize,
    n: usize,
    rows: usize,
    cols: usize,
    values: Vec<CMat>,
    /// Per entry `r * cols + c`, Fourier coefficients in FFT order.
    coeffs: Vec<Vec<C64>>,
    hermitian: bool,
}

impl PeriodicField {
    pub fn from_samples(dim: usize, n: usize, values: Vec<CMat>) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::OddResolution(n));
        }
        let total = n.pow(dim as u32);
        if values.len() != total {
            return Err(Error::Shape(format!(
                "expected {total} samples for a {n}^{dim} grid, got {}",
                values.len()
            )));
        }
        let (rows, cols) = values[0].shape();
        if values.iter().any(|v| v.shape() != (rows, cols)) {
            return Err(Error::Shape("samples have inconsistent shapes".into()));
        }
        let fft = GridFft::new(n, dim);
        let mut coeffs = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let mut data: Vec<C64> = values.iter().map(|v| v[(r, c)]).collect();
                fft.forward(&mut data);
                coeffs.push(data);
            }
        }
        Ok(Self {
            dim,
            n,
            rows,
            cols,
            values,
            coeffs,
            hermitian: false,
        })
    }

    /// Field from Fourier coefficients (FFT order, one vector per entry `r * cols + c`).
    pub fn from_coefficients(dim: usize, n: usize, rows: usize, cols: usize, coeffs: Vec<Vec<C64>>) -> Result<Self> {
        let total = n.pow(dim as u32);
        if coeffs.len() != rows * cols || coeffs.iter().any(|c| c.len() != total) {
            return Err(Error::Shape("coefficient layout does not match field shape".into()));
        }
        let fft = GridFft::new(n, dim);
        let mut values = vec![CMat::zeros(rows, cols); total];
        for r in 0..rows {
            for c in 0..cols {
                let mut data = coeffs[r * cols + c].clone();
                fft.inverse(&mut data);
                for (v, x) in values.iter_mut().zip(data) {
                    v[(r, c)] = x;
                }
            }
        }
        Ok(Self {
            dim,
            n,
            rows,
            cols,
            values,
            coeffs,
            hermitian: false,
        })
    }

    /// Samples `f(tau)` at the grid points `tau = k / N`.
    pub fn from_fn(dim: usize, n: usize, f: impl Fn(&[f64]) -> CMat) -> Result<Self> {
        let total = n.pow(dim as u32);
        let values = (0..total).map(|i| f(&grid_point(i, n, dim))).collect();
        Self::from_samples(dim, n, values)
    }

    pub fn constant(dim: usize, n: usize, value: CMat) -> Self {
        let total = n.pow(dim as u32);
        Self::from_samples(dim, n, vec![value; total]).expect("constant field is well formed")
    }

    pub fn zeros(dim: usize, n: usize, rows: usize, cols: usize) -> Self {
        Self::constant(dim, n, CMat::zeros(rows, cols))
    }

    /// Checks the samples are hermitian and flags the field.
    pub fn into_hermitian(mut self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::Shape("hermitian field must be square".into()));
        }
        for v in &self.values {
            let skew = (v - v.adjoint()).norm();
            if skew > HERMITIAN_TOL * v.norm().max(f64::MIN_POSITIVE) && skew > 0.0 {
                return Err(Error::NotHermitianField(skew));
            }
        }
        self.hermitian = true;
        Ok(self)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[CMat] {
        &self.values
    }

    pub fn coefficients(&self, r: usize, c: usize) -> &[C64] {
        &self.coeffs[r * self.cols + c]
    }

    /// Cell average (the zero Fourier coefficient).
    pub fn mean(&self) -> CMat {
        CMat::from_fn(self.rows, self.cols, |r, c| self.coeffs[r * self.cols + c][0])
    }

    /// Cell average of the pointwise inverse.
    pub fn mean_inverse(&self) -> Result<CMat> {
        let mut acc = CMat::zeros(self.rows, self.cols);
        for v in &self.values {
            let inv = v.clone().try_inverse().ok_or_else(|| Error::NotPositiveField(0.0))?;
            acc += inv;
        }
        Ok(acc / C64::new(self.values.len() as f64, 0.0))
    }

    /// Smallest eigenvalue over all samples (of the hermitian part).
    pub fn min_eigenvalue(&self) -> f64 {
        self.values
            .iter()
            .map(|v| hermitian_eigenvalues(v)[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// `max_x |f(x)|` over samples (spectral norm).
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(op_norm).fold(0.0, f64::max)
    }

    /// `max_x |f(x)^{-1}|` over samples, for a hermitian positive field.
    pub fn inv_sup_norm(&self) -> f64 {
        1.0 / self.min_eigenvalue()
    }

    /// `(int_Omega |f|^2)^{1/2}` with the pointwise Frobenius norm.
    pub fn l2_norm(&self, cell_volume: f64) -> f64 {
        let mean_sq: f64 = self.values.iter().map(|v| v.norm_squared()).sum::<f64>() / self.values.len() as f64;
        (cell_volume * mean_sq).sqrt()
    }

    /// Root-mean-square Frobenius norm over the samples.
    pub fn rms(&self) -> f64 {
        self.l2_norm(1.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|v| v.iter().map(|x| x.norm()))
            .fold(0.0, f64::max)
    }

    /// Interpolated value at fractional cell coordinates `tau`.
    pub fn eval_fractional(&self, tau: &[f64]) -> CMat {
        if let Some(i) = self.node_index(tau) {
            return self.values[i].clone();
        }
        let factors: Vec<Vec<C64>> = tau.iter().map(|&t| axis_factors(t, self.n)).collect();
        let mut out = CMat::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(r, c)] = contract(&self.coeffs[r * self.cols + c], &factors, self.n);
            }
        }
        if self.hermitian {
            out = crate::linalg::hermitize(&out);
        }
        out
    }

    /// Batched [`Self::eval_fractional`]; coordinates equal up to `2^-40` share one evaluation.
    pub fn eval_fractional_many(&self, taus: &[Vec<f64>]) -> Vec<CMat> {
        let mut cache: HashMap<Vec<i64>, CMat> = HashMap::new();
        taus.iter()
            .map(|tau| {
                let key: Vec<i64> = tau
                    .iter()
                    .map(|t| {
                        let w = t.rem_euclid(1.0);
                        ((w * DEDUP_SCALE).round() as i64).rem_euclid(1i64 << 40)
                    })
                    .collect();
                cache.entry(key).or_insert_with(|| self.eval_fractional(tau)).clone()
            })
            .collect()
    }

    /// `f(x / eps)` at Cartesian points `x`.
    pub fn eval_scaled(&self, lat: &Lattice, eps: f64, points: &[Vec<f64>]) -> Vec<CMat> {
        let taus: Vec<Vec<f64>> = points
            .iter()
            .map(|x| {
                let y: Vec<f64> = x.iter().map(|v| v / eps).collect();
                lat.to_fractional(&y)
            })
            .collect();
        self.eval_fractional_many(&taus)
    }

    /// The same trigonometric polynomial sampled on an `n`-point grid per axis. Refinement is
    /// exact; coarsening samples the interpolant.
    pub fn resampled(&self, n: usize) -> Result<Self> {
        if n == self.n {
            return Ok(self.clone());
        }
        let mut out = if n > self.n {
            let coeffs = self
                .coeffs
                .iter()
                .map(|c| pad_coefficients(c, self.n, n, self.dim))
                .collect();
            Self::from_coefficients(self.dim, n, self.rows, self.cols, coeffs)?
        } else {
            Self::from_fn(self.dim, n, |tau| self.eval_fractional(tau))?
        };
        out.hermitian = self.hermitian;
        Ok(out)
    }

    /// Pointwise map producing a new field on the same grid.
    pub fn map(&self, f: impl Fn(&CMat) -> CMat) -> Result<Self> {
        Self::from_samples(self.dim, self.n, self.values.iter().map(f).collect())
    }

    fn node_index(&self, tau: &[f64]) -> Option<usize> {
        let mut idx = Vec::with_capacity(self.dim);
        for &t in tau {
            let s = t.rem_euclid(1.0) * self.n as f64;
            let k = s.round();
            if (s - k).abs() > NODE_SNAP {
                return None;
            }
            idx.push((k as usize) % self.n);
        }
        Some(flatten(&idx, self.n))
    }
}

/// Grid point `tau = k / N` of flat index `i`.
pub fn grid_point(i: usize, n: usize, dim: usize) -> Vec<f64> {
    unflatten(i, n, dim).into_iter().map(|k| k as f64 / n as f64).collect()
}

/// `exp(2 pi i nu t)` for every FFT index; the Nyquist mode uses `cos(pi N t)` so that
/// real samples interpolate to real values.
fn axis_factors(t: f64, n: usize) -> Vec<C64> {
    (0..n)
        .map(|k| {
            if k == n / 2 {
                C64::new((PI * n as f64 * t).cos(), 0.0)
            } else {
                let nu = crate::spectral::signed_frequency(k, n) as f64;
                C64::from_polar(1.0, 2.0 * PI * nu * t)
            }
        })
        .collect()
}

fn contract(coeffs: &[C64], factors: &[Vec<C64>], n: usize) -> C64 {
    let mut cur: Vec<C64> = coeffs.to_vec();
    for f in factors.iter().rev() {
        let outer = cur.len() / n;
        let mut next = vec![ZERO; outer];
        for (o, slot) in next.iter_mut().enumerate() {
            let row = &cur[o * n..(o + 1) * n];
            *slot = row.iter().zip(f).map(|(a, b)| a * b).sum();
        }
        cur = next;
    }
    cur[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(x: f64) -> CMat {
        CMat::from_element(1, 1, C64::new(x, 0.0))
    }

    fn sine1d(n: usize) -> PeriodicField {
        PeriodicField::from_fn(1, n, |t| scalar(2.0 + (2.0 * PI * t[0]).sin())).unwrap()
    }

    #[test]
    fn constant_field_everywhere() {
        let f = PeriodicField::constant(2, 8, scalar(3.5));
        let lat = Lattice::unit(2);
        for v in f.eval_scaled(&lat, 0.37, &[vec![0.11, -2.3], vec![5.0, 0.01]]) {
            assert!((v[(0, 0)].re - 3.5).abs() < 1e-13);
        }
    }

    #[test]
    fn sine_at_grid_aligned_point() {
        let f = sine1d(16);
        let lat = Lattice::unit(1);
        let v = f.eval_scaled(&lat, 0.25, &[vec![0.125]]);
        assert!((v[0][(0, 0)].re - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sine_off_grid_matches_closed_form() {
        let f = sine1d(64);
        let lat = Lattice::unit(1);
        let v = f.eval_scaled(&lat, 0.3, &[vec![0.2]]);
        let expected = 2.0 + (4.0 * PI / 3.0).sin();
        assert!((v[0][(0, 0)] - C64::new(expected, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn nyquist_mode_interpolates_real() {
        let n = 8;
        let f = PeriodicField::from_fn(1, n, |t| scalar((PI * n as f64 * t[0]).cos())).unwrap();
        let v = f.eval_fractional(&[0.3]);
        assert!((v[(0, 0)].re - (PI * 8.0 * 0.3).cos()).abs() < 1e-12);
        assert!(v[(0, 0)].im.abs() < 1e-14);
    }

    #[test]
    fn mean_and_norms() {
        let f = sine1d(32);
        assert!((f.mean()[(0, 0)].re - 2.0).abs() < 1e-14);
        assert!(f.sup_norm() * f.inv_sup_norm() >= 1.0);
        // Harmonic mean of 2 + sin is sqrt(3).
        let hm = 1.0 / f.mean_inverse().unwrap()[(0, 0)].re;
        assert!((hm - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn hermitian_flag_checks_samples() {
        let bad = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
            ],
        );
        let f = PeriodicField::constant(1, 4, bad);
        assert!(matches!(f.into_hermitian(), Err(Error::NotHermitianField(_))));
    }

    #[test]
    fn two_dimensional_product_mode() {
        let f = PeriodicField::from_fn(2, 8, |t| scalar((2.0 * PI * t[0]).cos() * (4.0 * PI * t[1]).sin())).unwrap();
        let tau = [0.137, -0.42];
        let expected = (2.0 * PI * tau[0]).cos() * (4.0 * PI * tau[1]).sin();
        let v = f.eval_fractional(&tau);
        assert!((v[(0, 0)].re - expected).abs() < 1e-12);
    }
}
