//! Square banded matrices with LAPACK band factorisations.

use crate::error::{Error, Result};
use crate::spectral::{C64, ZERO};

/// `n x n` matrix with `kd` sub- and super-diagonals, stored by columns:
/// entry `(i, j)` lives at `data[j * (2 kd + 1) + kd + i - j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    kd: usize,
    data: Vec<C64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kd: usize) -> Self {
        Self {
            n,
            kd,
            data: vec![ZERO; n * (2 * kd + 1)],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.kd
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if i.abs_diff(j) > self.kd || i >= self.n || j >= self.n {
            return None;
        }
        Some(j * (2 * self.kd + 1) + self.kd + i - j)
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.slot(i, j).map_or(ZERO, |s| self.data[s])
    }

    /// Adds `v` to entry `(i, j)`; panics outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: C64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside band {}", self.kd));
        self.data[s] += v;
    }

    pub fn add_diagonal(&mut self, v: C64) {
        for i in 0..self.n {
            self.add(i, i, v);
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.n];
        for (j, &xj) in x.iter().enumerate() {
            if xj == ZERO {
                continue;
            }
            let lo = j.saturating_sub(self.kd);
            let hi = (j + self.kd).min(self.n - 1);
            let col = j * (2 * self.kd + 1) + self.kd - j;
            for (i, yi) in y.iter_mut().enumerate().take(hi + 1).skip(lo) {
                *yi += self.data[col + i] * xj;
            }
        }
        y
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.n {
            for i in j.saturating_sub(self.kd)..=j {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// True when every entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.data.iter().all(|v| v.im == 0.0)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<C64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Returns `A - z I`.
    pub fn shifted(&self, z: C64) -> Self {
        let mut out = self.clone();
        out.add_diagonal(-z);
        out
    }

    /// Cholesky factorisation of a Hermitian positive-definite matrix (upper band).
    pub fn cholesky(&self) -> Result<Cholesky> {
        let kd = self.kd;
        let ld = kd + 1;
        let mut ab = vec![ZERO; ld * self.n];
        for j in 0..self.n {
            for i in j.saturating_sub(kd)..=j {
                ab[j * ld + kd + i - j] = self.get(i, j);
            }
        }
        let mut info = 0;
        unsafe {
            lapack::zpbtrf(b'U', self.n as i32, kd as i32, &mut ab, ld as i32, &mut info);
        }
        if info > 0 {
            return Err(Error::NotPositiveDefinite {
                probe: f64::NEG_INFINITY,
            });
        }
        if info < 0 {
            return Err(Error::SolverBreakdown(format!("zpbtrf argument {}", -info)));
        }
        Ok(Cholesky { n: self.n, kd, ab })
    }

    /// LU factorisation with partial pivoting.
    pub fn lu(&self) -> Result<BandLu> {
        let (kl, ku) = (self.kd, self.kd);
        let ld = 2 * kl + ku + 1;
        let mut ab = vec![ZERO; ld * self.n];
        for j in 0..self.n {
            for i in j.saturating_sub(ku)..=(j + kl).min(self.n - 1) {
                ab[j * ld + kl + ku + i - j] = self.get(i, j);
            }
        }
        let mut ipiv = vec![0i32; self.n];
        let mut info = 0;
        unsafe {
            lapack::zgbtrf(
                self.n as i32,
                self.n as i32,
                kl as i32,
                ku as i32,
                &mut ab,
                ld as i32,
                &mut ipiv,
                &mut info,
            );
        }
        if info != 0 {
            return Err(Error::SolverBreakdown(format!(
                "singular band matrix (zgbtrf info {info})"
            )));
        }
        Ok(BandLu {
            n: self.n,
            kl,
            ku,
            ab,
            ipiv,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    kd: usize,
    ab: Vec<C64>,
}

impl Cholesky {
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let mut x = b.to_vec();
        let mut info = 0;
        unsafe {
            lapack::zpbtrs(
                b'U',
                self.n as i32,
                self.kd as i32,
                1,
                &self.ab,
                (self.kd + 1) as i32,
                &mut x,
                self.n as i32,
                &mut info,
            );
        }
        debug_assert_eq!(info, 0);
        x
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    ab: Vec<C64>,
    ipiv: Vec<i32>,
}

impl BandLu {
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let mut x = b.to_vec();
        let mut info = 0;
        unsafe {
            lapack::zgbtrs(
                b'N',
                self.n as i32,
                self.kl as i32,
                self.ku as i32,
                1,
                &self.ab,
                (2 * self.kl + self.ku + 1) as i32,
                &self.ipiv,
                &mut x,
                self.n as i32,
                &mut info,
            );
        }
        debug_assert_eq!(info, 0);
        x
    }
}

pub(crate) fn norm(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Smallest eigenvalue of a Hermitian positive-definite matrix by inverse iteration
/// (at most 200 steps, relative tolerance 1e-8 on the Rayleigh quotient).
pub fn smallest_eigenvalue(a: &BandedMatrix, chol: &Cholesky) -> f64 {
    let n = a.size();
    // Deterministic start vector with components in every low mode.
    let mut x: Vec<C64> = (0..n)
        .map(|i| C64::new(1.0 + 0.1 * ((i * 7919) % 13) as f64, 0.0))
        .collect();
    let s = norm(&x);
    x.iter_mut().for_each(|v| *v /= s);
    let mut mu = f64::INFINITY;
    for _ in 0..200 {
        let mut y = chol.solve(&x);
        let s = norm(&y);
        y.iter_mut().for_each(|v| *v /= s);
        let rq = dot(&y, &a.matvec(&y)).re;
        x = y;
        if (rq - mu).abs() <= 1e-8 * rq.abs() {
            return rq;
        }
        mu = rq;
    }
    mu
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> BandedMatrix {
        let mut a = BandedMatrix::zeros(n, 1);
        for i in 0..n {
            a.add(i, i, C64::new(2.0, 0.0));
            if i + 1 < n {
                a.add(i, i + 1, C64::new(-1.0, 0.0));
                a.add(i + 1, i, C64::new(-1.0, 0.0));
            }
        }
        a
    }

    #[test]
    fn cholesky_solves() {
        let a = laplacian(10);
        let x: Vec<C64> = (0..10).map(|i| C64::new(i as f64, 1.0)).collect();
        let b = a.matvec(&x);
        let y = a.cholesky().unwrap().solve(&b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn lu_solves_complex_shift() {
        let a = laplacian(12).shifted(C64::new(1.0, 0.5));
        let x: Vec<C64> = (0..12).map(|i| C64::new(1.0, i as f64)).collect();
        let b = a.matvec(&x);
        let y = a.lu().unwrap().solve(&b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn smallest_eigenvalue_of_second_difference() {
        let n = 20;
        let a = laplacian(n);
        let mu = smallest_eigenvalue(&a, &a.cholesky().unwrap());
        let h = std::f64::consts::PI / (n + 1) as f64;
        let exact = 4.0 * (h / 2.0).sin().powi(2);
        assert!((mu - exact).abs() < 1e-7 * exact);
    }

    #[test]
    fn indefinite_rejected() {
        let a = laplacian(5).shifted(C64::new(3.0, 0.0));
        assert!(matches!(a.cholesky(), Err(Error::NotPositiveDefinite { .. })));
    }
}
