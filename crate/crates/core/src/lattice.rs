//! Periodicity lattice, its elementary cell and the dual lattice.
//!
//! The lattice is generated by `a_1..a_d` (columns of [`Lattice::basis`]); the cell is the
//! open parallelepiped `{ sum tau_j a_j : -1/2 < tau_j < 1/2 }`. The dual basis satisfies
//! `<b_j, a_i> = 2 pi delta_ji`, so `exp(i <xi, x>)` with `xi` in the dual lattice is
//! periodic. Periodic fields are stored in fractional coordinates `tau = A^{-1} x`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Search radius for the shortest nonzero dual vector.
const DUAL_SEARCH_RADIUS: i64 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    dim: usize,
    /// Columns are the generators `a_1..a_d`.
    basis: DMatrix<f64>,
    /// Columns are the dual generators `b_1..b_d`.
    dual_basis: DMatrix<f64>,
    basis_inv: DMatrix<f64>,
    cell_volume: f64,
    r0: f64,
    r1: f64,
}

/// A point of the dual lattice, `xi = sum nu_j b_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frequency {
    pub nu: Vec<i64>,
    pub xi: Vec<f64>,
}

impl Lattice {
    /// Builds a lattice from `d` generators given as rows of `basis` (each of length `d`).
    pub fn new(basis: &[Vec<f64>]) -> Result<Self> {
        let dim = basis.len();
        if dim == 0 {
            return Err(Error::Shape("lattice basis is empty".into()));
        }
        if basis.iter().any(|v| v.len() != dim) {
            return Err(Error::Shape(format!(
                "lattice basis must contain {dim} vectors of length {dim}"
            )));
        }
        let a = DMatrix::from_fn(dim, dim, |r, c| basis[c][r]);
        let det = a.determinant();
        let norms: f64 = basis
            .iter()
            .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
            .product();
        let threshold = 1e-12 * norms;
        if !det.is_finite() || det.abs() <= threshold {
            return Err(Error::DegenerateBasis { det, threshold });
        }
        let basis_inv = a
            .clone()
            .try_inverse()
            .ok_or(Error::DegenerateBasis { det, threshold })?;
        let dual_basis = basis_inv.transpose() * (2.0 * PI);

        let r1 = 0.5 * max_signed_combination(&a);
        let r0 = 0.5 * shortest_nonzero(&dual_basis, DUAL_SEARCH_RADIUS);

        Ok(Self {
            dim,
            basis: a,
            dual_basis,
            basis_inv,
            cell_volume: det.abs(),
            r0,
            r1,
        })
    }

    /// The lattice `Z^d` with the unit cube as cell.
    pub fn unit(dim: usize) -> Self {
        let basis: Vec<Vec<f64>> = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(&basis).expect("unit lattice is nondegenerate")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn dual_basis(&self) -> &DMatrix<f64> {
        &self.dual_basis
    }

    /// Generator `a_i` as a vector.
    pub fn generator(&self, i: usize) -> DVector<f64> {
        self.basis.column(i).into_owned()
    }

    /// Dual generator `b_j` as a vector.
    pub fn dual_generator(&self, j: usize) -> DVector<f64> {
        self.dual_basis.column(j).into_owned()
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_volume
    }

    /// Half the diameter of the cell.
    pub fn r1(&self) -> f64 {
        self.r1
    }

    /// Half the length of the shortest nonzero dual vector.
    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// Fractional coordinates `tau = A^{-1} x`.
    pub fn to_fractional(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.basis_inv[(r, c)] * x[c]).sum())
            .collect()
    }

    /// Cartesian point `x = A tau`.
    pub fn from_fractional(&self, tau: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.basis[(r, c)] * tau[c]).sum())
            .collect()
    }

    /// Dual vector `sum nu_j b_j`.
    pub fn dual_point(&self, nu: &[i64]) -> Vec<f64> {
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.dual_basis[(r, c)] * nu[c] as f64).sum())
            .collect()
    }

    /// Returns a copy with every generator multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        let rows: Vec<Vec<f64>> = (0..self.dim)
            .map(|c| self.basis.column(c).iter().map(|x| x * s).collect())
            .collect();
        Self::new(&rows)
    }

    /// Dual lattice points `sum nu_j b_j` with every `nu_j` in `[-N/2, N/2)`, in row-major
    /// order (first index slowest).
    pub fn frequencies(&self, n: usize) -> Result<Vec<Frequency>> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::OddResolution(n));
        }
        let half = (n / 2) as i64;
        let total = n.pow(self.dim as u32);
        let mut out = Vec::with_capacity(total);
        for flat in 0..total {
            let mut rem = flat;
            let mut nu = vec![0i64; self.dim];
            for j in (0..self.dim).rev() {
                nu[j] = (rem % n) as i64 - half;
                rem /= n;
            }
            let xi = self.dual_point(&nu);
            out.push(Frequency { nu, xi });
        }
        Ok(out)
    }
}

impl Default for Lattice {
    fn default() -> Self {
        Self::unit(1)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `max |sum sigma_j a_j|` over sign vectors, i.e. the diameter of the cell.
fn max_signed_combination(a: &DMatrix<f64>) -> f64 {
    let d = a.ncols();
    let mut best = 0.0f64;
    for mask in 0..(1usize << d) {
        let v: Vec<f64> = (0..d)
            .map(|r| {
                (0..d)
                    .map(|c| {
                        let s = if mask >> c & 1 == 1 { 1.0 } else { -1.0 };
                        s * a[(r, c)]
                    })
                    .sum()
            })
            .collect();
        best = best.max(norm(&v));
    }
    best
}

fn shortest_nonzero(b: &DMatrix<f64>, radius: i64) -> f64 {
    let d = b.ncols();
    let width = (2 * radius + 1) as usize;
    let mut best = f64::INFINITY;
    for flat in 0..width.pow(d as u32) {
        let mut rem = flat;
        let nu: Vec<i64> = (0..d)
            .map(|_| {
                let k = (rem % width) as i64 - radius;
                rem /= width;
                k
            })
            .collect();
        if nu.iter().all(|&k| k == 0) {
            continue;
        }
        let v: Vec<f64> = (0..d).map(|r| (0..d).map(|c| b[(r, c)] * nu[c] as f64).sum()).collect();
        best = best.min(norm(&v));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_line() {
        let lat = Lattice::new(&[vec![1.0]]).unwrap();
        assert_relative_eq!(lat.dual_basis()[(0, 0)], 2.0 * PI, epsilon = 1e-14);
        assert_relative_eq!(lat.cell_volume(), 1.0);
        assert_relative_eq!(2.0 * lat.r1(), 1.0);
        assert_relative_eq!(2.0 * lat.r0(), 2.0 * PI, epsilon = 1e-14);
    }

    #[test]
    fn square_lattice() {
        let lat = Lattice::unit(2);
        assert_relative_eq!(lat.dual_generator(0)[0], 2.0 * PI, epsilon = 1e-14);
        assert_relative_eq!(lat.dual_generator(1)[1], 2.0 * PI, epsilon = 1e-14);
        assert_relative_eq!(lat.dual_generator(0)[1], 0.0, epsilon = 1e-14);
        assert_relative_eq!(2.0 * lat.r1(), 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn stretched_rectangle() {
        let lat = Lattice::new(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_relative_eq!(lat.cell_volume(), 2.0, epsilon = 1e-14);
        assert_relative_eq!(lat.dual_generator(0)[0], PI, epsilon = 1e-14);
        assert_relative_eq!(lat.dual_generator(1)[1], 2.0 * PI, epsilon = 1e-14);
        assert_relative_eq!(2.0 * lat.r0(), PI, epsilon = 1e-14);
    }

    #[test]
    fn degenerate_basis_rejected() {
        let err = Lattice::new(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap_err();
        assert!(matches!(err, Error::DegenerateBasis { .. }));
    }

    #[test]
    fn frequencies_unit_line() {
        let lat = Lattice::unit(1);
        let f = lat.frequencies(4).unwrap();
        let xi: Vec<f64> = f.iter().map(|q| q.xi[0]).collect();
        let expected = [-4.0 * PI, -2.0 * PI, 0.0, 2.0 * PI];
        for (a, b) in xi.iter().zip(expected) {
            assert_relative_eq!(*a, b, epsilon = 1e-12);
        }
        assert!(matches!(lat.frequencies(5), Err(Error::OddResolution(5))));
        assert!(matches!(lat.frequencies(0), Err(Error::OddResolution(0))));
    }

    #[test]
    fn frequencies_match_independent_loop() {
        let lat = Lattice::unit(2);
        let f = lat.frequencies(4).unwrap();
        assert_eq!(f.len(), 16);
        let mut k = 0;
        let mut max_norm = 0.0f64;
        for n1 in -2..2i64 {
            for n2 in -2..2i64 {
                assert_eq!(f[k].nu, vec![n1, n2]);
                assert_relative_eq!(f[k].xi[0], 2.0 * PI * n1 as f64, epsilon = 1e-12);
                assert_relative_eq!(f[k].xi[1], 2.0 * PI * n2 as f64, epsilon = 1e-12);
                max_norm = max_norm.max(norm(&f[k].xi));
                k += 1;
            }
        }
        assert_relative_eq!(max_norm, 4.0 * PI * 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn fractional_roundtrip() {
        let lat = Lattice::new(&[vec![1.0, 0.5], vec![0.0, 1.5]]).unwrap();
        let x = [0.3, -0.7];
        let back = lat.from_fractional(&lat.to_fractional(&x));
        assert_relative_eq!(back[0], x[0], epsilon = 1e-14);
        assert_relative_eq!(back[1], x[1], epsilon = 1e-14);
    }
}
