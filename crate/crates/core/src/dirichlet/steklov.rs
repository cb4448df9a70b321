use crate::coefficients::PeriodicField;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{gauss_legendre, CMat};
use crate::spectral::{C64, ZERO};

use super::mesh::GridFunction;

/// Gauss points per axis for the cell average.
pub const STEKLOV_POINTS: usize = 8;

/// Offsets `eps A tau` and weights of the tensor Gauss rule on the cell `(-1/2, 1/2)^d`.
pub fn steklov_offsets(lat: &Lattice, eps: f64) -> Vec<(Vec<f64>, f64)> {
    let d = lat.dim();
    let rule = gauss_legendre(STEKLOV_POINTS, -0.5, 0.5);
    let count = STEKLOV_POINTS.pow(d as u32);
    (0..count)
        .map(|flat| {
            let mut rem = flat;
            let mut tau = Vec::with_capacity(d);
            let mut w = 1.0;
            for _ in 0..d {
                let (x, wx) = rule[rem % STEKLOV_POINTS];
                rem /= STEKLOV_POINTS;
                tau.push(x);
                w *= wx;
            }
            let z: Vec<f64> = lat.from_fractional(&tau).iter().map(|v| eps * v).collect();
            (z, w)
        })
        .collect()
}

/// `(S_eps u)(x) = |Omega|^{-1} int_Omega u(x - eps z) dz` at every target point, with
/// multilinear interpolation of the grid function.
pub fn steklov(u: &GridFunction, lat: &Lattice, eps: f64, targets: &[Vec<f64>]) -> Result<Vec<Vec<C64>>> {
    let offsets = steklov_offsets(lat, eps);
    let n = u.components();
    targets
        .iter()
        .map(|x| {
            let mut acc = vec![ZERO; n];
            for (z, w) in &offsets {
                let y: Vec<f64> = x.iter().zip(z).map(|(a, b)| a - b).collect();
                let v = u.interpolate(&y).ok_or_else(|| {
                    Error::MarginTooSmall(format!("smoothing at {x:?} with eps = {eps} leaves the extended grid"))
                })?;
                for (a, b) in acc.iter_mut().zip(v) {
                    *a += b * w;
                }
            }
            Ok(acc)
        })
        .collect()
}

/// Steklov smoothing of a Γ-periodic function given on the unit torus (fractional
/// coordinates of the unit lattice), evaluated with trigonometric interpolation.
pub fn steklov_periodic(u: &PeriodicField, lat: &Lattice, eps: f64, targets: &[Vec<f64>]) -> Vec<CMat> {
    let offsets = steklov_offsets(lat, eps);
    let (rows, cols) = u.shape();
    let shifted: Vec<Vec<f64>> = targets
        .iter()
        .flat_map(|x| {
            offsets
                .iter()
                .map(move |(z, _)| x.iter().zip(z).map(|(a, b)| a - b).collect())
        })
        .collect();
    let values = u.eval_fractional_many(&shifted);
    values
        .chunks(offsets.len())
        .map(|chunk| {
            let mut acc = CMat::zeros(rows, cols);
            for (v, (_, w)) in chunk.iter().zip(&offsets) {
                acc += v * C64::new(*w, 0.0);
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn line(f: impl Fn(f64) -> C64) -> GridFunction {
        let mut g = GridFunction::zeros(vec![801], vec![-2.0], vec![0.005], 1);
        for k in 0..g.n_nodes() {
            let x = g.point(k)[0];
            g.node_mut(k)[0] = f(x);
        }
        g
    }

    #[test]
    fn constants_and_linear_functions_are_fixed() {
        let lat = Lattice::unit(1);
        let c = line(|_| C64::new(2.5, -1.0));
        let lin = line(|x| C64::new(x, 0.0));
        let pts = vec![vec![0.3], vec![-0.7]];
        for (v, _) in steklov(&c, &lat, 0.5, &pts).unwrap().iter().zip(&pts) {
            assert!((v[0] - C64::new(2.5, -1.0)).norm() < 1e-13);
        }
        for (v, p) in steklov(&lin, &lat, 0.5, &pts).unwrap().iter().zip(&pts) {
            assert!((v[0].re - p[0]).abs() < 1e-13);
        }
    }

    #[test]
    fn character_averages_to_zero() {
        let lat = Lattice::unit(1);
        let u = line(|x| C64::from_polar(1.0, 2.0 * PI * x));
        let v = steklov(&u, &lat, 1.0, &[vec![0.2]]).unwrap();
        // Multilinear interpolation error of the character, O(h^2).
        assert!(v[0][0].norm() < 1e-4);
        let f = PeriodicField::from_fn(1, 8, |t| {
            CMat::from_element(1, 1, C64::from_polar(1.0, 2.0 * PI * t[0]))
        })
        .unwrap();
        let w = steklov_periodic(&f, &lat, 1.0, &[vec![0.2]]);
        assert!(w[0][(0, 0)].norm() < 1e-10);
    }

    #[test]
    fn leaving_the_grid_is_an_error() {
        let lat = Lattice::unit(1);
        let u = line(|_| C64::new(1.0, 0.0));
        assert!(matches!(
            steklov(&u, &lat, 0.5, &[vec![1.9]]),
            Err(Error::MarginTooSmall(_))
        ));
    }
}
