use crate::error::{Error, Result};
use crate::spectral::C64;

use super::assemble::DiscreteOperator;
use super::banded::norm;

/// Minimal admissible distance between the shift and the spectrum.
const SPECTRUM_GAP: f64 = 1e-8;

/// Solves `(A - zeta I) u = f` by banded LU with iterative refinement to relative residual
/// `1e-12`.
pub fn resolvent(op: &DiscreteOperator, zeta: C64, f: &[C64]) -> Result<Vec<C64>> {
    if f.len() != op.size() {
        return Err(Error::Shape(format!(
            "right-hand side has length {}, expected {}",
            f.len(),
            op.size()
        )));
    }
    let shifted = op.matrix.shifted(zeta);
    let safe = zeta.im.abs() >= SPECTRUM_GAP || zeta.re <= op.min_eigenvalue - SPECTRUM_GAP;
    let lu = shifted.lu().map_err(|_| Error::NearSpectrumShift { zeta })?;
    if !safe {
        // For Hermitian A, |(A - zeta)^{-1}| = 1 / dist(zeta, spectrum).
        let mut x: Vec<C64> = (0..op.size()).map(|i| C64::new(1.0 + (i % 7) as f64, 0.0)).collect();
        let mut growth = 0.0;
        for _ in 0..30 {
            let s = norm(&x);
            x.iter_mut().for_each(|v| *v /= s);
            x = lu.solve(&x);
            growth = norm(&x);
        }
        if !(growth.is_finite() && 1.0 / growth >= SPECTRUM_GAP) {
            return Err(Error::NearSpectrumShift { zeta });
        }
    }
    let f_norm = norm(f);
    let mut u = lu.solve(f);
    for _ in 0..3 {
        let au = shifted.matvec(&u);
        let r: Vec<C64> = f.iter().zip(&au).map(|(a, b)| a - b).collect();
        if norm(&r) <= 1e-12 * f_norm {
            break;
        }
        let du = lu.solve(&r);
        u.iter_mut().zip(&du).for_each(|(a, b)| *a += b);
    }
    Ok(u)
}
