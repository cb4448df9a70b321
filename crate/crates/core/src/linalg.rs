//! Small dense helpers shared by the cell and effective-operator code.

use nalgebra::DMatrix;

use crate::spectral::C64;

pub type CMat = DMatrix<C64>;

/// Eigenvalues of the hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let h = hermitize(m);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Frobenius norm of the skew-hermitian part.
pub fn skew_norm(m: &CMat) -> f64 {
    ((m - m.adjoint()) * C64::new(0.5, 0.0)).norm()
}

/// Spectral norm (largest singular value).
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let g = m.adjoint() * m;
    hermitian_eigenvalues(&g).last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

pub fn from_real(m: &DMatrix<f64>) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Gauss–Legendre nodes and weights with `deg >= 2` points on `[a, b]`.
pub fn gauss_legendre(deg: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = gauss_quad::GaussLegendre::new(deg).expect("at least two nodes");
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut out: Vec<(f64, f64)> = rule
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (mid + half * x, half * w))
        .collect();
    out.sort_by(|p, q| p.0.total_cmp(&q.0));
    out
}
