use crate::spectral::{C64, ZERO};

use super::assemble::{corner_basis, stiffness_quadrature};
use super::mesh::{split_index, GridFunction, Mesh};

/// Discrete `L_2(O)` norm `(h^d sum_i |u_i|^2)^{1/2}` of an interior vector.
pub fn l2_norm(mesh: &Mesh, u: &[C64]) -> f64 {
    (mesh.cell_volume() * u.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
}

/// Discrete `L_2` norm of a closed-grid function with trapezoidal weights.
pub fn l2_norm_closed(u: &GridFunction) -> f64 {
    let vol: f64 = u.h.iter().product();
    let mut total = 0.0;
    for k in 0..u.n_nodes() {
        let idx = u.index(k);
        let w: f64 = idx
            .iter()
            .zip(&u.dims)
            .map(|(&i, &d)| if i == 0 || i + 1 == d { 0.5 } else { 1.0 })
            .product();
        total += w * u.node(k).iter().map(|v| v.norm_sqr()).sum::<f64>();
    }
    (vol * total).sqrt()
}

/// A quadrature point of the stiffness rule with its weight and the element it lies in.
#[derive(Debug, Clone)]
pub struct QuadPoint {
    pub x: Vec<f64>,
    pub weight: f64,
    element: Vec<usize>,
    reference: Vec<f64>,
}

/// All stiffness quadrature points of the mesh (element midpoints in 1D, 2 x 2 Gauss in 2D).
pub fn quadrature_points(mesh: &Mesh) -> Vec<QuadPoint> {
    grid_quadrature(&mesh.closed_grid(1))
}

/// Stiffness quadrature points of the elements spanned by the nodes of a grid.
pub fn grid_quadrature(u: &GridFunction) -> Vec<QuadPoint> {
    let (h, d) = (&u.h, u.dim());
    let vol: f64 = h.iter().product();
    let rule = stiffness_quadrature(d);
    let dims: Vec<usize> = u.dims.iter().map(|m| m - 1).collect();
    let mut out = Vec::new();
    for flat in 0..dims.iter().product() {
        let e = split_index(flat, &dims);
        for (s, w) in &rule {
            let x = (0..d).map(|k| u.origin[k] + (e[k] as f64 + s[k]) * h[k]).collect();
            out.push(QuadPoint {
                x,
                weight: w * vol,
                element: e.clone(),
                reference: s.clone(),
            });
        }
    }
    out
}

/// Gradient of the piecewise multilinear interpolant of a closed-grid function at `q`:
/// one `n`-vector per axis.
pub fn fe_gradient(u: &GridFunction, q: &QuadPoint) -> Vec<Vec<C64>> {
    let (d, n) = (u.dim(), u.components());
    let mut grad = vec![vec![ZERO; n]; d];
    for (bits, _, g) in corner_basis(&q.reference, &u.h) {
        let idx: Vec<usize> = q.element.iter().zip(&bits).map(|(e, b)| e + b).collect();
        let node = u.node(u.flat(&idx));
        for (k, gk) in grad.iter_mut().enumerate() {
            for c in 0..n {
                gk[c] += node[c] * g[k];
            }
        }
    }
    grad
}

/// Value of the piecewise multilinear interpolant at `q`.
pub fn fe_value(u: &GridFunction, q: &QuadPoint) -> Vec<C64> {
    let n = u.components();
    let mut out = vec![ZERO; n];
    for (bits, v, _) in corner_basis(&q.reference, &u.h) {
        let idx: Vec<usize> = q.element.iter().zip(&bits).map(|(e, b)| e + b).collect();
        let node = u.node(u.flat(&idx));
        for c in 0..n {
            out[c] += node[c] * v;
        }
    }
    out
}

/// Discrete `H^1` norm of a closed-grid function: lumped `L_2` part plus the gradient of
/// the finite element interpolant under the stiffness quadrature.
pub fn h1_norm_closed(u: &GridFunction) -> f64 {
    let l2 = l2_norm_closed(u);
    let grad: f64 = grid_quadrature(u)
        .iter()
        .map(|q| {
            q.weight
                * fe_gradient(u, q)
                    .iter()
                    .flat_map(|g| g.iter().map(|v| v.norm_sqr()))
                    .sum::<f64>()
        })
        .sum();
    (l2 * l2 + grad).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn norms_of_sine() {
        let mesh = Mesh::new(&[1.0], &[199]).unwrap();
        let mut u = mesh.closed_grid(1);
        for k in 0..u.n_nodes() {
            let x = u.point(k)[0];
            u.node_mut(k)[0] = C64::new((PI * x).sin(), 0.0);
        }
        let l2 = l2_norm_closed(&u);
        assert!((l2 - 0.5f64.sqrt()).abs() < 1e-10);
        assert!((l2_norm(&mesh, &mesh.from_closed(&u)) - l2).abs() < 1e-12);
        let h1 = h1_norm_closed(&u);
        let exact = (0.5 + PI * PI / 2.0).sqrt();
        assert!((h1 - exact).abs() < 1e-4 * exact);
    }

    #[test]
    fn gradient_of_bilinear_is_exact() {
        let mesh = Mesh::new(&[1.0, 2.0], &[4, 5]).unwrap();
        let mut u = mesh.closed_grid(1);
        for k in 0..u.n_nodes() {
            let p = u.point(k);
            u.node_mut(k)[0] = C64::new(1.0 + 2.0 * p[0] - p[1] + 3.0 * p[0] * p[1], 0.0);
        }
        for q in quadrature_points(&mesh) {
            let g = fe_gradient(&u, &q);
            assert!((g[0][0].re - (2.0 + 3.0 * q.x[1])).abs() < 1e-12);
            assert!((g[1][0].re - (-1.0 + 3.0 * q.x[0])).abs() < 1e-12);
            let v = fe_value(&u, &q)[0].re;
            assert!((v - (1.0 + 2.0 * q.x[0] - q.x[1] + 3.0 * q.x[0] * q.x[1])).abs() < 1e-12);
        }
        let total: f64 = quadrature_points(&mesh).iter().map(|q| q.weight).sum();
        assert!((total - 2.0).abs() < 1e-12);
    }
}
