use crate::cell::CellSolution;
use crate::coefficients::CoefficientSet;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::CMat;
use crate::spectral::C64;

use super::banded::{smallest_eigenvalue, BandedMatrix, Cholesky};
use super::mesh::{split_index, Mesh};

/// Which operator a discrete matrix represents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorTag {
    Eps(f64),
    Effective,
}

/// Hermitian positive-definite discretisation of a Dirichlet operator on a box mesh.
///
/// The matrix acts on nodal values and is symmetric for the weighted inner product
/// `h^d sum_i u_i* v_i` (lumped mass), which is the discrete `L_2(O)` product.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub matrix: BandedMatrix,
    pub mesh: Mesh,
    /// Components per node.
    pub n: usize,
    pub tag: OperatorTag,
    pub lambda: f64,
    /// Inverse-iteration estimate of the smallest eigenvalue.
    pub min_eigenvalue: f64,
    chol: Cholesky,
}

impl DiscreteOperator {
    /// Probes positive definiteness and wraps the matrix.
    pub fn new(matrix: BandedMatrix, mesh: Mesh, n: usize, tag: OperatorTag, lambda: f64) -> Result<Self> {
        let chol = matrix.cholesky()?;
        let min_eigenvalue = smallest_eigenvalue(&matrix, &chol);
        if !(min_eigenvalue > 0.0) {
            return Err(Error::NotPositiveDefinite { probe: min_eigenvalue });
        }
        Ok(Self {
            matrix,
            mesh,
            n,
            tag,
            lambda,
            min_eigenvalue,
            chol,
        })
    }

    pub fn size(&self) -> usize {
        self.matrix.size()
    }

    pub fn apply(&self, u: &[C64]) -> Vec<C64> {
        self.matrix.matvec(u)
    }

    /// `A^{-1} f`.
    pub fn solve(&self, f: &[C64]) -> Vec<C64> {
        self.chol.solve(f)
    }
}

/// Bandwidth of the node-major stencil with nearest neighbours on a box mesh.
fn bandwidth(mesh: &Mesh, n: usize) -> usize {
    let stride = if mesh.dim() == 1 { 1 } else { mesh.interior()[0] + 1 };
    (stride + 1) * n - 1
}

/// Interior node number of a closed-grid multi-index, if interior.
fn interior_node(mesh: &Mesh, closed: &[usize]) -> Option<usize> {
    let m = mesh.interior();
    let mut flat = 0usize;
    for k in (0..closed.len()).rev() {
        if closed[k] == 0 || closed[k] > m[k] {
            return None;
        }
        flat = flat * m[k] + closed[k] - 1;
    }
    Some(flat)
}

/// Reference quadrature of the stiffness: midpoint in 1D, 2 x 2 Gauss in 2D.
pub(crate) fn stiffness_quadrature(dim: usize) -> Vec<(Vec<f64>, f64)> {
    match dim {
        1 => vec![(vec![0.5], 1.0)],
        _ => {
            let g = 0.5 / 3f64.sqrt();
            let s = [0.5 - g, 0.5 + g];
            let mut out = Vec::new();
            for &b in &s {
                for &a in &s {
                    out.push((vec![a, b], 0.25));
                }
            }
            out
        }
    }
}

/// Values and gradients of the multilinear corner basis at reference point `s`.
pub(crate) fn corner_basis(s: &[f64], h: &[f64]) -> Vec<(Vec<usize>, f64, Vec<f64>)> {
    let d = s.len();
    (0..(1usize << d))
        .map(|corner| {
            let bits: Vec<usize> = (0..d).map(|k| corner >> k & 1).collect();
            let factor = |k: usize| if bits[k] == 1 { s[k] } else { 1.0 - s[k] };
            let value: f64 = (0..d).map(factor).product();
            let grad = (0..d)
                .map(|k| {
                    let sign = if bits[k] == 1 { 1.0 } else { -1.0 };
                    let others: f64 = (0..d).filter(|&j| j != k).map(factor).product();
                    sign * others / h[k]
                })
                .collect();
            (bits, value, grad)
        })
        .collect()
}

/// Elements of the closed grid as base multi-indices.
pub(crate) fn elements(mesh: &Mesh) -> Vec<Vec<usize>> {
    let dims: Vec<usize> = mesh.interior().iter().map(|m| m + 1).collect();
    (0..dims.iter().product()).map(|e| split_index(e, &dims)).collect()
}

/// Principal part `b(D)* G b(D)` with lumped mass, `G` evaluated at quadrature points.
fn add_principal(a: &mut BandedMatrix, mesh: &Mesh, coeffs: &CoefficientSet, g_at: &dyn Fn(&[Vec<f64>]) -> Vec<CMat>) {
    let sym = &coeffs.symbol;
    let (d, n) = (mesh.dim(), sym.n());
    let h = mesh.h();
    let quad = stiffness_quadrature(d);
    let elems = elements(mesh);
    let mut points = Vec::with_capacity(elems.len() * quad.len());
    for e in &elems {
        for (s, _) in &quad {
            points.push((0..d).map(|k| (e[k] as f64 + s[k]) * h[k]).collect());
        }
    }
    let g_vals = g_at(&points);
    let basis: Vec<_> = quad.iter().map(|(s, w)| (corner_basis(s, h), *w)).collect();

    for (ei, e) in elems.iter().enumerate() {
        for (qi, (phis, w)) in basis.iter().enumerate() {
            let g = &g_vals[ei * quad.len() + qi];
            // C_{ll'} = b_l* g b_l'
            let c: Vec<Vec<CMat>> = (0..d)
                .map(|l| (0..d).map(|k| sym.mat(l).adjoint() * g * sym.mat(k)).collect())
                .collect();
            for (bp, _, gp) in phis {
                let cp: Vec<usize> = (0..d).map(|k| e[k] + bp[k]).collect();
                let Some(p) = interior_node(mesh, &cp) else { continue };
                for (bq, _, gq) in phis {
                    let cq: Vec<usize> = (0..d).map(|k| e[k] + bq[k]).collect();
                    let Some(q) = interior_node(mesh, &cq) else { continue };
                    let mut block = CMat::zeros(n, n);
                    for l in 0..d {
                        for k in 0..d {
                            let f = gp[l] * gq[k] * w;
                            if f != 0.0 {
                                block += &c[l][k] * C64::new(f, 0.0);
                            }
                        }
                    }
                    for al in 0..n {
                        for be in 0..n {
                            a.add(p * n + al, q * n + be, block[(al, be)]);
                        }
                    }
                }
            }
        }
    }
}

/// Adds `sum_l (A_l D_l + D_l B_l)` with centred `D_l = -i (u(+e_l) - u(-e_l)) / (2 h_l)`
/// and nodal blocks `A_l(x_i)`, `B_l(x_i)`.
fn add_first_order(
    a: &mut BandedMatrix,
    mesh: &Mesh,
    n: usize,
    left: &dyn Fn(usize, usize) -> CMat,
    right: &dyn Fn(usize, usize) -> CMat,
) {
    let d = mesh.dim();
    let m = mesh.interior();
    for node in 0..mesh.n_interior() {
        let idx = mesh.interior_index(node);
        for l in 0..d {
            let factor = C64::new(0.0, -1.0 / (2.0 * mesh.h()[l]));
            let stride: usize = m[..l].iter().product();
            for (dir, sign) in [(1i64, 1.0), (-1i64, -1.0)] {
                let j = idx[l] as i64 + dir;
                if j < 0 || j >= m[l] as i64 {
                    continue;
                }
                let nb = if dir > 0 { node + stride } else { node - stride };
                // Row `node`: A_l(node) u(nb) and B_l(nb) u(nb), both with sign(dir).
                let block = (left(node, l) + right(nb, l)) * (factor * sign);
                for al in 0..n {
                    for be in 0..n {
                        a.add(node * n + al, nb * n + be, block[(al, be)]);
                    }
                }
            }
        }
    }
}

fn add_nodal(a: &mut BandedMatrix, n: usize, nodes: usize, block: &dyn Fn(usize) -> CMat) {
    for node in 0..nodes {
        let b = block(node);
        for al in 0..n {
            for be in 0..n {
                if b[(al, be)] != C64::new(0.0, 0.0) {
                    a.add(node * n + al, node * n + be, b[(al, be)]);
                }
            }
        }
    }
}

/// Matrix of `B_eps` without the positivity probe.
pub(crate) fn b_eps_matrix(mesh: &Mesh, coeffs: &CoefficientSet, lat: &Lattice, eps: f64) -> BandedMatrix {
    let n = coeffs.symbol.n();
    let mut a = BandedMatrix::zeros(mesh.n_interior() * n, bandwidth(mesh, n));
    let g_at = |pts: &[Vec<f64>]| coeffs.g.eval_scaled(lat, eps, pts);
    add_principal(&mut a, mesh, coeffs, &g_at);

    let nodes = mesh.interior_points();
    if !coeffs.a.is_empty() {
        let a_vals: Vec<Vec<CMat>> = coeffs.a.iter().map(|f| f.eval_scaled(lat, eps, &nodes)).collect();
        let left = |node: usize, l: usize| a_vals[l][node].clone();
        let right = |node: usize, l: usize| a_vals[l][node].adjoint();
        add_first_order(&mut a, mesh, n, &left, &right);
    }
    if let Some(q) = &coeffs.q {
        let q_vals = q.eval_scaled(lat, eps, &nodes);
        add_nodal(&mut a, n, nodes.len(), &|k| q_vals[k].clone());
    }
    a.add_diagonal(C64::new(coeffs.lambda, 0.0));
    a
}

/// Matrix of the effective operator `B0` without the positivity probe.
pub(crate) fn b0_matrix(mesh: &Mesh, cell: &CellSolution, coeffs: &CoefficientSet) -> BandedMatrix {
    let sym = &coeffs.symbol;
    let n = sym.n();
    let mut a = BandedMatrix::zeros(mesh.n_interior() * n, bandwidth(mesh, n));
    let g0 = cell.g0.clone();
    let g_at = |pts: &[Vec<f64>]| vec![g0.clone(); pts.len()];
    add_principal(&mut a, mesh, coeffs, &g_at);

    let d = mesh.dim();
    let first: Vec<CMat> = (0..d)
        .map(|l| {
            let bl = sym.mat(l);
            let mut c = -(bl.adjoint() * &cell.v + cell.v.adjoint() * bl);
            if let Some(al) = coeffs.a.get(l) {
                let mean = al.mean();
                c += &mean + mean.adjoint();
            }
            c
        })
        .collect();
    if first.iter().any(|c| c.norm() > 0.0) {
        let zero = CMat::zeros(n, n);
        let left = |_: usize, l: usize| first[l].clone();
        let right = |_: usize, _: usize| zero.clone();
        add_first_order(&mut a, mesh, n, &left, &right);
    }
    let zeroth = coeffs.q_mean() - &cell.w;
    add_nodal(&mut a, n, mesh.n_interior(), &|_| zeroth.clone());
    a.add_diagonal(C64::new(coeffs.lambda, 0.0));
    a
}

/// Assembles `B_eps` on `mesh`, enforcing `h <= h_over_eps * eps` and `eps <= 1`.
pub fn assemble_b_eps(
    mesh: &Mesh,
    coeffs: &CoefficientSet,
    lat: &Lattice,
    eps: f64,
    h_over_eps: f64,
) -> Result<DiscreteOperator> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1], got {eps}")));
    }
    mesh.check_resolution(eps, h_over_eps)?;
    check_shapes(mesh, coeffs, lat)?;
    let a = b_eps_matrix(mesh, coeffs, lat, eps);
    DiscreteOperator::new(a, mesh.clone(), coeffs.symbol.n(), OperatorTag::Eps(eps), coeffs.lambda)
}

/// Assembles the effective operator `B0` on `mesh`.
pub fn assemble_b0(mesh: &Mesh, cell: &CellSolution, coeffs: &CoefficientSet) -> Result<DiscreteOperator> {
    check_shapes(mesh, coeffs, &cell.lattice)?;
    if cell.symbol.m() != coeffs.symbol.m() || cell.symbol.n() != coeffs.symbol.n() {
        return Err(Error::Shape("cell solution was computed for a different symbol".into()));
    }
    let a = b0_matrix(mesh, cell, coeffs);
    DiscreteOperator::new(
        a,
        mesh.clone(),
        coeffs.symbol.n(),
        OperatorTag::Effective,
        coeffs.lambda,
    )
}

fn check_shapes(mesh: &Mesh, coeffs: &CoefficientSet, lat: &Lattice) -> Result<()> {
    if mesh.dim() != coeffs.dim() || lat.dim() != coeffs.dim() {
        return Err(Error::Shape(
            "mesh, lattice and coefficients differ in dimension".into(),
        ));
    }
    Ok(())
}
