use crate::error::{Error, Result};
use crate::spectral::{C64, ZERO};

/// Uniform mesh of the box `prod (0, L_k)` with `M_k` interior nodes per axis.
///
/// Nodes are indexed with the first axis fastest. Unknowns of an `n`-component function
/// are node-major: unknown `node * n + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    lengths: Vec<f64>,
    interior: Vec<usize>,
    h: Vec<f64>,
}

impl Mesh {
    pub fn new(lengths: &[f64], interior: &[usize]) -> Result<Self> {
        let dim = lengths.len();
        if !(1..=2).contains(&dim) || interior.len() != dim {
            return Err(Error::Shape(format!(
                "meshes are supported in dimensions 1 and 2, got box of dimension {dim}"
            )));
        }
        if lengths.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidParameter("box side lengths must be positive".into()));
        }
        if interior.iter().any(|&m| m < 3) {
            return Err(Error::InvalidParameter("at least 3 interior nodes per axis".into()));
        }
        let h = lengths.iter().zip(interior).map(|(l, &m)| l / (m + 1) as f64).collect();
        Ok(Self {
            lengths: lengths.to_vec(),
            interior: interior.to_vec(),
            h,
        })
    }

    /// Mesh with `h_k <= h_over_eps * eps`, chosen so that `L_k / h_k` is the smallest
    /// admissible integer (commensurate with `eps` whenever `L_k / (h_over_eps eps)` is).
    pub fn for_eps(lengths: &[f64], eps: f64, h_over_eps: f64) -> Result<Self> {
        if !(eps > 0.0 && h_over_eps > 0.0) {
            return Err(Error::InvalidParameter("eps and h_over_eps must be positive".into()));
        }
        let target = h_over_eps * eps;
        let interior: Vec<usize> = lengths
            .iter()
            .map(|l| {
                let cells = (l / target - 1e-9).ceil().max(4.0) as usize;
                cells - 1
            })
            .collect();
        Self::new(lengths, &interior)
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn h_max(&self) -> f64 {
        self.h.iter().copied().fold(0.0, f64::max)
    }

    /// Volume `prod h_k` of one mesh cell.
    pub fn cell_volume(&self) -> f64 {
        self.h.iter().product()
    }

    pub fn n_interior(&self) -> usize {
        self.interior.iter().product()
    }

    /// Closed-grid sizes `M_k + 2` (boundary nodes included).
    pub fn closed_dims(&self) -> Vec<usize> {
        self.interior.iter().map(|m| m + 2).collect()
    }

    /// Interior multi-index (zero-based) of interior node `k`.
    pub fn interior_index(&self, k: usize) -> Vec<usize> {
        split_index(k, &self.interior)
    }

    /// Coordinates of interior node `k`.
    pub fn interior_point(&self, k: usize) -> Vec<f64> {
        self.interior_index(k)
            .iter()
            .zip(&self.h)
            .map(|(&i, h)| (i + 1) as f64 * h)
            .collect()
    }

    pub fn interior_points(&self) -> Vec<Vec<f64>> {
        (0..self.n_interior()).map(|k| self.interior_point(k)).collect()
    }

    /// Verifies `h <= h_over_eps * eps` on every axis.
    pub fn check_resolution(&self, eps: f64, h_over_eps: f64) -> Result<()> {
        let limit = h_over_eps * eps * (1.0 + 1e-12);
        let h = self.h_max();
        if h > limit {
            return Err(Error::ResolutionViolation { eps, h, limit });
        }
        Ok(())
    }

    /// The closed grid of the mesh as an empty grid function with `n` components.
    pub fn closed_grid(&self, n: usize) -> GridFunction {
        GridFunction::zeros(self.closed_dims(), vec![0.0; self.dim()], self.h.clone(), n)
    }

    /// Embeds an interior vector into the closed grid (zero boundary values).
    pub fn to_closed(&self, u: &[C64], n: usize) -> GridFunction {
        let mut out = self.closed_grid(n);
        for k in 0..self.n_interior() {
            let idx: Vec<usize> = self.interior_index(k).iter().map(|i| i + 1).collect();
            let flat = out.flat(&idx);
            for c in 0..n {
                out.data[flat * n + c] = u[k * n + c];
            }
        }
        out
    }

    /// Restricts a closed-grid function to the interior unknowns.
    pub fn from_closed(&self, u: &GridFunction) -> Vec<C64> {
        let n = u.components();
        let mut out = vec![ZERO; self.n_interior() * n];
        for k in 0..self.n_interior() {
            let idx: Vec<usize> = self.interior_index(k).iter().map(|i| i + 1).collect();
            let flat = u.flat(&idx);
            out[k * n..(k + 1) * n].copy_from_slice(&u.data[flat * n..(flat + 1) * n]);
        }
        out
    }
}

pub(crate) fn split_index(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    dims.iter()
        .map(|&d| {
            let i = flat % d;
            flat /= d;
            i
        })
        .collect()
}

/// Nodal values of an `n`-component function on a uniform tensor grid
/// `origin + i h` (first axis fastest, node-major components).
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub dims: Vec<usize>,
    pub origin: Vec<f64>,
    pub h: Vec<f64>,
    n: usize,
    pub data: Vec<C64>,
}

impl GridFunction {
    pub fn zeros(dims: Vec<usize>, origin: Vec<f64>, h: Vec<f64>, n: usize) -> Self {
        let len = dims.iter().product::<usize>() * n;
        Self {
            dims,
            origin,
            h,
            n,
            data: vec![ZERO; len],
        }
    }

    pub fn components(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.dims)
            .rev()
            .fold(0usize, |acc, (&i, &d)| acc * d + i)
    }

    pub fn index(&self, flat: usize) -> Vec<usize> {
        split_index(flat, &self.dims)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.index(flat)
            .iter()
            .zip(self.origin.iter().zip(&self.h))
            .map(|(&i, (o, h))| o + i as f64 * h)
            .collect()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.n_nodes()).map(|k| self.point(k)).collect()
    }

    pub fn node(&self, flat: usize) -> &[C64] {
        &self.data[flat * self.n..(flat + 1) * self.n]
    }

    pub fn node_mut(&mut self, flat: usize) -> &mut [C64] {
        &mut self.data[flat * self.n..(flat + 1) * self.n]
    }

    /// Multilinear interpolation at `x`; `None` outside the grid.
    pub fn interpolate(&self, x: &[f64]) -> Option<Vec<C64>> {
        let d = self.dim();
        let mut base = Vec::with_capacity(d);
        let mut frac = Vec::with_capacity(d);
        for k in 0..d {
            let s = (x[k] - self.origin[k]) / self.h[k];
            let last = (self.dims[k] - 1) as f64;
            if s < -1e-9 || s > last + 1e-9 {
                return None;
            }
            let s = s.clamp(0.0, last);
            let i = (s.floor() as usize).min(self.dims[k].saturating_sub(2));
            base.push(i);
            frac.push(s - i as f64);
        }
        let mut out = vec![ZERO; self.n];
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            let mut idx = Vec::with_capacity(d);
            for k in 0..d {
                if corner >> k & 1 == 1 {
                    w *= frac[k];
                    idx.push(base[k] + 1);
                } else {
                    w *= 1.0 - frac[k];
                    idx.push(base[k]);
                }
            }
            if w == 0.0 {
                continue;
            }
            let node = self.node(self.flat(&idx));
            for (o, v) in out.iter_mut().zip(node) {
                *o += v * w;
            }
        }
        Some(out)
    }

    /// Applies `f` to every node, producing a function with `n_out` components.
    pub fn map_nodes(&self, n_out: usize, f: impl Fn(usize, &[C64]) -> Vec<C64>) -> Self {
        let mut out = Self::zeros(self.dims.clone(), self.origin.clone(), self.h.clone(), n_out);
        for k in 0..self.n_nodes() {
            let v = f(k, self.node(k));
            out.node_mut(k).copy_from_slice(&v);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_points() {
        let mesh = Mesh::new(&[1.0], &[3]).unwrap();
        assert_eq!(mesh.h(), &[0.25]);
        assert_eq!(mesh.interior_points(), vec![vec![0.25], vec![0.5], vec![0.75]]);
        assert!(Mesh::new(&[1.0], &[2]).is_err());
    }

    #[test]
    fn eps_policy_is_commensurate() {
        let mesh = Mesh::for_eps(&[1.0, 2.0], 0.125, 1.0 / 16.0).unwrap();
        assert_eq!(mesh.interior(), &[127, 255]);
        assert!(mesh.check_resolution(0.125, 1.0 / 16.0).is_ok());
        assert!(matches!(
            mesh.check_resolution(0.0625, 1.0 / 16.0),
            Err(Error::ResolutionViolation { .. })
        ));
    }

    #[test]
    fn closed_roundtrip() {
        let mesh = Mesh::new(&[1.0, 1.0], &[3, 4]).unwrap();
        let u: Vec<C64> = (0..24).map(|k| C64::new(k as f64, -(k as f64))).collect();
        let closed = mesh.to_closed(&u, 2);
        assert_eq!(closed.dims, vec![5, 6]);
        assert_eq!(mesh.from_closed(&closed), u);
        assert_eq!(closed.node(0), &[ZERO, ZERO]);
    }

    #[test]
    fn interpolation_is_exact_for_bilinear() {
        let mut g = GridFunction::zeros(vec![4, 5], vec![-1.0, 0.5], vec![0.5, 0.25], 1);
        for k in 0..g.n_nodes() {
            let p = g.point(k);
            g.node_mut(k)[0] = C64::new(1.0 + 2.0 * p[0] - p[1] + 0.5 * p[0] * p[1], 0.0);
        }
        let x = [-0.3, 1.05];
        let v = g.interpolate(&x).unwrap()[0].re;
        assert!((v - (1.0 + 2.0 * x[0] - x[1] + 0.5 * x[0] * x[1])).abs() < 1e-13);
        assert!(g.interpolate(&[5.0, 1.0]).is_none());
    }
}
