use crate::error::{Error, Result};
use crate::lattice::Lattice;

use super::mesh::{GridFunction, Mesh};

/// Third-order reflection weights: `u(-s) = 6 u(s) - 8 u(2s) + 3 u(3s)` matches the value
/// and the first two derivatives across the face.
const REFLECTION: [(usize, f64); 3] = [(1, 6.0), (2, -8.0), (3, 3.0)];

/// Extension from the closed mesh of a box to a box enlarged by `rho` per side: reflection
/// across every face followed by a smooth cutoff that equals 1 within `rho / 2 + h` of the box.
#[derive(Debug, Clone)]
pub struct ExtensionOperator {
    mesh: Mesh,
    rho: f64,
    margin: Vec<usize>,
}

impl ExtensionOperator {
    pub fn new(mesh: &Mesh, rho: f64) -> Result<Self> {
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "extension margin must be >= 0, got {rho}"
            )));
        }
        let margin: Vec<usize> = mesh
            .h()
            .iter()
            .map(|h| (rho / h - 1e-9).ceil().max(0.0) as usize + 2)
            .collect();
        for (k, (&p, &m)) in margin.iter().zip(mesh.interior()).enumerate() {
            if 3 * p > m + 1 {
                return Err(Error::MarginTooSmall(format!(
                    "axis {k}: {p} margin nodes need at least {} mesh cells, box has {}",
                    3 * p,
                    m + 1
                )));
            }
        }
        Ok(Self {
            mesh: mesh.clone(),
            rho,
            margin,
        })
    }

    /// Margin `2 r1 eps`, enough for Steklov smoothing at scale `eps`.
    pub fn for_eps(mesh: &Mesh, lat: &Lattice, eps: f64) -> Result<Self> {
        Self::new(mesh, 2.0 * lat.r1() * eps)
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Margin in nodes per axis.
    pub fn margin(&self) -> &[usize] {
        &self.margin
    }

    pub fn enlarged_grid(&self, n: usize) -> GridFunction {
        let dims = self
            .mesh
            .closed_dims()
            .iter()
            .zip(&self.margin)
            .map(|(d, p)| d + 2 * p)
            .collect();
        let origin = self
            .margin
            .iter()
            .zip(self.mesh.h())
            .map(|(&p, h)| -(p as f64) * h)
            .collect();
        GridFunction::zeros(dims, origin, self.mesh.h().to_vec(), n)
    }

    /// Cutoff factor at enlarged-grid multi-index `idx`.
    fn cutoff(&self, idx: &[usize]) -> f64 {
        let closed = self.mesh.closed_dims();
        let mut chi = 1.0;
        for k in 0..idx.len() {
            let p = self.margin[k];
            let h = self.mesh.h()[k];
            let outside = if idx[k] < p {
                p - idx[k]
            } else if idx[k] >= p + closed[k] {
                idx[k] + 1 - p - closed[k]
            } else {
                0
            };
            if outside == 0 {
                continue;
            }
            let dist = outside as f64 * h;
            let plateau = 0.5 * self.rho + h;
            let outer = p as f64 * h;
            chi *= smooth_step((outer - dist) / (outer - plateau));
        }
        chi
    }

    /// Extends a closed-mesh function to the enlarged grid.
    pub fn extend(&self, u: &GridFunction) -> Result<GridFunction> {
        let closed = self.mesh.closed_dims();
        if u.dims != closed {
            return Err(Error::Shape(format!(
                "extension expects a grid of {closed:?} nodes, got {:?}",
                u.dims
            )));
        }
        let n = u.components();
        let mut e = self.enlarged_grid(n);
        for k in 0..u.n_nodes() {
            let idx: Vec<usize> = u.index(k).iter().zip(&self.margin).map(|(i, p)| i + p).collect();
            let flat = e.flat(&idx);
            e.node_mut(flat).copy_from_slice(u.node(k));
        }
        let d = closed.len();
        for axis in 0..d {
            let p = self.margin[axis];
            let last = p + closed[axis] - 1;
            for flat in 0..e.n_nodes() {
                let idx = e.index(flat);
                let i = idx[axis];
                if i >= p && i <= last {
                    continue;
                }
                // Lines along later axes are only filled once those axes are processed.
                let pending = (axis + 1..d).any(|j| idx[j] < self.margin[j] || idx[j] >= self.margin[j] + closed[j]);
                if pending {
                    continue;
                }
                let mut acc = vec![crate::spectral::ZERO; n];
                for (mult, w) in REFLECTION {
                    let mut src = idx.clone();
                    src[axis] = if i < p {
                        p + mult * (p - i)
                    } else {
                        last - mult * (i - last)
                    };
                    let s = e.flat(&src);
                    for (a, v) in acc.iter_mut().zip(e.node(s)) {
                        *a += v * w;
                    }
                }
                e.node_mut(flat).copy_from_slice(&acc);
            }
        }
        for flat in 0..e.n_nodes() {
            let chi = self.cutoff(&e.index(flat));
            if chi != 1.0 {
                e.node_mut(flat).iter_mut().for_each(|v| *v *= chi);
            }
        }
        Ok(e)
    }

    /// Restriction of an enlarged-grid function to the closed mesh.
    pub fn restrict(&self, v: &GridFunction) -> GridFunction {
        let mut out = self.mesh.closed_grid(v.components());
        for k in 0..out.n_nodes() {
            let idx: Vec<usize> = out.index(k).iter().zip(&self.margin).map(|(i, p)| i + p).collect();
            let src = v.flat(&idx);
            out.node_mut(k).copy_from_slice(v.node(src));
        }
        out
    }
}

/// `C^infinity` step: 0 for `t <= 0`, 1 for `t >= 1`.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let psi = |s: f64| if s > 0.0 { (-1.0 / s).exp() } else { 0.0 };
    psi(t) / (psi(t) + psi(1.0 - t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::C64;
    use std::f64::consts::PI;

    fn sine_mesh_function(mesh: &Mesh) -> GridFunction {
        let l = mesh.lengths()[0];
        let mut u = mesh.closed_grid(1);
        for k in 0..u.n_nodes() {
            let x = u.point(k)[0];
            u.node_mut(k)[0] = C64::new((PI * x / l).sin(), 0.0);
        }
        u
    }

    #[test]
    fn zero_extends_to_zero() {
        let mesh = Mesh::new(&[1.0, 1.0], &[31, 31]).unwrap();
        let ext = ExtensionOperator::new(&mesh, 0.1).unwrap();
        let e = ext.extend(&mesh.closed_grid(2)).unwrap();
        assert!(e.data.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn restriction_is_identity() {
        let mesh = Mesh::new(&[2.0], &[63]).unwrap();
        let ext = ExtensionOperator::new(&mesh, 0.2).unwrap();
        let u = sine_mesh_function(&mesh);
        assert_eq!(ext.restrict(&ext.extend(&u).unwrap()), u);
    }

    #[test]
    fn reflection_matches_smooth_continuation() {
        // Taylor: u(-s) - (6 u(s) - 8 u(2s) + 3 u(3s)) = -4 u'''(0) s^3 + O(s^4).
        let mesh = Mesh::new(&[1.0], &[255]).unwrap();
        let ext = ExtensionOperator::new(&mesh, 0.05).unwrap();
        let e = ext.extend(&sine_mesh_function(&mesh)).unwrap();
        let h = mesh.h()[0];
        for j in 1..=3 {
            let x = -(j as f64) * h;
            let flat = ext.margin()[0] - j;
            assert!((e.node(flat)[0].re - (PI * x).sin()).abs() < 4.5 * PI.powi(3) * x.abs().powi(3));
        }
    }

    #[test]
    fn margin_too_small_for_short_box() {
        let mesh = Mesh::new(&[1.0], &[7]).unwrap();
        assert!(matches!(
            ExtensionOperator::new(&mesh, 0.5),
            Err(Error::MarginTooSmall(_))
        ));
    }

    #[test]
    fn cutoff_vanishes_at_outer_boundary() {
        let mesh = Mesh::new(&[1.0], &[127]).unwrap();
        let ext = ExtensionOperator::new(&mesh, 0.1).unwrap();
        let mut u = mesh.closed_grid(1);
        u.data.iter_mut().for_each(|v| *v = C64::new(1.0, 0.0));
        let e = ext.extend(&u).unwrap();
        assert_eq!(e.node(0)[0].re, 0.0);
        assert_eq!(e.node(e.n_nodes() - 1)[0].re, 0.0);
    }
}
