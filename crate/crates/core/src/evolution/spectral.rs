use faer::diag::Diag;
use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self_adjoint_evd, self_adjoint_evd_scratch, ComputeEigenvectors};
use faer::traits::ComplexField;
use faer::{c64, Mat, MatRef, Par};
use nalgebra::{DMatrix, DVector};

use crate::dirichlet::{BandedMatrix, DiscreteOperator, Mesh};
use crate::error::{Error, Result};
use crate::spectral::{C64, ZERO};

/// Largest operator handled by the dense eigensolver.
pub const MAX_DENSE: usize = 4096;

/// Below this value of `sqrt(mu) |t|` the scaled sine uses its Taylor series.
const TAYLOR_SWITCH: f64 = 1e-6;

#[derive(Debug, Clone)]
enum Vectors {
    Real(DMatrix<f64>),
    Complex(DMatrix<C64>),
}

/// Orthonormal eigenbasis `A = Q diag(mu) Q*` of a discrete Dirichlet operator.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    /// Ascending, all positive.
    pub eigenvalues: Vec<f64>,
    vectors: Vectors,
    matrix: BandedMatrix,
    pub mesh: Mesh,
    pub n: usize,
}

/// Full eigendecomposition of a dense copy; real symmetric matrices stay real.
pub fn spectral_decompose(op: &DiscreteOperator) -> Result<EigenBasis> {
    let size = op.size();
    if size > MAX_DENSE {
        return Err(Error::EigSolverFailure(format!(
            "{size} unknowns exceed the dense limit {MAX_DENSE}"
        )));
    }
    let dense = op.matrix.to_dense();
    let (w, vectors) = if op.matrix.is_real() {
        let a = Mat::<f64>::from_fn(size, size, |i, j| dense[(i, j)].re);
        let (w, u) = hermitian_eigen(a.as_ref(), |x| *x)?;
        (w, Vectors::Real(DMatrix::from_fn(size, size, |i, j| u[(i, j)])))
    } else {
        let a = Mat::<c64>::from_fn(size, size, |i, j| {
            let z = dense[(i, j)];
            c64::new(z.re, z.im)
        });
        let (w, u) = hermitian_eigen(a.as_ref(), |z| z.re)?;
        (
            w,
            Vectors::Complex(DMatrix::from_fn(size, size, |i, j| {
                C64::new(u[(i, j)].re, u[(i, j)].im)
            })),
        )
    };
    if let Some(&mu) = w.first() {
        if !(mu > 0.0) {
            return Err(Error::EigSolverFailure(format!("nonpositive eigenvalue {mu:e}")));
        }
    }
    Ok(EigenBasis {
        eigenvalues: w,
        vectors,
        matrix: op.matrix.clone(),
        mesh: op.mesh.clone(),
        n: op.n,
    })
}

/// Sequential self-adjoint eigensolver; eigenvalues ascending.
fn hermitian_eigen<T: ComplexField>(a: MatRef<'_, T>, re: fn(&T) -> f64) -> Result<(Vec<f64>, Mat<T>)> {
    let n = a.nrows();
    let mut s = Diag::<T>::zeros(n);
    let mut u = Mat::<T>::zeros(n, n);
    let req = self_adjoint_evd_scratch::<T>(n, ComputeEigenvectors::Yes, Par::Seq, Default::default());
    let mut buf = MemBuffer::new(req);
    self_adjoint_evd(
        a,
        s.as_mut(),
        Some(u.as_mut()),
        Par::Seq,
        MemStack::new(&mut buf),
        Default::default(),
    )
    .map_err(|e| Error::EigSolverFailure(format!("{e:?}")))?;
    let w = (0..n).map(|k| re(&s[k])).collect();
    Ok((w, u))
}

impl EigenBasis {
    pub fn size(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn matrix(&self) -> &BandedMatrix {
        &self.matrix
    }

    /// Eigenvector `q_k`.
    pub fn vector(&self, k: usize) -> Vec<C64> {
        match &self.vectors {
            Vectors::Real(q) => q.column(k).iter().map(|&x| C64::new(x, 0.0)).collect(),
            Vectors::Complex(q) => q.column(k).iter().copied().collect(),
        }
    }

    /// Coefficients `Q* v`.
    pub fn project(&self, v: &[C64]) -> Vec<C64> {
        match &self.vectors {
            Vectors::Real(q) => {
                let re = DVector::from_iterator(v.len(), v.iter().map(|z| z.re));
                let im = DVector::from_iterator(v.len(), v.iter().map(|z| z.im));
                let (a, b) = (q.tr_mul(&re), q.tr_mul(&im));
                a.iter().zip(b.iter()).map(|(&x, &y)| C64::new(x, y)).collect()
            }
            Vectors::Complex(q) => q.ad_mul(&DVector::from_column_slice(v)).iter().copied().collect(),
        }
    }

    /// Vector `Q c`.
    pub fn expand(&self, c: &[C64]) -> Vec<C64> {
        match &self.vectors {
            Vectors::Real(q) => {
                let re = DVector::from_iterator(c.len(), c.iter().map(|z| z.re));
                let im = DVector::from_iterator(c.len(), c.iter().map(|z| z.im));
                let (a, b) = (q * re, q * im);
                a.iter().zip(b.iter()).map(|(&x, &y)| C64::new(x, y)).collect()
            }
            Vectors::Complex(q) => (q * DVector::from_column_slice(c)).iter().copied().collect(),
        }
    }

    /// `f(A) v = Q diag(f(mu)) Q* v`.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64, v: &[C64]) -> Vec<C64> {
        let mut c = self.project(v);
        for (ck, &mu) in c.iter_mut().zip(&self.eigenvalues) {
            *ck *= f(mu);
        }
        self.expand(&c)
    }

    /// Largest relative eigen-residual `|A q_k - mu_k q_k| / mu_k`.
    pub fn max_residual(&self) -> f64 {
        (0..self.size())
            .map(|k| {
                let q = self.vector(k);
                let aq = self.matrix.matvec(&q);
                let mu = self.eigenvalues[k];
                let r: f64 = aq.iter().zip(&q).map(|(a, b)| (a - b * mu).norm_sqr()).sum();
                r.sqrt() / mu
            })
            .fold(0.0, f64::max)
    }

    /// Energy `|du|^2 + (A u, u)` in the discrete `L_2` product.
    pub fn energy(&self, u: &[C64], du: &[C64]) -> f64 {
        let au = self.matrix.matvec(u);
        let form: f64 = au.iter().zip(u).map(|(a, b)| (b.conj() * a).re).sum();
        let kinetic: f64 = du.iter().map(|v| v.norm_sqr()).sum();
        self.mesh.cell_volume() * (kinetic + form)
    }
}

/// `sin(t sqrt(mu)) / sqrt(mu)`.
pub fn sine_scaled(mu: f64, t: f64) -> f64 {
    let s = mu.max(0.0).sqrt();
    if s * t.abs() < TAYLOR_SWITCH {
        t - t.powi(3) * mu / 6.0 + t.powi(5) * mu * mu / 120.0
    } else {
        (s * t).sin() / s
    }
}

/// `cos(t A^{1/2}) v`.
pub fn op_cosine(eb: &EigenBasis, t: f64, v: &[C64]) -> Vec<C64> {
    if t == 0.0 {
        return v.to_vec();
    }
    eb.apply_function(|mu| (t * mu.sqrt()).cos(), v)
}

/// `A^{-1/2} sin(t A^{1/2}) v`.
pub fn op_sine_scaled(eb: &EigenBasis, t: f64, v: &[C64]) -> Vec<C64> {
    if t == 0.0 {
        return vec![ZERO; v.len()];
    }
    eb.apply_function(|mu| sine_scaled(mu, t), v)
}
