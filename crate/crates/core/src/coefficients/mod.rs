//! Periodic coefficient data of the operator
//! `b(D)* g b(D) + sum_j (a_j D_j + D_j a_j*) + Q + lambda`.

mod catalog;
mod field;
mod symbol;

pub use catalog::{catalog, CatalogParams, CATALOG_NAMES};
pub use field::{grid_point, PeriodicField};
pub use symbol::{symbol_bounds, Symbol};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::CMat;

/// Positivity threshold on sampled eigenvalues of `g`.
pub const DELTA_G: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct CoefficientSet {
    pub symbol: Symbol,
    pub g: PeriodicField,
    /// Either empty or one `n x n` field per axis.
    pub a: Vec<PeriodicField>,
    pub q: Option<PeriodicField>,
    pub lambda: f64,
}

impl CoefficientSet {
    pub fn new(
        symbol: Symbol,
        g: PeriodicField,
        a: Vec<PeriodicField>,
        q: Option<PeriodicField>,
        lambda: f64,
    ) -> Result<Self> {
        let (m, n, d) = (symbol.m(), symbol.n(), symbol.dim());
        if g.shape() != (m, m) || g.dim() != d {
            return Err(Error::Shape(format!(
                "g must be a {m} x {m} field in dimension {d}, got {:?} in dimension {}",
                g.shape(),
                g.dim()
            )));
        }
        let g = if g.is_hermitian() { g } else { g.into_hermitian()? };
        let min_eig = g.min_eigenvalue();
        if min_eig < DELTA_G {
            return Err(Error::NotPositiveField(min_eig));
        }
        if !a.is_empty() && a.len() != d {
            return Err(Error::Shape(format!(
                "expected {d} lower-order fields, got {}",
                a.len()
            )));
        }
        if a.iter().any(|f| f.shape() != (n, n) || f.dim() != d) {
            return Err(Error::Shape(format!("lower-order fields must be {n} x {n}")));
        }
        let q = match q {
            Some(f) if f.shape() != (n, n) || f.dim() != d => {
                return Err(Error::Shape(format!("Q must be {n} x {n}")));
            }
            Some(f) if !f.is_hermitian() => Some(f.into_hermitian()?),
            other => other,
        };
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda must be >= 0, got {lambda}")));
        }
        Ok(Self {
            symbol,
            g,
            a,
            q,
            lambda,
        })
    }

    pub fn dim(&self) -> usize {
        self.symbol.dim()
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self { lambda, ..self.clone() }
    }

    /// `C_a = (sum_j int_Omega |a_j|^2)^{1/2}`.
    pub fn c_a(&self, lat: &Lattice) -> f64 {
        self.a
            .iter()
            .map(|f| f.l2_norm(lat.cell_volume()).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Cell mean of `Q`, zero when absent.
    pub fn q_mean(&self) -> CMat {
        let n = self.symbol.n();
        self.q.as_ref().map(|f| f.mean()).unwrap_or_else(|| CMat::zeros(n, n))
    }

    pub fn has_lower_order(&self) -> bool {
        self.a.iter().any(|f| f.max_abs() > 0.0) || self.q.as_ref().is_some_and(|f| f.max_abs() > 0.0)
    }
}
