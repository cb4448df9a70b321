use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CoefficientSet, PeriodicField, Symbol};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::spectral::C64;

pub const CATALOG_NAMES: [&str; 5] = [
    "const",
    "sine1d",
    "laminate2d",
    "checkerboard-smooth",
    "random-bandlimited",
];

/// Numeric parameters of a catalog entry, keyed by name (`coeff.params.*` in configs).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CatalogParams(pub BTreeMap<String, f64>);

impl CatalogParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.0.insert(key.to_string(), value);
        self
    }

    pub fn get(&self, key: &str, default: f64) -> f64 {
        self.0.get(key).copied().unwrap_or(default)
    }

    fn usize(&self, key: &str, default: usize) -> Result<usize> {
        let v = self.get(key, default as f64);
        if v < 0.0 || v.fract() != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "{key} must be a nonnegative integer, got {v}"
            )));
        }
        Ok(v as usize)
    }
}

fn scalar_identity(m: usize, s: f64) -> CMat {
    CMat::identity(m, m) * C64::new(s, 0.0)
}

/// Builds a named coefficient set. Recognised parameters:
///
/// * every entry: `n` (sample grid, default 64), `q` (constant `Q`), `lambda`;
/// * `const`: `d`, `g`, `a` (constant lower-order coefficient);
/// * `sine1d`: `base`, `amp`, `a_amp` (`a_1 = a_amp sin(2 pi x)`);
/// * `laminate2d`, `checkerboard-smooth`: `base`, `amp`;
/// * `random-bandlimited`: `d`, `seed`, `modes`, `base`, `contrast`, `laminate`.
pub fn catalog(name: &str, params: &CatalogParams) -> Result<CoefficientSet> {
    let n = params.usize("n", 64)?;
    let lambda = params.get("lambda", 0.0);
    let (symbol, g, a) = match name {
        "const" => {
            let d = params.usize("d", 1)?;
            let g = PeriodicField::constant(d, n, scalar_identity(d, params.get("g", 1.0)));
            let a_val = params.get("a", 0.0);
            let a = if a_val != 0.0 {
                (0..d)
                    .map(|_| PeriodicField::constant(d, n, scalar_identity(1, a_val)))
                    .collect()
            } else {
                Vec::new()
            };
            (Symbol::gradient(d), g, a)
        }
        "sine1d" => {
            let (base, amp) = (params.get("base", 2.0), params.get("amp", 1.0));
            let g = PeriodicField::from_fn(1, n, |t| scalar_identity(1, base + amp * (2.0 * PI * t[0]).sin()))?;
            let a_amp = params.get("a_amp", 0.0);
            let a = if a_amp != 0.0 {
                vec![PeriodicField::from_fn(1, n, |t| {
                    scalar_identity(1, a_amp * (2.0 * PI * t[0]).sin())
                })?]
            } else {
                Vec::new()
            };
            (Symbol::gradient(1), g, a)
        }
        "laminate2d" => {
            let (base, amp) = (params.get("base", 2.0), params.get("amp", 1.0));
            let g = PeriodicField::from_fn(2, n, |t| scalar_identity(2, base + amp * (2.0 * PI * t[0]).sin()))?;
            (Symbol::gradient(2), g, Vec::new())
        }
        "checkerboard-smooth" => {
            let (base, amp) = (params.get("base", 2.0), params.get("amp", 1.0));
            let g = PeriodicField::from_fn(2, n, |t| {
                scalar_identity(2, base + amp * (2.0 * PI * t[0]).sin() * (2.0 * PI * t[1]).sin())
            })?;
            (Symbol::gradient(2), g, Vec::new())
        }
        "random-bandlimited" => {
            let d = params.usize("d", 1)?;
            let g = random_bandlimited(
                d,
                n,
                params.usize("modes", 3)?,
                params.get("seed", 0.0) as u64,
                params.get("base", 2.0),
                params.get("contrast", 0.8),
                params.get("laminate", 0.0) != 0.0,
            )?;
            (Symbol::gradient(d), g, Vec::new())
        }
        other => return Err(Error::UnknownCatalogEntry(other.to_string())),
    };
    let q_val = params.get("q", 0.0);
    let q = (q_val != 0.0).then(|| PeriodicField::constant(symbol.dim(), n, scalar_identity(1, q_val)));
    CoefficientSet::new(symbol, g, a, q, lambda)
}

/// `g = base (1 + sum_k c_k cos(2 pi nu_k . tau + phi_k)) I` with `sum |c_k| = contrast < 1`.
fn random_bandlimited(
    d: usize,
    n: usize,
    modes: usize,
    seed: u64,
    base: f64,
    contrast: f64,
    laminate: bool,
) -> Result<PeriodicField> {
    if !(0.0..1.0).contains(&contrast) || base <= 0.0 {
        return Err(Error::InvalidParameter(
            "random-bandlimited needs base > 0 and 0 <= contrast < 1".into(),
        ));
    }
    if 2 * modes >= n {
        return Err(Error::InvalidParameter(format!(
            "modes = {modes} not resolved by a grid of {n} samples"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = modes.max(1) as i64;
    let mut terms: Vec<(Vec<i64>, f64, f64)> = Vec::new();
    for _ in 0..modes.max(1) {
        let nu: Vec<i64> = (0..d)
            .map(|j| if laminate && j > 0 { 0 } else { rng.gen_range(-m..=m) })
            .collect();
        let nu = if nu.iter().all(|&k| k == 0) {
            let mut v = vec![0; d];
            v[0] = 1;
            v
        } else {
            nu
        };
        terms.push((nu, rng.gen_range(0.1..1.0), rng.gen_range(0.0..2.0 * PI)));
    }
    let total: f64 = terms.iter().map(|t| t.1).sum();
    let scale = contrast / total;
    PeriodicField::from_fn(d, n, |tau| {
        let s: f64 = terms
            .iter()
            .map(|(nu, c, phi)| {
                let arg: f64 = nu.iter().zip(tau).map(|(&k, &t)| k as f64 * t).sum();
                c * scale * (2.0 * PI * arg + phi).cos()
            })
            .sum();
        scalar_identity(d, base * (1.0 + s))
    })
}
