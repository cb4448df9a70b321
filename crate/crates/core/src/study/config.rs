use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::coefficients::{catalog, CatalogParams, CoefficientSet, PeriodicField, Symbol, CATALOG_NAMES};
use crate::dirichlet::{Mesh, DEFAULT_H_OVER_EPS};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::CMat;
use crate::spectral::C64;

/// Sweep configuration, read from TOML.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub lattice: LatticeSection,
    pub coeff: CoeffSection,
    pub domain: DomainSection,
    pub mesh: MeshSection,
    pub corrector: CorrectorSection,
    pub cell: CellSection,
    pub data: DataSection,
    pub sweep: SweepSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeSection {
    /// Generators as rows; the unit lattice when absent.
    pub basis: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoeffSection {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    /// CSV of scalar samples `tau_1, ..., tau_d, g`; overrides `name`.
    pub samples_file: Option<PathBuf>,
}

impl Default for CoeffSection {
    fn default() -> Self {
        Self {
            name: "sine1d".into(),
            params: BTreeMap::new(),
            samples_file: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainSection {
    #[serde(rename = "box")]
    pub sides: Vec<f64>,
}

impl Default for DomainSection {
    fn default() -> Self {
        Self { sides: vec![1.0] }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshSection {
    pub h_over_eps: f64,
}

impl Default for MeshSection {
    fn default() -> Self {
        Self {
            h_over_eps: DEFAULT_H_OVER_EPS,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrectorSection {
    pub smoothed: bool,
}

impl Default for CorrectorSection {
    fn default() -> Self {
        Self { smoothed: true }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CellSection {
    pub n: usize,
}

impl Default for CellSection {
    fn default() -> Self {
        Self { n: 128 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    pub phi: String,
    pub psi: String,
    pub forcing: String,
    /// Time profile of the forcing: `zero`, `one` or `cos`.
    pub forcing_profile: String,
}

impl Default for DataSection {
    fn default() -> Self {
        Self {
            phi: "sine1".into(),
            psi: "poly".into(),
            forcing: "sine2".into(),
            forcing_profile: "cos".into(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// Defaults to `2^-3 .. 2^-7` in 1D and `2^-2 .. 2^-5` otherwise.
    pub eps: Option<Vec<f64>>,
    pub t: Vec<f64>,
    pub zeta: f64,
    pub samples: usize,
    pub seed: u64,
    /// Fixed shift; chosen automatically when absent.
    pub lambda: Option<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            eps: None,
            t: vec![0.5, 1.0, 2.0],
            zeta: -1.0,
            samples: 5,
            seed: 7,
            lambda: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("oscillat-out"),
        }
    }
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config file; a relative `samples_file` is resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        if let (Some(f), Some(dir)) = (&cfg.coeff.samples_file, path.parent()) {
            if f.is_relative() {
                cfg.coeff.samples_file = Some(dir.join(f));
            }
        }
        Ok(cfg)
    }

    pub fn dim(&self) -> usize {
        self.domain.sides.len()
    }

    pub fn lattice(&self) -> Result<Lattice> {
        match &self.lattice.basis {
            Some(b) => Lattice::new(b),
            None => Ok(Lattice::unit(self.dim())),
        }
    }

    pub fn coefficients(&self) -> Result<CoefficientSet> {
        if let Some(path) = &self.coeff.samples_file {
            return coefficients_from_samples(path, self.dim(), &self.coeff.params);
        }
        if !CATALOG_NAMES.contains(&self.coeff.name.as_str()) {
            return Err(Error::UnknownCatalogEntry(self.coeff.name.clone()));
        }
        let mut params = CatalogParams::new();
        for (k, v) in &self.coeff.params {
            params = params.with(k, *v);
        }
        catalog(&self.coeff.name, &params)
    }

    pub fn eps_list(&self) -> Vec<f64> {
        self.sweep.eps.clone().unwrap_or_else(|| {
            let range = if self.dim() == 1 { 3..=7 } else { 2..=5 };
            range.map(|k| 0.5f64.powi(k)).collect()
        })
    }

    pub fn mesh_for(&self, eps: f64) -> Result<Mesh> {
        Mesh::for_eps(&self.domain.sides, eps, self.mesh.h_over_eps)
    }

    /// Checks everything that can be checked without solving.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if !(1..=2).contains(&d) {
            return Err(Error::Config(format!("domain.box must have 1 or 2 sides, got {d}")));
        }
        if self.domain.sides.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::Config("domain.box sides must be positive".into()));
        }
        if !(self.mesh.h_over_eps > 0.0 && self.mesh.h_over_eps <= 1.0) {
            return Err(Error::Config("mesh.h_over_eps must lie in (0, 1]".into()));
        }
        let eps = self.eps_list();
        let eps_max = self.domain.sides.iter().copied().fold(f64::INFINITY, f64::min) / 4.0;
        for (i, &e) in eps.iter().enumerate() {
            if !(e > 0.0 && e <= 1.0 && e <= eps_max + 1e-15) {
                return Err(Error::Config(format!(
                    "eps = {e} must lie in (0, min(1, {eps_max})] (a quarter of the shortest side)"
                )));
            }
            if eps[..i].iter().any(|&p| (p - e).abs() <= 1e-15 * e) {
                return Err(Error::Config(format!("eps = {e} is repeated")));
            }
        }
        if self.sweep.t.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
            return Err(Error::Config("sweep.t must contain finite nonnegative times".into()));
        }
        if self.sweep.zeta > 0.0 || !self.sweep.zeta.is_finite() {
            return Err(Error::Config("sweep.zeta must be real and <= 0".into()));
        }
        if self.sweep.samples == 0 {
            return Err(Error::Config("sweep.samples must be positive".into()));
        }
        for name in [&self.data.phi, &self.data.psi, &self.data.forcing] {
            data_profile(name)?;
        }
        time_profile(&self.data.forcing_profile)?;
        let coeffs = self.coefficients()?;
        if coeffs.dim() != d {
            return Err(Error::Config(format!(
                "coefficients live in dimension {} but the box has dimension {d}",
                coeffs.dim()
            )));
        }
        self.lattice()?;
        Ok(())
    }
}

/// Scalar `g` given by samples on a uniform periodic grid; the symbol is the gradient.
fn coefficients_from_samples(path: &Path, dim: usize, params: &BTreeMap<String, f64>) -> Result<CoefficientSet> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        if rec.len() != dim + 1 {
            return Err(Error::Config(format!(
                "{}: expected {} columns (tau_1..tau_{dim}, g), got {}",
                path.display(),
                dim + 1,
                rec.len()
            )));
        }
        let vals: Vec<f64> = rec
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
            })
            .collect::<Result<_>>()?;
        rows.push((vals[..dim].to_vec(), vals[dim]));
    }
    let n = (rows.len() as f64).powf(1.0 / dim as f64).round() as usize;
    if n.pow(dim as u32) != rows.len() || n < 2 || n % 2 != 0 {
        return Err(Error::Config(format!(
            "{}: {} samples do not form an even N^{dim} grid",
            path.display(),
            rows.len()
        )));
    }
    let mut values = vec![None; rows.len()];
    for (tau, g) in rows {
        let mut flat = 0usize;
        for &t in &tau {
            let k = (t * n as f64).round();
            if (t * n as f64 - k).abs() > 1e-6 || k < 0.0 || k >= n as f64 {
                return Err(Error::Config(format!(
                    "sample at tau = {tau:?} is not a grid node k / {n}"
                )));
            }
            flat = flat * n + k as usize;
        }
        values[flat] = Some(CMat::identity(dim, dim) * C64::new(g, 0.0));
    }
    let values: Vec<CMat> = values
        .into_iter()
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Config(format!("{}: duplicate grid nodes", path.display())))?;
    let g = PeriodicField::from_samples(dim, n, values)?;
    let q = params
        .get("q")
        .map(|&q| PeriodicField::constant(dim, 2, CMat::identity(1, 1) * C64::new(q, 0.0)));
    CoefficientSet::new(
        Symbol::gradient(dim),
        g,
        Vec::new(),
        q,
        params.get("lambda").copied().unwrap_or(0.0),
    )
}

/// Spatial profile of the data, as a function of the point and the box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DataProfile {
    Zero,
    Sine(u32),
    Poly,
    Bump,
}

pub fn data_profile(name: &str) -> Result<DataProfile> {
    match name {
        "zero" => Ok(DataProfile::Zero),
        "poly" => Ok(DataProfile::Poly),
        "bump" => Ok(DataProfile::Bump),
        s if s.starts_with("sine") => s[4..]
            .parse::<u32>()
            .ok()
            .filter(|k| (1..=16).contains(k))
            .map(DataProfile::Sine)
            .ok_or_else(|| Error::Config(format!("unknown data function `{name}`"))),
        _ => Err(Error::Config(format!("unknown data function `{name}`"))),
    }
}

impl DataProfile {
    pub fn eval(self, x: &[f64], sides: &[f64]) -> f64 {
        let s: Vec<f64> = x.iter().zip(sides).map(|(x, l)| x / l).collect();
        match self {
            DataProfile::Zero => 0.0,
            DataProfile::Sine(k) => s.iter().map(|s| (k as f64 * PI * s).sin()).product(),
            DataProfile::Poly => s.iter().map(|s| 4.0 * s * (1.0 - s)).product(),
            DataProfile::Bump => s
                .iter()
                .map(|s| {
                    let r = 2.0 * s - 1.0;
                    if r.abs() < 1.0 {
                        (1.0 - 1.0 / (1.0 - r * r)).exp()
                    } else {
                        0.0
                    }
                })
                .product(),
        }
    }

    /// Interior nodal vector with `n` components; component `c` is scaled by `1 + c / 2`.
    pub fn sample(self, mesh: &Mesh, n: usize) -> Vec<C64> {
        mesh.interior_points()
            .iter()
            .flat_map(|p| {
                let v = self.eval(p, mesh.lengths());
                (0..n).map(move |c| C64::new(v * (1.0 + 0.5 * c as f64), 0.0))
            })
            .collect()
    }
}

/// Time profile of the forcing.
pub fn time_profile(name: &str) -> Result<fn(f64) -> f64> {
    match name {
        "zero" => Ok(|_| 0.0),
        "one" => Ok(|_| 1.0),
        "cos" => Ok(f64::cos),
        _ => Err(Error::Config(format!("unknown forcing profile `{name}`"))),
    }
}
