//! Coefficients read from a samples file instead of the catalog.

use std::f64::consts::PI;
use std::fmt::Write as _;

use oscillat::cell::solve_cell;
use oscillat::study::SweepConfig;

fn main() -> oscillat::Result<()> {
    let dir = std::env::temp_dir().join("oscillat-tabulated");
    std::fs::create_dir_all(&dir)?;
    // A two-phase layered medium smoothed over a few samples.
    let n = 64;
    let mut csv = String::from("tau_1,g\n");
    for k in 0..n {
        let tau = k as f64 / n as f64;
        let g = 3.0 + 2.0 * (2.0 * PI * tau).cos().tanh();
        let _ = writeln!(csv, "{tau},{g}");
    }
    std::fs::write(dir.join("layers.csv"), csv)?;
    std::fs::write(
        dir.join("study.toml"),
        "[coeff]\nsamples_file = \"layers.csv\"\n[cell]\nn = 64\n",
    )?;

    let cfg = SweepConfig::load(&dir.join("study.toml"))?;
    cfg.validate()?;
    let coeffs = cfg.coefficients()?;
    let cell = solve_cell(&coeffs, &cfg.lattice()?, cfg.cell.n)?;
    let harmonic = 1.0 / coeffs.g.mean_inverse()?[(0, 0)].re;
    println!("g0 = {:.12}", cell.g0[(0, 0)].re);
    println!("harmonic mean of the samples = {harmonic:.12}");
    Ok(())
}
