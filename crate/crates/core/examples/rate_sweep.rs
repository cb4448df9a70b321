//! Runs the three sweeps on a config file (default `configs/sine1d.toml`) and prints the
//! reports.
//!
//! ```text
//! cargo run --release --example rate_sweep -- configs/sine1d.toml
//! ```

use std::path::PathBuf;

use oscillat::study::{convergence_sweep, cosine_corrector_sweep, resolvent_sweep, SweepConfig};

fn main() -> oscillat::Result<()> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/sine1d.toml"));
    let cfg = SweepConfig::load(&path)?;
    for report in [
        resolvent_sweep(&cfg)?,
        convergence_sweep(&cfg)?,
        cosine_corrector_sweep(&cfg)?,
    ] {
        print!("{}", report.text());
        println!("({:.1} s)", report.wall_time.as_secs_f64());
    }
    Ok(())
}
