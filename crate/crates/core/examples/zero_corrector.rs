//! Constant coefficients: every sweep error is at round-off level.

use oscillat::study::{convergence_sweep, cosine_corrector_sweep, resolvent_sweep, SweepConfig};

fn main() -> oscillat::Result<()> {
    let cfg = SweepConfig::from_toml(
        r#"
        [coeff]
        name = "const"
        params = { g = 3.0, n = 8 }
        [cell]
        n = 8
        [mesh]
        h_over_eps = 0.125
        [sweep]
        eps = [0.25, 0.125]
        t = [1.0]
        samples = 2
        "#,
    )?;
    for report in [
        convergence_sweep(&cfg)?,
        resolvent_sweep(&cfg)?,
        cosine_corrector_sweep(&cfg)?,
    ] {
        for e in &report.estimates {
            println!(
                "{:<40} max error {:.3e}  {}",
                e.label(),
                e.max_error(),
                e.verdict.label()
            );
        }
    }
    Ok(())
}
