use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use super::config::SweepConfig;
use super::report::RateReport;
use super::selftest::run_selftest;
use super::sweeps::{convergence_sweep, cosine_corrector_sweep, resolvent_sweep, Study};
use crate::cell::voigt_reuss;
use crate::dirichlet::quadrature_points;
use crate::error::{Error, Result};
use crate::evolution::{corrected, flux, solve_ibvp, spectral_decompose};
use crate::linalg::CMat;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VERDICT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "oscillat", version, about = "Periodic homogenization workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the cell problems and print the effective data.
    Cell(Common),
    /// Solve the exact and effective wave problems at one eps and write nodal profiles.
    Evolve {
        #[command(flatten)]
        common: Common,
        /// Period to use; defaults to the largest eps of the sweep.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Solution, corrector and flux rates of the wave problem.
    Sweep(Common),
    /// Resolvent, corrected resolvent and inverse square root rates.
    ResolventSweep(Common),
    /// Smoothed cosine rate with corrector, and the plain cosine error.
    CosSweep(Common),
    /// Run the closed-form fixtures.
    Selftest,
}

/// Parses `args` (program name first), runs the subcommand and returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn load(common: &Common) -> Result<(SweepConfig, PathBuf)> {
    let cfg = SweepConfig::load(&common.config)?;
    let out = common.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
    Ok((cfg, out))
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Cell(common) => {
            let (cfg, out) = load(&common)?;
            cell(&cfg, &out, common.out.is_some())
        }
        Command::Evolve { common, eps } => {
            let (cfg, out) = load(&common)?;
            evolve(&cfg, &out, eps)?;
            Ok(EXIT_OK)
        }
        Command::Sweep(common) => sweep(&common, convergence_sweep),
        Command::ResolventSweep(common) => sweep(&common, resolvent_sweep),
        Command::CosSweep(common) => sweep(&common, cosine_corrector_sweep),
        Command::Selftest => {
            let failures = run_selftest(&mut std::io::stdout());
            Ok(if failures == 0 { EXIT_OK } else { EXIT_VERDICT })
        }
    }
}

fn sweep(common: &Common, run: fn(&SweepConfig) -> Result<RateReport>) -> Result<i32> {
    let (cfg, out) = load(common)?;
    let report = run(&cfg)?;
    report.write(&out)?;
    print!("{}", report.text());
    eprintln!(
        "wrote {} and {} ({:.1} s)",
        out.join("rates.csv").display(),
        out.join("report.txt").display(),
        report.wall_time.as_secs_f64()
    );
    Ok(if report.passed() { EXIT_OK } else { EXIT_VERDICT })
}

fn format_matrix(m: &CMat) -> String {
    let rows: Vec<String> = m
        .row_iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(|z| format!("{:.12e}{:+.12e}i", z.re, z.im)).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn matrix_json(m: &CMat) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> = m.row_iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect();
    serde_json::json!(rows)
}

fn cell(cfg: &SweepConfig, out: &Path, write: bool) -> Result<i32> {
    cfg.validate()?;
    let lat = cfg.lattice()?;
    let coeffs = cfg.coefficients()?;
    let sol = crate::cell::solve_cell(&coeffs, &lat, cfg.cell.n)?;
    let vr = voigt_reuss(&coeffs.g, &sol.g0)?;
    let mut text = String::new();
    let _ = writeln!(text, "g0 = {}", format_matrix(&sol.g0));
    let _ = writeln!(text, "V = {}", format_matrix(&sol.v));
    let _ = writeln!(text, "W = {}", format_matrix(&sol.w));
    let _ = writeln!(text, "corrector size = {:.6e}", sol.corrector_size());
    let _ = writeln!(text, "max residual = {:.6e}", sol.max_residual());
    let _ = writeln!(
        text,
        "voigt-reuss lower margin = {:.6e} ({}), upper margin = {:.6e} ({})",
        vr.lower_margin,
        if vr.lower_ok { "ok" } else { "violated" },
        vr.upper_margin,
        if vr.upper_ok { "ok" } else { "violated" }
    );
    print!("{text}");
    if write {
        std::fs::create_dir_all(out)?;
        let json = serde_json::json!({
            "n": sol.n,
            "g0": matrix_json(&sol.g0),
            "v": matrix_json(&sol.v),
            "w": matrix_json(&sol.w),
            "corrector_size": sol.corrector_size(),
            "max_residual": sol.max_residual(),
            "voigt_reuss": {
                "lower_margin": vr.lower_margin,
                "upper_margin": vr.upper_margin,
                "lower_ok": vr.lower_ok,
                "upper_ok": vr.upper_ok,
            },
        });
        std::fs::write(out.join("cell.json"), serde_json::to_string_pretty(&json)?)?;
    }
    Ok(if vr.lower_ok && vr.upper_ok {
        EXIT_OK
    } else {
        EXIT_VERDICT
    })
}

/// Writes `solution_t<t>.csv` (nodes of the closed mesh) and `flux_t<t>.csv` (quadrature
/// points) for every configured time.
pub fn evolve(cfg: &SweepConfig, out: &Path, eps: Option<f64>) -> Result<()> {
    let mut cfg = cfg.clone();
    let eps = eps.unwrap_or_else(|| cfg.eps_list().iter().copied().fold(0.0, f64::max));
    cfg.sweep.eps = Some(vec![eps]);
    let study = Study::prepare(&cfg)?;
    let case = study.case(eps)?;
    let times = cfg.sweep.t.clone();
    if times.is_empty() {
        return Err(Error::Config("sweep.t is empty; nothing to evolve".into()));
    }
    let t_max = times.iter().copied().fold(0.0, f64::max);
    let phi = study.regularized(&case, &cfg.data.phi)?;
    let psi = study.regularized(&case, &cfg.data.psi)?;
    let forcing = study.forcing(&case, t_max)?;
    let u_eps = solve_ibvp(&spectral_decompose(&case.b_eps)?, &phi, &psi, forcing.as_ref(), &times)?;
    let u0 = solve_ibvp(&spectral_decompose(&case.b0)?, &phi, &psi, forcing.as_ref(), &times)?;
    let points = quadrature_points(&case.mesh);
    let n = study.n();
    let d = case.mesh.dim();
    std::fs::create_dir_all(out)?;
    for (k, &t) in times.iter().enumerate() {
        let v = corrected(&case.mesh, &u0.u[k], &study.cell, eps, study.smoothed())?;
        let ue = case.mesh.to_closed(&u_eps.u[k], n);
        let uz = case.mesh.to_closed(&u0.u[k], n);

        let mut w = csv::Writer::from_path(out.join(format!("solution_t{t}.csv")))?;
        let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
        header.push("component".into());
        for name in ["u_eps", "u0", "v_eps"] {
            header.push(format!("{name}_re"));
            header.push(format!("{name}_im"));
        }
        w.write_record(&header)?;
        for node in 0..ue.n_nodes() {
            for c in 0..n {
                let mut rec: Vec<String> = ue.point(node).iter().map(|x| format!("{x:.17e}")).collect();
                rec.push(c.to_string());
                for g in [&ue, &uz, &v.value] {
                    let z = g.node(node)[c];
                    rec.push(format!("{:.17e}", z.re));
                    rec.push(format!("{:.17e}", z.im));
                }
                w.write_record(&rec)?;
            }
        }
        w.flush()?;

        let p = flux(&case.mesh, &u_eps.u[k], &study.coeffs, &study.lattice, eps, &points);
        let pa = study.flux_approximation(&case, &u0.u[k], &v.terms, &points);
        let mut w = csv::Writer::from_path(out.join(format!("flux_t{t}.csv")))?;
        let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
        header.extend(
            [
                "weight",
                "component",
                "p_eps_re",
                "p_eps_im",
                "flux_approx_re",
                "flux_approx_im",
            ]
            .map(String::from),
        );
        w.write_record(&header)?;
        for (q, (pq, aq)) in points.iter().zip(p.iter().zip(&pa)) {
            for (r, (a, b)) in pq.iter().zip(aq).enumerate() {
                let mut rec: Vec<String> = q.x.iter().map(|x| format!("{x:.17e}")).collect();
                rec.push(format!("{:.17e}", q.weight));
                rec.push(r.to_string());
                rec.extend([a.re, a.im, b.re, b.im].map(|x: f64| format!("{x:.17e}")));
                w.write_record(&rec)?;
            }
        }
        w.flush()?;
    }
    Ok(())
}
