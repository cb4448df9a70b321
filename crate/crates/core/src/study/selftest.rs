use std::f64::consts::PI;

use super::config::SweepConfig;
use super::fit::fit_rate;
use super::report::Verdict;
use super::sweeps::{convergence_sweep, cosine_corrector_sweep, resolvent_sweep};
use crate::cell::solve_cell;
use crate::coefficients::{catalog, symbol_bounds, CatalogParams, Symbol};
use crate::dirichlet::{assemble_b_eps, corrector_apply, resolvent, steklov, ExtensionOperator, GridFunction, Mesh};
use crate::error::Result;
use crate::evolution::{corrected, op_cosine, op_sine_scaled, solve_ibvp, spectral_decompose};
use crate::lattice::Lattice;
use crate::spectral::C64;

/// A named closed-form check.
pub struct Fixture {
    pub name: &'static str,
    pub run: fn() -> Result<bool>,
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn constant_g(d: usize) -> Result<crate::coefficients::CoefficientSet> {
    catalog(
        "const",
        &CatalogParams::new().with("d", d as f64).with("g", 3.0).with("n", 8.0),
    )
}

fn laplacian_op(m: usize) -> Result<crate::dirichlet::DiscreteOperator> {
    let set = catalog("const", &CatalogParams::new().with("g", 1.0).with("n", 4.0))?;
    let mesh = Mesh::new(&[1.0], &[m])?;
    assemble_b_eps(&mesh, &set, &Lattice::unit(1), 1.0, 1.0)
}

fn constant_g_config(eps: &[f64]) -> SweepConfig {
    let mut cfg = SweepConfig::default();
    cfg.coeff.name = "const".into();
    cfg.coeff.params.insert("g".into(), 3.0);
    cfg.coeff.params.insert("n".into(), 8.0);
    cfg.cell.n = 8;
    cfg.mesh.h_over_eps = 0.125;
    cfg.sweep.eps = Some(eps.to_vec());
    cfg.sweep.t = vec![1.0];
    cfg.sweep.samples = 2;
    cfg
}

pub const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "unit lattice geometry",
        run: || {
            let l1 = Lattice::unit(1);
            let l2 = Lattice::unit(2);
            Ok(close(l1.dual_generator(0)[0], 2.0 * PI, 1e-14)
                && close(l1.cell_volume(), 1.0, 1e-14)
                && close(2.0 * l1.r1(), 1.0, 1e-14)
                && close(2.0 * l1.r0(), 2.0 * PI, 1e-14)
                && close(2.0 * l2.r1(), 2f64.sqrt(), 1e-14))
        },
    },
    Fixture {
        name: "frequency set",
        run: || {
            let xi: Vec<f64> = Lattice::unit(1).frequencies(4)?.iter().map(|f| f.xi[0]).collect();
            let want = [-4.0 * PI, -2.0 * PI, 0.0, 2.0 * PI];
            Ok(xi.iter().zip(want).all(|(a, b)| close(*a, b, 1e-12)) && Lattice::unit(2).frequencies(2)?.len() == 4)
        },
    },
    Fixture {
        name: "gradient symbol bounds",
        run: || {
            let (a0, a1) = symbol_bounds(Symbol::gradient(2).mats())?;
            let s1 = Symbol::gradient(1);
            Ok(close(a0, 1.0, 1e-12) && close(a1, 1.0, 1e-12) && close(s1.alpha0(), 1.0, 1e-12))
        },
    },
    Fixture {
        name: "sine1d catalog entry",
        run: || {
            let set = catalog("sine1d", &CatalogParams::new())?;
            let g = set.g.eval_scaled(&Lattice::unit(1), 0.25, &[vec![0.125]]);
            Ok(close(g[0][(0, 0)].re, 2.0, 1e-12) && set.a.is_empty())
        },
    },
    Fixture {
        name: "constant g has zero correctors",
        run: || {
            let cell = solve_cell(&constant_g(2)?, &Lattice::unit(2), 8)?;
            Ok(cell.corrector_size() <= 1e-12
                && (cell.g0.clone() - crate::linalg::identity(2) * C64::new(3.0, 0.0)).norm() <= 1e-12
                && cell.v.norm() == 0.0
                && cell.w.norm() == 0.0)
        },
    },
    Fixture {
        name: "Laplacian stencil",
        run: || {
            let op = laplacian_op(7)?;
            let h2 = 64.0;
            Ok((0..7).all(|i| close(op.matrix.get(i, i).re, 2.0 * h2, 1e-9))
                && (0..6).all(|i| close(op.matrix.get(i + 1, i).re, -h2, 1e-9))
                && op.lambda == 0.0)
        },
    },
    Fixture {
        name: "extension of zero and restriction identity",
        run: || {
            let mesh = Mesh::new(&[1.0], &[63])?;
            let ext = ExtensionOperator::for_eps(&mesh, &Lattice::unit(1), 0.125)?;
            let mut u = mesh.closed_grid(1);
            let zero = ext.extend(&u)?;
            for k in 0..u.n_nodes() {
                let x = u.point(k)[0];
                u.node_mut(k)[0] = C64::new((PI * x).sin(), 0.0);
            }
            let back = ext.restrict(&ext.extend(&u)?);
            Ok(zero.data.iter().all(|v| *v == C64::new(0.0, 0.0)) && back.data == u.data)
        },
    },
    Fixture {
        name: "smoothing of constants, linear functions and characters",
        run: || {
            let lat = Lattice::unit(1);
            let mut g = GridFunction::zeros(vec![401], vec![-2.0], vec![0.01], 3);
            for k in 0..g.n_nodes() {
                let x = g.point(k)[0];
                let node = g.node_mut(k);
                node[0] = C64::new(2.5, 0.0);
                node[1] = C64::new(x, 0.0);
                node[2] = C64::new(0.0, 2.0 * PI * x).exp();
            }
            let s = steklov(&g, &lat, 1.0, &[vec![0.3]])?;
            // The character is linearly interpolated, so its average is only near zero.
            Ok(close(s[0][0].re, 2.5, 1e-12) && close(s[0][1].re, 0.3, 1e-12) && s[0][2].norm() < 1e-3)
        },
    },
    Fixture {
        name: "corrector vanishes with zero cell correctors",
        run: || {
            let set = constant_g(1)?;
            let lat = Lattice::unit(1);
            let cell = solve_cell(&set, &lat, 8)?;
            let mesh = Mesh::new(&[1.0], &[63])?;
            let ext = ExtensionOperator::for_eps(&mesh, &lat, 0.125)?;
            let mut u = mesh.closed_grid(1);
            for k in 0..u.n_nodes() {
                u.node_mut(k)[0] = C64::new(u.point(k)[0].powi(2), 0.0);
            }
            let terms = corrector_apply(&cell, 0.125, &ext.extend(&u)?, &ext, true)?;
            Ok(terms.value.data.iter().all(|v| v.norm() <= 1e-12))
        },
    },
    Fixture {
        name: "resolvent at zero inverts the operator",
        run: || {
            let op = laplacian_op(15)?;
            let v: Vec<C64> = (0..15)
                .map(|k| C64::new(k as f64 * 0.1, 1.0 - k as f64 * 0.05))
                .collect();
            let u = resolvent(&op, C64::new(0.0, 0.0), &op.apply(&v))?;
            Ok(max_diff(&u, &v) <= 1e-10)
        },
    },
    Fixture {
        name: "cosine and sine at t = 0 and on eigenvectors",
        run: || {
            let eb = spectral_decompose(&laplacian_op(15)?)?;
            let v: Vec<C64> = (0..15).map(|k| C64::new((k as f64).sin(), 0.0)).collect();
            let q = eb.vector(2);
            let mu = eb.eigenvalues[2];
            let cq: Vec<C64> = q.iter().map(|x| x * (1.3 * mu.sqrt()).cos()).collect();
            let sq: Vec<C64> = q.iter().map(|x| x * ((1.3 * mu.sqrt()).sin() / mu.sqrt())).collect();
            Ok(op_cosine(&eb, 0.0, &v) == v
                && op_sine_scaled(&eb, 0.0, &v).iter().all(|x| x.norm() == 0.0)
                && max_diff(&op_cosine(&eb, 1.3, &q), &cq) <= 1e-10
                && max_diff(&op_sine_scaled(&eb, 1.3, &q), &sq) <= 1e-10)
        },
    },
    Fixture {
        name: "zero data gives zero solution, single mode keeps energy",
        run: || {
            let eb = spectral_decompose(&laplacian_op(15)?)?;
            let zero = vec![C64::new(0.0, 0.0); 15];
            let r = solve_ibvp(&eb, &zero, &zero, None, &[0.0, 1.0])?;
            let q = eb.vector(0);
            let s = solve_ibvp(&eb, &q, &zero, None, &[0.0, 0.7, 2.0])?;
            let drift = s.energy.iter().map(|e| (e - s.energy[0]).abs()).fold(0.0, f64::max);
            Ok(r.u.iter().all(|u| u.iter().all(|v| v.norm() == 0.0)) && drift <= 1e-10 * s.energy[0])
        },
    },
    Fixture {
        name: "first-order approximation equals u0 with zero correctors",
        run: || {
            let set = constant_g(1)?;
            let lat = Lattice::unit(1);
            let cell = solve_cell(&set, &lat, 8)?;
            let mesh = Mesh::new(&[1.0], &[63])?;
            let u0: Vec<C64> = mesh
                .interior_points()
                .iter()
                .map(|x| C64::new((PI * x[0]).sin(), 0.0))
                .collect();
            let v = corrected(&mesh, &u0, &cell, 0.125, true)?;
            Ok(max_diff(&mesh.from_closed(&v.value), &u0) <= 1e-12)
        },
    },
    Fixture {
        name: "rate fit of exact power laws",
        run: || {
            let eps = [0.125, 0.0625, 0.03125, 0.015625];
            let lin: Vec<(f64, f64)> = eps.iter().map(|&e| (e, e)).collect();
            let half: Vec<(f64, f64)> = eps.iter().map(|&e| (e, e.sqrt())).collect();
            Ok(close(fit_rate(&lin)?.slope, 1.0, 1e-12) && close(fit_rate(&half)?.slope, 0.5, 1e-12))
        },
    },
    Fixture {
        name: "constant g sweeps are exact",
        run: || {
            let cfg = constant_g_config(&[0.25, 0.125]);
            let reports = [
                convergence_sweep(&cfg)?,
                resolvent_sweep(&cfg)?,
                cosine_corrector_sweep(&cfg)?,
            ];
            Ok(reports.iter().all(|r| {
                r.estimates
                    .iter()
                    .all(|e| e.max_error() <= 1e-10 && e.verdict == Verdict::Exact)
            }))
        },
    },
];

/// Runs every fixture, printing one line each; returns the number of failures.
pub fn run_selftest(out: &mut dyn std::io::Write) -> usize {
    let mut failures = 0;
    for f in FIXTURES {
        let (ok, detail) = match (f.run)() {
            Ok(ok) => (ok, String::new()),
            Err(e) => (false, format!(" ({e})")),
        };
        if !ok {
            failures += 1;
        }
        let _ = writeln!(out, "{} {}{detail}", if ok { "pass" } else { "FAIL" }, f.name);
    }
    failures
}
