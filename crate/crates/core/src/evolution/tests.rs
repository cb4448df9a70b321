use std::f64::consts::PI;

use super::*;
use crate::cell::solve_cell;
use crate::coefficients::{catalog, CatalogParams, CoefficientSet};
use crate::dirichlet::{
    apply_symbol_fd, assemble_b0, assemble_b_eps, quadrature_points, resolvent, BandedMatrix, DiscreteOperator,
    ExtensionOperator, Mesh, OperatorTag, DEFAULT_H_OVER_EPS,
};
use crate::error::Error;
use crate::lattice::Lattice;
use crate::linalg::gauss_legendre;
use crate::spectral::C64;

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn constant_set(g: f64) -> CoefficientSet {
    catalog("const", &CatalogParams::new().with("g", g).with("n", 8.0)).unwrap()
}

fn sine1d(a_amp: f64) -> CoefficientSet {
    catalog("sine1d", &CatalogParams::new().with("n", 64.0).with("a_amp", a_amp)).unwrap()
}

/// Laplacian on `(0, pi)` with `m` interior nodes.
fn laplacian(m: usize) -> DiscreteOperator {
    let mesh = Mesh::new(&[PI], &[m]).unwrap();
    let lat = Lattice::unit(1);
    assemble_b_eps(&mesh, &constant_set(1.0), &lat, 1.0, 1.0).unwrap()
}

fn sine1d_operator(eps: f64, a_amp: f64) -> DiscreteOperator {
    let mesh = Mesh::for_eps(&[1.0], eps, DEFAULT_H_OVER_EPS).unwrap();
    let set = sine1d(a_amp).with_lambda(if a_amp == 0.0 { 0.0 } else { 4.0 });
    assemble_b_eps(&mesh, &set, &Lattice::unit(1), eps, DEFAULT_H_OVER_EPS).unwrap()
}

fn smooth_data(op: &DiscreteOperator) -> Vec<C64> {
    op.mesh
        .interior_points()
        .iter()
        .map(|p| real(p[0] * (1.0 - p[0]) * (1.0 + p[0])))
        .collect()
}

#[test]
fn laplacian_eigenpairs_match_closed_form() {
    let op = laplacian(63);
    let eb = spectral_decompose(&op).unwrap();
    let h = op.mesh.h()[0];
    let xs: Vec<f64> = op.mesh.interior_points().iter().map(|p| p[0]).collect();
    for k in 1..=10 {
        let mu = 4.0 / (h * h) * (k as f64 * h / 2.0).sin().powi(2);
        assert!((eb.eigenvalues[k - 1] - mu).abs() <= 1e-10 * mu);
        assert!((eb.eigenvalues[k - 1] - (k * k) as f64).abs() <= (k as f64 * h).powi(2) / 12.0 * (k * k) as f64);
        let q = eb.vector(k - 1);
        let s: Vec<C64> = xs.iter().map(|x| real((k as f64 * x).sin())).collect();
        let overlap: C64 = q.iter().zip(&s).map(|(a, b)| a.conj() * b).sum();
        assert!((overlap.norm() - norm(&s)).abs() <= 1e-9 * norm(&s));
    }
    assert!(eb.max_residual() <= 1e-8);
}

#[test]
fn diagonal_matrix_decomposition() {
    let mut m = BandedMatrix::zeros(3, 0);
    for (i, v) in [4.0, 1.0, 9.0].iter().enumerate() {
        m.add(i, i, real(*v));
    }
    let mesh = Mesh::new(&[1.0], &[3]).unwrap();
    let op = DiscreteOperator::new(m, mesh, 1, OperatorTag::Effective, 0.0).unwrap();
    let eb = spectral_decompose(&op).unwrap();
    assert_eq!(eb.eigenvalues, vec![1.0, 4.0, 9.0]);
    for (k, row) in [1usize, 0, 2].iter().enumerate() {
        assert!((eb.vector(k)[*row].norm() - 1.0).abs() < 1e-15);
    }
}

#[test]
fn decomposition_reconstructs_operator() {
    for a_amp in [0.0, 0.4] {
        let op = sine1d_operator(0.25, a_amp);
        let eb = spectral_decompose(&op).unwrap();
        let dense = op.matrix.to_dense();
        let mut err = 0.0;
        for j in 0..eb.size() {
            let mut e = vec![real(0.0); eb.size()];
            e[j] = real(1.0);
            let col = eb.apply_function(|mu| mu, &e);
            err += (0..eb.size()).map(|i| (col[i] - dense[(i, j)]).norm_sqr()).sum::<f64>();
        }
        assert!(err.sqrt() <= 1e-8 * dense.norm(), "a_amp = {a_amp}");
        assert!(eb.max_residual() <= 1e-8);
        for j in 0..4 {
            for k in 0..4 {
                let ip: C64 = eb.vector(j).iter().zip(eb.vector(k)).map(|(a, b)| a.conj() * b).sum();
                let expected = if j == k { 1.0 } else { 0.0 };
                assert!((ip - real(expected)).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn eigenpairs_stay_accurate_on_large_meshes() {
    for (eps, a_amp) in [(1.0 / 32.0, 0.0), (1.0 / 32.0, 0.4), (1.0 / 128.0, 0.0)] {
        let op = sine1d_operator(eps, a_amp);
        let eb = spectral_decompose(&op).unwrap();
        let cond = eb.eigenvalues.last().unwrap() / eb.eigenvalues[0];
        assert!(
            eb.max_residual() <= 1e-13 * cond,
            "eps = {eps}, a_amp = {a_amp}: {}",
            eb.max_residual()
        );
        let v = smooth_data(&op);
        assert!(dist(&eb.expand(&eb.project(&v)), &v) <= 1e-10 * norm(&v));
    }
    // Square box: the spectrum has many near-multiple eigenvalues.
    let set = catalog("checkerboard-smooth", &CatalogParams::new().with("n", 32.0)).unwrap();
    let mesh = Mesh::for_eps(&[1.0, 1.0], 0.125, 0.25).unwrap();
    let op = assemble_b_eps(&mesh, &set, &Lattice::unit(2), 0.125, 0.25).unwrap();
    let eb = spectral_decompose(&op).unwrap();
    assert_eq!(eb.size(), 961);
    let cond = eb.eigenvalues.last().unwrap() / eb.eigenvalues[0];
    assert!(eb.max_residual() <= 1e-13 * cond, "{}", eb.max_residual());
}

#[test]
fn eigensolver_rejects_oversized_operators() {
    let op = laplacian(MAX_DENSE + 1);
    assert!(matches!(spectral_decompose(&op), Err(Error::EigSolverFailure(_))));
}

#[test]
fn cosine_and_sine_on_eigenvectors() {
    let op = laplacian(31);
    let eb = spectral_decompose(&op).unwrap();
    let v = smooth_data(&op);
    assert_eq!(op_cosine(&eb, 0.0, &v), v);
    assert!(op_sine_scaled(&eb, 0.0, &v).iter().all(|z| z.norm() == 0.0));
    for k in [0, 3, 10] {
        let q = eb.vector(k);
        let mu = eb.eigenvalues[k];
        let t = 0.7;
        let c = op_cosine(&eb, t, &q);
        let s = op_sine_scaled(&eb, t, &q);
        for i in 0..q.len() {
            assert!((c[i] - q[i] * (t * mu.sqrt()).cos()).norm() < 1e-12);
            assert!((s[i] - q[i] * ((t * mu.sqrt()).sin() / mu.sqrt())).norm() < 1e-12);
        }
    }
}

#[test]
fn effective_cosine_of_first_sine_mode() {
    // g0 = 1 on (0, pi): the nodal sine is the first discrete eigenvector.
    let op = laplacian(47);
    let h = op.mesh.h()[0];
    let mu1 = 4.0 / (h * h) * (h / 2.0).sin().powi(2);
    let eb = spectral_decompose(&op).unwrap();
    let v: Vec<C64> = op.mesh.interior_points().iter().map(|p| real(p[0].sin())).collect();
    let c = op_cosine(&eb, 1.0, &v);
    for (a, b) in c.iter().zip(&v) {
        assert!((a - b * mu1.sqrt().cos()).norm() < 1e-12);
    }
}

#[test]
fn sine_is_integral_of_cosine() {
    let op = sine1d_operator(0.25, 0.0);
    let eb = spectral_decompose(&op).unwrap();
    let v = smooth_data(&op);
    let t = 1.3;
    // Composite 32-point Gauss on panels resolving the highest frequency.
    let panels = (t * eb.eigenvalues.last().unwrap().sqrt() / 4.0).ceil() as usize;
    let mut integral = vec![real(0.0); v.len()];
    for p in 0..panels {
        let (a, b) = (p as f64 * t / panels as f64, (p + 1) as f64 * t / panels as f64);
        for (s, w) in gauss_legendre(32, a, b) {
            let c = op_cosine(&eb, s, &v);
            integral.iter_mut().zip(c).for_each(|(x, y)| *x += y * w);
        }
    }
    assert!(dist(&integral, &op_sine_scaled(&eb, t, &v)) <= 1e-8 * norm(&v));
}

#[test]
fn sine_scaled_taylor_branch_is_continuous() {
    let t: f64 = 2.0;
    let mu = (0.9e-6 / t).powi(2);
    let series = sine_scaled(mu, t);
    let direct = (t * mu.sqrt()).sin() / mu.sqrt();
    assert!((series - direct).abs() <= 1e-12 * t);
    assert_eq!(sine_scaled(0.0, t), t);
}

#[test]
fn cosine_functional_equation() {
    let op = sine1d_operator(0.25, 0.4);
    let eb = spectral_decompose(&op).unwrap();
    let v = smooth_data(&op);
    let (t, s) = (0.8, 0.3);
    let lhs = op_cosine(&eb, t + s, &v);
    let cs = op_cosine(&eb, s, &v);
    let ccs = op_cosine(&eb, t, &cs);
    let rhs: Vec<C64> = ccs
        .iter()
        .zip(op_cosine(&eb, t - s, &v))
        .map(|(a, b)| a * 2.0 - b)
        .collect();
    assert!(dist(&lhs, &rhs) <= 1e-8 * norm(&v));
}

#[test]
fn sine_derivative_is_cosine_at_second_order() {
    let op = laplacian(31);
    let eb = spectral_decompose(&op).unwrap();
    let v = smooth_data(&op);
    let t = 0.9;
    let target = op_cosine(&eb, t, &v);
    let err = |d: f64| {
        let p = op_sine_scaled(&eb, t + d, &v);
        let m = op_sine_scaled(&eb, t - d, &v);
        let fd: Vec<C64> = p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * d)).collect();
        dist(&fd, &target)
    };
    let (e1, e2) = (err(1e-2), err(5e-3));
    assert!((e1 / e2 - 4.0).abs() < 0.2, "ratio {}", e1 / e2);
}

#[test]
fn ibvp_trivial_cases() {
    let op = sine1d_operator(0.25, 0.0);
    let eb = spectral_decompose(&op).unwrap();
    let zero = vec![real(0.0); eb.size()];
    let r = solve_ibvp(&eb, &zero, &zero, None, &[0.5, 1.0]).unwrap();
    assert!(r.u.iter().flatten().all(|z| z.norm() == 0.0));

    let q = eb.vector(0);
    let mu = eb.eigenvalues[0];
    let times = [0.0, 0.5, 1.0, 2.0, 7.5];
    let r = solve_ibvp(&eb, &q, &zero, None, &times).unwrap();
    for (i, &t) in times.iter().enumerate() {
        for (a, b) in r.u[i].iter().zip(&q) {
            assert!((a - b * (t * mu.sqrt()).cos()).norm() < 1e-12);
        }
        assert!((r.energy[i] - r.energy[0]).abs() <= 1e-8 * r.energy[0]);
    }
}

#[test]
fn energy_is_conserved_without_forcing() {
    let op = sine1d_operator(0.125, 0.4);
    let eb = spectral_decompose(&op).unwrap();
    let phi = smooth_data(&op);
    let psi: Vec<C64> = phi.iter().map(|v| v * C64::new(0.5, -1.0)).collect();
    let r = solve_ibvp(&eb, &phi, &psi, None, &[0.0, 1.0, 3.3, 10.0]).unwrap();
    for e in &r.energy {
        assert!((e - r.energy[0]).abs() <= 1e-8 * r.energy[0]);
    }
}

#[test]
fn harmonic_forcing_matches_closed_form() {
    let op = sine1d_operator(0.25, 0.0);
    let eb = spectral_decompose(&op).unwrap();
    let q = eb.vector(0);
    let mu = eb.eigenvalues[0];
    let omega = 2.0;
    let zero = vec![real(0.0); eb.size()];
    let forcing = Forcing::sample(2.0, 0.01, |t| q.iter().map(|v| v * (omega * t).cos()).collect());
    let times = [0.5, 1.0, 2.0];
    let r = solve_ibvp(&eb, &zero, &zero, Some(&forcing), &times).unwrap();
    for (i, &t) in times.iter().enumerate() {
        let coeff = ((omega * t).cos() - (mu.sqrt() * t).cos()) / (mu - omega * omega);
        let dcoeff = (-omega * (omega * t).sin() + mu.sqrt() * (mu.sqrt() * t).sin()) / (mu - omega * omega);
        for k in 0..q.len() {
            assert!((r.u[i][k] - q[k] * coeff).norm() < 1e-8);
            assert!((r.du_dt[i][k] - q[k] * dcoeff).norm() < 1e-7);
        }
    }
    let short = Forcing::sample(1.0, 0.01, |_| zero.clone());
    assert!(matches!(
        solve_ibvp(&eb, &zero, &zero, Some(&short), &[2.0]),
        Err(Error::ForcingGridTooCoarse(_))
    ));
}

#[test]
fn spline_interpolates_smooth_samples() {
    let t: Vec<f64> = (0..=40).map(|k| k as f64 * 0.05).collect();
    let y: Vec<Vec<C64>> = t
        .iter()
        .map(|&s| vec![real(s.sin()), C64::new(1.0 - 2.0 * s, s)])
        .collect();
    let sp = NaturalSpline::new(t.clone(), y.clone()).unwrap();
    for (k, &s) in t.iter().enumerate() {
        assert!((sp.eval(s)[0] - y[k][0]).norm() < 1e-14);
    }
    for s in [0.33, 1.01, 1.77] {
        let v = sp.eval(s);
        assert!((v[0].re - s.sin()).abs() < 1e-5);
        assert!((v[1] - C64::new(1.0 - 2.0 * s, s)).norm() < 1e-13);
    }
}

#[test]
fn leapfrog_agrees_with_spectral_evolution() {
    for a_amp in [0.0, 0.4] {
        let op = sine1d_operator(0.25, a_amp);
        let eb = spectral_decompose(&op).unwrap();
        let phi = smooth_data(&op);
        let phi = eb.apply_function(|mu| 1.0 / (mu * mu), &phi);
        let psi = eb.apply_function(|mu| 0.5 / mu, &phi);
        let f = phi.clone();
        let forcing = Forcing::sample(1.0, 0.01, |t| f.iter().map(|v| v * (3.0 * t).sin()).collect());
        let spectral = solve_ibvp(&eb, &phi, &psi, Some(&forcing), &[1.0]).unwrap();
        let limit = 1.9 / largest_eigenvalue(&op).sqrt();
        let rhs = |t: f64| -> Vec<C64> { f.iter().map(|v| v * (3.0 * t).sin()).collect() };
        let lf = leapfrog_oracle(&op, &phi, &psi, Some(&rhs), 1.0, 0.1 * limit).unwrap();
        let rel = dist(&lf.u, &spectral.u[0]) / norm(&spectral.u[0]);
        assert!(rel <= 1e-4, "a_amp = {a_amp}: {rel}");
    }
}

#[test]
fn leapfrog_mode_converges_at_second_order() {
    let op = laplacian(15);
    let eb = spectral_decompose(&op).unwrap();
    let q = eb.vector(0);
    let zero = vec![real(0.0); q.len()];
    let exact: Vec<C64> = q.iter().map(|v| v * eb.eigenvalues[0].sqrt().cos()).collect();
    let err = |dt: f64| dist(&leapfrog_oracle(&op, &q, &zero, None, 1.0, dt).unwrap().u, &exact);
    let (e1, e2) = (err(0.02), err(0.01));
    assert!((e1 / e2 - 4.0).abs() < 0.1, "ratio {}", e1 / e2);
}

#[test]
fn leapfrog_energy_drift_and_cfl() {
    let op = sine1d_operator(0.25, 0.0);
    let phi = smooth_data(&op);
    let zero = vec![real(0.0); phi.len()];
    let limit = 1.9 / largest_eigenvalue(&op).sqrt();
    let r = leapfrog_oracle(&op, &phi, &zero, None, 10.0, 0.5 * limit).unwrap();
    assert!(r.energy_drift <= 1e-3, "drift {}", r.energy_drift);
    assert!(matches!(
        leapfrog_oracle(&op, &phi, &zero, None, 1.0, 1.1 * limit),
        Err(Error::CflViolation { .. })
    ));
}

#[test]
fn first_order_approximation_without_corrector_is_identity() {
    let lat = Lattice::unit(1);
    let set = constant_set(2.0);
    let cell = solve_cell(&set, &lat, 16).unwrap();
    let mesh = Mesh::for_eps(&[1.0], 0.125, DEFAULT_H_OVER_EPS).unwrap();
    let u0: Vec<C64> = mesh.interior_points().iter().map(|p| real((PI * p[0]).sin())).collect();
    let v = corrected(&mesh, &u0, &cell, 0.125, true).unwrap();
    assert_eq!(v.value, mesh.to_closed(&u0, 1));
}

/// Composes `u0 + eps Lambda(x / eps) S_eps(-i u0')` from the raw pieces.
fn hand_built(mesh: &Mesh, u0: &[C64], cell: &crate::cell::CellSolution, eps: f64) -> Vec<C64> {
    let ext = ExtensionOperator::for_eps(mesh, &cell.lattice, eps).unwrap();
    let e = ext.extend(&mesh.to_closed(u0, 1)).unwrap();
    let h = mesh.h()[0];
    let deriv = |x: f64| -> C64 {
        // Linear interpolation of the centred difference on the enlarged grid.
        let s = (x - e.origin[0]) / h;
        let i = s.floor() as usize;
        let f = s - i as f64;
        let d = |j: usize| (e.data[j + 1] - e.data[j - 1]) * C64::new(0.0, -1.0 / (2.0 * h));
        d(i) * (1.0 - f) + d(i + 1) * f
    };
    let rule = gauss_legendre(8, -0.5, 0.5);
    let closed = mesh.to_closed(u0, 1);
    (0..closed.n_nodes())
        .map(|k| {
            let x = closed.point(k)[0];
            let smooth: C64 = rule.iter().map(|&(z, w)| deriv(x - eps * z) * w).sum();
            let lam = cell.lambda.field.eval_fractional(&[x / eps])[(0, 0)];
            closed.data[k] + lam * smooth * eps
        })
        .collect()
}

#[test]
fn first_order_approximation_matches_composition() {
    let lat = Lattice::unit(1);
    let cell = solve_cell(&sine1d(0.0), &lat, 64).unwrap();
    for eps in [0.25, 0.125] {
        let mesh = Mesh::for_eps(&[1.0], eps, DEFAULT_H_OVER_EPS).unwrap();
        let u0: Vec<C64> = mesh.interior_points().iter().map(|p| real((PI * p[0]).sin())).collect();
        let v = corrected(&mesh, &u0, &cell, eps, true).unwrap();
        let oracle = hand_built(&mesh, &u0, &cell, eps);
        assert!(dist(&v.value.data, &oracle) <= 1e-8 * norm(&oracle));
    }
}

#[test]
fn corrector_term_is_first_order_in_l2() {
    let lat = Lattice::unit(1);
    let cell = solve_cell(&sine1d(0.0), &lat, 64).unwrap();
    let diff = |eps: f64| {
        let mesh = Mesh::for_eps(&[1.0], eps, DEFAULT_H_OVER_EPS).unwrap();
        let u0: Vec<C64> = mesh.interior_points().iter().map(|p| real((PI * p[0]).sin())).collect();
        let v = corrected(&mesh, &u0, &cell, eps, true).unwrap();
        let mut d = v.value.clone();
        d.data
            .iter_mut()
            .zip(&mesh.to_closed(&u0, 1).data)
            .for_each(|(a, b)| *a -= b);
        (
            crate::dirichlet::l2_norm_closed(&d),
            crate::dirichlet::h1_norm_closed(&d),
        )
    };
    let (l1, g1) = diff(1.0 / 8.0);
    let (l2, g2) = diff(1.0 / 16.0);
    assert!((l1 / l2 - 2.0).abs() < 0.2, "L2 ratio {}", l1 / l2);
    // The gradient of the corrector stays of order one.
    assert!((g1 / g2 - 1.0).abs() < 0.2, "H1 ratio {}", g1 / g2);
}

#[test]
fn constant_coefficient_flux_is_exact() {
    let lat = Lattice::unit(1);
    let set = constant_set(2.5);
    let cell = solve_cell(&set, &lat, 16).unwrap();
    let mesh = Mesh::for_eps(&[1.0], 0.125, DEFAULT_H_OVER_EPS).unwrap();
    let u0: Vec<C64> = mesh.interior_points().iter().map(|p| real((PI * p[0]).sin())).collect();
    let pts = quadrature_points(&mesh);
    let p = flux(&mesh, &u0, &set, &lat, 0.125, &pts);
    let v = corrected(&mesh, &u0, &cell, 0.125, false).unwrap();
    let pa = flux_approx(&v.terms, &cell, 0.125, &pts);
    assert!(
        quadrature_distance(&pts, &p, &pa) <= 1e-3 * quadrature_distance(&pts, &p, &vec![vec![real(0.0)]; pts.len()])
    );
}

#[test]
fn one_dimensional_flux_uses_the_effective_coefficient() {
    let lat = Lattice::unit(1);
    let cell = solve_cell(&sine1d(0.0), &lat, 128).unwrap();
    let g0 = cell.g0[(0, 0)];
    for k in 0..50 {
        let tau = k as f64 / 50.0;
        assert!((cell.g_tilde.eval_fractional(&[tau])[(0, 0)] - g0).norm() < 1e-8);
    }
    let mesh = Mesh::for_eps(&[1.0], 0.125, DEFAULT_H_OVER_EPS).unwrap();
    let u0: Vec<C64> = mesh.interior_points().iter().map(|p| real((PI * p[0]).sin())).collect();
    let v = corrected(&mesh, &u0, &cell, 0.125, true).unwrap();
    let pts = quadrature_points(&mesh);
    let pa = flux_approx(&v.terms, &cell, 0.125, &pts);
    for (q, p) in pts.iter().zip(&pa) {
        let w = crate::dirichlet::fe_value(&v.terms.smoothed_b, q)[0];
        assert!((p[0] - g0 * w).norm() < 1e-7);
    }
}

#[test]
fn flux_error_decreases_with_eps() {
    let lat = Lattice::unit(1);
    let set = sine1d(0.0);
    let cell = solve_cell(&set, &lat, 64).unwrap();
    let err = |eps: f64| {
        let mesh = Mesh::for_eps(&[1.0], eps, DEFAULT_H_OVER_EPS).unwrap();
        let f: Vec<C64> = mesh.interior_points().iter().map(|p| real((PI * p[0]).sin())).collect();
        let be = assemble_b_eps(&mesh, &set, &lat, eps, DEFAULT_H_OVER_EPS).unwrap();
        let b0 = assemble_b0(&mesh, &cell, &set).unwrap();
        let ue = resolvent(&be, real(-1.0), &f).unwrap();
        let u0 = resolvent(&b0, real(-1.0), &f).unwrap();
        let pts = quadrature_points(&mesh);
        let p = flux(&mesh, &ue, &set, &lat, eps, &pts);
        let v = corrected(&mesh, &u0, &cell, eps, true).unwrap();
        quadrature_distance(&pts, &p, &flux_approx(&v.terms, &cell, eps, &pts))
    };
    assert!(err(1.0 / 16.0) < err(1.0 / 8.0));
    let _ = apply_symbol_fd;
}
