//! Exact and effective wave solutions at one period, the first-order approximation and
//! the flux.

use oscillat::dirichlet::{h1_norm_closed, l2_norm, quadrature_points};
use oscillat::evolution::{corrected, flux, quadrature_distance, solve_ibvp, spectral_decompose};
use oscillat::study::{Study, SweepConfig};

fn main() -> oscillat::Result<()> {
    let eps = 1.0 / 32.0;
    let mut cfg = SweepConfig::default();
    cfg.sweep.eps = Some(vec![eps]);
    let study = Study::prepare(&cfg)?;
    let case = study.case(eps)?;
    let times = [0.5, 1.0, 2.0];
    let phi = study.regularized(&case, "sine1")?;
    let zero = vec![Default::default(); phi.len()];
    let psi = study.regularized(&case, "poly")?;
    let forcing = study.forcing(&case, 2.0)?;

    let exact = solve_ibvp(&spectral_decompose(&case.b_eps)?, &phi, &psi, forcing.as_ref(), &times)?;
    let effective = solve_ibvp(&spectral_decompose(&case.b0)?, &phi, &psi, forcing.as_ref(), &times)?;
    // The H1 and flux statements are for phi = 0.
    let exact_h1 = solve_ibvp(&spectral_decompose(&case.b_eps)?, &zero, &psi, forcing.as_ref(), &times)?;
    let effective_h1 = solve_ibvp(&spectral_decompose(&case.b0)?, &zero, &psi, forcing.as_ref(), &times)?;

    let points = quadrature_points(&case.mesh);
    for (k, t) in times.iter().enumerate() {
        let diff: Vec<_> = exact.u[k].iter().zip(&effective.u[k]).map(|(a, b)| a - b).collect();
        let v = corrected(&case.mesh, &effective_h1.u[k], &study.cell, eps, true)?;
        let mut h1 = case.mesh.to_closed(&exact_h1.u[k], 1);
        h1.data.iter_mut().zip(&v.value.data).for_each(|(a, b)| *a -= b);
        let p = flux(&case.mesh, &exact_h1.u[k], &study.coeffs, &study.lattice, eps, &points);
        let pa = study.flux_approximation(&case, &effective_h1.u[k], &v.terms, &points);
        println!(
            "t = {t}: |u_eps - u0|_L2 = {:.3e}, |u_eps - v_eps|_H1 = {:.3e}, |p_eps - approx|_L2 = {:.3e}, energy {:.6e}",
            l2_norm(&case.mesh, &diff),
            h1_norm_closed(&h1),
            quadrature_distance(&points, &p, &pa),
            exact.energy[k]
        );
    }
    Ok(())
}
