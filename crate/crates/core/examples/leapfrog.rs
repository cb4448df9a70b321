//! The velocity Verlet oracle converges to the spectral solution at second order.

use num_complex::Complex64 as C64;
use oscillat::coefficients::{catalog, CatalogParams};
use oscillat::dirichlet::{assemble_b_eps, Mesh};
use oscillat::evolution::{largest_eigenvalue, leapfrog_oracle, solve_ibvp, spectral_decompose};
use oscillat::Lattice;

fn main() -> oscillat::Result<()> {
    let eps = 0.125;
    let set = catalog("sine1d", &CatalogParams::new())?;
    let mesh = Mesh::for_eps(&[1.0], eps, 1.0 / 16.0)?;
    let op = assemble_b_eps(&mesh, &set, &Lattice::unit(1), eps, 1.0 / 16.0)?;
    let eb = spectral_decompose(&op)?;
    let raw: Vec<C64> = mesh
        .interior_points()
        .iter()
        .map(|x| C64::new(x[0] * (1.0 - x[0]), 0.0))
        .collect();
    let phi = eb.apply_function(|mu| 1.0 / mu, &raw);
    let psi = vec![C64::new(0.0, 0.0); phi.len()];
    let reference = solve_ibvp(&eb, &phi, &psi, None, &[1.0])?;
    let norm = |v: &[C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let limit = 1.9 / largest_eigenvalue(&op).sqrt();
    println!("stability limit dt = {limit:.3e}");
    for fraction in [0.8, 0.4, 0.2, 0.1, 0.05] {
        let r = leapfrog_oracle(&op, &phi, &psi, None, 1.0, fraction * limit)?;
        let diff: Vec<C64> = r.u.iter().zip(&reference.u[0]).map(|(a, b)| a - b).collect();
        println!(
            "dt = {:.3e} ({} steps): relative error {:.3e}, energy drift {:.2e}",
            fraction * limit,
            r.steps,
            norm(&diff) / norm(&reference.u[0]),
            r.energy_drift
        );
    }
    Ok(())
}
