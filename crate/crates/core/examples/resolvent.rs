//! Resolvent convergence `(B_eps + 1)^{-1} f -> (B0 + 1)^{-1} f` at first order in eps.

use num_complex::Complex64 as C64;
use oscillat::cell::solve_cell;
use oscillat::coefficients::{catalog, CatalogParams};
use oscillat::dirichlet::{assemble_b0, assemble_b_eps, l2_norm, resolvent, Mesh};
use oscillat::study::fit_rate;
use oscillat::Lattice;

fn main() -> oscillat::Result<()> {
    let set = catalog("sine1d", &CatalogParams::new().with("n", 128.0))?;
    let lat = Lattice::unit(1);
    let cell = solve_cell(&set, &lat, 128)?;
    let zeta = C64::new(-1.0, 0.0);
    let mut points = Vec::new();
    for k in 3..8 {
        let eps = 0.5f64.powi(k);
        let mesh = Mesh::for_eps(&[1.0], eps, 1.0 / 16.0)?;
        let f: Vec<C64> = mesh
            .interior_points()
            .iter()
            .map(|x| C64::new((std::f64::consts::PI * x[0]).sin() + x[0], 0.0))
            .collect();
        let b_eps = assemble_b_eps(&mesh, &set, &lat, eps, 1.0 / 16.0)?;
        let b0 = assemble_b0(&mesh, &cell, &set)?;
        let u_eps = resolvent(&b_eps, zeta, &f)?;
        let u0 = resolvent(&b0, zeta, &f)?;
        let diff: Vec<C64> = u_eps.iter().zip(&u0).map(|(a, b)| a - b).collect();
        let err = l2_norm(&mesh, &diff) / l2_norm(&mesh, &f);
        println!("eps = {eps:<10} relative L2 error {err:.4e}");
        points.push((eps, err));
    }
    println!("fitted slope {:.3}", fit_rate(&points)?.slope);
    Ok(())
}
