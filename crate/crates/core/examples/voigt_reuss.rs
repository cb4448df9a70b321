//! The effective matrix lies between the harmonic and arithmetic means of `g`.

use oscillat::cell::{solve_cell, voigt_reuss};
use oscillat::coefficients::{catalog, CatalogParams};
use oscillat::Lattice;

fn main() -> oscillat::Result<()> {
    println!(
        "{:>4} {:>3} {:>14} {:>14}",
        "seed", "d", "g0 - harmonic", "arithmetic - g0"
    );
    for seed in 0..6 {
        for d in [1usize, 2] {
            let n = if d == 1 { 128 } else { 32 };
            let params = CatalogParams::new()
                .with("d", d as f64)
                .with("n", n as f64)
                .with("seed", seed as f64);
            let set = catalog("random-bandlimited", &params)?;
            let cell = solve_cell(&set, &Lattice::unit(d), n)?;
            let vr = voigt_reuss(&set.g, &cell.g0)?;
            println!("{seed:>4} {d:>3} {:>14.6e} {:>14.6e}", vr.lower_margin, vr.upper_margin);
        }
    }
    Ok(())
}
