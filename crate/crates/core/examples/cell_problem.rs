//! Cell problems for a few catalog entries: effective matrix, interaction matrices and
//! the size of the correctors.

use oscillat::cell::solve_cell;
use oscillat::coefficients::{catalog, CatalogParams};
use oscillat::Lattice;

fn main() -> oscillat::Result<()> {
    let entries = [
        ("sine1d", CatalogParams::new().with("n", 128.0)),
        ("sine1d", CatalogParams::new().with("n", 128.0).with("a_amp", 0.5)),
        ("laminate2d", CatalogParams::new().with("n", 64.0)),
        ("checkerboard-smooth", CatalogParams::new().with("n", 64.0)),
    ];
    for (name, params) in entries {
        let set = catalog(name, &params)?;
        let cell = solve_cell(&set, &Lattice::unit(set.dim()), params.get("n", 64.0) as usize)?;
        println!("{name} {:?}", params.0);
        for i in 0..cell.g0.nrows() {
            let row: Vec<String> = (0..cell.g0.ncols())
                .map(|j| format!("{:.10}", cell.g0[(i, j)].re))
                .collect();
            println!("  g0[{i}] = [{}]", row.join(", "));
        }
        println!("  |V| = {:.3e}, |W| = {:.3e}", cell.v.norm(), cell.w.norm());
        println!(
            "  corrector size {:.3e}, CG residual {:.1e}",
            cell.corrector_size(),
            cell.max_residual()
        );
    }
    println!("sqrt(3) = {:.10}", 3f64.sqrt());
    Ok(())
}
