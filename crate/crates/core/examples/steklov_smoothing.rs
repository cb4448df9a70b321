//! Steklov smoothing of plane waves: `S_eps e^{i xi x} = sinc(eps xi / 2) e^{i xi x}` on the
//! unit lattice.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use oscillat::dirichlet::{steklov, GridFunction};
use oscillat::Lattice;

fn main() -> oscillat::Result<()> {
    let lat = Lattice::unit(1);
    let eps = 0.125;
    let x = 0.3;
    for k in [1.0, 2.0, 4.0, 8.0, 12.0] {
        let xi = 2.0 * PI * k;
        let h = 1.0 / 4096.0;
        let mut u = GridFunction::zeros(vec![4097], vec![-0.5], vec![h], 1);
        for i in 0..u.n_nodes() {
            let y = u.point(i)[0];
            u.node_mut(i)[0] = C64::from_polar(1.0, xi * y);
        }
        let s = steklov(&u, &lat, eps, &[vec![x]])?[0][0] / C64::from_polar(1.0, xi * x);
        let arg = eps * xi / 2.0;
        println!("k = {k:>4}: computed {:+.8}, closed form {:+.8}", s.re, arg.sin() / arg);
    }
    Ok(())
}
