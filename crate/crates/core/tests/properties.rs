use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use oscillat::cell::{solve_cell, voigt_reuss};
use oscillat::coefficients::{catalog, CatalogParams};
use oscillat::dirichlet::{
    assemble_b_eps, resolvent, steklov, DiscreteOperator, ExtensionOperator, GridFunction, Mesh,
};
use oscillat::evolution::{op_cosine, spectral_decompose, EigenBasis};
use oscillat::study::fit_rate;
use oscillat::Lattice;

fn dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn sine_operator(a_amp: f64) -> DiscreteOperator {
    let set = catalog("sine1d", &CatalogParams::new().with("a_amp", a_amp).with("lambda", 4.0)).unwrap();
    let mesh = Mesh::for_eps(&[1.0], 0.25, 1.0 / 16.0).unwrap();
    assemble_b_eps(&mesh, &set, &Lattice::unit(1), 0.25, 1.0 / 16.0).unwrap()
}

thread_local! {
    static BASIS: (DiscreteOperator, EigenBasis) = {
        let op = sine_operator(0.4);
        let eb = spectral_decompose(&op).unwrap();
        (op, eb)
    };
}

fn vector(coeffs: &[(f64, f64)], len: usize) -> Vec<C64> {
    (0..len)
        .map(|i| {
            let x = (i + 1) as f64 / (len + 1) as f64;
            coeffs
                .iter()
                .enumerate()
                .map(|(k, &(a, b))| C64::new(a, b) * ((k + 1) as f64 * PI * x).sin())
                .sum()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn steklov_preserves_affine_functions(c0 in -3.0..3.0f64, c1 in -3.0..3.0f64, c2 in -3.0..3.0f64,
                                          eps in 0.05..1.0f64, x in 0.0..1.0f64, y in 0.0..1.0f64) {
        let lat = Lattice::unit(2);
        let mut g = GridFunction::zeros(vec![81, 81], vec![-2.0, -2.0], vec![0.0625, 0.0625], 1);
        for k in 0..g.n_nodes() {
            let p = g.point(k);
            g.node_mut(k)[0] = C64::new(c0 + c1 * p[0] + c2 * p[1], 0.0);
        }
        let s = steklov(&g, &lat, eps, &[vec![x, y]]).unwrap();
        prop_assert!((s[0][0].re - (c0 + c1 * x + c2 * y)).abs() < 1e-12);
    }

    #[test]
    fn restriction_undoes_extension(coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..6),
                                    eps_pow in 2u32..5) {
        let eps = 0.5f64.powi(eps_pow as i32);
        let mesh = Mesh::for_eps(&[1.0], eps, 1.0 / 8.0).unwrap();
        let ext = ExtensionOperator::for_eps(&mesh, &Lattice::unit(1), eps).unwrap();
        let u = mesh.to_closed(&vector(&coeffs, mesh.n_interior()), 1);
        let back = ext.restrict(&ext.extend(&u).unwrap());
        prop_assert_eq!(back.data, u.data);
    }

    #[test]
    fn cosine_functional_equation(t in 0.0..3.0f64, s in 0.0..3.0f64,
                                  coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..8)) {
        BASIS.with(|(_, eb)| {
            let v = vector(&coeffs, eb.size());
            let lhs = op_cosine(eb, t + s, &v);
            let ccs = op_cosine(eb, t, &op_cosine(eb, s, &v));
            let rhs: Vec<C64> = ccs.iter().zip(op_cosine(eb, t - s, &v)).map(|(a, b)| a * 2.0 - b).collect();
            prop_assert!(dist(&lhs, &rhs) <= 1e-9 * norm(&v));
            Ok(())
        })?;
    }

    #[test]
    fn cosine_is_a_contraction(t in -5.0..5.0f64,
                               coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..8)) {
        BASIS.with(|(_, eb)| {
            let v = vector(&coeffs, eb.size());
            prop_assert!(norm(&op_cosine(eb, t, &v)) <= norm(&v) * (1.0 + 1e-12));
            Ok(())
        })?;
    }

    #[test]
    fn resolvent_solves_the_shifted_system(zeta in -50.0..0.0f64,
                                           coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..8)) {
        BASIS.with(|(op, _)| {
            let f = vector(&coeffs, op.size());
            let u = resolvent(op, C64::new(zeta, 0.0), &f).unwrap();
            let r: Vec<C64> = op.apply(&u).iter().zip(&u).map(|(a, b)| a - b * zeta).collect();
            prop_assert!(dist(&r, &f) <= 1e-9 * norm(&f));
            Ok(())
        })?;
    }

    #[test]
    fn rate_fit_recovers_power_laws(p in 0.1..2.0f64, c in 1e-3..1e3f64) {
        let pts: Vec<(f64, f64)> = (3..8).map(|k| {
            let e = 0.5f64.powi(k);
            (e, c * e.powf(p))
        }).collect();
        let fit = fit_rate(&pts).unwrap();
        prop_assert!((fit.slope - p).abs() < 1e-10);
        prop_assert!((fit.intercept - c.ln()).abs() < 1e-9);
    }

    #[test]
    fn voigt_reuss_brackets_random_coefficients(seed in 0u64..1000, contrast in 0.0..0.9f64) {
        let params = CatalogParams::new().with("seed", seed as f64).with("contrast", contrast).with("n", 128.0);
        let set = catalog("random-bandlimited", &params).unwrap();
        let cell = solve_cell(&set, &Lattice::unit(1), 128).unwrap();
        let vr = voigt_reuss(&set.g, &cell.g0).unwrap();
        prop_assert!(vr.lower_ok && vr.upper_ok);
    }
}

#[test]
fn noisy_power_law_slope() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let pts: Vec<(f64, f64)> = (3..8)
        .map(|k| {
            let e = 0.5f64.powi(k);
            (e, 3.0 * e.powf(0.93) * (1.0 + 0.05 * rng.gen_range(-1.0..1.0)))
        })
        .collect();
    let fit = fit_rate(&pts).unwrap();
    assert!((0.85..=1.01).contains(&fit.slope), "slope {}", fit.slope);
}
