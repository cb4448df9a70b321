use oscillat::study::{convergence_sweep, cosine_corrector_sweep, resolvent_sweep, RateReport, SweepConfig};

fn config(h_over_eps: f64) -> SweepConfig {
    let mut cfg = SweepConfig::default();
    cfg.cell.n = 128;
    cfg.coeff.params.insert("n".into(), 128.0);
    cfg.mesh.h_over_eps = h_over_eps;
    cfg.sweep.eps = Some(vec![0.125, 0.0625]);
    cfg.sweep.t = vec![0.5, 1.0, 2.0];
    cfg
}

fn errors(report: &RateReport) -> Vec<(String, f64, f64)> {
    report
        .estimates
        .iter()
        .flat_map(|e| e.points.iter().map(move |&(eps, err)| (e.label(), eps, err)))
        .collect()
}

/// Halving h at fixed eps moves every reported error by less than 10 %.
#[test]
fn discretization_error_is_subdominant() {
    for sweep in [convergence_sweep, resolvent_sweep, cosine_corrector_sweep] {
        let coarse = errors(&sweep(&config(1.0 / 16.0)).unwrap());
        let fine = errors(&sweep(&config(1.0 / 32.0)).unwrap());
        assert_eq!(coarse.len(), fine.len());
        for ((label, eps, a), (_, _, b)) in coarse.iter().zip(&fine) {
            let change = (a - b).abs() / b;
            assert!(
                change < 0.1,
                "{label} at eps = {eps}: {a:.4e} -> {b:.4e} ({:.1} %)",
                100.0 * change
            );
        }
    }
}
