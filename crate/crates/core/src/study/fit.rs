use crate::error::{Error, Result};

/// Least-squares line through `(log eps, log error)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual of the fit in log space.
    pub max_residual: f64,
}

/// Fits `log err = slope log eps + intercept` by ordinary least squares.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.iter().any(|&(_, e)| e == 0.0) {
        return Err(Error::ZeroError);
    }
    if points.len() < 2 {
        return Err(Error::InsufficientPoints {
            needed: 2,
            got: points.len(),
        });
    }
    if points.iter().any(|&(eps, e)| !(eps > 0.0 && e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidParameter("rate fit needs positive eps and errors".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 1e-24 {
        return Err(Error::InvalidParameter("rate fit needs distinct eps values".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0, f64::max);
    Ok(RateFit {
        slope,
        intercept,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const EPS: [f64; 5] = [0.125, 0.0625, 0.03125, 0.015625, 0.0078125];

    #[test]
    fn exact_power_laws() {
        let lin: Vec<(f64, f64)> = EPS[..4].iter().map(|&e| (e, e)).collect();
        assert!((fit_rate(&lin).unwrap().slope - 1.0).abs() < 1e-12);
        let half: Vec<(f64, f64)> = EPS.iter().map(|&e| (e, e.sqrt())).collect();
        let fit = fit_rate(&half).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!(fit.intercept.abs() < 1e-12);
    }

    #[test]
    fn noisy_rate_within_noise_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<(f64, f64)> = EPS
            .iter()
            .map(|&e| (e, 3.0 * e.powf(0.93) * (1.0 + 0.05 * rng.gen_range(-1.0..1.0))))
            .collect();
        let s = fit_rate(&pts).unwrap().slope;
        assert!((0.85..=1.01).contains(&s), "slope {s}");
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(fit_rate(&[(0.1, 0.0), (0.2, 1.0)]), Err(Error::ZeroError)));
        assert!(matches!(fit_rate(&[(0.1, 1.0)]), Err(Error::InsufficientPoints { .. })));
        assert!(fit_rate(&[(0.1, 1.0), (0.1, 2.0)]).is_err());
    }
}
