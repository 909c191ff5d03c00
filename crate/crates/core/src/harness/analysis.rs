use crate::error::{invalid_param, Result};
use crate::grids::GridSchedule;

/// OLS fit of `ln regret` on `ln T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    /// `(ln T, ln regret)`.
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; NaN with two points.
    pub stderr: f64,
}

pub fn fit_scaling_exponent(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 2 {
        return Err(invalid_param("a scaling fit needs at least two points"));
    }
    if let Some(p) = points.iter().find(|(t, r)| !(*t > 0.0 && *r > 0.0)) {
        return Err(invalid_param(format!("scaling fit needs positive values, got {p:?}")));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(t, r)| (t.ln(), r.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid_param("scaling fit needs at least two distinct T"));
    }
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if logs.len() > 2 {
        let rss: f64 = logs
            .iter()
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    Ok(ScalingFit {
        points: logs,
        slope,
        intercept,
        stderr,
    })
}

/// `Δ Σ_m (t_m − t_{m−1})/(10√d) · exp(−16 t_{m−1} Δ²/d²)`.
pub fn lower_bound_curve(grid: &GridSchedule, dim: usize, delta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(invalid_param(format!("delta must lie in [0, 1], got {delta}")));
    }
    if dim == 0 {
        return Err(invalid_param("dimension must be positive"));
    }
    let d = dim as f64;
    let sum: f64 = (0..grid.num_batches())
        .map(|m| {
            let (prev, end) = grid.batch_bounds(m);
            let len = (end - prev) as f64;
            len / (10.0 * d.sqrt()) * (-16.0 * prev as f64 * delta * delta / (d * d)).exp()
        })
        .sum();
    Ok(delta * sum)
}

/// Regret-in-`T` exponent `1/2 + 1/(2(2^M − 1))`.
pub fn exponent_target(batches: usize) -> f64 {
    0.5 + 0.5 / (2f64.powi(batches as i32) - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = [1024.0, 4096.0, 16384.0, 65536.0f64]
            .iter()
            .map(|&t| (t, 3.0 * t.powf(2.0 / 3.0)))
            .collect();
        let fit = fit_scaling_exponent(&pts).unwrap();
        assert!((fit.slope - 2.0 / 3.0).abs() < 1e-10);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-9);
        assert!(fit.stderr < 1e-10);
    }

    #[test]
    fn constant_regret() {
        let fit = fit_scaling_exponent(&[(10.0, 5.0), (100.0, 5.0), (1000.0, 5.0)]).unwrap();
        assert!(fit.slope.abs() < 1e-15);
    }

    #[test]
    fn noisy_power_law() {
        let mut rng = RngStream::new(17, 0);
        for planted in [0.5, 4.0 / 7.0, 2.0 / 3.0, 1.0] {
            let pts: Vec<(f64, f64)> = (10..=16)
                .step_by(2)
                .map(|k| {
                    let t = 2f64.powi(k);
                    (t, t.powf(planted) * (1.0 + 0.01 * rng.std_normal()))
                })
                .collect();
            let fit = fit_scaling_exponent(&pts).unwrap();
            assert!((fit.slope - planted).abs() <= 0.02, "{planted} {}", fit.slope);
        }
    }

    #[test]
    fn bad_points() {
        assert!(fit_scaling_exponent(&[(10.0, 1.0)]).is_err());
        assert!(fit_scaling_exponent(&[(10.0, 1.0), (20.0, 0.0)]).is_err());
        assert!(fit_scaling_exponent(&[(10.0, 1.0), (10.0, 2.0)]).is_err());
        assert!(fit_scaling_exponent(&[(10.0, 1.0), (20.0, 2.0)]).unwrap().stderr.is_nan());
    }

    #[test]
    fn lower_bound_examples() {
        let g = GridSchedule::new(vec![50, 100], 100).unwrap();
        assert_eq!(lower_bound_curve(&g, 4, 0.0).unwrap(), 0.0);
        let want = 0.5 * (2.5 + 2.5 * (-12.5f64).exp());
        assert!((lower_bound_curve(&g, 4, 0.5).unwrap() - want).abs() < 1e-15);

        let one = GridSchedule::new(vec![1000], 1000).unwrap();
        let v = lower_bound_curve(&one, 9, 0.7).unwrap();
        assert!((v - 0.7 * 1000.0 / 30.0).abs() < 1e-12);
        assert!(lower_bound_curve(&g, 4, 1.5).is_err());
    }

    #[test]
    fn targets() {
        assert_eq!(exponent_target(1), 1.0);
        assert!((exponent_target(2) - 2.0 / 3.0).abs() < 1e-15);
        assert!((exponent_target(3) - 4.0 / 7.0).abs() < 1e-15);
    }
}
