//! Small statistics helpers shared by the estimators and experiment drivers.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

impl MeanEstimate {
    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return MeanEstimate {
                mean: f64::NAN,
                std_error: f64::NAN,
                n,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        MeanEstimate {
            mean,
            std_error: (var / n as f64).sqrt(),
            n,
        }
    }
}

/// Linear-interpolated quantile, `q ∈ [0, 1]`. Returns NaN on empty input.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    v[lo] * (1.0 - frac) + v[hi] * frac
}

pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

/// Least-squares fit `log y = log c + a log x`; returns `(a, c)`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let a = sxy / sxx;
    (a, (my - a * mx).exp())
}

/// Least-squares constant `c` in `y ≈ c·f(x)` on the log scale (exponent fixed).
pub fn fit_constant(model: &[f64], ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    let s: f64 = ys.iter().zip(model).map(|(y, m)| (y / m).ln()).sum();
    (s / n).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        let v = [3.0, 1.0, 2.0, 4.0];
        assert_eq!(median(&v), 2.5);
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
        assert!(median(&[]).is_nan());
    }

    #[test]
    fn power_law_recovers_exponent() {
        let xs = [2.0, 3.0, 5.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 1.7 * x.powf(0.5)).collect();
        let (a, c) = fit_power_law(&xs, &ys);
        assert!((a - 0.5).abs() < 1e-12 && (c - 1.7).abs() < 1e-12);
        let model: Vec<f64> = xs.iter().map(|x| x.sqrt()).collect();
        assert!((fit_constant(&model, &ys) - 1.7).abs() < 1e-12);
    }

    #[test]
    fn mean_estimate() {
        let e = MeanEstimate::from_samples(&[1.0, 2.0, 3.0]);
        assert_eq!(e.mean, 2.0);
        assert!((e.std_error - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
