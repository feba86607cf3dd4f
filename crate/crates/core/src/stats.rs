//! Small regression helpers for the sweep analyses (Arrhenius slopes,
//! low-temperature scaling laws).

/// Ordinary least squares y = a x + b; returns (a, b, r_squared).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = y.iter().map(|v| (v - mean_y).powi(2)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (slope, intercept, r2)
}

/// Compares k0 + c T^2 against k0 + c T on raw values.
#[derive(Debug, Clone, Copy)]
pub struct ModelComparison {
    pub rss_linear: f64,
    pub rss_quadratic: f64,
    /// AIC difference (linear minus quadratic); positive prefers quadratic.
    pub delta_aic: f64,
}

pub fn quadratic_vs_linear(t: &[f64], k: &[f64]) -> ModelComparison {
    let t2: Vec<f64> = t.iter().map(|v| v * v).collect();
    let (_, _, rss_q) = fit_rss(&t2, k);
    let (_, _, rss_l) = fit_rss(t, k);
    let n = t.len() as f64;
    // both models have two parameters, so AIC reduces to the RSS ratio
    let delta_aic = n * (rss_l / rss_q).ln();
    ModelComparison {
        rss_linear: rss_l,
        rss_quadratic: rss_q,
        delta_aic,
    }
}

fn fit_rss(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let (a, b, _) = linear_fit(x, y);
    let rss = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (yi - a * xi - b).powi(2))
        .sum();
    (a, b, rss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [3.0, 5.0, 7.0, 9.0];
        let (a, b, r2) = linear_fit(&x, &y);
        assert_relative_eq!(a, 2.0, max_relative = 1e-14);
        assert_relative_eq!(b, 1.0, max_relative = 1e-13);
        assert_relative_eq!(r2, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn quadratic_data_prefers_quadratic_model() {
        let t: Vec<f64> = (1..=10).map(|i| 0.05 * i as f64).collect();
        let k: Vec<f64> = t.iter().map(|v| 1.0 + 3.0 * v * v).collect();
        let cmp = quadratic_vs_linear(&t, &k);
        assert!(cmp.delta_aic > 0.0);
        assert!(cmp.rss_linear > 4.0 * cmp.rss_quadratic);
    }
}
