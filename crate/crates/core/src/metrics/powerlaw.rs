//! Power-law fit of degree distributions by log-log least squares.

use super::MetricError;
use crate::graph::DegreeDistribution;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    /// Exponent of `P(k) ~ k^-alpha` (negated regression slope).
    pub alpha: f64,
    pub intercept: f64,
    /// Coefficient of determination on the log-log points.
    pub r_squared: f64,
    pub points: usize,
}

/// Fits `ln P(k) = c − alpha·ln k` over the empirical frequency points with
/// `k ≥ 1` and `P(k) > 0`.
pub fn fit_power_law(dd: &DegreeDistribution) -> Result<PowerLawFit, MetricError> {
    let n = dd.len() as f64;
    let points: Vec<(f64, f64)> = dd
        .frequencies()
        .into_iter()
        .filter(|&(k, _)| k >= 1)
        .map(|(k, c)| (f64::from(k), c as f64 / n))
        .collect();
    fit_power_law_points(&points)
}

/// Fits pre-computed `(k, P(k))` points; entries with `k < 1` or `P(k) <= 0`
/// are ignored.
pub fn fit_power_law_points(points: &[(f64, f64)]) -> Result<PowerLawFit, MetricError> {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(k, p)| k >= 1.0 && p > 0.0)
        .map(|&(k, p)| (k.ln(), p.ln()))
        .collect();
    if xy.len() < 3 {
        return Err(MetricError::DegenerateDistribution(format!(
            "{} distinct positive degree values, need 3",
            xy.len()
        )));
    }
    let m = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / m;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / m;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &xy {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        let ss_res: f64 = xy
            .iter()
            .map(|&(x, y)| {
                let e = y - (intercept + slope * x);
                e * e
            })
            .sum();
        1.0 - ss_res / syy
    };
    Ok(PowerLawFit {
        alpha: -slope,
        intercept,
        r_squared,
        points: xy.len(),
    })
}
