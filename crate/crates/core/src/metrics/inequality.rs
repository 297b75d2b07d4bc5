//! Gini index and Lorenz curves.

/// Gini index of non-negative values, `Σ|xi − xj| / (2 n² μ)`, computed from
/// the sorted form `2 Σ i·x(i) / (n Σx) − (n + 1)/n`.
///
/// Returns `None` for an empty slice or negative entries; an all-zero vector
/// has Gini 0.
pub fn gini(values: &[f64]) -> Option<f64> {
    if values.is_empty() || values.iter().any(|&v| v < 0.0 || v.is_nan()) {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let total: f64 = sorted.iter().sum();
    if total == 0.0 {
        return Some(0.0);
    }
    // Σ (2i − n − 1) x_(i), folded over mirrored pairs so equal values
    // cancel exactly instead of through a difference of large sums.
    let n = sorted.len();
    let folded: f64 = (0..n / 2)
        .map(|i| (n - 1 - 2 * i) as f64 * (sorted[n - 1 - i] - sorted[i]))
        .sum();
    Some(folded / (n as f64 * total))
}

/// Lorenz curve points `(i/n, share of the i smallest values)` for
/// `i = 0..=n`, starting at `(0, 0)` and ending at `(1, 1)`.
///
/// An all-zero vector yields the diagonal.
pub fn lorenz_curve(values: &[f64]) -> Option<Vec<(f64, f64)>> {
    if values.is_empty() || values.iter().any(|&v| v < 0.0 || v.is_nan()) {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let total: f64 = sorted.iter().sum();
    let mut out = Vec::with_capacity(n + 1);
    out.push((0.0, 0.0));
    let mut acc = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        acc += x;
        let share = if total == 0.0 {
            (i + 1) as f64 / n as f64
        } else if i + 1 == n {
            1.0
        } else {
            acc / total
        };
        out.push(((i + 1) as f64 / n as f64, share));
    }
    Some(out)
}

/// Linear interpolation of a Lorenz curve at `points + 1` evenly spaced
/// population fractions.
pub fn lorenz_resample(curve: &[(f64, f64)], points: usize) -> Vec<f64> {
    (0..=points)
        .map(|i| {
            let x = i as f64 / points as f64;
            let j = curve.partition_point(|&(cx, _)| cx < x);
            if j == 0 {
                return curve[0].1;
            }
            if j >= curve.len() {
                return curve[curve.len() - 1].1;
            }
            let (x0, y0) = curve[j - 1];
            let (x1, y1) = curve[j];
            if x1 == x0 {
                y1
            } else {
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        })
        .collect()
}
