//! Two-sample distribution comparisons on empirical samples.

use super::StabilityError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    /// Largest gap between the two empirical CDFs.
    pub statistic: f64,
    /// Asymptotic two-sided p-value.
    pub p_value: f64,
}

fn sorted(xs: &[f64]) -> Result<Vec<f64>, StabilityError> {
    if xs.is_empty() {
        return Err(StabilityError::EmptySample);
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Walks the merged support of two sorted samples, calling `step` with the
/// number of elements of each sample `<= x` and the distance to the next
/// support point (zero after the last).
fn sweep(a: &[f64], b: &[f64], mut step: impl FnMut(u64, u64, f64, f64)) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        let next = match (a.get(i), b.get(j)) {
            (Some(&p), Some(&q)) => Some(p.min(q)),
            (Some(&p), None) => Some(p),
            (None, Some(&q)) => Some(q),
            (None, None) => None,
        };
        step(i as u64, j as u64, x, next.map_or(x, |y| y));
    }
}

/// Survival function of the Kolmogorov distribution,
/// `2 Σ_{k≥1} (−1)^{k−1} exp(−2k²λ²)`, clamped to `[0, 1]`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    // Below 0.2 the true value differs from 1 by less than 1e-12 and the
    // alternating series converges slowly.
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=1000u32 {
        let kf = f64::from(k);
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov test with the asymptotic p-value
/// (`λ = D·√(nm/(n+m))`).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult, StabilityError> {
    let (a, b) = (sorted(a)?, sorted(b)?);
    let (n, m) = (a.len() as u64, b.len() as u64);
    let mut gap = 0u64;
    sweep(&a, &b, |ca, cb, _, _| {
        gap = gap.max((ca * m).abs_diff(cb * n));
    });
    let statistic = gap as f64 / (n * m) as f64;
    let (nf, mf) = (n as f64, m as f64);
    let lambda = statistic * (nf * mf / (nf + mf)).sqrt();
    Ok(KsResult { statistic, p_value: kolmogorov_sf(lambda) })
}

/// Wasserstein-1 distance `∫ |F_a − F_b| dx` between empirical distributions.
///
/// The CDF gaps are accumulated as exact integer count differences; for
/// integer-valued samples the whole integral is exact before the final
/// division, so equal-size samples give exactly the mean absolute difference
/// of their order statistics.
pub fn wasserstein1(a: &[f64], b: &[f64]) -> Result<f64, StabilityError> {
    let (a, b) = (sorted(a)?, sorted(b)?);
    let (n, m) = (a.len() as u64, b.len() as u64);
    let integral = a.iter().chain(&b).all(|x| x.fract() == 0.0 && x.abs() < 2f64.powi(53));
    if integral {
        let mut total: u128 = 0;
        sweep(&a, &b, |ca, cb, x, next| {
            let width = (next - x) as u128;
            total += u128::from((ca * m).abs_diff(cb * n)) * width;
        });
        Ok(total as f64 / (n as f64 * m as f64))
    } else {
        let mut total = 0.0;
        sweep(&a, &b, |ca, cb, x, next| {
            total += (ca * m).abs_diff(cb * n) as f64 * (next - x);
        });
        Ok(total / (n as f64 * m as f64))
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn ks_examples() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let r = ks_two_sample(&a, &a).unwrap();
        assert_eq!((r.statistic, r.p_value), (0.0, 1.0));
        let r = ks_two_sample(&a, &[5.0, 6.0, 7.0, 8.0]).unwrap();
        assert_eq!(r.statistic, 1.0);
        assert!(r.p_value < 0.05);
        assert_eq!(ks_two_sample(&[], &a), Err(StabilityError::EmptySample));
    }

    #[test]
    fn kolmogorov_reference_values() {
        // Q(1.36) ≈ 0.049 is the textbook 5% critical value.
        assert!((kolmogorov_sf(1.358) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_sf(1.0) - 0.2700).abs() < 1e-4);
        assert!(kolmogorov_sf(5.0) < 1e-20);
    }

    #[test]
    fn wasserstein_examples() {
        assert_eq!(wasserstein1(&[3.0, 1.0], &[1.0, 3.0]).unwrap(), 0.0);
        assert_eq!(wasserstein1(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(wasserstein1(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap(), 1.0);
        // Unequal sizes: {0} vs {0, 2} has CDF gap 1/2 on [0, 2).
        assert_eq!(wasserstein1(&[0.0], &[0.0, 2.0]).unwrap(), 1.0);
        assert!((wasserstein1(&[0.5], &[1.75]).unwrap() - 1.25).abs() < 1e-15);
    }

    /// Fraction of label permutations with a statistic at least as large.
    fn permutation_p(a: &[f64], b: &[f64], rounds: usize, seed: u64) -> f64 {
        let observed = ks_two_sample(a, b).unwrap().statistic;
        let mut pool: Vec<f64> = a.iter().chain(b).copied().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hits = (0..rounds)
            .filter(|_| {
                pool.shuffle(&mut rng);
                let (x, y) = pool.split_at(a.len());
                ks_two_sample(x, y).unwrap().statistic >= observed - 1e-12
            })
            .count();
        hits as f64 / rounds as f64
    }

    #[test]
    fn p_value_tracks_permutation_test() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for shift in [0.0, 0.15, 0.3] {
            let a: Vec<f64> = (0..200).map(|_| rng.gen::<f64>()).collect();
            let b: Vec<f64> = (0..200).map(|_| rng.gen::<f64>() + shift).collect();
            let p = ks_two_sample(&a, &b).unwrap().p_value;
            let oracle = permutation_p(&a, &b, 4000, 1);
            assert!((p - oracle).abs() < 0.03, "shift {shift}: {p} vs {oracle}");
        }
    }

    fn int_sample() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec((0u32..50).prop_map(f64::from), 12)
    }

    proptest! {
        #[test]
        fn ks_is_symmetric_and_bounded(a in int_sample(), b in int_sample()) {
            let ab = ks_two_sample(&a, &b).unwrap();
            let ba = ks_two_sample(&b, &a).unwrap();
            prop_assert_eq!(ab, ba);
            prop_assert!((0.0..=1.0).contains(&ab.statistic));
            prop_assert!((0.0..=1.0).contains(&ab.p_value));
            prop_assert_eq!(ks_two_sample(&a, &a).unwrap().statistic, 0.0);
        }

        #[test]
        fn wasserstein_is_a_metric(a in int_sample(), b in int_sample(), c in int_sample()) {
            let ab = wasserstein1(&a, &b).unwrap();
            prop_assert_eq!(ab, wasserstein1(&b, &a).unwrap());
            prop_assert_eq!(wasserstein1(&a, &a).unwrap(), 0.0);
            let ac = wasserstein1(&a, &c).unwrap();
            let cb = wasserstein1(&c, &b).unwrap();
            prop_assert!(ab <= ac + cb + 1e-12);
        }

        #[test]
        fn wasserstein_matches_order_statistics(a in int_sample(), b in int_sample()) {
            let (mut x, mut y) = (a.clone(), b.clone());
            x.sort_by(f64::total_cmp);
            y.sort_by(f64::total_cmp);
            let closed = x.iter().zip(&y).map(|(p, q)| (p - q).abs()).sum::<f64>() / x.len() as f64;
            prop_assert_eq!(wasserstein1(&a, &b).unwrap(), closed);
        }

        #[test]
        fn ks_p_anti_monotone_in_d(d1 in 0.0f64..1.0, d2 in 0.0f64..1.0) {
            let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
            let scale = (100.0f64 * 100.0 / 200.0).sqrt();
            prop_assert!(kolmogorov_sf(lo * scale) >= kolmogorov_sf(hi * scale));
        }
    }
}
