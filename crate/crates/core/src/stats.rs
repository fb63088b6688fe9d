//! Small statistical utilities shared across the workbench: order-stable
//! summation, moments, nearest-rank percentiles, empirical CDFs and
//! Kolmogorov–Smirnov tests.

use statrs::distribution::{ContinuousCDF, Normal};

/// Pairwise (tree) summation. Deterministic for a fixed element order and
/// much better conditioned than a running sum for long accumulations.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

pub fn mean(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    pairwise_sum(values) / values.len() as f64
}

/// Unbiased sample variance (n − 1 denominator).
pub fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len();
    assert!(n >= 2, "sample variance needs at least two values");
    let m = mean(values);
    let sq: Vec<f64> = values.iter().map(|v| (v - m) * (v - m)).collect();
    pairwise_sum(&sq) / (n - 1) as f64
}

pub fn sample_std(values: &[f64]) -> f64 {
    sample_variance(values).sqrt()
}

/// Nearest-rank percentile: the smallest element with cumulative rank
/// ceil(q·n). `q` in (0, 1].
pub fn percentile_nearest_rank(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    assert!(q > 0.0 && q <= 1.0);
    let n = sorted.len();
    let rank = (q * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

/// Right-continuous empirical CDF evaluated as a step curve.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(samples: &[f64]) -> Self {
        assert!(!samples.is_empty(), "empirical CDF of an empty sample set");
        let mut sorted = samples.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite sample"));
        Self { sorted }
    }

    /// F(x) = (number of samples ≤ x) / n.
    pub fn eval(&self, x: f64) -> f64 {
        let count = self.sorted.partition_point(|&v| v <= x);
        count as f64 / self.sorted.len() as f64
    }

    /// The step curve as (x, F(x)) pairs, one per distinct sample.
    pub fn curve(&self) -> Vec<(f64, f64)> {
        let n = self.sorted.len() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, &x) in self.sorted.iter().enumerate() {
            let f = (i + 1) as f64 / n;
            match out.last_mut() {
                Some(last) if last.0 == x => last.1 = f,
                _ => out.push((x, f)),
            }
        }
        out
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }
}

/// One-sample Kolmogorov–Smirnov statistic against a reference CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    assert!(!samples.is_empty());
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite sample"));
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}

/// Asymptotic 5%-level KS critical value, D = 1.3581 / √n.
pub fn ks_critical_5pct(n: usize) -> f64 {
    1.3581 / (n as f64).sqrt()
}

/// Accepts H0 "samples come from the reference CDF" at the 5% level.
pub fn ks_passes_5pct<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> bool {
    ks_statistic(samples, cdf) < ks_critical_5pct(samples.len())
}

pub fn standard_normal_cdf(x: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().cdf(x)
}

/// Φ⁻¹(p) for the standard normal, used for inverse-transform sampling.
pub fn standard_normal_inv_cdf(p: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().inverse_cdf(p)
}

pub fn uniform_cdf(lo: f64, hi: f64) -> impl Fn(f64) -> f64 {
    move |x| ((x - lo) / (hi - lo)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn pairwise_matches_naive_on_small_sets() {
        let v = [1.5, -2.25, 3.0, 0.125, 7.5];
        assert_abs_diff_eq!(pairwise_sum(&v), v.iter().sum::<f64>(), epsilon = 1e-12);
    }

    #[test]
    fn percentile_nearest_rank_is_sort_exact() {
        // Oracle: take the ceil(q·n)-th order statistic directly.
        let mut rng = crate::rng::stream(11, "stats/percentile", 0);
        for n in [1usize, 2, 3, 10, 999, 1000] {
            let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for q in [0.1, 0.25, 0.5, 0.75, 0.9, 1.0] {
                let rank = ((q * n as f64).ceil() as usize).max(1);
                assert_eq!(percentile_nearest_rank(&v, q), v[rank - 1]);
            }
        }
    }

    #[test]
    fn ecdf_single_sample_steps_at_value() {
        let cdf = EmpiricalCdf::new(&[2.5]);
        assert_eq!(cdf.eval(2.4999), 0.0);
        assert_eq!(cdf.eval(2.5), 1.0);
        assert_eq!(cdf.eval(3.0), 1.0);
    }

    #[test]
    fn ecdf_matches_rank_construction() {
        let cdf = EmpiricalCdf::new(&[3.0, 1.0, 2.0]);
        assert_abs_diff_eq!(cdf.eval(2.0), 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(cdf.eval(0.5), 0.0);
        assert_eq!(cdf.eval(3.0), 1.0);
    }

    #[test]
    fn ks_accepts_normal_samples_rejects_shifted() {
        let mut rng = crate::rng::stream(13, "stats/ks", 0);
        let samples: Vec<f64> = (0..5000).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        assert!(ks_passes_5pct(&samples, standard_normal_cdf));
        let shifted: Vec<f64> = samples.iter().map(|x| x + 0.2).collect();
        assert!(!ks_passes_5pct(&shifted, standard_normal_cdf));
    }

    #[test]
    fn normal_inverse_roundtrip() {
        for p in [0.01, 0.2, 0.5, 0.8, 0.99] {
            assert_abs_diff_eq!(standard_normal_cdf(standard_normal_inv_cdf(p)), p, epsilon = 1e-9);
        }
    }
}
