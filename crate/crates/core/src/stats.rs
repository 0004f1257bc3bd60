//! Block averaging, compensated sums and the two-sample KS test.

use crate::error::{Error, Result};

pub const DEFAULT_BLOCKS: usize = 16;

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn mean(values: &[f64]) -> f64 {
    compensated_sum(values.iter().copied()) / values.len() as f64
}

/// Unbiased sample variance.
pub fn variance(values: &[f64]) -> f64 {
    let m = mean(values);
    compensated_sum(values.iter().map(|v| (v - m) * (v - m))) / (values.len() as f64 - 1.0)
}

/// Contiguous block boundaries `[b n / nb, (b+1) n / nb)`.
pub fn block_ranges(n: usize, n_blocks: usize) -> Vec<std::ops::Range<usize>> {
    (0..n_blocks)
        .map(|b| b * n / n_blocks..(b + 1) * n / n_blocks)
        .collect()
}

/// Mean and standard error from per-block means.
pub fn mean_and_error_from_blocks(block_means: &[f64], block_sizes: &[usize]) -> (f64, f64) {
    let total: usize = block_sizes.iter().sum();
    let mean = compensated_sum(
        block_means
            .iter()
            .zip(block_sizes)
            .map(|(m, &s)| m * s as f64),
    ) / total as f64;
    let nb = block_means.len() as f64;
    let var = compensated_sum(block_means.iter().map(|m| (m - mean) * (m - mean))) / (nb - 1.0);
    (mean, (var / nb).sqrt())
}

/// Block-averaged mean and standard error with `n_blocks` contiguous blocks.
pub fn block_mean_error(samples: &[f64], n_blocks: usize) -> Result<(f64, f64)> {
    if n_blocks < 2 || samples.len() < 2 * n_blocks {
        return Err(Error::InsufficientSamples {
            needed: 2 * n_blocks.max(2),
            got: samples.len(),
        });
    }
    let ranges = block_ranges(samples.len(), n_blocks);
    let means: Vec<f64> = ranges.iter().map(|r| mean(&samples[r.clone()])).collect();
    let sizes: Vec<usize> = ranges.iter().map(|r| r.len()).collect();
    Ok(mean_and_error_from_blocks(&means, &sizes))
}

/// 16-block standard error of the mean. Needs at least 32 samples.
pub fn block_error(samples: &[f64]) -> Result<f64> {
    block_mean_error(samples, DEFAULT_BLOCKS).map(|(_, se)| se)
}

/// Per-time-point block errors for `samples[i][t]` (sample-major).
pub fn block_errors(samples: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n_times = samples.first().map_or(0, Vec::len);
    (0..n_times)
        .map(|t| {
            let column: Vec<f64> = samples.iter().map(|s| s[t]).collect();
            block_error(&column)
        })
        .collect()
}

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n1, n2) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n1 - j as f64 / n2).abs());
    }
    let ne = (n1 * n2 / (n1 + n2)).sqrt();
    let lambda = (ne + 0.12 + 0.11 / ne) * d;
    (d, kolmogorov_q(lambda))
}

fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = sign * (-2.0 * kf * kf * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};
    use rand_distr::{Distribution, StandardNormal};

    fn gaussians(n: usize, index: u64) -> Vec<f64> {
        let mut rng = stream(11, Purpose::User, index);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn constant_samples_have_zero_error() {
        assert_eq!(block_error(&[3.5; 64]).unwrap(), 0.0);
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(
            block_error(&[1.0; 31]),
            Err(Error::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn iid_error_matches_inverse_sqrt_n() {
        let se = block_error(&gaussians(1600, 0)).unwrap();
        assert!((se - 0.025).abs() <= 0.3 * 0.025, "se = {se}");
        for (i, n) in [400usize, 1600, 6400].into_iter().enumerate() {
            let se = block_error(&gaussians(n, 10 + i as u64)).unwrap();
            let oracle = 1.0 / (n as f64).sqrt();
            assert!((se / oracle - 1.0).abs() <= 0.3, "n = {n}, se = {se}");
        }
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
    }

    #[test]
    fn ks_same_and_shifted() {
        let a = gaussians(4000, 1);
        let b = gaussians(4000, 2);
        let (_, p) = ks_two_sample(&a, &b);
        assert!(p > 0.01);
        let shifted: Vec<f64> = b.iter().map(|v| v + 0.3).collect();
        let (_, p) = ks_two_sample(&a, &shifted);
        assert!(p < 1e-6);
    }
}
