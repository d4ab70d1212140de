#![allow(dead_code)]

use std::f64::consts::TAU;

use cuelab::counting::{bernoulli_spectrum, poisson_binomial, PoissonBinomialLaw};
use cuelab::KernelConfig;

/// Upper 0.001 quantiles of the chi-squared distribution, df = 1..=12.
pub const CHI2_CRIT_001: [f64; 12] = [
    10.828, 13.816, 16.266, 18.467, 20.515, 22.458, 24.322, 26.124, 27.877, 29.588, 31.264, 32.909,
];

/// Asymptotic one-sample Kolmogorov–Smirnov critical value at α = 0.001.
pub fn ks_crit_001(n: usize) -> f64 {
    1.949_47 / (n as f64).sqrt()
}

pub fn exact_law(n: usize, theta: f64) -> PoissonBinomialLaw {
    poisson_binomial(&bernoulli_spectrum(KernelConfig::new(n).unwrap(), theta).unwrap())
}

/// Merges sparse trailing and leading categories so each pooled cell has at
/// least `min_count` observations across both samples.
fn pool(a: &[u64], b: &[u64], min_count: u64) -> (Vec<u64>, Vec<u64>) {
    let mut pa = Vec::new();
    let mut pb = Vec::new();
    let (mut ca, mut cb) = (0, 0);
    for (x, y) in a.iter().zip(b) {
        ca += x;
        cb += y;
        if ca + cb >= min_count {
            pa.push(ca);
            pb.push(cb);
            ca = 0;
            cb = 0;
        }
    }
    if ca + cb > 0 {
        match (pa.last_mut(), pb.last_mut()) {
            (Some(la), Some(lb)) => {
                *la += ca;
                *lb += cb;
            }
            _ => {
                pa.push(ca);
                pb.push(cb);
            }
        }
    }
    (pa, pb)
}

/// Two-sample chi-squared homogeneity test on category counts.
/// Returns `(statistic, degrees of freedom)`.
pub fn chi2_two_sample(a: &[u64], b: &[u64]) -> (f64, usize) {
    let (a, b) = pool(a, b, 20);
    let n1: u64 = a.iter().sum();
    let n2: u64 = b.iter().sum();
    let (n1, n2) = (n1 as f64, n2 as f64);
    let k1 = (n2 / n1).sqrt();
    let k2 = (n1 / n2).sqrt();
    let stat = a
        .iter()
        .zip(&b)
        .map(|(&x, &y)| {
            let (x, y) = (x as f64, y as f64);
            (k1 * x - k2 * y).powi(2) / (x + y)
        })
        .sum();
    (stat, a.len().saturating_sub(1))
}

pub fn chi2_passes(a: &[u64], b: &[u64]) -> bool {
    let (stat, df) = chi2_two_sample(a, b);
    df == 0 || stat < CHI2_CRIT_001[df - 1]
}

/// Counts of `N_θ` (points in `[0, θ)`) over a set of samples.
pub fn count_histogram<'a>(
    samples: impl Iterator<Item = &'a cuelab::EigenangleSample>,
    n: usize,
    theta: f64,
) -> Vec<u64> {
    let mut h = vec![0u64; n + 1];
    for s in samples {
        h[s.count_below(theta)] += 1;
    }
    h
}

/// Every category within `z` standard errors of the exact pmf.
pub fn pmf_within(hist: &[u64], pmf: &[f64], z: f64) -> Result<(), String> {
    let total: u64 = hist.iter().sum();
    let m = total as f64;
    for (k, (&c, &p)) in hist.iter().zip(pmf).enumerate() {
        let freq = c as f64 / m;
        let se = (p * (1.0 - p) / m).sqrt();
        if (freq - p).abs() > z * se {
            return Err(format!(
                "category {k}: freq {freq:.5} vs exact {p:.5} (se {se:.2e})"
            ));
        }
    }
    Ok(())
}

pub fn uniform_ks(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    values
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let u = x / TAU;
            (u - i as f64 / n).abs().max(((i + 1) as f64 / n - u).abs())
        })
        .fold(0.0, f64::max)
}
