//! Distances between a sample's empirical measure `μ_N` and the uniform
//! measure `ν` on the circle, computed exactly from the sorted angles.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::sampler::EigenangleSample;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub n: usize,
    /// Kolmogorov distance `sup_θ |N_θ/N − θ/2π|`.
    pub d_k: f64,
    /// Wasserstein-1 distance with arc-length cost, in radians.
    pub w1: f64,
    /// Largest circular spacing, in radians.
    pub max_gap: f64,
    /// `(1/N) max_k |N_{2πk/N} − k|`.
    pub grid_sup: f64,
}

pub fn distance_report(s: &EigenangleSample) -> DistanceReport {
    DistanceReport {
        n: s.len(),
        d_k: kolmogorov_distance(s),
        w1: w1_distance(s),
        max_gap: max_spacing(s),
        grid_sup: grid_sup(s),
    }
}

/// The supremum is attained at a jump: on either side of the j-th atom the
/// CDF difference is `j/N − θ_(j)/2π` and `θ_(j)/2π − (j−1)/N`.
pub fn kolmogorov_distance(s: &EigenangleSample) -> f64 {
    let n = s.len() as f64;
    s.angles()
        .iter()
        .enumerate()
        .map(|(i, &theta)| {
            let u = theta / TAU;
            let j = (i + 1) as f64;
            (j / n - u).max(u - (j - 1.0) / n)
        })
        .fold(0.0, f64::max)
}

/// Circular W₁: `min_c ∫₀^{2π} |F_N(θ) − θ/2π − c| dθ`.
///
/// `D(θ) = F_N(θ) − θ/2π` is linear with slope `−1/2π` between atoms, so
/// the image of `dθ` under `D` has density `2π` on a union of intervals.
/// The optimal `c` is the median of that image and the integral is summed
/// in closed form over the intervals.
pub fn w1_distance(s: &EigenangleSample) -> f64 {
    let angles = s.angles();
    let n = angles.len();
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    // value ranges [lo, hi] of D on each stretch between consecutive atoms
    let mut ranges = Vec::with_capacity(n + 1);
    let mut left = 0.0;
    for (j, &right) in angles.iter().chain(std::iter::once(&TAU)).enumerate() {
        let level = j as f64 / nf;
        ranges.push((level - right / TAU, level - left / TAU));
        left = right;
    }

    let c = image_median(&ranges);
    TAU * ranges
        .iter()
        .map(|&(lo, hi)| abs_integral(lo, hi, c))
        .sum::<f64>()
}

/// Median of the union of intervals weighted by length; total length is 1.
fn image_median(ranges: &[(f64, f64)]) -> f64 {
    let total: f64 = ranges.iter().map(|(lo, hi)| hi - lo).sum();
    let half = total / 2.0;
    let mut events: Vec<(f64, f64)> = ranges
        .iter()
        .filter(|(lo, hi)| hi > lo)
        .flat_map(|&(lo, hi)| [(lo, 1.0), (hi, -1.0)])
        .collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut mass = 0.0;
    let mut slope = 0.0;
    let mut prev = events.first().map_or(0.0, |e| e.0);
    for &(value, delta) in &events {
        let gained = slope * (value - prev);
        if slope > 0.0 && mass + gained >= half {
            return prev + (half - mass) / slope;
        }
        mass += gained;
        slope += delta;
        prev = value;
    }
    prev
}

/// `∫_lo^hi |v − c| dv`.
fn abs_integral(lo: f64, hi: f64, c: f64) -> f64 {
    let len = hi - lo;
    if c <= lo {
        len * ((lo + hi) / 2.0 - c)
    } else if c >= hi {
        len * (c - (lo + hi) / 2.0)
    } else {
        ((c - lo).powi(2) + (hi - c).powi(2)) / 2.0
    }
}

/// Largest gap between circularly adjacent angles.
pub fn max_spacing(s: &EigenangleSample) -> f64 {
    s.spacings().into_iter().fold(0.0, f64::max)
}

/// `(1/N) max_{1≤k≤N} |#{j : θ_j ≤ 2πk/N} − k|`.
pub fn grid_sup(s: &EigenangleSample) -> f64 {
    let n = s.len();
    if n == 0 {
        return 0.0;
    }
    let angles = s.angles();
    let mut count = 0;
    let mut worst = 0usize;
    for k in 1..=n {
        let t = TAU * k as f64 / n as f64;
        while count < n && angles[count] <= t {
            count += 1;
        }
        worst = worst.max(count.abs_diff(k));
    }
    worst as f64 / n as f64
}
