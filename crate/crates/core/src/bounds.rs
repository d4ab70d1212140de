//! Concentration bounds for counting functions and the Bonferroni lower
//! bound mechanism for the Kolmogorov distance.

use std::f64::consts::{E, TAU};

use serde::Serialize;

use crate::counting::{bernoulli_spectrum, exact_tail, poisson_binomial, PoissonBinomialLaw};
use crate::kernel::KernelConfig;
use crate::{Error, Result};

/// Deviation `x` in units of the standard deviation `s_n` of a sum of
/// independent summands bounded by `m_bound`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailBoundInput {
    pub x: f64,
    pub s_n: f64,
    pub m_bound: f64,
}

impl TailBoundInput {
    pub fn new(x: f64, s_n: f64, m_bound: f64) -> Result<Self> {
        for (name, v) in [("x", x), ("s_n", s_n), ("M", m_bound)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { x, s_n, m_bound })
    }
}

/// Bernstein: `P[S − ES > x·s_n] ≤ exp(−min{x²/4, x·s_n/2M})`.
pub fn bernstein_bound(input: &TailBoundInput) -> f64 {
    let exponent = (input.x * input.x / 4.0).min(input.x * input.s_n / (2.0 * input.m_bound));
    (-exponent).exp().clamp(0.0, 1.0)
}

/// Kolmogorov's lower tail bound, kept in log form: for the admissible range
/// `x ≥ 512` the value itself underflows `f64`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KolmogorovLowerBound {
    pub a: f64,
    pub epsilon: f64,
    /// `−(x²/2)(1 + ε)`.
    pub log_value: f64,
    /// `exp(log_value)`, possibly 0 after underflow.
    pub value: f64,
}

/// `P[S − ES > x·s_n] ≥ exp(−(x²/2)(1 + ε))` when `x ≥ 512` and
/// `a = xM/s_n ≤ 1/256`, with `ε = max{64√a, 32√(log x²)/x}`.
/// Returns `None` outside that range.
pub fn kolmogorov_lower_bound(input: &TailBoundInput) -> Option<KolmogorovLowerBound> {
    let x = input.x;
    let a = x * input.m_bound / input.s_n;
    if x < 512.0 || a > 1.0 / 256.0 {
        return None;
    }
    let epsilon = (64.0 * a.sqrt()).max(32.0 * (x * x).ln().sqrt() / x);
    let log_value = -(x * x / 2.0) * (1.0 + epsilon);
    Some(KolmogorovLowerBound {
        a,
        epsilon,
        log_value,
        value: log_value.exp(),
    })
}

/// `2N·exp(−min{x²/(4 log(eN)), x/2})` before clipping.
pub fn union_bound_raw(n: usize, x: f64) -> f64 {
    let log_en = (E * n as f64).ln();
    2.0 * n as f64 * (-(x * x / (4.0 * log_en)).min(x / 2.0)).exp()
}

/// Union bound on `P[max_k |N_{2πk/N} − k| > x]`, clipped to 1.
pub fn union_bound_curve(n: usize, x: f64) -> f64 {
    union_bound_raw(n, x).min(1.0)
}

/// Lower bound on `P[d_K > x]` from `T` disjoint arcs of length `N^{-1/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BonferroniCertificate {
    pub n: usize,
    pub x: f64,
    pub t: usize,
    /// Arc length `N^{-1/2}`.
    pub theta: f64,
    /// `P[μ_N(I) − ν(I) > 2x]` for a single arc.
    pub p: f64,
    /// `TP − T(T−1)P²/2`, clipped to `[0, 1]`.
    pub lower: f64,
}

impl BonferroniCertificate {
    pub fn tp(&self) -> f64 {
        self.t as f64 * self.p
    }

    /// Whether `TP ∈ [1/2, 3/2]`, where the bound is at least 3/8.
    pub fn in_window(&self) -> bool {
        (0.5..=1.5).contains(&self.tp())
    }
}

/// Largest number of disjoint arcs of length `N^{-1/2}`, `⌊2π√N⌋`.
pub fn max_arc_count(n: usize) -> usize {
    (TAU * (n as f64).sqrt()).floor() as usize
}

fn short_arc_law(n: usize) -> Result<PoissonBinomialLaw> {
    let cfg = KernelConfig::new(n)?;
    Ok(poisson_binomial(&bernoulli_spectrum(
        cfg,
        (n as f64).powf(-0.5),
    )?))
}

fn certificate_from(law: &PoissonBinomialLaw, n: usize, x: f64, t: usize) -> BonferroniCertificate {
    let p = exact_tail(law, 2.0 * x * n as f64);
    let tf = t as f64;
    let lower = (tf * p - tf * (tf - 1.0) * p * p / 2.0).clamp(0.0, 1.0);
    BonferroniCertificate {
        n,
        x,
        t,
        theta: (n as f64).powf(-0.5),
        p,
        lower,
    }
}

pub fn bonferroni_certificate(n: usize, x: f64, t: usize) -> Result<BonferroniCertificate> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::invalid(format!("x must be positive, got {x}")));
    }
    if t == 0 || t > max_arc_count(n) {
        return Err(Error::invalid(format!(
            "need 1 ≤ T ≤ {} disjoint arcs of length N^(-1/2), got {t}",
            max_arc_count(n)
        )));
    }
    Ok(certificate_from(&short_arc_law(n)?, n, x, t))
}

/// Bisects for the largest `x` whose single-arc probability still admits a
/// `T ≤ ⌊2π√N⌋` with `TP ∈ [1/2, 3/2]`, then picks `T = ⌈1/(2P)⌉`.
pub fn find_certificate(n: usize) -> Result<BonferroniCertificate> {
    let law = short_arc_law(n)?;
    let t_max = max_arc_count(n);
    if t_max == 0 {
        return Err(Error::invalid("no arc of length N^(-1/2) fits"));
    }
    let target = 1.0 / (2.0 * t_max as f64);
    let nf = n as f64;
    let tail_at = |x: f64| exact_tail(&law, 2.0 * x * nf);

    let mut lo = 1e-12;
    // beyond this no count can exceed mean + 2xN
    let mut hi = (nf - law.mean()) / (2.0 * nf) + 1e-12;
    if tail_at(lo) < target {
        return Err(Error::Numerical(format!(
            "single-arc tail at N = {n} never reaches 1/(2T_max)"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if tail_at(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    let p = tail_at(lo);
    let t = ((1.0 / (2.0 * p)).ceil() as usize).clamp(1, t_max);
    Ok(certificate_from(&law, n, lo, t))
}
