//! Exact finite-N laws of eigenangle counting functions.
//!
//! The number of points in an arc `A` is distributed as a sum of independent
//! Bernoulli variables whose success probabilities are the eigenvalues of the
//! arc-restricted kernel. Everything here is deterministic.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::kernel::{arc_kernel, arc_kernel_on, Arc, ArcKernelMatrix, KernelConfig};
use crate::linalg::{determinant, symmetric_jacobi};
use crate::{Error, Result};

/// Eigenvalues within this distance outside `[0, 1]` are clamped; anything
/// further out is reported as an error.
pub const CLAMP_TOL: f64 = 1e-8;

/// Largest N accepted by [`joint_count_law`].
pub const JOINT_LAW_MAX_N: usize = 16;

const HERMITIAN_MAX_DIM: usize = 2048;

/// Bernoulli parameters of a counting function, sorted descending.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BernoulliSpectrum {
    params: Vec<f64>,
    source_arc: f64,
}

impl BernoulliSpectrum {
    /// Builds a spectrum from explicit parameters (each must lie in `[0, 1]`).
    pub fn from_params(mut params: Vec<f64>, source_arc: f64) -> Result<Self> {
        if let Some(&bad) = params.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::SpectrumOutOfRange { value: bad });
        }
        params.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { params, source_arc })
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn source_arc(&self) -> f64 {
        self.source_arc
    }

    pub fn sum(&self) -> f64 {
        self.params.iter().sum()
    }
}

/// Eigenvalues of an arc kernel matrix as Bernoulli parameters.
///
/// The arc kernel on `[a, a + θ)` equals `D S Dᴴ` with `D = diag(e^{ij(a + θ/2)})`
/// and `S` real symmetric Toeplitz, so the phases are stripped first and the
/// cyclic Jacobi iteration runs in real arithmetic.
pub fn hermitian_eigenvalues(m: &ArcKernelMatrix) -> Result<BernoulliSpectrum> {
    let n = m.dimension();
    if n > HERMITIAN_MAX_DIM {
        return Err(Error::invalid(format!(
            "dimension {n} exceeds the supported maximum {HERMITIAN_MAX_DIM}"
        )));
    }
    let mid = m.arc().start() + m.arc_length() / 2.0;
    let mut real = vec![0.0; n * n];
    for j in 0..n {
        for k in 0..n {
            let phase = Complex64::cis(-(j as f64 - k as f64) * mid);
            real[j * n + k] = (m.get(j, k) * phase).re;
        }
    }
    let raw = symmetric_jacobi(real, n)?;
    let mut params = Vec::with_capacity(n);
    for value in raw {
        if !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&value) {
            return Err(Error::SpectrumOutOfRange { value });
        }
        params.push(value.clamp(0.0, 1.0));
    }
    params.sort_by(|a, b| b.total_cmp(a));
    Ok(BernoulliSpectrum {
        params,
        source_arc: m.arc_length(),
    })
}

/// Bernoulli parameters of `N_θ`, the count in `[0, θ)`.
pub fn bernoulli_spectrum(cfg: KernelConfig, theta: f64) -> Result<BernoulliSpectrum> {
    hermitian_eigenvalues(&arc_kernel(cfg, theta)?)
}

/// Law of a sum of independent Bernoulli variables.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoissonBinomialLaw {
    pmf: Vec<f64>,
    mean: f64,
    variance: f64,
}

impl PoissonBinomialLaw {
    /// Probabilities over `{0, …, N}`.
    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Closed-form mean `Σλ`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Closed-form variance `Σλ(1 − λ)`.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn support_max(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn pmf_mean(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    pub fn pmf_variance(&self) -> f64 {
        let m = self.pmf_mean();
        self.pmf
            .iter()
            .enumerate()
            .map(|(k, p)| (k as f64 - m).powi(2) * p)
            .sum()
    }

    /// `P[X ≥ k]`.
    pub fn survival(&self, k: usize) -> f64 {
        self.pmf.iter().skip(k).sum()
    }
}

/// Exact pmf by iterated convolution with each Bernoulli factor.
pub fn poisson_binomial(spec: &BernoulliSpectrum) -> PoissonBinomialLaw {
    let mut pmf = Vec::with_capacity(spec.params.len() + 1);
    pmf.push(1.0);
    for &p in &spec.params {
        pmf.push(0.0);
        for k in (1..pmf.len()).rev() {
            pmf[k] = pmf[k] * (1.0 - p) + pmf[k - 1] * p;
        }
        pmf[0] *= 1.0 - p;
    }
    let mean = spec.params.iter().sum();
    let variance = spec.params.iter().map(|p| p * (1.0 - p)).sum();
    PoissonBinomialLaw {
        pmf,
        mean,
        variance,
    }
}

/// `P[X − E X > t] = Σ_{k > mean + t} pmf(k)`.
pub fn exact_tail(law: &PoissonBinomialLaw, t: f64) -> f64 {
    let threshold = law.mean + t;
    law.pmf
        .iter()
        .enumerate()
        .filter(|(k, _)| *k as f64 > threshold)
        .map(|(_, p)| p)
        .sum()
}

/// Exact variance of `N_θ` against the known upper and two-sided bounds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceBoundsCheck {
    pub n: usize,
    pub theta: f64,
    pub variance: f64,
    /// `log(eN)`, valid for every θ.
    pub global_upper: f64,
    /// `(1/3π²)·log(2Nθ/3π)`, only when `3π/2N ≤ θ ≤ π/2`.
    pub lower: Option<f64>,
    /// `(1/2)·log(e^{3/2}Nθ)`, only when `3π/2N ≤ θ ≤ π/2`.
    pub upper: Option<f64>,
    pub global_upper_ok: bool,
    pub two_sided_ok: Option<bool>,
}

impl VarianceBoundsCheck {
    pub fn all_satisfied(&self) -> bool {
        self.global_upper_ok && self.two_sided_ok.unwrap_or(true)
    }
}

const BOUND_SLACK: f64 = 1e-10;

pub fn variance_bounds_check(n: usize, theta: f64) -> Result<VarianceBoundsCheck> {
    let cfg = KernelConfig::new(n)?;
    let law = poisson_binomial(&bernoulli_spectrum(cfg, theta)?);
    Ok(variance_bounds_from(n, theta, law.variance()))
}

/// Evaluates the bounds for an already computed variance.
pub fn variance_bounds_from(n: usize, theta: f64, variance: f64) -> VarianceBoundsCheck {
    let nf = n as f64;
    let global_upper = (std::f64::consts::E * nf).ln();
    let in_range = theta >= 3.0 * PI / (2.0 * nf) && theta <= PI / 2.0;
    let (lower, upper) = if in_range {
        (
            Some((2.0 * nf * theta / (3.0 * PI)).ln() / (3.0 * PI * PI)),
            Some(0.5 * (1.5f64.exp() * nf * theta).ln()),
        )
    } else {
        (None, None)
    };
    let two_sided_ok = match (lower, upper) {
        (Some(lo), Some(hi)) => Some(variance >= lo - BOUND_SLACK && variance <= hi + BOUND_SLACK),
        _ => None,
    };
    VarianceBoundsCheck {
        n,
        theta,
        variance,
        global_upper,
        lower,
        upper,
        global_upper_ok: variance <= global_upper + BOUND_SLACK,
        two_sided_ok,
    }
}

/// Joint law of the counts in two disjoint arcs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointCountLaw {
    n: usize,
    arc_a: (f64, f64),
    arc_b: (f64, f64),
    /// `(N+1) × (N+1)`, row index is the count in `A`.
    joint_pmf: Vec<f64>,
}

impl JointCountLaw {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `(start, length)` of the two arcs.
    pub fn arcs(&self) -> ((f64, f64), (f64, f64)) {
        (self.arc_a, self.arc_b)
    }

    pub fn joint_pmf(&self) -> &[f64] {
        &self.joint_pmf
    }

    #[inline]
    pub fn prob(&self, count_a: usize, count_b: usize) -> f64 {
        self.joint_pmf[count_a * (self.n + 1) + count_b]
    }

    pub fn marginal_a(&self) -> Vec<f64> {
        let m = self.n + 1;
        (0..m)
            .map(|a| (0..m).map(|b| self.prob(a, b)).sum())
            .collect()
    }

    pub fn marginal_b(&self) -> Vec<f64> {
        let m = self.n + 1;
        (0..m)
            .map(|b| (0..m).map(|a| self.prob(a, b)).sum())
            .collect()
    }
}

/// Joint pmf of `(N_A, N_B)` from the generating function
/// `E[z₁^{N_A} z₂^{N_B}] = det(I + (z₁−1)M_A + (z₂−1)M_B)`, evaluated on the
/// `(N+1)`-th roots of unity and inverted by a two-dimensional DFT.
pub fn joint_count_law(cfg: KernelConfig, a: Arc, b: Arc) -> Result<JointCountLaw> {
    let n = cfg.matrix_size();
    if n > JOINT_LAW_MAX_N {
        return Err(Error::invalid(format!(
            "joint count law supports N ≤ {JOINT_LAW_MAX_N}, got {n}"
        )));
    }
    if !a.is_disjoint(&b) {
        return Err(Error::invalid(
            "arcs for a joint count law must be disjoint",
        ));
    }
    let ma = arc_kernel_on(cfg, a)?;
    let mb = arc_kernel_on(cfg, b)?;
    let m = n + 1;
    let roots: Vec<Complex64> = (0..m)
        .map(|r| Complex64::cis(TAU * r as f64 / m as f64))
        .collect();

    let mut pgf = vec![Complex64::new(0.0, 0.0); m * m];
    let mut work = vec![Complex64::new(0.0, 0.0); n * n];
    for r in 0..m {
        for s in 0..m {
            let wa = roots[r] - 1.0;
            let wb = roots[s] - 1.0;
            for (idx, w) in work.iter_mut().enumerate() {
                let eye = if idx / n == idx % n { 1.0 } else { 0.0 };
                *w = wa * ma.entries()[idx] + wb * mb.entries()[idx] + eye;
            }
            pgf[r * m + s] = determinant(work.clone(), n);
        }
    }

    let scale = 1.0 / (m * m) as f64;
    let mut joint_pmf = vec![0.0; m * m];
    for ca in 0..m {
        for cb in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..m {
                for s in 0..m {
                    // ω^{−(r·ca + s·cb)}
                    let idx = (m - (r * ca + s * cb) % m) % m;
                    acc += pgf[r * m + s] * roots[idx];
                }
            }
            joint_pmf[ca * m + cb] = acc.re * scale;
        }
    }
    Ok(JointCountLaw {
        n,
        arc_a: (a.start(), a.length()),
        arc_b: (b.start(), b.length()),
        joint_pmf,
    })
}

/// `max_{s,t} P[N_A ≥ s, N_B ≥ t] − P[N_A ≥ s]·P[N_B ≥ t]`.
///
/// Negative association of the eigenangle process says this is `≤ 0`.
pub fn negative_association_check(law: &JointCountLaw) -> f64 {
    let m = law.n + 1;
    // joint survival via suffix sums
    let mut surv = vec![0.0; (m + 1) * (m + 1)];
    for a in (0..m).rev() {
        for b in (0..m).rev() {
            surv[a * (m + 1) + b] =
                law.prob(a, b) + surv[(a + 1) * (m + 1) + b] + surv[a * (m + 1) + b + 1]
                    - surv[(a + 1) * (m + 1) + b + 1];
        }
    }
    let mut worst = f64::NEG_INFINITY;
    for s in 0..m {
        for t in 0..m {
            let joint = surv[s * (m + 1) + t];
            let pa = surv[s * (m + 1)];
            let pb = surv[t];
            worst = worst.max(joint - pa * pb);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(n: usize) -> KernelConfig {
        KernelConfig::new(n).unwrap()
    }

    fn law_of(n: usize, theta: f64) -> PoissonBinomialLaw {
        poisson_binomial(&bernoulli_spectrum(cfg(n), theta).unwrap())
    }

    #[test]
    fn identity_spectrum() {
        let spec = bernoulli_spectrum(cfg(7), TAU).unwrap();
        assert!(spec.params().iter().all(|&p| p == 1.0));
    }

    #[test]
    fn two_point_spectrum() {
        let spec = bernoulli_spectrum(cfg(2), PI).unwrap();
        assert_abs_diff_eq!(spec.params()[0], 0.5 + 1.0 / PI, epsilon = 1e-14);
        assert_abs_diff_eq!(spec.params()[1], 0.5 - 1.0 / PI, epsilon = 1e-14);
    }

    #[test]
    fn phase_reduction_matches_complex_jacobi() {
        let m = arc_kernel_on(cfg(9), Arc::new(4.1, 2.3).unwrap()).unwrap();
        let fast = hermitian_eigenvalues(&m).unwrap();
        let mut slow = crate::linalg::hermitian_jacobi(m.entries().to_vec(), 9).unwrap();
        slow.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in fast.params().iter().zip(&slow) {
            assert_abs_diff_eq!(a, &b.clamp(0.0, 1.0), epsilon = 1e-12);
        }
    }

    #[test]
    fn out_of_range_parameters_rejected() {
        assert!(BernoulliSpectrum::from_params(vec![0.5, 1.2], 1.0).is_err());
    }

    #[test]
    fn pmf_examples() {
        let ones = BernoulliSpectrum::from_params(vec![1.0; 3], 0.0).unwrap();
        assert_eq!(poisson_binomial(&ones).pmf(), &[0.0, 0.0, 0.0, 1.0]);
        let halves = BernoulliSpectrum::from_params(vec![0.5; 2], 0.0).unwrap();
        assert_eq!(poisson_binomial(&halves).pmf(), &[0.25, 0.5, 0.25]);
    }

    #[test]
    fn two_point_law_matches_quadrature_of_joint_density() {
        // N = 2 eigenangle density: (1/8π²)|e^{ix} − e^{iy}|² = (1/2π²) sin²((x−y)/2)
        // on [0, 2π)², both points in [0, π) ⇒ P[N_π = 2].
        let steps = 800;
        let h = PI / steps as f64;
        let mut both = 0.0;
        for i in 0..steps {
            for j in 0..steps {
                let x = (i as f64 + 0.5) * h;
                let y = (j as f64 + 0.5) * h;
                both += ((x - y) / 2.0).sin().powi(2) / (2.0 * PI * PI) * h * h;
            }
        }
        let law = law_of(2, PI);
        assert_abs_diff_eq!(both, 0.25 - 1.0 / (PI * PI), epsilon = 1e-6);
        assert_abs_diff_eq!(law.pmf()[2], 0.25 - 1.0 / (PI * PI), epsilon = 1e-13);
        assert_abs_diff_eq!(law.variance(), 0.5 - 2.0 / (PI * PI), epsilon = 1e-13);
    }

    #[test]
    fn tail_examples() {
        let law = law_of(2, PI);
        assert_eq!(exact_tail(&law, 2.0 - law.mean()), 0.0);
        assert_abs_diff_eq!(exact_tail(&law, -(law.mean() + 1.0)), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            exact_tail(&law, 0.9),
            0.25 - 1.0 / (PI * PI),
            epsilon = 1e-13
        );
    }

    #[test]
    fn variance_check_examples() {
        let one = variance_bounds_check(1, 2.0).unwrap();
        let p = 2.0 / TAU;
        assert_abs_diff_eq!(one.variance, p * (1.0 - p), epsilon = 1e-15);
        assert!(one.global_upper_ok);
        assert_abs_diff_eq!(one.global_upper, 1.0, epsilon = 1e-15);

        let two = variance_bounds_check(2, PI).unwrap();
        assert_abs_diff_eq!(two.variance, 0.5 - 2.0 / (PI * PI), epsilon = 1e-13);
        assert!(two.variance <= 1.693);
        assert_abs_diff_eq!(
            two.global_upper,
            (2.0 * std::f64::consts::E).ln(),
            epsilon = 1e-15
        );
        assert!(two.lower.is_none() && two.all_satisfied());
    }

    #[test]
    fn variance_sweep_satisfies_all_bounds() {
        for n in [4usize, 7, 16, 33, 64, 128] {
            let lo = 3.0 * PI / (2.0 * n as f64);
            let hi = PI / 2.0;
            for i in 0..50 {
                let theta = lo + (hi - lo) * i as f64 / 49.0;
                let check = variance_bounds_check(n, theta).unwrap();
                assert!(check.all_satisfied(), "{check:?}");
                assert!(check.two_sided_ok.is_some());
            }
        }
    }

    #[test]
    fn mean_identity_and_complement_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1usize, 3, 10, 31, 64] {
            for _ in 0..10 {
                let theta = rng.random::<f64>() * TAU;
                let law = law_of(n, theta);
                assert_abs_diff_eq!(law.mean(), n as f64 * theta / TAU, epsilon = 1e-8);
                assert_abs_diff_eq!(law.pmf_mean(), law.mean(), epsilon = 1e-8);
                assert_abs_diff_eq!(law.pmf_variance(), law.variance(), epsilon = 1e-8);
                assert_abs_diff_eq!(law.pmf().iter().sum::<f64>(), 1.0, epsilon = 1e-10);
                let comp = law_of(n, TAU - theta);
                assert_abs_diff_eq!(comp.variance(), law.variance(), epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn joint_law_normalized_and_consistent() {
        let a = Arc::new(0.3, 1.7).unwrap();
        let law = joint_count_law(cfg(5), a, Arc::empty()).unwrap();
        assert_abs_diff_eq!(law.joint_pmf().iter().sum::<f64>(), 1.0, epsilon = 1e-8);
        // the count is rotation invariant, so [0.3, 2.0) has the law of [0, 1.7)
        let single = law_of(5, 1.7);
        for (x, y) in law.marginal_a().iter().zip(single.pmf()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-8);
        }
        assert!(law.joint_pmf().iter().all(|&p| p > -1e-9));
    }

    #[test]
    fn complementary_arcs_hold_every_point() {
        for n in [1usize, 2, 5, 9] {
            let a = Arc::new(0.0, PI).unwrap();
            let b = Arc::new(PI, PI).unwrap();
            let law = joint_count_law(cfg(n), a, b).unwrap();
            let total: f64 = (0..=n).map(|k| law.prob(k, n - k)).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-8);
            let ma = law.marginal_a();
            let exact = law_of(n, PI);
            for (x, y) in ma.iter().zip(exact.pmf()) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn joint_law_rejects_overlap_and_large_n() {
        let a = Arc::new(0.0, 2.0).unwrap();
        let b = Arc::new(1.0, 2.0).unwrap();
        assert!(joint_count_law(cfg(3), a, b).is_err());
        let c = Arc::new(3.0, 1.0).unwrap();
        assert!(joint_count_law(cfg(17), a, c).is_err());
    }

    #[test]
    fn negative_association_small_examples() {
        let a = Arc::new(0.0, PI / 2.0).unwrap();
        let b = Arc::new(PI, PI / 2.0).unwrap();
        let law = joint_count_law(cfg(2), a, b).unwrap();
        assert!(negative_association_check(&law) <= 1e-9);

        // s = 0 row: P[N_A ≥ 0, N_B ≥ t] = P[N_B ≥ t]
        let law = joint_count_law(cfg(4), a, b).unwrap();
        let mb = law.marginal_b();
        for t in 0..=4 {
            let joint: f64 = (0..=4)
                .flat_map(|x| (t..=4).map(move |y| (x, y)))
                .map(|(x, y)| law.prob(x, y))
                .sum();
            let pb: f64 = mb[t..].iter().sum();
            assert_abs_diff_eq!(joint - pb, 0.0, epsilon = 1e-12);
        }
    }
}
