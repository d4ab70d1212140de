//! The CUE eigenangle kernel and its restrictions to arcs.
//!
//! Conventions used throughout the crate:
//!
//! * the reference measure on the circle is the uniform probability measure
//!   `dθ/2π`, so `K_N(x, x) = N` integrates to the number of points;
//! * angles are reduced to `[0, 2π)` with [`reduce_angle`] before use;
//! * arcs are half-open, `[start, start + length)` taken modulo `2π`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::{Error, Result};

/// `|sin((x − y)/2)|` below this is treated as the diagonal of the kernel.
pub const DIAGONAL_EPS: f64 = 1e-12;

/// Dimension of the unitary group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KernelConfig {
    n: usize,
}

impl KernelConfig {
    pub fn new(matrix_size: usize) -> Result<Self> {
        if matrix_size == 0 {
            return Err(Error::invalid("matrix size N must be at least 1"));
        }
        Ok(Self { n: matrix_size })
    }

    #[inline]
    pub fn matrix_size(&self) -> usize {
        self.n
    }

    /// Phase offset `(N − 1)/2` of the centered Fourier basis.
    #[inline]
    pub(crate) fn center(&self) -> f64 {
        (self.n as f64 - 1.0) / 2.0
    }
}

/// Reduces an angle to `[0, 2π)`.
#[inline]
pub fn reduce_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// `K_N(x, y) = sin(N(x − y)/2) / sin((x − y)/2)`.
pub fn kernel_value(cfg: KernelConfig, x: f64, y: f64) -> f64 {
    let n = cfg.n as f64;
    // K_N is even in x − y; using |x − y| keeps the value exactly symmetric.
    let d = (reduce_angle(x) - reduce_angle(y)).abs();
    let half = d / 2.0;
    let s = half.sin();
    if s.abs() < DIAGONAL_EPS {
        // d is close to 2πm with m ∈ {0, 1}; the limit is N·(−1)^{(N−1)m}.
        let m = (d / TAU).round() as u64;
        return if (cfg.n as u64 - 1) * m % 2 == 1 {
            -n
        } else {
            n
        };
    }
    (n * half).sin() / s
}

/// The centered Fourier vector `v(θ)_k = e^{i(k − (N−1)/2)θ}`, `k = 0..N`.
///
/// These are orthonormal in `L²(dθ/2π)` and `Σ_k v_k(x) conj(v_k(y))`
/// reproduces [`kernel_value`].
pub fn orthonormal_basis_vector(cfg: KernelConfig, theta: f64) -> Vec<Complex64> {
    let c = cfg.center();
    (0..cfg.n)
        .map(|k| Complex64::cis((k as f64 - c) * theta))
        .collect()
}

/// A half-open arc `[start, start + length)` on the circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    start: f64,
    length: f64,
}

impl Arc {
    pub fn new(start: f64, length: f64) -> Result<Self> {
        if !start.is_finite() || !(0.0..=TAU).contains(&length) {
            return Err(Error::invalid(format!(
                "arc length {length} must lie in [0, 2π]"
            )));
        }
        Ok(Self {
            start: reduce_angle(start),
            length,
        })
    }

    /// The arc `[0, θ)`.
    pub fn from_origin(length: f64) -> Result<Self> {
        Self::new(0.0, length)
    }

    pub fn empty() -> Self {
        Self {
            start: 0.0,
            length: 0.0,
        }
    }

    #[inline]
    pub fn start(&self) -> f64 {
        self.start
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn contains(&self, angle: f64) -> bool {
        if self.length >= TAU {
            return true;
        }
        reduce_angle(angle - self.start) < self.length
    }

    /// Whether two arcs share no point of the circle.
    pub fn is_disjoint(&self, other: &Arc) -> bool {
        if self.length == 0.0 || other.length == 0.0 {
            return true;
        }
        if self.length + other.length > TAU {
            return false;
        }
        // other must fit inside the complement [start + length, start + 2π)
        let offset = reduce_angle(other.start - self.start);
        offset >= self.length && offset + other.length <= TAU
    }

    /// Number of angles falling inside the arc.
    pub fn count(&self, angles: &[f64]) -> usize {
        angles.iter().filter(|&&a| self.contains(a)).count()
    }
}

/// The Gram matrix `M_{jk} = (1/2π) ∫_A e^{i(j−k)x} dx` of the Fourier basis
/// over an arc `A`; a Hermitian restriction of the projection kernel with
/// spectrum in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcKernelMatrix {
    dimension: usize,
    arc: Arc,
    entries: Vec<Complex64>,
}

impl ArcKernelMatrix {
    #[inline]
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    #[inline]
    pub fn arc_length(&self) -> f64 {
        self.arc.length
    }

    #[inline]
    pub fn arc(&self) -> Arc {
        self.arc
    }

    /// Row-major entries.
    #[inline]
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.entries[j * self.dimension + k]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dimension).map(|j| self.get(j, j).re).sum()
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }
}

/// Restriction of the kernel to the arc `[0, θ)`.
pub fn arc_kernel(cfg: KernelConfig, theta: f64) -> Result<ArcKernelMatrix> {
    if !(0.0..=TAU).contains(&theta) {
        return Err(Error::invalid(format!(
            "arc length {theta} must lie in [0, 2π]"
        )));
    }
    arc_kernel_on(cfg, Arc::from_origin(theta)?)
}

/// Restriction of the kernel to an arbitrary arc.
///
/// For `m = j − k ≠ 0` the entry is `e^{im(a + θ/2)} sin(mθ/2) / (πm)`;
/// the diagonal is `θ/2π`. Only the upper triangle is evaluated, the lower
/// one is its conjugate.
pub fn arc_kernel_on(cfg: KernelConfig, arc: Arc) -> Result<ArcKernelMatrix> {
    let n = cfg.n;
    let theta = arc.length;
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    let diag = theta / TAU;
    for j in 0..n {
        entries[j * n + j] = Complex64::new(diag, 0.0);
    }
    if theta < TAU {
        let mid = arc.start + theta / 2.0;
        for m in 1..n {
            let mf = m as f64;
            let value = Complex64::from_polar((mf * theta / 2.0).sin() / (PI * mf), mf * mid);
            for k in 0..n - m {
                let j = k + m;
                entries[j * n + k] = value;
                entries[k * n + j] = value.conj();
            }
        }
    }
    Ok(ArcKernelMatrix {
        dimension: n,
        arc,
        entries,
    })
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

    #[test]
    fn zero_size_rejected() {
        assert!(KernelConfig::new(0).is_err());
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_value(cfg(5), 1.3, 1.3), 5.0);
        assert_abs_diff_eq!(
            kernel_value(cfg(2), PI / 2.0, 0.0),
            2f64.sqrt(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(kernel_value(cfg(8), TAU / 8.0, 0.0), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn kernel_limit_near_full_turn() {
        // x − y close to 2π from the inside of [0, 2π)
        let x = TAU - 1e-14;
        assert_abs_diff_eq!(kernel_value(cfg(4), x, 0.0), -4.0, epsilon = 1e-9);
        assert_abs_diff_eq!(kernel_value(cfg(5), x, 0.0), 5.0, epsilon = 1e-9);
        // reduced angles: 2π itself is the origin
        assert_eq!(kernel_value(cfg(4), TAU, 0.0), 4.0);
    }

    #[test]
    fn basis_examples() {
        assert_eq!(
            orthonormal_basis_vector(cfg(1), 2.2),
            vec![Complex64::new(1.0, 0.0)]
        );
        for v in orthonormal_basis_vector(cfg(3), 0.0) {
            assert_eq!(v, Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn basis_reconstructs_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = cfg(4);
        let v = orthonormal_basis_vector(c, PI / 3.0);
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert_abs_diff_eq!(norm, 4.0, epsilon = 1e-12);
        for _ in 0..100 {
            let x = rng.random::<f64>() * TAU;
            let y = rng.random::<f64>() * TAU;
            let vx = orthonormal_basis_vector(c, x);
            let vy = orthonormal_basis_vector(c, y);
            // direct summation
            let s: Complex64 = vx.iter().zip(&vy).map(|(a, b)| a * b.conj()).sum();
            assert_abs_diff_eq!(s.re, kernel_value(c, x, y), epsilon = 1e-10);
            assert_abs_diff_eq!(s.im, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn reproducing_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let points = 4096;
        for n in [1usize, 2, 5, 9, 16] {
            let c = cfg(n);
            for _ in 0..20 {
                let x = rng.random::<f64>() * TAU;
                let y = rng.random::<f64>() * TAU;
                let integral: f64 = (0..points)
                    .map(|i| {
                        let z = TAU * i as f64 / points as f64;
                        kernel_value(c, x, z) * kernel_value(c, z, y)
                    })
                    .sum::<f64>()
                    / points as f64;
                assert_abs_diff_eq!(integral, kernel_value(c, x, y), epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn arc_kernel_examples() {
        let full = arc_kernel(cfg(6), TAU).unwrap();
        for j in 0..6 {
            for k in 0..6 {
                let want = if j == k { 1.0 } else { 0.0 };
                assert_eq!(full.get(j, k), Complex64::new(want, 0.0));
            }
        }
        let one = arc_kernel(cfg(1), 2.0).unwrap();
        assert_eq!(one.entries(), &[Complex64::new(2.0 / TAU, 0.0)]);
        let two = arc_kernel(cfg(2), PI).unwrap();
        assert_abs_diff_eq!(two.get(0, 0).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(two.get(0, 1).re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(two.get(0, 1).im, -1.0 / PI, epsilon = 1e-15);
        assert_abs_diff_eq!(two.get(1, 0).im, 1.0 / PI, epsilon = 1e-15);
    }

    #[test]
    fn arc_kernel_entries_match_quadrature() {
        // midpoint rule on (1/2π)∫_a^{a+θ} e^{i(j−k)x} dx
        let c = cfg(5);
        let arc = Arc::new(5.5, 1.9).unwrap();
        let m = arc_kernel_on(c, arc).unwrap();
        let steps = 20_000;
        let h = arc.length() / steps as f64;
        for j in 0..5 {
            for k in 0..5 {
                let q: Complex64 = (0..steps)
                    .map(|i| {
                        let x = arc.start() + (i as f64 + 0.5) * h;
                        Complex64::cis((j as f64 - k as f64) * x)
                    })
                    .sum::<Complex64>()
                    * (h / TAU);
                assert_abs_diff_eq!(m.get(j, k).re, q.re, epsilon = 1e-8);
                assert_abs_diff_eq!(m.get(j, k).im, q.im, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn arc_kernel_rejects_bad_length() {
        assert!(arc_kernel(cfg(3), -0.1).is_err());
        assert!(arc_kernel(cfg(3), TAU + 1e-9).is_err());
    }

    #[test]
    fn arcs_disjointness() {
        let a = Arc::new(0.0, PI).unwrap();
        let b = Arc::new(PI, PI).unwrap();
        assert!(a.is_disjoint(&b));
        assert!(b.is_disjoint(&a));
        let c = Arc::new(3.0, 1.0).unwrap();
        assert!(!a.is_disjoint(&c));
        assert!(!c.is_disjoint(&a));
        let wrap = Arc::new(6.0, 1.0).unwrap();
        assert!(!wrap.is_disjoint(&a));
        assert!(wrap.is_disjoint(&Arc::new(1.0, 4.0).unwrap()));
        assert!(a.is_disjoint(&Arc::empty()));
        assert!(wrap.contains(0.5));
        assert!(!wrap.contains(0.8));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn kernel_symmetric_and_bounded(n in 1usize..64, x in -20.0f64..20.0, y in -20.0f64..20.0) {
                let c = cfg(n);
                let kxy = kernel_value(c, x, y);
                prop_assert_eq!(kxy, kernel_value(c, y, x));
                prop_assert!(kxy.abs() <= n as f64 + 1e-9);
            }

            #[test]
            fn arc_trace_and_hermitian(n in 1usize..40, t1 in 0.0f64..TAU, t2 in 0.0f64..TAU) {
                let c = cfg(n);
                let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
                let m1 = arc_kernel(c, lo).unwrap();
                let m2 = arc_kernel(c, hi).unwrap();
                prop_assert!((m1.trace() - n as f64 * lo / TAU).abs() < 1e-12);
                prop_assert!(m1.trace() <= m2.trace());
                for j in 0..n {
                    for k in 0..n {
                        prop_assert_eq!(m2.get(j, k), m2.get(k, j).conj());
                    }
                }
            }
        }
    }
}
