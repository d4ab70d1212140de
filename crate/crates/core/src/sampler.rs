//! Exact sampling of the N eigenangles of a Haar unitary.
//!
//! The eigenangle process is a projection determinantal process whose kernel
//! factors through the centered Fourier vectors `v(θ)`. Points are drawn one
//! at a time: with `u_1, …, u_m` an orthonormal basis of the directions
//! already absorbed, the next point has density proportional to the squared
//! residual `‖v(θ)‖² − Σ|⟨u_i, v(θ)⟩|²`, which is at most `N`. It is drawn
//! by rejection from the uniform law, and the normalized residual joins the
//! basis.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::kernel::{reduce_angle, KernelConfig};
use crate::rng::StreamKey;
use crate::{Error, Result};

/// A residual below this norm at acceptance is treated as degenerate and the
/// point is redrawn.
pub const RESIDUAL_FLOOR: f64 = 1e-10;

/// One draw of the eigenangle process: sorted, strictly increasing, in `[0, 2π)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenangleSample {
    angles: Vec<f64>,
    seed_info: Option<StreamKey>,
}

impl EigenangleSample {
    /// Wraps explicit angles (reduced mod 2π and sorted).
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("angles must be finite"));
        }
        let mut angles: Vec<f64> = angles.into_iter().map(reduce_angle).collect();
        angles.sort_by(f64::total_cmp);
        if angles.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("angles must be distinct"));
        }
        Ok(Self {
            angles,
            seed_info: None,
        })
    }

    pub fn with_seed_info(mut self, key: StreamKey) -> Self {
        self.seed_info = Some(key);
        self
    }

    #[inline]
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.angles.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn seed_info(&self) -> Option<StreamKey> {
        self.seed_info
    }

    /// Number of angles in `[0, θ)`.
    pub fn count_below(&self, theta: f64) -> usize {
        self.angles.partition_point(|&a| a < theta)
    }

    /// Number of angles in `[0, θ]`.
    pub fn count_at_or_below(&self, theta: f64) -> usize {
        self.angles.partition_point(|&a| a <= theta)
    }

    /// The N circular gaps, the last one wrapping through the origin.
    pub fn spacings(&self) -> Vec<f64> {
        let n = self.angles.len();
        if n == 0 {
            return Vec::new();
        }
        let mut gaps: Vec<f64> = self.angles.windows(2).map(|w| w[1] - w[0]).collect();
        gaps.push(TAU - self.angles[n - 1] + self.angles[0]);
        gaps
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SamplerStats {
    pub proposals_used: u64,
    pub points_drawn: usize,
}

/// Sequential projection-DPP sampler for the CUE eigenangles.
///
/// Holds scratch buffers so repeated draws at the same N avoid reallocation.
#[derive(Clone, Debug)]
pub struct Sampler {
    n: usize,
    center: f64,
    basis_re: Vec<f64>,
    basis_im: Vec<f64>,
    v_re: Vec<f64>,
    v_im: Vec<f64>,
    coef: Vec<Complex64>,
}

impl Sampler {
    pub fn new(cfg: KernelConfig) -> Self {
        let n = cfg.matrix_size();
        Self {
            n,
            center: cfg.center(),
            basis_re: Vec::with_capacity(n * n),
            basis_im: Vec::with_capacity(n * n),
            v_re: vec![0.0; n],
            v_im: vec![0.0; n],
            coef: Vec::with_capacity(n),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (EigenangleSample, SamplerStats) {
        let mut stats = SamplerStats::default();
        loop {
            let mut angles = self.draw_points(rng, &mut stats);
            angles.sort_by(f64::total_cmp);
            // coincident angles have probability zero; redraw if rounding made one
            if angles.windows(2).all(|w| w[0] < w[1]) {
                stats.points_drawn = self.n;
                let sample = EigenangleSample {
                    angles,
                    seed_info: None,
                };
                return (sample, stats);
            }
        }
    }

    fn draw_points<R: Rng + ?Sized>(&mut self, rng: &mut R, stats: &mut SamplerStats) -> Vec<f64> {
        let n = self.n;
        let nf = n as f64;
        self.basis_re.clear();
        self.basis_im.clear();
        let mut angles = Vec::with_capacity(n);
        for m in 0..n {
            loop {
                stats.proposals_used += 1;
                let theta = reduce_angle(rng.random::<f64>() * TAU);
                let u: f64 = rng.random();
                self.load_basis_vector(theta);
                let captured = self.project(m);
                let residual = nf - captured;
                if u * nf >= residual {
                    continue;
                }
                if self.absorb(m) {
                    angles.push(theta);
                    break;
                }
            }
        }
        angles
    }

    fn load_basis_vector(&mut self, theta: f64) {
        let step = Complex64::cis(theta);
        let mut z = Complex64::cis(-self.center * theta);
        for k in 0..self.n {
            // refresh from the exact phase periodically to bound drift
            if k % 64 == 0 && k > 0 {
                z = Complex64::cis((k as f64 - self.center) * theta);
            }
            self.v_re[k] = z.re;
            self.v_im[k] = z.im;
            z *= step;
        }
    }

    /// Fills `coef` with `⟨u_i, v⟩` for the first `m` basis vectors and
    /// returns `Σ|⟨u_i, v⟩|²`.
    fn project(&mut self, m: usize) -> f64 {
        let n = self.n;
        self.coef.clear();
        let mut captured = 0.0;
        for i in 0..m {
            let ur = &self.basis_re[i * n..(i + 1) * n];
            let ui = &self.basis_im[i * n..(i + 1) * n];
            let (mut re, mut im) = (0.0, 0.0);
            for k in 0..n {
                re += ur[k] * self.v_re[k] + ui[k] * self.v_im[k];
                im += ur[k] * self.v_im[k] - ui[k] * self.v_re[k];
            }
            captured += re * re + im * im;
            self.coef.push(Complex64::new(re, im));
        }
        captured
    }

    /// Gram-Schmidt step with one reorthogonalization pass; appends the
    /// normalized residual of `v` unless it is degenerate.
    fn absorb(&mut self, m: usize) -> bool {
        let n = self.n;
        let mut w_re = self.v_re.clone();
        let mut w_im = self.v_im.clone();
        for pass in 0..2 {
            for i in 0..m {
                let ur = &self.basis_re[i * n..(i + 1) * n];
                let ui = &self.basis_im[i * n..(i + 1) * n];
                let c = if pass == 0 {
                    self.coef[i]
                } else {
                    let (mut re, mut im) = (0.0, 0.0);
                    for k in 0..n {
                        re += ur[k] * w_re[k] + ui[k] * w_im[k];
                        im += ur[k] * w_im[k] - ui[k] * w_re[k];
                    }
                    Complex64::new(re, im)
                };
                for k in 0..n {
                    w_re[k] -= c.re * ur[k] - c.im * ui[k];
                    w_im[k] -= c.re * ui[k] + c.im * ur[k];
                }
            }
        }
        let norm = w_re
            .iter()
            .zip(&w_im)
            .map(|(r, i)| r * r + i * i)
            .sum::<f64>()
            .sqrt();
        if norm < RESIDUAL_FLOOR {
            return false;
        }
        self.basis_re.extend(w_re.iter().map(|x| x / norm));
        self.basis_im.extend(w_im.iter().map(|x| x / norm));
        true
    }
}

/// Draws the N eigenangles of a Haar unitary.
pub fn sample_eigenangles<R: Rng + ?Sized>(
    cfg: KernelConfig,
    rng: &mut R,
) -> (EigenangleSample, SamplerStats) {
    Sampler::new(cfg).sample(rng)
}

/// Draws replicate `key.replicate` at size `key.n` from its own stream.
pub fn sample_replicate(key: StreamKey) -> Result<(EigenangleSample, SamplerStats)> {
    let cfg = KernelConfig::new(key.n as usize)?;
    let mut rng = key.rng();
    let (sample, stats) = sample_eigenangles(cfg, &mut rng);
    Ok((sample.with_seed_info(key), stats))
}

/// Independent N = 2 sampler: uniform proposals on the torus accepted with
/// probability `sin²((x − y)/2)`, the normalized two-point density.
pub fn sample_oracle_n2_with_stats<R: Rng + ?Sized>(
    rng: &mut R,
) -> (EigenangleSample, SamplerStats) {
    let mut proposals = 0;
    loop {
        proposals += 1;
        let x = reduce_angle(rng.random::<f64>() * TAU);
        let y = reduce_angle(rng.random::<f64>() * TAU);
        let u: f64 = rng.random();
        if u < ((x - y) / 2.0).sin().powi(2) && x != y {
            let angles = if x < y { vec![x, y] } else { vec![y, x] };
            let sample = EigenangleSample {
                angles,
                seed_info: None,
            };
            let stats = SamplerStats {
                proposals_used: proposals,
                points_drawn: 2,
            };
            return (sample, stats);
        }
    }
}

pub fn sample_oracle_n2<R: Rng + ?Sized>(rng: &mut R) -> EigenangleSample {
    sample_oracle_n2_with_stats(rng).0
}

/// Shifts every angle by `phi` (mod 2π) and re-sorts.
pub fn rotate_sample(s: &EigenangleSample, phi: f64) -> EigenangleSample {
    let phi = reduce_angle(phi);
    let mut angles: Vec<f64> = s.angles.iter().map(|a| reduce_angle(a + phi)).collect();
    angles.sort_by(f64::total_cmp);
    EigenangleSample {
        angles,
        seed_info: s.seed_info,
    }
}
