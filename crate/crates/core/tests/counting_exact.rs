//! Exact counting laws: moment identities, Bernstein domination and negative
//! association on random arc pairs.

mod common;

use std::f64::consts::{PI, TAU};

use common::exact_law;
use cuelab::bounds::{bernstein_bound, TailBoundInput};
use cuelab::counting::{
    exact_tail, joint_count_law, negative_association_check, variance_bounds_check,
};
use cuelab::{Arc, KernelConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn mean_and_mass_identities() {
    for n in [2usize, 5, 16, 64] {
        for i in 1..=12 {
            let theta = TAU * i as f64 / 12.5;
            let law = exact_law(n, theta);
            let total: f64 = law.pmf().iter().sum();
            assert!((total - 1.0).abs() < 1e-10);
            assert!((law.mean() - n as f64 * theta / TAU).abs() < 1e-8);
            assert!((law.pmf_mean() - law.mean()).abs() < 1e-8);
            assert!((law.pmf_variance() - law.variance()).abs() < 1e-8);
        }
    }
}

#[test]
fn variance_bounds_on_a_sweep() {
    for n in [4usize, 32, 100] {
        let lo = 3.0 * PI / (2.0 * n as f64);
        for i in 0..=10 {
            let theta = lo + (PI / 2.0 - lo) * i as f64 / 10.0;
            let check = variance_bounds_check(n, theta).unwrap();
            assert!(check.two_sided_ok.is_some() || theta > PI / 2.0);
            assert!(check.all_satisfied(), "{check:?}");
        }
    }
}

#[test]
fn bernstein_dominates_exact_tails() {
    for n in [3usize, 10, 33, 64] {
        for i in 1..=10 {
            let theta = TAU * i as f64 / 11.0;
            let law = exact_law(n, theta);
            let s_n = law.std_dev();
            for j in 1..=10 {
                let x = 0.4 * j as f64;
                let exact = exact_tail(&law, x * s_n);
                let bound = bernstein_bound(&TailBoundInput::new(x, s_n, 1.0).unwrap());
                assert!(exact <= bound, "N={n} θ={theta} x={x}: {exact} > {bound}");
            }
        }
    }
}

fn random_disjoint_pair(rng: &mut ChaCha8Rng) -> (Arc, Arc) {
    let start = rng.random::<f64>() * TAU;
    let len_a = rng.random::<f64>() * PI;
    let gap = rng.random::<f64>() * (TAU - len_a) * 0.5;
    let len_b = rng.random::<f64>() * (TAU - len_a - gap);
    let a = Arc::new(start, len_a).unwrap();
    let b = Arc::new(start + len_a + gap, len_b).unwrap();
    (a, b)
}

#[test]
fn counts_on_disjoint_arcs_are_negatively_associated() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for n in 2..=6 {
        let cfg = KernelConfig::new(n).unwrap();
        for _ in 0..50 {
            let (a, b) = random_disjoint_pair(&mut rng);
            assert!(a.is_disjoint(&b));
            let law = joint_count_law(cfg, a, b).unwrap();
            let worst = negative_association_check(&law);
            assert!(worst <= 1e-9, "N={n} {a:?} {b:?}: {worst}");
        }
    }
}

#[test]
fn joint_marginals_match_single_arc_laws() {
    let cfg = KernelConfig::new(5).unwrap();
    let a = Arc::from_origin(1.3).unwrap();
    let b = Arc::new(2.0, 2.5).unwrap();
    let joint = joint_count_law(cfg, a, b).unwrap();
    let single = exact_law(5, 1.3);
    for (x, y) in joint.marginal_a().iter().zip(single.pmf()) {
        assert!((x - y).abs() < 1e-10);
    }
    // rotation: the law on b equals the law on [0, 2.5)
    let shifted = exact_law(5, 2.5);
    for (x, y) in joint.marginal_b().iter().zip(shifted.pmf()) {
        assert!((x - y).abs() < 1e-10);
    }
}

#[test]
fn overlapping_arcs_rejected() {
    let cfg = KernelConfig::new(4).unwrap();
    let a = Arc::from_origin(2.0).unwrap();
    let b = Arc::new(1.0, 2.0).unwrap();
    assert!(joint_count_law(cfg, a, b).is_err());
}
