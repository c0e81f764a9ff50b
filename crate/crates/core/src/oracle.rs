//! Independent brute-force and randomized verification machinery.
//!
//! Everything here checks the formula modules through a second route:
//! exhaustive border enumeration, seeded adversarial fuzzing, local search,
//! and grid monotonicity checks. None of it reuses the closed-form l(k) /
//! k* shortcuts it is meant to validate.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::extremal::ExtremalConfig;
use crate::gapbound::{gap, sharpness_constant, upper_bound, verify, Exponents, GapReport};
use crate::norms::{max_abs_min_abs, normalized_lp, PExponent, Signal};
use crate::seeding::trial_rng;

/// Relative tolerance below which negative slack counts as a violation.
pub const VIOLATION_TOL: f64 = 1e-9;

const MAX_VIOLATION_EXAMPLES: usize = 8;

/// Families of random test vectors used by the adversarial search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VectorGenerator {
    /// Entries uniform on [-1, 1].
    UniformCube,
    /// Random support size and positions, uniform values on the support.
    SparseSupport,
    /// k entries at 1, the rest at 0, plus uniform noise of the given level.
    TwoLevel { k: usize, noise: f64 },
    /// Cauchy entries: occasional very large magnitudes.
    HeavyTailed,
    /// Each trial draws one of the four families at random.
    Mixture,
}

/// Outcome of a seeded adversarial search over one (n, p, q) configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressReport {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub trials: u64,
    pub seed: u64,
    pub violations: u64,
    pub worst_slack: f64,
    pub worst_trial: u64,
    pub worst_vector: Vec<f64>,
    pub worst_report: GapReport,
    pub violation_examples: Vec<ViolationEvidence>,
}

/// A vector that broke the sandwich inequality, kept for triage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationEvidence {
    pub trial: u64,
    pub vector: Vec<f64>,
    pub report: GapReport,
}

/// Exhaustive max of the gap over all border configurations (k ones, n−k
/// zeros), k in [1, n−1]. Evaluates the gap on realized vectors, never
/// through l(k), so it independently checks [`crate::extremal`].
pub fn border_enumeration_max(n: usize, e: Exponents) -> (f64, ExtremalConfig) {
    assert!((2..=4096).contains(&n), "n must lie in [2, 4096], got {n}");
    let mut best = f64::NEG_INFINITY;
    let mut best_k = 1;
    for k in 1..n {
        let config = ExtremalConfig::new(n, k, 1.0, 0.0).expect("k in range");
        let g = gap(&config.realize(), e);
        if g > best {
            best = g;
            best_k = k;
        }
    }
    (
        best,
        ExtremalConfig::new(n, best_k, 1.0, 0.0).expect("k in range"),
    )
}

fn sample_vector(generator: VectorGenerator, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match generator {
        VectorGenerator::Mixture => {
            let pick = rng.random_range(0..4u32);
            let concrete = match pick {
                0 => VectorGenerator::UniformCube,
                1 => VectorGenerator::SparseSupport,
                2 => {
                    let k = rng.random_range(1..n.max(2));
                    let noise = rng.random_range(0.0..0.05);
                    VectorGenerator::TwoLevel { k, noise }
                }
                _ => VectorGenerator::HeavyTailed,
            };
            sample_vector(concrete, n, rng)
        }
        VectorGenerator::UniformCube => (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
        VectorGenerator::SparseSupport => {
            let k = rng.random_range(1..=n);
            let mut v = vec![0.0; n];
            for i in rand::seq::index::sample(rng, n, k) {
                v[i] = rng.random_range(-1.0..1.0);
            }
            v
        }
        VectorGenerator::TwoLevel { k, noise } => {
            let k = k.clamp(1, n.saturating_sub(1).max(1));
            let mut v = vec![0.0; n];
            v[..k].fill(1.0);
            if noise > 0.0 {
                for x in v.iter_mut() {
                    *x += rng.random_range(-noise..noise);
                }
            }
            v
        }
        VectorGenerator::HeavyTailed => {
            let cauchy = Cauchy::new(0.0f64, 1.0).expect("valid parameters");
            (0..n)
                .map(|_| {
                    let v = cauchy.sample(rng);
                    if v.is_finite() {
                        v
                    } else {
                        0.0
                    }
                })
                .collect()
        }
    }
}

/// Seeded randomized falsification of the sandwich inequality.
///
/// Samples `trials` vectors from the mixture of generators, records the
/// minimum slack = bound − gap, and reports every trial whose gap or slack
/// dips below −[`VIOLATION_TOL`]·scale. Deterministic given the seed; trial
/// substreams make parallel and serial runs agree.
pub fn random_adversarial_search(n: usize, e: Exponents, trials: u64, seed: u64) -> StressReport {
    random_adversarial_search_with(VectorGenerator::Mixture, n, e, trials, seed)
}

/// Adversarial search with an explicit generator family.
pub fn random_adversarial_search_with(
    generator: VectorGenerator,
    n: usize,
    e: Exponents,
    trials: u64,
    seed: u64,
) -> StressReport {
    assert!(trials >= 1, "trials must be at least 1");
    assert!(n >= 1, "n must be at least 1");

    let outcomes: Vec<(f64, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let v = sample_vector(generator, n, &mut rng);
            let x = Signal::new(v).expect("generators produce finite entries");
            let g = gap(&x, e);
            let b = upper_bound(&x, e);
            let (max_a, _) = max_abs_min_abs(&x);
            let tol = VIOLATION_TOL * max_a.max(1.0);
            let slack = b - g;
            (slack, g < -tol || slack < -tol)
        })
        .collect();

    let mut violations = 0u64;
    let mut worst_trial = 0u64;
    let mut worst_slack = f64::INFINITY;
    let mut violating_trials: Vec<u64> = Vec::new();
    for (t, &(slack, violated)) in outcomes.iter().enumerate() {
        if violated {
            violations += 1;
            if violating_trials.len() < MAX_VIOLATION_EXAMPLES {
                violating_trials.push(t as u64);
            }
        }
        if slack < worst_slack {
            worst_slack = slack;
            worst_trial = t as u64;
        }
    }

    let regenerate = |t: u64| -> Signal {
        let mut rng = trial_rng(seed, t);
        Signal::new(sample_vector(generator, n, &mut rng)).expect("reproducible trial")
    };

    let worst = regenerate(worst_trial);
    let worst_report = verify(&worst, e, VIOLATION_TOL);
    let violation_examples = violating_trials
        .into_iter()
        .map(|t| {
            let x = regenerate(t);
            let report = verify(&x, e, VIOLATION_TOL);
            ViolationEvidence {
                trial: t,
                vector: x.into_vec(),
                report,
            }
        })
        .collect();

    StressReport {
        n,
        p: e.p(),
        q: e.q(),
        trials,
        seed,
        violations,
        worst_slack,
        worst_trial,
        worst_vector: worst.into_vec(),
        worst_report,
        violation_examples,
    }
}

/// Coordinate-ascent maximization of the gap over [0, 1]^n.
///
/// The returned maximum can never exceed the true border maximum; comparing
/// the two numerically confirms that the gap achieves its maximum on border
/// configurations.
pub fn hill_climb_gap(n: usize, e: Exponents, restarts: u64, seed: u64) -> f64 {
    hill_climb_gap_detailed(n, e, restarts, seed).0
}

/// Like [`hill_climb_gap`], also returning the best vector found.
pub fn hill_climb_gap_detailed(
    n: usize,
    e: Exponents,
    restarts: u64,
    seed: u64,
) -> (f64, Vec<f64>) {
    assert!(restarts >= 1, "restarts must be at least 1");
    assert!(n >= 2, "n must be at least 2");

    const DIRECTIONS_PER_STEP: usize = 16;
    const STEP_INIT: f64 = 0.25;
    const STEP_FLOOR: f64 = 1e-6;
    const MAX_EVALS: usize = 40_000;

    let gap_of = |v: &[f64]| gap(&Signal::new(v.to_vec()).expect("finite"), e);

    let mut best = f64::NEG_INFINITY;
    let mut best_x = vec![0.0; n];
    for r in 0..restarts {
        let mut rng = trial_rng(seed, r);
        // the first restart starts at the all-equal point (gap exactly 0)
        // to exercise escaping a flat start
        let mut x: Vec<f64> = if r == 0 {
            vec![0.5; n]
        } else {
            (0..n).map(|_| rng.random::<f64>()).collect()
        };
        let mut cur = gap_of(&x);
        let mut step = STEP_INIT;
        let mut evals = 0usize;
        while step > STEP_FLOOR && evals < MAX_EVALS {
            let mut improved = false;
            for _ in 0..DIRECTIONS_PER_STEP {
                let i = rng.random_range(0..n);
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                let old = x[i];
                let cand = (old + sign * step).clamp(0.0, 1.0);
                if cand == old {
                    continue;
                }
                x[i] = cand;
                let g = gap_of(&x);
                evals += 1;
                if g > cur {
                    cur = g;
                    improved = true;
                } else {
                    x[i] = old;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if cur > best {
            best = cur;
            best_x = x;
        }
    }
    (best, best_x)
}

/// True iff f(p) = log(normalized ℓ_p) is nondecreasing along `p_grid`.
pub fn check_f_monotone(x: &Signal, p_grid: &[f64]) -> bool {
    assert!(!p_grid.is_empty(), "p_grid must be nonempty");
    assert!(
        p_grid.windows(2).all(|w| w[0] < w[1]) && p_grid[0] > 0.0,
        "p_grid must be strictly increasing and positive"
    );
    let f: Vec<f64> = p_grid
        .iter()
        .map(|&p| normalized_lp(x, PExponent::new(p).expect("positive grid")).ln())
        .collect();
    f.windows(2).all(|w| w[1] >= w[0] - 1e-12)
}

/// Fuzz the shift inequality s(x, y) ≤ s(x−y, 0) and the monotonicity of
/// h(t) = n^{−1/q} s(x−t, y−t) on t ∈ [0, y].
pub fn check_lemma1_shift(samples: u64, seed: u64) -> bool {
    assert!(samples >= 1, "samples must be at least 1");
    const H_GRID: usize = 20;
    (0..samples).into_par_iter().all(|s| {
        let mut rng = trial_rng(seed, s);
        let n = rng.random_range(2..=64usize);
        let k = rng.random_range(1..n);
        let p = rng.random_range(0.01..=1.0f64);
        let q = 1.0 + rng.random_range(0.01..7.0f64);
        let e = Exponents::new(p, q).expect("sampled in range");
        let y = rng.random_range(0.0..10.0f64);
        let x = y + rng.random_range(0.01..10.0f64);
        let tol = 1e-10 * x.max(1.0);

        let s_xy = crate::gapbound::lemma1_s(x, y, n, k, e).expect("valid sample");
        let s_shift = crate::gapbound::lemma1_s(x - y, 0.0, n, k, e).expect("valid sample");
        if s_xy > s_shift + tol {
            return false;
        }

        let scale = (n as f64).powf(-1.0 / q);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..H_GRID {
            // fraction first, so t never rounds above y
            let t = y * (i as f64 / (H_GRID - 1) as f64);
            let h = scale * crate::gapbound::lemma1_s(x - t, y - t, n, k, e).expect("x-t > y-t");
            if h < prev - tol {
                return false;
            }
            prev = h;
        }
        true
    })
}

/// Check that c_{p,q} is strictly decreasing along `p_grid` for every q and
/// strictly increasing along `q_grid` for every p (slack 1e-14).
pub fn check_constant_monotonicity(p_grid: &[f64], q_grid: &[f64]) -> bool {
    assert!(
        p_grid.windows(2).all(|w| w[0] < w[1]),
        "p_grid must be strictly increasing"
    );
    assert!(
        q_grid.windows(2).all(|w| w[0] < w[1]),
        "q_grid must be strictly increasing"
    );
    const SLACK: f64 = 1e-14;
    for &q in q_grid {
        let cs: Vec<f64> = p_grid
            .iter()
            .map(|&p| sharpness_constant(Exponents::new(p, q).expect("valid grid")))
            .collect();
        if !cs.windows(2).all(|w| w[1] < w[0] + SLACK) {
            return false;
        }
    }
    for &p in p_grid {
        let cs: Vec<f64> = q_grid
            .iter()
            .map(|&q| sharpness_constant(Exponents::new(p, q).expect("valid grid")))
            .collect();
        if !cs.windows(2).all(|w| w[1] > w[0] - SLACK) {
            return false;
        }
    }
    true
}
