//! Cross-module consistency: formula modules against the oracle machinery.

use normgap::extremal::{attainment_ratio, best_integer_config, k_star};
use normgap::gapbound::{
    classify_equality, gap, upper_bound, verify, EqualityClass, Exponents, DEFAULT_TOL_EQ,
};
use normgap::norms::{l0_norm, lp_norm_pth_power, PExponent, Signal};
use normgap::oracle::{
    border_enumeration_max, check_constant_monotonicity, check_f_monotone, check_lemma1_shift,
    hill_climb_gap, random_adversarial_search,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn e(p: f64, q: f64) -> Exponents {
    Exponents::new(p, q).unwrap()
}

// ten-point (p, q) grid used for enumeration agreement
const GRID_10: [(f64, f64); 10] = [
    (0.1, 1.5),
    (0.1, 4.0),
    (0.25, 2.0),
    (0.4, 1.2),
    (0.5, 2.0),
    (0.5, 8.0),
    (0.75, 3.0),
    (1.0, 1.5),
    (1.0, 2.0),
    (1.0, 16.0),
];

#[test]
fn enumeration_matches_best_config_up_to_256() {
    for &(p, q) in &GRID_10 {
        let ex = e(p, q);
        for n in 2..=256usize {
            let (max_gap, _) = border_enumeration_max(n, ex);
            let realized = gap(&best_integer_config(n, ex).realize(), ex);
            assert!(
                (max_gap - realized).abs() <= 1e-12,
                "n={n} p={p} q={q}: enumeration {max_gap} vs best config {realized}"
            );
        }
    }
}

#[test]
fn hill_climb_never_beats_enumeration() {
    for &(p, q) in &[(1.0, 2.0), (0.5, 2.0), (0.25, 1.5), (1.0, 8.0)] {
        let ex = e(p, q);
        for &n in &[2usize, 3, 5, 8, 16, 32] {
            let (border, _) = border_enumeration_max(n, ex);
            let climbed = hill_climb_gap(n, ex, 10, 23);
            assert!(
                climbed <= border + 1e-7,
                "n={n} p={p} q={q}: climbed {climbed} above {border}"
            );
        }
    }
}

#[test]
fn extremal_vectors_verify_and_flag_equality_exactly_at_integer_k_star() {
    for &(p, q) in &[(1.0, 2.0), (0.5, 2.0), (0.25, 1.5)] {
        let ex = e(p, q);
        for n in 2..=64usize {
            let ks = k_star(n, ex);
            let dist = (ks - ks.round()).abs();
            let tol_int = 1e-8 * n as f64;
            if dist > tol_int && dist < 0.01 {
                // ambiguous band: numeric slack may dip below tolerance
                // while the structural test still says "not an integer"
                continue;
            }
            let report = verify(&best_integer_config(n, ex).realize(), ex, DEFAULT_TOL_EQ);
            assert!(report.verified, "n={n} p={p} q={q} not verified");
            let integer_k_star =
                dist <= tol_int && ks.round() >= 1.0 && ks.round() <= (n - 1) as f64;
            assert_eq!(
                report.equality_second, integer_k_star,
                "n={n} p={p} q={q}: equality_second={}, k*={ks}",
                report.equality_second
            );
        }
    }
}

#[test]
fn near_integer_k_star_raises_warning() {
    // n = 55, (p, q) = (0.9, 8): k* sits ~1.2e-6 from an integer, inside
    // the ambiguity band (tol_int, 100 tol_int)
    let ex = e(0.9, 8.0);
    let ks = k_star(55, ex);
    let dist = (ks - ks.round()).abs();
    assert!(
        dist > 1e-8 * 55.0 && dist < 1e-6 * 55.0,
        "band moved: {dist}"
    );
    let report = verify(&best_integer_config(55, ex).realize(), ex, DEFAULT_TOL_EQ);
    let warning = report.warning.expect("ambiguous m_star must be flagged");
    assert!(warning.contains("m_star"), "unexpected warning: {warning}");
}

#[test]
fn classification_agrees_with_numeric_flags_on_constructed_vectors() {
    let cases: Vec<(Vec<f64>, f64, f64)> = vec![
        (vec![2.0; 6], 0.5, 2.0),                                 // all equal
        (vec![1.0, 0.0, 0.0, 0.0], 1.0, 2.0),                     // m = 1
        (vec![2.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1.0, 2.0), // m = 2
        (vec![1.0, 0.0], 1.0, 2.0),                               // m fractional
        (vec![1.0, 2.0, 3.0], 0.5, 2.0),                          // generic
        (vec![-3.0, 3.0, 3.0, -3.0], 0.3, 4.0),                   // signed equal
    ];
    for (entries, p, q) in cases {
        let x = Signal::new(entries).unwrap();
        let ex = e(p, q);
        let report = verify(&x, ex, DEFAULT_TOL_EQ);
        let class = classify_equality(&x, ex, DEFAULT_TOL_EQ);
        let structural_first = matches!(class, EqualityClass::First | EqualityClass::Both);
        let structural_second = matches!(class, EqualityClass::Second | EqualityClass::Both);
        assert_eq!(report.equality_first, structural_first, "{report:?}");
        assert_eq!(report.equality_second, structural_second, "{report:?}");
        assert!(report.warning.is_none(), "{report:?}");
    }
}

#[test]
fn attainment_ratio_consistent_with_enumeration() {
    for &(p, q) in &[(1.0, 2.0), (0.5, 2.0)] {
        let ex = e(p, q);
        for &n in &[2usize, 4, 9, 33, 128] {
            let ratio = attainment_ratio(n, ex);
            let (max_gap, _) = border_enumeration_max(n, ex);
            let coeff = (n as f64).powf(1.0 / q) * normgap::gapbound::sharpness_constant(ex);
            assert!((ratio - max_gap / coeff).abs() <= 1e-12);
            assert!(ratio > 0.0 && ratio <= 1.0 + 1e-12);
        }
    }
}

#[test]
fn adversarial_search_clean_on_moderate_budget() {
    for &(n, p, q) in &[(2usize, 1.0, 2.0), (8, 0.5, 4.0), (64, 0.1, 1.5)] {
        let r = random_adversarial_search(n, e(p, q), 20_000, 3);
        assert_eq!(
            r.violations, 0,
            "n={n} p={p} q={q}: {:?}",
            r.violation_examples
        );
        assert!(r.worst_report.verified);
    }
}

#[test]
fn lemma1_shift_holds_on_moderate_budget() {
    assert!(check_lemma1_shift(20_000, 31));
}

#[test]
fn f_monotone_on_random_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let grid: Vec<f64> = (1..=50).map(|i| 0.12 * i as f64).collect();
    for _ in 0..40 {
        let n = rng.random_range(1..20usize);
        let entries: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let x = Signal::new(entries).unwrap();
        assert!(check_f_monotone(&x, &grid), "f not monotone for {x:?}");
    }
}

#[test]
fn constant_monotone_on_fine_grids() {
    let p_grid: Vec<f64> = (1..=50).map(|i| 0.02 * i as f64).collect();
    let q_grid: Vec<f64> = (1..=50).map(|i| 1.0 + 1.26 * i as f64).collect();
    assert!(check_constant_monotonicity(&p_grid, &q_grid));
}

#[test]
fn pth_power_limit_matches_support_size_on_integer_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let p = PExponent::new(1e-6).unwrap();
    for _ in 0..60 {
        let n = rng.random_range(1..40usize);
        let entries: Vec<f64> = (0..n)
            .map(|_| {
                if rng.random::<f64>() < 0.4 {
                    0.0
                } else {
                    rng.random_range(1..1000u32) as f64
                        * if rng.random::<bool>() { 1.0 } else { -1.0 }
                }
            })
            .collect();
        let x = Signal::new(entries).unwrap();
        let nnz = l0_norm(&x, 0.0) as f64;
        let approx = lp_norm_pth_power(&x, p);
        assert!(
            (approx - nnz).abs() <= 1e-4 * nnz + 1e-6,
            "pth power {approx} vs support {nnz}"
        );
    }
}

#[test]
fn upper_bound_reduces_to_root_n_over_four_at_one_two() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ex = e(1.0, 2.0);
    for _ in 0..50 {
        let n = rng.random_range(1..60usize);
        let entries: Vec<f64> = (0..n).map(|_| rng.random_range(-9.0..9.0)).collect();
        let x = Signal::new(entries).unwrap();
        let (max_a, min_a) = normgap::norms::max_abs_min_abs(&x);
        let independent = (n as f64).sqrt() / 4.0 * (max_a - min_a);
        let b = upper_bound(&x, ex);
        assert!(
            (b - independent).abs() <= 1e-13 * independent.max(1.0),
            "{b} vs {independent}"
        );
    }
}
