//! ℓ_p quasi-norm evaluation, ℓ_0 counting, and normalized power means.
//!
//! All norms are computed with max-magnitude scaling: the largest absolute
//! entry is factored out before exponentiation, so exponents as small as
//! 1e-6 and entries near the f64 range limits stay representable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite real vector with at least one entry.
///
/// Entries are validated once at construction; every operation taking a
/// `Signal` may assume finiteness and nonzero length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Signal {
    entries: Vec<f64>,
}

impl Signal {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput(
                "signal must have at least one entry".into(),
            ));
        }
        if let Some((i, v)) = entries.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite entry {v} at index {i}"
            )));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[allow(clippy::len_without_is_empty)] // a Signal is never empty
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.entries
    }
}

impl TryFrom<Vec<f64>> for Signal {
    type Error = Error;

    fn try_from(entries: Vec<f64>) -> Result<Self> {
        Signal::new(entries)
    }
}

impl From<Signal> for Vec<f64> {
    fn from(s: Signal) -> Self {
        s.entries
    }
}

/// A strictly positive norm exponent.
///
/// Any finite p > 0 is accepted here; the tighter ranges required by the
/// gap bound (0 < p ≤ 1 < q) are enforced by [`crate::gapbound::Exponents`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PExponent(f64);

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || p <= 0.0 {
            return Err(Error::Domain(format!(
                "norm exponent must be finite and positive, got {p}"
            )));
        }
        Ok(Self(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for PExponent {
    type Error = Error;

    fn try_from(p: f64) -> Result<Self> {
        PExponent::new(p)
    }
}

impl From<PExponent> for f64 {
    fn from(p: PExponent) -> Self {
        p.0
    }
}

// One scaled term (|v|/m)^p. The direct ratio is used whenever it is
// representable; for spreads beyond ~600 orders of magnitude the ratio
// underflows, which matters for tiny p (a lost term is then O(1)), so the
// exponent is taken through logs instead.
fn scaled_power(v: f64, m: f64, p: f64) -> f64 {
    let a = v.abs();
    if a == 0.0 {
        return 0.0;
    }
    let r = a / m;
    if r >= 1e-300 {
        r.powf(p)
    } else {
        (p * (a.ln() - m.ln())).exp()
    }
}

fn scaled_power_sum(x: &Signal, m: f64, p: f64) -> f64 {
    x.entries().iter().map(|&v| scaled_power(v, m, p)).sum()
}

/// (Σ_i |x_i|^p)^{1/p}, returning 0 for the all-zero vector.
pub fn lp_norm(x: &Signal, p: PExponent) -> f64 {
    let p = p.value();
    let m = max_abs(x);
    if m == 0.0 {
        return 0.0;
    }
    m * scaled_power_sum(x, m, p).powf(1.0 / p)
}

/// Σ_i |x_i|^p, without the final 1/p root.
///
/// As p → 0⁺ this tends to the number of nonzero entries.
pub fn lp_norm_pth_power(x: &Signal, p: PExponent) -> f64 {
    let p = p.value();
    let m = max_abs(x);
    if m == 0.0 {
        return 0.0;
    }
    m.powf(p) * scaled_power_sum(x, m, p)
}

/// Number of entries with |x_i| > zero_tol.
pub fn l0_norm(x: &Signal, zero_tol: f64) -> usize {
    assert!(
        zero_tol >= 0.0 && zero_tol.is_finite(),
        "zero_tol must be finite and nonnegative, got {zero_tol}"
    );
    x.entries().iter().filter(|v| v.abs() > zero_tol).count()
}

/// ((Σ_i |x_i|^p)/n)^{1/p}: the power mean of order p of the magnitudes.
pub fn normalized_lp(x: &Signal, p: PExponent) -> f64 {
    let p = p.value();
    let m = max_abs(x);
    if m == 0.0 {
        return 0.0;
    }
    let n = x.len() as f64;
    // (sum/n)^{1/p} is computed before rescaling by m; the ratio sum/n lies
    // in [1/n, 1], so no intermediate blows up even for p near 0.
    m * (scaled_power_sum(x, m, p) / n).powf(1.0 / p)
}

/// (max_i |x_i|, min_i |x_i|); the min ranges over all entries, zeros included.
pub fn max_abs_min_abs(x: &Signal) -> (f64, f64) {
    let mut max = 0.0f64;
    let mut min = f64::INFINITY;
    for &v in x.entries() {
        let a = v.abs();
        max = max.max(a);
        min = min.min(a);
    }
    (max, min)
}

fn max_abs(x: &Signal) -> f64 {
    x.entries().iter().fold(0.0f64, |acc, &v| acc.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_relative_eq, relative_eq};

    fn sig(v: &[f64]) -> Signal {
        Signal::new(v.to_vec()).unwrap()
    }

    fn pexp(p: f64) -> PExponent {
        PExponent::new(p).unwrap()
    }

    #[test]
    fn signal_rejects_bad_input() {
        assert!(Signal::new(vec![]).is_err());
        assert!(Signal::new(vec![1.0, f64::NAN]).is_err());
        assert!(Signal::new(vec![f64::INFINITY]).is_err());
        assert!(Signal::new(vec![0.0]).is_ok());
    }

    #[test]
    fn pexponent_rejects_nonpositive() {
        assert!(PExponent::new(0.0).is_err());
        assert!(PExponent::new(-1.0).is_err());
        assert!(PExponent::new(f64::NAN).is_err());
        assert!(PExponent::new(f64::INFINITY).is_err());
        assert!(PExponent::new(1e-9).is_ok());
    }

    #[test]
    fn euclidean_identity() {
        assert_relative_eq!(
            lp_norm(&sig(&[3.0, 4.0]), pexp(2.0)),
            5.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn all_ones_is_n_to_the_one_over_p() {
        let x = sig(&[1.0; 8]);
        assert_relative_eq!(lp_norm(&x, pexp(0.5)), 64.0, max_relative = 1e-15);
    }

    #[test]
    fn half_norm_against_direct_summation() {
        // independent route: direct high-precision style evaluation
        let direct = (1.0 + 2.0f64.sqrt() + 3.0f64.sqrt()).powi(2);
        let got = lp_norm(&sig(&[1.0, 2.0, 3.0]), pexp(0.5));
        assert_relative_eq!(got, direct, max_relative = 1e-14);
        assert_relative_eq!(got, 17.1915082254503, max_relative = 1e-14);
    }

    #[test]
    fn pth_power_basics() {
        assert_relative_eq!(
            lp_norm_pth_power(&sig(&[0.0, 0.0, 5.0]), pexp(1.0)),
            5.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            lp_norm_pth_power(&sig(&[1.0, 1.0]), pexp(0.5)),
            2.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn pth_power_approaches_nonzero_count() {
        let x = sig(&[2.0, 0.0, 3.0]);
        let got = lp_norm_pth_power(&x, pexp(1e-6));
        let nnz = l0_norm(&x, 0.0) as f64;
        assert!((got - nnz).abs() < 1e-4, "got {got}, expected near {nnz}");
    }

    #[test]
    fn l0_threshold_semantics() {
        assert_eq!(l0_norm(&sig(&[0.0, 0.0, 0.0]), 0.0), 0);
        assert_eq!(l0_norm(&sig(&[0.0, 0.0, 0.0]), 1.0), 0);
        assert_eq!(l0_norm(&sig(&[1e-12, 2.0, 0.0]), 1e-9), 1);
        assert_eq!(l0_norm(&sig(&[0.5, -0.5, 0.0]), 0.0), 2);
    }

    #[test]
    fn normalized_lp_of_constant_is_the_constant() {
        for &n in &[1usize, 3, 17] {
            for &p in &[0.25, 1.0, 3.0] {
                let x = sig(&vec![4.2; n]);
                assert_relative_eq!(normalized_lp(&x, pexp(p)), 4.2, max_relative = 1e-15);
            }
        }
    }

    #[test]
    fn normalized_lp_examples() {
        assert_relative_eq!(
            normalized_lp(&sig(&[1.0, 0.0]), pexp(1.0)),
            0.5,
            max_relative = 1e-15
        );
        // direct evaluation oracle: ((1 + sqrt 2 + 2)/3)^2
        let direct = ((1.0 + 2.0f64.sqrt() + 2.0) / 3.0).powi(2);
        assert_relative_eq!(
            normalized_lp(&sig(&[1.0, 2.0, 4.0]), pexp(0.5)),
            direct,
            max_relative = 1e-14
        );
        assert_relative_eq!(direct, 2.1650312638042856, max_relative = 1e-15);
    }

    #[test]
    fn max_min_abs_examples() {
        assert_eq!(max_abs_min_abs(&sig(&[-3.0, 1.0, 0.0])), (3.0, 0.0));
        assert_eq!(max_abs_min_abs(&sig(&[5.0])), (5.0, 5.0));
        assert_eq!(max_abs_min_abs(&sig(&[2.0, 2.0, 2.0])), (2.0, 2.0));
    }

    #[test]
    fn no_overflow_for_huge_entries() {
        let x = sig(&[1e300, 1e300]);
        let v = lp_norm(&x, pexp(0.5));
        assert!(v.is_finite());
        assert_relative_eq!(v, 4e300, max_relative = 1e-14);
    }

    #[test]
    fn no_underflow_for_tiny_entries() {
        let x = sig(&[1e-300, 1e-300]);
        let v = lp_norm(&x, pexp(0.5));
        assert!(v > 0.0);
        assert_relative_eq!(v, 4e-300, max_relative = 1e-14);
    }

    #[test]
    fn tiny_p_stays_finite_in_pth_power() {
        let x = sig(&[1e300, 1e-300, 0.0]);
        let v = lp_norm_pth_power(&x, pexp(1e-6));
        assert!(v.is_finite());
        // both nonzero magnitudes contribute roughly 1 at p = 1e-6
        assert!((v - 2.0).abs() < 2e-3, "got {v}");
    }

    #[test]
    fn serde_signal_validates() {
        let ok: std::result::Result<Signal, _> = serde_json::from_str("[1.0, 2.0]");
        assert!(ok.is_ok());
        let bad: std::result::Result<Signal, _> = serde_json::from_str("[]");
        assert!(bad.is_err());
    }

    proptest::proptest! {
        #[test]
        fn homogeneity(
            entries in proptest::collection::vec(-1e6f64..1e6, 1..24),
            alpha in -100.0f64..100.0,
            p in 0.05f64..4.0,
        ) {
            let x = sig(&entries);
            let scaled = sig(&entries.iter().map(|v| alpha * v).collect::<Vec<_>>());
            let p = pexp(p);
            let lhs = lp_norm(&scaled, p);
            let rhs = alpha.abs() * lp_norm(&x, p);
            proptest::prop_assert!(
                relative_eq!(lhs, rhs, max_relative = 1e-12, epsilon = 1e-300),
                "lhs={lhs} rhs={rhs}"
            );
        }

        #[test]
        fn permutation_and_sign_invariance(
            entries in proptest::collection::vec(-1e3f64..1e3, 1..16),
            p in 0.1f64..4.0,
            flips in proptest::collection::vec(proptest::bool::ANY, 16),
        ) {
            let x = sig(&entries);
            let mut permuted: Vec<f64> = entries
                .iter()
                .zip(flips.iter().chain(std::iter::repeat(&false)))
                .map(|(&v, &f)| if f { -v } else { v })
                .collect();
            permuted.reverse();
            let y = sig(&permuted);
            let p = pexp(p);
            proptest::prop_assert!(relative_eq!(
                lp_norm(&x, p), lp_norm(&y, p),
                max_relative = 1e-12, epsilon = 1e-300
            ));
            proptest::prop_assert!(relative_eq!(
                normalized_lp(&x, p), normalized_lp(&y, p),
                max_relative = 1e-12, epsilon = 1e-300
            ));
            proptest::prop_assert_eq!(l0_norm(&x, 0.0), l0_norm(&y, 0.0));
            proptest::prop_assert_eq!(max_abs_min_abs(&x), max_abs_min_abs(&y));
        }

        #[test]
        fn power_mean_monotone(
            entries in proptest::collection::vec(-1e3f64..1e3, 1..16),
            p in 0.05f64..2.0,
            dq in 0.01f64..4.0,
        ) {
            let x = sig(&entries);
            let lo = normalized_lp(&x, pexp(p));
            let hi = normalized_lp(&x, pexp(p + dq));
            let scale = entries.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            proptest::prop_assert!(lo <= hi + 1e-12 * scale, "lo={lo} hi={hi}");
        }
    }
}
