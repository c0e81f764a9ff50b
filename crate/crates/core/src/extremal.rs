//! Construction of vectors that attain or approach the gap upper bound.
//!
//! The gap restricted to border vectors (k entries at one value, n−k at
//! another, here 1 and 0) reduces to l(k) = k^{1/q} − n^{1/q−1/p} k^{1/p},
//! a unimodal function of k whose continuous maximizer is
//! k* = n(p/q)^{pq/(q−p)}. The bound is attained exactly when k* is an
//! integer in [1, n−1].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gapbound::{gap, sharpness_constant, Exponents};
use crate::norms::Signal;

/// A border configuration: k entries at `high`, n−k entries at `low`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremalConfig {
    n: usize,
    k: usize,
    high: f64,
    low: f64,
}

impl ExtremalConfig {
    pub fn new(n: usize, k: usize, high: f64, low: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("n must be at least 2, got {n}")));
        }
        if !(1..n).contains(&k) {
            return Err(Error::Domain(format!(
                "k must lie in [1, n-1], got k={k}, n={n}"
            )));
        }
        if !(high.is_finite() && low.is_finite() && high > 0.0 && (0.0..high).contains(&low)) {
            return Err(Error::Domain(format!(
                "levels must satisfy high > low >= 0, got high={high}, low={low}"
            )));
        }
        Ok(Self { n, k, high, low })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn high(&self) -> f64 {
        self.high
    }

    pub fn low(&self) -> f64 {
        self.low
    }

    /// The vector with k leading entries at `high` and the rest at `low`.
    pub fn realize(&self) -> Signal {
        let mut entries = vec![self.low; self.n];
        entries[..self.k].fill(self.high);
        Signal::new(entries).expect("validated configuration realizes a valid signal")
    }
}

/// l(k) = k^{1/q} − n^{1/q−1/p} k^{1/p} for real k in (0, n).
pub fn l_of_k(k: f64, n: usize, e: Exponents) -> Result<f64> {
    let nf = n as f64;
    if !k.is_finite() || k <= 0.0 || k >= nf {
        return Err(Error::Domain(format!(
            "l_of_k requires 0 < k < n, got k={k}, n={n}"
        )));
    }
    Ok(k.powf(1.0 / e.q()) - nf.powf(1.0 / e.q() - 1.0 / e.p()) * k.powf(1.0 / e.p()))
}

/// k* = n(p/q)^{pq/(q−p)}, the continuous maximizer of [`l_of_k`].
pub fn k_star(n: usize, e: Exponents) -> f64 {
    let (p, q) = (e.p(), e.q());
    n as f64 * (p / q).powf(p * q / (q - p))
}

/// The best integer border configuration (high = 1, low = 0).
///
/// Candidates are floor(k*) and ceil(k*) clamped to [1, n−1]; by
/// unimodality of l the integer maximum lies there. Ties break to the
/// smaller k.
pub fn best_integer_config(n: usize, e: Exponents) -> ExtremalConfig {
    assert!(n >= 2, "n must be at least 2, got {n}");
    let ks = k_star(n, e);
    let max_k = (n - 1) as f64;
    let lo = ks.floor().clamp(1.0, max_k) as usize;
    let hi = ks.ceil().clamp(1.0, max_k) as usize;
    let k = if lo == hi {
        lo
    } else {
        let l_lo = l_of_k(lo as f64, n, e).expect("clamped candidate is in range");
        let l_hi = l_of_k(hi as f64, n, e).expect("clamped candidate is in range");
        if l_lo >= l_hi {
            lo
        } else {
            hi
        }
    };
    ExtremalConfig::new(n, k, 1.0, 0.0).expect("clamped k is in [1, n-1]")
}

/// Realized extremal gap divided by the bound coefficient n^{1/q} c_{p,q}.
///
/// Equals 1 (within float error) exactly when k* is an integer in [1, n−1].
pub fn attainment_ratio(n: usize, e: Exponents) -> f64 {
    let config = best_integer_config(n, e);
    let realized = config.realize();
    gap(&realized, e) / ((n as f64).powf(1.0 / e.q()) * sharpness_constant(e))
}
