//! The sharp gap bound between the ℓ_q norm and the rescaled ℓ_p quasi-norm.
//!
//! For any real n-vector x, 0 < p ≤ 1 and q > 1,
//!
//! ```text
//! 0 ≤ ‖x‖_q − n^{1/q−1/p}‖x‖_p ≤ n^{1/q} c_{p,q} (max|x_i| − min|x_i|)
//! ```
//!
//! with c_{p,q} = (1 − p/q)(p/q)^{p/(q−p)}. The left side is zero exactly
//! when all |x_i| agree; the right side is attained exactly when all |x_i|
//! agree or when m = n(p/q)^{pq/(q−p)} is a positive integer and x has m
//! entries of equal magnitude with the rest zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{lp_norm, max_abs_min_abs, PExponent, Signal};

/// Default relative tolerance for equality detection and verification.
pub const DEFAULT_TOL_EQ: f64 = 1e-9;

/// A validated exponent pair with 0 < p ≤ 1 and q > 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Exponents {
    p: PExponent,
    q: PExponent,
}

impl Exponents {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        let p = PExponent::new(p)?;
        let q = PExponent::new(q)?;
        if p.value() > 1.0 {
            return Err(Error::Domain(format!(
                "p must satisfy 0 < p <= 1, got {}",
                p.value()
            )));
        }
        if q.value() <= 1.0 {
            return Err(Error::Domain(format!(
                "q must satisfy q > 1, got {}",
                q.value()
            )));
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p.value()
    }

    pub fn q(&self) -> f64 {
        self.q.value()
    }

    pub fn p_exponent(&self) -> PExponent {
        self.p
    }

    pub fn q_exponent(&self) -> PExponent {
        self.q
    }
}

/// How a vector relates to the two equality cases of the gap bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EqualityClass {
    /// Neither equality condition is met.
    None,
    /// Only the lower (gap = 0) condition is met.
    First,
    /// Only the upper (gap = bound) condition is met.
    Second,
    /// All |x_i| equal: both sides are tight simultaneously.
    Both,
}

/// Evaluated gap, bound, slack, and equality classification for one (x, p, q).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub lhs_norm_q: f64,
    pub scaled_norm_p: f64,
    pub gap: f64,
    pub bound: f64,
    pub slack: f64,
    pub range: f64,
    pub equality_first: bool,
    pub equality_second: bool,
    pub m_star: f64,
    pub verified: bool,
    pub warning: Option<String>,
}

/// c_{p,q} = (1 − p/q)(p/q)^{p/(q−p)}, always in (0, 1).
///
/// The power is routed through exp/ln so that q close to p (where the
/// exponent p/(q−p) is huge) stays accurate.
pub fn sharpness_constant(e: Exponents) -> f64 {
    let (p, q) = (e.p(), e.q());
    let r = p / q;
    (1.0 - r) * ((p / (q - p)) * r.ln()).exp()
}

/// The q = 2 specialization c_p = (1 − p/2)(p/2)^{p/(2−p)}.
pub fn sharpness_constant_q2(p: f64) -> Result<f64> {
    let e = Exponents::new(p, 2.0)?;
    Ok(sharpness_constant(e))
}

// Both norms of the sandwich, computed once so `gap` and `verify` agree bit
// for bit: (‖x‖_q, n^{1/q−1/p}·‖x‖_p).
fn norm_pair(x: &Signal, e: Exponents) -> (f64, f64) {
    let n = x.len() as f64;
    let lhs = lp_norm(x, e.q_exponent());
    let scaled = n.powf(1.0 / e.q() - 1.0 / e.p()) * lp_norm(x, e.p_exponent());
    (lhs, scaled)
}

/// ‖x‖_q − n^{1/q−1/p}‖x‖_p.
///
/// Mathematically nonnegative; the raw float value is returned unclamped so
/// that verification tolerances, not silent clamping, decide correctness.
pub fn gap(x: &Signal, e: Exponents) -> f64 {
    let (lhs, scaled) = norm_pair(x, e);
    lhs - scaled
}

/// n^{1/q} c_{p,q} (max|x_i| − min|x_i|).
pub fn upper_bound(x: &Signal, e: Exponents) -> f64 {
    let n = x.len() as f64;
    let (max_a, min_a) = max_abs_min_abs(x);
    n.powf(1.0 / e.q()) * sharpness_constant(e) * (max_a - min_a)
}

/// Absolute tolerance used when deciding whether m_star is an integer.
fn integer_tolerance(n: usize) -> f64 {
    1e-8 * n as f64
}

/// Structural equality classification for the two tightness cases.
///
/// "First" requires all |x_i| equal within tol; "second" additionally admits
/// m entries of one magnitude and the rest zero when m_star rounds to a
/// positive integer m. The strongest applicable label is returned.
pub fn classify_equality(x: &Signal, e: Exponents, tol: f64) -> EqualityClass {
    assert!(tol > 0.0, "tolerance must be positive, got {tol}");
    let (max_a, min_a) = max_abs_min_abs(x);
    let scale = max_a.max(1.0);
    if max_a - min_a <= tol * scale {
        return EqualityClass::Both;
    }

    let n = x.len();
    let m_star = crate::extremal::k_star(n, e);
    let m = m_star.round();
    if m >= 1.0 && (m_star - m).abs() <= integer_tolerance(n) {
        let m = m as usize;
        let nonzero: Vec<f64> = x
            .entries()
            .iter()
            .map(|v| v.abs())
            .filter(|a| *a > tol * scale)
            .collect();
        if nonzero.len() == m {
            let hi = nonzero.iter().cloned().fold(0.0f64, f64::max);
            let lo = nonzero.iter().cloned().fold(f64::INFINITY, f64::min);
            if hi - lo <= tol * scale {
                return EqualityClass::Second;
            }
        }
    }
    EqualityClass::None
}

/// Evaluate both sides of the gap bound and classify equality.
///
/// `tol_eq` is relative to scale = max(1, max|x_i|). Numeric flags are
/// cross-checked against the structural classification; any disagreement,
/// and any ambiguously-near-integer m_star, is recorded in `warning`.
pub fn verify(x: &Signal, e: Exponents, tol_eq: f64) -> GapReport {
    assert!(tol_eq > 0.0, "tol_eq must be positive, got {tol_eq}");
    let n = x.len();
    let (max_a, min_a) = max_abs_min_abs(x);
    let scale = max_a.max(1.0);

    let (lhs_norm_q, scaled_norm_p) = norm_pair(x, e);
    let gap_v = lhs_norm_q - scaled_norm_p;
    let bound_v = upper_bound(x, e);
    let slack = bound_v - gap_v;
    let m_star = crate::extremal::k_star(n, e);

    let equality_first = gap_v.abs() <= tol_eq * scale;
    let equality_second = slack.abs() <= tol_eq * scale;
    let verified = gap_v >= -tol_eq * scale && slack >= -tol_eq * scale;

    let structural = classify_equality(x, e, tol_eq);
    let structural_first = matches!(structural, EqualityClass::First | EqualityClass::Both);
    let structural_second = matches!(structural, EqualityClass::Second | EqualityClass::Both);

    let mut warnings: Vec<String> = Vec::new();
    if equality_first != structural_first {
        warnings.push(format!(
            "first-equality disagreement: numeric={equality_first}, structural={structural_first}"
        ));
    }
    if equality_second != structural_second {
        warnings.push(format!(
            "second-equality disagreement: numeric={equality_second}, structural={structural_second}"
        ));
    }
    let tol_int = integer_tolerance(n);
    let int_dist = (m_star - m_star.round()).abs();
    if int_dist > tol_int && int_dist <= 100.0 * tol_int {
        warnings.push(format!(
            "m_star={m_star} is ambiguously close to an integer (distance {int_dist:.3e})"
        ));
    }

    GapReport {
        n,
        p: e.p(),
        q: e.q(),
        lhs_norm_q,
        scaled_norm_p,
        gap: gap_v,
        bound: bound_v,
        slack,
        range: max_a - min_a,
        equality_first,
        equality_second,
        m_star,
        verified,
        warning: if warnings.is_empty() {
            None
        } else {
            Some(warnings.join("; "))
        },
    }
}

/// The two-level auxiliary function
/// s(x, y) = (k x^q + (n−k) y^q)^{1/q} − n^{1/q−1/p} (k x^p + (n−k) y^p)^{1/p}
/// for x > y ≥ 0 and 1 ≤ k < n.
///
/// Satisfies the shift inequality s(x, y) ≤ s(x − y, 0).
pub fn lemma1_s(xv: f64, yv: f64, n: usize, k: usize, e: Exponents) -> Result<f64> {
    if !xv.is_finite() || !yv.is_finite() || !(xv > yv && yv >= 0.0) {
        return Err(Error::Domain(format!(
            "lemma1_s requires x > y >= 0, got x={xv}, y={yv}"
        )));
    }
    if !(1..n).contains(&k) {
        return Err(Error::Domain(format!(
            "lemma1_s requires 1 <= k < n, got k={k}, n={n}"
        )));
    }
    let (p, q) = (e.p(), e.q());
    let (kf, nf) = (k as f64, n as f64);
    let t = yv / xv; // in [0, 1): scaling by x keeps the powers tame
    let inner_q = kf + (nf - kf) * t.powf(q);
    let inner_p = kf + (nf - kf) * t.powf(p);
    Ok(xv * (inner_q.powf(1.0 / q) - nf.powf(1.0 / q - 1.0 / p) * inner_p.powf(1.0 / p)))
}
