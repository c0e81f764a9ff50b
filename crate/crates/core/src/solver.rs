//! IRLS ℓ_p minimization for underdetermined linear systems.
//!
//! Solves min ‖x‖_p subject to Φx = b (or ‖b − Φx‖₂ ≤ ε when a noise level
//! is given) by iteratively reweighted least squares with ε-continuation:
//! weights w_i = (x_i² + ε)^{p/2−1}, each step the closed-form weighted
//! least-norm solution x = DΦᵀ(ΦDΦᵀ)⁻¹b with D = diag(1/w_i), ε shrinking
//! whenever the iterate stalls. Gap reports on the iterates expose how far
//! each one sits from the two-norm/p-norm equality structure.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gapbound::{verify, Exponents, GapReport, DEFAULT_TOL_EQ};
use crate::norms::{lp_norm_pth_power, PExponent, Signal};
use crate::seeding::derive_seed;

/// Relative recovery error under which a sweep trial counts as a success.
pub const SUCCESS_THRESHOLD: f64 = 1e-3;

/// An underdetermined measurement system b = Φx + z with ‖z‖₂ ≤ ε.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementProblem {
    matrix: DMatrix<f64>,
    rhs: DVector<f64>,
    noise_level: f64,
}

impl MeasurementProblem {
    /// Build a problem, requiring m < n (the underdetermined regime).
    pub fn new(matrix: DMatrix<f64>, rhs: DVector<f64>, noise_level: f64) -> Result<Self> {
        let p = Self::new_determined(matrix, rhs, noise_level)?;
        if p.m() >= p.n() {
            return Err(Error::Dimension(format!(
                "measurement matrix must be underdetermined (m < n), got {}x{}",
                p.m(),
                p.n()
            )));
        }
        Ok(p)
    }

    /// Build a problem of any shape, including square/overdetermined test
    /// systems.
    pub fn new_determined(
        matrix: DMatrix<f64>,
        rhs: DVector<f64>,
        noise_level: f64,
    ) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::Dimension("matrix must be nonempty".into()));
        }
        if rhs.len() != matrix.nrows() {
            return Err(Error::Dimension(format!(
                "rhs length {} does not match matrix rows {}",
                rhs.len(),
                matrix.nrows()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) || rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "non-finite entry in problem data".into(),
            ));
        }
        if !noise_level.is_finite() || noise_level < 0.0 {
            return Err(Error::InvalidInput(format!(
                "noise level must be finite and nonnegative, got {noise_level}"
            )));
        }
        Ok(Self {
            matrix,
            rhs,
            noise_level,
        })
    }

    /// Build from row-major nested vectors (the CSV reader's output).
    pub fn from_rows(rows: &[Vec<f64>], rhs: &[f64], noise_level: f64) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::Dimension("matrix must be nonempty".into()));
        }
        let m = rows.len();
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        let matrix = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
        Self::new(matrix, DVector::from_column_slice(rhs), noise_level)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.rhs
    }

    pub fn noise_level(&self) -> f64 {
        self.noise_level
    }

    pub fn m(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n(&self) -> usize {
        self.matrix.ncols()
    }
}

/// IRLS controls. `log_every = 0` disables gap diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrlsOptions {
    pub max_iters: usize,
    pub eps_init: f64,
    pub eps_floor: f64,
    pub eps_decay: f64,
    pub convergence_tol: f64,
    pub log_every: usize,
    pub diagnostic_q: f64,
}

impl Default for IrlsOptions {
    fn default() -> Self {
        Self {
            max_iters: 200,
            eps_init: 1.0,
            eps_floor: 1e-8,
            eps_decay: 0.1,
            convergence_tol: 1e-8,
            log_every: 10,
            diagnostic_q: 2.0,
        }
    }
}

/// Solver output: the recovered vector plus per-iteration traces.
///
/// `objective_trace` holds the objective each iteration actually descends,
/// Σ(x_i²+ε)^{p/2}; the majorization step makes it non-increasing within
/// every fixed-ε phase. `lp_objective_trace` holds the raw ‖x‖_p^p (which
/// the surrogate approaches as ε shrinks, but which individual reweighting
/// steps may briefly raise). `eps_trace` records the ε in force at each
/// iteration; equal consecutive values form one phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub solution: Signal,
    pub iterations: usize,
    pub objective_trace: Vec<f64>,
    pub lp_objective_trace: Vec<f64>,
    pub eps_trace: Vec<f64>,
    pub final_residual: f64,
    pub gap_diagnostics: Vec<GapReport>,
}

// Φ D Φᵀ formed by scaling columns of Φ (D is diagonal).
fn phi_d_phit(phi: &DMatrix<f64>, d: &DVector<f64>) -> DMatrix<f64> {
    let mut scaled = phi.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= d[j];
    }
    scaled * phi.transpose()
}

// SPD solve with additive regularization 1e-12·trace/m on Cholesky failure.
fn solve_spd(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    if let Some(ch) = a.clone().cholesky() {
        return Ok(ch.solve(b));
    }
    let reg = 1e-12 * a.trace() / a.nrows() as f64;
    let mut regularized = a.clone();
    for i in 0..regularized.nrows() {
        regularized[(i, i)] += reg;
    }
    regularized.cholesky().map(|ch| ch.solve(b)).ok_or_else(|| {
        Error::SolverFailure("weighted Gram matrix is singular even after regularization".into())
    })
}

fn weighted_least_norm(
    phi: &DMatrix<f64>,
    b: &DVector<f64>,
    d: &DVector<f64>,
) -> Result<DVector<f64>> {
    let a = phi_d_phit(phi, d);
    let y = solve_spd(&a, b)?;
    Ok(d.component_mul(&(phi.transpose() * y)))
}

// Penalized form for noisy data: x(λ) = DΦᵀ(ΦDΦᵀ + λI)⁻¹b with λ chosen by
// bisection so the residual matches the noise level (discrepancy rule).
fn weighted_discrepancy(
    phi: &DMatrix<f64>,
    b: &DVector<f64>,
    d: &DVector<f64>,
    noise_level: f64,
) -> Result<DVector<f64>> {
    if b.norm() <= noise_level {
        return Ok(DVector::zeros(phi.ncols()));
    }
    let a = phi_d_phit(phi, d);
    let lam_scale = (a.trace() / a.nrows() as f64).max(f64::MIN_POSITIVE);
    let solve_at = |lam: f64| -> Result<DVector<f64>> {
        let mut al = a.clone();
        for i in 0..al.nrows() {
            al[(i, i)] += lam;
        }
        let y = solve_spd(&al, b)?;
        Ok(d.component_mul(&(phi.transpose() * y)))
    };
    let residual_at = |x: &DVector<f64>| (b - phi * x).norm();

    // the residual is increasing in λ: bracket the noise level in log space
    let mut lo = 1e-14 * lam_scale;
    let mut hi = 1e14 * lam_scale;
    let mut x = solve_at(lo)?;
    if residual_at(&x) >= noise_level {
        return Ok(x); // noise level unreachable from below; smallest-λ answer
    }
    // keep the iterate from the feasible side, so the returned residual
    // never exceeds the noise level
    for _ in 0..60 {
        let mid = ((lo.ln() + hi.ln()) / 2.0).exp(); // geometric midpoint
        let cand = solve_at(mid)?;
        if residual_at(&cand) < noise_level {
            lo = mid;
            x = cand;
        } else {
            hi = mid;
        }
    }
    Ok(x)
}

/// Run IRLS ℓ_p minimization (0 < p ≤ 1) on the given problem.
pub fn irls_lp(
    problem: &MeasurementProblem,
    p: PExponent,
    opts: &IrlsOptions,
) -> Result<SolveResult> {
    let pv = p.value();
    if pv > 1.0 {
        return Err(Error::Domain(format!("IRLS requires p <= 1, got {pv}")));
    }
    let opts_valid = opts.max_iters > 0
        && opts.eps_init.is_finite()
        && opts.eps_init > 0.0
        && opts.eps_floor.is_finite()
        && opts.eps_floor > 0.0
        && opts.eps_decay > 0.0
        && opts.eps_decay < 1.0
        && opts.convergence_tol.is_finite()
        && opts.convergence_tol > 0.0;
    if !opts_valid {
        return Err(Error::Domain("invalid IRLS options".into()));
    }
    let diag_exponents = Exponents::new(pv, opts.diagnostic_q)?;

    let phi = problem.matrix();
    let b = problem.rhs();
    let noiseless = problem.noise_level() == 0.0;
    let b_norm = b.norm();

    let mut x = DVector::<f64>::zeros(problem.n());
    let mut eps = opts.eps_init;
    let mut objective_trace = Vec::new();
    let mut lp_objective_trace = Vec::new();
    let mut eps_trace = Vec::new();
    let mut gap_diagnostics = Vec::new();
    let mut iterations = 0;

    for iter in 1..=opts.max_iters {
        iterations = iter;
        let d: DVector<f64> = x.map(|xi| (xi * xi + eps).powf(1.0 - pv / 2.0));
        let x_new = if noiseless {
            weighted_least_norm(phi, b, &d)?
        } else {
            weighted_discrepancy(phi, b, &d, problem.noise_level())?
        };
        if x_new.iter().any(|v| !v.is_finite()) {
            return Err(Error::SolverFailure(format!(
                "iterate {iter} produced non-finite entries"
            )));
        }
        if noiseless && b_norm > 0.0 {
            let res = (b - phi * &x_new).norm();
            if res > 1e-8 * b_norm {
                return Err(Error::SolverFailure(format!(
                    "iterate {iter}: residual {res:.3e} exceeds 1e-8 of the rhs norm"
                )));
            }
        }

        let step = (&x_new - &x).norm();
        x = x_new;
        let x_signal = Signal::new(x.iter().cloned().collect())
            .map_err(|e| Error::SolverFailure(format!("bad iterate: {e}")))?;
        objective_trace.push(x.iter().map(|&v| (v * v + eps).powf(pv / 2.0)).sum());
        lp_objective_trace.push(lp_norm_pth_power(&x_signal, p));
        eps_trace.push(eps);
        if opts.log_every > 0 && iter % opts.log_every == 0 {
            gap_diagnostics.push(verify(&x_signal, diag_exponents, DEFAULT_TOL_EQ));
        }

        if step <= opts.convergence_tol * x.norm().max(1e-30) {
            // an exactly stationary zero iterate stays zero for every ε
            if eps <= opts.eps_floor || (step == 0.0 && x.norm() == 0.0) {
                break;
            }
            eps = (eps * opts.eps_decay).max(opts.eps_floor);
        }
    }

    let solution = Signal::new(x.iter().cloned().collect())
        .map_err(|e| Error::SolverFailure(format!("bad solution: {e}")))?;
    if opts.log_every > 0 && iterations % opts.log_every != 0 {
        gap_diagnostics.push(verify(&solution, diag_exponents, DEFAULT_TOL_EQ));
    }
    let final_residual = (b - phi * &x).norm();

    Ok(SolveResult {
        solution,
        iterations,
        objective_trace,
        lp_objective_trace,
        eps_trace,
        final_residual,
        gap_diagnostics,
    })
}

/// Gap report for one solver iterate (p from the solve, diagnostic q > 1).
pub fn gap_diagnostic(x: &Signal, p: PExponent, q: f64) -> Result<GapReport> {
    let e = Exponents::new(p.value(), q)?;
    Ok(verify(x, e, DEFAULT_TOL_EQ))
}

// Instance generator shared by `gaussian_problem` (shape-checked) and
// `phase_sweep` (which also visits determined shapes).
fn gaussian_instance(m: usize, n: usize, k: usize, seed: u64) -> (MeasurementProblem, Signal) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (m as f64).sqrt();
    let mut matrix = DMatrix::zeros(m, n);
    for j in 0..n {
        for i in 0..m {
            let z: f64 = rng.sample(StandardNormal);
            matrix[(i, j)] = scale * z;
        }
    }
    let mut x0 = vec![0.0; n];
    for i in rand::seq::index::sample(&mut rng, n, k) {
        x0[i] = if rng.random::<bool>() { 1.0 } else { -1.0 };
    }
    let rhs = &matrix * DVector::from_column_slice(&x0);
    let problem =
        MeasurementProblem::new_determined(matrix, rhs, 0.0).expect("generated data is finite");
    (problem, Signal::new(x0).expect("n >= 1"))
}

/// A noiseless Gaussian sensing instance: Φ with N(0, 1/m) entries and a
/// k-sparse ±1 ground truth. Deterministic given the seed.
pub fn gaussian_problem(
    m: usize,
    n: usize,
    k: usize,
    seed: u64,
) -> Result<(MeasurementProblem, Signal)> {
    if !(k < m && m < n) {
        return Err(Error::Dimension(format!(
            "need k < m < n, got k={k}, m={m}, n={n}"
        )));
    }
    Ok(gaussian_instance(m, n, k, seed))
}

/// Relative ℓ2 recovery error, with an absolute reading when truth is zero.
pub fn relative_error(estimate: &Signal, truth: &Signal) -> f64 {
    let diff: f64 = estimate
        .entries()
        .iter()
        .zip(truth.entries())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let denom: f64 = truth.entries().iter().map(|v| v * v).sum::<f64>().sqrt();
    if denom > 0.0 {
        diff / denom
    } else {
        diff
    }
}

/// One row of the recovery success-rate table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub m: usize,
    pub k: usize,
    pub p: f64,
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
}

/// Success-rate table over an (m, k, p) grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTable {
    pub n: usize,
    pub seed: u64,
    pub rows: Vec<PhaseRow>,
}

impl PhaseTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,k,p,trials,successes,success_rate\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.m, r.k, r.p, r.trials, r.successes, r.success_rate
            ));
        }
        out
    }
}

/// Empirical recovery success rates over a grid of (m, k, p) at fixed n.
///
/// Success means relative error below [`SUCCESS_THRESHOLD`]. Trials are
/// independent with derived seeds, so the table is deterministic and
/// parallel-safe.
pub fn phase_sweep(
    n: usize,
    m_list: &[usize],
    k_list: &[usize],
    p_list: &[f64],
    trials: u64,
    seed: u64,
) -> Result<PhaseTable> {
    if m_list.is_empty() || k_list.is_empty() || p_list.is_empty() {
        return Err(Error::InvalidInput("sweep lists must be nonempty".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    for &k in k_list {
        if k > n {
            return Err(Error::Dimension(format!("sparsity k={k} exceeds n={n}")));
        }
    }
    let opts = IrlsOptions {
        log_every: 0,
        ..IrlsOptions::default()
    };
    let mut rows = Vec::new();
    let mut config_index = 0u64;
    for &m in m_list {
        for &k in k_list {
            for &p in p_list {
                let p_exp = PExponent::new(p)?;
                if p > 1.0 {
                    return Err(Error::Domain(format!("sweep requires p <= 1, got {p}")));
                }
                let successes = (0..trials)
                    .into_par_iter()
                    .filter(|&t| {
                        let s = derive_seed(seed, &[config_index, t]);
                        let (problem, truth) = gaussian_instance(m, n, k, s);
                        match irls_lp(&problem, p_exp, &opts) {
                            Ok(res) => relative_error(&res.solution, &truth) < SUCCESS_THRESHOLD,
                            Err(_) => false,
                        }
                    })
                    .count() as u64;
                rows.push(PhaseRow {
                    m,
                    k,
                    p,
                    trials,
                    successes,
                    success_rate: successes as f64 / trials as f64,
                });
                config_index += 1;
            }
        }
    }
    Ok(PhaseTable { n, seed, rows })
}
