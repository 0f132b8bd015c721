//! Power allocation across source antennas and numerical optimality probes.
//!
//! For a diagonal input covariance `K = diag(lambda)` the per-realization key
//! rate is
//!
//! ```text
//! f(lambda) = ln det(I + (1/sigma2_d) H_D K^{1/2}
//!                      (I + (alpha2/sigma2_w) K^{1/2} H_W^H H_W K^{1/2})^{-1}
//!                      K^{1/2} H_D^H)
//! ```
//!
//! Under isotropic fading, `E[f]` is Schur-concave in `lambda`, so the
//! uniform split of the power budget maximizes it. This module evaluates
//! `f`, and probes two consequences empirically: no random feasible
//! allocation beats uniform beyond statistical noise, and `E[f]` is midpoint
//! concave along random segments. Probes use common random numbers — every
//! allocation is scored on the same fading draws — so comparisons are
//! differences of paired samples, not of independent estimates.

use serde::Serialize;

use crate::channel::{sample_channel, ChannelConfig, ChannelError, ChannelSample, SeedSpec};
use crate::linalg::{cholesky, hermitian_logdet, LinalgError};
use crate::{mc, Hermitian, Real, LN_2};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Failures of allocation evaluation and probes.
#[derive(Debug, Clone, PartialEq)]
pub enum AllocationError {
    Channel(ChannelError),
    Linalg(LinalgError),
    /// Allocation length does not match the source antenna count.
    LengthMismatch { expected: usize, got: usize },
    /// An allocation entry is negative or not finite.
    InvalidEntry { index: usize, value: f64 },
    /// Allocated power exceeds the configured budget.
    BudgetExceeded { total: f64, budget: f64 },
    /// Probes need at least one sample and one trial.
    InvalidSampleCount,
    /// A per-sample evaluation produced a non-finite value.
    NonFiniteSample { index: u64 },
}

impl std::fmt::Display for AllocationError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AllocationError::Channel(e) => write!(f, "channel configuration: {e}"),
            AllocationError::Linalg(e) => write!(f, "linear algebra: {e}"),
            AllocationError::LengthMismatch { expected, got } => {
                write!(f, "allocation has {got} entries, expected {expected}")
            }
            AllocationError::InvalidEntry { index, value } => {
                write!(f, "allocation entry {index} = {value} is invalid")
            }
            AllocationError::BudgetExceeded { total, budget } => {
                write!(f, "allocated power {total} exceeds budget {budget}")
            }
            AllocationError::InvalidSampleCount => {
                write!(f, "probes need at least one sample and one trial")
            }
            AllocationError::NonFiniteSample { index } => {
                write!(f, "sample {index} produced a non-finite value")
            }
        }
    }
}

impl std::error::Error for AllocationError {}

impl From<ChannelError> for AllocationError {
    fn from(e: ChannelError) -> Self {
        AllocationError::Channel(e)
    }
}

impl From<LinalgError> for AllocationError {
    fn from(e: LinalgError) -> Self {
        AllocationError::Linalg(e)
    }
}

// ---------------------------------------------------------------------------
// Allocation vector
// ---------------------------------------------------------------------------

/// Per-antenna transmit powers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerAllocation {
    pub lambdas: Vec<Real>,
}

impl PowerAllocation {
    pub fn new(lambdas: Vec<Real>) -> Self {
        PowerAllocation { lambdas }
    }

    /// The uniform split `P/m_s` per antenna.
    pub fn uniform(cfg: &ChannelConfig) -> Self {
        PowerAllocation { lambdas: vec![cfg.power / cfg.m_s as Real; cfg.m_s] }
    }

    /// Check shape, entry range, and the power budget (with a small relative
    /// tolerance so that full-budget allocations survive rounding).
    pub fn validate(&self, cfg: &ChannelConfig) -> Result<(), AllocationError> {
        if self.lambdas.len() != cfg.m_s {
            return Err(AllocationError::LengthMismatch {
                expected: cfg.m_s,
                got: self.lambdas.len(),
            });
        }
        let mut total = 0.0;
        for (index, &value) in self.lambdas.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(AllocationError::InvalidEntry { index, value });
            }
            total += value;
        }
        if total > cfg.power * (1.0 + 1e-9) {
            return Err(AllocationError::BudgetExceeded { total, budget: cfg.power });
        }
        Ok(())
    }
}

/// A random full-budget allocation: exponential weights normalized to the
/// power budget (uniform on the probability simplex, scaled by `P`).
pub fn random_allocation(cfg: &ChannelConfig, seed: &SeedSpec, trial: u64) -> PowerAllocation {
    let mut rng = seed.stream("allocation-lambda", trial);
    let weights: Vec<Real> = (0..cfg.m_s).map(|_| -Real::ln_1p(-rng.next_f64())).collect();
    let total: Real = weights.iter().sum();
    PowerAllocation {
        lambdas: weights.iter().map(|w| cfg.power * w / total).collect(),
    }
}

// ---------------------------------------------------------------------------
// Per-sample objective
// ---------------------------------------------------------------------------

/// Evaluate `f(lambda)` in nats for one fading realization.
pub fn eval_f(
    cfg: &ChannelConfig,
    alloc: &PowerAllocation,
    sample: &ChannelSample,
) -> Result<Real, AllocationError> {
    alloc.validate(cfg)?;
    assert_eq!(sample.h_d.cols(), cfg.m_s, "sample must match the configuration");
    let half: Vec<Real> = alloc.lambdas.iter().map(|l| l.sqrt()).collect();
    let hd_k = sample.h_d.scale_cols(&half);
    let hw_k = sample.h_w.scale_cols(&half);
    // M = I + (alpha2/sigma2_w) (H_W K^{1/2})^H (H_W K^{1/2}).
    let m = Hermitian::identity(cfg.m_s)
        .add_scaled(&Hermitian::gram_adjoint_times(&hw_k), cfg.alpha2 / cfg.sigma2_w);
    // I + (1/sigma2_d) (H_D K^{1/2}) M^{-1} (H_D K^{1/2})^H.
    let x = cholesky(&m)?.solve(&hd_k.adjoint());
    let inner = hd_k.mul(&x).scale_real(1.0 / cfg.sigma2_d);
    let arg = Hermitian::symmetrize(&inner.add(&crate::Matrix::identity(cfg.m_d)));
    let value = hermitian_logdet(&arg)?;
    Ok(value.max(0.0))
}

// ---------------------------------------------------------------------------
// Uniform-optimality probe
// ---------------------------------------------------------------------------

/// Comparison of one random allocation against the uniform baseline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocationTrial {
    pub lambdas: Vec<Real>,
    /// Mean of `f(uniform) - f(lambda)` in bits (positive favors uniform).
    pub mean_diff_bits: Real,
    pub stderr_diff_bits: Real,
    /// True unless the random allocation beat uniform by more than three
    /// standard errors.
    pub passed: bool,
}

/// Result of the uniform-optimality probe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformOptimalityReport {
    pub config: ChannelConfig,
    pub seed: SeedSpec,
    pub n_samples: u64,
    pub trials: Vec<AllocationTrial>,
    pub all_passed: bool,
}

/// Score `n_trials` random full-budget allocations against uniform on shared
/// fading draws. A trial passes when its mean paired difference is above
/// `-3` standard errors, i.e. the random allocation shows no statistically
/// significant advantage over the uniform split.
pub fn check_uniform_optimal(
    cfg: &ChannelConfig,
    n_samples: u64,
    n_trials: u64,
    seed: &SeedSpec,
    workers: usize,
) -> Result<UniformOptimalityReport, AllocationError> {
    cfg.validate()?;
    if n_samples == 0 || n_trials == 0 {
        return Err(AllocationError::InvalidSampleCount);
    }
    let uniform = PowerAllocation::uniform(cfg);
    let mut trials = Vec::with_capacity(n_trials as usize);
    let mut all_passed = true;
    for t in 0..n_trials {
        let alloc = random_allocation(cfg, seed, t);
        let diffs = mc::indexed_values(n_samples, workers, |i| {
            let s = sample_channel(cfg, seed, i);
            match (eval_f(cfg, &uniform, &s), eval_f(cfg, &alloc, &s)) {
                (Ok(u), Ok(v)) => u - v,
                _ => Real::NAN,
            }
        });
        if let Some(bad) = diffs.iter().position(|v| !v.is_finite()) {
            return Err(AllocationError::NonFiniteSample { index: bad as u64 });
        }
        let (mean, stderr) = mc::mean_and_stderr(&diffs);
        let passed = mean >= -3.0 * stderr;
        all_passed &= passed;
        trials.push(AllocationTrial {
            lambdas: alloc.lambdas,
            mean_diff_bits: mean / LN_2,
            stderr_diff_bits: stderr / LN_2,
            passed,
        });
    }
    Ok(UniformOptimalityReport {
        config: cfg.clone(),
        seed: seed.clone(),
        n_samples,
        trials,
        all_passed,
    })
}

// ---------------------------------------------------------------------------
// Concavity probe
// ---------------------------------------------------------------------------

/// Midpoint-concavity check along one random segment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcavityPair {
    pub lambda_a: Vec<Real>,
    pub lambda_b: Vec<Real>,
    /// Mean of `f((a+b)/2) - (f(a) + f(b))/2` in bits (nonnegative under
    /// concavity of the expectation).
    pub mean_gap_bits: Real,
    pub stderr_gap_bits: Real,
    pub passed: bool,
}

/// Result of the concavity probe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcavityReport {
    pub config: ChannelConfig,
    pub seed: SeedSpec,
    pub n_samples: u64,
    pub pairs: Vec<ConcavityPair>,
    pub all_passed: bool,
}

/// Probe midpoint concavity of `E[f]` on `n_pairs` random segments of the
/// feasible set, with all evaluations paired on the same fading draws. A
/// pair passes when the mean midpoint gap is above `-3` standard errors.
pub fn concavity_probe(
    cfg: &ChannelConfig,
    n_samples: u64,
    n_pairs: u64,
    seed: &SeedSpec,
    workers: usize,
) -> Result<ConcavityReport, AllocationError> {
    cfg.validate()?;
    if n_samples == 0 || n_pairs == 0 {
        return Err(AllocationError::InvalidSampleCount);
    }
    let mut pairs = Vec::with_capacity(n_pairs as usize);
    let mut all_passed = true;
    for t in 0..n_pairs {
        let a = random_allocation(cfg, seed, 2 * t);
        let b = random_allocation(cfg, seed, 2 * t + 1);
        let mid = PowerAllocation::new(
            a.lambdas.iter().zip(&b.lambdas).map(|(x, y)| 0.5 * (x + y)).collect(),
        );
        let gaps = mc::indexed_values(n_samples, workers, |i| {
            let s = sample_channel(cfg, seed, i);
            match (eval_f(cfg, &mid, &s), eval_f(cfg, &a, &s), eval_f(cfg, &b, &s)) {
                (Ok(m), Ok(fa), Ok(fb)) => m - 0.5 * (fa + fb),
                _ => Real::NAN,
            }
        });
        if let Some(bad) = gaps.iter().position(|v| !v.is_finite()) {
            return Err(AllocationError::NonFiniteSample { index: bad as u64 });
        }
        let (mean, stderr) = mc::mean_and_stderr(&gaps);
        let passed = mean >= -3.0 * stderr;
        all_passed &= passed;
        pairs.push(ConcavityPair {
            lambda_a: a.lambdas,
            lambda_b: b.lambdas,
            mean_gap_bits: mean / LN_2,
            stderr_gap_bits: stderr / LN_2,
            passed,
        });
    }
    Ok(ConcavityReport { config: cfg.clone(), seed: seed.clone(), n_samples, pairs, all_passed })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
