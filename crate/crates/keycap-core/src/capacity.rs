//! Monte Carlo estimation of the secret-key capacity.
//!
//! With channel state known to all terminals and an uninformed (public)
//! discussion channel, the secret-key capacity of the fast-fading MIMO
//! wiretap channel is the expectation over fading of
//!
//! ```text
//! ln det(I + a H_W^H H_W + b H_D^H H_D) - ln det(I + a H_W^H H_W)
//! a = alpha2 * P / (m_s * sigma2_w),   b = P / (m_s * sigma2_d)
//! ```
//!
//! which is the conditional mutual information I(X; Y_D | Y_W) under the
//! isotropic input K_X = (P/m_s) I. Two independent per-sample routes are
//! provided: the log-determinant difference above and a Gaussian
//! conditional-entropy route through a Schur complement of the joint output
//! covariance. They agree to floating-point accuracy and cross-validate each
//! other in the tests.
//!
//! All internal values are in nats; estimates are reported in bits.

use serde::Serialize;

use crate::channel::{sample_channel, ChannelConfig, ChannelError, ChannelSample, SeedSpec};
use crate::linalg::{hermitian_logdet, schur_complement, CovarianceBlocks, LinalgError};
use crate::{mc, Hermitian, Real, LN_2};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Failures of the capacity estimators.
#[derive(Debug, Clone, PartialEq)]
pub enum CapacityError {
    /// The channel configuration failed validation.
    Channel(ChannelError),
    /// A covariance operation failed (indicates non-finite inputs).
    Linalg(LinalgError),
    /// Monte Carlo estimation needs at least one sample.
    InvalidSampleCount,
    /// A per-sample evaluation produced a non-finite value.
    NonFiniteSample { index: u64 },
}

impl std::fmt::Display for CapacityError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CapacityError::Channel(e) => write!(f, "channel configuration: {e}"),
            CapacityError::Linalg(e) => write!(f, "linear algebra: {e}"),
            CapacityError::InvalidSampleCount => {
                write!(f, "sample count must be at least 1")
            }
            CapacityError::NonFiniteSample { index } => {
                write!(f, "sample {index} produced a non-finite value")
            }
        }
    }
}

impl std::error::Error for CapacityError {}

impl From<ChannelError> for CapacityError {
    fn from(e: ChannelError) -> Self {
        CapacityError::Channel(e)
    }
}

impl From<LinalgError> for CapacityError {
    fn from(e: LinalgError) -> Self {
        CapacityError::Linalg(e)
    }
}

// ---------------------------------------------------------------------------
// Per-sample key rate
// ---------------------------------------------------------------------------

/// Effective link gains `(a, b)` for the log-determinant form.
fn link_gains(cfg: &ChannelConfig) -> (Real, Real) {
    let per_antenna = cfg.power / cfg.m_s as Real;
    (cfg.alpha2 * per_antenna / cfg.sigma2_w, per_antenna / cfg.sigma2_d)
}

/// Conditional mutual information I(X; Y_D | Y_W) in nats for one fading
/// realization, computed as a difference of log-determinants on the source
/// side. Clamped at zero: the quantity is nonnegative, and round-off may
/// produce values like `-1e-16`.
pub fn per_sample_key_rate(
    cfg: &ChannelConfig,
    sample: &ChannelSample,
) -> Result<Real, CapacityError> {
    assert_eq!(sample.h_d.cols(), cfg.m_s, "sample must match the configuration");
    assert_eq!(sample.h_d.rows(), cfg.m_d);
    assert_eq!(sample.h_w.rows(), cfg.m_w);
    let (a, b) = link_gains(cfg);
    let g_w = Hermitian::gram_adjoint_times(&sample.h_w);
    let g_d = Hermitian::gram_adjoint_times(&sample.h_d);
    let denom = Hermitian::identity(cfg.m_s).add_scaled(&g_w, a);
    let numer = denom.add_scaled(&g_d, b);
    let value = hermitian_logdet(&numer)? - hermitian_logdet(&denom)?;
    Ok(value.max(0.0))
}

/// The same quantity via the receiver-side Gaussian conditional entropy:
/// `h(Y_D | Y_W) - h(Y_D | X, Y_W) = ln det S - m_d ln sigma2_d`, where `S`
/// is the Schur complement of the eavesdropper block in the joint output
/// covariance under `K_X = (P/m_s) I`.
pub fn per_sample_key_rate_schur(
    cfg: &ChannelConfig,
    sample: &ChannelSample,
) -> Result<Real, CapacityError> {
    assert_eq!(sample.h_d.cols(), cfg.m_s, "sample must match the configuration");
    let per_antenna = cfg.power / cfg.m_s as Real;
    let a_d = sample.h_d.scale_real(per_antenna.sqrt());
    let a_w = sample.h_w.scale_real((cfg.alpha2 * per_antenna).sqrt());
    let mut k_yd = Hermitian::gram_times_adjoint(&a_d);
    k_yd.add_real_diag(cfg.sigma2_d);
    let mut k_yw = Hermitian::gram_times_adjoint(&a_w);
    k_yw.add_real_diag(cfg.sigma2_w);
    let blocks = CovarianceBlocks { k_u: k_yd, k_v: k_yw, k_uv: a_d.mul(&a_w.adjoint()) };
    let s = schur_complement(&blocks)?;
    let value = hermitian_logdet(&s)? - cfg.m_d as Real * cfg.sigma2_d.ln();
    Ok(value.max(0.0))
}

// ---------------------------------------------------------------------------
// Monte Carlo estimate
// ---------------------------------------------------------------------------

/// A capacity estimate with everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityEstimate {
    pub config: ChannelConfig,
    pub seed: SeedSpec,
    pub n_samples: u64,
    /// Sample mean of the per-realization key rate, in bits.
    pub mean_bits: Real,
    /// Standard error of the mean, in bits.
    pub stderr_bits: Real,
}

/// Estimate the secret-key capacity of `cfg` by averaging the per-sample key
/// rate over `n_samples` keyed fading draws.
///
/// The result is bitwise identical for any `workers >= 1`.
pub fn estimate_capacity(
    cfg: &ChannelConfig,
    n_samples: u64,
    seed: &SeedSpec,
    workers: usize,
) -> Result<CapacityEstimate, CapacityError> {
    cfg.validate()?;
    if n_samples == 0 {
        return Err(CapacityError::InvalidSampleCount);
    }
    let values = mc::indexed_values(n_samples, workers, |i| {
        let sample = sample_channel(cfg, seed, i);
        per_sample_key_rate(cfg, &sample).unwrap_or(Real::NAN)
    });
    if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
        return Err(CapacityError::NonFiniteSample { index: bad as u64 });
    }
    let (mean, stderr) = mc::mean_and_stderr(&values);
    Ok(CapacityEstimate {
        config: cfg.clone(),
        seed: seed.clone(),
        n_samples,
        mean_bits: mean / LN_2,
        stderr_bits: stderr / LN_2,
    })
}

// ---------------------------------------------------------------------------
// Parameter sweeps
// ---------------------------------------------------------------------------

/// `10^(db/10)`.
pub fn db_to_linear(db: Real) -> Real {
    Real::powf(10.0, db / 10.0)
}

/// `10 log10(x)`.
pub fn linear_to_db(x: Real) -> Real {
    10.0 * x.log10()
}

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Destination SNR in dB: sets `power = sigma2_d * 10^(dB/10)`.
    SnrDb,
    /// Eavesdropper gain in dB: sets `alpha2 = 10^(dB/10)`.
    Alpha2Db,
}

/// One estimated point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub axis_value: Real,
    pub mean_bits: Real,
    pub stderr_bits: Real,
    pub n_samples: u64,
}

/// A full sweep: the varied axis, the grid, and the estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSeries {
    pub axis: SweepAxis,
    pub base_config: ChannelConfig,
    pub seed: SeedSpec,
    pub points: Vec<SweepPoint>,
}

/// Estimate the capacity across a dB grid of the chosen axis.
///
/// All grid points reuse the same fading draws (common random numbers), so
/// differences along the axis are not masked by independent sampling noise.
pub fn sweep(
    base: &ChannelConfig,
    axis: SweepAxis,
    grid_db: &[Real],
    n_samples: u64,
    seed: &SeedSpec,
    workers: usize,
) -> Result<SweepSeries, CapacityError> {
    base.validate()?;
    let mut points = Vec::with_capacity(grid_db.len());
    for &db in grid_db {
        let mut cfg = base.clone();
        match axis {
            SweepAxis::SnrDb => cfg.power = cfg.sigma2_d * db_to_linear(db),
            SweepAxis::Alpha2Db => cfg.alpha2 = db_to_linear(db),
        }
        let est = estimate_capacity(&cfg, n_samples, seed, workers)?;
        points.push(SweepPoint {
            axis_value: db,
            mean_bits: est.mean_bits,
            stderr_bits: est.stderr_bits,
            n_samples,
        });
    }
    Ok(SweepSeries { axis, base_config: base.clone(), seed: seed.clone(), points })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
