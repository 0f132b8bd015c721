//! Limits of the secret-key capacity in power, eavesdropper gain, and
//! antenna count, plus the per-sample decomposition that exposes them.
//!
//! Three regimes admit clean limits:
//!
//! * **High power** (`m_w >= m_s`): as `P -> infinity` the capacity
//!   saturates at `E[ln det(W + c D) - ln det(W)]` with `W = H_W^H H_W`,
//!   `D = H_D^H H_D`, and `c = sigma2_w / (alpha2 * sigma2_d)`.
//! * **Strong eavesdropper** (`m_w < m_s`): as `alpha2 -> infinity` the
//!   capacity tends to the ergodic rate of the channel projected onto the
//!   null space of `H_W`; with `m_w >= m_s` the same limit is zero.
//! * **Large antenna arrays**: with `m_d, m_w -> infinity` at ratio
//!   `beta = m_w / m_d` and `m_s` fixed, the capacity tends to the closed
//!   form `m_s * log2(1 + sigma2_w / (beta * alpha2 * sigma2_d))`.
//!
//! [`decompose`] splits one realization's rate into a null-space part that
//! keeps growing with power and a row-space part that saturates, giving
//! per-sample upper bounds and the exact limit objects the estimators above
//! average.

use serde::Serialize;

use crate::channel::{sample_channel, ChannelConfig, ChannelError, ChannelSample, SeedSpec};
use crate::linalg::{hermitian_logdet, projection_complement, svd, LinalgError};
use crate::{mc, Hermitian, Matrix, Real, LN_2};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Failures of the asymptotic estimators.
#[derive(Debug, Clone, PartialEq)]
pub enum AsymptoticsError {
    Channel(ChannelError),
    Linalg(LinalgError),
    /// The antenna counts do not satisfy the regime this quantity needs.
    DimensionMismatch { requirement: &'static str, m_s: usize, m_w: usize },
    /// A parameter is outside the range where the limit exists.
    InvalidParameter { field: &'static str, value: f64 },
    /// Estimation needs at least one sample.
    InvalidSampleCount,
    /// A per-sample evaluation produced a non-finite value.
    NonFiniteSample { index: u64 },
}

impl std::fmt::Display for AsymptoticsError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AsymptoticsError::Channel(e) => write!(f, "channel configuration: {e}"),
            AsymptoticsError::Linalg(e) => write!(f, "linear algebra: {e}"),
            AsymptoticsError::DimensionMismatch { requirement, m_s, m_w } => {
                write!(f, "regime requires {requirement} (m_s = {m_s}, m_w = {m_w})")
            }
            AsymptoticsError::InvalidParameter { field, value } => {
                write!(f, "invalid parameter {field} = {value}")
            }
            AsymptoticsError::InvalidSampleCount => {
                write!(f, "sample count must be at least 1")
            }
            AsymptoticsError::NonFiniteSample { index } => {
                write!(f, "sample {index} produced a non-finite value")
            }
        }
    }
}

impl std::error::Error for AsymptoticsError {}

impl From<ChannelError> for AsymptoticsError {
    fn from(e: ChannelError) -> Self {
        AsymptoticsError::Channel(e)
    }
}

impl From<LinalgError> for AsymptoticsError {
    fn from(e: LinalgError) -> Self {
        AsymptoticsError::Linalg(e)
    }
}

// ---------------------------------------------------------------------------
// Monte Carlo limits
// ---------------------------------------------------------------------------

/// A Monte Carlo estimate of a limiting rate, in bits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticEstimate {
    pub config: ChannelConfig,
    pub seed: SeedSpec,
    pub n_samples: u64,
    pub mean_bits: Real,
    pub stderr_bits: Real,
}

fn average_per_sample(
    cfg: &ChannelConfig,
    n_samples: u64,
    seed: &SeedSpec,
    workers: usize,
    per_sample: impl Fn(&ChannelSample) -> Real + Sync,
) -> Result<AsymptoticEstimate, AsymptoticsError> {
    if n_samples == 0 {
        return Err(AsymptoticsError::InvalidSampleCount);
    }
    let values = mc::indexed_values(n_samples, workers, |i| {
        per_sample(&sample_channel(cfg, seed, i))
    });
    if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
        return Err(AsymptoticsError::NonFiniteSample { index: bad as u64 });
    }
    let (mean, stderr) = mc::mean_and_stderr(&values);
    Ok(AsymptoticEstimate {
        config: cfg.clone(),
        seed: seed.clone(),
        n_samples,
        mean_bits: mean / LN_2,
        stderr_bits: stderr / LN_2,
    })
}

/// `lim_{P -> inf} C_K` for `m_w >= m_s`:
/// `E[ln det(W + c D) - ln det(W)]`, `c = sigma2_w / (alpha2 * sigma2_d)`.
///
/// `W` is almost surely invertible in this regime, which is exactly why the
/// capacity saturates instead of growing without bound.
pub fn high_power_limit(
    cfg: &ChannelConfig,
    n_samples: u64,
    seed: &SeedSpec,
    workers: usize,
) -> Result<AsymptoticEstimate, AsymptoticsError> {
    cfg.validate()?;
    if cfg.m_w < cfg.m_s {
        return Err(AsymptoticsError::DimensionMismatch {
            requirement: "m_w >= m_s",
            m_s: cfg.m_s,
            m_w: cfg.m_w,
        });
    }
    if cfg.alpha2 <= 0.0 {
        return Err(AsymptoticsError::InvalidParameter { field: "alpha2", value: cfg.alpha2 });
    }
    let c = cfg.sigma2_w / (cfg.alpha2 * cfg.sigma2_d);
    average_per_sample(cfg, n_samples, seed, workers, |s| {
        let w = Hermitian::gram_adjoint_times(&s.h_w);
        let d = Hermitian::gram_adjoint_times(&s.h_d);
        let top = w.add_scaled(&d, c);
        match (hermitian_logdet(&top), hermitian_logdet(&w)) {
            (Ok(a), Ok(b)) => (a - b).max(0.0),
            _ => Real::NAN,
        }
    })
}

/// `lim_{alpha2 -> inf} C_K` for `m_w < m_s`:
/// `E[ln det(I + (P/(m_s sigma2_d)) H_D Pi H_D^H)]` with `Pi` the projection
/// onto the null space of `H_W`. `m_w = 0` is the ordinary ergodic MIMO rate.
pub fn c_infinity(
    cfg: &ChannelConfig,
    n_samples: u64,
    seed: &SeedSpec,
    workers: usize,
) -> Result<AsymptoticEstimate, AsymptoticsError> {
    cfg.validate()?;
    if cfg.m_w >= cfg.m_s {
        return Err(AsymptoticsError::DimensionMismatch {
            requirement: "m_w < m_s",
            m_s: cfg.m_s,
            m_w: cfg.m_w,
        });
    }
    let b = cfg.power / (cfg.m_s as Real * cfg.sigma2_d);
    average_per_sample(cfg, n_samples, seed, workers, |s| {
        let pi = match projection_complement(&s.h_w) {
            Ok(p) => p,
            Err(_) => return Real::NAN,
        };
        // H_D Pi H_D^H = (H_D Pi)(H_D Pi)^H because Pi is an orthogonal
        // projection, keeping the argument Hermitian PSD by construction.
        let hp = s.h_d.mul(pi.as_matrix());
        let gram = Hermitian::gram_times_adjoint(&hp);
        let arg = Hermitian::identity(cfg.m_d).add_scaled(&gram, b);
        hermitian_logdet(&arg).map_or(Real::NAN, |v| v.max(0.0))
    })
}

/// `lim_{alpha2 -> inf} C_K` for any antenna counts: zero when the
/// eavesdropper has at least as many antennas as the source, otherwise
/// [`c_infinity`].
pub fn alpha_limit(
    cfg: &ChannelConfig,
    n_samples: u64,
    seed: &SeedSpec,
    workers: usize,
) -> Result<AsymptoticEstimate, AsymptoticsError> {
    cfg.validate()?;
    if n_samples == 0 {
        return Err(AsymptoticsError::InvalidSampleCount);
    }
    if cfg.m_w >= cfg.m_s {
        return Ok(AsymptoticEstimate {
            config: cfg.clone(),
            seed: seed.clone(),
            n_samples,
            mean_bits: 0.0,
            stderr_bits: 0.0,
        });
    }
    c_infinity(cfg, n_samples, seed, workers)
}

/// Closed-form large-array limit in bits:
/// `m_s * log2(1 + sigma2_w / (beta * alpha2 * sigma2_d))`, where
/// `beta` is the limiting antenna ratio `m_w / m_d`.
pub fn large_antenna_limit(
    m_s: usize,
    beta: Real,
    alpha2: Real,
    sigma2_d: Real,
    sigma2_w: Real,
) -> Result<Real, AsymptoticsError> {
    let checks: [(&'static str, Real, bool); 4] = [
        ("beta", beta, beta.is_finite() && beta > 0.0),
        ("alpha2", alpha2, alpha2.is_finite() && alpha2 > 0.0),
        ("sigma2_d", sigma2_d, sigma2_d.is_finite() && sigma2_d > 0.0),
        ("sigma2_w", sigma2_w, sigma2_w.is_finite() && sigma2_w > 0.0),
    ];
    for (field, value, ok) in checks {
        if !ok {
            return Err(AsymptoticsError::InvalidParameter { field, value });
        }
    }
    if m_s == 0 {
        return Err(AsymptoticsError::InvalidParameter { field: "m_s", value: 0.0 });
    }
    Ok(m_s as Real * Real::log2(1.0 + sigma2_w / (beta * alpha2 * sigma2_d)))
}

// ---------------------------------------------------------------------------
// Per-sample decomposition
// ---------------------------------------------------------------------------

/// Split of one realization's key rate into the null-space direction of
/// `H_W` (grows with power) and the row-space direction (saturates).
///
/// Built from the SVD `H_W = U S V^H` for `m_w < m_s`: `v_tilde` spans the
/// row space (first `m_w` right-singular vectors), `v_hat` its orthogonal
/// complement. The per-sample rate equals
///
/// ```text
/// f(P) = ln det(I + b H_D v_hat v_hat^H H_D^H
///                 + H_D v_tilde Lambda(P) v_tilde^H H_D^H)
/// Lambda(P) = (sigma2_w / (alpha2 sigma2_d)) (m_s sigma2_w/(alpha2 P) I + S^2)^{-1}
/// ```
///
/// and `Lambda(P)` increases to `Lambda_inf = (sigma2_w/(alpha2 sigma2_d)) S^{-2}`,
/// giving the per-sample upper bound [`AsymptoticDecomposition::f_hat_infinity`].
#[derive(Debug, Clone)]
pub struct AsymptoticDecomposition {
    /// Destination channel matrix of the decomposed realization.
    pub h_d: Matrix,
    /// Nonzero singular values of `H_W`, descending (`m_w` entries).
    pub singular_values: Vec<Real>,
    /// Orthonormal basis of the row space of `H_W` (`m_s x m_w`).
    pub v_tilde: Matrix,
    /// Orthonormal basis of the null space of `H_W` (`m_s x (m_s - m_w)`).
    pub v_hat: Matrix,
    /// Squared singular values of `H_D v_hat` (the modes that survive the
    /// strong-eavesdropper limit).
    pub mu: Vec<Real>,
    /// Limit of the saturating trace term `t(P)`.
    pub t_limit: Real,
}

/// Decompose one realization (`m_w < m_s`, `alpha2 > 0`).
pub fn decompose(
    cfg: &ChannelConfig,
    sample: &ChannelSample,
) -> Result<AsymptoticDecomposition, AsymptoticsError> {
    cfg.validate()?;
    if cfg.m_w >= cfg.m_s {
        return Err(AsymptoticsError::DimensionMismatch {
            requirement: "m_w < m_s",
            m_s: cfg.m_s,
            m_w: cfg.m_w,
        });
    }
    if cfg.alpha2 <= 0.0 {
        return Err(AsymptoticsError::InvalidParameter { field: "alpha2", value: cfg.alpha2 });
    }
    let d = svd(&sample.h_w)?;
    let head: Vec<usize> = (0..cfg.m_w).collect();
    let tail: Vec<usize> = (cfg.m_w..cfg.m_s).collect();
    let v_tilde = d.v.select_cols(&head);
    let v_hat = d.v.select_cols(&tail);
    let singular_values = d.singular_values;
    if singular_values.iter().any(|&s| s <= 0.0) {
        return Err(AsymptoticsError::Linalg(LinalgError::RankDeficient {
            rank: singular_values.iter().filter(|&&s| s > 0.0).count(),
            required: cfg.m_w,
        }));
    }
    let hd_vt = sample.h_d.mul(&v_tilde);
    let scale = cfg.sigma2_w / (cfg.alpha2 * cfg.sigma2_d);
    let mut t_limit = 0.0;
    for (i, &s) in singular_values.iter().enumerate() {
        let col_norm_sq: Real = (0..hd_vt.rows()).map(|r| hd_vt.get(r, i).norm_sqr()).sum();
        t_limit += scale * col_norm_sq / (s * s);
    }
    let mu_svd = svd(&sample.h_d.mul(&v_hat))?;
    let mu = mu_svd.singular_values.iter().map(|s| s * s).collect();
    Ok(AsymptoticDecomposition {
        h_d: sample.h_d.clone(),
        singular_values,
        v_tilde,
        v_hat,
        mu,
        t_limit,
    })
}

impl AsymptoticDecomposition {
    /// Diagonal of `Lambda(P)`; `power = infinity` is allowed and gives the
    /// limiting diagonal.
    pub fn lambda_diag(&self, cfg: &ChannelConfig, power: Real) -> Vec<Real> {
        let scale = cfg.sigma2_w / (cfg.alpha2 * cfg.sigma2_d);
        let shift = cfg.m_s as Real * cfg.sigma2_w / (cfg.alpha2 * power);
        self.singular_values.iter().map(|s| scale / (shift + s * s)).collect()
    }

    /// Reconstruct the per-sample rate at transmit power `power` from the
    /// decomposition. Equals the direct per-sample key rate to rounding.
    pub fn f_hat(&self, cfg: &ChannelConfig, power: Real) -> Result<Real, AsymptoticsError> {
        self.eval(cfg, power, &self.lambda_diag(cfg, power))
    }

    /// Per-sample upper envelope: same null-space term, but the row-space
    /// block replaced by its `P -> infinity` limit `Lambda_inf`.
    pub fn f_hat_infinity(
        &self,
        cfg: &ChannelConfig,
        power: Real,
    ) -> Result<Real, AsymptoticsError> {
        self.eval(cfg, power, &self.lambda_diag(cfg, Real::INFINITY))
    }

    /// The saturating trace term `t(P) = tr(H_D v_tilde Lambda(P) v_tilde^H H_D^H)`.
    pub fn t_of_p(&self, cfg: &ChannelConfig, power: Real) -> Real {
        let lambda = self.lambda_diag(cfg, power);
        let hd_vt = self.h_d.mul(&self.v_tilde);
        lambda
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                let col: Real = (0..hd_vt.rows()).map(|r| hd_vt.get(r, i).norm_sqr()).sum();
                l * col
            })
            .sum()
    }

    fn eval(
        &self,
        cfg: &ChannelConfig,
        power: Real,
        lambda: &[Real],
    ) -> Result<Real, AsymptoticsError> {
        let b = power / (cfg.m_s as Real * cfg.sigma2_d);
        // Assemble B with b^(1/2) v_hat and v_tilde Lambda^(1/2) as column
        // blocks; then the argument is I + (H_D B)(H_D B)^H, Hermitian PSD
        // by construction.
        let n_hat = self.v_hat.cols();
        let n_tilde = self.v_tilde.cols();
        let broot = b.sqrt();
        let bmat = Matrix::from_fn(cfg.m_s, n_hat + n_tilde, |i, j| {
            if j < n_hat {
                self.v_hat.get(i, j) * crate::Complex::new(broot, 0.0)
            } else {
                let k = j - n_hat;
                self.v_tilde.get(i, k) * crate::Complex::new(lambda[k].sqrt(), 0.0)
            }
        });
        let hb = self.h_d.mul(&bmat);
        let arg = Hermitian::identity(self.h_d.rows())
            .add_scaled(&Hermitian::gram_times_adjoint(&hb), 1.0);
        Ok(hermitian_logdet(&arg)?.max(0.0))
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
