//! Fast-fading MIMO wiretap channel model and reproducible sampling.
//!
//! A source with `m_s` antennas transmits at total power `power`; a
//! destination with `m_d` antennas receives through `H_D` with noise variance
//! `sigma2_d` per antenna, and an eavesdropper with `m_w` antennas receives
//! through `alpha * H_W` with noise variance `sigma2_w`, where `alpha2` is
//! the squared wiretapper gain. Both channel matrices have independent
//! standard complex Gaussian entries (each component `N(0, 1/2)`, unit mean
//! squared modulus) redrawn every symbol.
//!
//! Sampling is keyed, not sequential: sample `i` of a named stream depends
//! only on `(master_seed, stream label, i)`, so any subset of indices can be
//! generated independently on any thread with identical results.

use serde::{Deserialize, Serialize};

use crate::rng::{hash_label, CounterRng};
use crate::{Complex, Matrix, Real};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Rejected channel parameterizations.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelError {
    /// An antenna count outside its allowed range.
    InvalidAntennaCount { field: &'static str, value: usize },
    /// A real parameter that is out of range or not finite.
    InvalidParameter { field: &'static str, value: f64 },
}

impl std::fmt::Display for ChannelError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChannelError::InvalidAntennaCount { field, value } => {
                write!(f, "invalid antenna count {field} = {value}")
            }
            ChannelError::InvalidParameter { field, value } => {
                write!(f, "invalid parameter {field} = {value}")
            }
        }
    }
}

impl std::error::Error for ChannelError {}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Antenna counts and power/noise parameters of one channel instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    /// Source antennas (`>= 1`).
    pub m_s: usize,
    /// Destination antennas (`>= 1`).
    pub m_d: usize,
    /// Eavesdropper antennas. `0` is accepted as the degenerate
    /// no-eavesdropper case (the key rate then reduces to the ordinary
    /// ergodic MIMO rate).
    pub m_w: usize,
    /// Total transmit power `P >= 0`, split evenly across source antennas.
    pub power: f64,
    /// Destination noise variance per antenna (`> 0`).
    pub sigma2_d: f64,
    /// Eavesdropper noise variance per antenna (`> 0`).
    pub sigma2_w: f64,
    /// Squared gain of the source-to-eavesdropper link (`>= 0`).
    pub alpha2: f64,
}

impl ChannelConfig {
    /// Check every field against its documented range.
    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.m_s == 0 {
            return Err(ChannelError::InvalidAntennaCount { field: "m_s", value: self.m_s });
        }
        if self.m_d == 0 {
            return Err(ChannelError::InvalidAntennaCount { field: "m_d", value: self.m_d });
        }
        let range_checks: [(&'static str, f64, bool); 4] = [
            ("power", self.power, self.power.is_finite() && self.power >= 0.0),
            ("sigma2_d", self.sigma2_d, self.sigma2_d.is_finite() && self.sigma2_d > 0.0),
            ("sigma2_w", self.sigma2_w, self.sigma2_w.is_finite() && self.sigma2_w > 0.0),
            ("alpha2", self.alpha2, self.alpha2.is_finite() && self.alpha2 >= 0.0),
        ];
        for (field, value, ok) in range_checks {
            if !ok {
                return Err(ChannelError::InvalidParameter { field, value });
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Seeding
// ---------------------------------------------------------------------------

/// Master seed plus a human-readable stream label.
///
/// Every random quantity in the crate is drawn from a stream derived from a
/// `SeedSpec`; two runs with equal seeds produce bitwise-equal results
/// regardless of thread count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_label: String,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_label: impl Into<String>) -> Self {
        SeedSpec { master_seed, stream_label: stream_label.into() }
    }

    /// Generator for item `index` of the sub-stream named `purpose`.
    ///
    /// The key folds the master seed, a hash of `"{label}/{purpose}"`, and
    /// the index, so distinct purposes and indices yield decorrelated
    /// streams while remaining order-independent.
    pub fn stream(&self, purpose: &str, index: u64) -> CounterRng {
        let label = hash_label(&format!("{}/{}", self.stream_label, purpose));
        CounterRng::from_key(self.master_seed, label, index)
    }
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// One fading realization: the pair of channel matrices for a single symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSample {
    /// Source-to-destination matrix, `m_d x m_s`.
    pub h_d: Matrix,
    /// Source-to-eavesdropper matrix, `m_w x m_s` (0 rows when `m_w == 0`).
    pub h_w: Matrix,
    /// Index of this sample within its stream.
    pub sample_index: u64,
}

impl ChannelSample {
    /// Wrap externally constructed matrices (deterministic test scenarios).
    pub fn from_parts(h_d: Matrix, h_w: Matrix, sample_index: u64) -> Self {
        assert_eq!(h_d.cols(), h_w.cols(), "both links share the source antenna count");
        ChannelSample { h_d, h_w, sample_index }
    }
}

/// Draw fading realization `index` for `cfg` under `seed`.
///
/// Entries are standard complex Gaussian: two Box-Muller normals scaled by
/// `sqrt(1/2)`. `h_d` is filled row by row, then `h_w`, in a fixed order
/// that is part of the reproducibility contract.
pub fn sample_channel(cfg: &ChannelConfig, seed: &SeedSpec, index: u64) -> ChannelSample {
    let mut rng = seed.stream("channel", index);
    let scale = Real::sqrt(0.5);
    let mut draw = |rows: usize, cols: usize| {
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            let (g1, g2) = rng.next_gaussian_pair();
            data.push(Complex::new(g1 * scale, g2 * scale));
        }
        Matrix::from_vec(rows, cols, data)
    };
    let h_d = draw(cfg.m_d, cfg.m_s);
    let h_w = draw(cfg.m_w, cfg.m_s);
    ChannelSample { h_d, h_w, sample_index: index }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
