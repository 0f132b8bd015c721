//! Finite-alphabet quantize-and-bin secret-sharing protocol.
//!
//! A source emits `X^n` i.i.d.; a destination observes `Y^n` through a
//! discrete memoryless channel and an eavesdropper observes `Z^n` through
//! another, with `Y` and `Z` conditionally independent given `X`. The
//! destination quantizes `Y^n` to a codeword `Yhat^n(M)` from a randomly
//! generated codebook partitioned into bins; it announces the bin index `J`
//! publicly and keeps the within-bin key `L`. The source reconstructs `M`
//! from `X^n` and `J` and extracts the same key. Submodules:
//!
//! * [`typicality`] — robust joint typicality and the `S` acceptance
//!   indicator used by the quantizer,
//! * [`codebook`] — nested codebook generation and index layout,
//! * [`session`] — one end-to-end protocol execution,
//! * [`analysis`] — exact-enumeration and Monte Carlo measurement of key
//!   disagreement and leakage.
//!
//! This module holds the shared ingredients: channel and quantizer
//! descriptions, the induced joint pmf, mutual-information arithmetic, and
//! the four coding rates. Rates and information quantities are in bits.

use serde::{Deserialize, Serialize};

pub mod analysis;
pub mod codebook;
pub mod session;
pub mod typicality;

pub use analysis::{estimate_error_and_leakage, AnalysisMode, LeakageReport};
pub use codebook::{generate_codebook, Codebook, CodebookCounts};
pub use session::{build_setup, run_session, ProtocolSetup, SessionOutcome};
pub use typicality::{is_jointly_typical, s_indicator, s_probability_exact, SMode, TuplePmf};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Failures of the protocol pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolError {
    /// A pmf or alphabet failed validation.
    InvalidInstance { reason: String },
    /// The rate construction is infeasible at the requested epsilon.
    InfeasibleRates { r3: f64, r4: f64 },
    /// A rate quadruple violates nonnegativity or the sum identity.
    InconsistentRates { detail: &'static str },
    /// The codebook would exceed the configured size cap.
    SizeOverflow { codewords: u128, cap: u64 },
    /// An exact computation would enumerate more states than the cap allows.
    EnumerationTooLarge { states: u128, cap: u128 },
    /// Monte Carlo analysis needs a minimum number of replicates.
    InsufficientReplicates { got: u64, required: u64 },
}

impl std::fmt::Display for ProtocolError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProtocolError::InvalidInstance { reason } => {
                write!(f, "invalid protocol instance: {reason}")
            }
            ProtocolError::InfeasibleRates { r3, r4 } => {
                write!(f, "rate construction infeasible: R3 = {r3}, R4 = {r4} (both must be > 0)")
            }
            ProtocolError::InconsistentRates { detail } => {
                write!(f, "inconsistent rate quadruple: {detail}")
            }
            ProtocolError::SizeOverflow { codewords, cap } => {
                write!(f, "codebook of {codewords} codewords exceeds cap {cap}")
            }
            ProtocolError::EnumerationTooLarge { states, cap } => {
                write!(f, "exact enumeration of {states} states exceeds cap {cap}")
            }
            ProtocolError::InsufficientReplicates { got, required } => {
                write!(f, "{got} replicates requested, at least {required} required")
            }
        }
    }
}

impl std::error::Error for ProtocolError {}

// ---------------------------------------------------------------------------
// Channel, quantizer, instance
// ---------------------------------------------------------------------------

const PMF_SUM_TOL: f64 = 1e-12;

fn check_pmf(p: &[f64], what: &str) -> Result<(), ProtocolError> {
    if p.is_empty() {
        return Err(ProtocolError::InvalidInstance { reason: format!("{what} is empty") });
    }
    let mut sum = 0.0;
    for &v in p {
        if !v.is_finite() || v < 0.0 {
            return Err(ProtocolError::InvalidInstance {
                reason: format!("{what} has invalid entry {v}"),
            });
        }
        sum += v;
    }
    if (sum - 1.0).abs() > PMF_SUM_TOL {
        return Err(ProtocolError::InvalidInstance {
            reason: format!("{what} sums to {sum}, expected 1"),
        });
    }
    Ok(())
}

/// Discrete memoryless wiretap channel: input pmf and the two conditional
/// channels. The joint law is `p(x) p(y|x) p(z|x)` — the destination and
/// eavesdropper observations are conditionally independent given the input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DMWiretapChannel {
    /// Input pmf over the source alphabet.
    pub p_x: Vec<f64>,
    /// Rows indexed by x, columns by y.
    pub p_y_given_x: Vec<Vec<f64>>,
    /// Rows indexed by x, columns by z.
    pub p_z_given_x: Vec<Vec<f64>>,
}

impl DMWiretapChannel {
    pub fn nx(&self) -> usize {
        self.p_x.len()
    }

    pub fn ny(&self) -> usize {
        self.p_y_given_x.first().map_or(0, Vec::len)
    }

    pub fn nz(&self) -> usize {
        self.p_z_given_x.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        check_pmf(&self.p_x, "p_x")?;
        if self.p_y_given_x.len() != self.nx() || self.p_z_given_x.len() != self.nx() {
            return Err(ProtocolError::InvalidInstance {
                reason: "conditional pmf row count must equal |X|".into(),
            });
        }
        for (x, row) in self.p_y_given_x.iter().enumerate() {
            if row.len() != self.ny() {
                return Err(ProtocolError::InvalidInstance {
                    reason: format!("p_y_given_x row {x} has inconsistent width"),
                });
            }
            check_pmf(row, &format!("p_y_given_x row {x}"))?;
        }
        for (x, row) in self.p_z_given_x.iter().enumerate() {
            if row.len() != self.nz() {
                return Err(ProtocolError::InvalidInstance {
                    reason: format!("p_z_given_x row {x} has inconsistent width"),
                });
            }
            check_pmf(row, &format!("p_z_given_x row {x}"))?;
        }
        Ok(())
    }
}

/// Destination-side quantizer `p(yhat | y)`; `Yhat` shares `Y`'s alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizerChannel {
    /// Rows indexed by y, columns by yhat (square).
    pub p_yhat_given_y: Vec<Vec<f64>>,
}

impl QuantizerChannel {
    /// The identity quantizer on an alphabet of `ny` symbols.
    pub fn identity(ny: usize) -> Self {
        QuantizerChannel {
            p_yhat_given_y: (0..ny)
                .map(|y| (0..ny).map(|h| if h == y { 1.0 } else { 0.0 }).collect())
                .collect(),
        }
    }

    pub fn validate(&self, ny: usize) -> Result<(), ProtocolError> {
        if self.p_yhat_given_y.len() != ny {
            return Err(ProtocolError::InvalidInstance {
                reason: "quantizer row count must equal |Y|".into(),
            });
        }
        for (y, row) in self.p_yhat_given_y.iter().enumerate() {
            if row.len() != ny {
                return Err(ProtocolError::InvalidInstance {
                    reason: format!("quantizer row {y} must have |Y| entries"),
                });
            }
            check_pmf(row, &format!("p_yhat_given_y row {y}"))?;
        }
        Ok(())
    }
}

/// A complete protocol problem: the wiretap channel plus the quantizer.
/// Serializable so instances can live in JSON files next to the binary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolInstance {
    pub channel: DMWiretapChannel,
    pub quantizer: QuantizerChannel,
}

impl ProtocolInstance {
    pub fn validate(&self) -> Result<(), ProtocolError> {
        self.channel.validate()?;
        self.quantizer.validate(self.channel.ny())
    }
}

// ---------------------------------------------------------------------------
// Joint pmf
// ---------------------------------------------------------------------------

/// The joint law `p(x, y, yhat, z) = p(x) p(y|x) p(yhat|y) p(z|x)` with all
/// the marginals the protocol needs.
#[derive(Debug, Clone)]
pub struct JointPmf {
    pub nx: usize,
    pub ny: usize,
    pub nyh: usize,
    pub nz: usize,
    /// Flattened x-major: index `((x * ny + y) * nyh + yh) * nz + z`.
    p: Vec<f64>,
}

impl JointPmf {
    pub fn from_instance(inst: &ProtocolInstance) -> Result<Self, ProtocolError> {
        inst.validate()?;
        let (nx, ny, nz) = (inst.channel.nx(), inst.channel.ny(), inst.channel.nz());
        let nyh = ny;
        let mut p = vec![0.0; nx * ny * nyh * nz];
        for x in 0..nx {
            for y in 0..ny {
                let pxy = inst.channel.p_x[x] * inst.channel.p_y_given_x[x][y];
                for yh in 0..nyh {
                    let pxyh = pxy * inst.quantizer.p_yhat_given_y[y][yh];
                    for z in 0..nz {
                        p[((x * ny + y) * nyh + yh) * nz + z] =
                            pxyh * inst.channel.p_z_given_x[x][z];
                    }
                }
            }
        }
        Ok(JointPmf { nx, ny, nyh, nz, p })
    }

    #[inline]
    pub fn prob(&self, x: usize, y: usize, yh: usize, z: usize) -> f64 {
        self.p[((x * self.ny + y) * self.nyh + yh) * self.nz + z]
    }

    /// The full 4-coordinate pmf as a [`TuplePmf`] (order x, y, yhat, z).
    pub fn tuple4(&self) -> TuplePmf {
        TuplePmf::new(vec![self.nx, self.ny, self.nyh, self.nz], self.p.clone())
    }

    pub fn pair_y_yhat(&self) -> Vec<Vec<f64>> {
        let mut t = vec![vec![0.0; self.nyh]; self.ny];
        for x in 0..self.nx {
            for y in 0..self.ny {
                for yh in 0..self.nyh {
                    for z in 0..self.nz {
                        t[y][yh] += self.prob(x, y, yh, z);
                    }
                }
            }
        }
        t
    }

    pub fn pair_x_yhat(&self) -> Vec<Vec<f64>> {
        let mut t = vec![vec![0.0; self.nyh]; self.nx];
        for x in 0..self.nx {
            for y in 0..self.ny {
                for yh in 0..self.nyh {
                    for z in 0..self.nz {
                        t[x][yh] += self.prob(x, y, yh, z);
                    }
                }
            }
        }
        t
    }

    pub fn pair_yhat_z(&self) -> Vec<Vec<f64>> {
        let mut t = vec![vec![0.0; self.nz]; self.nyh];
        for x in 0..self.nx {
            for y in 0..self.ny {
                for yh in 0..self.nyh {
                    for z in 0..self.nz {
                        t[yh][z] += self.prob(x, y, yh, z);
                    }
                }
            }
        }
        t
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        self.pair_y_yhat().iter().map(|row| row.iter().sum()).collect()
    }

    pub fn marginal_yhat(&self) -> Vec<f64> {
        let t = self.pair_y_yhat();
        (0..self.nyh).map(|yh| t.iter().map(|row| row[yh]).sum()).collect()
    }

    /// `p(x, z | y)` flattened as `x * nz + z`; `None` when `p(y) = 0`.
    pub fn cond_xz_given_y(&self, y: usize) -> Option<Vec<f64>> {
        let mut t = vec![0.0; self.nx * self.nz];
        let mut py = 0.0;
        for x in 0..self.nx {
            for z in 0..self.nz {
                // Marginalize yhat out of the 4-tuple.
                let mut v = 0.0;
                for yh in 0..self.nyh {
                    v += self.prob(x, y, yh, z);
                }
                t[x * self.nz + z] = v;
                py += v;
            }
        }
        if py <= 0.0 {
            return None;
        }
        for v in t.iter_mut() {
            *v /= py;
        }
        Some(t)
    }
}

// ---------------------------------------------------------------------------
// Information quantities
// ---------------------------------------------------------------------------

/// Mutual information of a joint pmf given as rows, in bits, with the
/// convention `0 log 0 = 0`.
pub fn mutual_information(joint: &[Vec<f64>]) -> f64 {
    let rows = joint.len();
    let cols = joint.first().map_or(0, Vec::len);
    let mut px = vec![0.0; rows];
    let mut py = vec![0.0; cols];
    for (i, row) in joint.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            px[i] += v;
            py[j] += v;
        }
    }
    let mut mi = 0.0;
    for (i, row) in joint.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v > 0.0 {
                mi += v * (v / (px[i] * py[j])).log2();
            }
        }
    }
    mi
}

/// Key rate of the channel model with its fixed input pmf:
/// `I(X;Y) - I(Y;Z)` in bits.
pub fn key_rate_formula(dmc: &DMWiretapChannel) -> Result<f64, ProtocolError> {
    dmc.validate()?;
    let (nx, ny, nz) = (dmc.nx(), dmc.ny(), dmc.nz());
    let mut pxy = vec![vec![0.0; ny]; nx];
    let mut pyz = vec![vec![0.0; nz]; ny];
    for x in 0..nx {
        for y in 0..ny {
            let v = dmc.p_x[x] * dmc.p_y_given_x[x][y];
            pxy[x][y] = v;
            for z in 0..nz {
                pyz[y][z] += v * dmc.p_z_given_x[x][z];
            }
        }
    }
    Ok(mutual_information(&pxy) - mutual_information(&pyz))
}

// ---------------------------------------------------------------------------
// Coding rates
// ---------------------------------------------------------------------------

/// The four coding rates, in bits per symbol:
///
/// ```text
/// R2 = I(Y;Yhat) - I(X;Yhat) + 22e     (bin index, sent publicly)
/// R3 = I(X;Yhat) - I(Yhat;Z) - e       (secret key)
/// R4 = I(Yhat;Z) - 17e                 (within-bin padding)
/// R1 = R2 + R3 + R4                    (total codebook rate, = I(Y;Yhat) + 4e)
/// ```
///
/// `R1` is stored as the floating-point sum `(R2 + R3) + R4` so the identity
/// is exact, not merely approximate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateQuadruple {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
    pub epsilon: f64,
}

impl RateQuadruple {
    /// Assemble a quadruple with `r1` defined as the exact sum.
    pub fn from_parts(r2: f64, r3: f64, r4: f64, epsilon: f64) -> Self {
        RateQuadruple { r1: (r2 + r3) + r4, r2, r3, r4, epsilon }
    }

    /// Nonnegativity of all rates, positivity of epsilon, and the exact sum
    /// identity.
    pub fn validate(&self) -> Result<(), ProtocolError> {
        let all = [self.r1, self.r2, self.r3, self.r4];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(ProtocolError::InconsistentRates {
                detail: "rates must be finite and nonnegative",
            });
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(ProtocolError::InconsistentRates { detail: "epsilon must be positive" });
        }
        if self.r1 != (self.r2 + self.r3) + self.r4 {
            return Err(ProtocolError::InconsistentRates {
                detail: "R1 must equal R2 + R3 + R4 exactly",
            });
        }
        Ok(())
    }
}

/// Build the rate quadruple for an instance at slack `epsilon`.
///
/// Fails with [`ProtocolError::InfeasibleRates`] when the key rate `R3` or
/// the padding rate `R4` is not strictly positive — the quantizer must
/// satisfy `I(X;Yhat) > I(Yhat;Z) > 0` with room for the epsilon terms.
pub fn build_rates(
    inst: &ProtocolInstance,
    epsilon: f64,
) -> Result<RateQuadruple, ProtocolError> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(ProtocolError::InconsistentRates { detail: "epsilon must be positive" });
    }
    let joint = JointPmf::from_instance(inst)?;
    let i_y_yhat = mutual_information(&joint.pair_y_yhat());
    let i_x_yhat = mutual_information(&joint.pair_x_yhat());
    let i_yhat_z = mutual_information(&joint.pair_yhat_z());
    let r3 = i_x_yhat - i_yhat_z - epsilon;
    let r4 = i_yhat_z - 17.0 * epsilon;
    if r3 <= 0.0 || r4 <= 0.0 {
        return Err(ProtocolError::InfeasibleRates { r3, r4 });
    }
    let r2 = i_y_yhat - i_x_yhat + 22.0 * epsilon;
    Ok(RateQuadruple::from_parts(r2, r3, r4, epsilon))
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
