//! Key-disagreement and leakage measurement for a fixed protocol setup.
//!
//! Two modes:
//!
//! * **Exact enumeration** walks every positive-probability channel triple
//!   `(x^n, y^n, z^n)` with its weight, applies the deterministic protocol
//!   maps (memoized per distinct `y^n`, `(x^n, J)`, and `(z^n, J, L)`), and
//!   accumulates the exact joint distribution of `(K, Z^n, J)` plus the
//!   mismatch probabilities. The unquantized fallback key `L` is uniform
//!   and independent, so `Pr{K != L}` on the abort path integrates to the
//!   full abort mass without expanding the mixture.
//! * **Monte Carlo** runs seeded sessions and reports plug-in estimates.
//!   The leakage estimate coarsens `Z^n` to its symbol-type vector: the
//!   plug-in mutual information over raw `Z^n` would need exponentially
//!   many replicates, while the type statistic is estimable at desk scale.
//!   Exact mode is the ground truth; the Monte Carlo leakage is an
//!   approximation and is labeled as such by the `mode` field.
//!
//! Leakage is `I(K; Z^n, J) / n` and key entropy is `H(K) / n`, both in
//! bits per symbol.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::protocol::session::{run_session, ProtocolSetup};
use crate::protocol::ProtocolError;

// ---------------------------------------------------------------------------
// Modes and report
// ---------------------------------------------------------------------------

/// Default cap on `(|X| |Y| |Z|)^n` for exact enumeration.
pub const EXACT_STATE_DEFAULT_CAP: u128 = 1 << 26;

/// Smallest admissible Monte Carlo replicate count.
pub const MIN_MC_REPLICATES: u64 = 100;

/// How the error/leakage quantities are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalysisMode {
    /// Weighted enumeration of all channel triples.
    Exact,
    /// Plug-in estimates over seeded sessions.
    MonteCarlo { replicates: u64 },
}

/// Measured protocol quality for one `(instance, rates, codebook)` triple.
#[derive(Debug, Clone, Serialize)]
pub struct LeakageReport {
    /// `Pr{K != L}` — source and destination keys disagree.
    pub pr_key_mismatch: f64,
    /// `Pr{M != M_tilde}` — the fictitious receiver misses the quantizer
    /// index.
    pub pr_fictitious_mismatch: f64,
    /// `I(K; Z^n, J) / n` in bits (type-coarsened in Monte Carlo mode).
    pub leakage_rate_bits: f64,
    /// `H(K) / n` in bits.
    pub key_entropy_rate_bits: f64,
    /// `"exact_enumeration"` or `"monte_carlo"`.
    pub mode: String,
    /// Replicate count (0 in exact mode).
    pub replicates: u64,
    /// Total accumulated probability mass; 1 within 1e-10 in exact mode.
    pub total_probability: f64,
}

/// Measure `Pr{K != L}`, `Pr{M != M_tilde}`, leakage, and key entropy.
pub fn estimate_error_and_leakage(
    setup: &ProtocolSetup,
    mode: AnalysisMode,
    cap: u128,
) -> Result<LeakageReport, ProtocolError> {
    match mode {
        AnalysisMode::Exact => exact_report(setup, cap),
        AnalysisMode::MonteCarlo { replicates } => mc_report(setup, replicates),
    }
}

// ---------------------------------------------------------------------------
// Shared information arithmetic
// ---------------------------------------------------------------------------

/// Mutual information (bits) between the first coordinate and the rest of a
/// sparse joint distribution, plus the entropy (bits) of the first
/// coordinate. Masses are normalized by their own total.
///
/// The joint law is an ordered map so every floating-point accumulation runs
/// in sorted key order; hashed iteration order varies between processes and
/// would perturb the last bits of the result from run to run.
fn mi_and_key_entropy<C: Ord + Clone>(joint: &BTreeMap<(u64, C), f64>) -> (f64, f64) {
    let total: f64 = joint.values().sum();
    if total <= 0.0 {
        return (0.0, 0.0);
    }
    let mut pk: BTreeMap<u64, f64> = BTreeMap::new();
    let mut pc: BTreeMap<C, f64> = BTreeMap::new();
    for ((k, c), &w) in joint {
        *pk.entry(*k).or_insert(0.0) += w;
        *pc.entry(c.clone()).or_insert(0.0) += w;
    }
    let mut mi = 0.0;
    for ((k, c), &w) in joint {
        if w > 0.0 {
            mi += (w / total) * ((w * total) / (pk[k] * pc[c])).log2();
        }
    }
    let mut h = 0.0;
    for &w in pk.values() {
        if w > 0.0 {
            let p = w / total;
            h -= p * p.log2();
        }
    }
    (mi.max(0.0), h.max(0.0))
}

// ---------------------------------------------------------------------------
// Exact enumeration
// ---------------------------------------------------------------------------

fn exact_report(setup: &ProtocolSetup, cap: u128) -> Result<LeakageReport, ProtocolError> {
    let n = setup.n;
    let ch = &setup.instance.channel;
    let (nx, ny, nz) = (ch.nx(), ch.ny(), ch.nz());
    let states = ((nx * ny * nz) as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if states > cap {
        return Err(ProtocolError::EnumerationTooLarge { states, cap });
    }

    // Per-position support: triples (x, y, z) with positive probability.
    let mut triples: Vec<(usize, usize, usize, f64)> = Vec::new();
    for x in 0..nx {
        let px = ch.p_x[x];
        if px <= 0.0 {
            continue;
        }
        for y in 0..ny {
            let pxy = px * ch.p_y_given_x[x][y];
            if pxy <= 0.0 {
                continue;
            }
            for z in 0..nz {
                let p = pxy * ch.p_z_given_x[x][z];
                if p > 0.0 {
                    triples.push((x, y, z, p));
                }
            }
        }
    }

    let mut m_of_y: HashMap<u64, u64> = HashMap::new();
    let mut k_of_xj: HashMap<(u64, u64), u64> = HashMap::new();
    let mut mt_of_zjl: HashMap<(u64, u64, u64), u64> = HashMap::new();
    // Joint law of (K, (Z^n, J)); the fallback key never enters it.
    let mut joint: BTreeMap<(u64, (u64, u64)), f64> = BTreeMap::new();

    let mut total = 0.0f64;
    let mut pr_key_mismatch = 0.0f64;
    let mut pr_fictitious_mismatch = 0.0f64;

    let mut digits = vec![0usize; n];
    let mut x_seq = vec![0usize; n];
    let mut y_seq = vec![0usize; n];
    let mut z_seq = vec![0usize; n];
    'odometer: loop {
        let mut weight = 1.0f64;
        let (mut x_flat, mut y_flat, mut z_flat) = (0u64, 0u64, 0u64);
        for i in 0..n {
            let (x, y, z, p) = triples[digits[i]];
            x_seq[i] = x;
            y_seq[i] = y;
            z_seq[i] = z;
            weight *= p;
            x_flat = x_flat * nx as u64 + x as u64;
            y_flat = y_flat * ny as u64 + y as u64;
            z_flat = z_flat * nz as u64 + z as u64;
        }
        total += weight;

        let m = match m_of_y.get(&y_flat) {
            Some(&m) => m,
            None => {
                let m = setup.quantize(&y_seq)?;
                m_of_y.insert(y_flat, m);
                m
            }
        };
        if m == 0 {
            // J = 0, K = 0, while L is uniform over {1..N3}: the keys
            // always disagree, and M_tilde = 0 = M.
            pr_key_mismatch += weight;
            *joint.entry((0, (z_flat, 0))).or_insert(0.0) += weight;
        } else {
            let (j, l, _w) = setup.codebook.counts.unflatten(m);
            let k = *k_of_xj
                .entry((x_flat, j))
                .or_insert_with(|| setup.key_of(setup.source_decode(&x_seq, j)));
            if k != l {
                pr_key_mismatch += weight;
            }
            let mt = *mt_of_zjl
                .entry((z_flat, j, l))
                .or_insert_with(|| setup.fictitious_decode(&z_seq, j, l));
            if mt != m {
                pr_fictitious_mismatch += weight;
            }
            *joint.entry((k, (z_flat, j))).or_insert(0.0) += weight;
        }

        // Advance the odometer.
        let mut pos = 0;
        loop {
            if pos == n {
                break 'odometer;
            }
            digits[pos] += 1;
            if digits[pos] < triples.len() {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }

    let (mi, h) = mi_and_key_entropy(&joint);
    Ok(LeakageReport {
        pr_key_mismatch: pr_key_mismatch / total,
        pr_fictitious_mismatch: pr_fictitious_mismatch / total,
        leakage_rate_bits: mi / n as f64,
        key_entropy_rate_bits: h / n as f64,
        mode: "exact_enumeration".into(),
        replicates: 0,
        total_probability: total,
    })
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

fn mc_report(setup: &ProtocolSetup, replicates: u64) -> Result<LeakageReport, ProtocolError> {
    if replicates < MIN_MC_REPLICATES {
        return Err(ProtocolError::InsufficientReplicates {
            got: replicates,
            required: MIN_MC_REPLICATES,
        });
    }
    let nz = setup.instance.channel.nz();
    let mut mismatches = 0u64;
    let mut fictitious = 0u64;
    // Joint counts of (K, (type(Z^n), J)).
    let mut joint: BTreeMap<(u64, (Vec<u64>, u64)), f64> = BTreeMap::new();
    for t in 0..replicates {
        let out = run_session(setup, t)?;
        if out.k != out.l {
            mismatches += 1;
        }
        if out.m != out.m_tilde {
            fictitious += 1;
        }
        let mut z_type = vec![0u64; nz];
        for &z in &out.z_seq {
            z_type[z] += 1;
        }
        *joint.entry((out.k, (z_type, out.j))).or_insert(0.0) += 1.0;
    }
    let (mi, h) = mi_and_key_entropy(&joint);
    let r = replicates as f64;
    Ok(LeakageReport {
        pr_key_mismatch: mismatches as f64 / r,
        pr_fictitious_mismatch: fictitious as f64 / r,
        leakage_rate_bits: mi / setup.n as f64,
        key_entropy_rate_bits: h / setup.n as f64,
        mode: "monte_carlo".into(),
        replicates,
        total_probability: 1.0,
    })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
