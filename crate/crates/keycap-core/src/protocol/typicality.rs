//! Robust (strong) joint typicality and the quantizer acceptance indicator.
//!
//! A tuple of sequences is typical when every cell of the reference joint
//! pmf sees an empirical frequency within a multiplicative `epsilon` of its
//! probability; zero-probability cells must have zero counts. The quantizer
//! accepts a codeword `yhat^n` for an observation `y^n` when the typicality
//! event remains likely once the unseen source and eavesdropper sequences
//! are averaged out:
//!
//! ```text
//! S_e(y^n, yhat^n) = 1  iff  Pr{ T_e(X^n, y^n, yhat^n, Z^n) = 1 | Y^n = y^n } >= 1 - e
//! ```
//!
//! The probability is computed exactly: conditioned on `y^n`, the pairs
//! `(X_i, Z_i)` are independent with law `p(x, z | y_i)`, and the typicality
//! event only constrains per-cell counts, so it factorizes over groups of
//! positions sharing the same `(y_i, yhat_i)` value into independent
//! constrained-multinomial probabilities, each solved by dynamic
//! programming. Each group factor depends on its positions only through
//! their number, so [`AcceptanceTable`] precomputes all factors once and
//! reduces every later query to a histogram and a short product. A seeded
//! Monte Carlo mode estimates the same probability for instances beyond the
//! exact-mode cap.

use crate::channel::SeedSpec;
use crate::protocol::{JointPmf, ProtocolError};
use crate::rng::hash_label;

// ---------------------------------------------------------------------------
// Tuple pmfs and typicality
// ---------------------------------------------------------------------------

/// A pmf over a product of finite alphabets, flattened row-major.
#[derive(Debug, Clone)]
pub struct TuplePmf {
    pub dims: Vec<usize>,
    pub p: Vec<f64>,
}

impl TuplePmf {
    pub fn new(dims: Vec<usize>, p: Vec<f64>) -> Self {
        let cells: usize = dims.iter().product();
        assert_eq!(p.len(), cells, "pmf length must match the alphabet product");
        TuplePmf { dims, p }
    }

    /// Build from a matrix of rows (a 2-coordinate pmf).
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut p = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "rows must have equal width");
            p.extend_from_slice(row);
        }
        TuplePmf::new(vec![r, c], p)
    }

    #[inline]
    pub fn flat_index(&self, cell: &[usize]) -> usize {
        debug_assert_eq!(cell.len(), self.dims.len());
        let mut idx = 0;
        for (d, &c) in self.dims.iter().zip(cell) {
            debug_assert!(c < *d);
            idx = idx * d + c;
        }
        idx
    }
}

/// Does a count satisfy the per-cell robust-typicality window
/// `|count/n - p| <= epsilon * p`?
#[inline]
fn count_in_window(count: u64, n: usize, p: f64, epsilon: f64) -> bool {
    (count as f64 / n as f64 - p).abs() <= epsilon * p
}

/// Robust joint typicality of equal-length sequences against a reference
/// pmf. `seqs` holds one sequence per pmf coordinate.
pub fn is_jointly_typical(pmf: &TuplePmf, seqs: &[&[usize]], epsilon: f64) -> bool {
    assert_eq!(seqs.len(), pmf.dims.len(), "one sequence per coordinate");
    let n = seqs[0].len();
    assert!(seqs.iter().all(|s| s.len() == n), "sequences must share a length");
    assert!(n > 0, "typicality of the empty sequence is undefined");
    let mut counts = vec![0u64; pmf.p.len()];
    let mut cell = vec![0usize; seqs.len()];
    for i in 0..n {
        for (k, s) in seqs.iter().enumerate() {
            cell[k] = s[i];
        }
        counts[pmf.flat_index(&cell)] += 1;
    }
    counts
        .iter()
        .zip(&pmf.p)
        .all(|(&c, &p)| count_in_window(c, n, p, epsilon))
}

// ---------------------------------------------------------------------------
// Exact acceptance probability
// ---------------------------------------------------------------------------

/// Work cap for the exact dynamic program (number of elementary updates).
pub const S_EXACT_DEFAULT_CAP: u128 = 1 << 26;

/// Largest blocklength whose factorials stay finite in `f64`.
const MAX_EXACT_BLOCKLENGTH: usize = 170;

fn factorial_table(n: usize) -> Vec<f64> {
    let mut f = vec![1.0f64; n + 1];
    for i in 1..=n {
        f[i] = f[i - 1] * i as f64;
    }
    f
}

/// Probability that one group of `n_g` positions sharing the pair
/// `(y, yhat)` meets every per-cell count window, with `(X_i, Z_i)` i.i.d.
/// from `cond = p(x, z | y)` and windows taken from the 4-tuple pmf at
/// global blocklength `n`.
fn group_factor(
    joint: &JointPmf,
    cond: Option<&[f64]>,
    pair_prob: f64,
    y: usize,
    yh: usize,
    n_g: usize,
    n: usize,
    epsilon: f64,
    factorials: &[f64],
) -> f64 {
    if n_g == 0 {
        // Absent group: every cell holds count 0, which must still sit in
        // its window when the cell has positive probability.
        for x in 0..joint.nx {
            for z in 0..joint.nz {
                if !count_in_window(0, n, joint.prob(x, y, yh, z), epsilon) {
                    return 0.0;
                }
            }
        }
        return 1.0;
    }
    if pair_prob <= 0.0 {
        // Positions landed on a zero-probability (y, yhat) pair, so some
        // zero cell must receive a count: typicality is dead.
        return 0.0;
    }
    let q = match cond {
        Some(q) => q,
        None => return 0.0,
    };
    // Admissible count windows per (x, z) cell of this group. Cells with
    // q = 0 never receive counts and their 4-tuple probability is 0 as
    // well, so only positive-q cells enter the dynamic program.
    let mut windows: Vec<(f64, u64, u64)> = Vec::new(); // (q, lo, hi)
    for x in 0..joint.nx {
        for z in 0..joint.nz {
            let qxz = q[x * joint.nz + z];
            let p4 = joint.prob(x, y, yh, z);
            if qxz <= 0.0 {
                if !count_in_window(0, n, p4, epsilon) {
                    return 0.0;
                }
                continue;
            }
            let mut lo = n_g as u64 + 1;
            let mut hi = 0u64;
            for c in 0..=n_g as u64 {
                if count_in_window(c, n, p4, epsilon) {
                    lo = lo.min(c);
                    hi = hi.max(c);
                }
            }
            if lo > hi {
                return 0.0; // no admissible count at all
            }
            windows.push((qxz, lo, hi));
        }
    }
    // DP over cells: w[k] = sum over admissible counts (c_1..c_i) summing
    // to k of prod q_j^{c_j} / c_j!; the group probability is n_g! w[n_g].
    let mut w = vec![0.0f64; n_g + 1];
    w[0] = 1.0;
    for &(qxz, lo, hi) in &windows {
        let mut next = vec![0.0f64; n_g + 1];
        for k in 0..=n_g {
            if w[k] == 0.0 {
                continue;
            }
            for c in lo..=hi.min((n_g - k) as u64) {
                next[k + c as usize] += w[k] * qxz.powi(c as i32) / factorials[c as usize];
            }
        }
        w = next;
    }
    factorials[n_g] * w[n_g]
}

/// Exact `Pr{ T_e(X^n, y^n, yhat^n, Z^n) = 1 | Y^n = y^n }`.
pub fn s_probability_exact(
    joint: &JointPmf,
    y_seq: &[usize],
    yhat_seq: &[usize],
    epsilon: f64,
    cap: u128,
) -> Result<f64, ProtocolError> {
    let n = y_seq.len();
    assert_eq!(yhat_seq.len(), n, "sequences must share a length");
    assert!(n > 0, "empty session");
    if n > MAX_EXACT_BLOCKLENGTH {
        return Err(ProtocolError::EnumerationTooLarge {
            states: n as u128,
            cap: MAX_EXACT_BLOCKLENGTH as u128,
        });
    }

    // Group positions by their (y, yhat) pair.
    let mut group_sizes = vec![0u64; joint.ny * joint.nyh];
    for (&y, &yh) in y_seq.iter().zip(yhat_seq) {
        group_sizes[y * joint.nyh + yh] += 1;
    }

    // Estimated DP work: sum over groups of cells * n_g^2.
    let cells = (joint.nx * joint.nz) as u128;
    let work: u128 = group_sizes
        .iter()
        .map(|&g| cells * (g as u128) * (g as u128))
        .sum();
    if work > cap {
        return Err(ProtocolError::EnumerationTooLarge { states: work, cap });
    }

    let pair_yyh = joint.pair_y_yhat();
    let factorials = factorial_table(n);
    let mut prob = 1.0f64;
    for y in 0..joint.ny {
        let cond = joint.cond_xz_given_y(y);
        for yh in 0..joint.nyh {
            let n_g = group_sizes[y * joint.nyh + yh] as usize;
            prob *= group_factor(
                joint,
                cond.as_deref(),
                pair_yyh[y][yh],
                y,
                yh,
                n_g,
                n,
                epsilon,
                &factorials,
            );
            if prob == 0.0 {
                return Ok(0.0);
            }
        }
    }
    Ok(prob.min(1.0))
}

// ---------------------------------------------------------------------------
// Precomputed acceptance table
// ---------------------------------------------------------------------------

/// All group factors of one `(instance, n, epsilon)` triple, indexed by
/// `(y, yhat, group size)`.
///
/// Building the table runs the dynamic program once per entry; afterwards
/// the exact acceptance probability of any sequence pair is the product of
/// `ny * nyh` lookups over the pair histogram, which makes scanning a whole
/// codebook per session cheap.
#[derive(Debug, Clone)]
pub struct AcceptanceTable {
    ny: usize,
    nyh: usize,
    n: usize,
    epsilon: f64,
    /// `factor[(y * nyh + yh) * (n + 1) + n_g]`.
    factor: Vec<f64>,
}

impl AcceptanceTable {
    pub fn build(
        joint: &JointPmf,
        n: usize,
        epsilon: f64,
        cap: u128,
    ) -> Result<Self, ProtocolError> {
        assert!(n > 0, "empty session");
        if n > MAX_EXACT_BLOCKLENGTH {
            return Err(ProtocolError::EnumerationTooLarge {
                states: n as u128,
                cap: MAX_EXACT_BLOCKLENGTH as u128,
            });
        }
        // Total DP work: one run per (y, yhat, n_g) with n_g^2 cells each.
        let cells = (joint.nx * joint.nz) as u128;
        let sum_sq: u128 = (0..=n as u128).map(|g| g * g).sum();
        let work = (joint.ny * joint.nyh) as u128 * cells * sum_sq;
        if work > cap {
            return Err(ProtocolError::EnumerationTooLarge { states: work, cap });
        }
        let pair_yyh = joint.pair_y_yhat();
        let factorials = factorial_table(n);
        let mut factor = Vec::with_capacity(joint.ny * joint.nyh * (n + 1));
        for y in 0..joint.ny {
            let cond = joint.cond_xz_given_y(y);
            for yh in 0..joint.nyh {
                for n_g in 0..=n {
                    factor.push(group_factor(
                        joint,
                        cond.as_deref(),
                        pair_yyh[y][yh],
                        y,
                        yh,
                        n_g,
                        n,
                        epsilon,
                        &factorials,
                    ));
                }
            }
        }
        Ok(AcceptanceTable { ny: joint.ny, nyh: joint.nyh, n, epsilon, factor })
    }

    /// Exact acceptance probability via table lookups; agrees with
    /// [`s_probability_exact`] on every input.
    pub fn s_probability(&self, y_seq: &[usize], yhat_seq: &[usize]) -> f64 {
        assert_eq!(y_seq.len(), self.n, "blocklength mismatch");
        assert_eq!(yhat_seq.len(), self.n, "blocklength mismatch");
        let mut sizes = vec![0usize; self.ny * self.nyh];
        for (&y, &yh) in y_seq.iter().zip(yhat_seq) {
            sizes[y * self.nyh + yh] += 1;
        }
        let mut prob = 1.0f64;
        for (pair, &n_g) in sizes.iter().enumerate() {
            prob *= self.factor[pair * (self.n + 1) + n_g];
            if prob == 0.0 {
                return 0.0;
            }
        }
        prob.min(1.0)
    }

    /// The acceptance indicator `S_e`.
    pub fn s_indicator(&self, y_seq: &[usize], yhat_seq: &[usize]) -> bool {
        self.s_probability(y_seq, yhat_seq) >= 1.0 - self.epsilon
    }
}

// ---------------------------------------------------------------------------
// S indicator
// ---------------------------------------------------------------------------

/// How the acceptance probability behind `S` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SMode {
    /// Exact constrained-multinomial dynamic program, bounded by a work cap.
    Exact { cap: u128 },
    /// Seeded Monte Carlo over conditional draws of `(X^n, Z^n)`.
    MonteCarlo { replicates: u64 },
}

impl Default for SMode {
    fn default() -> Self {
        SMode::Exact { cap: S_EXACT_DEFAULT_CAP }
    }
}

/// The acceptance indicator `S_e(y^n, yhat^n)`.
///
/// The Monte Carlo mode derives its stream from the seed and a hash of both
/// sequences, so results are deterministic and independent across distinct
/// `(y^n, yhat^n)` pairs.
pub fn s_indicator(
    joint: &JointPmf,
    y_seq: &[usize],
    yhat_seq: &[usize],
    epsilon: f64,
    mode: SMode,
    seed: &SeedSpec,
) -> Result<bool, ProtocolError> {
    match mode {
        SMode::Exact { cap } => {
            let p = s_probability_exact(joint, y_seq, yhat_seq, epsilon, cap)?;
            Ok(p >= 1.0 - epsilon)
        }
        SMode::MonteCarlo { replicates } => {
            if replicates == 0 {
                return Err(ProtocolError::InsufficientReplicates { got: 0, required: 1 });
            }
            let n = y_seq.len();
            let conds: Vec<Option<Vec<f64>>> =
                (0..joint.ny).map(|y| joint.cond_xz_given_y(y)).collect();
            if y_seq.iter().any(|&y| conds[y].is_none()) {
                return Ok(false); // conditioning event has probability zero
            }
            let tuple = joint.tuple4();
            let mut seq_tag = hash_label("s-indicator");
            for &y in y_seq {
                seq_tag = (seq_tag ^ y as u64).wrapping_mul(0x0000_0100_0000_01B3);
            }
            for &yh in yhat_seq {
                seq_tag = (seq_tag ^ (yh as u64) ^ 0x9E37).wrapping_mul(0x0000_0100_0000_01B3);
            }
            let sub = SeedSpec::new(
                seed.master_seed,
                format!("{}/s{seq_tag:016x}", seed.stream_label),
            );
            let mut hits = 0u64;
            let mut x_seq = vec![0usize; n];
            let mut z_seq = vec![0usize; n];
            for r in 0..replicates {
                let mut rng = sub.stream("s-indicator", r);
                for i in 0..n {
                    let q = conds[y_seq[i]].as_ref().expect("support checked above");
                    let xz = rng.next_categorical(q);
                    x_seq[i] = xz / joint.nz;
                    z_seq[i] = xz % joint.nz;
                }
                if is_jointly_typical(&tuple, &[&x_seq, y_seq, yhat_seq, &z_seq], epsilon) {
                    hits += 1;
                }
            }
            Ok(hits as f64 / replicates as f64 >= 1.0 - epsilon)
        }
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{DMWiretapChannel, ProtocolInstance, QuantizerChannel};

    fn micro_instance(py: f64, pz: f64) -> ProtocolInstance {
        ProtocolInstance {
            channel: DMWiretapChannel {
                p_x: vec![0.5, 0.5],
                p_y_given_x: vec![vec![1.0 - py, py], vec![py, 1.0 - py]],
                p_z_given_x: vec![vec![1.0 - pz, pz], vec![pz, 1.0 - pz]],
            },
            quantizer: QuantizerChannel::identity(2),
        }
    }

    // ---- is_jointly_typical -------------------------------------------------

    #[test]
    fn exact_empirical_match_is_typical_for_any_epsilon() {
        let pmf = TuplePmf::new(vec![2], vec![0.25, 0.75]);
        let seq = [0usize, 1, 1, 1, 0, 1, 1, 1]; // frequencies exactly (1/4, 3/4)
        assert!(is_jointly_typical(&pmf, &[&seq], 1e-9));
        assert!(is_jointly_typical(&pmf, &[&seq], 0.5));
    }

    #[test]
    fn constant_sequence_under_uniform_pmf_is_atypical() {
        let pmf = TuplePmf::new(vec![2], vec![0.5, 0.5]);
        let seq = vec![1usize; 20];
        assert!(!is_jointly_typical(&pmf, &[&seq], 0.1));
    }

    #[test]
    fn zero_probability_cells_force_zero_counts() {
        let pmf = TuplePmf::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]);
        let a = [0usize, 1, 0, 1];
        let matched = [0usize, 1, 0, 1];
        let crossed = [1usize, 1, 0, 1]; // puts one count on the (0,1) zero cell
        assert!(is_jointly_typical(&pmf, &[&a, &matched], 0.1));
        assert!(!is_jointly_typical(&pmf, &[&a, &crossed], 0.9));
    }

    #[test]
    fn enumeration_count_matches_combinatorial_oracle() {
        // n = 12, p = (0.3, 0.7), epsilon = 0.2: counts of symbol 0 must lie
        // in [12*0.3*0.8, 12*0.3*1.2] = [2.88, 4.32] -> {3, 4}, and counts of
        // symbol 1 in [6.72, 10.08] -> {7..10}, jointly the zero-count in
        // {3, 4}. Expected number of typical sequences: C(12,3) + C(12,4).
        let pmf = TuplePmf::new(vec![2], vec![0.3, 0.7]);
        let n = 12;
        let mut count = 0u64;
        for bits in 0u32..(1 << n) {
            let seq: Vec<usize> = (0..n).map(|i| ((bits >> i) & 1) as usize).collect();
            if is_jointly_typical(&pmf, &[&seq], 0.2) {
                count += 1;
            }
        }
        let choose = |n: u64, k: u64| -> u64 {
            let mut v = 1u64;
            for i in 0..k {
                v = v * (n - i) / (i + 1);
            }
            v
        };
        assert_eq!(count, choose(12, 3) + choose(12, 4));
        assert_eq!(count, 715);
    }

    // ---- s_probability_exact ---------------------------------------------------

    #[test]
    fn exact_probability_matches_bruteforce_at_n6() {
        // Enumerate all 4^6 conditional (x^n, z^n) draws and sum the weights
        // of those that make the 4-tuple typical.
        let inst = micro_instance(0.1, 0.4);
        let joint = crate::protocol::JointPmf::from_instance(&inst).unwrap();
        let tuple = joint.tuple4();
        let n = 6;
        for (y_seq, yhat_seq, epsilon) in [
            (vec![0, 1, 0, 0, 1, 0], vec![0, 1, 0, 0, 1, 0], 0.5),
            (vec![0, 1, 0, 0, 1, 0], vec![0, 1, 0, 0, 1, 0], 0.9),
            (vec![0, 0, 0, 1, 1, 1], vec![0, 0, 0, 1, 1, 1], 0.75),
            (vec![0, 1, 1, 0, 1, 0], vec![1, 1, 0, 0, 1, 0], 0.9),
        ] {
            let conds: Vec<Vec<f64>> =
                (0..2).map(|y| joint.cond_xz_given_y(y).unwrap()).collect();
            let mut brute = 0.0;
            for code in 0..(4u32.pow(n as u32)) {
                let mut c = code;
                let mut x_seq = vec![0usize; n];
                let mut z_seq = vec![0usize; n];
                let mut w = 1.0;
                for i in 0..n {
                    let cell = (c % 4) as usize;
                    c /= 4;
                    x_seq[i] = cell / 2;
                    z_seq[i] = cell % 2;
                    w *= conds[y_seq[i]][cell];
                }
                if w > 0.0
                    && is_jointly_typical(&tuple, &[&x_seq, &y_seq, &yhat_seq, &z_seq], epsilon)
                {
                    brute += w;
                }
            }
            let dp =
                s_probability_exact(&joint, &y_seq, &yhat_seq, epsilon, S_EXACT_DEFAULT_CAP)
                    .unwrap();
            assert!(
                (dp - brute).abs() < 1e-12,
                "eps {epsilon}: dp {dp} vs brute force {brute}"
            );
        }
    }

    #[test]
    fn acceptance_table_matches_percall_probability() {
        let inst = micro_instance(0.15, 0.35);
        let joint = crate::protocol::JointPmf::from_instance(&inst).unwrap();
        let n = 9;
        for epsilon in [0.2, 0.5, 0.9] {
            let table = AcceptanceTable::build(&joint, n, epsilon, S_EXACT_DEFAULT_CAP).unwrap();
            // Walk a spread of sequence pairs, including mismatches.
            for pattern in 0u32..64 {
                let y_seq: Vec<usize> =
                    (0..n).map(|i| ((pattern >> (i % 6)) & 1) as usize).collect();
                let yhat_seq: Vec<usize> = y_seq
                    .iter()
                    .enumerate()
                    .map(|(i, &y)| if pattern == 63 && i == 0 { 1 - y } else { y })
                    .collect();
                let direct =
                    s_probability_exact(&joint, &y_seq, &yhat_seq, epsilon, S_EXACT_DEFAULT_CAP)
                        .unwrap();
                let via_table = table.s_probability(&y_seq, &yhat_seq);
                assert!(
                    (direct - via_table).abs() < 1e-15,
                    "eps {epsilon} pattern {pattern}: {direct} vs {via_table}"
                );
                assert_eq!(table.s_indicator(&y_seq, &yhat_seq), direct >= 1.0 - epsilon);
            }
        }
    }

    #[test]
    fn micro_bsc_acceptance_is_degenerate_at_small_blocklengths() {
        // BSC(0.1)/BSC(0.4) with the identity quantizer has 4-tuple cell
        // probabilities {0.27, 0.18, 0.03, 0.02}. At epsilon = 0.25 the
        // count windows for the 0.18 cell (n = 4) and the 0.03 cell
        // (n = 10) contain no integer, so no sequence pair is ever
        // accepted: every acceptance probability is exactly zero.
        let inst = micro_instance(0.1, 0.4);
        let joint = crate::protocol::JointPmf::from_instance(&inst).unwrap();
        for n in [4usize, 10] {
            let table = AcceptanceTable::build(&joint, n, 0.25, S_EXACT_DEFAULT_CAP).unwrap();
            for bits in 0u32..(1 << n) {
                let y_seq: Vec<usize> = (0..n).map(|i| ((bits >> i) & 1) as usize).collect();
                assert_eq!(
                    table.s_probability(&y_seq, &y_seq),
                    0.0,
                    "matched pair accepted at n = {n}, bits = {bits:b}"
                );
            }
            // Mismatched pairs die on the zero-probability group.
            let y_seq = vec![0usize; n];
            let mut yh = y_seq.clone();
            yh[0] = 1;
            assert_eq!(table.s_probability(&y_seq, &yh), 0.0);
        }
    }

    #[test]
    fn mismatched_pair_under_identity_quantizer_has_zero_probability() {
        // yhat != y lands on a zero-probability (y, yhat) group.
        let inst = micro_instance(0.1, 0.4);
        let joint = crate::protocol::JointPmf::from_instance(&inst).unwrap();
        let p = s_probability_exact(&joint, &[0, 0, 1, 1], &[1, 0, 1, 1], 0.9, 1 << 20).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn deterministic_instance_probability_is_zero_or_one() {
        // X uniform 4-ary, Y = X, Z = X mod 2, identity quantizer: given
        // y^n, the tuple is fully determined, so the probability is the
        // indicator of T itself.
        let inst = ProtocolInstance {
            channel: DMWiretapChannel {
                p_x: vec![0.25; 4],
                p_y_given_x: (0..4)
                    .map(|x| (0..4).map(|y| if y == x { 1.0 } else { 0.0 }).collect())
                    .collect(),
                p_z_given_x: (0..4)
                    .map(|x| (0..2).map(|z| if z == x % 2 { 1.0 } else { 0.0 }).collect())
                    .collect(),
            },
            quantizer: QuantizerChannel::identity(4),
        };
        let joint = crate::protocol::JointPmf::from_instance(&inst).unwrap();
        let tuple = joint.tuple4();
        let perm = vec![0usize, 1, 2, 3]; // each symbol once: typical
        let x: Vec<usize> = perm.clone();
        let z: Vec<usize> = perm.iter().map(|&v| v % 2).collect();
        let eps = 0.25;
        let direct = is_jointly_typical(&tuple, &[&x, &perm, &perm, &z], eps);
        let p = s_probability_exact(&joint, &perm, &perm, eps, 1 << 20).unwrap();
        assert!(direct);
        assert_eq!(p, 1.0);
        let skewed = vec![0usize, 0, 1, 2]; // symbol 3 missing: atypical
        let p0 = s_probability_exact(&joint, &skewed, &skewed, eps, 1 << 20).unwrap();
        assert_eq!(p0, 0.0);
    }

    // ---- s_indicator -------------------------------------------------------------

    #[test]
    fn vacuous_threshold_at_epsilon_one_accepts_everything() {
        // epsilon = 1 makes the threshold 1 - epsilon = 0, and Pr >= 0
        // always, so the indicator is true for any pair — even one whose
        // acceptance probability is exactly zero.
        let inst = micro_instance(0.1, 0.4);
        let joint = crate::protocol::JointPmf::from_instance(&inst).unwrap();
        let seed = SeedSpec::new(5, "vacuous");
        let y = vec![0usize, 1, 0, 1];
        let mismatched = vec![1usize, 1, 0, 1];
        for yhat in [&y, &mismatched] {
            assert!(s_indicator(&joint, &y, yhat, 1.0, SMode::default(), &seed).unwrap());
            let mc = SMode::MonteCarlo { replicates: 50 };
            assert!(s_indicator(&joint, &y, yhat, 1.0, mc, &seed).unwrap());
        }
        // Just below 1 the threshold is positive again and a zero-probability
        // pair is rejected.
        assert!(
            !s_indicator(&joint, &y, &mismatched, 0.999_999, SMode::default(), &seed).unwrap()
        );
    }

    #[test]
    fn monte_carlo_mode_agrees_with_exact_on_clear_cases() {
        let inst = micro_instance(0.1, 0.4);
        let joint = crate::protocol::JointPmf::from_instance(&inst).unwrap();
        let seed = SeedSpec::new(6, "s-mc");
        let y = vec![0usize, 1, 0, 1, 1, 0, 0, 1];
        for eps in [0.25, 0.9] {
            let exact = s_indicator(&joint, &y, &y, eps, SMode::default(), &seed).unwrap();
            let mc = s_indicator(
                &joint,
                &y,
                &y,
                eps,
                SMode::MonteCarlo { replicates: 2000 },
                &seed,
            )
            .unwrap();
            assert_eq!(exact, mc, "eps {eps}");
        }
    }

    #[test]
    fn monte_carlo_mode_is_deterministic() {
        let inst = micro_instance(0.2, 0.3);
        let joint = crate::protocol::JointPmf::from_instance(&inst).unwrap();
        let seed = SeedSpec::new(7, "s-det");
        let y = vec![0usize, 1, 1, 0, 1, 0];
        let m = SMode::MonteCarlo { replicates: 500 };
        let a = s_indicator(&joint, &y, &y, 0.5, m, &seed).unwrap();
        let b = s_indicator(&joint, &y, &y, 0.5, m, &seed).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn work_cap_is_enforced() {
        let inst = micro_instance(0.1, 0.4);
        let joint = crate::protocol::JointPmf::from_instance(&inst).unwrap();
        let y = vec![0usize; 64];
        assert!(matches!(
            s_probability_exact(&joint, &y, &y, 0.25, 16),
            Err(ProtocolError::EnumerationTooLarge { .. })
        ));
        assert!(matches!(
            AcceptanceTable::build(&joint, 64, 0.25, 16),
            Err(ProtocolError::EnumerationTooLarge { .. })
        ));
    }
}
