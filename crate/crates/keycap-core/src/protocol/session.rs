//! One end-to-end execution of the quantize-and-bin secret-sharing scheme.
//!
//! A session draws the channel triple `(X^n, Y^n, Z^n)`, then walks the
//! deterministic protocol maps:
//!
//! 1. **Quantizer** (destination): `M` is the smallest codeword index with
//!    `S_e(Y^n, Yhat^n(m)) = 1`, or `0` when none is accepted. The bin
//!    index `J` of `M` is announced publicly; the within-bin key index `L`
//!    is kept. On failure (`M = 0`) the destination sets `J = 0` and draws
//!    `L` uniformly from the key set.
//! 2. **Source decoder**: inside bin `J` it looks for the codeword index
//!    whose word is pair-typical with `X^n`; a unique hit gives `M_hat` and
//!    the key `K` (its within-bin key coordinate), anything else gives
//!    `M_hat = 0`, `K = 0`. Uniqueness is at the index level: duplicate
//!    words at distinct indices count as ambiguity.
//! 3. **Fictitious receiver**: granted `J` and `L`, it looks for the unique
//!    index in the subcode `C(J, L)` whose word is pair-typical with `Z^n`,
//!    giving `M_tilde` (or `0`). Its success probability upper-bounds how
//!    much of `M` the pair `(Z^n, J, L)` already determines.
//!
//! All randomness comes from the session's counter stream in a fixed draw
//! order (`x`, `y`, `z`, fallback key), so outcomes are reproducible and
//! independent across session indices.

use crate::channel::SeedSpec;
use crate::protocol::codebook::{generate_codebook, Codebook};
use crate::protocol::typicality::{
    is_jointly_typical, s_indicator, AcceptanceTable, SMode, TuplePmf,
};
use crate::protocol::{JointPmf, ProtocolError, ProtocolInstance, RateQuadruple};

// ---------------------------------------------------------------------------
// Setup
// ---------------------------------------------------------------------------

/// Everything one protocol run needs: the instance, its joint law, rates,
/// the materialized codebook, and the evaluation strategy for `S_e`.
#[derive(Debug, Clone)]
pub struct ProtocolSetup {
    pub instance: ProtocolInstance,
    pub joint: JointPmf,
    pub rates: RateQuadruple,
    pub codebook: Codebook,
    pub n: usize,
    pub epsilon: f64,
    pub seed: SeedSpec,
    pub s_mode: SMode,
    /// Fast path for exact `S_e` evaluation.
    accept: Option<AcceptanceTable>,
    /// Reference pmf for the source decoder's (x, yhat) typicality check.
    pair_x_yhat: TuplePmf,
    /// Reference pmf for the fictitious receiver's (yhat, z) check.
    pair_yhat_z: TuplePmf,
    /// Uniform pmf over the key set, for the fallback draw.
    fallback_pmf: Vec<f64>,
}

impl ProtocolSetup {
    /// Assemble a setup around an existing codebook (the escape hatch for
    /// hand-built codebooks; [`build_setup`] is the usual entry point).
    pub fn from_parts(
        instance: ProtocolInstance,
        n: usize,
        epsilon: f64,
        rates: RateQuadruple,
        codebook: Codebook,
        seed: SeedSpec,
        s_mode: SMode,
    ) -> Result<Self, ProtocolError> {
        let joint = JointPmf::from_instance(&instance)?;
        rates.validate()?;
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(ProtocolError::InvalidInstance {
                reason: format!("typicality epsilon must lie in (0, 1), got {epsilon}"),
            });
        }
        if n == 0 {
            return Err(ProtocolError::InvalidInstance {
                reason: "blocklength must be at least 1".into(),
            });
        }
        if codebook.n != n {
            return Err(ProtocolError::InvalidInstance {
                reason: format!("codebook blocklength {} does not match n = {n}", codebook.n),
            });
        }
        let accept = match s_mode {
            SMode::Exact { cap } => Some(AcceptanceTable::build(&joint, n, epsilon, cap)?),
            SMode::MonteCarlo { replicates } => {
                if replicates == 0 {
                    return Err(ProtocolError::InsufficientReplicates { got: 0, required: 1 });
                }
                None
            }
        };
        let pair_x_yhat = TuplePmf::from_rows(&joint.pair_x_yhat());
        let pair_yhat_z = TuplePmf::from_rows(&joint.pair_yhat_z());
        let n3 = codebook.counts.n3;
        let fallback_pmf = vec![1.0 / n3 as f64; n3 as usize];
        Ok(ProtocolSetup {
            instance,
            joint,
            rates,
            codebook,
            n,
            epsilon,
            seed,
            s_mode,
            accept,
            pair_x_yhat,
            pair_yhat_z,
            fallback_pmf,
        })
    }

    /// The quantizer map: smallest accepted codeword index, `0` if none.
    pub(crate) fn quantize(&self, y_seq: &[usize]) -> Result<u64, ProtocolError> {
        for m in 1..=self.codebook.counts.total() {
            let word = self.codebook.word(m);
            let accepted = match &self.accept {
                Some(table) => table.s_indicator(y_seq, word),
                None => s_indicator(
                    &self.joint,
                    y_seq,
                    word,
                    self.epsilon,
                    self.s_mode,
                    &self.seed,
                )?,
            };
            if accepted {
                return Ok(m);
            }
        }
        Ok(0)
    }

    /// The source decoder: unique index in bin `j` whose word is
    /// pair-typical with `x_seq`, else `0`.
    pub(crate) fn source_decode(&self, x_seq: &[usize], j: u64) -> u64 {
        let counts = &self.codebook.counts;
        let mut found = 0u64;
        for l in 1..=counts.n3 {
            for w in 1..=counts.n4 {
                let m = counts.flatten(j, l, w);
                if is_jointly_typical(
                    &self.pair_x_yhat,
                    &[x_seq, self.codebook.word(m)],
                    self.epsilon,
                ) {
                    if found != 0 {
                        return 0; // ambiguous
                    }
                    found = m;
                }
            }
        }
        found
    }

    /// The fictitious receiver: unique index in subcode `C(j, l)` whose
    /// word is pair-typical with `z_seq`, else `0`.
    pub(crate) fn fictitious_decode(&self, z_seq: &[usize], j: u64, l: u64) -> u64 {
        let counts = &self.codebook.counts;
        let mut found = 0u64;
        for w in 1..=counts.n4 {
            let m = counts.flatten(j, l, w);
            if is_jointly_typical(
                &self.pair_yhat_z,
                &[self.codebook.word(m), z_seq],
                self.epsilon,
            ) {
                if found != 0 {
                    return 0; // ambiguous
                }
                found = m;
            }
        }
        found
    }

    /// Key coordinate of a codeword index (`0` stays `0`).
    pub(crate) fn key_of(&self, m: u64) -> u64 {
        if m == 0 {
            0
        } else {
            self.codebook.counts.unflatten(m).1
        }
    }
}

/// Build rates-consistent codebook and setup in one step.
pub fn build_setup(
    instance: &ProtocolInstance,
    n: usize,
    epsilon: f64,
    rates: &RateQuadruple,
    seed: &SeedSpec,
    s_mode: SMode,
    codebook_cap: u64,
) -> Result<ProtocolSetup, ProtocolError> {
    let joint = JointPmf::from_instance(instance)?;
    let codebook = generate_codebook(rates, &joint.marginal_yhat(), n, seed, codebook_cap)?;
    ProtocolSetup::from_parts(
        instance.clone(),
        n,
        epsilon,
        *rates,
        codebook,
        seed.clone(),
        s_mode,
    )
}

// ---------------------------------------------------------------------------
// Session
// ---------------------------------------------------------------------------

/// All quantities produced by one session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionOutcome {
    /// Quantizer output (0 = no codeword accepted).
    pub m: u64,
    /// Public bin index (0 iff `m` = 0).
    pub j: u64,
    /// Destination key: key coordinate of `m`, or the uniform fallback.
    pub l: u64,
    /// Source key: key coordinate of `m_hat`, 0 on decode failure.
    pub k: u64,
    /// Source reconstruction of `m` (0 = failure).
    pub m_hat: u64,
    /// Fictitious receiver's reconstruction of `m` (0 = failure).
    pub m_tilde: u64,
    pub x_seq: Vec<usize>,
    pub y_seq: Vec<usize>,
    pub z_seq: Vec<usize>,
}

/// Run session `t`: draw the channel triple from the session stream, then
/// apply the quantizer, source decoder, and fictitious receiver.
pub fn run_session(setup: &ProtocolSetup, t: u64) -> Result<SessionOutcome, ProtocolError> {
    let n = setup.n;
    let ch = &setup.instance.channel;
    let mut rng = setup.seed.stream("session", t);

    // Fixed draw order so outcomes are reproducible: x^n, y^n, z^n, then
    // the fallback key (consumed every session whether or not it is used).
    let x_seq: Vec<usize> = (0..n).map(|_| rng.next_categorical(&ch.p_x)).collect();
    let y_seq: Vec<usize> =
        x_seq.iter().map(|&x| rng.next_categorical(&ch.p_y_given_x[x])).collect();
    let z_seq: Vec<usize> =
        x_seq.iter().map(|&x| rng.next_categorical(&ch.p_z_given_x[x])).collect();
    let fallback_l = rng.next_categorical(&setup.fallback_pmf) as u64 + 1;

    let m = setup.quantize(&y_seq)?;
    let (j, l) = if m == 0 {
        (0, fallback_l)
    } else {
        let (j, l, _w) = setup.codebook.counts.unflatten(m);
        (j, l)
    };
    let m_hat = if j == 0 { 0 } else { setup.source_decode(&x_seq, j) };
    let k = setup.key_of(m_hat);
    let m_tilde = if j == 0 { 0 } else { setup.fictitious_decode(&z_seq, j, l) };

    Ok(SessionOutcome { m, j, l, k, m_hat, m_tilde, x_seq, y_seq, z_seq })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::codebook::CodebookCounts;
    use crate::protocol::{build_rates, DMWiretapChannel, QuantizerChannel};

    /// Noiseless binary instance: X uniform, Y = X, Z = X.
    fn noiseless_binary() -> ProtocolInstance {
        ProtocolInstance {
            channel: DMWiretapChannel {
                p_x: vec![0.5, 0.5],
                p_y_given_x: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                p_z_given_x: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            },
            quantizer: QuantizerChannel::identity(2),
        }
    }

    fn micro_bsc() -> ProtocolInstance {
        ProtocolInstance {
            channel: DMWiretapChannel {
                p_x: vec![0.5, 0.5],
                p_y_given_x: vec![vec![0.9, 0.1], vec![0.1, 0.9]],
                p_z_given_x: vec![vec![0.6, 0.4], vec![0.4, 0.6]],
            },
            quantizer: QuantizerChannel::identity(2),
        }
    }

    #[test]
    fn constant_instance_with_singleton_key_always_agrees() {
        // One-symbol alphabets make every sequence typical and every bin a
        // single codeword; with a singleton key set (R3 = R4 = 0) the keys
        // must agree in every session.
        let inst = ProtocolInstance {
            channel: DMWiretapChannel {
                p_x: vec![1.0],
                p_y_given_x: vec![vec![1.0]],
                p_z_given_x: vec![vec![1.0]],
            },
            quantizer: QuantizerChannel::identity(1),
        };
        let rates = RateQuadruple::from_parts(0.5, 0.0, 0.0, 0.25);
        let seed = SeedSpec::new(21, "singleton");
        let setup =
            build_setup(&inst, 4, 0.25, &rates, &seed, SMode::default(), 1 << 20).unwrap();
        assert_eq!(
            (setup.codebook.counts.n2, setup.codebook.counts.n3, setup.codebook.counts.n4),
            (4, 1, 1)
        );
        for t in 0..20 {
            let out = run_session(&setup, t).unwrap();
            assert_eq!(out.m, 1, "first codeword is always accepted");
            assert_eq!(out.j, 1);
            assert_eq!(out.l, 1);
            assert_eq!(out.k, 1);
            assert_eq!(out.m_hat, 1);
            assert_eq!(out.m_tilde, 1);
            assert_eq!(out.k, out.l);
        }
    }

    #[test]
    fn singleton_key_space_never_disagrees_on_success() {
        // Key-space size 1 on a nondegenerate instance: whenever the source
        // decode succeeds (k > 0) the keys agree, because both sit in {1}.
        let inst = noiseless_binary();
        let rates = RateQuadruple::from_parts(0.5, 0.0, 0.0, 0.25);
        let seed = SeedSpec::new(22, "singleton-binary");
        let setup = build_setup(&inst, 4, 0.9, &rates, &seed, SMode::default(), 1 << 20).unwrap();
        let mut successes = 0;
        for t in 0..200 {
            let out = run_session(&setup, t).unwrap();
            assert_eq!(out.l, 1, "singleton key set");
            assert!(out.k == 0 || out.k == out.l);
            if out.k == out.l {
                successes += 1;
            }
        }
        assert!(successes > 0, "expected at least one successful agreement");
    }

    #[test]
    fn planted_codeword_is_found_and_keys_agree() {
        // Noiseless instance; the codebook contains the session's y^n
        // exactly once, so the quantizer must select that index and both
        // decoders must reproduce it.
        let inst = noiseless_binary();
        let epsilon = 0.9;
        let n = 4;
        let rates = RateQuadruple::from_parts(0.25, 0.25, 0.0, 0.9);
        let counts = CodebookCounts::from_rates(&rates, n, 1 << 20).unwrap();
        assert_eq!((counts.n2, counts.n3, counts.n4), (2, 2, 1));
        let seed = SeedSpec::new(23, "planted");

        // Find a session whose x^n (hence y^n = z^n = x^n) is nonconstant,
        // by replaying the session stream's draw order.
        let (t, x_seq) = (0..50)
            .map(|t| {
                let mut rng = seed.stream("session", t);
                let x: Vec<usize> =
                    (0..n).map(|_| rng.next_categorical(&[0.5, 0.5])).collect();
                (t, x)
            })
            .find(|(_, x)| x.iter().any(|&v| v != x[0]))
            .expect("a nonconstant draw exists");

        // Plant x_seq at index 3 = flatten(1, 2, 1); fill the rest with its
        // complement so no duplicate exists.
        let complement: Vec<usize> = x_seq.iter().map(|&v| 1 - v).collect();
        let words = vec![complement.clone(), complement.clone(), x_seq.clone(), complement];
        let codebook = Codebook::from_words(counts, n, words);
        assert_eq!(counts.flatten(1, 2, 1), 3);

        let setup = ProtocolSetup::from_parts(
            inst,
            n,
            epsilon,
            rates,
            codebook,
            seed.clone(),
            SMode::default(),
        )
        .unwrap();
        let out = run_session(&setup, t).unwrap();
        assert_eq!(out.y_seq, x_seq);
        assert_eq!(out.m, 3, "quantizer finds the planted word");
        assert_eq!(out.j, 1);
        assert_eq!(out.l, 2);
        assert_eq!(out.m_hat, 3, "source reconstructs the same index");
        assert_eq!(out.k, 2);
        assert_eq!(out.k, out.l);
        assert_eq!(out.m_tilde, 3, "fictitious receiver reconstructs it too");
    }

    #[test]
    fn quantizer_failure_propagates_zeros_and_fallback_key() {
        // The micro BSC instance at epsilon = 0.25 never accepts any pair
        // (empty count windows), so every session aborts.
        let inst = micro_bsc();
        let rates = build_rates(&inst, 0.001).unwrap();
        let seed = SeedSpec::new(24, "abort");
        let setup =
            build_setup(&inst, 4, 0.25, &rates, &seed, SMode::default(), 1 << 20).unwrap();
        assert_eq!(
            (setup.codebook.counts.n2, setup.codebook.counts.n3, setup.codebook.counts.n4),
            (4, 5, 2)
        );
        for t in 0..10 {
            let out = run_session(&setup, t).unwrap();
            assert_eq!(out.m, 0);
            assert_eq!(out.j, 0, "m = 0 forces j = 0");
            assert_eq!(out.m_hat, 0);
            assert_eq!(out.k, 0);
            assert_eq!(out.m_tilde, 0);
            assert!((1..=5).contains(&out.l), "fallback key in the key set");
        }
    }

    #[test]
    fn fallback_key_is_close_to_uniform() {
        let inst = micro_bsc();
        let rates = build_rates(&inst, 0.001).unwrap();
        let seed = SeedSpec::new(25, "fallback");
        let setup =
            build_setup(&inst, 4, 0.25, &rates, &seed, SMode::default(), 1 << 20).unwrap();
        let n3 = setup.codebook.counts.n3;
        let sessions = 2000;
        let mut counts = vec![0u64; n3 as usize];
        for t in 0..sessions {
            let out = run_session(&setup, t).unwrap();
            counts[(out.l - 1) as usize] += 1;
        }
        for (i, &c) in counts.iter().enumerate() {
            let freq = c as f64 / sessions as f64;
            assert!(
                (freq - 0.2).abs() < 0.04,
                "key {} frequency {freq} deviates from uniform",
                i + 1
            );
        }
    }

    #[test]
    fn sessions_are_seed_deterministic() {
        let inst = noiseless_binary();
        let rates = RateQuadruple::from_parts(0.5, 0.25, 0.0, 0.9);
        let seed = SeedSpec::new(26, "det");
        let setup = build_setup(&inst, 6, 0.9, &rates, &seed, SMode::default(), 1 << 20).unwrap();
        let again = build_setup(&inst, 6, 0.9, &rates, &seed, SMode::default(), 1 << 20).unwrap();
        for t in [0u64, 1, 17] {
            assert_eq!(run_session(&setup, t).unwrap(), run_session(&again, t).unwrap());
        }
        assert_ne!(
            run_session(&setup, 0).unwrap().x_seq,
            run_session(&setup, 1).unwrap().x_seq,
            "distinct sessions draw distinct noise (with overwhelming probability)"
        );
    }

    #[test]
    fn setup_validation_rejects_bad_parameters() {
        let inst = noiseless_binary();
        let rates = RateQuadruple::from_parts(0.5, 0.25, 0.0, 0.9);
        let seed = SeedSpec::new(27, "validate");
        for bad_eps in [0.0, 1.0, 1.5, -0.1] {
            assert!(matches!(
                build_setup(&inst, 4, bad_eps, &rates, &seed, SMode::default(), 1 << 20),
                Err(ProtocolError::InvalidInstance { .. })
            ));
        }
        // Blocklength mismatch through the escape hatch.
        let counts = CodebookCounts::from_rates(&rates, 4, 1 << 20).unwrap();
        let words = vec![vec![0usize; 4]; counts.total() as usize];
        let codebook = Codebook::from_words(counts, 4, words);
        assert!(matches!(
            ProtocolSetup::from_parts(
                noiseless_binary(),
                6,
                0.9,
                rates,
                codebook,
                seed,
                SMode::default()
            ),
            Err(ProtocolError::InvalidInstance { .. })
        ));
    }
}
