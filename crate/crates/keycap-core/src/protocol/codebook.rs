//! Random quantization codebook with a three-way binning structure.
//!
//! The codebook holds `N1 = N2 * N3 * N4` length-`n` words over the
//! quantizer output alphabet, drawn i.i.d. from the quantizer marginal.
//! A word index `m` decomposes into `(j, l, w)` — bin, key, and residual
//! coordinates — via the 1-based layout
//!
//! ```text
//! m = j + (l - 1) * N2 + (w - 1) * N2 * N3
//! ```
//!
//! so the public message `J` names a bin of `N3 * N4` words, the key `L`
//! refines the bin, and `W` indexes what remains. Each count is
//! `max(1, ceil(2^{n R}))` for its rate `R`.

use crate::channel::SeedSpec;
use crate::protocol::{ProtocolError, RateQuadruple};

// ---------------------------------------------------------------------------
// Counts and index layout
// ---------------------------------------------------------------------------

/// Default bound on the total number of codewords.
pub const CODEBOOK_DEFAULT_CAP: u64 = 1 << 20;

/// Codeword counts for the bin / key / residual coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodebookCounts {
    pub n2: u64,
    pub n3: u64,
    pub n4: u64,
}

/// `max(1, ceil(2^{n r}))`, guarding against overflow of the exponent.
fn count_from_rate(rate: f64, n: usize) -> Result<u64, ProtocolError> {
    let exponent = n as f64 * rate;
    if exponent > 62.0 {
        return Err(ProtocolError::SizeOverflow {
            codewords: u128::MAX,
            cap: CODEBOOK_DEFAULT_CAP,
        });
    }
    Ok((exponent.exp2().ceil() as u64).max(1))
}

impl CodebookCounts {
    /// Derive counts from rates at blocklength `n`, enforcing the cap on
    /// the total codebook size.
    pub fn from_rates(rates: &RateQuadruple, n: usize, cap: u64) -> Result<Self, ProtocolError> {
        rates.validate()?;
        let n2 = count_from_rate(rates.r2, n)?;
        let n3 = count_from_rate(rates.r3, n)?;
        let n4 = count_from_rate(rates.r4, n)?;
        let total = n2 as u128 * n3 as u128 * n4 as u128;
        if total > cap as u128 {
            return Err(ProtocolError::SizeOverflow { codewords: total, cap });
        }
        Ok(CodebookCounts { n2, n3, n4 })
    }

    /// Total number of codewords `N1`.
    pub fn total(&self) -> u64 {
        self.n2 * self.n3 * self.n4
    }

    /// Map 1-based coordinates `(j, l, w)` to the 1-based word index.
    pub fn flatten(&self, j: u64, l: u64, w: u64) -> u64 {
        debug_assert!((1..=self.n2).contains(&j));
        debug_assert!((1..=self.n3).contains(&l));
        debug_assert!((1..=self.n4).contains(&w));
        j + (l - 1) * self.n2 + (w - 1) * self.n2 * self.n3
    }

    /// Inverse of [`flatten`](Self::flatten) for `m` in `1..=total()`.
    pub fn unflatten(&self, m: u64) -> (u64, u64, u64) {
        debug_assert!((1..=self.total()).contains(&m));
        let zero = m - 1;
        let j = zero % self.n2 + 1;
        let l = (zero / self.n2) % self.n3 + 1;
        let w = zero / (self.n2 * self.n3) + 1;
        (j, l, w)
    }
}

// ---------------------------------------------------------------------------
// Codebook
// ---------------------------------------------------------------------------

/// A fully materialized random codebook.
#[derive(Debug, Clone)]
pub struct Codebook {
    pub counts: CodebookCounts,
    pub n: usize,
    words: Vec<Vec<usize>>,
}

impl Codebook {
    /// Wrap explicit words (index `m` at position `m - 1`). Panics if the
    /// word list does not match `counts.total()` rows of length `n`.
    pub fn from_words(counts: CodebookCounts, n: usize, words: Vec<Vec<usize>>) -> Self {
        assert_eq!(words.len() as u64, counts.total(), "one word per index");
        assert!(words.iter().all(|w| w.len() == n), "words must have length n");
        Codebook { counts, n, words }
    }

    /// The word at 1-based index `m`.
    pub fn word(&self, m: u64) -> &[usize] {
        &self.words[(m - 1) as usize]
    }
}

/// Draw the codebook: word `m` gets `n` i.i.d. symbols from `p_yhat`, on
/// its own counter stream so the book is independent of iteration order.
pub fn generate_codebook(
    rates: &RateQuadruple,
    p_yhat: &[f64],
    n: usize,
    seed: &SeedSpec,
    cap: u64,
) -> Result<Codebook, ProtocolError> {
    let counts = CodebookCounts::from_rates(rates, n, cap)?;
    let total = counts.total();
    let mut words = Vec::with_capacity(total as usize);
    for m in 1..=total {
        let mut rng = seed.stream("codebook", m);
        let word: Vec<usize> = (0..n).map(|_| rng.next_categorical(p_yhat)).collect();
        words.push(word);
    }
    Ok(Codebook { counts, n, words })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
