//! Factor-closed collections of words, exact or sampled.
//!
//! A [`LanguageSample`] stands in for the language of a subshift up to a
//! maximum length. It either records an exact truncated language or the
//! outcome of seeded sampling, and it always carries its provenance so
//! downstream reports can say which kind of evidence they rest on.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::alphabet::{Alphabet, Sym};
use crate::error::{Error, Result};

/// Where the words came from.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Provenance {
    /// The complete language of something, up to `max_len`.
    Exact,
    /// Collected from seeded random trajectories.
    Sampled { seed: u64, samples: usize, period: usize, burn_in: usize, t_max: usize },
}

/// Words grouped by length, factor-closed by construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LanguageSample {
    alphabet: Alphabet,
    max_len: usize,
    /// `words[k]` holds the words of length `k`; index 0 is the empty word.
    words: Vec<BTreeSet<Vec<Sym>>>,
    provenance: Provenance,
}

impl LanguageSample {
    /// Builds a sample from arbitrary words of length up to `max_len`,
    /// closing the set under taking factors.
    pub fn from_words<I>(alphabet: Alphabet, max_len: usize, words: I, provenance: Provenance) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<Sym>>,
    {
        let mut by_len: Vec<BTreeSet<Vec<Sym>>> = alloc::vec![BTreeSet::new(); max_len + 1];
        by_len[0].insert(Vec::new());
        for w in words {
            if w.len() > max_len {
                return Err(Error::BadParameter(alloc::format!(
                    "word of length {} exceeds max length {max_len}",
                    w.len()
                )));
            }
            if let Some(bad) = w.iter().find(|s| s.idx() >= alphabet.len()) {
                return Err(Error::UnknownSymbol(alloc::format!("symbol index {}", bad.0)));
            }
            by_len[w.len()].insert(w);
        }
        // Close under factors, longest lengths first.
        for k in (2..=max_len).rev() {
            let shorter: Vec<Vec<Sym>> = by_len[k]
                .iter()
                .flat_map(|w| [w[..k - 1].to_vec(), w[1..].to_vec()])
                .collect();
            by_len[k - 1].extend(shorter);
        }
        Ok(LanguageSample { alphabet, max_len, words: by_len, provenance })
    }

    /// The full shift's language up to `max_len`.
    pub fn full(alphabet: Alphabet, max_len: usize) -> Self {
        let longest: Vec<Vec<Sym>> = alphabet.words(max_len).collect();
        Self::from_words(alphabet.clone(), max_len, longest, Provenance::Exact)
            .expect("full language is well-formed")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// The words of length `k`.
    pub fn words(&self, k: usize) -> Result<&BTreeSet<Vec<Sym>>> {
        self.words.get(k).ok_or_else(|| {
            Error::BadParameter(alloc::format!("length {k} exceeds sample max {}", self.max_len))
        })
    }

    /// True when every factor of every stored word is stored too.
    pub fn is_factor_closed(&self) -> bool {
        (2..=self.max_len).all(|k| {
            self.words[k].iter().all(|w| {
                self.words[k - 1].contains(&w[..k - 1]) && self.words[k - 1].contains(&w[1..])
            })
        })
    }
}
