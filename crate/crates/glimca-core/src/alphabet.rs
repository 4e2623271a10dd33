//! Finite symbol alphabets.
//!
//! Symbols are interned: an [`Alphabet`] owns the name list and everything
//! else works with [`Sym`] indices. Declaration order is the canonical order,
//! so all enumerations downstream are deterministic.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Index of a symbol within its alphabet.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Sym(pub u16);

impl Sym {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

/// A nonempty, duplicate-free list of named symbols.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Alphabet {
    names: Vec<String>,
    index: BTreeMap<String, Sym>,
    single_char: bool,
}

impl Alphabet {
    /// Builds an alphabet from symbol names. Names must be nonempty, unique,
    /// and free of whitespace and commas (those are separators in word
    /// literals).
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::BadAlphabet("no symbols".to_string()));
        }
        if names.len() > u16::MAX as usize {
            return Err(Error::BadAlphabet("more than 65535 symbols".to_string()));
        }
        let mut index = BTreeMap::new();
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == ',') {
                return Err(Error::BadAlphabet(alloc::format!(
                    "symbol name {name:?} is empty or contains a separator"
                )));
            }
            if index.insert(name.clone(), Sym(i as u16)).is_some() {
                return Err(Error::BadAlphabet(alloc::format!("duplicate symbol {name:?}")));
            }
        }
        let single_char = names.iter().all(|n| n.chars().count() == 1);
        Ok(Alphabet { names, index, single_char })
    }

    /// One symbol per character of `chars`.
    pub fn from_chars(chars: &str) -> Result<Self> {
        Self::new(chars.chars().map(|c| c.to_string()))
    }

    /// The binary alphabet `{0, 1}`.
    pub fn binary() -> Self {
        Self::from_chars("01").expect("binary alphabet is valid")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty alphabets
    }

    /// True when every symbol name is a single character, so words render
    /// without separators.
    pub fn is_single_char(&self) -> bool {
        self.single_char
    }

    pub fn symbols(&self) -> impl Iterator<Item = Sym> + '_ {
        (0..self.names.len() as u16).map(Sym)
    }

    pub fn sym(&self, name: &str) -> Option<Sym> {
        self.index.get(name).copied()
    }

    /// Like [`Self::sym`] but returns an error naming the offender.
    pub fn sym_checked(&self, name: &str) -> Result<Sym> {
        self.sym(name).ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn name(&self, s: Sym) -> &str {
        &self.names[s.idx()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Parses a word literal: either one symbol name per character (for
    /// single-character alphabets) or names separated by spaces or commas.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Sym>> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Vec::new());
        }
        if text.contains([' ', ',', '\t']) {
            text.split([' ', ',', '\t'])
                .filter(|p| !p.is_empty())
                .map(|p| self.sym_checked(p))
                .collect()
        } else if self.single_char {
            text.chars().map(|c| self.sym_checked(&c.to_string())).collect()
        } else {
            // A separator-free literal can still be a single symbol name.
            Ok(alloc::vec![self.sym_checked(text)?])
        }
    }

    /// Renders a word: concatenated for single-character alphabets, otherwise
    /// space-separated.
    pub fn format_word(&self, word: &[Sym]) -> String {
        if self.single_char {
            word.iter().map(|&s| self.name(s)).collect()
        } else {
            let parts: Vec<&str> = word.iter().map(|&s| self.name(s)).collect();
            parts.join(" ")
        }
    }

    /// All words of length `n` in lexicographic (declaration) order.
    pub fn words(&self, n: usize) -> WordIter {
        WordIter { base: self.len() as u16, word: alloc::vec![Sym(0); n], done: false }
    }

    /// `len^n` as a u128, for budget checks.
    pub fn count_words(&self, n: usize) -> u128 {
        (self.len() as u128).saturating_pow(n as u32)
    }
}

/// Odometer over all words of a fixed length.
pub struct WordIter {
    base: u16,
    word: Vec<Sym>,
    done: bool,
}

impl Iterator for WordIter {
    type Item = Vec<Sym>;

    fn next(&mut self) -> Option<Vec<Sym>> {
        if self.done {
            return None;
        }
        let out = self.word.clone();
        // Increment from the rightmost position.
        let mut pos = self.word.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            if self.word[pos].0 + 1 < self.base {
                self.word[pos].0 += 1;
                for s in &mut self.word[pos + 1..] {
                    *s = Sym(0);
                }
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_rejects_bad_names() {
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(["a", "b c"]).is_err());
        assert!(Alphabet::new(["a", ""]).is_err());
        assert!(Alphabet::new(["x,y"]).is_err());
    }

    #[test]
    fn parse_and_format_round_trip() {
        let ab = Alphabet::binary();
        let w = ab.parse_word("0110").unwrap();
        assert_eq!(w, alloc::vec![Sym(0), Sym(1), Sym(1), Sym(0)]);
        assert_eq!(ab.format_word(&w), "0110");

        let multi = Alphabet::new(["blank", "one"]).unwrap();
        let w = multi.parse_word("one blank one").unwrap();
        assert_eq!(multi.format_word(&w), "one blank one");
        assert!(multi.parse_word("oneblank").is_err());
        assert_eq!(multi.parse_word("one").unwrap().len(), 1);
    }

    #[test]
    fn word_enumeration_is_lexicographic_and_complete() {
        let ab = Alphabet::binary();
        let all: Vec<_> = ab.words(2).collect();
        assert_eq!(all.len(), 4);
        assert_eq!(all[0], alloc::vec![Sym(0), Sym(0)]);
        assert_eq!(all[3], alloc::vec![Sym(1), Sym(1)]);
        assert!(all.windows(2).all(|p| p[0] < p[1]));

        // Length zero: exactly the empty word.
        assert_eq!(ab.words(0).count(), 1);

        let tri = Alphabet::from_chars("abc").unwrap();
        assert_eq!(tri.words(3).count(), 27);
        assert_eq!(tri.count_words(3), 27);
    }
}
