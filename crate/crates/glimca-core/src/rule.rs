//! Local rules of one-dimensional cellular automata.
//!
//! A rule of radius `r` maps each window of `2r + 1` symbols to the next
//! value of the window's center cell. Small rules are stored as dense lookup
//! tables; the compiled signal automata of [`crate::signal`] have alphabets
//! far too large for that and are evaluated structurally instead.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::alphabet::{Alphabet, Sym};
use crate::error::{Error, Result};
use crate::signal::SignalRule;

/// Hard cap on dense table size (entries), independent of any user budget.
pub const TABLE_CAP: u64 = 1 << 24;

#[derive(Clone, Debug)]
pub enum RuleBody {
    /// Dense table indexed by the window read as a base-`|A|` numeral,
    /// leftmost cell most significant.
    Table(Vec<Sym>),
    /// Structural evaluator for compiled signal automata.
    Signal(Box<SignalRule>),
}

/// A cellular automaton, presented by its local rule.
#[derive(Clone, Debug)]
pub struct LocalRule {
    alphabet: Alphabet,
    radius: usize,
    name: String,
    body: RuleBody,
}

/// The stock rules used throughout tests and examples.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Builtin {
    /// `f(x)_i = min(x_i, x_{i+1})` in declaration order.
    Min,
    /// `f(x)_i = x_i`.
    Identity,
    /// `f(x)_i = x_{i+1}`, the left shift.
    Shift,
    /// Exchanges symbols 0 and 1 at the center cell.
    Swap,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::Min => "min",
            Builtin::Identity => "identity",
            Builtin::Shift => "shift",
            Builtin::Swap => "swap",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "min" => Some(Builtin::Min),
            "identity" => Some(Builtin::Identity),
            "shift" => Some(Builtin::Shift),
            "swap" => Some(Builtin::Swap),
            _ => None,
        }
    }
}

impl LocalRule {
    /// Materializes `f` as a dense table. Fails if `|A|^(2r+1)` exceeds
    /// [`TABLE_CAP`] or if `f` ever returns a symbol outside the alphabet.
    pub fn from_fn<F>(alphabet: Alphabet, radius: usize, name: &str, f: F) -> Result<Self>
    where
        F: Fn(&[Sym]) -> Sym,
    {
        let width = 2 * radius + 1;
        let needed = alphabet.count_words(width);
        if needed > TABLE_CAP as u128 {
            return Err(Error::TableTooLarge { needed, cap: TABLE_CAP });
        }
        let mut table = Vec::with_capacity(needed as usize);
        for window in alphabet.words(width) {
            let out = f(&window);
            if out.idx() >= alphabet.len() {
                return Err(Error::UnknownSymbol(alloc::format!("symbol index {}", out.0)));
            }
            table.push(out);
        }
        Ok(LocalRule { alphabet, radius, name: name.to_string(), body: RuleBody::Table(table) })
    }

    /// Wraps an already-built dense table (leftmost-significant indexing).
    pub fn from_table(alphabet: Alphabet, radius: usize, name: &str, table: Vec<Sym>) -> Result<Self> {
        let needed = alphabet.count_words(2 * radius + 1);
        if needed != table.len() as u128 {
            return Err(Error::WindowLen { expected: needed as usize, got: table.len() });
        }
        if let Some(bad) = table.iter().find(|s| s.idx() >= alphabet.len()) {
            return Err(Error::UnknownSymbol(alloc::format!("symbol index {}", bad.0)));
        }
        Ok(LocalRule { alphabet, radius, name: name.to_string(), body: RuleBody::Table(table) })
    }

    /// One of the stock rules, embedded at the given radius.
    pub fn builtin(which: Builtin, alphabet: Alphabet, radius: usize) -> Result<Self> {
        match which {
            Builtin::Min => {
                if radius == 0 {
                    return Err(Error::BadParameter("min needs radius >= 1".to_string()));
                }
                Self::from_fn(alphabet, radius, "min", |w| w[radius].min(w[radius + 1]))
            }
            Builtin::Identity => Self::from_fn(alphabet, radius, "identity", |w| w[radius]),
            Builtin::Shift => {
                if radius == 0 {
                    return Err(Error::BadParameter("shift needs radius >= 1".to_string()));
                }
                Self::from_fn(alphabet, radius, "shift", |w| w[radius + 1])
            }
            Builtin::Swap => {
                if alphabet.len() < 2 {
                    return Err(Error::BadParameter("swap needs at least 2 symbols".to_string()));
                }
                Self::from_fn(alphabet, radius, "swap", |w| match w[radius] {
                    Sym(0) => Sym(1),
                    Sym(1) => Sym(0),
                    other => other,
                })
            }
        }
    }

    pub(crate) fn from_signal(alphabet: Alphabet, name: &str, rule: SignalRule) -> Self {
        LocalRule { alphabet, radius: 3, name: name.to_string(), body: RuleBody::Signal(Box::new(rule)) }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn window_len(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn body(&self) -> &RuleBody {
        &self.body
    }

    /// Applies the rule to one window of length `2r + 1`.
    pub fn apply(&self, window: &[Sym]) -> Sym {
        assert_eq!(window.len(), self.window_len(), "window length != 2r+1");
        match &self.body {
            RuleBody::Table(table) => {
                let base = self.alphabet.len();
                let mut idx = 0usize;
                for &s in window {
                    idx = idx * base + s.idx();
                }
                table[idx]
            }
            RuleBody::Signal(rule) => rule.apply(window),
        }
    }
}
