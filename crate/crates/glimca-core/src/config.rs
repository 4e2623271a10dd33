//! Infinite configurations with finite descriptions, and cylinder sets.
//!
//! Two shapes are supported: cyclic configurations (a word repeated over all
//! of the integer line) and two-sided ones (periodic left background, finite
//! center, periodic right background). Both are closed under one rule step,
//! which is what makes exact long runs possible.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::alphabet::Sym;
use crate::error::{Error, Result};
use crate::rule::LocalRule;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Configuration {
    /// `x_i = word[i mod |word|]`.
    Cyclic { word: Vec<Sym> },
    /// `left` tiles coordinates below `offset`, `center` sits at
    /// `[offset, offset + |center|)`, `right` tiles the rest. The phase is
    /// anchored at the center: cell `offset - 1` is the last symbol of
    /// `left`, cell `offset + |center|` is the first symbol of `right`.
    TwoSided { left: Vec<Sym>, center: Vec<Sym>, right: Vec<Sym>, offset: i64 },
}

impl Configuration {
    pub fn cyclic(word: Vec<Sym>) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::BadParameter("cyclic word must be nonempty".to_string()));
        }
        Ok(Configuration::Cyclic { word })
    }

    pub fn two_sided(left: Vec<Sym>, center: Vec<Sym>, right: Vec<Sym>, offset: i64) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::BadParameter("background words must be nonempty".to_string()));
        }
        let mut c = Configuration::TwoSided { left, center, right, offset };
        c.trim();
        Ok(c)
    }

    /// Uniform background `bg` with a finite patch at `offset`.
    pub fn patch(bg: Sym, center: Vec<Sym>, offset: i64) -> Self {
        Configuration::two_sided(alloc::vec![bg], center, alloc::vec![bg], offset)
            .expect("single-symbol backgrounds are nonempty")
    }

    /// The symbol at coordinate `i`.
    pub fn get(&self, i: i64) -> Sym {
        match self {
            Configuration::Cyclic { word } => {
                word[i.rem_euclid(word.len() as i64) as usize]
            }
            Configuration::TwoSided { left, center, right, offset } => {
                let rel = i - offset;
                if rel < 0 {
                    left[rel.rem_euclid(left.len() as i64) as usize]
                } else if (rel as usize) < center.len() {
                    center[rel as usize]
                } else {
                    let past = rel as usize - center.len();
                    right[past % right.len()]
                }
            }
        }
    }

    /// Copies the symbols of the inclusive coordinate range `[lo, hi]`.
    pub fn slice(&self, lo: i64, hi: i64) -> Vec<Sym> {
        (lo..=hi).map(|i| self.get(i)).collect()
    }

    /// The coordinate range holding the non-background part, if any.
    pub fn span(&self) -> Option<(i64, i64)> {
        match self {
            Configuration::Cyclic { word } => Some((0, word.len() as i64 - 1)),
            Configuration::TwoSided { center, offset, .. } => {
                if center.is_empty() {
                    None
                } else {
                    Some((*offset, offset + center.len() as i64 - 1))
                }
            }
        }
    }

    /// One synchronous application of `rule` to the whole configuration.
    pub fn step(&self, rule: &LocalRule) -> Result<Configuration> {
        if rule.alphabet().len() <= self.max_symbol_index() {
            return Err(Error::UnknownSymbol("configuration symbol outside rule alphabet".to_string()));
        }
        let r = rule.radius() as i64;
        match self {
            Configuration::Cyclic { word } => {
                let n = word.len() as i64;
                let next: Vec<Sym> = (0..n)
                    .map(|i| {
                        let window: Vec<Sym> =
                            (i - r..=i + r).map(|j| word[j.rem_euclid(n) as usize]).collect();
                        rule.apply(&window)
                    })
                    .collect();
                Ok(Configuration::Cyclic { word: next })
            }
            Configuration::TwoSided { left, center, right, offset } => {
                // The periodic backgrounds map to periodic backgrounds of the
                // same period; only a zone of width r on each side of the
                // center feels the boundary, so the center grows by r per side.
                let new_left = cyclic_image(rule, left);
                let img_right = cyclic_image(rule, right);
                let rot = rule.radius() % right.len();
                let new_right: Vec<Sym> = (0..right.len())
                    .map(|m| img_right[(m + rot) % right.len()])
                    .collect();
                let new_offset = offset - r;
                let new_len = center.len() as i64 + 2 * r;
                let new_center: Vec<Sym> = (0..new_len)
                    .map(|k| {
                        let i = new_offset + k;
                        let window: Vec<Sym> = (i - r..=i + r).map(|j| self.get(j)).collect();
                        rule.apply(&window)
                    })
                    .collect();
                let mut out = Configuration::TwoSided {
                    left: new_left,
                    center: new_center,
                    right: new_right,
                    offset: new_offset,
                };
                out.trim();
                Ok(out)
            }
        }
    }

    /// Absorbs center cells that already agree with the adjacent background
    /// tiling, rotating the background to keep the phase anchored.
    fn trim(&mut self) {
        if let Configuration::TwoSided { left, center, right, offset } = self {
            while let Some(&first) = center.first() {
                if first == left[0] {
                    center.remove(0);
                    *offset += 1;
                    left.rotate_left(1);
                } else {
                    break;
                }
            }
            while let Some(&last) = center.last() {
                if last == right[right.len() - 1] {
                    center.pop();
                    right.rotate_right(1);
                } else {
                    break;
                }
            }
        }
    }

    fn max_symbol_index(&self) -> usize {
        let all: &mut dyn Iterator<Item = &Sym> = match self {
            Configuration::Cyclic { word } => &mut word.iter(),
            Configuration::TwoSided { left, center, right, .. } => {
                &mut left.iter().chain(center.iter()).chain(right.iter())
            }
        };
        all.map(|s| s.idx()).max().unwrap_or(0)
    }
}

/// Image of a cyclic word under one rule step, index-aligned with the input.
fn cyclic_image(rule: &LocalRule, word: &[Sym]) -> Vec<Sym> {
    let n = word.len() as i64;
    let r = rule.radius() as i64;
    (0..n)
        .map(|i| {
            let window: Vec<Sym> =
                (i - r..=i + r).map(|j| word[j.rem_euclid(n) as usize]).collect();
            rule.apply(&window)
        })
        .collect()
}

/// The set of configurations that show `word` starting at `position`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cylinder {
    pub word: Vec<Sym>,
    pub position: i64,
}

impl Cylinder {
    pub fn new(word: Vec<Sym>, position: i64) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::BadParameter("cylinder word must be nonempty".to_string()));
        }
        Ok(Cylinder { word, position })
    }

    /// Inclusive coordinate range the word occupies.
    pub fn span(&self) -> (i64, i64) {
        (self.position, self.position + self.word.len() as i64 - 1)
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty words
    }
}
