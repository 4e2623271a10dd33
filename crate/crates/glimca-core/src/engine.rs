//! Exact finite-horizon computation: spacetime diagrams, determined images
//! of finite words, and complete images of cylinder sets.
//!
//! The cylinder-image routines enumerate every completion of the unknown
//! cells in the dependence region, so their answers are exact, not sampled.
//! Their cost is `|A|^u` completions for `u` unknown cells, which is why all
//! entry points take an explicit budget cap and fail loudly instead of
//! grinding.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::alphabet::{Alphabet, Sym};
use crate::config::{Configuration, Cylinder};
use crate::error::{Error, Result};
use crate::rule::LocalRule;

/// A finite window of a simulation: `rows[t][i - window.0]` is the value of
/// cell `i` at time `t`. The mask records which cells are pinned down by the
/// initial description; runs from fully specified configurations (the only
/// kind this crate constructs) are determined everywhere.
#[derive(Clone, Debug)]
pub struct SpacetimeDiagram {
    alphabet: Alphabet,
    window: (i64, i64),
    rows: Vec<Vec<Sym>>,
    determined: Vec<Vec<bool>>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RenderFormat {
    /// One formatted word per row.
    Text,
    /// Comma-separated symbol names, one row per line.
    Csv,
    /// Binary PGM (P5), symbols spread over the gray range, time on the
    /// vertical axis.
    Pgm,
}

impl SpacetimeDiagram {
    pub fn window(&self) -> (i64, i64) {
        self.window
    }

    pub fn steps(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn row(&self, t: usize) -> &[Sym] {
        &self.rows[t]
    }

    pub fn get(&self, t: usize, i: i64) -> Sym {
        self.rows[t][(i - self.window.0) as usize]
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn determined(&self, t: usize, i: i64) -> bool {
        self.determined[t][(i - self.window.0) as usize]
    }

    pub fn render(&self, format: RenderFormat) -> Vec<u8> {
        match format {
            RenderFormat::Text => {
                // One character per cell; bracketed names when symbols are
                // longer than a character.
                let mut out = String::new();
                for row in &self.rows {
                    for &s in row {
                        let name = self.alphabet.name(s);
                        if self.alphabet.is_single_char() {
                            out.push_str(name);
                        } else {
                            out.push('[');
                            out.push_str(name);
                            out.push(']');
                        }
                    }
                    out.push('\n');
                }
                out.into_bytes()
            }
            RenderFormat::Csv => {
                let mut out = String::from("t,pos,symbol\n");
                for (t, row) in self.rows.iter().enumerate() {
                    for (k, &s) in row.iter().enumerate() {
                        let pos = self.window.0 + k as i64;
                        out.push_str(&alloc::format!("{t},{pos},{}\n", self.alphabet.name(s)));
                    }
                }
                out.into_bytes()
            }
            RenderFormat::Pgm => {
                let width = (self.window.1 - self.window.0 + 1) as usize;
                let height = self.rows.len();
                let mut out = alloc::format!("P5\n{width} {height}\n255\n").into_bytes();
                let denom = (self.alphabet.len() - 1).max(1) as u32;
                for row in &self.rows {
                    for &s in row {
                        out.push((s.idx() as u32 * 255 / denom) as u8);
                    }
                }
                out
            }
        }
    }
}

/// One synchronous step. Thin wrapper kept for symmetry with [`run`].
pub fn apply_step(rule: &LocalRule, config: &Configuration) -> Result<Configuration> {
    config.step(rule)
}

/// Runs `steps` steps and records the inclusive window `[lo, hi]` of every
/// row. `cap` bounds the number of recorded cells.
pub fn run(
    rule: &LocalRule,
    config: &Configuration,
    steps: usize,
    window: (i64, i64),
    cap: u64,
) -> Result<SpacetimeDiagram> {
    let (lo, hi) = window;
    if lo > hi {
        return Err(Error::BadWindow { lo, hi });
    }
    let cells = (hi - lo + 1) as u128 * (steps as u128 + 1);
    if cells > cap as u128 {
        return Err(Error::BudgetExceeded { needed: cells, cap });
    }
    let width = (hi - lo + 1) as usize;
    let mut rows = Vec::with_capacity(steps + 1);
    let mut current = config.clone();
    rows.push(current.slice(lo, hi));
    for _ in 0..steps {
        current = current.step(rule)?;
        rows.push(current.slice(lo, hi));
    }
    let determined = alloc::vec![alloc::vec![true; width]; steps + 1];
    Ok(SpacetimeDiagram { alphabet: rule.alphabet().clone(), window, rows, determined })
}

/// The cells of `f^t(x)` determined by knowing a word of `x`: each step eats
/// a radius from both ends, so the result is `|word| - 2rt` cells long and
/// aligned `rt` to the right of the input's start.
pub fn determined_image(rule: &LocalRule, word: &[Sym], t: usize) -> Result<Vec<Sym>> {
    let shrink = 2 * rule.radius() * t;
    if word.len() <= shrink && t > 0 {
        return Err(Error::WordTooShort { needed: shrink + 1, got: word.len() });
    }
    let mut cur = word.to_vec();
    let mut next = Vec::new();
    for _ in 0..t {
        step_in_place(rule, &mut cur, &mut next);
    }
    Ok(cur)
}

fn step_in_place(rule: &LocalRule, cur: &mut Vec<Sym>, scratch: &mut Vec<Sym>) {
    let width = rule.window_len();
    scratch.clear();
    scratch.extend(cur.windows(width).map(|w| rule.apply(w)));
    core::mem::swap(cur, scratch);
}

/// Walks every completion of the unknown cells around a cylinder, handing the
/// restriction of `f^t` to `window` to `visit`. Stops early when `visit`
/// returns true; the return value says whether that happened.
fn scan_cylinder_images<F>(
    rule: &LocalRule,
    cyl: &Cylinder,
    t: usize,
    window: (i64, i64),
    cap: u64,
    mut visit: F,
) -> Result<bool>
where
    F: FnMut(&[Sym]) -> bool,
{
    let (lo, hi) = window;
    if lo > hi {
        return Err(Error::BadWindow { lo, hi });
    }
    let r = rule.radius() as i64;
    let (cyl_lo, cyl_hi) = cyl.span();
    let lo0 = (lo - r * t as i64).min(cyl_lo);
    let hi0 = (hi + r * t as i64).max(cyl_hi);
    let region_len = (hi0 - lo0 + 1) as usize;

    // Fixed cells come from the cylinder; everything else is enumerated.
    let mut base: Vec<Option<Sym>> = alloc::vec![None; region_len];
    for (k, &s) in cyl.word.iter().enumerate() {
        base[(cyl_lo - lo0) as usize + k] = Some(s);
    }
    let unknown: Vec<usize> =
        (0..region_len).filter(|&k| base[k].is_none()).collect();
    let combos = rule.alphabet().count_words(unknown.len());
    if combos > cap as u128 {
        return Err(Error::BudgetExceeded { needed: combos, cap });
    }

    let out_from = ((lo - lo0) - r * t as i64) as usize;
    let out_len = (hi - lo + 1) as usize;
    let nsyms = rule.alphabet().len() as u16;
    let mut counters: Vec<u16> = alloc::vec![0; unknown.len()];
    let mut buf: Vec<Sym> = Vec::with_capacity(region_len);
    let mut scratch: Vec<Sym> = Vec::with_capacity(region_len);
    loop {
        buf.clear();
        buf.extend(base.iter().map(|c| c.unwrap_or(Sym(0))));
        for (c, &pos) in counters.iter().zip(&unknown) {
            buf[pos] = Sym(*c);
        }
        for _ in 0..t {
            step_in_place(rule, &mut buf, &mut scratch);
        }
        if visit(&buf[out_from..out_from + out_len]) {
            return Ok(true);
        }
        // Advance the odometer over unknown cells.
        let mut pos = counters.len();
        loop {
            if pos == 0 {
                return Ok(false);
            }
            pos -= 1;
            counters[pos] += 1;
            if counters[pos] < nsyms {
                break;
            }
            counters[pos] = 0;
        }
    }
}

/// The exact set `{ f^t(x) restricted to [lo, hi] : x in [cyl] }`.
pub fn cylinder_image_set(
    rule: &LocalRule,
    cyl: &Cylinder,
    t: usize,
    window: (i64, i64),
    cap: u64,
) -> Result<BTreeSet<Vec<Sym>>> {
    let mut out = BTreeSet::new();
    scan_cylinder_images(rule, cyl, t, window, cap, |img| {
        out.insert(img.to_vec());
        false
    })?;
    Ok(out)
}

/// Whether `f^t([cyl])` meets `[target]`, i.e. some configuration in the
/// source cylinder shows `target.word` at `target.position` after `t` steps.
/// Exits on the first witness.
pub fn cylinder_image_hits(
    rule: &LocalRule,
    cyl: &Cylinder,
    t: usize,
    target: &Cylinder,
    cap: u64,
) -> Result<bool> {
    let (tlo, thi) = target.span();
    scan_cylinder_images(rule, cyl, t, (tlo, thi), cap, |img| img == &target.word[..])
}
