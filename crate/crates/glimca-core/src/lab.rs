//! Bounded-horizon probes of a rule's typical long-run language.
//!
//! Whether a word belongs to the language of a generic limit set quantifies
//! over infinitely many times and over every two-sided context, so nothing
//! here can decide the real thing. Instead, each procedure replaces those
//! quantifiers with explicit finite surrogates taken from [`Bounds`] and
//! returns a [`Certificate`] recording exactly what was verified at which
//! horizon. A verdict is honest bounded evidence, never a claim about the
//! limit itself.
//!
//! The pieces: [`check_enables`] finitizes "every extension of `v` keeps
//! mapping into `[s]` infinitely often"; [`search_forcing_word`] runs the
//! greedy elimination that pads a seed word until no forbidden window can
//! ever reappear (up to the horizon); [`estimate_generic_language`] is a
//! seeded Monte Carlo stand-in for the limit language; and
//! [`restriction_classifier`] plus [`realizability_report`] test a candidate
//! subshift against the structural conditions a generic limit set must meet.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{Rng, SeedableRng};

use crate::alphabet::{Alphabet, Sym};
use crate::config::{Configuration, Cylinder};
use crate::engine::{cylinder_image_hits, determined_image};
use crate::error::{Error, Result};
use crate::rule::LocalRule;
use crate::sample::{LanguageSample, Provenance};
use crate::subshift::{is_chain_transitive, Sft};

/// Rule powers examined when a realizability report classifies a restriction.
const REPORT_POWERS: usize = 4;

/// Finite surrogates for the quantifiers in enabling and forcing definitions.
///
/// `hits` witnesses up to time `t_max` stand in for "infinitely many times",
/// `context_len` bounds "every two-sided context", and `branching` caps both
/// the completions enumerated per exact image query and the extension
/// candidates tried per forcing round. The remaining fields size the Monte
/// Carlo language estimate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Longest left/right context enumerated around an enabling word.
    pub context_len: usize,
    /// Largest time step any check looks at.
    pub t_max: usize,
    /// How many witness times count as "infinitely many" at this horizon.
    pub hits: usize,
    /// Cap on completions per exact decision and candidates per search round.
    pub branching: u64,
    /// Number of random trajectories drawn by the language estimator.
    pub samples: usize,
    /// Steps discarded before the estimator starts collecting windows.
    pub burn_in: usize,
    /// Length of the windows the estimator collects.
    pub window: usize,
    /// Period of the random cyclic configurations the estimator draws.
    pub period: usize,
    /// Seed for every randomized procedure.
    pub seed: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            context_len: 3,
            t_max: 64,
            hits: 8,
            branching: 1 << 20,
            samples: 1000,
            burn_in: 64,
            window: 8,
            period: 256,
            seed: 0,
        }
    }
}

impl Bounds {
    /// Rejects settings no check could act on. `context_len` and `window`
    /// may be zero (empty contexts, empty-word sample); the rest must be
    /// positive and the hit threshold must fit under the horizon. Burn-in
    /// against the horizon is the estimator's own concern.
    pub fn validate(&self) -> Result<()> {
        if self.t_max == 0 || self.hits == 0 || self.branching == 0 || self.samples == 0 || self.period == 0
        {
            return Err(Error::BadParameter(
                "horizon, hit threshold, branching, samples, and period must be positive"
                    .to_string(),
            ));
        }
        if self.hits > self.t_max {
            return Err(Error::BadParameter(format!(
                "hit threshold {} exceeds time horizon {}",
                self.hits, self.t_max
            )));
        }
        Ok(())
    }
}

/// What a check verified, precisely enough to replay it bit for bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Enabling(EnablingCert),
    Forcing(ForcingCert),
    Classification(ClassificationCert),
}

/// The verdict shapes a certificate can take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertKind {
    EnablingSupported,
    EnablingRefuted,
    Forcing,
    Classification,
}

impl Certificate {
    pub fn kind(&self) -> CertKind {
        match self {
            Certificate::Enabling(c) if c.refutation.is_none() => CertKind::EnablingSupported,
            Certificate::Enabling(_) => CertKind::EnablingRefuted,
            Certificate::Forcing(_) => CertKind::Forcing,
            Certificate::Classification(_) => CertKind::Classification,
        }
    }

    /// Largest time step (or rule power) the verdict actually examined.
    pub fn verified_horizon(&self) -> usize {
        match self {
            Certificate::Enabling(c) => {
                c.refutation.as_ref().map_or(c.horizon, |r| r.verified_to)
            }
            Certificate::Forcing(c) => c.verified_to,
            Certificate::Classification(c) => c.horizon,
        }
    }

    /// True when every enumeration behind the verdict was exhaustive.
    pub fn is_exact(&self) -> bool {
        match self {
            Certificate::Enabling(c) => c.exact,
            Certificate::Forcing(c) => c.exact,
            Certificate::Classification(c) => c.exact,
        }
    }
}

/// Times at which one context pair's cylinder image met the target window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextEvidence {
    pub left: Vec<Sym>,
    pub right: Vec<Sym>,
    pub hit_times: Vec<usize>,
}

/// A context pair whose images missed the target over a terminal stretch of
/// the verified range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refutation {
    pub left: Vec<Sym>,
    pub right: Vec<Sym>,
    /// Every hit found for this pair; fewer than the threshold demanded.
    pub hit_times: Vec<usize>,
    /// Each `t` in `empty_from..=verified_to` was exactly decided empty.
    /// `empty_from` can exceed `verified_to` only when the whole horizon was
    /// verified and the refutation rests on the exact hit count alone.
    pub empty_from: usize,
    pub verified_to: usize,
}

/// Evidence behind an enabling verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnablingCert {
    pub v: Cylinder,
    pub s: Vec<Sym>,
    pub context_len: usize,
    pub hits_required: usize,
    /// The time horizon of the claim.
    pub horizon: usize,
    /// Context enumeration was exhaustive (always true; sampling is refused).
    pub exact: bool,
    /// Hit times for every context pair cleared before the verdict, in
    /// enumeration order: context lengths ascending, words lexicographic.
    pub evidence: Vec<ContextEvidence>,
    /// Present exactly when the verdict is refuted-at-bound.
    pub refutation: Option<Refutation>,
}

/// Either every bounded context kept meeting the target often enough, or
/// some context was caught missing it over a terminal stretch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnablingVerdict {
    Supported,
    RefutedAtBound,
}

/// One eliminated forbidden word: the extension that killed it and the time
/// from which its window is exactly empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kill {
    pub forbidden: Vec<Sym>,
    pub left: Vec<Sym>,
    pub right: Vec<Sym>,
    /// Images of the word built so far avoid the forbidden window for every
    /// `t` in `threshold..=verified_to`, each step decided exactly.
    pub threshold: usize,
    /// Largest step the budget let this kill verify; at most the horizon.
    pub verified_to: usize,
}

/// Evidence behind a successful forcing-word search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForcingCert {
    pub seed: Cylinder,
    pub result: Cylinder,
    /// Window length whose forbidden words were eliminated.
    pub window: usize,
    /// The requested time horizon.
    pub horizon: usize,
    /// Emptiness holds exactly from each kill's threshold through at least
    /// this step; times beyond it are unverified when it sits under the
    /// horizon.
    pub verified_to: usize,
    /// Largest per-word threshold; the word forces from this time on.
    pub threshold: usize,
    pub exact: bool,
    pub kills: Vec<Kill>,
}

/// Outcome of the greedy forcing-word search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ForcingOutcome {
    Found { word: Cylinder, threshold: usize, certificate: Certificate },
    /// The first forbidden word no budgeted extension could push out.
    NotFound { forbidden: Vec<Sym> },
}

/// How a rule acts on a subshift, judged from its block maps up to a power.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    /// Every examined power fixes every point of the subshift.
    Identity,
    /// `f^m` agrees with the `km`-fold shift on the subshift, `k != 0`.
    Shift { k: i64 },
    /// Some power can be computed from coordinates entirely on one side of
    /// the origin.
    EventuallyOblique,
    /// `f^(preperiod+period)` and `f^preperiod` agree on the subshift.
    EventuallyPeriodic { preperiod: usize, period: usize },
    /// Nothing was established up to the horizon.
    Other,
}

/// The smallest window of input coordinates that determines `f^m` on the
/// subshift's words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerNeighborhood {
    pub m: usize,
    /// Inclusive coordinate interval, relative to the output cell; `None`
    /// when the restriction is constant and reads nothing at all. Among
    /// minimal-width windows the one closest to the origin is reported.
    pub interval: Option<(i64, i64)>,
}

/// Evidence behind a classification verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationCert {
    /// Largest rule power examined.
    pub horizon: usize,
    pub exact: bool,
    /// Minimal dependence windows for `m = 1..=horizon`.
    pub neighborhoods: Vec<PowerNeighborhood>,
    pub identity: bool,
    pub shift: Option<i64>,
    /// Least power whose dependence lies entirely off the origin.
    pub oblique_at: Option<usize>,
    /// Smallest `(preperiod, period)` with matching block maps, period first.
    pub periodic: Option<(usize, usize)>,
}

/// Input to [`realizability_report`]: an exact subshift or a sampled language.
#[derive(Clone, Copy, Debug)]
pub enum ReportInput<'a> {
    Sft(&'a Sft),
    Sample(&'a LanguageSample),
}

/// One verdict line: the hypothesis checked, what came out, and the
/// consequence when the combination rules the input out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportLine {
    pub check: String,
    pub result: String,
    pub consequence: Option<String>,
    /// Whether the underlying language data was exact or sampled.
    pub exact: bool,
}

/// The aggregate verdict list of [`realizability_report`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisReport {
    pub lines: Vec<ReportLine>,
    /// True when any line carries an exclusion.
    pub excluded: bool,
}

impl AnalysisReport {
    /// The exclusion sentences, in line order.
    pub fn exclusions(&self) -> impl Iterator<Item = &str> {
        self.lines.iter().filter_map(|l| l.consequence.as_deref())
    }
}

fn check_word(ab: &Alphabet, word: &[Sym]) -> Result<()> {
    match word.iter().find(|s| s.idx() >= ab.len()) {
        Some(bad) => Err(Error::UnknownSymbol(format!("symbol index {}", bad.idx()))),
        None => Ok(()),
    }
}

/// Decides `f^t([src]) ∩ [target] ≠ ∅` exactly.
///
/// The part of the image determined by the source word alone settles most
/// small-`t` queries: a determined cell contradicting the target empties the
/// intersection, and a determined cover of the whole target window decides
/// it outright. Everything else walks every completion of the dependence
/// region, subject to `cap`.
fn image_meets(
    rule: &LocalRule,
    src: &Cylinder,
    t: usize,
    target: &Cylinder,
    cap: u64,
) -> Result<bool> {
    let r = rule.radius() as i64;
    if src.word.len() > 2 * rule.radius() * t {
        let det = determined_image(rule, &src.word, t)?;
        let det_lo = src.position + r * t as i64;
        let det_hi = det_lo + det.len() as i64 - 1;
        let (tlo, thi) = target.span();
        for (j, &want) in target.word.iter().enumerate() {
            let pos = tlo + j as i64;
            if pos >= det_lo && pos <= det_hi && det[(pos - det_lo) as usize] != want {
                return Ok(false);
            }
        }
        if tlo >= det_lo && thi <= det_hi {
            return Ok(true);
        }
    }
    cylinder_image_hits(rule, src, t, target, cap)
}

enum PairOutcome {
    Cleared(Vec<usize>),
    Refuted { hit_times: Vec<usize>, empty_from: usize, verified_to: usize },
    Undecided { needed: u128, cap: u64 },
}

/// Counts hit times for one context pair, stopping early at the threshold.
/// Times are scanned upward; when the budget cuts the scan, the verdict
/// covers the exactly decided prefix only.
fn probe_pair(
    rule: &LocalRule,
    src: &Cylinder,
    target: &Cylinder,
    bounds: &Bounds,
) -> Result<PairOutcome> {
    let mut hits = Vec::new();
    let mut verified_to: Option<usize> = None;
    let mut budget_hit: Option<(u128, u64)> = None;
    for t in 0..=bounds.t_max {
        match image_meets(rule, src, t, target, bounds.branching) {
            Ok(true) => {
                hits.push(t);
                verified_to = Some(t);
                if hits.len() == bounds.hits {
                    return Ok(PairOutcome::Cleared(hits));
                }
            }
            Ok(false) => verified_to = Some(t),
            Err(Error::BudgetExceeded { needed, cap }) => {
                budget_hit = Some((needed, cap));
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let Some(verified_to) = verified_to else {
        let (needed, cap) = budget_hit.unwrap_or((0, bounds.branching));
        return Ok(PairOutcome::Undecided { needed, cap });
    };
    let empty_from = hits.last().map_or(0, |h| h + 1);
    if empty_from > verified_to && verified_to < bounds.t_max {
        // The last decided step was a hit and the horizon was not reached:
        // neither enough hits nor a terminal empty stretch to report.
        let (needed, cap) = budget_hit.unwrap_or((0, bounds.branching));
        return Ok(PairOutcome::Undecided { needed, cap });
    }
    Ok(PairOutcome::Refuted { hit_times: hits, empty_from, verified_to })
}

/// Checks whether `v` enables `s`: does every two-sided context of `v` keep
/// mapping into `[s]` at the origin, over and over?
///
/// "Infinitely many times" is finitized to `bounds.hits` witnesses up to
/// `bounds.t_max`. Context pairs are enumerated exhaustively, lengths
/// ascending then words lexicographic, up to `bounds.context_len` per side;
/// each image query is decided exactly. The verdict is refuted-at-bound as
/// soon as one pair shows too few hits plus an exactly empty terminal
/// stretch, and the first such pair is the recorded witness.
pub fn check_enables(
    rule: &LocalRule,
    v: &Cylinder,
    s: &[Sym],
    bounds: &Bounds,
) -> Result<(EnablingVerdict, Certificate)> {
    bounds.validate()?;
    let ab = rule.alphabet();
    check_word(ab, &v.word)?;
    check_word(ab, s)?;
    let target = Cylinder::new(s.to_vec(), 0)?;
    let mut evidence = Vec::new();
    for lu in 0..=bounds.context_len {
        for lw in 0..=bounds.context_len {
            for u in ab.words(lu) {
                for w in ab.words(lw) {
                    let mut word = u.clone();
                    word.extend_from_slice(&v.word);
                    word.extend_from_slice(&w);
                    let src = Cylinder { word, position: v.position - lu as i64 };
                    match probe_pair(rule, &src, &target, bounds)? {
                        PairOutcome::Cleared(hit_times) => evidence.push(ContextEvidence {
                            left: u.clone(),
                            right: w,
                            hit_times,
                        }),
                        PairOutcome::Refuted { hit_times, empty_from, verified_to } => {
                            let cert = EnablingCert {
                                v: v.clone(),
                                s: s.to_vec(),
                                context_len: bounds.context_len,
                                hits_required: bounds.hits,
                                horizon: bounds.t_max,
                                exact: true,
                                evidence,
                                refutation: Some(Refutation {
                                    left: u,
                                    right: w,
                                    hit_times,
                                    empty_from,
                                    verified_to,
                                }),
                            };
                            return Ok((
                                EnablingVerdict::RefutedAtBound,
                                Certificate::Enabling(cert),
                            ));
                        }
                        PairOutcome::Undecided { needed, cap } => {
                            return Err(Error::BudgetExceeded { needed, cap })
                        }
                    }
                }
            }
        }
    }
    let cert = EnablingCert {
        v: v.clone(),
        s: s.to_vec(),
        context_len: bounds.context_len,
        hits_required: bounds.hits,
        horizon: bounds.t_max,
        exact: true,
        evidence,
        refutation: None,
    };
    Ok((EnablingVerdict::Supported, Certificate::Enabling(cert)))
}

fn extend(base: &Cylinder, left: &[Sym], right: &[Sym]) -> Cylinder {
    let mut word = left.to_vec();
    word.extend_from_slice(&base.word);
    word.extend_from_slice(right);
    Cylinder { word, position: base.position - left.len() as i64 }
}

/// The least `T` such that `f^t([cand]) ∩ [target] = ∅` is exactly verified
/// for every `t` in `T..=verified_to`, where `verified_to` is the largest
/// step at or under the horizon the budget can decide. Times are scanned
/// downward; steps too costly to decide before anything is verified are
/// passed over, but once the top of the claim is set, a budget failure ends
/// the claim right there so the verified stretch stays contiguous. Returns
/// `(T, verified_to)`, or `None` when the top decidable step still hits or
/// nothing is decidable at all.
fn kill_threshold(
    rule: &LocalRule,
    cand: &Cylinder,
    target: &Cylinder,
    bounds: &Bounds,
) -> Result<Option<(usize, usize)>> {
    let mut verified_to = None;
    for t in (0..=bounds.t_max).rev() {
        match image_meets(rule, cand, t, target, bounds.branching) {
            Ok(true) => {
                return Ok(verified_to.map(|v| (t + 1, v)));
            }
            Ok(false) => {
                if verified_to.is_none() {
                    verified_to = Some(t);
                }
            }
            Err(Error::BudgetExceeded { .. }) => {
                if let Some(v) = verified_to {
                    return Ok(Some((t + 1, v)));
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(verified_to.map(|v| (0, v)))
}

/// Searches extensions of `word`, breadth-first by total added length (right
/// side first, then lexicographic), for one whose images exactly avoid
/// `target` from some time on. A threshold of 0 is taken on sight; otherwise
/// the budgeted candidates are exhausted and the smallest threshold wins,
/// ties going to the earlier candidate.
fn kill_word(
    rule: &LocalRule,
    word: &Cylinder,
    target: &Cylinder,
    bounds: &Bounds,
) -> Result<Option<(Vec<Sym>, Vec<Sym>, usize, usize)>> {
    let ab = rule.alphabet();
    let mut best: Option<(usize, usize, Vec<Sym>, Vec<Sym>)> = None;
    let mut tried: u64 = 0;
    'outer: for level in 0.. {
        if tried >= bounds.branching {
            break;
        }
        for la in 0..=level {
            let lb = level - la;
            for a in ab.words(la) {
                for b in ab.words(lb) {
                    if tried >= bounds.branching {
                        break 'outer;
                    }
                    tried += 1;
                    let cand = extend(word, &a, &b);
                    if let Some((t, v)) = kill_threshold(rule, &cand, target, bounds)? {
                        if t == 0 {
                            return Ok(Some((a, b, 0, v)));
                        }
                        if best.as_ref().map_or(true, |(bt, _, _, _)| t < *bt) {
                            best = Some((t, v, a.clone(), b));
                        }
                    }
                }
            }
        }
    }
    Ok(best.map(|(t, v, a, b)| (a, b, t, v)))
}

/// Greedy search for a forcing word: a padded version of `seed` whose late
/// images, in the window `[0, n)`, can only show words from the oracle's
/// language.
///
/// The forbidden words are the complement of the oracle at length `n`, taken
/// in lexicographic order. Each in turn is killed by extending the current
/// word until its window is exactly empty from some threshold through
/// `bounds.t_max`; the final threshold is the largest per-word one. All
/// claims stop at the horizon: later times are not certified.
pub fn search_forcing_word(
    rule: &LocalRule,
    seed: &Cylinder,
    n: usize,
    bounds: &Bounds,
    oracle: &LanguageSample,
) -> Result<ForcingOutcome> {
    bounds.validate()?;
    let ab = rule.alphabet();
    if oracle.alphabet() != ab {
        return Err(Error::BadAlphabet("oracle and rule alphabets differ".to_string()));
    }
    check_word(ab, &seed.word)?;
    if n > oracle.max_len() {
        return Err(Error::BadParameter(format!(
            "oracle covers lengths up to {}, need {n}",
            oracle.max_len()
        )));
    }
    let combos = ab.count_words(n);
    if combos > bounds.branching as u128 {
        return Err(Error::BudgetExceeded { needed: combos, cap: bounds.branching });
    }
    let good = oracle.words(n)?;
    let forbidden: Vec<Vec<Sym>> = ab.words(n).filter(|w| !good.contains(w)).collect();

    let mut word = seed.clone();
    let mut threshold = 0usize;
    let mut verified_to = bounds.t_max;
    let mut kills = Vec::new();
    for f in forbidden {
        let target = Cylinder::new(f.clone(), 0)?;
        match kill_word(rule, &word, &target, bounds)? {
            Some((left, right, t, v)) => {
                word = extend(&word, &left, &right);
                threshold = threshold.max(t);
                verified_to = verified_to.min(v);
                kills.push(Kill { forbidden: f, left, right, threshold: t, verified_to: v });
            }
            None => return Ok(ForcingOutcome::NotFound { forbidden: f }),
        }
    }
    let cert = ForcingCert {
        seed: seed.clone(),
        result: word.clone(),
        window: n,
        horizon: bounds.t_max,
        verified_to,
        threshold,
        exact: true,
        kills,
    };
    Ok(ForcingOutcome::Found { word, threshold, certificate: Certificate::Forcing(cert) })
}

/// Uniform symbol via rejection from a 32-bit draw, so no modulo bias.
fn uniform_sym(rng: &mut ChaCha8Rng, k: usize) -> Sym {
    let k = k as u32;
    let zone = (u32::MAX / k) * k;
    loop {
        let x = rng.next_u32();
        if x < zone {
            return Sym((x % k) as u16);
        }
    }
}

/// Estimates the long-run language of `rule` under uniform random initial
/// conditions: draws cyclic configurations, discards a burn-in prefix, and
/// collects every length-`window` word seen through the horizon.
///
/// This samples the measure-typical behavior, a heuristic stand-in for the
/// topologically typical one; the result proves nothing and is labeled with
/// its sampling parameters. Each trajectory's generator is stream `i` of the
/// seeded ChaCha8 state, so the outcome does not depend on any processing
/// order. A zero `window` yields the empty-word-only sample.
pub fn estimate_generic_language(rule: &LocalRule, bounds: &Bounds) -> Result<LanguageSample> {
    bounds.validate()?;
    if bounds.burn_in > bounds.t_max {
        return Err(Error::BadParameter(format!(
            "burn-in {} exceeds time horizon {}",
            bounds.burn_in, bounds.t_max
        )));
    }
    let ab = rule.alphabet().clone();
    let provenance = Provenance::Sampled {
        seed: bounds.seed,
        samples: bounds.samples,
        period: bounds.period,
        burn_in: bounds.burn_in,
        t_max: bounds.t_max,
    };
    let n = bounds.window;
    if n == 0 {
        return LanguageSample::from_words(ab, 0, core::iter::empty(), provenance);
    }
    let full = ab.count_words(n);
    let mut seen: BTreeSet<Vec<Sym>> = BTreeSet::new();
    let mut buf: Vec<Sym> = Vec::with_capacity(n);
    'samples: for i in 0..bounds.samples {
        let mut rng = ChaCha8Rng::seed_from_u64(bounds.seed);
        rng.set_stream(i as u64);
        let row: Vec<Sym> = (0..bounds.period).map(|_| uniform_sym(&mut rng, ab.len())).collect();
        let mut config = Configuration::cyclic(row)?;
        for _ in 0..bounds.burn_in {
            config = config.step(rule)?;
        }
        for t in bounds.burn_in..=bounds.t_max {
            if t > bounds.burn_in {
                config = config.step(rule)?;
            }
            let row: Vec<Sym> = (0..bounds.period as i64).map(|i| config.get(i)).collect();
            for start in 0..bounds.period {
                buf.clear();
                buf.extend((0..n).map(|j| row[(start + j) % bounds.period]));
                if !seen.contains(buf.as_slice()) {
                    seen.insert(buf.clone());
                }
            }
            if seen.len() as u128 == full {
                break 'samples;
            }
        }
    }
    LanguageSample::from_words(ab, n, seen, provenance)
}

/// True when fixing the input coordinates `[lo, hi_excl)` fixes the output:
/// any two language words agreeing there have equal images.
fn window_determines(map: &BTreeMap<Vec<Sym>, Sym>, lo: usize, hi_excl: usize) -> bool {
    let mut seen: BTreeMap<&[Sym], Sym> = BTreeMap::new();
    for (w, &img) in map {
        let key = &w[lo..hi_excl];
        match seen.get(&key) {
            Some(&prev) => {
                if prev != img {
                    return false;
                }
            }
            None => {
                seen.insert(key, img);
            }
        }
    }
    true
}

/// The minimal-width window of coordinates determining the block map, as
/// offsets around the output cell; ties resolved toward the origin, then
/// leftward. `None` when the map is constant on the language.
fn minimal_window(map: &BTreeMap<Vec<Sym>, Sym>, width: usize, center: usize) -> Option<(i64, i64)> {
    if window_determines(map, 0, 0) {
        return None;
    }
    for w in 1..=width {
        let mut starts: Vec<usize> = (0..=width - w).collect();
        starts.sort_by_key(|&s| {
            let lo = s as i64 - center as i64;
            let hi = lo + w as i64 - 1;
            (lo.abs().max(hi.abs()), lo)
        });
        for s in starts {
            if window_determines(map, s, s + w) {
                let lo = s as i64 - center as i64;
                return Some((lo, lo + w as i64 - 1));
            }
        }
    }
    // The full width always determines the image.
    Some((-(center as i64), (width - 1 - center) as i64))
}

/// Classifies how `rule` acts on `sft` from the block maps of its powers
/// `f^m`, `m <= m_max`, evaluated over the subshift's language.
///
/// The verdict picks the strongest established label, in the order identity,
/// shift, eventually oblique, eventually periodic; `Other` means nothing was
/// established at this horizon. A constant restriction counts as oblique:
/// its empty dependence window lies inside every half-line. `cap` bounds the
/// word enumerations.
pub fn restriction_classifier(
    rule: &LocalRule,
    sft: &Sft,
    m_max: usize,
    cap: u64,
) -> Result<(Classification, Certificate)> {
    if rule.alphabet() != sft.alphabet() {
        return Err(Error::BadAlphabet("rule and subshift alphabets differ".to_string()));
    }
    if sft.is_empty() {
        return Err(Error::EmptySubshift);
    }
    if m_max == 0 {
        return Err(Error::BadParameter("power horizon must be at least 1".to_string()));
    }
    let r = rule.radius();
    let ab = rule.alphabet();

    // blocks[m-1]: every language word of width 2rm+1 mapped to its image cell.
    let mut blocks: Vec<BTreeMap<Vec<Sym>, Sym>> = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let width = 2 * r * m + 1;
        let combos = ab.count_words(width);
        if combos > cap as u128 {
            return Err(Error::BudgetExceeded { needed: combos, cap });
        }
        let mut map = BTreeMap::new();
        for w in sft.language(width) {
            let img = determined_image(rule, &w, m)?[0];
            map.insert(w, img);
        }
        blocks.push(map);
    }

    let mut neighborhoods = Vec::with_capacity(m_max);
    let mut oblique_at = None;
    for m in 1..=m_max {
        let width = 2 * r * m + 1;
        let center = r * m;
        let map = &blocks[m - 1];
        neighborhoods.push(PowerNeighborhood { m, interval: minimal_window(map, width, center) });
        let right_side = window_determines(map, center + 1, width);
        let left_side = window_determines(map, 0, center);
        if oblique_at.is_none() && (right_side || left_side) {
            oblique_at = Some(m);
        }
    }

    let identity = (1..=m_max).all(|m| {
        let center = r * m;
        blocks[m - 1].iter().all(|(w, &img)| img == w[center])
    });

    // Shift exponents tried nearest the origin first, positive before negative.
    let mut shift = None;
    if r > 0 {
        let mut ks: Vec<i64> = Vec::new();
        for mag in 1..=r as i64 {
            ks.push(mag);
            ks.push(-mag);
        }
        shift = ks.into_iter().find(|&k| {
            (1..=m_max).all(|m| {
                let center = (r * m) as i64;
                blocks[m - 1].iter().all(|(w, &img)| img == w[(center + k * m as i64) as usize])
            })
        });
    }

    let mut periodic = None;
    'search: for p in 1..=m_max {
        for k in 0..=(m_max - p) {
            let center = r * (k + p);
            let big = &blocks[k + p - 1];
            let agrees = big.iter().all(|(w, &img)| {
                if k == 0 {
                    img == w[center]
                } else {
                    match blocks[k - 1].get(&w[center - r * k..=center + r * k]) {
                        Some(&small) => small == img,
                        None => false,
                    }
                }
            });
            if agrees {
                periodic = Some((k, p));
                break 'search;
            }
        }
    }

    let classification = if identity {
        Classification::Identity
    } else if let Some(k) = shift {
        Classification::Shift { k }
    } else if oblique_at.is_some() {
        Classification::EventuallyOblique
    } else if let Some((preperiod, period)) = periodic {
        Classification::EventuallyPeriodic { preperiod, period }
    } else {
        Classification::Other
    };
    let cert = ClassificationCert {
        horizon: m_max,
        exact: true,
        neighborhoods,
        identity,
        shift,
        oblique_at,
        periodic,
    };
    Ok((classification, Certificate::Classification(cert)))
}

fn describe_classification(c: &Classification) -> String {
    match c {
        Classification::Identity => "identity".to_string(),
        Classification::Shift { k } => format!("shift({k})"),
        Classification::EventuallyOblique => "eventually oblique".to_string(),
        Classification::EventuallyPeriodic { preperiod, period } => {
            format!("eventually periodic (preperiod {preperiod}, period {period})")
        }
        Classification::Other => "unclassified".to_string(),
    }
}

/// Checks a candidate subshift (or a sampled stand-in for one) against the
/// structural conditions a generic limit set must satisfy, and aggregates
/// the verdicts.
///
/// Lines cover the periodic-factor obstruction, transitivity and mixing,
/// chain transitivity, chain components (with the rule's action on them when
/// a rule is supplied), and the restriction classification. A line whose
/// hypothesis combination is impossible for a generic limit set carries an
/// exclusion sentence; checks that do not apply degrade to an "unavailable"
/// result instead of failing the report.
pub fn realizability_report(
    input: ReportInput<'_>,
    rule: Option<&LocalRule>,
    bounds: &Bounds,
) -> Result<AnalysisReport> {
    bounds.validate()?;
    let approx_storage;
    let (sft, data_exact) = match input {
        ReportInput::Sft(s) => (s, true),
        ReportInput::Sample(sm) => {
            let n = sm.max_len().min(bounds.window.max(1)).max(1);
            approx_storage = Sft::approximation(sm, n)?;
            (&approx_storage, matches!(sm.provenance(), Provenance::Exact))
        }
    };
    let mut lines: Vec<ReportLine> = Vec::new();
    let push = |check: &str, result: String, consequence: Option<String>, lines: &mut Vec<ReportLine>| {
        lines.push(ReportLine { check: check.to_string(), result, consequence, exact: data_exact });
    };

    // Periodic-factor obstruction: a Z_p grading of the word graph.
    let obstruction = sft.periodic_factor_obstruction();
    match &obstruction {
        Ok(ob) => {
            let moduli = format!("component moduli {:?}", ob.component_moduli);
            match ob.verdict {
                crate::subshift::ObstructionVerdict::Obstructed { p } => push(
                    "periodic-factor obstruction",
                    format!("obstructed p={p} ({moduli})"),
                    Some(format!(
                        "cannot be the generic limit set (periodic-factor obstruction, p={p})"
                    )),
                    &mut lines,
                ),
                crate::subshift::ObstructionVerdict::Clear => {
                    push("periodic-factor obstruction", format!("clear ({moduli})"), None, &mut lines)
                }
                crate::subshift::ObstructionVerdict::Inconclusive => push(
                    "periodic-factor obstruction",
                    format!("inconclusive ({moduli})"),
                    None,
                    &mut lines,
                ),
            }
        }
        Err(e) => push("periodic-factor obstruction", format!("unavailable ({e})"), None, &mut lines),
    }

    // Transitivity and mixing of the subshift itself.
    let mixing = sft.is_mixing().ok();
    match (sft.is_transitive(), sft.sigma_period(), &mixing) {
        (Ok(tr), Ok(periods), Some(mix)) => push(
            "transitivity and mixing",
            format!("transitive: {tr}, mixing: {mix} (cycle gcds {periods:?})"),
            None,
            &mut lines,
        ),
        (t, _, _) => {
            let e = t.err().map(|e| e.to_string()).unwrap_or_else(|| "period check failed".to_string());
            push("transitivity and mixing", format!("unavailable ({e})"), None, &mut lines)
        }
    }

    // Chain transitivity: transitivity of every width-n approximation.
    let n_chain = bounds.window.max(2);
    let chain = match input {
        ReportInput::Sample(sm) => is_chain_transitive(sm, n_chain.min(sm.max_len()).max(1)),
        ReportInput::Sft(s) => s
            .language_sample(n_chain.max(s.window()))
            .and_then(|sample| is_chain_transitive(&sample, n_chain.max(s.window()))),
    };
    let chain_holds = match &chain {
        Ok(ct) => {
            let result = match ct.first_failure {
                Some(n) => format!("fails at n={n}"),
                None => format!("holds through n={}", ct.horizon),
            };
            push("chain transitivity", result, None, &mut lines);
            Some(ct.holds)
        }
        Err(e) => {
            push("chain transitivity", format!("unavailable ({e})"), None, &mut lines);
            None
        }
    };

    // Chain components, and the rule's action on them when a rule is given.
    let n_comp = sft.window().max(2);
    match sft.chain_components(n_comp) {
        Ok(partition) => {
            let k = partition.classes.len();
            match rule {
                None => push(
                    "chain components",
                    format!("{k} component(s) at n={n_comp}"),
                    None,
                    &mut lines,
                ),
                Some(rl) => match sft.component_permutation(rl, n_comp) {
                    Ok(map) => {
                        let action = if !map.is_permutation {
                            "rule does not permute them".to_string()
                        } else if map.is_cyclic && k > 1 {
                            format!("rule rotates them cyclically (order {k})")
                        } else if k == 1 {
                            "rule maps the component into itself".to_string()
                        } else {
                            "rule permutes them, not cyclically".to_string()
                        };
                        let consequence = (map.is_permutation && map.is_cyclic && k > 1).then(|| {
                            format!(
                                "cannot be the generic limit set of this rule \
                                 (cyclic rotation of the {k} chain components)"
                            )
                        });
                        push(
                            "chain components",
                            format!("{k} component(s) at n={n_comp}; {action}"),
                            consequence,
                            &mut lines,
                        );
                    }
                    Err(e) => push(
                        "chain components",
                        format!("{k} component(s) at n={n_comp}; rule action unavailable ({e})"),
                        None,
                        &mut lines,
                    ),
                },
            }
        }
        Err(e) => push("chain components", format!("unavailable ({e})"), None, &mut lines),
    }

    // Restriction classification, and the two hypothesis clashes it can expose.
    if let Some(rl) = rule {
        match restriction_classifier(rl, sft, REPORT_POWERS, bounds.branching) {
            Ok((classification, Certificate::Classification(cert))) => {
                let nbhd = cert
                    .neighborhoods
                    .first()
                    .and_then(|n| n.interval)
                    .map(|(l, h)| format!(" (neighborhood [{l},{h}])"))
                    .unwrap_or_default();
                let consequence = match classification {
                    Classification::Identity if mixing == Some(false) => Some(
                        "cannot be the generic limit set of this rule \
                         (identity restriction with a non-mixing language)"
                            .to_string(),
                    ),
                    Classification::Shift { k } if chain_holds == Some(false) => Some(format!(
                        "cannot be the generic limit set of this rule \
                         (shift({k}) restriction with a non-chain-transitive language)"
                    )),
                    _ => None,
                };
                push(
                    "restriction classification",
                    format!(
                        "{}{nbhd}, powers up to {REPORT_POWERS}",
                        describe_classification(&classification)
                    ),
                    consequence,
                    &mut lines,
                );
            }
            Ok(_) => unreachable!("classifier returns a classification certificate"),
            Err(e) => {
                push("restriction classification", format!("unavailable ({e})"), None, &mut lines)
            }
        }
    }

    let excluded = lines.iter().any(|l| l.consequence.is_some());
    Ok(AnalysisReport { lines, excluded })
}
