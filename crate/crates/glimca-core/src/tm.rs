//! Two-tape Turing machines: a read-only tape and a read-write tape sharing
//! one head, both one-way infinite to the right.
//!
//! Besides the generic machine type and its step-by-step simulator, this
//! module builds the checker machine used by the signal automaton: given a
//! finite predicate evaluator ψ, the machine validates its two tape prefixes
//! (`#w#$^m#` read-only, `1^{3n+5}⊥` read-write), enumerates n pairs (m′,k)
//! driven by ψ, and either rejects or writes 0s over the leftmost |w|+2
//! cells, returns to cell 0 and accepts.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::alphabet::{Alphabet, Sym};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Move {
    Left,
    Right,
    Stay,
}

impl Move {
    pub fn letter(self) -> char {
        match self {
            Move::Left => 'L',
            Move::Right => 'R',
            Move::Stay => 'S',
        }
    }

    pub fn from_letter(c: char) -> Option<Move> {
        match c {
            'L' => Some(Move::Left),
            'R' => Some(Move::Right),
            'S' => Some(Move::Stay),
            _ => None,
        }
    }
}

/// Name of the read-write blank; reserved, never a working symbol.
pub const BLANK_NAME: &str = "_";

/// A transition target: next state, symbol written to the read-write tape,
/// and head move.
pub type Target = (u16, Sym, Move);

/// Deterministic two-tape machine. The read-write alphabet stored here is
/// Γ ∪ {blank} with the blank last; the read-only alphabet is Γ_A.
#[derive(Clone, Debug)]
pub struct TuringMachine {
    states: Vec<String>,
    initial: u16,
    final1: u16,
    final2: u16,
    ro_ab: Alphabet,
    rw_ab: Alphabet,
    delta: Vec<Option<Target>>,
}

fn check_name(role: &str, name: &str) -> Result<()> {
    if name.is_empty()
        || name.contains(char::is_whitespace)
        || name.contains(['/', ';', ','])
    {
        return Err(Error::BadMachine(format!("bad {role} name {name:?}")));
    }
    Ok(())
}

impl TuringMachine {
    /// Builds a machine from explicit rules `(q, a, g, q', g', move)`; every
    /// non-final `(q, a, g)` must be covered exactly once.
    pub fn new(
        states: Vec<String>,
        initial: &str,
        final1: &str,
        final2: &str,
        gamma: Vec<String>,
        gamma_a: Vec<String>,
        rules: &[(String, String, String, String, String, Move)],
    ) -> Result<Self> {
        let m = Self::assemble(states, initial, final1, final2, gamma, gamma_a, rules)?;
        for (i, t) in m.delta.iter().enumerate() {
            let q = (i / (m.ro_ab.len() * m.rw_ab.len())) as u16;
            if t.is_none() && q != m.final1 && q != m.final2 {
                return Err(Error::BadMachine(format!(
                    "state {} lacks a transition for some tape pair",
                    m.states[q as usize]
                )));
            }
        }
        Ok(m)
    }

    /// Like [`TuringMachine::new`] but uncovered `(q, a, g)` triples reject:
    /// they halt in the first final state leaving the tape unchanged.
    pub fn with_reject_fill(
        states: Vec<String>,
        initial: &str,
        final1: &str,
        final2: &str,
        gamma: Vec<String>,
        gamma_a: Vec<String>,
        rules: &[(String, String, String, String, String, Move)],
    ) -> Result<Self> {
        let mut m = Self::assemble(states, initial, final1, final2, gamma, gamma_a, rules)?;
        let (na, ng) = (m.ro_ab.len(), m.rw_ab.len());
        for i in 0..m.delta.len() {
            let q = (i / (na * ng)) as u16;
            let g = (i % ng) as u16;
            if m.delta[i].is_none() && q != m.final1 && q != m.final2 {
                m.delta[i] = Some((m.final1, Sym(g), Move::Stay));
            }
        }
        Ok(m)
    }

    fn assemble(
        states: Vec<String>,
        initial: &str,
        final1: &str,
        final2: &str,
        gamma: Vec<String>,
        gamma_a: Vec<String>,
        rules: &[(String, String, String, String, String, Move)],
    ) -> Result<Self> {
        for s in &states {
            check_name("state", s)?;
        }
        let mut index: BTreeMap<&str, u16> = BTreeMap::new();
        for (i, s) in states.iter().enumerate() {
            if index.insert(s, i as u16).is_some() {
                return Err(Error::BadMachine(format!("duplicate state {s:?}")));
            }
        }
        let lookup = |s: &str| -> Result<u16> {
            index.get(s).copied().ok_or_else(|| Error::BadMachine(format!("unknown state {s:?}")))
        };
        let initial = lookup(initial)?;
        let final1 = lookup(final1)?;
        let final2 = lookup(final2)?;
        if final1 == final2 {
            return Err(Error::BadMachine("the two final states must differ".to_string()));
        }
        for g in gamma.iter().chain(gamma_a.iter()) {
            check_name("tape symbol", g)?;
            if g.chars().count() != 1 {
                return Err(Error::BadMachine(format!("tape symbol {g:?} must be one character")));
            }
            if g == BLANK_NAME {
                return Err(Error::BadMachine("the blank is implicit; do not declare it".to_string()));
            }
        }
        if !gamma.iter().any(|g| g == "1") {
            return Err(Error::BadMachine("read-write alphabet must contain 1".to_string()));
        }
        if !gamma_a.iter().any(|g| g == "#") || !gamma_a.iter().any(|g| g == "$") {
            return Err(Error::BadMachine("read-only alphabet must contain # and $".to_string()));
        }
        let ro_ab = Alphabet::new(gamma_a).map_err(|e| Error::BadMachine(e.to_string()))?;
        let mut rw_names = gamma;
        rw_names.push(BLANK_NAME.to_string());
        let rw_ab = Alphabet::new(rw_names).map_err(|e| Error::BadMachine(e.to_string()))?;

        let (na, ng) = (ro_ab.len(), rw_ab.len());
        let mut delta = alloc::vec![None; states.len() * na * ng];
        for (q, a, g, q2, g2, mv) in rules {
            let q = lookup(q)?;
            if q == final1 || q == final2 {
                return Err(Error::BadMachine(format!("transition out of final state {:?}", states[q as usize])));
            }
            let a = ro_ab.sym_checked(a)?;
            let g = rw_ab.sym_checked(g)?;
            let q2 = lookup(q2)?;
            let g2 = rw_ab.sym_checked(g2)?;
            let slot = &mut delta[(q as usize * na + a.idx()) * ng + g.idx()];
            if slot.is_some() {
                return Err(Error::BadMachine(format!(
                    "duplicate transition ({}, {}, {})",
                    states[q as usize],
                    ro_ab.name(a),
                    rw_ab.name(g)
                )));
            }
            *slot = Some((q2, g2, *mv));
        }
        Ok(TuringMachine { states, initial, final1, final2, ro_ab, rw_ab, delta })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, q: u16) -> &str {
        &self.states[q as usize]
    }

    pub fn initial(&self) -> u16 {
        self.initial
    }

    pub fn final1(&self) -> u16 {
        self.final1
    }

    pub fn final2(&self) -> u16 {
        self.final2
    }

    /// `Some(accepting)` when `q` is final.
    pub fn final_kind(&self, q: u16) -> Option<bool> {
        if q == self.final2 {
            Some(true)
        } else if q == self.final1 {
            Some(false)
        } else {
            None
        }
    }

    /// The read-only tape alphabet Γ_A.
    pub fn ro_alphabet(&self) -> &Alphabet {
        &self.ro_ab
    }

    /// Γ ∪ {blank}, blank last.
    pub fn rw_alphabet(&self) -> &Alphabet {
        &self.rw_ab
    }

    pub fn blank(&self) -> Sym {
        Sym((self.rw_ab.len() - 1) as u16)
    }

    /// Read-only filler for cells beyond a finite input prefix.
    pub fn ro_filler(&self) -> Sym {
        self.ro_ab.sym("#").expect("validated at construction")
    }

    pub fn transition(&self, q: u16, a: Sym, g: Sym) -> Option<Target> {
        let (na, ng) = (self.ro_ab.len(), self.rw_ab.len());
        self.delta[(q as usize * na + a.idx()) * ng + g.idx()]
    }

    /// All defined transitions, for serialization.
    pub fn transitions(&self) -> impl Iterator<Item = (u16, Sym, Sym, Target)> + '_ {
        let (na, ng) = (self.ro_ab.len(), self.rw_ab.len());
        self.delta.iter().enumerate().filter_map(move |(i, t)| {
            t.map(|t| {
                let q = (i / (na * ng)) as u16;
                let a = Sym(((i / ng) % na) as u16);
                let g = Sym((i % ng) as u16);
                (q, a, g, t)
            })
        })
    }
}

/// A machine mid-run: tapes grow on demand (read-only filler `#`, read-write
/// blank).
#[derive(Clone, Debug)]
pub struct TmRun<'a> {
    machine: &'a TuringMachine,
    state: u16,
    head: usize,
    ro: Vec<Sym>,
    rw: Vec<Sym>,
    steps: u64,
}

impl<'a> TmRun<'a> {
    pub fn new(machine: &'a TuringMachine, ro: &[Sym], rw: &[Sym]) -> Result<Self> {
        for &a in ro {
            if a.idx() >= machine.ro_ab.len() {
                return Err(Error::UnknownSymbol(format!("read-only symbol index {}", a.0)));
            }
        }
        for &g in rw {
            if g.idx() >= machine.rw_ab.len() {
                return Err(Error::UnknownSymbol(format!("read-write symbol index {}", g.0)));
            }
        }
        Ok(TmRun {
            machine,
            state: machine.initial,
            head: 0,
            ro: ro.to_vec(),
            rw: rw.to_vec(),
            steps: 0,
        })
    }

    pub fn state(&self) -> u16 {
        self.state
    }

    pub fn head(&self) -> usize {
        self.head
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// `Some(accepting)` once a final state is reached.
    pub fn halted(&self) -> Option<bool> {
        self.machine.final_kind(self.state)
    }

    pub fn ro_at(&self, i: usize) -> Sym {
        self.ro.get(i).copied().unwrap_or_else(|| self.machine.ro_filler())
    }

    pub fn rw_at(&self, i: usize) -> Sym {
        self.rw.get(i).copied().unwrap_or_else(|| self.machine.blank())
    }

    /// The read-write prefix of length `len`.
    pub fn rw_prefix(&self, len: usize) -> Vec<Sym> {
        (0..len).map(|i| self.rw_at(i)).collect()
    }

    /// One transition; no-op when already halted.
    pub fn step(&mut self) -> Result<()> {
        if self.halted().is_some() {
            return Ok(());
        }
        let (a, g) = (self.ro_at(self.head), self.rw_at(self.head));
        let (q2, g2, mv) = self
            .machine
            .transition(self.state, a, g)
            .expect("validated machines are total on non-final states");
        if self.rw.len() <= self.head {
            self.rw.resize(self.head + 1, self.machine.blank());
        }
        self.rw[self.head] = g2;
        self.state = q2;
        match mv {
            Move::Left => {
                if self.head == 0 {
                    return Err(Error::LeftEdgeFault { step: self.steps });
                }
                self.head -= 1;
            }
            Move::Right => self.head += 1,
            Move::Stay => {}
        }
        self.steps += 1;
        Ok(())
    }
}

/// Outcome of a bounded run.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TmReport {
    /// `Some(accepting)` when halted, `None` on timeout.
    pub halted: Option<bool>,
    pub state: u16,
    pub head: usize,
    pub steps: u64,
    pub rw_tape: Vec<Sym>,
}

/// Runs the machine up to `max_steps` transitions.
pub fn simulate_tm(
    machine: &TuringMachine,
    ro: &[Sym],
    rw: &[Sym],
    max_steps: u64,
) -> Result<TmReport> {
    let mut run = TmRun::new(machine, ro, rw)?;
    while run.halted().is_none() && run.steps() < max_steps {
        run.step()?;
    }
    let touched = run.rw.len().max(rw.len());
    Ok(TmReport {
        halted: run.halted(),
        state: run.state(),
        head: run.head(),
        steps: run.steps(),
        rw_tape: run.rw_prefix(touched),
    })
}

/// Finite evaluator for the predicate ψ(w, m, m′, k): a DFA digests the
/// read-only prefix `#w#$^m#` symbol by symbol, and the acceptance table is
/// consulted at the pair (m′, k), both clamped into the table's ranges.
#[derive(Clone, Debug)]
pub struct PsiDfa {
    pub init: usize,
    /// `step[d][a.idx()]` over the machine's read-only alphabet.
    pub step: Vec<Vec<usize>>,
    /// `accept[d][m′][k]`, dimensions `states × (mp_max+1) × (k_cap+1)`.
    pub accept: Vec<Vec<Vec<bool>>>,
    /// m′ values clamp here.
    pub mp_max: usize,
    /// k values clamp here; at least 1 so "k = 0" stays observable.
    pub k_cap: usize,
}

impl PsiDfa {
    fn constant(value: bool, alphabet_len: usize) -> Self {
        PsiDfa {
            init: 0,
            step: alloc::vec![alloc::vec![0; alphabet_len]],
            accept: alloc::vec![alloc::vec![alloc::vec![value; 2]; 1]],
            mp_max: 0,
            k_cap: 1,
        }
    }

    fn validate(&self, alphabet_len: usize) -> Result<()> {
        let d = self.step.len();
        let shaped = self.init < d
            && self.k_cap >= 1
            && self.accept.len() == d
            && self.step.iter().all(|row| {
                row.len() == alphabet_len && row.iter().all(|&t| t < d)
            })
            && self.accept.iter().all(|per_m| {
                per_m.len() == self.mp_max + 1
                    && per_m.iter().all(|per_k| per_k.len() == self.k_cap + 1)
            });
        if shaped {
            Ok(())
        } else {
            Err(Error::BadParameter("predicate table dimensions are inconsistent".to_string()))
        }
    }
}

/// ψ supplied to the machine builder.
#[derive(Clone, Debug)]
pub enum PredicateProgram {
    AlwaysTrue,
    AlwaysFalse,
    Dfa(PsiDfa),
}

/// Builds the checker machine for ψ over input letters `letters` (the
/// read-only alphabet becomes `letters ∪ {#,$}`, in that order).
///
/// Behavior on tapes `#w#$^m#…` / `1^{3n+5}⊥…`: visit n pairs starting at
/// (0,0), stepping to (m′+1, 0) when ψ(w,m,m′,k) holds and to (m′, k+1)
/// otherwise; reject iff the last visited pair has k > 0, else blank out the
/// leftmost |w|+2 cells with 0s, return to cell 0 and accept. Any format
/// violation rejects.
pub fn build_sigma3_machine(letters: &str, psi: &PredicateProgram) -> Result<TuringMachine> {
    let mut gamma_a: Vec<String> = letters.chars().map(|c| c.to_string()).collect();
    if gamma_a.iter().any(|c| c == "#" || c == "$" || c == BLANK_NAME) {
        return Err(Error::BadMachine("input letters may not include #, $ or the blank".to_string()));
    }
    gamma_a.push("#".to_string());
    gamma_a.push("$".to_string());
    let na = gamma_a.len();
    let letter_count = na - 2;
    let dfa = match psi {
        PredicateProgram::AlwaysTrue => PsiDfa::constant(true, na),
        PredicateProgram::AlwaysFalse => PsiDfa::constant(false, na),
        PredicateProgram::Dfa(d) => d.clone(),
    };
    dfa.validate(na)?;

    // Reachable DFA states, then reachable pairs under clamped moves.
    let mut dfa_reach = BTreeSet::new();
    let mut queue = alloc::vec![dfa.init];
    while let Some(d) = queue.pop() {
        if dfa_reach.insert(d) {
            queue.extend(dfa.step[d].iter().copied());
        }
    }
    let clamp_move = |(mp, k): (usize, usize), v: bool| {
        if v {
            ((mp + 1).min(dfa.mp_max), 0)
        } else {
            (mp, (k + 1).min(dfa.k_cap))
        }
    };
    let mut taus = BTreeSet::new();
    let mut queue = alloc::vec![(0usize, 0usize)];
    while let Some(tau) = queue.pop() {
        if taus.insert(tau) {
            for &d in &dfa_reach {
                queue.push(clamp_move(tau, dfa.accept[d][tau.0][tau.1]));
            }
        }
    }

    let tag = |(mp, k): (usize, usize)| format!("m{mp}k{k}");
    let mut states: Vec<String> = ["init", "rofw", "rofd", "rol", "rwf0", "rwf1", "rwf2", "rwf3",
        "rwm0", "rwm1", "rwm2", "glf", "tcf0", "tcf1", "tcf2", "tcf3", "tcf4", "bkf", "cns0",
        "cns1", "cns2", "wzl", "wz1", "retl", "qf1", "qf2"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for &tau in &taus {
        let t = tag(tau);
        for i in 0..5 {
            states.push(format!("tcs{i}.{t}"));
        }
        for name in ["gz", "bkt", "skx", "cnst1", "cnst2"] {
            states.push(format!("{name}.{t}"));
        }
        for &d in &dfa_reach {
            states.push(format!("pww.{t}.d{d}"));
            states.push(format!("pwd.{t}.d{d}"));
        }
    }

    let mut rules: Vec<(String, String, String, String, String, Move)> = Vec::new();
    let all_a: Vec<String> = gamma_a.clone();
    let letters_a: Vec<String> = gamma_a[..letter_count].to_vec();
    let all_g = ["1", "0", "X", "M", BLANK_NAME];
    let mut add = |q: &str, a: &str, g: &str, q2: &str, g2: &str, mv: Move| {
        rules.push((q.into(), a.into(), g.into(), q2.into(), g2.into(), mv));
    };

    // Format phase: mark cell 0, walk the read-only prefix, come back.
    add("init", "#", "1", "rofw", "M", Move::Right);
    for g in all_g {
        for a in &letters_a {
            add("rofw", a, g, "rofw", g, Move::Right);
        }
        add("rofw", "#", g, "rofd", g, Move::Right);
        add("rofd", "$", g, "rofd", g, Move::Right);
        add("rofd", "#", g, "rol", g, Move::Left);
        for a in &all_a {
            if g == "M" {
                add("rol", a, g, "rwf0", g, Move::Right);
            } else {
                add("rol", a, g, "rol", g, Move::Left);
            }
        }
    }

    // Fuel count: after the marker, demand 1^c with c ≥ 4 and c ≡ 1 mod 3.
    for a in &all_a {
        add("rwf0", a, "1", "rwf1", "1", Move::Right);
        add("rwf1", a, "1", "rwf2", "1", Move::Right);
        add("rwf2", a, "1", "rwf3", "1", Move::Right);
        add("rwf3", a, "1", "rwm1", "1", Move::Right);
        add("rwm0", a, "1", "rwm1", "1", Move::Right);
        add("rwm1", a, "1", "rwm2", "1", Move::Right);
        add("rwm2", a, "1", "rwm0", "1", Move::Right);
        add("rwm1", a, BLANK_NAME, "glf", BLANK_NAME, Move::Left);
        add("glf", a, "1", "glf", "1", Move::Left);
        add("glf", a, "M", "tcf0", "M", Move::Right);
    }

    // First visit: check for the terminal 1111⊥ block, else consume a unit.
    for a in &all_a {
        for i in 0..4 {
            add(&format!("tcf{i}"), a, "1", &format!("tcf{}", i + 1), "1", Move::Right);
        }
        add("tcf4", a, BLANK_NAME, "wzl", BLANK_NAME, Move::Left);
        add("tcf4", a, "1", "bkf", "1", Move::Left);
        add("bkf", a, "1", "bkf", "1", Move::Left);
        add("bkf", a, "M", "cns0", "M", Move::Right);
        add("cns0", a, "1", "cns1", "X", Move::Right);
        add("cns1", a, "1", "cns2", "X", Move::Right);
        add("cns2", a, "1", &format!("tcs0.{}", tag((0, 0))), "X", Move::Right);
    }

    // Later visits carry the clamped pair; a ψ evaluation (a walk over the
    // read-only prefix driving the DFA) decides each move.
    for &tau in &taus {
        let t = tag(tau);
        for a in &all_a {
            for i in 0..4 {
                add(&format!("tcs{i}.{t}"), a, "1", &format!("tcs{}.{t}", i + 1), "1", Move::Right);
            }
            if tau.1 == 0 {
                add(&format!("tcs4.{t}"), a, BLANK_NAME, "wzl", BLANK_NAME, Move::Left);
            }
            add(&format!("tcs4.{t}"), a, "1", &format!("gz.{t}"), "1", Move::Left);
            add(&format!("gz.{t}"), a, "1", &format!("gz.{t}"), "1", Move::Left);
            add(&format!("gz.{t}"), a, "X", &format!("gz.{t}"), "X", Move::Left);
        }
        add(&format!("gz.{t}"), "#", "M", &format!("pww.{t}.d{}", dfa.step[dfa.init][na - 2]), "M", Move::Right);
        for &d in &dfa_reach {
            for g in all_g {
                for a in &letters_a {
                    let a_idx = gamma_a.iter().position(|x| x == a).unwrap();
                    add(&format!("pww.{t}.d{d}"), a, g, &format!("pww.{t}.d{}", dfa.step[d][a_idx]), g, Move::Right);
                }
                add(&format!("pww.{t}.d{d}"), "#", g, &format!("pwd.{t}.d{}", dfa.step[d][na - 2]), g, Move::Right);
                add(&format!("pwd.{t}.d{d}"), "$", g, &format!("pwd.{t}.d{}", dfa.step[d][na - 1]), g, Move::Right);
                let df = dfa.step[d][na - 2];
                let tau2 = clamp_move(tau, dfa.accept[df][tau.0][tau.1]);
                add(&format!("pwd.{t}.d{d}"), "#", g, &format!("bkt.{}", tag(tau2)), g, Move::Left);
            }
        }
        for a in &all_a {
            for g in ["1", "X", BLANK_NAME] {
                add(&format!("bkt.{t}"), a, g, &format!("bkt.{t}"), g, Move::Left);
            }
            add(&format!("bkt.{t}"), a, "M", &format!("skx.{t}"), "M", Move::Right);
            add(&format!("skx.{t}"), a, "X", &format!("skx.{t}"), "X", Move::Right);
            add(&format!("skx.{t}"), a, "1", &format!("cnst1.{t}"), "X", Move::Right);
            add(&format!("cnst1.{t}"), a, "1", &format!("cnst2.{t}"), "X", Move::Right);
            add(&format!("cnst2.{t}"), a, "1", &format!("tcs0.{t}"), "X", Move::Right);
        }
    }

    // Success: zero out cells 0..|w|+1 guided by the read-only track, then
    // return to cell 0 and accept.
    for a in &all_a {
        for g in ["1", "X"] {
            add("wzl", a, g, "wzl", g, Move::Left);
        }
        add("wzl", a, "M", "wz1", "0", Move::Right);
    }
    for g in all_g {
        for a in &letters_a {
            add("wz1", a, g, "wz1", "0", Move::Right);
            add("retl", a, g, "retl", g, Move::Left);
        }
        add("wz1", "#", g, "retl", "0", Move::Left);
        add("retl", "#", g, "qf2", g, Move::Stay);
    }

    TuringMachine::with_reject_fill(
        states,
        "init",
        "qf1",
        "qf2",
        ["1", "0", "X", "M"].iter().map(|s| s.to_string()).collect(),
        gamma_a,
        &rules,
    )
}

/// Canonical read-only input `#w#$^m#`.
pub fn checker_ro_tape(machine: &TuringMachine, w: &str, m: usize) -> Result<Vec<Sym>> {
    let ab = machine.ro_alphabet();
    let mut tape = alloc::vec![ab.sym_checked("#")?];
    for c in w.chars() {
        let s = ab.sym_checked(&c.to_string())?;
        if ab.name(s) == "#" || ab.name(s) == "$" {
            return Err(Error::BadParameter("w must use plain input letters".to_string()));
        }
        tape.push(s);
    }
    tape.push(ab.sym_checked("#")?);
    tape.extend(core::iter::repeat(ab.sym_checked("$")?).take(m));
    tape.push(ab.sym_checked("#")?);
    Ok(tape)
}

/// Canonical read-write input `1^{3n+5}⊥`.
pub fn checker_rw_tape(machine: &TuringMachine, n: usize) -> Vec<Sym> {
    let one = machine.rw_alphabet().sym("1").expect("1 is mandatory");
    let mut tape = alloc::vec![one; 3 * n + 5];
    tape.push(machine.blank());
    tape
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state(rules: &[(String, String, String, String, String, Move)]) -> Result<TuringMachine> {
        TuringMachine::new(
            ["go", "no", "yes"].iter().map(|s| s.to_string()).collect(),
            "go",
            "no",
            "yes",
            alloc::vec!["1".to_string()],
            alloc::vec!["#".to_string(), "$".to_string()],
            rules,
        )
    }

    fn rule(q: &str, a: &str, g: &str, q2: &str, g2: &str, mv: Move) -> (String, String, String, String, String, Move) {
        (q.into(), a.into(), g.into(), q2.into(), g2.into(), mv)
    }

    #[test]
    fn validation_and_immediate_halt() {
        // Total machine that accepts on blank, rejects on 1.
        let m = two_state(&[
            rule("go", "#", "1", "no", "1", Move::Stay),
            rule("go", "#", "_", "yes", "_", Move::Stay),
            rule("go", "$", "1", "no", "1", Move::Stay),
            rule("go", "$", "_", "no", "_", Move::Stay),
        ])
        .unwrap();
        let report = simulate_tm(&m, &[], &[], 10).unwrap();
        assert_eq!(report.halted, Some(true));
        assert_eq!(report.steps, 1);

        // A machine whose initial state is final halts after 0 steps.
        let m = TuringMachine::new(
            ["yes", "no"].iter().map(|s| s.to_string()).collect(),
            "no",
            "no",
            "yes",
            alloc::vec!["1".to_string()],
            alloc::vec!["#".to_string(), "$".to_string()],
            &[],
        )
        .unwrap();
        let report = simulate_tm(&m, &[], &[], 10).unwrap();
        assert_eq!((report.halted, report.steps), (Some(false), 0));

        // Missing coverage is an error under the strict constructor.
        assert!(two_state(&[rule("go", "#", "1", "no", "1", Move::Stay)]).is_err());
        // Slash in a state name collides with symbol naming downstream.
        assert!(TuringMachine::new(
            ["a/b", "f", "g"].iter().map(|s| s.to_string()).collect(),
            "a/b",
            "f",
            "g",
            alloc::vec!["1".to_string()],
            alloc::vec!["#".to_string(), "$".to_string()],
            &[],
        )
        .is_err());
    }

    #[test]
    fn left_edge_fault_and_timeout() {
        let m = TuringMachine::with_reject_fill(
            ["go", "spin", "no", "yes"].iter().map(|s| s.to_string()).collect(),
            "go",
            "no",
            "yes",
            alloc::vec!["1".to_string()],
            alloc::vec!["#".to_string(), "$".to_string()],
            &[
                rule("go", "#", "_", "go", "_", Move::Left),
                rule("go", "#", "1", "spin", "1", Move::Stay),
                rule("spin", "#", "1", "spin", "1", Move::Stay),
            ],
        )
        .unwrap();
        assert!(matches!(
            simulate_tm(&m, &[], &[], 10),
            Err(Error::LeftEdgeFault { step: 0 })
        ));
        let one = m.rw_alphabet().sym("1").unwrap();
        let report = simulate_tm(&m, &[], &[one], 25).unwrap();
        assert_eq!((report.halted, report.steps), (None, 25));
    }

    fn run_checker(machine: &TuringMachine, w: &str, m: usize, n: usize) -> TmReport {
        let ro = checker_ro_tape(machine, w, m).unwrap();
        let rw = checker_rw_tape(machine, n);
        simulate_tm(machine, &ro, &rw, 100_000).unwrap()
    }

    #[test]
    fn always_true_checker_accepts_and_writes_zeros() {
        let m = build_sigma3_machine("ab", &PredicateProgram::AlwaysTrue).unwrap();
        for n in 0..6 {
            let report = run_checker(&m, "ab", 0, n);
            assert_eq!(report.halted, Some(true), "n={n}");
            assert_eq!(report.head, 0);
            let zeros = m.rw_alphabet().parse_word("0000").unwrap();
            assert_eq!(&report.rw_tape[..4], &zeros[..], "leftmost |w|+2 cells");
        }
        // Nonzero m changes nothing for a constant predicate.
        assert_eq!(run_checker(&m, "a", 3, 4).halted, Some(true));
    }

    #[test]
    fn always_false_checker_rejects_from_n2() {
        let m = build_sigma3_machine("ab", &PredicateProgram::AlwaysFalse).unwrap();
        for (n, accept) in [(0, true), (1, true), (2, false), (3, false), (5, false)] {
            let report = run_checker(&m, "ab", 0, n);
            assert_eq!(report.halted, Some(accept), "n={n}");
        }
    }

    #[test]
    fn format_violations_reject() {
        let m = build_sigma3_machine("ab", &PredicateProgram::AlwaysTrue).unwrap();
        let ro_ab = m.ro_alphabet();
        let rw_ab = m.rw_alphabet();
        // No leading #.
        let ro = ro_ab.parse_word("ab").unwrap();
        let rw = checker_rw_tape(&m, 2);
        assert_eq!(simulate_tm(&m, &ro, &rw, 100_000).unwrap().halted, Some(false));
        // $ inside w.
        let ro = ro_ab.parse_word("#a$b#").unwrap();
        assert_eq!(simulate_tm(&m, &ro, &rw, 100_000).unwrap().halted, Some(false));
        // Fuel not of length 3n+5: 4 and 6 both fail, 5 passes.
        let ro = checker_ro_tape(&m, "a", 0).unwrap();
        for (ones, accept) in [(4, false), (5, true), (6, false), (7, false), (8, true)] {
            let mut rw = rw_ab.parse_word(&"1".repeat(ones)).unwrap();
            rw.push(m.blank());
            let got = simulate_tm(&m, &ro, &rw, 100_000).unwrap().halted;
            assert_eq!(got, Some(accept), "ones={ones}");
        }
        // A non-1 working symbol inside the fuel block.
        let mut rw = rw_ab.parse_word("11011111111").unwrap();
        rw.push(m.blank());
        assert_eq!(simulate_tm(&m, &ro, &rw, 100_000).unwrap().halted, Some(false));
    }

    #[test]
    fn dfa_predicate_alternates_by_parity() {
        // ψ(w,m,m′,k) = (k ≥ 1): pairs go (0,0),(0,1),(1,0),(1,1),… so the
        // n-th visited pair has k = (n-1) mod 2.
        let dfa = PsiDfa {
            init: 0,
            step: alloc::vec![alloc::vec![0; 3]],
            accept: alloc::vec![alloc::vec![alloc::vec![false, true]]],
            mp_max: 0,
            k_cap: 1,
        };
        let m = build_sigma3_machine("a", &PredicateProgram::Dfa(dfa)).unwrap();
        for (n, accept) in [(0, true), (1, true), (2, false), (3, true), (4, false), (5, true)] {
            let report = run_checker(&m, "a", 0, n);
            assert_eq!(report.halted, Some(accept), "n={n}");
        }
    }

    #[test]
    fn word_sensitive_predicate_reads_the_tape() {
        // ψ true iff w starts with "a": DFA states 0=start,1=saw #,2=a-first,
        // 3=other. Acceptance ignores (m′,k).
        let step = alloc::vec![
            alloc::vec![3, 3, 1, 3], // from start: only # leads on
            alloc::vec![2, 3, 3, 3], // after #: an 'a' accepts, 'b'/#/$ not
            alloc::vec![2, 2, 2, 2],
            alloc::vec![3, 3, 3, 3],
        ];
        let dfa = PsiDfa {
            init: 0,
            step,
            accept: (0..4)
                .map(|d| alloc::vec![alloc::vec![d == 2; 2]])
                .collect(),
            mp_max: 0,
            k_cap: 1,
        };
        let m = build_sigma3_machine("ab", &PredicateProgram::Dfa(dfa)).unwrap();
        // w = "ab": ψ always true, accept for every n (like always-true).
        assert_eq!(run_checker(&m, "ab", 0, 4).halted, Some(true));
        // w = "ba": ψ always false, reject from n = 2 on.
        assert_eq!(run_checker(&m, "ba", 0, 1).halted, Some(true));
        assert_eq!(run_checker(&m, "ba", 0, 4).halted, Some(false));
    }
}
