//! Compiles a two-tape Turing machine into a radius-3 cellular automaton in
//! which signals assemble, delimit and feed a simulated machine segment.
//!
//! The first track holds either a pure signal symbol (background `B`, the
//! sweeping `E`, the moving `S1`/`S2`/`S2p`/`S3`, the segment wall `⊢`) or a
//! machine symbol (an arrow carrying one read-write tape cell, or the head
//! carrying a state and a tape cell). The second track is a read-only letter
//! that the rule copies verbatim, serving as the machine's read-only tape.
//!
//! Signal behavior: `E` moves right at speed 2 unconditionally and leaves
//! `B`s. `S1`, `S2`/`S2p`, `S3` move right at speeds 1, 2, 3 while free,
//! leaving `B`, `B`/`(←,⊥)`, `(←,1)` respectively. `S2` catching `S1` births
//! a machine segment `⊢ (q₀,1) (←,1) S3`; `S3` catching `S2` births an `S2p`.
//! Inside a wall-delimited segment the head executes one machine transition
//! per step. Every locally inconsistent pattern decays to `E`.
//!
//! The local rule factors through a finite category of cell roles, so the
//! conservation properties (`S1`/`S2` are never created, `E` is never lost)
//! can be checked by exhausting category windows rather than symbol windows.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::alphabet::{Alphabet, Sym};
use crate::config::Configuration;
use crate::engine::SpacetimeDiagram;
use crate::error::{Error, Result};
use crate::rule::LocalRule;
use crate::tm::{checker_ro_tape, Move, TuringMachine};

/// Direction an arrow cell points; arrows left of the head point right and
/// vice versa.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Dir {
    Left,
    Right,
}

/// First-track value of one cell.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Track0 {
    B,
    E,
    S1,
    S2,
    S2p,
    S3,
    Wall,
    Arrow { dir: Dir, g: Sym },
    Head { q: u16, g: Sym },
}

/// Index calculus between structured cell values and flat symbols.
///
/// Symbols are ordered by first-track value (the seven pure signals, then
/// arrows, then heads) with the read-only letter varying fastest. Names are
/// `base/letter`, where arrow bases are `<;g` / `>;g` and head bases `q;g`.
#[derive(Clone, Debug)]
pub struct SignalCaAlphabet {
    nq: u16,
    ng: u16,
    na: u16,
    one: Sym,
    alphabet: Alphabet,
}

const PURE_COUNT: u16 = 7;
const PURE_NAMES: [&str; 7] = ["B", "E", "S1", "S2", "S2p", "S3", "|-"];

impl SignalCaAlphabet {
    pub fn new(machine: &TuringMachine) -> Result<Self> {
        for q in machine.states() {
            if q == "<" || q == ">" {
                return Err(Error::BadMachine(
                    "state names < and > collide with arrow symbols".to_string(),
                ));
            }
        }
        let nq = machine.states().len() as u16;
        let ng = machine.rw_alphabet().len() as u16;
        let na = machine.ro_alphabet().len() as u16;
        let mut names = Vec::new();
        let mut bases: Vec<String> = PURE_NAMES.iter().map(|s| s.to_string()).collect();
        for dir in ["<", ">"] {
            for g in machine.rw_alphabet().names() {
                bases.push(format!("{dir};{g}"));
            }
        }
        for q in machine.states() {
            for g in machine.rw_alphabet().names() {
                bases.push(format!("{q};{g}"));
            }
        }
        for base in &bases {
            for a in machine.ro_alphabet().names() {
                names.push(format!("{base}/{a}"));
            }
        }
        let alphabet = Alphabet::new(names)?;
        let one = machine.rw_alphabet().sym_checked("1")?;
        Ok(SignalCaAlphabet { nq, ng, na, one, alphabet })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Total symbol count: `(|Q|+2)·|Γ∪{⊥}|·|Γ_A| + 7·|Γ_A|`.
    pub fn size(&self) -> usize {
        ((self.nq as usize + 2) * self.ng as usize + PURE_COUNT as usize) * self.na as usize
    }

    /// The read-write symbol `1`.
    pub fn one(&self) -> Sym {
        self.one
    }

    fn base_index(&self, t0: Track0) -> u16 {
        match t0 {
            Track0::B => 0,
            Track0::E => 1,
            Track0::S1 => 2,
            Track0::S2 => 3,
            Track0::S2p => 4,
            Track0::S3 => 5,
            Track0::Wall => 6,
            Track0::Arrow { dir, g } => {
                let d = match dir {
                    Dir::Left => 0,
                    Dir::Right => 1,
                };
                PURE_COUNT + d * self.ng + g.0
            }
            Track0::Head { q, g } => PURE_COUNT + 2 * self.ng + q * self.ng + g.0,
        }
    }

    pub fn pack(&self, t0: Track0, ro: Sym) -> Sym {
        debug_assert!(ro.0 < self.na);
        Sym(self.base_index(t0) * self.na + ro.0)
    }

    pub fn unpack(&self, s: Sym) -> (Track0, Sym) {
        let ro = Sym(s.0 % self.na);
        let base = s.0 / self.na;
        let t0 = if base < PURE_COUNT {
            match base {
                0 => Track0::B,
                1 => Track0::E,
                2 => Track0::S1,
                3 => Track0::S2,
                4 => Track0::S2p,
                5 => Track0::S3,
                _ => Track0::Wall,
            }
        } else if base < PURE_COUNT + 2 * self.ng {
            let rel = base - PURE_COUNT;
            let dir = if rel < self.ng { Dir::Left } else { Dir::Right };
            Track0::Arrow { dir, g: Sym(rel % self.ng) }
        } else {
            let rel = base - PURE_COUNT - 2 * self.ng;
            Track0::Head { q: rel / self.ng, g: Sym(rel % self.ng) }
        };
        (t0, ro)
    }
}

/// Cell role used for clause dispatch; head roles are split by the move the
/// machine would make so neighbors can anticipate it.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Cat {
    B,
    E,
    S1,
    S2,
    S2p,
    S3,
    Wall,
    ArrL,
    ArrR,
    HeadL,
    HeadR,
    HeadS,
    HeadFin,
}

pub const CAT_COUNT: usize = 13;
const ALL_CATS: [Cat; CAT_COUNT] = [
    Cat::B,
    Cat::E,
    Cat::S1,
    Cat::S2,
    Cat::S2p,
    Cat::S3,
    Cat::Wall,
    Cat::ArrL,
    Cat::ArrR,
    Cat::HeadL,
    Cat::HeadR,
    Cat::HeadS,
    Cat::HeadFin,
];

fn is_head(c: Cat) -> bool {
    matches!(c, Cat::HeadL | Cat::HeadR | Cat::HeadS | Cat::HeadFin)
}

/// Which rule clause fires; chosen from the seven cell roles alone.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Clause {
    EArrive,
    ProdWall,
    ProdHead,
    ProdArrL,
    ProdS3,
    ProdTrail,
    ProdS2p,
    ArriveS3,
    ArriveS2,
    ArriveS2p,
    ArriveS1,
    WakeS3,
    WakeS2p,
    WakeB,
    HaltE,
    HeadStep,
    TakeFromLeft,
    TakeFromRight,
    Keep,
    KeepB,
    DefaultE,
}

/// Can `S1` at offset `p` advance one cell? It needs its target vacated: a
/// free cell, a departing `E`, or a departing `S2`.
fn s1_moves(look: &dyn Fn(i64) -> Option<Cat>, p: i64) -> bool {
    match look(p + 1) {
        Some(Cat::B) | Some(Cat::E) => true,
        Some(Cat::S2) => s2_moves(look, p + 1),
        _ => false,
    }
}

/// Can `S2`/`S2p` at offset `p` jump two cells? Either both cells ahead are
/// free, or an `E` directly ahead vacates them, or it lands on the cell a
/// departing `S1` leaves behind.
fn s2_moves(look: &dyn Fn(i64) -> Option<Cat>, p: i64) -> bool {
    match look(p + 1) {
        Some(Cat::E) => true,
        Some(Cat::B) => match look(p + 2) {
            Some(Cat::B) => true,
            Some(Cat::S1) => s1_moves(look, p + 2),
            _ => false,
        },
        _ => false,
    }
}

/// Can `S3` at offset `p` jump three cells? Over free cells, onto the cell a
/// departing `S2` vacates, or across a departing `S2` onto a freed cell.
fn s3_moves(look: &dyn Fn(i64) -> Option<Cat>, p: i64) -> bool {
    if look(p + 1) != Some(Cat::B) {
        return false;
    }
    match (look(p + 2), look(p + 3)) {
        (Some(Cat::B), Some(Cat::B)) => true,
        (Some(Cat::B), Some(Cat::S2)) => s2_moves(look, p + 3),
        (Some(Cat::S2), Some(Cat::B)) | (Some(Cat::S2), Some(Cat::E)) => s2_moves(look, p + 2),
        _ => false,
    }
}

/// Clause dispatch over a 7-cell role window (index 3 is the target cell).
///
/// Priorities, first match wins: an arriving `E`; the four cells born when
/// `S2` reaches `S1`; the four born when `S3` reaches `S2`; signal arrivals
/// (strict visibility: unseen cells block); trail wakes of departing `S3` and
/// `S2p` (lenient visibility: unseen cells count as free); `E` wakes; segment
/// simulation; wakes of departing `S1`/`S2`; background; decay to `E`.
fn clause_of(c: &[Cat; 7]) -> Clause {
    use Cat::*;
    let t = |k: i64| c[(k + 3) as usize];
    let strict = |k: i64| if (-3..=3).contains(&k) { Some(c[(k + 3) as usize]) } else { None };
    let lenient =
        |k: i64| if (-3..=3).contains(&k) { Some(c[(k + 3) as usize]) } else { Some(B) };

    if t(-2) == E {
        return Clause::EArrive;
    }
    if t(1) == S2 && t(2) == S1 {
        return Clause::ProdWall;
    }
    if t(0) == S2 && t(1) == S1 {
        return Clause::ProdHead;
    }
    if t(-1) == S2 && t(0) == S1 {
        return Clause::ProdArrL;
    }
    if t(-2) == S2 && t(-1) == S1 {
        return Clause::ProdS3;
    }
    if (t(0) == S3 && t(1) == S2) || (t(-1) == S3 && t(0) == S2) || (t(-2) == S3 && t(-1) == S2) {
        return Clause::ProdTrail;
    }
    if t(-3) == S3 && t(-2) == S2 {
        return Clause::ProdS2p;
    }
    if t(-3) == S3 && s3_moves(&strict, -3) {
        return Clause::ArriveS3;
    }
    if t(-2) == S2 && s2_moves(&strict, -2) {
        return Clause::ArriveS2;
    }
    if t(-2) == S2p && s2_moves(&strict, -2) {
        return Clause::ArriveS2p;
    }
    if t(-1) == S1 && s1_moves(&strict, -1) {
        return Clause::ArriveS1;
    }
    if (t(0) == S3 && s3_moves(&lenient, 0))
        || (t(-1) == S3 && s3_moves(&lenient, -1))
        || (t(-2) == S3 && s3_moves(&lenient, -2))
    {
        return Clause::WakeS3;
    }
    if (t(0) == S2p && s2_moves(&lenient, 0)) || (t(-1) == S2p && s2_moves(&lenient, -1)) {
        return Clause::WakeS2p;
    }
    if t(0) == E || t(-1) == E {
        return Clause::WakeB;
    }
    if t(0) == HeadFin {
        return Clause::HaltE;
    }
    if is_head(t(0)) && matches!(t(-1), Wall | ArrR) && matches!(t(1), ArrL | S3 | S2p) {
        return Clause::HeadStep;
    }
    if t(0) == ArrL && t(-1) == HeadR {
        return Clause::TakeFromLeft;
    }
    if t(0) == ArrR && t(1) == HeadL {
        return Clause::TakeFromRight;
    }
    let keep = match t(0) {
        Wall => t(1) == ArrR || is_head(t(1)),
        ArrR => matches!(t(-1), Wall | ArrR) && (t(1) == ArrR || is_head(t(1))),
        ArrL => (t(-1) == ArrL || is_head(t(-1))) && matches!(t(1), ArrL | S3 | S2p),
        _ => false,
    };
    if keep {
        return Clause::Keep;
    }
    if (t(0) == S1 && s1_moves(&lenient, 0)) || (t(0) == S2 && s2_moves(&lenient, 0)) {
        return Clause::WakeB;
    }
    if t(0) == B {
        return Clause::KeepB;
    }
    Clause::DefaultE
}

/// The compiled local rule: a machine plus the symbol layout.
#[derive(Clone, Debug)]
pub struct SignalRule {
    machine: TuringMachine,
    sig: SignalCaAlphabet,
}

impl SignalRule {
    pub fn machine(&self) -> &TuringMachine {
        &self.machine
    }

    pub fn layout(&self) -> &SignalCaAlphabet {
        &self.sig
    }

    fn cat_of(&self, t0: Track0, ro: Sym) -> Cat {
        match t0 {
            Track0::B => Cat::B,
            Track0::E => Cat::E,
            Track0::S1 => Cat::S1,
            Track0::S2 => Cat::S2,
            Track0::S2p => Cat::S2p,
            Track0::S3 => Cat::S3,
            Track0::Wall => Cat::Wall,
            Track0::Arrow { dir: Dir::Left, .. } => Cat::ArrL,
            Track0::Arrow { dir: Dir::Right, .. } => Cat::ArrR,
            Track0::Head { q, g } => {
                if self.machine.final_kind(q).is_some() {
                    Cat::HeadFin
                } else {
                    let (_, _, mv) = self
                        .machine
                        .transition(q, ro, g)
                        .expect("machines are total on non-final states");
                    match mv {
                        Move::Left => Cat::HeadL,
                        Move::Right => Cat::HeadR,
                        Move::Stay => Cat::HeadS,
                    }
                }
            }
        }
    }

    /// Applies one radius-3 step to a 7-symbol window.
    pub fn apply(&self, window: &[Sym]) -> Sym {
        debug_assert_eq!(window.len(), 7);
        let cells: Vec<(Track0, Sym)> = window.iter().map(|&s| self.sig.unpack(s)).collect();
        let cats: [Cat; 7] = core::array::from_fn(|i| self.cat_of(cells[i].0, cells[i].1));
        let one = self.sig.one();
        let blank = self.machine.blank();
        let step_head = |idx: usize| {
            let (t0, ro) = cells[idx];
            match t0 {
                Track0::Head { q, g } => self
                    .machine
                    .transition(q, ro, g)
                    .expect("machines are total on non-final states"),
                _ => unreachable!("clause guards select head cells"),
            }
        };
        let t0 = match clause_of(&cats) {
            Clause::EArrive | Clause::HaltE | Clause::DefaultE => Track0::E,
            Clause::ProdWall => Track0::Wall,
            Clause::ProdHead => Track0::Head { q: self.machine.initial(), g: one },
            Clause::ProdArrL | Clause::ProdTrail | Clause::WakeS3 => {
                Track0::Arrow { dir: Dir::Left, g: one }
            }
            Clause::ProdS3 | Clause::ArriveS3 => Track0::S3,
            Clause::ProdS2p | Clause::ArriveS2p => Track0::S2p,
            Clause::ArriveS2 => Track0::S2,
            Clause::ArriveS1 => Track0::S1,
            Clause::WakeS2p => Track0::Arrow { dir: Dir::Left, g: blank },
            Clause::WakeB | Clause::KeepB => Track0::B,
            Clause::HeadStep => {
                let (q2, g2, mv) = step_head(3);
                match mv {
                    Move::Stay => Track0::Head { q: q2, g: g2 },
                    Move::Right => Track0::Arrow { dir: Dir::Right, g: g2 },
                    Move::Left => Track0::Arrow { dir: Dir::Left, g: g2 },
                }
            }
            Clause::TakeFromLeft => {
                let (q2, _, _) = step_head(2);
                match cells[3].0 {
                    Track0::Arrow { g, .. } => Track0::Head { q: q2, g },
                    _ => unreachable!("clause guards select arrow cells"),
                }
            }
            Clause::TakeFromRight => {
                let (q2, _, _) = step_head(4);
                match cells[3].0 {
                    Track0::Arrow { g, .. } => Track0::Head { q: q2, g },
                    _ => unreachable!("clause guards select arrow cells"),
                }
            }
            Clause::Keep => cells[3].0,
        };
        self.sig.pack(t0, cells[3].1)
    }
}

/// Compiles the machine into its radius-3 rule.
pub fn compile_signal_ca(machine: &TuringMachine) -> Result<LocalRule> {
    let sig = SignalCaAlphabet::new(machine)?;
    let alphabet = sig.alphabet().clone();
    let rule = SignalRule { machine: machine.clone(), sig };
    Ok(LocalRule::from_signal(alphabet, "signal", rule))
}

/// Outcome of the exhaustive category-window scan.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ScanReport {
    pub windows: u64,
    /// Windows producing `S1` without an `S1` one cell left.
    pub s1_creations: u64,
    /// Windows producing `S2` without an `S2` two cells left.
    pub s2_creations: u64,
    /// Windows producing `S2p` without a departing `S2p` or an `S3`+`S2`
    /// collision feeding it.
    pub s2p_creations: u64,
    /// Windows where an `E` two cells left fails to land here.
    pub e_losses: u64,
}

impl ScanReport {
    pub fn ok(&self) -> bool {
        self.s1_creations == 0 && self.s2_creations == 0 && self.s2p_creations == 0
            && self.e_losses == 0
    }
}

/// Category-level output of a clause, for the scan.
fn clause_output(clause: Clause, center: Cat) -> Cat {
    match clause {
        Clause::EArrive | Clause::HaltE | Clause::DefaultE => Cat::E,
        Clause::ProdWall => Cat::Wall,
        Clause::ProdHead | Clause::TakeFromLeft | Clause::TakeFromRight => Cat::HeadS,
        Clause::ProdArrL | Clause::ProdTrail | Clause::WakeS3 | Clause::WakeS2p => Cat::ArrL,
        Clause::ProdS3 | Clause::ArriveS3 => Cat::S3,
        Clause::ProdS2p | Clause::ArriveS2p => Cat::S2p,
        Clause::ArriveS2 => Cat::S2,
        Clause::ArriveS1 => Cat::S1,
        Clause::WakeB | Clause::KeepB => Cat::B,
        Clause::HeadStep => match center {
            Cat::HeadR => Cat::ArrR,
            Cat::HeadL => Cat::ArrL,
            _ => Cat::HeadS,
        },
        Clause::Keep => center,
    }
}

/// Exhausts all 13⁷ role windows and counts conservation violations. The
/// concrete rule picks its clause from cell roles alone, and every clause
/// emits a fixed role, so this covers every symbol window of any compiled
/// machine.
pub fn conservation_scan() -> ScanReport {
    let mut report = ScanReport {
        windows: 0,
        s1_creations: 0,
        s2_creations: 0,
        s2p_creations: 0,
        e_losses: 0,
    };
    let mut idx = [0usize; 7];
    loop {
        let cats: [Cat; 7] = core::array::from_fn(|i| ALL_CATS[idx[i]]);
        let out = clause_output(clause_of(&cats), cats[3]);
        report.windows += 1;
        if out == Cat::S1 && cats[2] != Cat::S1 {
            report.s1_creations += 1;
        }
        if out == Cat::S2 && cats[1] != Cat::S2 {
            report.s2_creations += 1;
        }
        if out == Cat::S2p && cats[1] != Cat::S2p && !(cats[0] == Cat::S3 && cats[1] == Cat::S2) {
            report.s2p_creations += 1;
        }
        if cats[1] == Cat::E && out != Cat::E {
            report.e_losses += 1;
        }
        // Odometer over the 13^7 role windows.
        let mut i = 0;
        loop {
            if i == 7 {
                return report;
            }
            idx[i] += 1;
            if idx[i] < CAT_COUNT {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// One expected spacetime fact: concrete first-track values at given
/// absolute coordinates at a given time.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SpaceTimeEvent {
    pub time: u64,
    /// Headline coordinate (the collision point).
    pub coordinate: i64,
    pub cells: Vec<(i64, Track0)>,
}

/// The two collision events of the staged run: the segment birth at time n
/// spanning coordinates -1..2, and the `S2p` birth at coordinate 3n+5 at
/// time 2n+1.
pub fn expected_events(machine: &TuringMachine, n: usize) -> Result<Vec<SpaceTimeEvent>> {
    if n < 5 {
        return Err(Error::BadParameter("the staged schedule needs n of at least 5".to_string()));
    }
    let one = machine.rw_alphabet().sym_checked("1")?;
    let n64 = n as i64;
    Ok(alloc::vec![
        SpaceTimeEvent {
            time: n as u64,
            coordinate: 2,
            cells: alloc::vec![
                (-1, Track0::Wall),
                (0, Track0::Head { q: machine.initial(), g: one }),
                (1, Track0::Arrow { dir: Dir::Left, g: one }),
                (2, Track0::S3),
            ],
        },
        SpaceTimeEvent {
            time: (2 * n + 1) as u64,
            coordinate: 3 * n64 + 5,
            cells: alloc::vec![(3 * n64 + 5, Track0::S2p)],
        },
    ])
}

/// The accepting-halt word: head `(q_f², 0)` over `#`, then `|w|+1` left
/// arrows carrying 0s over `w#`.
pub fn w_hat(machine: &TuringMachine, w: &str) -> Result<Vec<Sym>> {
    if w.is_empty() {
        return Err(Error::BadParameter("the halt word needs a nonempty input".to_string()));
    }
    let sig = SignalCaAlphabet::new(machine)?;
    let zero = machine.rw_alphabet().sym_checked("0")?;
    let ro = checker_ro_tape(machine, w, 0)?;
    let span = w.chars().count() + 2;
    let mut word = alloc::vec![sig.pack(Track0::Head { q: machine.final2(), g: zero }, ro[0])];
    for &a in &ro[1..span] {
        word.push(sig.pack(Track0::Arrow { dir: Dir::Left, g: zero }, a));
    }
    Ok(word)
}

fn packed_run(
    machine: &TuringMachine,
    w: &str,
    m: usize,
) -> Result<(SignalCaAlphabet, Vec<Sym>, Sym)> {
    if w.is_empty() {
        return Err(Error::BadParameter("w must be nonempty".to_string()));
    }
    let sig = SignalCaAlphabet::new(machine)?;
    let ro = checker_ro_tape(machine, w, m)?;
    let hash = machine.ro_filler();
    Ok((sig, ro, hash))
}

/// The staged initial configuration: background `(B,#)` on the left and
/// `(E,#)` on the right, the word `u w̃ v` starting at position -|u| with
/// `w̃ = (E^{|w|+m+3}, #w#$^m#)` at the origin, and the four signals `S2` at
/// -2n+2 and `S1 S2 E` at -n+2..-n+4. Requires n > |u|+4 so the signals sit
/// left of `u`.
pub fn build_proof_config(
    machine: &TuringMachine,
    w: &str,
    m: usize,
    n: usize,
    u: &[Sym],
    v: &[Sym],
) -> Result<Configuration> {
    let (sig, ro, hash) = packed_run(machine, w, m)?;
    if n <= u.len() + 4 {
        return Err(Error::BadParameter(format!(
            "n must exceed the left context length plus 4 (n={n}, |u|={})",
            u.len()
        )));
    }
    for &s in u.iter().chain(v.iter()) {
        if s.idx() >= sig.alphabet().len() {
            return Err(Error::UnknownSymbol(format!("symbol index {}", s.0)));
        }
    }
    let n = n as i64;
    let lo = -2 * n + 2;
    let hi = ro.len() as i64 - 1 + v.len() as i64;
    let mut cells = alloc::vec![sig.pack(Track0::B, hash); (hi - lo + 1) as usize];
    let mut set = |pos: i64, s: Sym| cells[(pos - lo) as usize] = s;
    set(-2 * n + 2, sig.pack(Track0::S2, hash));
    set(-n + 2, sig.pack(Track0::S1, hash));
    set(-n + 3, sig.pack(Track0::S2, hash));
    set(-n + 4, sig.pack(Track0::E, hash));
    for (i, &s) in u.iter().enumerate() {
        set(-(u.len() as i64) + i as i64, s);
    }
    for (i, &a) in ro.iter().enumerate() {
        set(i as i64, sig.pack(Track0::E, a));
    }
    for (i, &s) in v.iter().enumerate() {
        set(ro.len() as i64 + i as i64, s);
    }
    Configuration::two_sided(
        alloc::vec![sig.pack(Track0::B, hash)],
        cells,
        alloc::vec![sig.pack(Track0::E, hash)],
        lo,
    )
}

/// The configuration the staged run reaches at time n, rebased to time 0:
/// a newborn segment `⊢ (q₀,1) (←,1) S3` at -1..2, the escorted `S2 E` at
/// n+3..n+4, and the right `E`-front (the swept word block merged with the
/// background) advanced to 2n.
pub fn build_segment_config(
    machine: &TuringMachine,
    w: &str,
    m: usize,
    n: usize,
) -> Result<Configuration> {
    let (sig, ro, hash) = packed_run(machine, w, m)?;
    if n < 5 {
        return Err(Error::BadParameter("the staged schedule needs n of at least 5".to_string()));
    }
    let n = n as i64;
    let front = 2 * n;
    let lo = -1;
    let end = front.max(ro.len() as i64);
    let mut cells = alloc::vec![sig.pack(Track0::B, hash); (end - lo) as usize];
    let ro_at = |pos: i64| {
        if pos >= 0 && (pos as usize) < ro.len() {
            ro[pos as usize]
        } else {
            hash
        }
    };
    let mut set = |pos: i64, t0: Track0| cells[(pos - lo) as usize] = sig.pack(t0, ro_at(pos));
    for pos in lo..end {
        set(pos, Track0::B);
    }
    set(-1, Track0::Wall);
    set(0, Track0::Head { q: machine.initial(), g: sig.one() });
    set(1, Track0::Arrow { dir: Dir::Left, g: sig.one() });
    set(2, Track0::S3);
    set(n + 3, Track0::S2);
    set(n + 4, Track0::E);
    for pos in front..end {
        set(pos, Track0::E);
    }
    Configuration::two_sided(
        alloc::vec![sig.pack(Track0::B, hash)],
        cells,
        alloc::vec![sig.pack(Track0::E, hash)],
        lo,
    )
}

/// A fully initialized machine segment: wall, head, a `1^{3n+5}⊥` tape laid
/// out in left arrows, and the growing `S2p`-behind-`E` pair sealing the
/// right end.
pub fn build_tm_segment_config(
    machine: &TuringMachine,
    w: &str,
    m: usize,
    n: usize,
) -> Result<Configuration> {
    let (sig, ro, hash) = packed_run(machine, w, m)?;
    let n = n as i64;
    let lo = -1;
    let hi = 3 * n + 7;
    let mut cells = Vec::with_capacity((hi - lo + 1) as usize);
    let ro_at = |pos: i64| {
        if pos >= 0 && (pos as usize) < ro.len() {
            ro[pos as usize]
        } else {
            hash
        }
    };
    cells.push(sig.pack(Track0::Wall, hash));
    cells.push(sig.pack(Track0::Head { q: machine.initial(), g: sig.one() }, ro_at(0)));
    for pos in 1..=3 * n + 4 {
        cells.push(sig.pack(Track0::Arrow { dir: Dir::Left, g: sig.one() }, ro_at(pos)));
    }
    cells.push(sig.pack(Track0::Arrow { dir: Dir::Left, g: machine.blank() }, ro_at(3 * n + 5)));
    cells.push(sig.pack(Track0::S2p, ro_at(3 * n + 6)));
    cells.push(sig.pack(Track0::E, ro_at(3 * n + 7)));
    Configuration::two_sided(
        alloc::vec![sig.pack(Track0::B, hash)],
        cells,
        alloc::vec![sig.pack(Track0::B, hash)],
        lo,
    )
}

/// Runs the staged configuration and checks both collision events.
pub fn verify_geometry(
    machine: &TuringMachine,
    w: &str,
    m: usize,
    n: usize,
) -> Result<Vec<(SpaceTimeEvent, bool)>> {
    let events = expected_events(machine, n)?;
    let rule = compile_signal_ca(machine)?;
    let config = build_proof_config(machine, w, m, n, &[], &[])?;
    let sig = SignalCaAlphabet::new(machine)?;
    let lo = -3;
    let hi = 3 * n as i64 + 7;
    let diagram = crate::engine::run(&rule, &config, 2 * n + 1, (lo, hi), 1 << 22)?;
    let mut out = Vec::new();
    for event in events {
        let row = diagram.row(event.time as usize);
        let pass = event.cells.iter().all(|&(pos, want)| {
            let got = sig.unpack(row[(pos - lo) as usize]).0;
            got == want
        });
        out.push((event, pass));
    }
    Ok(out)
}

/// Head cells of one diagram row: `(position, state, tape symbol)`.
pub fn head_cells(
    sig: &SignalCaAlphabet,
    row: &[Sym],
    window_lo: i64,
) -> Vec<(i64, u16, Sym)> {
    row.iter()
        .enumerate()
        .filter_map(|(i, &s)| match sig.unpack(s).0 {
            Track0::Head { q, g } => Some((window_lo + i as i64, q, g)),
            _ => None,
        })
        .collect()
}

/// Searches a diagram for the halt word at the origin; returns the first
/// time it appears.
pub fn find_w_hat(
    machine: &TuringMachine,
    diagram: &SpacetimeDiagram,
    w: &str,
) -> Result<Option<u64>> {
    let word = w_hat(machine, w)?;
    let (lo, _) = diagram.window();
    if lo > 0 {
        return Err(Error::BadWindow { lo, hi: 0 });
    }
    let start = (-lo) as usize;
    for t in 0..=diagram.steps() {
        let row = diagram.row(t);
        if row.len() >= start + word.len() && row[start..start + word.len()] == word[..] {
            return Ok(Some(t as u64));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::run;
    use crate::tm::{build_sigma3_machine, checker_rw_tape, PredicateProgram, TmRun};
    use rand_chacha::ChaCha8Rng;
    use rand_core::{Rng, SeedableRng};

    fn checker() -> TuringMachine {
        build_sigma3_machine("a", &PredicateProgram::AlwaysTrue).unwrap()
    }

    fn compiled(machine: &TuringMachine) -> (LocalRule, SignalCaAlphabet) {
        (compile_signal_ca(machine).unwrap(), SignalCaAlphabet::new(machine).unwrap())
    }

    /// `B`-background configuration with the given cells, read-only track all
    /// filler.
    fn signals_at(sig: &SignalCaAlphabet, hash: Sym, cells: &[(i64, Track0)]) -> Configuration {
        let lo = cells.iter().map(|c| c.0).min().unwrap();
        let hi = cells.iter().map(|c| c.0).max().unwrap();
        let b = sig.pack(Track0::B, hash);
        let mut v = alloc::vec![b; (hi - lo + 1) as usize];
        for &(p, t0) in cells {
            v[(p - lo) as usize] = sig.pack(t0, hash);
        }
        Configuration::patch(b, v, lo)
    }

    fn t0_at(sig: &SignalCaAlphabet, diagram: &SpacetimeDiagram, t: usize, pos: i64) -> Track0 {
        sig.unpack(diagram.get(t, pos)).0
    }

    #[test]
    fn symbol_layout_round_trips() {
        let machine = checker();
        let sig = SignalCaAlphabet::new(&machine).unwrap();
        let total = sig.alphabet().len();
        assert_eq!(total, sig.size());
        let nq = machine.states().len();
        let ng = machine.rw_alphabet().len();
        let na = machine.ro_alphabet().len();
        assert_eq!(total, (nq + 2) * ng * na + 7 * na);
        for i in 0..total {
            let s = Sym(i as u16);
            let (t0, ro) = sig.unpack(s);
            assert_eq!(sig.pack(t0, ro), s);
        }
        let hash = machine.ro_filler();
        let wall = sig.pack(Track0::Wall, hash);
        assert_eq!(sig.alphabet().names()[wall.idx()], "|-/#");
        let arrow = sig.pack(Track0::Arrow { dir: Dir::Left, g: sig.one() }, hash);
        assert_eq!(sig.alphabet().names()[arrow.idx()], "<;1/#");
    }

    #[test]
    fn isolated_signals_travel_at_their_speeds() {
        let machine = checker();
        let (rule, sig) = compiled(&machine);
        let hash = machine.ro_filler();
        let blank = machine.blank();

        let cases: [(Track0, i64); 4] =
            [(Track0::E, 2), (Track0::S1, 1), (Track0::S2, 2), (Track0::S3, 3)];
        for (t0, speed) in cases {
            let config = signals_at(&sig, hash, &[(0, t0)]);
            let d = run(&rule, &config, 4, (-2, 14), 1 << 16).unwrap();
            for t in 0..=4usize {
                assert_eq!(t0_at(&sig, &d, t, speed * t as i64), t0, "{t0:?} at step {t}");
            }
        }

        // S3 leaves left arrows carrying 1 on the three cells of each jump.
        let config = signals_at(&sig, hash, &[(0, Track0::S3)]);
        let d = run(&rule, &config, 4, (-2, 14), 1 << 16).unwrap();
        let one_arrow = Track0::Arrow { dir: Dir::Left, g: sig.one() };
        for t in 1..=4usize {
            for back in 1..=3 {
                assert_eq!(t0_at(&sig, &d, t, 3 * t as i64 - back), one_arrow);
            }
        }

        // S2p rides like S2 but trails left arrows carrying the blank.
        let config = signals_at(&sig, hash, &[(0, Track0::S2p)]);
        let d = run(&rule, &config, 4, (-2, 12), 1 << 16).unwrap();
        let blank_arrow = Track0::Arrow { dir: Dir::Left, g: blank };
        for t in 1..=4usize {
            assert_eq!(t0_at(&sig, &d, t, 2 * t as i64), Track0::S2p);
            assert_eq!(t0_at(&sig, &d, t, 2 * t as i64 - 1), blank_arrow);
            assert_eq!(t0_at(&sig, &d, t, 2 * t as i64 - 2), blank_arrow);
        }
    }

    #[test]
    fn arrow_with_e_on_its_right_decays() {
        let machine = checker();
        let (rule, sig) = compiled(&machine);
        let hash = machine.ro_filler();
        let config = signals_at(
            &sig,
            hash,
            &[(0, Track0::Arrow { dir: Dir::Left, g: sig.one() }), (1, Track0::E)],
        );
        let d = run(&rule, &config, 1, (-2, 5), 1 << 16).unwrap();
        assert_eq!(t0_at(&sig, &d, 1, 0), Track0::E);
        assert_eq!(t0_at(&sig, &d, 1, 1), Track0::B);
        assert_eq!(t0_at(&sig, &d, 1, 2), Track0::B);
        assert_eq!(t0_at(&sig, &d, 1, 3), Track0::E);
    }

    #[test]
    fn docked_signals_hold_formation_behind_an_e() {
        let machine = checker();
        let (rule, sig) = compiled(&machine);
        let hash = machine.ro_filler();
        let config =
            signals_at(&sig, hash, &[(0, Track0::S1), (1, Track0::S2), (2, Track0::E)]);
        let d = run(&rule, &config, 4, (-2, 12), 1 << 16).unwrap();
        for t in 0..=4usize {
            let t64 = t as i64;
            assert_eq!(t0_at(&sig, &d, t, t64), Track0::S1, "S1 at step {t}");
            assert_eq!(t0_at(&sig, &d, t, 1 + 2 * t64), Track0::S2, "S2 at step {t}");
            assert_eq!(t0_at(&sig, &d, t, 2 + 2 * t64), Track0::E, "E at step {t}");
        }
    }

    #[test]
    fn s2_catching_s1_births_a_machine_segment() {
        let machine = checker();
        let (rule, sig) = compiled(&machine);
        let hash = machine.ro_filler();
        let config = signals_at(&sig, hash, &[(0, Track0::S2), (1, Track0::S1)]);
        let d = run(&rule, &config, 1, (-3, 5), 1 << 16).unwrap();
        assert_eq!(t0_at(&sig, &d, 1, -2), Track0::B);
        assert_eq!(t0_at(&sig, &d, 1, -1), Track0::Wall);
        assert_eq!(
            t0_at(&sig, &d, 1, 0),
            Track0::Head { q: machine.initial(), g: sig.one() }
        );
        assert_eq!(t0_at(&sig, &d, 1, 1), Track0::Arrow { dir: Dir::Left, g: sig.one() });
        assert_eq!(t0_at(&sig, &d, 1, 2), Track0::S3);
        assert_eq!(t0_at(&sig, &d, 1, 3), Track0::B);
    }

    #[test]
    fn s3_catching_s2_births_s2p() {
        let machine = checker();
        let (rule, sig) = compiled(&machine);
        let hash = machine.ro_filler();
        let config =
            signals_at(&sig, hash, &[(0, Track0::S3), (1, Track0::S2), (2, Track0::E)]);
        let d = run(&rule, &config, 1, (-2, 7), 1 << 16).unwrap();
        let one_arrow = Track0::Arrow { dir: Dir::Left, g: sig.one() };
        assert_eq!(t0_at(&sig, &d, 1, 0), one_arrow);
        assert_eq!(t0_at(&sig, &d, 1, 1), one_arrow);
        assert_eq!(t0_at(&sig, &d, 1, 2), one_arrow);
        assert_eq!(t0_at(&sig, &d, 1, 3), Track0::S2p);
        assert_eq!(t0_at(&sig, &d, 1, 4), Track0::E);
    }

    #[test]
    fn staged_run_hits_both_collision_events() {
        let machine = checker();
        for (n, m) in [(5, 0), (6, 2), (9, 0), (12, 1)] {
            let results = verify_geometry(&machine, "a", m, n).unwrap();
            assert_eq!(results.len(), 2);
            for (event, pass) in results {
                assert!(pass, "event at t={} failed for n={n}", event.time);
            }
        }
    }

    #[test]
    fn event_schedule_formulas() {
        let machine = checker();
        let events = expected_events(&machine, 5).unwrap();
        assert_eq!((events[0].time, events[0].coordinate), (5, 2));
        assert_eq!((events[1].time, events[1].coordinate), (11, 20));
        let events = expected_events(&machine, 10).unwrap();
        assert_eq!((events[0].time, events[0].coordinate), (10, 2));
        assert_eq!((events[1].time, events[1].coordinate), (21, 35));
        assert!(expected_events(&machine, 4).is_err());
    }

    #[test]
    fn segment_rebase_matches_the_staged_run() {
        let machine = checker();
        for (n, m) in [(6usize, 1usize), (8, 0)] {
            let rule = compile_signal_ca(&machine).unwrap();
            let staged = build_proof_config(&machine, "a", m, n, &[], &[]).unwrap();
            let ro_len = (1 + m + 3) as i64;
            let lo = -6;
            let hi = ro_len + 2 * n as i64 + 6;
            let d = run(&rule, &staged, n, (lo, hi), 1 << 20).unwrap();
            let rebased = build_segment_config(&machine, "a", m, n).unwrap();
            assert_eq!(d.row(n), &rebased.slice(lo, hi)[..], "n={n} m={m}");
        }
    }

    /// Runs the fully initialized segment and checks the head against direct
    /// simulation step for step, plus the tape cells under the arrows.
    /// Returns the diagram and the halt row, if the machine halted in time.
    fn trace_against_simulation(
        machine: &TuringMachine,
        w: &str,
        m: usize,
        n: usize,
        max_steps: usize,
    ) -> (SpacetimeDiagram, Option<usize>) {
        let (rule, sig) = compiled(machine);
        let config = build_tm_segment_config(machine, w, m, n).unwrap();
        let lo = -2i64;
        let hi = 3 * n as i64 + 8;
        let d = run(&rule, &config, max_steps, (lo, hi), 1 << 22).unwrap();
        let ro = checker_ro_tape(machine, w, m).unwrap();
        let rw = checker_rw_tape(machine, n);
        let mut tm = TmRun::new(machine, &ro, &rw).unwrap();
        for t in 0..=max_steps {
            let heads = head_cells(&sig, d.row(t), lo);
            assert_eq!(heads.len(), 1, "one head at step {t}");
            let (pos, q, g) = heads[0];
            assert_eq!(pos, tm.head() as i64, "head position at step {t}");
            assert_eq!(q, tm.state(), "state at step {t}");
            assert_eq!(g, tm.rw_at(tm.head()), "cell under head at step {t}");
            for cell in 0..3 * n as i64 + 6 {
                if let Track0::Arrow { g, .. } = t0_at(&sig, &d, t, cell) {
                    assert_eq!(g, tm.rw_at(cell as usize), "tape cell {cell} at step {t}");
                }
            }
            if tm.halted().is_some() {
                if t < max_steps {
                    assert!(head_cells(&sig, d.row(t + 1), lo).is_empty());
                }
                return (d, Some(t));
            }
            if tm.step().is_err() {
                return (d, None);
            }
        }
        (d, None)
    }

    #[test]
    fn accepting_checker_matches_simulation_and_shows_the_halt_word() {
        let machine = checker();
        for n in [2usize, 3] {
            let (d, halt) = trace_against_simulation(&machine, "a", 0, n, 900);
            let halt = halt.expect("the always-true checker halts");
            let hit = find_w_hat(&machine, &d, "a").unwrap();
            assert_eq!(hit, Some(halt as u64), "halt word appears at the halt row, n={n}");
        }
    }

    #[test]
    fn rejecting_checker_matches_simulation_and_never_shows_the_halt_word() {
        let machine = build_sigma3_machine("a", &PredicateProgram::AlwaysFalse).unwrap();
        for n in [2usize, 4] {
            let (d, halt) = trace_against_simulation(&machine, "a", 0, n, 900);
            assert!(halt.is_some(), "the always-false checker still halts (rejecting)");
            assert_eq!(find_w_hat(&machine, &d, "a").unwrap(), None, "n={n}");
        }
    }

    #[test]
    fn random_machines_track_direct_simulation() {
        for seed in 0..8u64 {
            let machine = random_machine(seed);
            trace_against_simulation(&machine, "ab", 1, 3, 120);
        }
    }

    fn random_machine(seed: u64) -> TuringMachine {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let states = ["p", "r", "f1", "f2"];
        let moves = [Move::Left, Move::Right, Move::Stay];
        let writes = ["1", "0", "_"];
        let mut rules = Vec::new();
        for q in ["p", "r"] {
            for a in ["a", "b", "#", "$"] {
                for g in ["1", "0", "_"] {
                    let q2 = states[(rng.next_u32() % 4) as usize];
                    let g2 = writes[(rng.next_u32() % 3) as usize];
                    let mv = moves[(rng.next_u32() % 3) as usize];
                    rules.push((
                        q.to_string(),
                        a.to_string(),
                        g.to_string(),
                        q2.to_string(),
                        g2.to_string(),
                        mv,
                    ));
                }
            }
        }
        TuringMachine::new(
            states.iter().map(|s| s.to_string()).collect(),
            "p",
            "f1",
            "f2",
            alloc::vec!["1".to_string(), "0".to_string()],
            ["a", "b", "#", "$"].iter().map(|s| s.to_string()).collect(),
            &rules,
        )
        .unwrap()
    }

    #[test]
    fn category_scan_is_exhaustive_and_clean() {
        let report = conservation_scan();
        assert_eq!(report.windows, 13u64.pow(7));
        assert!(report.ok(), "{report:?}");
    }

    #[test]
    fn concrete_windows_obey_the_conservation_contract() {
        let machine = checker();
        let (rule, sig) = compiled(&machine);
        let total = sig.alphabet().len() as u32;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20_000 {
            let window: Vec<Sym> =
                (0..7).map(|_| Sym((rng.next_u32() % total) as u16)).collect();
            let out = rule.apply(&window);
            let (t0, ro) = sig.unpack(out);
            assert_eq!(ro, sig.unpack(window[3]).1, "read-only track is copied");
            if t0 == Track0::S1 {
                assert_eq!(sig.unpack(window[2]).0, Track0::S1);
            }
            if t0 == Track0::S2 {
                assert_eq!(sig.unpack(window[1]).0, Track0::S2);
            }
            if sig.unpack(window[1]).0 == Track0::E {
                assert_eq!(t0, Track0::E);
            }
        }
    }

    #[test]
    fn halt_word_layout() {
        let machine = checker();
        let sig = SignalCaAlphabet::new(&machine).unwrap();
        let zero = machine.rw_alphabet().sym_checked("0").unwrap();
        let word = w_hat(&machine, "a").unwrap();
        assert_eq!(word.len(), 3);
        let (t0, ro) = sig.unpack(word[0]);
        assert_eq!(t0, Track0::Head { q: machine.final2(), g: zero });
        assert_eq!(ro, machine.ro_filler());
        let (t0, ro) = sig.unpack(word[1]);
        assert_eq!(t0, Track0::Arrow { dir: Dir::Left, g: zero });
        assert_eq!(ro, machine.ro_alphabet().sym_checked("a").unwrap());
        let (t0, ro) = sig.unpack(word[2]);
        assert_eq!(t0, Track0::Arrow { dir: Dir::Left, g: zero });
        assert_eq!(ro, machine.ro_filler());
        assert!(w_hat(&machine, "").is_err());
    }

    #[test]
    fn builder_preconditions() {
        let machine = checker();
        let sig = SignalCaAlphabet::new(&machine).unwrap();
        let hash = machine.ro_filler();
        let u = alloc::vec![sig.pack(Track0::B, hash); 2];
        assert!(build_proof_config(&machine, "a", 0, 6, &u, &[]).is_err());
        assert!(build_proof_config(&machine, "a", 0, 7, &u, &[]).is_ok());
        assert!(build_proof_config(&machine, "", 0, 7, &[], &[]).is_err());

        let mut rules = Vec::new();
        for a in ["a", "#", "$"] {
            for g in ["1", "_"] {
                rules.push((
                    "<".to_string(),
                    a.to_string(),
                    g.to_string(),
                    "f1".to_string(),
                    g.to_string(),
                    Move::Stay,
                ));
            }
        }
        let odd = TuringMachine::new(
            alloc::vec!["<".to_string(), "f1".to_string(), "f2".to_string()],
            "<",
            "f1",
            "f2",
            alloc::vec!["1".to_string()],
            alloc::vec!["a".to_string(), "#".to_string(), "$".to_string()],
            &rules,
        )
        .unwrap();
        assert!(SignalCaAlphabet::new(&odd).is_err());
    }
}
