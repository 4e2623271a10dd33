//! The line-oriented file formats (.ca rules, .tm machines, .sft subshifts)
//! and the configuration literal syntax.
//!
//! Parsers report the offending line; emitters produce text the parsers read
//! back to an equivalent object. Blank lines and `#` comments are ignored
//! everywhere.

use std::fmt;
use std::path::Path;

use glimca_core::signal::compile_signal_ca;
use glimca_core::tm::{Move, TuringMachine};
use glimca_core::{Alphabet, Configuration, Error, LocalRule, Sft, Sym};

/// Failures sorted by the exit code they map to: bad input (2), exhausted
/// budget (3).
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Budget(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Budget(m) => write!(f, "{m}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

/// Core errors keep their message; only budget exhaustion changes the exit
/// code.
pub fn from_core(e: Error) -> CliError {
    match e {
        Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
        other => CliError::Input(other.to_string()),
    }
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Short label for diagnostics: the file name without its directory.
pub fn origin_of(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn err_at(origin: &str, line: usize, message: impl fmt::Display) -> CliError {
    CliError::Input(format!("{origin}:{line}: {message}"))
}

/// Meaningful lines with their 1-based numbers.
fn lines_of(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

fn key_value<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    line.strip_prefix(key).and_then(|rest| rest.strip_prefix(':')).map(str::trim)
}

/// Parses a `.ca` rule file.
///
/// Three forms share the header lines `alphabet:` and `radius:` (and an
/// optional `name:`): a `builtin:` line names a stock rule; table lines
/// `n1 ... n(2r+1) -> s` with a final `default -> s` spell out a local rule;
/// and a `signal-tm:` block holding a machine description up to `end`
/// compiles that machine's radius-3 signal rule.
pub fn parse_ca(text: &str, origin: &str) -> Result<LocalRule, CliError> {
    let mut alphabet: Option<(usize, Alphabet)> = None;
    let mut radius: Option<usize> = None;
    let mut name: Option<String> = None;
    let mut builtin: Option<(usize, String)> = None;
    let mut entries: Vec<(usize, &str)> = Vec::new();
    let mut default: Option<(usize, &str)> = None;

    let mut iter = lines_of(text);
    while let Some((no, line)) = iter.next() {
        if let Some(rest) = key_value(line, "alphabet") {
            let names: Vec<&str> = rest.split_whitespace().collect();
            let ab = Alphabet::new(names.iter().map(|s| s.to_string()))
                .map_err(|e| err_at(origin, no, e))?;
            alphabet = Some((no, ab));
        } else if let Some(rest) = key_value(line, "radius") {
            radius =
                Some(rest.parse().map_err(|_| err_at(origin, no, "radius must be an integer"))?);
        } else if let Some(rest) = key_value(line, "name") {
            name = Some(rest.to_string());
        } else if let Some(rest) = key_value(line, "builtin") {
            builtin = Some((no, rest.to_string()));
        } else if key_value(line, "signal-tm").is_some() {
            let mut block: Vec<(usize, &str)> = Vec::new();
            let mut closed = false;
            for (no2, line2) in iter.by_ref() {
                if line2 == "end" {
                    closed = true;
                    break;
                }
                block.push((no2, line2));
            }
            if !closed {
                return Err(err_at(origin, no, "signal-tm block is missing its `end` line"));
            }
            let machine = parse_tm_lines(&block, origin)?;
            return compile_signal_ca(&machine).map_err(from_core);
        } else if let Some(rest) = line.strip_prefix("default") {
            let rest = rest.trim();
            let out = rest
                .strip_prefix("->")
                .map(str::trim)
                .ok_or_else(|| err_at(origin, no, "expected `default -> symbol`"))?;
            default = Some((no, out));
        } else if line.contains("->") {
            entries.push((no, line));
        } else {
            return Err(err_at(origin, no, format!("unrecognized line {line:?}")));
        }
    }

    let (ab_line, ab) =
        alphabet.ok_or_else(|| CliError::Input(format!("{origin}: missing `alphabet:` line")))?;
    let radius =
        radius.ok_or_else(|| CliError::Input(format!("{origin}: missing `radius:` line")))?;

    if let Some((no, which)) = builtin {
        if let Some((en, _)) = entries.first() {
            return Err(err_at(origin, *en, "builtin rules take no table lines"));
        }
        let b = glimca_core::rule::Builtin::from_name(&which)
            .ok_or_else(|| err_at(origin, no, format!("unknown builtin {which:?}")))?;
        return LocalRule::builtin(b, ab, radius).map_err(from_core);
    }

    let width = 2 * radius + 1;
    let mut table: std::collections::BTreeMap<Vec<Sym>, Sym> = std::collections::BTreeMap::new();
    for (no, line) in entries {
        let (lhs, rhs) = line
            .split_once("->")
            .ok_or_else(|| err_at(origin, no, "expected `window -> symbol`"))?;
        let window: Vec<Sym> = lhs
            .split_whitespace()
            .map(|tok| ab.sym_checked(tok))
            .collect::<Result<_, _>>()
            .map_err(|e| err_at(origin, no, e))?;
        if window.len() != width {
            return Err(err_at(
                origin,
                no,
                format!("window has {} symbols, the radius demands {width}", window.len()),
            ));
        }
        let out = ab.sym_checked(rhs.trim()).map_err(|e| err_at(origin, no, e))?;
        if table.insert(window, out).is_some() {
            return Err(err_at(origin, no, "duplicate window"));
        }
    }
    let (_, default) = default.ok_or_else(|| {
        err_at(origin, ab_line, "table rules need a final `default -> symbol` line")
    })?;
    let default = ab.sym_checked(default).map_err(|e| CliError::Input(format!("{origin}: {e}")))?;
    let label = name.unwrap_or_else(|| "table".to_string());
    LocalRule::from_fn(ab, radius, &label, |w| table.get(w).copied().unwrap_or(default))
        .map_err(from_core)
}

/// Renders a rule in `.ca` form. Tables matching a stock rule of the same
/// name collapse to a `builtin:` line, compiled signal rules to their
/// machine's `signal-tm:` block, and everything else to explicit table lines
/// with the most common output on the `default` line.
#[cfg(test)]
pub fn emit_ca(rule: &LocalRule) -> String {
    use glimca_core::rule::{Builtin, RuleBody};
    let ab = rule.alphabet();
    let table = match rule.body() {
        RuleBody::Signal(sig) => return emit_signal_ca(sig.machine()),
        RuleBody::Table(t) => t,
    };
    let mut out = format!("alphabet: {}\nradius: {}\n", ab.names().join(" "), rule.radius());
    if let Some(b) = Builtin::from_name(rule.name()) {
        if let Ok(stock) = LocalRule::builtin(b, ab.clone(), rule.radius()) {
            if matches!(stock.body(), RuleBody::Table(t) if t == table) {
                out.push_str(&format!("builtin: {}\n", b.name()));
                return out;
            }
        }
    }
    out.push_str(&format!("name: {}\n", rule.name()));
    let mut counts = vec![0usize; ab.len()];
    for &s in table {
        counts[s.idx()] += 1;
    }
    let default = counts
        .iter()
        .enumerate()
        .max_by_key(|&(_, c)| *c)
        .map_or(Sym(0), |(i, _)| Sym(i as u16));
    for (w, &s) in ab.words(rule.window_len()).zip(table) {
        if s != default {
            let parts: Vec<&str> = w.iter().map(|&x| ab.name(x)).collect();
            out.push_str(&format!("{} -> {}\n", parts.join(" "), ab.name(s)));
        }
    }
    out.push_str(&format!("default -> {}\n", ab.name(default)));
    out
}

/// The `.ca` form of a compiled machine: the machine itself inside a
/// `signal-tm:` block, so the file stays self-contained.
pub fn emit_signal_ca(machine: &TuringMachine) -> String {
    format!("signal-tm:\n{}end\n", emit_tm(machine))
}

fn parse_tm_lines(lines: &[(usize, &str)], origin: &str) -> Result<TuringMachine, CliError> {
    let mut states: Option<Vec<String>> = None;
    let mut initial: Option<String> = None;
    let mut final1: Option<String> = None;
    let mut final2: Option<String> = None;
    let mut gamma: Option<Vec<String>> = None;
    let mut gamma_a: Option<Vec<String>> = None;
    let mut rules: Vec<(String, String, String, String, String, Move)> = Vec::new();

    for &(no, line) in lines {
        if let Some(rest) = key_value(line, "states") {
            states = Some(rest.split_whitespace().map(str::to_string).collect());
        } else if let Some(rest) = key_value(line, "initial") {
            initial = Some(rest.to_string());
        } else if let Some(rest) = key_value(line, "final1") {
            final1 = Some(rest.to_string());
        } else if let Some(rest) = key_value(line, "final2") {
            final2 = Some(rest.to_string());
        } else if let Some(rest) = key_value(line, "gamma") {
            gamma = Some(rest.split_whitespace().map(str::to_string).collect());
        } else if let Some(rest) = key_value(line, "gammaA") {
            gamma_a = Some(rest.split_whitespace().map(str::to_string).collect());
        } else if let Some((lhs, rhs)) = line.split_once("->") {
            let l: Vec<&str> = lhs.split_whitespace().collect();
            let r: Vec<&str> = rhs.split_whitespace().collect();
            if l.len() != 3 || r.len() != 3 {
                return Err(err_at(origin, no, "expected `state read-only read-write -> state write move`"));
            }
            let mv = r[2]
                .chars()
                .next()
                .filter(|_| r[2].len() == 1)
                .and_then(Move::from_letter)
                .ok_or_else(|| err_at(origin, no, "move must be L, R, or S"))?;
            rules.push((
                l[0].to_string(),
                l[1].to_string(),
                l[2].to_string(),
                r[0].to_string(),
                r[1].to_string(),
                mv,
            ));
        } else {
            return Err(err_at(origin, no, format!("unrecognized line {line:?}")));
        }
    }

    let missing = |what: &str| CliError::Input(format!("{origin}: missing `{what}:` line"));
    TuringMachine::new(
        states.ok_or_else(|| missing("states"))?,
        &initial.ok_or_else(|| missing("initial"))?,
        &final1.ok_or_else(|| missing("final1"))?,
        &final2.ok_or_else(|| missing("final2"))?,
        gamma.ok_or_else(|| missing("gamma"))?,
        gamma_a.ok_or_else(|| missing("gammaA"))?,
        &rules,
    )
    .map_err(|e| CliError::Input(format!("{origin}: {e}")))
}

/// Parses a `.tm` machine file: `states:`, `initial:`, `final1:`, `final2:`,
/// `gamma:` (read-write symbols, blank implicit), `gammaA:` (read-only
/// symbols), then one `q a g -> q' g' L|R|S` line per transition.
pub fn parse_tm(text: &str, origin: &str) -> Result<TuringMachine, CliError> {
    let lines: Vec<(usize, &str)> = lines_of(text).collect();
    parse_tm_lines(&lines, origin)
}

pub fn emit_tm(machine: &TuringMachine) -> String {
    let mut out = format!(
        "states: {}\ninitial: {}\nfinal1: {}\nfinal2: {}\n",
        machine.states().join(" "),
        machine.state_name(machine.initial()),
        machine.state_name(machine.final1()),
        machine.state_name(machine.final2()),
    );
    let rw = machine.rw_alphabet();
    // The blank is declared implicitly, so strip its trailing name.
    let gamma: Vec<&str> = rw.names()[..rw.len() - 1].iter().map(String::as_str).collect();
    out.push_str(&format!("gamma: {}\n", gamma.join(" ")));
    out.push_str(&format!("gammaA: {}\n", machine.ro_alphabet().names().join(" ")));
    for (q, a, g, (q2, g2, mv)) in machine.transitions() {
        out.push_str(&format!(
            "{} {} {} -> {} {} {}\n",
            machine.state_name(q),
            machine.ro_alphabet().name(a),
            rw.name(g),
            machine.state_name(q2),
            rw.name(g2),
            mv.letter(),
        ));
    }
    out
}

/// Parses an `.sft` file: `alphabet:`, then either `forbid: w1 w2 ...` or
/// `window: n` plus `allow: w1 w2 ...`. Word tokens are whitespace-split;
/// multi-symbol-name alphabets separate symbols within a word by commas.
pub fn parse_sft(text: &str, origin: &str) -> Result<Sft, CliError> {
    let mut alphabet: Option<Alphabet> = None;
    let mut forbid: Option<(usize, Vec<Vec<Sym>>)> = None;
    let mut window: Option<usize> = None;
    let mut allow: Option<(usize, Vec<Vec<Sym>>)> = None;

    for (no, line) in lines_of(text) {
        if let Some(rest) = key_value(line, "alphabet") {
            let ab = Alphabet::new(rest.split_whitespace().map(str::to_string))
                .map_err(|e| err_at(origin, no, e))?;
            alphabet = Some(ab);
        } else if let Some(rest) = key_value(line, "forbid") {
            let ab = alphabet
                .as_ref()
                .ok_or_else(|| err_at(origin, no, "`alphabet:` must come first"))?;
            let words = rest
                .split_whitespace()
                .map(|tok| ab.parse_word(tok))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| err_at(origin, no, e))?;
            forbid = Some((no, words));
        } else if let Some(rest) = key_value(line, "window") {
            window =
                Some(rest.parse().map_err(|_| err_at(origin, no, "window must be an integer"))?);
        } else if let Some(rest) = key_value(line, "allow") {
            let ab = alphabet
                .as_ref()
                .ok_or_else(|| err_at(origin, no, "`alphabet:` must come first"))?;
            let words = rest
                .split_whitespace()
                .map(|tok| ab.parse_word(tok))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| err_at(origin, no, e))?;
            allow = Some((no, words));
        } else {
            return Err(err_at(origin, no, format!("unrecognized line {line:?}")));
        }
    }

    let ab =
        alphabet.ok_or_else(|| CliError::Input(format!("{origin}: missing `alphabet:` line")))?;
    match (forbid, window, allow) {
        (Some((_, words)), None, None) => Sft::from_forbidden(ab, &words).map_err(from_core),
        (None, Some(n), Some((no, words))) => {
            if let Some(bad) = words.iter().find(|w| w.len() != n) {
                return Err(err_at(
                    origin,
                    no,
                    format!("allowed word {:?} does not have window length {n}", ab.format_word(bad)),
                ));
            }
            Sft::from_allowed(ab, n, words).map_err(from_core)
        }
        (None, None, None) => {
            Err(CliError::Input(format!("{origin}: need `forbid:` or `window:` plus `allow:`")))
        }
        _ => Err(CliError::Input(format!(
            "{origin}: give either `forbid:` or `window:` plus `allow:`, not both"
        ))),
    }
}

#[cfg(test)]
pub fn emit_sft(sft: &Sft) -> String {
    let ab = sft.alphabet();
    let words: Vec<String> =
        sft.language(sft.window()).iter().map(|w| ab.format_word(w)).collect();
    format!(
        "alphabet: {}\nwindow: {}\nallow: {}\n",
        ab.names().join(" "),
        sft.window(),
        words.join(" ")
    )
}

/// Parses a configuration literal: `cyclic:WORD` for a periodic point, or
/// `LEFT^inf (CENTER@OFFSET) RIGHT^inf` for a two-sided eventually periodic
/// one.
pub fn parse_config(literal: &str, ab: &Alphabet) -> Result<Configuration, CliError> {
    let bad = |m: String| CliError::Input(format!("config literal {literal:?}: {m}"));
    let literal = literal.trim();
    if let Some(word) = literal.strip_prefix("cyclic:") {
        let word = ab.parse_word(word).map_err(|e| bad(e.to_string()))?;
        return Configuration::cyclic(word).map_err(|e| bad(e.to_string()));
    }
    let Some((left_part, rest)) = literal.split_once("^inf") else {
        return Err(bad("expected `cyclic:WORD` or `LEFT^inf (CENTER@OFFSET) RIGHT^inf`".into()));
    };
    let rest = rest.trim_start();
    let Some(rest) = rest.strip_prefix('(') else {
        return Err(bad("expected `(CENTER@OFFSET)` after the left background".into()));
    };
    let Some((center_part, rest)) = rest.split_once(')') else {
        return Err(bad("unclosed `(CENTER@OFFSET)`".into()));
    };
    let Some((center_word, offset)) = center_part.rsplit_once('@') else {
        return Err(bad("center needs an `@OFFSET`".into()));
    };
    let offset: i64 =
        offset.trim().parse().map_err(|_| bad("offset must be an integer".into()))?;
    let Some(right_part) = rest.trim().strip_suffix("^inf") else {
        return Err(bad("expected a `RIGHT^inf` background at the end".into()));
    };
    let left = ab.parse_word(left_part.trim()).map_err(|e| bad(e.to_string()))?;
    let center = ab.parse_word(center_word.trim()).map_err(|e| bad(e.to_string()))?;
    let right = ab.parse_word(right_part.trim()).map_err(|e| bad(e.to_string()))?;
    Configuration::two_sided(left, center, right, offset).map_err(|e| bad(e.to_string()))
}
