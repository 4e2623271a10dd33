//! The acceptance gate: every release-blocking behavior, one test per
//! criterion, each printing a single pass/fail line (visible under
//! `--nocapture`). The checks verify library results against independent
//! in-test recomputation wherever a brute-force oracle is tractable.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, resume_unwind, UnwindSafe};
use std::time::{Duration, Instant};

use glimca_core::engine::{cylinder_image_set, determined_image, run, SpacetimeDiagram};
use glimca_core::rule::Builtin;
use glimca_core::sample::Provenance;
use glimca_core::signal::{
    build_tm_segment_config, compile_signal_ca, conservation_scan, expected_events, find_w_hat,
    head_cells, verify_geometry, Dir, SignalCaAlphabet, Track0,
};
use glimca_core::subshift::ObstructionVerdict;
use glimca_core::tm::{
    build_sigma3_machine, checker_ro_tape, checker_rw_tape, simulate_tm, Move, PredicateProgram,
    TmRun, TuringMachine,
};
use glimca_core::{
    check_enables, estimate_generic_language, is_chain_transitive, realizability_report,
    restriction_classifier, search_forcing_word, Alphabet, Bounds, Certificate, Classification,
    Cylinder, EnablingVerdict, ForcingOutcome, LanguageSample, LocalRule, ReportInput, Sft, Sym,
};
use rand_chacha::ChaCha8Rng;
use rand_core::{Rng, SeedableRng};

fn gate(number: usize, what: &str, body: impl FnOnce() + UnwindSafe) {
    let outcome = catch_unwind(body);
    match &outcome {
        Ok(()) => println!("criterion {number}: pass ({what})"),
        Err(_) => println!("criterion {number}: FAIL ({what})"),
    }
    if let Err(panic) = outcome {
        resume_unwind(panic);
    }
}

fn binary() -> Alphabet {
    Alphabet::binary()
}

fn builtin(b: Builtin) -> LocalRule {
    LocalRule::builtin(b, binary(), 1).unwrap()
}

fn pw(s: &str) -> Vec<Sym> {
    binary().parse_word(s).unwrap()
}

#[test]
fn criterion_1_minimum_rule_language_reproduction() {
    gate(1, "sampled long-run language of the minimum rule is exactly 0*", || {
        let rule = builtin(Builtin::Min);
        let bounds = Bounds {
            t_max: 96,
            burn_in: 64,
            samples: 1000,
            period: 256,
            window: 8,
            seed: 0,
            ..Bounds::default()
        };
        let start = Instant::now();
        let sample = estimate_generic_language(&rule, &bounds).unwrap();
        let elapsed = start.elapsed();
        let ab = binary();
        for n in 0..=8usize {
            let want: BTreeSet<Vec<Sym>> = [ab.parse_word(&"0".repeat(n)).unwrap()].into();
            assert_eq!(sample.words(n).unwrap(), &want, "length {n}");
        }
        assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    });
}

/// Same machine as assets/reference.tm: halts into its accepting state on
/// the first step whatever it reads.
fn reference_machine() -> TuringMachine {
    let mut rules = Vec::new();
    for a in ["a", "#", "$"] {
        for g in ["1", "0", "_"] {
            rules.push((
                "p".to_string(),
                a.to_string(),
                g.to_string(),
                "f2".to_string(),
                g.to_string(),
                Move::Stay,
            ));
        }
    }
    TuringMachine::new(
        vec!["p".into(), "f1".into(), "f2".into()],
        "p",
        "f1",
        "f2",
        vec!["1".into(), "0".into()],
        vec!["a".into(), "#".into(), "$".into()],
        &rules,
    )
    .unwrap()
}

#[test]
fn criterion_2_collision_geometry() {
    gate(2, "staged runs hit both collision events at the scheduled spots", || {
        let start = Instant::now();
        let machines = [
            reference_machine(),
            build_sigma3_machine("a", &PredicateProgram::AlwaysTrue).unwrap(),
        ];
        for machine in &machines {
            let one = machine.rw_alphabet().sym_checked("1").unwrap();
            for n in 5..=12usize {
                let events = expected_events(machine, n).unwrap();
                assert_eq!(events.len(), 2);
                assert_eq!((events[0].time, events[0].coordinate), (n as u64, 2));
                assert_eq!(
                    events[0].cells,
                    vec![
                        (-1, Track0::Wall),
                        (0, Track0::Head { q: machine.initial(), g: one }),
                        (1, Track0::Arrow { dir: Dir::Left, g: one }),
                        (2, Track0::S3),
                    ],
                );
                assert_eq!(
                    (events[1].time, events[1].coordinate),
                    ((2 * n + 1) as u64, (3 * n + 5) as i64),
                );
                assert_eq!(events[1].cells, vec![((3 * n + 5) as i64, Track0::S2p)]);

                let rows = verify_geometry(machine, "a", 0, n).unwrap();
                assert_eq!(rows.len(), 2, "n={n}");
                for (event, pass) in rows {
                    assert!(pass, "event at t={} missed for n={n}", event.time);
                }
            }
        }
        assert!(start.elapsed() < Duration::from_secs(60), "took {:?}", start.elapsed());
    });
}

/// Runs the initialized machine segment for `max_steps` and checks, step for
/// step until the machine halts, that the embedded head matches a direct
/// simulation in position, state, and the cell under it, and that every tape
/// cell carried by an arrow matches the simulated tape. Returns the diagram
/// and the halt row.
fn traced_segment_run(machine: &TuringMachine, n: usize, max_steps: usize) -> (SpacetimeDiagram, usize) {
    let rule = compile_signal_ca(machine).unwrap();
    let sig = SignalCaAlphabet::new(machine).unwrap();
    let config = build_tm_segment_config(machine, "a", 0, n).unwrap();
    let lo = -2i64;
    let hi = 3 * n as i64 + 8;
    let d = run(&rule, &config, max_steps, (lo, hi), 1 << 22).unwrap();

    // The visible tape starts as 1^{3n+5} followed by one blank.
    let rw = checker_rw_tape(machine, n);
    assert_eq!(rw.len(), 3 * n + 6);
    for (cell, &want) in rw.iter().enumerate() {
        let got = match sig.unpack(d.get(0, cell as i64)).0 {
            Track0::Head { g, .. } | Track0::Arrow { g, .. } => g,
            other => panic!("cell {cell} of the fresh segment holds {other:?}"),
        };
        assert_eq!(got, want, "initial tape cell {cell}");
    }

    let ro = checker_ro_tape(machine, "a", 0).unwrap();
    let mut tm = TmRun::new(machine, &ro, &rw).unwrap();
    for t in 0..=max_steps {
        let heads = head_cells(&sig, d.row(t), lo);
        assert_eq!(heads.len(), 1, "one head at step {t}");
        let (pos, q, g) = heads[0];
        assert_eq!(pos, tm.head() as i64, "head position at step {t}");
        assert_eq!(q, tm.state(), "machine state at step {t}");
        assert_eq!(g, tm.rw_at(tm.head()), "cell under the head at step {t}");
        for cell in 0..3 * n as i64 + 6 {
            if let Track0::Arrow { g, .. } = sig.unpack(d.get(t, cell)).0 {
                assert_eq!(g, tm.rw_at(cell as usize), "tape cell {cell} at step {t}");
            }
        }
        if tm.halted().is_some() {
            if t < max_steps {
                assert!(head_cells(&sig, d.row(t + 1), lo).is_empty(), "head gone after halting");
            }
            return (d, t);
        }
        tm.step().unwrap();
    }
    panic!("machine did not halt within {max_steps} steps");
}

#[test]
fn criterion_3_machine_in_automaton_fidelity() {
    gate(3, "embedded runs track direct simulation and show the halt word iff accepting", || {
        let accept = build_sigma3_machine("a", &PredicateProgram::AlwaysTrue).unwrap();
        let reject = build_sigma3_machine("a", &PredicateProgram::AlwaysFalse).unwrap();
        for n in 2..=6usize {
            let ro = checker_ro_tape(&accept, "a", 0).unwrap();
            let rw = checker_rw_tape(&accept, n);
            let sim = simulate_tm(&accept, &ro, &rw, 1_000_000).unwrap();
            assert_eq!(sim.halted, Some(true), "the always-true checker accepts");
            let horizon = sim.steps as usize;

            let (d, halt_row) = traced_segment_run(&accept, n, horizon);
            let hit = find_w_hat(&accept, &d, "a").unwrap();
            assert_eq!(hit, Some(halt_row as u64), "halt word at the halt row, n={n}");
            assert!(halt_row <= horizon);

            let ro = checker_ro_tape(&reject, "a", 0).unwrap();
            let rw = checker_rw_tape(&reject, n);
            let sim = simulate_tm(&reject, &ro, &rw, 1_000_000).unwrap();
            assert_eq!(sim.halted, Some(false), "the always-false checker rejects");
            let double = 2 * horizon.max(sim.steps as usize);
            let (d, _) = traced_segment_run(&reject, n, double);
            assert_eq!(find_w_hat(&reject, &d, "a").unwrap(), None, "no halt word, n={n}");
        }
    });
}

#[test]
fn criterion_4_conservation_scan() {
    gate(4, "no window creates S1/S2/S2p and every E lands", || {
        let report = conservation_scan();
        assert_eq!(report.windows, 13u64.pow(7), "scan is exhaustive");
        assert_eq!(report.s1_creations, 0);
        assert_eq!(report.s2_creations, 0);
        assert_eq!(report.s2p_creations, 0);
        assert_eq!(report.e_losses, 0);
        assert!(report.ok());
    });
}

/// One synchronous step over a finite block, written independently of the
/// engine: the block loses a radius from each end.
fn brute_step(rule: &LocalRule, cells: &[Sym]) -> Vec<Sym> {
    let w = rule.window_len();
    (0..cells.len() + 1 - w).map(|i| rule.apply(&cells[i..i + w])).collect()
}

/// All restrictions of `f^t` to `[lo, hi]` over every completion of `word`
/// placed at `[0, word.len())`, enumerated outright.
fn brute_images(rule: &LocalRule, word: &[Sym], t: usize, lo: i64, hi: i64) -> BTreeSet<Vec<Sym>> {
    let reach = (rule.radius() * t) as i64;
    let need_lo = (lo - reach).min(0);
    let need_hi = (hi + reach).max(word.len() as i64 - 1);
    let len = (need_hi - need_lo + 1) as usize;
    let k = rule.alphabet().len() as u16;
    let mut fixed: Vec<Option<Sym>> = vec![None; len];
    for (i, &s) in word.iter().enumerate() {
        fixed[(i as i64 - need_lo) as usize] = Some(s);
    }
    let free: Vec<usize> = (0..len).filter(|&i| fixed[i].is_none()).collect();
    let mut digits = vec![0u16; free.len()];
    let mut out = BTreeSet::new();
    loop {
        let mut cells: Vec<Sym> = fixed.iter().map(|c| c.unwrap_or(Sym(0))).collect();
        for (&d, &i) in digits.iter().zip(&free) {
            cells[i] = Sym(d);
        }
        for _ in 0..t {
            cells = brute_step(rule, &cells);
        }
        let base = need_lo + reach;
        out.insert(cells[(lo - base) as usize..=(hi - base) as usize].to_vec());
        let mut i = digits.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < k {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// Checks both exact-image oracles on one (rule, word, t) instance.
/// `widen` additionally tests a window poking past both ends of the word.
fn image_oracles_agree(rule: &LocalRule, word: &[Sym], t: usize, widen: bool) {
    let len = word.len() as i64;
    let cyl = Cylinder::new(word.to_vec(), 0).unwrap();
    let mut windows = vec![(0, len - 1)];
    if widen {
        windows.push((-1, len));
    }
    for (lo, hi) in windows {
        let got = cylinder_image_set(rule, &cyl, t, (lo, hi), 1 << 24).unwrap();
        let want = brute_images(rule, word, t, lo, hi);
        assert_eq!(got, want, "image set over [{lo},{hi}], t={t}, rule {}", rule.name());
    }
    let shrink = 2 * rule.radius() * t;
    if word.len() > shrink {
        let det = determined_image(rule, word, t).unwrap();
        let reach = (rule.radius() * t) as i64;
        let want = brute_images(rule, word, t, reach, len - 1 - reach);
        assert_eq!(want.len(), 1, "the determined window is completion-independent");
        assert_eq!(&det, want.iter().next().unwrap(), "determined image, t={t}");
    } else if t > 0 {
        assert!(determined_image(rule, word, t).is_err(), "short words have no determined cells");
    }
}

fn random_word(rng: &mut ChaCha8Rng, k: u16, len: usize) -> Vec<Sym> {
    (0..len).map(|_| Sym((rng.next_u32() % k as u32) as u16)).collect()
}

fn random_rule(rng: &mut ChaCha8Rng, ab: &Alphabet, radius: usize) -> LocalRule {
    let entries = ab.count_words(2 * radius + 1) as usize;
    let k = ab.len() as u32;
    let table: Vec<Sym> = (0..entries).map(|_| Sym((rng.next_u32() % k) as u16)).collect();
    LocalRule::from_table(ab.clone(), radius, "sampled", table).unwrap()
}

#[test]
fn criterion_5_exact_image_oracles() {
    // The full (rule, word) space is unbounded, so this fixes a seeded,
    // reproducible census: every binary radius-1 rule, plus samples from each
    // larger (alphabet, radius) class, against words through length 8 and
    // times through 3.
    gate(5, "determined and enumerated images match brute force over all completions", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let b = binary();
        let ternary = Alphabet::from_chars("012").unwrap();

        // |A|=2, r=1: all 256 tables, every word through length 2 plus one
        // seeded word per length through 8.
        let mut words2: Vec<Vec<Sym>> = (1..=2).flat_map(|n| b.words(n)).collect();
        for len in 3..=8 {
            words2.push(random_word(&mut rng, 2, len));
        }
        for code in 0..256u32 {
            let table: Vec<Sym> = (0..8).map(|i| Sym(((code >> i) & 1) as u16)).collect();
            let rule = LocalRule::from_table(b.clone(), 1, "elementary", table).unwrap();
            for w in &words2 {
                for t in 0..=3 {
                    image_oracles_agree(&rule, w, t, true);
                }
            }
        }

        // |A|=2, r=2 and |A|=3, r=1: seeded rules and words.
        for (ab, radius, rules, lens) in
            [(&b, 2usize, 32usize, 1..=8usize), (&ternary, 1, 32, 1..=6)]
        {
            for _ in 0..rules {
                let rule = random_rule(&mut rng, ab, radius);
                for len in lens.clone() {
                    let w = random_word(&mut rng, ab.len() as u16, len);
                    for t in 0..=3 {
                        image_oracles_agree(&rule, &w, t, t <= 2);
                    }
                }
            }
        }

        // |A|=3, r=2: the costliest class; windows stay inside the word.
        for _ in 0..10 {
            let rule = random_rule(&mut rng, &ternary, 2);
            for len in 1..=5usize {
                let w = random_word(&mut rng, 3, len);
                for t in 0..=3 {
                    image_oracles_agree(&rule, &w, t, false);
                }
            }
        }
        assert!(start.elapsed() < Duration::from_secs(120), "took {:?}", start.elapsed());
    });
}

#[test]
fn criterion_6_subshift_goldens() {
    gate(6, "transitivity, mixing, periods, chain structure, and the obstruction", || {
        let ab = binary();
        let full = Sft::from_forbidden(ab.clone(), &[]).unwrap();
        assert!(full.is_transitive().unwrap());
        assert!(full.is_mixing().unwrap());
        assert_eq!(full.sigma_period().unwrap(), vec![1]);
        assert_eq!(full.periodic_factor_obstruction().unwrap().verdict, ObstructionVerdict::Clear);

        let golden_mean = Sft::from_forbidden(ab.clone(), &[pw("11")]).unwrap();
        assert!(golden_mean.is_mixing().unwrap());

        let alternating = Sft::from_forbidden(ab.clone(), &[pw("00"), pw("11")]).unwrap();
        assert!(alternating.is_transitive().unwrap());
        assert!(!alternating.is_mixing().unwrap());
        assert_eq!(alternating.sigma_period().unwrap(), vec![2]);
        assert_eq!(
            alternating.periodic_factor_obstruction().unwrap().verdict,
            ObstructionVerdict::Obstructed { p: 2 },
        );
        let report =
            realizability_report(ReportInput::Sft(&alternating), None, &Bounds::default()).unwrap();
        assert!(report.excluded);
        assert!(
            report.exclusions().any(|c| c.contains("cannot be the generic limit set")),
            "exclusion cites the defining phrase"
        );

        // Words over 0*1*: transitive fails, and the order-2 approximation is
        // the first broken one.
        let downhill = Sft::from_forbidden(ab.clone(), &[pw("10")]).unwrap();
        assert!(!downhill.is_transitive().unwrap());
        let sample = downhill.language_sample(4).unwrap();
        let chain = is_chain_transitive(&sample, 4).unwrap();
        assert!(!chain.holds);
        assert_eq!(chain.first_failure, Some(2));

        let fixed_points = Sft::from_forbidden(ab.clone(), &[pw("01"), pw("10")]).unwrap();
        let partition = fixed_points.chain_components(2).unwrap();
        assert_eq!(partition.classes.len(), 2);
        let swap = fixed_points.component_permutation(&builtin(Builtin::Swap), 2).unwrap();
        assert!(swap.is_permutation && swap.is_cyclic, "swap rotates the two components");
        let ident = fixed_points.component_permutation(&builtin(Builtin::Identity), 2).unwrap();
        assert!(ident.is_permutation && !ident.is_cyclic, "identity fixes both components");
    });
}

#[test]
fn criterion_7_forcing_and_enabling_certificates() {
    gate(7, "the minimum rule's forcing word replays and enabling verdicts are stable", || {
        let rule = builtin(Builtin::Min);
        let ab = binary();
        let bounds = Bounds::default();

        let zeros = Sft::from_forbidden(ab.clone(), &[pw("1")]).unwrap();
        let oracle = zeros.language_sample(2).unwrap();
        let seed = Cylinder::new(pw("0"), 0).unwrap();
        let found = search_forcing_word(&rule, &seed, 2, &bounds, &oracle).unwrap();
        let ForcingOutcome::Found { word, threshold, certificate } = &found else {
            panic!("the search finds a word");
        };
        assert_eq!(word.word, pw("00"));
        assert_eq!(word.position, 0);
        assert_eq!(*threshold, 0);
        let Certificate::Forcing(cert) = certificate else { panic!("forcing certificate") };
        assert!(cert.verified_to >= 4);

        // Replay under brute force: every completion of the found word maps
        // its window to the one valid word at every time through 4.
        for t in 0..=4 {
            let images = brute_images(&rule, &word.word, t, word.position, word.position + 1);
            let only: BTreeSet<Vec<Sym>> = [pw("00")].into();
            assert_eq!(images, only, "window at time {t}");
        }
        let again = search_forcing_word(&rule, &seed, 2, &bounds, &oracle).unwrap();
        assert_eq!(found, again, "the search is deterministic");

        let v = Cylinder::new(pw("000"), 0).unwrap();
        let (verdict, cert) = check_enables(&rule, &v, &pw("000"), &bounds).unwrap();
        assert_eq!(verdict, EnablingVerdict::Supported);
        let (verdict2, cert2) = check_enables(&rule, &v, &pw("000"), &bounds).unwrap();
        assert_eq!((verdict, &cert), (verdict2, &cert2), "enabling checks are deterministic");

        let v = Cylinder::new(pw("0"), 0).unwrap();
        let (verdict, cert) = check_enables(&rule, &v, &pw("1"), &bounds).unwrap();
        assert_eq!(verdict, EnablingVerdict::RefutedAtBound);
        let Certificate::Enabling(c) = &cert else { panic!("enabling certificate") };
        assert!(c.refutation.is_some(), "refutations carry their witness context");
    });
}

#[test]
fn criterion_8_classifier_and_report_exclusions() {
    gate(8, "restriction classes come out right and both exclusion mechanisms fire", || {
        let ab = binary();
        let full = Sft::from_forbidden(ab.clone(), &[]).unwrap();
        let cap = 1 << 20;

        let (class, _) = restriction_classifier(&builtin(Builtin::Identity), &full, 4, cap).unwrap();
        assert_eq!(class, Classification::Identity);

        let (class, cert) = restriction_classifier(&builtin(Builtin::Shift), &full, 4, cap).unwrap();
        assert_eq!(class, Classification::Shift { k: 1 });
        let Certificate::Classification(c) = &cert else { panic!("classification certificate") };
        assert_eq!(c.neighborhoods[0].m, 1);
        assert_eq!(c.neighborhoods[0].interval, Some((1, 1)));

        let zeros = Sft::from_forbidden(ab.clone(), &[pw("1")]).unwrap();
        let (class, _) = restriction_classifier(&builtin(Builtin::Min), &zeros, 4, cap).unwrap();
        assert_eq!(class, Classification::Identity, "the minimum rule fixes the zero point");

        let alternating = Sft::from_forbidden(ab.clone(), &[pw("00"), pw("11")]).unwrap();
        let report =
            realizability_report(ReportInput::Sft(&alternating), None, &Bounds::default()).unwrap();
        assert!(report.excluded, "the period-2 factor rules the alternating pair out");

        // Finite sample of 0^a 1^b words paired with the shift rule.
        let mut words = Vec::new();
        for len in 1..=4usize {
            for a in 0..=len {
                let mut w = vec![Sym(0); a];
                w.extend(std::iter::repeat(Sym(1)).take(len - a));
                words.push(w);
            }
        }
        let sample = LanguageSample::from_words(ab, 4, words, Provenance::Exact).unwrap();
        let report = realizability_report(
            ReportInput::Sample(&sample),
            Some(&builtin(Builtin::Shift)),
            &Bounds::default(),
        )
        .unwrap();
        assert!(report.excluded, "a shift acting on a non-chain-transitive language is ruled out");
        let line = report
            .lines
            .iter()
            .find(|l| l.check == "restriction classification")
            .expect("the classification line is present");
        assert!(line.result.contains("shift(1)"), "{}", line.result);
    });
}
