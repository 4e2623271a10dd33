//! glimca: simulate one-dimensional cellular automata and probe the
//! structures their typical trajectories settle into.
//!
//! Every subcommand is deterministic: the same invocation (including any
//! sampling seed) produces byte-identical output. Result lines state whether
//! they rest on exact computation or on a seeded sample, and sampled lines
//! record the seed and horizons they were drawn with.

mod formats;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use formats::{from_core, origin_of, parse_ca, parse_config, parse_sft, parse_tm, read_file, CliError};
use glimca_core::engine::{run, RenderFormat};
use glimca_core::sample::Provenance;
use glimca_core::signal::{compile_signal_ca, verify_geometry};
use glimca_core::{
    check_enables, estimate_generic_language, realizability_report, search_forcing_word,
    Alphabet, AnalysisReport, Bounds, Certificate, Configuration, Cylinder, EnablingVerdict,
    ForcingOutcome, LanguageSample, LocalRule, ReportInput, Sft, Sym,
};

#[derive(Parser)]
#[command(
    name = "glimca",
    version,
    about = "Simulate 1D cellular automata and analyze their long-run behavior"
)]
struct Cli {
    /// Print every tunable bound with its default value and exit.
    #[arg(long)]
    show_defaults: bool,
    #[command(subcommand)]
    cmd: Option<Cmd>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a rule from a start configuration and render the spacetime diagram.
    Sim(SimArgs),
    /// Check a compiled machine's collision events against their predicted
    /// times and coordinates.
    VerifyGeometry(GeometryArgs),
    /// Decide structural properties of a subshift of finite type.
    Sft(SftArgs),
    /// Sample a rule's long-run language and run every realizability check
    /// against it.
    Analyze(AnalyzeArgs),
    /// Search for a word forcing all late images to carry valid windows.
    Forcing(ForcingArgs),
    /// Decide whether a word, under every bounded context, keeps mapping
    /// into a target word at the origin.
    Enables(EnablesArgs),
    /// Compile a machine into its signal-automaton rule file.
    Compile(CompileArgs),
}

#[derive(Args)]
struct SimArgs {
    /// Rule file (.ca).
    #[arg(long)]
    rule: PathBuf,
    /// Start configuration: `cyclic:WORD` or `LEFT^inf (CENTER@OFFSET) RIGHT^inf`.
    #[arg(long)]
    config: String,
    /// Number of steps to run.
    #[arg(long)]
    steps: usize,
    /// Coordinate window `lo..hi` (inclusive). Defaults to one period for
    /// cyclic starts and to the written patch plus its light cone otherwise.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long, value_enum, default_value_t = SimFormat::Text)]
    format: SimFormat,
    /// Write the rendering here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimFormat {
    Text,
    Csv,
    Pgm,
}

#[derive(Args)]
struct GeometryArgs {
    /// Machine file (.tm).
    #[arg(long)]
    machine: PathBuf,
    /// Input word on the read-only tape; defaults to the machine's first
    /// input letter.
    #[arg(long)]
    w: Option<String>,
    /// Number of padding end-marker cells after the input word.
    #[arg(long, default_value_t = 0)]
    m: usize,
    /// Smallest segment size to check.
    #[arg(long, default_value_t = 5)]
    n_min: usize,
    /// Largest segment size to check.
    #[arg(long, default_value_t = 12)]
    n_max: usize,
}

#[derive(Args)]
struct SftArgs {
    /// Subshift file (.sft).
    #[arg(long)]
    file: PathBuf,
    #[arg(long, value_enum)]
    check: SftCheck,
    /// Rule whose action on the chain components is examined
    /// (components check only).
    #[arg(long)]
    rule: Option<PathBuf>,
    /// Word length for the component partition; defaults to the window.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SftCheck {
    Transitive,
    Mixing,
    Period,
    Components,
    Obstruction,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Rule file (.ca).
    #[arg(long)]
    rule: PathBuf,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    bounds: BoundArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Csv,
}

#[derive(Args)]
struct ForcingArgs {
    /// Rule file (.ca).
    #[arg(long)]
    rule: PathBuf,
    /// Word the search starts from and extends.
    #[arg(long)]
    seed: String,
    /// Position of the seed word's first cell.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    at: i64,
    /// Window length whose forbidden words must be pushed out of all late
    /// images.
    #[arg(long)]
    n: usize,
    /// Subshift file providing the exact validity oracle; without it the
    /// rule's own sampled language estimate is used.
    #[arg(long)]
    sft: Option<PathBuf>,
    #[command(flatten)]
    bounds: BoundArgs,
}

#[derive(Args)]
struct EnablesArgs {
    /// Rule file (.ca).
    #[arg(long)]
    rule: PathBuf,
    /// Candidate word.
    #[arg(long)]
    v: String,
    /// Position of the candidate's first cell.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    at: i64,
    /// Target word checked at the origin of every image.
    #[arg(long)]
    s: String,
    #[command(flatten)]
    bounds: BoundArgs,
}

#[derive(Args)]
struct CompileArgs {
    /// Machine file (.tm).
    #[arg(long)]
    machine: PathBuf,
    /// Write the rule file here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// The tunable bounds, each defaulting to the value `--show-defaults` prints.
#[derive(Args)]
struct BoundArgs {
    /// Longest left/right context enumerated around a probed word.
    #[arg(long)]
    context_len: Option<usize>,
    /// Largest time step any check examines.
    #[arg(long)]
    t_max: Option<usize>,
    /// Number of witness times demanded of every context.
    #[arg(long)]
    hits: Option<usize>,
    /// Enumeration cap per exact decision and per search round
    /// (the GLIMCA_BUDGET environment variable overrides the default).
    #[arg(long)]
    branching: Option<u64>,
    /// Random trajectories drawn by the language estimator.
    #[arg(long)]
    samples: Option<usize>,
    /// Steps discarded before the estimator collects windows.
    #[arg(long)]
    burn_in: Option<usize>,
    /// Length of the words the estimator collects.
    #[arg(long)]
    window: Option<usize>,
    /// Period of the random cyclic configurations drawn.
    #[arg(long)]
    period: Option<usize>,
    /// Seed for every randomized procedure.
    #[arg(long)]
    rng_seed: Option<u64>,
}

fn env_budget() -> Result<Option<u64>, CliError> {
    match std::env::var("GLIMCA_BUDGET") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Input(format!("GLIMCA_BUDGET must be an integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

impl BoundArgs {
    fn resolve(&self) -> Result<Bounds, CliError> {
        let mut b = Bounds::default();
        if let Some(cap) = env_budget()? {
            b.branching = cap;
        }
        if let Some(x) = self.context_len {
            b.context_len = x;
        }
        if let Some(x) = self.t_max {
            b.t_max = x;
        }
        if let Some(x) = self.hits {
            b.hits = x;
        }
        if let Some(x) = self.branching {
            b.branching = x;
        }
        if let Some(x) = self.samples {
            b.samples = x;
        }
        if let Some(x) = self.burn_in {
            b.burn_in = x;
        }
        if let Some(x) = self.window {
            b.window = x;
        }
        if let Some(x) = self.period {
            b.period = x;
        }
        if let Some(x) = self.rng_seed {
            b.seed = x;
        }
        Ok(b)
    }
}

fn show_defaults() {
    let b = Bounds::default();
    println!("context-len = {}   # longest left/right context enumerated around a word", b.context_len);
    println!("t-max = {}        # largest time step any check examines", b.t_max);
    println!("hits = {}          # witness times demanded of every context", b.hits);
    println!("branching = {}  # enumeration cap per exact decision (GLIMCA_BUDGET overrides)", b.branching);
    println!("samples = {}    # random trajectories drawn by the estimator", b.samples);
    println!("burn-in = {}      # steps discarded before windows are collected", b.burn_in);
    println!("window = {}        # length of the words the estimator collects", b.window);
    println!("period = {}      # period of the random cyclic configurations", b.period);
    println!("rng-seed = {}      # seed for every randomized procedure", b.seed);
}

fn load_rule(path: &Path) -> Result<LocalRule, CliError> {
    parse_ca(&read_file(path)?, &origin_of(path))
}

fn load_sft(path: &Path) -> Result<Sft, CliError> {
    parse_sft(&read_file(path)?, &origin_of(path))
}

fn write_output(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            std::io::stdout()
                .write_all(bytes)
                .map_err(|e| CliError::Input(format!("stdout: {e}")))
        }
    }
}

fn parse_window_flag(s: &str) -> Result<(i64, i64), CliError> {
    let err = || CliError::Input(format!("window must look like `lo..hi`, got {s:?}"));
    let (lo, hi) = s.split_once("..").ok_or_else(err)?;
    Ok((lo.trim().parse().map_err(|_| err())?, hi.trim().parse().map_err(|_| err())?))
}

/// How a result line announces the data it rests on.
fn data_tag(exact: bool, prov: &Provenance) -> String {
    match (exact, prov) {
        (true, _) | (_, Provenance::Exact) => "[exact]".to_string(),
        (false, Provenance::Sampled { seed, samples, period, burn_in, t_max }) => format!(
            "[sampled seed={seed} samples={samples} period={period} burn-in={burn_in} t-max={t_max}]"
        ),
    }
}

fn cmd_sim(args: &SimArgs) -> Result<u8, CliError> {
    let rule = load_rule(&args.rule)?;
    let config = parse_config(&args.config, rule.alphabet())?;
    let window = match &args.window {
        Some(w) => parse_window_flag(w)?,
        None => match (&config, config.span()) {
            (Configuration::Cyclic { .. }, Some(span)) => span,
            (_, Some((lo, hi))) => {
                let cone = (rule.radius() * args.steps) as i64;
                (lo - cone, hi + cone)
            }
            (_, None) => {
                return Err(CliError::Input(
                    "configuration has no written cells; pass --window lo..hi".to_string(),
                ))
            }
        },
    };
    let cap = env_budget()?.unwrap_or(Bounds::default().branching);
    let diagram = run(&rule, &config, args.steps, window, cap).map_err(from_core)?;
    let format = match args.format {
        SimFormat::Text => RenderFormat::Text,
        SimFormat::Csv => RenderFormat::Csv,
        SimFormat::Pgm => RenderFormat::Pgm,
    };
    write_output(args.out.as_deref(), &diagram.render(format))?;
    Ok(0)
}

fn cmd_verify_geometry(args: &GeometryArgs) -> Result<u8, CliError> {
    let machine = parse_tm(&read_file(&args.machine)?, &origin_of(&args.machine))?;
    let w = match &args.w {
        Some(w) => w.clone(),
        None => machine
            .ro_alphabet()
            .names()
            .iter()
            .find(|n| *n != "#" && *n != "$")
            .cloned()
            .ok_or_else(|| CliError::Input("machine has no input letters".to_string()))?,
    };
    if args.n_min > args.n_max {
        return Err(CliError::Input(format!(
            "empty segment range {}..{}",
            args.n_min, args.n_max
        )));
    }
    let mut mismatched = false;
    let mut errored = false;
    for n in args.n_min..=args.n_max {
        match verify_geometry(&machine, &w, args.m, n) {
            Ok(rows) => {
                for (event, ok) in rows {
                    let verdict = if ok { "ok" } else { "MISMATCH" };
                    mismatched |= !ok;
                    println!("n={n} t={} c={} {}", event.time, event.coordinate, verdict);
                }
            }
            Err(e) => {
                errored = true;
                println!("n={n} error: {e}");
            }
        }
    }
    Ok(if errored {
        2
    } else if mismatched {
        1
    } else {
        0
    })
}

fn cmd_sft(args: &SftArgs) -> Result<u8, CliError> {
    let sft = load_sft(&args.file)?;
    match args.check {
        SftCheck::Transitive => {
            let v = sft.is_transitive().map_err(from_core)?;
            println!("{v}");
            Ok(if v { 0 } else { 1 })
        }
        SftCheck::Mixing => {
            let v = sft.is_mixing().map_err(from_core)?;
            println!("{v}");
            Ok(if v { 0 } else { 1 })
        }
        SftCheck::Period => {
            let periods = sft.sigma_period().map_err(from_core)?;
            let rendered: Vec<String> = periods.iter().map(|p| p.to_string()).collect();
            println!("{}", rendered.join(" "));
            Ok(0)
        }
        SftCheck::Components => {
            let n = args.n.unwrap_or(sft.window()).max(1);
            let partition = sft.chain_components(n).map_err(from_core)?;
            println!("components n={n}: {}", partition.classes.len());
            let ab = sft.alphabet();
            for (i, class) in partition.classes.iter().enumerate() {
                let words: Vec<String> = class.iter().map(|w| ab.format_word(w)).collect();
                println!("component {i}: {}", words.join(" "));
            }
            if let Some(rule_path) = &args.rule {
                let rule = load_rule(rule_path)?;
                let map = sft.component_permutation(&rule, n).map_err(from_core)?;
                for (i, img) in map.image_class.iter().enumerate() {
                    match img {
                        Some(j) => println!("rule maps component {i} -> {j}"),
                        None => println!("rule maps component {i} -> (no single component)"),
                    }
                }
                let k = map.partition.classes.len();
                if map.is_permutation && map.is_cyclic && k > 1 {
                    println!("rule rotates the components cyclically (order {k})");
                } else if map.is_permutation {
                    println!("rule permutes the components (not a single cycle)");
                } else {
                    println!("rule does not permute the components");
                }
            }
            Ok(0)
        }
        SftCheck::Obstruction => {
            let o = sft.periodic_factor_obstruction().map_err(from_core)?;
            match o.verdict {
                glimca_core::subshift::ObstructionVerdict::Obstructed { p } => {
                    println!(
                        "obstructed p={p}: cannot be the generic limit set (periodic-factor obstruction)"
                    );
                    Ok(1)
                }
                glimca_core::subshift::ObstructionVerdict::Clear => {
                    println!("clear");
                    Ok(0)
                }
                glimca_core::subshift::ObstructionVerdict::Inconclusive => {
                    println!("inconclusive (component moduli {:?})", o.component_moduli);
                    Ok(0)
                }
            }
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render_analysis_text(
    rule: &LocalRule,
    sample: &LanguageSample,
    report: &AnalysisReport,
) -> String {
    let ab = rule.alphabet();
    let tag = data_tag(false, sample.provenance());
    let mut out = format!(
        "rule: {} (alphabet: {}, radius {})\n",
        rule.name(),
        ab.names().join(" "),
        rule.radius()
    );
    out.push_str(&format!("language {tag}\n"));
    for n in 1..=sample.max_len() {
        let words = sample.words(n).expect("length within the sampled range");
        let rendered: Vec<String> = words.iter().map(|w| ab.format_word(w)).collect();
        out.push_str(&format!("  n={n}: {}\n", rendered.join(" ")));
    }
    out.push_str("checks\n");
    for line in &report.lines {
        let tag = data_tag(line.exact, sample.provenance());
        out.push_str(&format!("  {}: {} {tag}\n", line.check, line.result));
        if let Some(c) = &line.consequence {
            out.push_str(&format!("    exclusion: {c}\n"));
        }
    }
    if report.excluded {
        out.push_str("verdict: excluded\n");
    } else {
        out.push_str("verdict: no exclusions\n");
    }
    out
}

fn render_analysis_csv(
    rule: &LocalRule,
    sample: &LanguageSample,
    report: &AnalysisReport,
) -> String {
    let ab = rule.alphabet();
    let mut out = String::from("kind,key,value\n");
    out.push_str(&format!("meta,rule,{}\n", csv_field(rule.name())));
    out.push_str(&format!(
        "meta,data,{}\n",
        csv_field(&data_tag(false, sample.provenance()))
    ));
    for n in 1..=sample.max_len() {
        let words = sample.words(n).expect("length within the sampled range");
        for w in words {
            out.push_str(&format!("word,{n},{}\n", csv_field(&ab.format_word(w))));
        }
    }
    for line in &report.lines {
        out.push_str(&format!(
            "check,{},{}\n",
            csv_field(&line.check),
            csv_field(&line.result)
        ));
        if let Some(c) = &line.consequence {
            out.push_str(&format!("exclusion,{},{}\n", csv_field(&line.check), csv_field(c)));
        }
    }
    let verdict = if report.excluded { "excluded" } else { "no exclusions" };
    out.push_str(&format!("verdict,,{verdict}\n"));
    out
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<u8, CliError> {
    let rule = load_rule(&args.rule)?;
    let bounds = args.bounds.resolve()?;
    let sample = estimate_generic_language(&rule, &bounds).map_err(from_core)?;
    let report = realizability_report(ReportInput::Sample(&sample), Some(&rule), &bounds)
        .map_err(from_core)?;
    let rendered = match args.format {
        ReportFormat::Text => render_analysis_text(&rule, &sample, &report),
        ReportFormat::Csv => render_analysis_csv(&rule, &sample, &report),
    };
    write_output(args.out.as_deref(), rendered.as_bytes())?;
    Ok(if report.excluded { 1 } else { 0 })
}

fn quoted(ab: &Alphabet, w: &[Sym]) -> String {
    format!("\"{}\"", ab.format_word(w))
}

fn cmd_forcing(args: &ForcingArgs) -> Result<u8, CliError> {
    let rule = load_rule(&args.rule)?;
    let bounds = args.bounds.resolve()?;
    let ab = rule.alphabet().clone();
    let word = ab.parse_word(&args.seed).map_err(from_core)?;
    let seed = Cylinder::new(word, args.at).map_err(from_core)?;
    let oracle = match &args.sft {
        Some(path) => {
            let sft = load_sft(path)?;
            sft.language_sample(args.n).map_err(from_core)?
        }
        None => {
            let mut est = bounds.clone();
            est.window = est.window.max(args.n);
            estimate_generic_language(&rule, &est).map_err(from_core)?
        }
    };
    let tag = data_tag(false, oracle.provenance());
    match search_forcing_word(&rule, &seed, args.n, &bounds, &oracle).map_err(from_core)? {
        ForcingOutcome::Found { word, threshold, certificate } => {
            let Certificate::Forcing(cert) = &certificate else {
                unreachable!("forcing search returns forcing certificates");
            };
            println!(
                "forcing word: {} @ {} (T={threshold}) {tag} horizon t={}, verified through t={}",
                ab.format_word(&word.word),
                word.position,
                cert.horizon,
                cert.verified_to
            );
            println!("kills");
            for k in &cert.kills {
                println!(
                    "  {}: left={} right={} empty from t={} through t={}",
                    ab.format_word(&k.forbidden),
                    quoted(&ab, &k.left),
                    quoted(&ab, &k.right),
                    k.threshold,
                    k.verified_to
                );
            }
            Ok(0)
        }
        ForcingOutcome::NotFound { forbidden } => {
            println!(
                "no forcing word within bounds: {} resisted every extension {tag}",
                ab.format_word(&forbidden)
            );
            Ok(1)
        }
    }
}

fn cmd_enables(args: &EnablesArgs) -> Result<u8, CliError> {
    let rule = load_rule(&args.rule)?;
    let bounds = args.bounds.resolve()?;
    let ab = rule.alphabet().clone();
    let v_word = ab.parse_word(&args.v).map_err(from_core)?;
    let s_word = ab.parse_word(&args.s).map_err(from_core)?;
    let v = Cylinder::new(v_word, args.at).map_err(from_core)?;
    let (verdict, certificate) = check_enables(&rule, &v, &s_word, &bounds).map_err(from_core)?;
    let Certificate::Enabling(cert) = &certificate else {
        unreachable!("enabling checks return enabling certificates");
    };
    match verdict {
        EnablingVerdict::Supported => {
            println!(
                "supported [exact] contexts to len {}, {} hits each by t={}",
                cert.context_len, cert.hits_required, cert.horizon
            );
            println!("contexts checked: {}", cert.evidence.len());
            Ok(0)
        }
        EnablingVerdict::RefutedAtBound => {
            let r = cert.refutation.as_ref().expect("refuted verdicts carry a witness");
            println!(
                "refuted at bound [exact] contexts to len {}, horizon t={}",
                cert.context_len, cert.horizon
            );
            let hits: Vec<String> = r.hit_times.iter().map(|t| t.to_string()).collect();
            println!(
                "witness: left={} right={} hits=[{}] empty from t={} through t={}",
                quoted(&ab, &r.left),
                quoted(&ab, &r.right),
                hits.join(" "),
                r.empty_from,
                r.verified_to
            );
            println!("contexts cleared before the witness: {}", cert.evidence.len());
            Ok(1)
        }
    }
}

fn cmd_compile(args: &CompileArgs) -> Result<u8, CliError> {
    let machine = parse_tm(&read_file(&args.machine)?, &origin_of(&args.machine))?;
    compile_signal_ca(&machine).map_err(from_core)?;
    write_output(args.out.as_deref(), formats::emit_signal_ca(&machine).as_bytes())?;
    Ok(0)
}

fn dispatch(cli: &Cli) -> Result<u8, CliError> {
    if cli.show_defaults {
        show_defaults();
        return Ok(0);
    }
    match &cli.cmd {
        Some(Cmd::Sim(a)) => cmd_sim(a),
        Some(Cmd::VerifyGeometry(a)) => cmd_verify_geometry(a),
        Some(Cmd::Sft(a)) => cmd_sft(a),
        Some(Cmd::Analyze(a)) => cmd_analyze(a),
        Some(Cmd::Forcing(a)) => cmd_forcing(a),
        Some(Cmd::Enables(a)) => cmd_enables(a),
        Some(Cmd::Compile(a)) => cmd_compile(a),
        None => Err(CliError::Input(
            "give a subcommand or --show-defaults (see --help)".to_string(),
        )),
    }
}

fn main() -> ExitCode {
    // Die quietly when a downstream pipe closes (`glimca sim ... | head`),
    // like any other filter, instead of panicking on the failed write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
