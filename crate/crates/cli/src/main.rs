//! `noetic`: validate domains, run scripts, run detection experiments and
//! property checks, and compare the ranked engine with the baseline.
//!
//! Exit codes: 0 success, 1 a check or validation failed, 2 usage, I/O or
//! parse error.

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use noetic_core::dsl::{parse_domain, validate_domain, DomainSpec};
use noetic_core::engine::{EngineOptions, PenaltyMode};
use noetic_core::formula::Formula;
use noetic_core::sim::{
    accuracy_sweep, convergence_experiment, literal_probes, parse_script, run_script, Directive,
    ExperimentConfig, RunOptions, ScriptStep, SensitivityScope,
};
use noetic_core::theorems::{self, find_revision_action, CheckReport};

#[derive(Parser)]
#[command(name = "noetic", version, about = "Belief change with noisy sensing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a domain file for static problems.
    Validate {
        domain: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a script and print the step-by-step trace.
    Run(RunArgs),
    /// Repeat a sensing sequence through the noisy channel and measure detection.
    Experiment(ExperimentArgs),
    /// Run the bounded property checks.
    Check(CheckArgs),
    /// Run a script through both engines and show them side by side.
    Compare(RunArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Penalty {
    Axiom,
    Compat,
}

#[derive(Args)]
struct EngineArgs {
    /// Rank penalty for situations contradicted by a sensing result.
    #[arg(long, value_enum, default_value_t = Penalty::Axiom)]
    penalty_mode: Penalty,
    /// Sensing accuracy override, `ACTION=P` or `all=P`. Repeatable or comma separated.
    #[arg(long, value_delimiter = ',')]
    accuracy: Vec<String>,
}

#[derive(Args)]
struct OutputArgs {
    /// Format written to stdout.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Also write JSON to this file.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Also write CSV to this file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    domain: PathBuf,
    /// Script file (`do A` / `sense A [accurate|flip|obs=0|obs=1]` per line).
    #[arg(long, conflicts_with = "seq")]
    script: Option<PathBuf>,
    /// Comma-separated actions, sensing drawn from the channel. Defaults to the domain's `seq`.
    #[arg(long, value_delimiter = ',')]
    seq: Vec<String>,
    #[arg(long, env = "NOETIC_SEED")]
    seed: Option<u64>,
    /// Record the baseline engine too (always on for `compare`).
    #[arg(long)]
    compare: bool,
    /// Formula whose belief status is recorded at each step. Defaults to every literal.
    #[arg(long)]
    probe: Vec<String>,
    #[command(flatten)]
    engine: EngineArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ExperimentArgs {
    domain: PathBuf,
    /// Comma-separated sequence to repeat. Defaults to the domain's `seq`.
    #[arg(long, value_delimiter = ',')]
    seq: Vec<String>,
    #[arg(long, default_value_t = 10_000)]
    cycles: usize,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, env = "NOETIC_SEED")]
    seed: Option<u64>,
    /// Run once per accuracy, applied to every sensing action.
    #[arg(long, value_delimiter = ',')]
    sweep: Vec<f64>,
    /// Flip the first K sensing results of each trial and keep the rest accurate.
    #[arg(long)]
    forced_flips: Option<usize>,
    /// Domain formula whose belief is compared with its truth at each cycle end.
    #[arg(long)]
    probe: Vec<String>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    engine: EngineArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    All,
    Subsumption,
    Revision,
    Introspection,
    ErrorAwareness,
    Structure,
    Sensitivity,
}

#[derive(Args)]
struct CheckArgs {
    domain: PathBuf,
    #[arg(long, value_enum, default_value_t = Which::All)]
    theorem: Which,
    /// Longest script enumerated by the exhaustive checks.
    #[arg(long, default_value_t = 4)]
    max_len: usize,
    /// Random scripts sampled by the introspection check.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Seed for sampled scripts.
    #[arg(long, env = "NOETIC_SEED", default_value_t = 0)]
    seed: u64,
    /// Sensing action for the revision checks (with --formula).
    #[arg(long, requires = "formula")]
    action: Option<String>,
    /// Formula sensed by --action. Without both, every literal with a
    /// matching sensing action is checked.
    #[arg(long, requires = "action")]
    formula: Option<String>,
    /// Probe formula. Defaults to literals, literal pairs and initial states.
    #[arg(long)]
    probe: Vec<String>,
    /// Sequence for the sensitivity check. Defaults to the domain's `seq`.
    #[arg(long, value_delimiter = ',')]
    seq: Vec<String>,
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    engine: EngineArgs,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` when a validation or check failed.
fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Validate { domain, format } => validate(&domain, format),
        Command::Run(args) => run(args, false),
        Command::Compare(args) => run(args, true),
        Command::Experiment(args) => experiment(args),
        Command::Check(args) => check(args),
    }
}

fn load_domain(path: &Path) -> Result<DomainSpec> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_domain(&text).map_err(|e| anyhow!("{}:{e}", path.display()))
}

fn tuned_domain(path: &Path, engine: &EngineArgs) -> Result<DomainSpec> {
    let spec = load_domain(path)?;
    let mut overrides = Vec::new();
    for item in &engine.accuracy {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("--accuracy expects ACTION=P, got `{item}`"))?;
        let value: f64 = value
            .parse()
            .with_context(|| format!("--accuracy {item}: not a number"))?;
        overrides.push((name, value));
    }
    spec.with_accuracies(overrides)
        .with_context(|| format!("{}: --accuracy", path.display()))
}

fn engine_options(args: &EngineArgs) -> EngineOptions {
    EngineOptions::with_penalty(match args.penalty_mode {
        Penalty::Axiom => PenaltyMode::Axiom,
        Penalty::Compat => PenaltyMode::Compat,
    })
}

fn probes(spec: &DomainSpec, texts: &[String]) -> Result<Option<Vec<(String, Formula)>>> {
    if texts.is_empty() {
        return Ok(None);
    }
    texts
        .iter()
        .map(|t| {
            let f = spec.formula(t).map_err(|e| anyhow!("--probe `{t}`:{e}"))?;
            Ok((t.clone(), f))
        })
        .collect::<Result<_>>()
        .map(Some)
}

fn sequence(spec: &DomainSpec, given: &[String], path: &Path) -> Result<Vec<String>> {
    let seq = if given.is_empty() {
        spec.seq.clone().ok_or_else(|| {
            anyhow!(
                "{}: no --seq given and the domain declares none",
                path.display()
            )
        })?
    } else {
        given.to_vec()
    };
    for name in &seq {
        if spec.action(name).is_none() {
            bail!("{}: unknown action `{name}` in sequence", path.display());
        }
    }
    Ok(seq)
}

fn require_seed(seed: Option<u64>) -> Result<u64> {
    seed.ok_or_else(|| anyhow!("a seed is required: pass --seed or set NOETIC_SEED"))
}

fn configure_jobs(jobs: Option<usize>) -> Result<()> {
    if let Some(n) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot configure worker threads")?;
    }
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn emit(
    output: &OutputArgs,
    text: String,
    json: String,
    csv: impl Fn() -> Result<String>,
) -> Result<()> {
    if let Some(path) = &output.json {
        write_file(path, &json)?;
    }
    if let Some(path) = &output.csv {
        write_file(path, &csv()?)?;
    }
    match output.format {
        Format::Text => print!("{text}"),
        Format::Json => print!("{json}"),
        Format::Csv => print!("{}", csv()?),
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn validate(path: &Path, format: Format) -> Result<bool> {
    let spec = load_domain(path)?;
    let report = validate_domain(&spec);
    match format {
        Format::Json => print!("{}", to_json(&report)?),
        Format::Csv => print!("{}", render::validation_csv(&report)?),
        Format::Text => print!("{}", render::validation_text(path, &report)),
    }
    Ok(report.is_valid())
}

fn run(args: RunArgs, side_by_side: bool) -> Result<bool> {
    let spec = tuned_domain(&args.domain, &args.engine)?;
    let seed = require_seed(args.seed)?;
    let script: Vec<ScriptStep> = match &args.script {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            parse_script(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?
        }
        None => sequence(&spec, &args.seq, &args.domain)?
            .into_iter()
            .map(|a| ScriptStep::new(a, Directive::Channel))
            .collect(),
    };
    let options = RunOptions {
        engine: engine_options(&args.engine),
        compare: args.compare || side_by_side,
        probes: probes(&spec, &args.probe)?.unwrap_or_else(|| literal_probes(&spec)),
    };
    let trace = run_script(&spec, &script, seed, &options)?;
    let text = if side_by_side {
        render::compare_text(&trace)
    } else {
        render::run_text(&trace)
    };
    emit(&args.output, text, to_json(&trace)?, || {
        render::run_csv(&trace)
    })?;
    Ok(true)
}

fn experiment(args: ExperimentArgs) -> Result<bool> {
    configure_jobs(args.jobs)?;
    let spec = tuned_domain(&args.domain, &args.engine)?;
    let seed = require_seed(args.seed)?;
    let seq = sequence(&spec, &args.seq, &args.domain)?;
    let mut config = ExperimentConfig::new(seq, args.cycles, seed);
    config.trials = args.trials;
    config.engine = engine_options(&args.engine);
    config.forced_flips = args.forced_flips;
    config.probes = probes(&spec, &args.probe)?.unwrap_or_default();

    if args.sweep.is_empty() {
        let stats = convergence_experiment(&spec, &config)?;
        if !stats.sensing_sensitive {
            eprintln!("warning: the sequence does not single out the actual situation");
        }
        emit(
            &args.output,
            render::experiment_text(&stats),
            to_json(&stats)?,
            || render::experiment_csv(&stats),
        )?;
    } else {
        let sweep = accuracy_sweep(&spec, &args.sweep, &config)?;
        emit(
            &args.output,
            render::sweep_text(&sweep),
            to_json(&sweep)?,
            || render::sweep_csv(&sweep),
        )?;
    }
    Ok(true)
}

fn check(args: CheckArgs) -> Result<bool> {
    configure_jobs(args.jobs)?;
    let spec = tuned_domain(&args.domain, &args.engine)?;
    let engine = engine_options(&args.engine);
    let probe_set = probes(&spec, &args.probe)?.unwrap_or_else(|| theorems::default_probes(&spec));
    let wants = |w: Which| args.theorem == Which::All || args.theorem == w;

    // (action, formula) pairs for the revision-based checks.
    let targets: Vec<(String, Formula)> = match (&args.action, &args.formula) {
        (Some(a), Some(f)) => {
            let formula = spec
                .formula(f)
                .map_err(|e| anyhow!("--formula `{f}`:{e}"))?;
            vec![(a.clone(), formula)]
        }
        _ => literal_probes(&spec)
            .into_iter()
            .filter_map(|(_, f)| find_revision_action(&spec, &f).map(|a| (a.name.clone(), f)))
            .collect(),
    };

    let mut reports: Vec<CheckReport> = Vec::new();
    if wants(Which::Structure) {
        reports.push(theorems::check_accessibility_structure(
            &spec,
            args.max_len,
            engine,
        )?);
    }
    if wants(Which::Subsumption) {
        reports.push(theorems::check_subsumption(
            &spec,
            args.max_len,
            &probe_set,
            engine,
        )?);
    }
    if wants(Which::Revision) || wants(Which::ErrorAwareness) {
        if targets.is_empty() {
            eprintln!("note: no sensing action senses exactly a literal; revision checks skipped");
        }
        for (action, f) in &targets {
            if wants(Which::Revision) {
                reports.push(theorems::check_revision(
                    &spec,
                    action,
                    f,
                    args.max_len,
                    engine,
                )?);
            }
            if wants(Which::ErrorAwareness) {
                reports.push(theorems::check_error_awareness(
                    &spec,
                    action,
                    f,
                    args.max_len,
                    engine,
                )?);
            }
        }
    }
    if wants(Which::Introspection) {
        reports.push(theorems::check_introspection(
            &spec,
            args.samples,
            args.max_len.max(1) * 2,
            args.seed,
            &probe_set,
            engine,
        )?);
    }
    if wants(Which::Sensitivity) {
        match sequence(&spec, &args.seq, &args.domain) {
            Ok(seq) => reports.push(theorems::check_sensitivity(
                &spec,
                &seq,
                SensitivityScope::AllValuations,
            )?),
            Err(e) if args.theorem == Which::Sensitivity => return Err(e),
            Err(_) => eprintln!("note: no sequence declared; sensitivity check skipped"),
        }
    }

    let passed = reports.iter().all(|r| r.passed);
    emit(
        &args.output,
        reports.iter().map(|r| r.to_string()).collect(),
        to_json(&reports)?,
        || render::checks_csv(&reports),
    )?;
    Ok(passed)
}
