//! `rrbreak` command-line interface.
//!
//! Exit codes: 0 on success, 1 for usage or input errors, 2 when a
//! well-formed request cannot be carried out (exhaustive search over the
//! variable cap, no embedding found).

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use rrbreak::embedding::{embedding_stats, find_embedding_with, EmbedParams};
use rrbreak::experiment::{
    self, run_embedding_survey, run_experiment1, run_experiment2, ExperimentConfig,
};
use rrbreak::penalty::{feasibility_experiment, stats_csv, weak_sampler};
use rrbreak::qubo::{
    build_qubo, decode, qubo_from_json, qubo_from_text, qubo_to_json, qubo_to_text, source_graph,
};
use rrbreak::schedule::{
    assignment_to_csv, count_breaks, timetable_from_csv, timetable_to_csv, TimetableDoc,
};
use rrbreak::{AnnealConfig, Kind, Qubo, Solver, Timetable, Topology};

const EXIT_USAGE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;

#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Infeasible(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<rrbreak::Error>() {
            Some(inner) if inner.is_infeasible() => Failure::Infeasible(e),
            _ => Failure::Usage(e),
        }
    }
}

impl From<rrbreak::Error> for Failure {
    fn from(e: rrbreak::Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

type CliResult<T = ()> = Result<T, Failure>;

#[derive(Parser, Debug)]
#[command(
    name = "rrbreak",
    version,
    about = "Break minimization for round-robin timetables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random double round-robin timetable.
    Generate(GenerateArgs),
    /// Build the break-minimization QUBO of a timetable.
    Build(BuildArgs),
    /// Sample a QUBO (or a timetable's QUBO) with one of the solvers.
    Solve(SolveArgs),
    /// Minor-embed a QUBO's source graph into a hardware graph.
    Embed(EmbedArgs),
    /// Sample the permutation-matrix penalty model and report feasibility.
    Feasibility(FeasibilityArgs),
    /// Run an experiment and print its table.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Subcommand, Debug)]
enum BenchCommand {
    /// Break counts and run time per solver and size.
    Exp1(Exp1Args),
    /// Time for a chaser solver to match a reference solver's result.
    Exp2(Exp2Args),
    /// Source-graph sizes and qubit usage per size.
    Survey(SurveyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum KindArg {
    Mdrrt,
    Drrt,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Kind {
        match k {
            KindArg::Mdrrt => Kind::Mdrrt,
            KindArg::Drrt => Kind::Drrt,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SolverArg {
    Exhaustive,
    Sa,
    Local,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum QuboFormat {
    Json,
    Txt,
}

#[derive(Args, Debug)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Output {
    fn emit(&self, text: &str) -> CliResult {
        match &self.out {
            Some(path) => {
                fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .context("writing to stdout")?;
            }
        }
        Ok(())
    }
}

#[derive(Args, Debug)]
struct SamplerArgs {
    #[arg(long, value_enum, default_value = "sa")]
    solver: SolverArg,
    /// Annealing reads, or local-search restarts.
    #[arg(long, default_value_t = 1000)]
    reads: usize,
    #[arg(long, default_value_t = 100)]
    sweeps: usize,
}

impl SamplerArgs {
    fn solver(&self, kind: SolverArg) -> Solver {
        match kind {
            SolverArg::Exhaustive => Solver::Exhaustive,
            SolverArg::Sa => Solver::Annealing(AnnealConfig {
                reads: self.reads,
                sweeps: self.sweeps,
                ..Default::default()
            }),
            SolverArg::Local => Solver::LocalSearch {
                restarts: self.reads,
            },
        }
    }
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    teams: usize,
    #[arg(long, value_enum, default_value = "mdrrt")]
    kind: KindArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: TableFormat,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct BuildArgs {
    /// Timetable as JSON, or CSV of 1-based opponents (needs `--kind`).
    input: PathBuf,
    /// Kind of a CSV timetable.
    #[arg(long, value_enum, default_value = "mdrrt")]
    kind: KindArg,
    #[arg(long, value_enum, default_value = "json")]
    format: QuboFormat,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// QUBO file (JSON or text) or timetable JSON.
    input: PathBuf,
    #[command(flatten)]
    sampler: SamplerArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: TableFormat,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct EmbedArgs {
    /// QUBO file (JSON or text) or timetable JSON.
    input: PathBuf,
    #[arg(long, default_value = "pegasus:16")]
    target: Topology,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write embedding statistics as JSON to this file.
    #[arg(long)]
    stats: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct FeasibilityArgs {
    /// Permutation dimensions to sample.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    reads: usize,
    /// Sweeps per read; the default weak schedule uses 2.
    #[arg(long)]
    sweeps: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Team counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "4,6,8")]
    teams: Vec<usize>,
    #[arg(long, value_enum, default_value = "mdrrt")]
    kind: KindArg,
    #[arg(long, default_value_t = 5)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 300.0)]
    budget_secs: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
    /// Leave wall-clock columns out of CSV tables.
    #[arg(long)]
    no_timing: bool,
    #[command(flatten)]
    output: Output,
}

impl ExperimentArgs {
    fn config(&self, solvers: Vec<Solver>) -> CliResult<ExperimentConfig> {
        if !(self.budget_secs.is_finite() && self.budget_secs > 0.0) {
            return Err(Failure::Usage(anyhow!("--budget-secs must be positive")));
        }
        let cfg = ExperimentConfig {
            team_sizes: self.teams.clone(),
            instances_per_size: self.instances,
            kind: self.kind.into(),
            solvers,
            master_seed: self.seed,
            budget: Duration::from_secs_f64(self.budget_secs),
            ..Default::default()
        };
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct Exp1Args {
    #[command(flatten)]
    common: ExperimentArgs,
    /// Solvers to compare; repeat or comma separate.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "sa")]
    solver: Vec<SolverArg>,
    #[command(flatten)]
    sampler: Exp1Sampler,
}

#[derive(Args, Debug)]
struct Exp1Sampler {
    /// Annealing reads, or local-search restarts.
    #[arg(long, default_value_t = 1000)]
    reads: usize,
    #[arg(long, default_value_t = 100)]
    sweeps: usize,
}

#[derive(Args, Debug)]
struct Exp2Args {
    #[command(flatten)]
    common: ExperimentArgs,
    /// Solver whose result sets the target.
    #[arg(long, value_enum, default_value = "sa")]
    reference: SolverArg,
    /// Solver that chases the target.
    #[command(flatten)]
    sampler: SamplerArgs,
}

#[derive(Args, Debug)]
struct SurveyArgs {
    #[command(flatten)]
    common: ExperimentArgs,
    #[arg(long, default_value = "pegasus:16")]
    target: Topology,
}

fn read(path: &Path) -> CliResult<String> {
    Ok(fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)
}

fn parse_timetable(text: &str, kind: Kind) -> CliResult<Timetable> {
    if text.trim_start().starts_with('{') {
        let (tt, _) = TimetableDoc::from_json(text)?.into_parts()?;
        Ok(tt)
    } else {
        Ok(timetable_from_csv(kind, text)?)
    }
}

/// A QUBO read from disk, with its timetable when the input was one.
fn load_model(path: &Path) -> CliResult<(Qubo, Option<rrbreak::VariableMap>)> {
    let text = read(path)?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let value: serde_json::Value = serde_json::from_str(&text).context("parsing JSON input")?;
        if value.get("opponents").is_some() {
            let (tt, _) = TimetableDoc::from_json(&text)?.into_parts()?;
            let (q, vm) = build_qubo(&tt)?;
            return Ok((q, Some(vm)));
        }
        return Ok((qubo_from_json(&text)?, None));
    }
    Ok((qubo_from_text(&text)?, None))
}

fn generate(a: &GenerateArgs) -> CliResult {
    let tt = experiment::instance(a.kind.into(), a.teams, a.seed, 0)?;
    let text = match a.format {
        TableFormat::Json => TimetableDoc::from_timetable(&tt).to_json()? + "\n",
        TableFormat::Csv => timetable_to_csv(&tt)?,
    };
    a.output.emit(&text)
}

fn build(a: &BuildArgs) -> CliResult {
    let tt = parse_timetable(&read(&a.input)?, a.kind.into())?;
    let (q, _) = build_qubo(&tt)?;
    let text = match a.format {
        QuboFormat::Json => qubo_to_json(&q)? + "\n",
        QuboFormat::Txt => qubo_to_text(&q),
    };
    a.output.emit(&text)
}

fn solve(a: &SolveArgs) -> CliResult {
    let (q, vm) = load_model(&a.input)?;
    let set = a.sampler.solver(a.sampler.solver).sample(&q, a.seed)?;
    let text = match a.format {
        TableFormat::Csv => set.to_csv()?,
        TableFormat::Json => {
            let mut doc = serde_json::to_value(&set).context("serializing samples")?;
            if let (Some(vm), Some(best)) = (&vm, set.best()) {
                let ha = decode(&best.state, vm)?;
                doc["breaks"] = count_breaks(&ha).into();
                doc["assignment"] = serde_json::to_value(TimetableDoc::from_assignment(&ha))
                    .context("serializing assignment")?;
            }
            serde_json::to_string_pretty(&doc).context("serializing samples")? + "\n"
        }
    };
    if a.format == TableFormat::Csv {
        if let (Some(vm), Some(best)) = (&vm, set.best()) {
            let ha = decode(&best.state, vm)?;
            eprintln!("breaks: {}", count_breaks(&ha));
            eprint!("{}", assignment_to_csv(&ha)?);
        }
    }
    a.output.emit(&text)
}

fn embed(a: &EmbedArgs) -> CliResult {
    let (q, _) = load_model(&a.input)?;
    let hw = a.target.build()?;
    let src = source_graph(&q);
    let emb = find_embedding_with(&src, &hw, a.seed, &EmbedParams::default()).ok_or_else(|| {
        Failure::Infeasible(anyhow!(
            "no embedding of {} nodes / {} edges found in {}",
            src.num_nodes,
            src.num_edges(),
            a.target
        ))
    })?;
    let stats = embedding_stats(&src, &emb);
    let stats_json = serde_json::to_string_pretty(&stats).context("serializing stats")? + "\n";
    match &a.stats {
        Some(path) => {
            fs::write(path, &stats_json).with_context(|| format!("writing {}", path.display()))?
        }
        None => eprint!("{stats_json}"),
    }
    a.output.emit(&(emb.to_json()? + "\n"))
}

fn feasibility(a: &FeasibilityArgs) -> CliResult {
    let mut cfg = weak_sampler(a.seed);
    if let Some(s) = a.sweeps {
        cfg.sweeps = s;
    }
    let rows = a
        .sizes
        .iter()
        .map(|&n| feasibility_experiment(n, a.reads, &cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let text = match a.format {
        TableFormat::Csv => stats_csv(&rows),
        TableFormat::Json => {
            serde_json::to_string_pretty(&rows).context("serializing stats")? + "\n"
        }
    };
    a.output.emit(&text)
}

fn report_failures(failures: &[String]) {
    for f in failures {
        eprintln!("warning: {f}");
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(value).context("serializing table")? + "\n")
}

fn bench(cmd: &BenchCommand) -> CliResult {
    match cmd {
        BenchCommand::Exp1(a) => {
            let sampler = SamplerArgs {
                solver: SolverArg::Sa,
                reads: a.sampler.reads,
                sweeps: a.sampler.sweeps,
            };
            let solvers = a.solver.iter().map(|&s| sampler.solver(s)).collect();
            let table = run_experiment1(&a.common.config(solvers)?)?;
            report_failures(&table.failures);
            let text = match a.common.format {
                TableFormat::Csv => table.to_csv(!a.common.no_timing),
                TableFormat::Json => to_json(&table)?,
            };
            a.common.output.emit(&text)
        }
        BenchCommand::Exp2(a) => {
            let reference = a.sampler.solver(a.reference);
            let chaser = a.sampler.solver(a.sampler.solver);
            let cfg = a.common.config(vec![reference.clone(), chaser.clone()])?;
            let table = run_experiment2(&cfg, &reference, &chaser)?;
            report_failures(&table.failures);
            let text = match a.common.format {
                TableFormat::Csv => table.to_csv(!a.common.no_timing),
                TableFormat::Json => to_json(&table)?,
            };
            a.common.output.emit(&text)
        }
        BenchCommand::Survey(a) => {
            let hw = a.target.build()?;
            let cfg = a.common.config(vec![Solver::Exhaustive])?;
            let table = run_embedding_survey(&cfg, &hw, &EmbedParams::default())?;
            report_failures(&table.failures);
            let text = match a.common.format {
                TableFormat::Csv => table.to_csv(),
                TableFormat::Json => to_json(&table)?,
            };
            a.common.output.emit(&text)
        }
    }
}

fn run(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Build(a) => build(a),
        Command::Solve(a) => solve(a),
        Command::Embed(a) => embed(a),
        Command::Feasibility(a) => feasibility(a),
        Command::Bench(b) => bench(b),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Infeasible(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INFEASIBLE)
        }
    }
}
