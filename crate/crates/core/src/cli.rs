//! The `ecfs` command line.
//!
//! Exit codes: 0 on success, 1 on domain errors (invalid schedule, horizon
//! exceeded, search budget exhausted, adversary failure), 2 on usage, I/O
//! and parse errors. Results go to stdout or files, diagnostics to stderr.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::adversaries::{self, run_adversary};
use crate::bounds::{interval_lower_bound, oracle_optimal, Objective, OracleConfig};
use crate::format::{parse_instance, parse_schedule, write_instance, write_schedule};
use crate::generate::{random_instance, RandomSpec};
use crate::graph::{two_factor_decomposition, MultiGraph};
use crate::metrics::{response_summary, write_csv, RunLabel};
use crate::model::{Instance, Round};
use crate::rational::{parse_rational, Frac, Rational};
use crate::schedulers::{Algorithm, FifoMatching};
use crate::sim::{simulate_instance, Scheduler, SimError};
use crate::trace::to_jsonl;
use crate::validate::validate_schedule;

#[derive(Parser, Debug)]
#[command(name = "ecfs", version, about = "Endpoint capacitated flow scheduling lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate an online scheduler on one or more instance files.
    Run(RunArgs),
    /// Check a schedule file against an instance.
    Validate(ValidateArgs),
    /// Print the interval lower bound and its witness.
    Bound { instance: PathBuf },
    /// Exhaustive optimum for small instances.
    Oracle(OracleArgs),
    /// Emit an adversarial instance, or drive a scheduler against the chain.
    Adversary(AdversaryArgs),
    /// Print the 2-factor decomposition of an instance's job multigraph.
    Decompose { instance: PathBuf },
    /// Write a seeded random instance.
    Generate(GenerateArgs),
}

#[derive(Args, Debug, Clone)]
struct AlgArgs {
    /// propalloc | batch | fifo | sjf | hybrid
    #[arg(long)]
    alg: String,
    /// epsilon for propalloc and sjf, first share for hybrid
    #[arg(long, value_parser = rational_arg)]
    eps: Option<Rational>,
    /// second hybrid share (defaults to --eps)
    #[arg(long, value_parser = rational_arg)]
    eps2: Option<Rational>,
    /// batch size for batch and fifo
    #[arg(long, default_value_t = 1)]
    k: u64,
    /// capacity multiplier enforced by the engine and validator
    #[arg(long, value_parser = rational_arg)]
    aug: Option<Rational>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    alg: AlgArgs,
    /// instance files
    instances: Vec<PathBuf>,
    /// also run every `*.ecfs` file in this directory, in parallel
    #[arg(long)]
    batch_dir: Option<PathBuf>,
    /// schedule output (single instance) or directory (several)
    #[arg(long)]
    out: Option<PathBuf>,
    /// metrics CSV output; stdout when omitted
    #[arg(long)]
    csv: Option<PathBuf>,
    /// JSON-lines round trace (single instance)
    #[arg(long)]
    trace: Option<PathBuf>,
    /// comma separated p values for the lp sums
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    p: Vec<u32>,
    #[arg(long)]
    max_rounds: Option<Round>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    instance: PathBuf,
    schedule: PathBuf,
    #[arg(long, value_parser = rational_arg, default_value = "1")]
    aug: Rational,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ObjectiveArg {
    Max,
    Avg,
}

#[derive(Args, Debug)]
struct OracleArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "max")]
    objective: ObjectiveArg,
    #[arg(long)]
    nonsplitting: bool,
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    #[arg(long)]
    horizon: Option<Round>,
    /// splittable search grid refinement
    #[arg(long, default_value_t = 1)]
    refinement: u64,
    /// witness schedule output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Chain,
    Gap,
    PropallocAvg,
    SjfMax,
}

#[derive(Args, Debug)]
struct AdversaryArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long = "K", default_value_t = 1)]
    big_k: u64,
    #[arg(long = "C", default_value_t = 2)]
    big_c: u64,
    #[arg(long = "T", default_value_t = 20)]
    big_t: u64,
    /// family size for propalloc-avg, batch size for the chain scheduler
    #[arg(long, default_value_t = 5)]
    k: u64,
    /// chain scheduler
    #[arg(long, default_value = "fifo")]
    alg: String,
    #[arg(long, value_parser = rational_arg, default_value = "0")]
    eps: Rational,
    #[arg(long, value_parser = rational_arg)]
    eps2: Option<Rational>,
    #[arg(long, value_parser = rational_arg, default_value = "1")]
    aug: Rational,
    /// instance output; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// chain or sjf-max: schedule output
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// chain: JSON-lines trace output
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 6)]
    nodes: usize,
    #[arg(long, default_value_t = 20)]
    jobs: usize,
    #[arg(long, default_value_t = 3)]
    max_demand: u64,
    #[arg(long, default_value_t = 3)]
    max_capacity: u64,
    #[arg(long, default_value_t = 10)]
    max_release: u64,
    /// unit demands and capacities
    #[arg(long)]
    unit: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure {
        code: 2,
        message: message.to_string(),
    }
}

fn domain(message: impl ToString) -> Failure {
    Failure {
        code: 1,
        message: message.to_string(),
    }
}

fn sim_failure(e: SimError) -> Failure {
    match e {
        SimError::Config(_) => usage(e),
        _ => domain(e),
    }
}

type Outcome = Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(a) => run(a, out),
        Command::Validate(a) => validate(a, out),
        Command::Bound { instance } => bound(&instance, out),
        Command::Oracle(a) => oracle(a, out),
        Command::Adversary(a) => adversary(a, out),
        Command::Decompose { instance } => decompose(&instance, out),
        Command::Generate(a) => generate(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Outcome {
    fs::write(path, contents).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> Outcome {
    out.write_all(text.as_bytes()).map_err(usage)
}

fn build_algorithm(a: &AlgArgs) -> Result<Algorithm, Failure> {
    let eps = a.eps.clone().unwrap_or_else(|| Rational::from_integer(1.into()));
    Algorithm::from_name(&a.alg, eps, a.eps2.clone(), a.k).map_err(usage)
}

struct RunResult {
    label: RunLabel,
    report: crate::metrics::MetricsReport,
    schedule: String,
    trace: String,
}

fn run_one(
    path: &Path,
    alg: &Algorithm,
    aug: &Rational,
    p: &[u32],
    max_rounds: Option<Round>,
) -> Result<RunResult, Failure> {
    let inst = load_instance(path)?;
    let scheduler = alg.build();
    let label = RunLabel {
        instance: path.display().to_string(),
        scheduler: scheduler.name().to_string(),
        params: scheduler.params(),
        augmentation: aug.clone(),
    };
    let outcome = simulate_instance(&inst, scheduler, aug.clone(), max_rounds).map_err(sim_failure)?;
    let report = validate_schedule(&inst, &outcome.schedule, aug);
    if !report.is_valid() {
        return Err(domain(format!(
            "{}: schedule fails validation: {}",
            path.display(),
            report.violations[0]
        )));
    }
    let metrics = response_summary(&inst, &outcome.schedule, p).map_err(domain)?;
    Ok(RunResult {
        label,
        report: metrics,
        schedule: write_schedule(&outcome.schedule),
        trace: to_jsonl(&outcome.history, None),
    })
}

fn run(a: RunArgs, out: &mut dyn Write) -> Outcome {
    let alg = build_algorithm(&a.alg)?;
    let aug = a.alg.aug.clone().unwrap_or_else(|| alg.augmentation());
    let mut paths = a.instances.clone();
    if let Some(dir) = &a.batch_dir {
        let mut found: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| usage(format!("{}: {e}", dir.display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "ecfs"))
            .collect();
        found.sort();
        paths.extend(found);
    }
    if paths.is_empty() {
        return Err(usage("no instance given"));
    }
    let several = paths.len() > 1;
    if several && a.trace.is_some() {
        return Err(usage("--trace needs a single instance"));
    }

    let results: Vec<Result<RunResult, Failure>> = paths
        .par_iter()
        .map(|p| run_one(p, &alg, &aug, &a.p, a.max_rounds))
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    for (path, r) in paths.iter().zip(results) {
        let r = r?;
        if let Some(target) = &a.out {
            let file = if several {
                let stem = path.file_stem().unwrap_or_default().to_string_lossy();
                target.join(format!("{stem}.sched"))
            } else {
                target.clone()
            };
            write_file(&file, &r.schedule)?;
        }
        if let Some(trace) = &a.trace {
            write_file(trace, &r.trace)?;
        }
        rows.push((r.label, r.report));
    }

    let mut buf = Vec::new();
    write_csv(&mut buf, true, &rows).map_err(usage)?;
    match &a.csv {
        Some(path) => fs::write(path, &buf).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => out.write_all(&buf).map_err(usage),
    }
}

fn validate(a: ValidateArgs, out: &mut dyn Write) -> Outcome {
    let inst = load_instance(&a.instance)?;
    let text =
        fs::read_to_string(&a.schedule).map_err(|e| usage(format!("{}: {e}", a.schedule.display())))?;
    let sched = parse_schedule(&text).map_err(|e| usage(format!("{}: {e}", a.schedule.display())))?;
    let report = validate_schedule(&inst, &sched, &a.aug);
    if report.is_valid() {
        return emit(out, "valid\n");
    }
    let mut text = String::new();
    for v in &report.violations {
        text.push_str(&format!("{v}\n"));
    }
    emit(out, &text)?;
    Err(domain(format!("{} violation(s)", report.violations.len())))
}

fn bound(path: &Path, out: &mut dyn Write) -> Outcome {
    let inst = load_instance(path)?;
    let b = interval_lower_bound(&inst);
    let line = match b.witness {
        Some(w) => format!("L {} witness {} {} {}\n", Frac(&b.value), w.node, w.t1, w.t2),
        None => format!("L {} witness none\n", Frac(&b.value)),
    };
    emit(out, &line)
}

fn oracle(a: OracleArgs, out: &mut dyn Write) -> Outcome {
    let inst = load_instance(&a.instance)?;
    let objective = match a.objective {
        ObjectiveArg::Max => Objective::MaxResponse,
        ObjectiveArg::Avg => Objective::AvgResponse,
    };
    let mut cfg = OracleConfig::new(objective, a.nonsplitting)
        .budget(a.budget)
        .refinement(a.refinement);
    if let Some(h) = a.horizon {
        cfg = cfg.horizon(h);
    }
    let result = oracle_optimal(&inst, &cfg).map_err(domain)?;
    let name = match objective {
        Objective::MaxResponse => "max_response",
        Objective::AvgResponse => "avg_response",
    };
    let mut text = format!("{name} {}\nexplored {}\n", Frac(&result.value), result.explored);
    if let Some(g) = result.grid {
        text.push_str(&format!("grid {g}\n"));
    }
    emit(out, &text)?;
    if let Some(path) = &a.out {
        write_file(path, &write_schedule(&result.schedule))?;
    }
    Ok(())
}

fn chain_scheduler(a: &AdversaryArgs) -> Result<Box<dyn Scheduler + Send>, Failure> {
    if a.alg == "fifo" && a.aug == Rational::from_integer(1.into()) {
        return Ok(Box::new(FifoMatching::unaugmented()));
    }
    let alg = Algorithm::from_name(&a.alg, a.eps.clone(), a.eps2.clone(), a.k).map_err(usage)?;
    Ok(alg.build())
}

fn adversary(a: AdversaryArgs, out: &mut dyn Write) -> Outcome {
    let write_instance_out = |inst: &Instance, out: &mut dyn Write| match &a.out {
        Some(path) => write_file(path, &write_instance(inst)),
        None => emit(out, &write_instance(inst)),
    };
    match a.family {
        Family::Gap => write_instance_out(&adversaries::gap_instance(a.big_c).map_err(usage)?, out),
        Family::PropallocAvg => {
            write_instance_out(&adversaries::propalloc_avg_instance(a.k).map_err(usage)?, out)?;
            if let Some(path) = &a.schedule {
                write_file(path, &write_schedule(&adversaries::propalloc_avg_reference(a.k)))?;
            }
            Ok(())
        }
        Family::SjfMax => {
            let (inst, reference) = adversaries::sjf_max_instance(a.big_t).map_err(usage)?;
            write_instance_out(&inst, out)?;
            if let Some(path) = &a.schedule {
                write_file(path, &write_schedule(&reference))?;
            }
            Ok(())
        }
        Family::Chain => {
            let scheduler = chain_scheduler(&a)?;
            let trace = run_adversary(a.big_k, a.big_c, scheduler, a.aug.clone()).map_err(|e| match e {
                adversaries::AdversaryError::ChainSize(_) | adversaries::AdversaryError::Parameter { .. } => {
                    usage(e)
                }
                _ => domain(e),
            })?;
            if let Some(path) = &a.out {
                write_file(path, &write_instance(&trace.instance))?;
            }
            if let Some(path) = &a.schedule {
                write_file(path, &write_schedule(&trace.schedule))?;
            }
            if let Some(path) = &a.trace {
                write_file(path, &to_jsonl(&trace.history, Some(&trace.round_labels())))?;
            }
            let returned: Vec<String> = trace.returned_nodes().iter().map(|n| n.to_string()).collect();
            let text = format!(
                "scheduler {}({}) aug {}\nrounds {}\njobs {}\nreturned {}\nmax_response {}\n",
                trace.scheduler,
                trace.params,
                Frac(&trace.augmentation),
                trace.history.len(),
                trace.instance.job_count(),
                returned.join(" "),
                trace.max_response
            );
            emit(out, &text)
        }
    }
}

fn decompose(path: &Path, out: &mut dyn Write) -> Outcome {
    let inst = load_instance(path)?;
    let g = MultiGraph::from_jobs(inst.jobs()).map_err(usage)?;
    let set = two_factor_decomposition(&g);
    let mut text = format!("max_degree {}\nfactors {}\n", g.max_degree(), set.len());
    for (i, f) in set.factors.iter().enumerate() {
        let ids: Vec<String> = f.iter().map(|j| j.to_string()).collect();
        text.push_str(&format!("factor {i} {}\n", ids.join(" ")));
    }
    emit(out, &text)
}

fn generate(a: GenerateArgs, out: &mut dyn Write) -> Outcome {
    if a.nodes < 2 {
        return Err(usage("--nodes must be at least 2"));
    }
    let spec = if a.unit {
        RandomSpec::unit(a.nodes..=a.nodes, a.jobs..=a.jobs, a.max_release.max(1))
    } else {
        RandomSpec {
            nodes: a.nodes..=a.nodes,
            jobs: a.jobs..=a.jobs,
            max_demand: a.max_demand.max(1),
            max_capacity: a.max_capacity.max(1),
            max_release: a.max_release.max(1),
        }
    };
    let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(a.seed), &spec);
    let text = format!("# seed {}\n{}", a.seed, write_instance(&inst));
    match &a.out {
        Some(path) => write_file(path, &text),
        None => emit(out, &text),
    }
}
