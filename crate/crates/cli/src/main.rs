use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use softltl_core::automata::{make_nonblocking, to_dot, translate, Alphabet, AutomatonDump};
use softltl_core::baseline::DEFAULT_BUDGET;
use softltl_core::cache::ReplanCache;
use softltl_core::experiment::{run_experiment, write_histogram_tsv, write_rows_csv, ExperimentConfig};
use softltl_core::planner::{check, compile, plan_compiled, replan_cached, PlanOptions, PlanResult, Timings};
use softltl_core::product::ProductDump;
use softltl_core::synthesis::MidpointRule;
use softltl_core::{parse_ltl, Error, Problem};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_IO: u8 = 66;

/// Plan infinite robot trajectories for an LTL mission with prioritized
/// soft LTL constraints.
#[derive(Parser)]
#[command(name = "softltl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file and print the result JSON.
    Plan(PlanArgs),
    /// Verify a result against a problem using lasso semantics only.
    Check(CheckArgs),
    /// Translate a formula and print its Büchi automaton.
    Translate(TranslateArgs),
    /// Re-plan under a new soft-constraint order from a saved product.
    Reorder(ReorderArgs),
    /// Compare greedy and brute-force planning on random products.
    Bench(BenchArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report all timings as zero, making output byte-for-byte reproducible.
    #[arg(long)]
    no_timings: bool,
}

#[derive(Args)]
struct PlanArgs {
    problem: PathBuf,
    /// Try every target state of the optimal SCC as midpoint, keep the shortest.
    #[arg(long)]
    midpoint_variant: bool,
    /// Search for a shortest lasso among the cost-optimal ones.
    #[arg(long)]
    exact: bool,
    /// Wall-clock budget for --exact, e.g. 90s or 20m.
    #[arg(long, value_parser = humantime::parse_duration)]
    budget: Option<Duration>,
    /// Save the full product automaton as JSON.
    #[arg(long, value_name = "FILE")]
    dump_product: Option<PathBuf>,
    /// Save a compact re-planning cache for `reorder --cache`.
    #[arg(long, value_name = "FILE")]
    save_cache: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CheckArgs {
    problem: PathBuf,
    result: PathBuf,
    /// Soft constraints were reordered (as given to `reorder`) before planning.
    #[arg(long, value_delimiter = ',')]
    permutation: Option<Vec<usize>>,
}

#[derive(Args)]
struct TranslateArgs {
    formula: String,
    /// Comma-separated atomic propositions.
    #[arg(long, value_delimiter = ',', required = true)]
    ap: Vec<String>,
    /// Emit Graphviz instead of JSON.
    #[arg(long)]
    dot: bool,
    /// Complete the automaton with a rejecting trap state.
    #[arg(long)]
    nonblocking: bool,
}

#[derive(Args)]
struct ReorderArgs {
    problem: PathBuf,
    /// New order as 1-based old indices, e.g. 1,2,3,4,6,5.
    #[arg(value_delimiter = ',')]
    permutation: Vec<usize>,
    /// Cache saved by `plan --save-cache`.
    #[arg(long)]
    cache: PathBuf,
    #[arg(long)]
    midpoint_variant: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "100")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value = "20m", value_parser = humantime::parse_duration)]
    budget: Duration,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of soft constraints (weight bits) per random product.
    #[arg(long, default_value_t = 10)]
    soft_count: usize,
    /// Probability of each weight bit being set.
    #[arg(long, default_value_t = 0.2)]
    weight_probability: f64,
    #[arg(long)]
    midpoint_variant: bool,
    /// Run trials one at a time.
    #[arg(long)]
    sequential: bool,
    /// Ratio histogram output (TSV).
    #[arg(long)]
    histogram: Option<PathBuf>,
    /// Per-trial records (JSON lines).
    #[arg(long)]
    records: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

/// A failure with its exit code and one-line diagnostic.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) => EXIT_IO,
            _ => EXIT_DATA,
        };
        Failure(code, e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(EXIT_IO, format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Outcome {
    fs::write(path, bytes).map_err(|e| Failure(EXIT_IO, format!("{}: {e}", path.display())))
}

fn emit(output: &OutputArgs, text: &str) -> Outcome {
    match &output.out {
        Some(path) => write_file(path, text.as_bytes()),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure(EXIT_IO, format!("stdout: {e}")))
        }
    }
}

fn load_problem(path: &Path) -> Result<Problem, Failure> {
    Problem::from_json(&read(path)?).map_err(|e| Failure(EXIT_DATA, format!("{}: {e}", path.display())))
}

fn result_json(mut result: PlanResult, no_timings: bool) -> String {
    if no_timings {
        result.timings_ms = Timings::default();
    }
    let mut text = serde_json::to_string_pretty(&result).expect("result serializes");
    text.push('\n');
    text
}

fn infeasible() -> Failure {
    Failure(
        EXIT_INFEASIBLE,
        "no path of the transition system satisfies the hard formula".into(),
    )
}

fn run_plan(args: PlanArgs) -> Outcome {
    let problem = load_problem(&args.problem)?;
    let compiled = compile(&problem)?;
    if let Some(path) = &args.dump_product {
        let dump = ProductDump::from(&compiled.product);
        let text = serde_json::to_vec(&dump).map_err(Error::from)?;
        write_file(path, &text)?;
    }
    if let Some(path) = &args.save_cache {
        write_file(path, &ReplanCache::from_product(&compiled.product).to_bytes())?;
    }
    let options = PlanOptions {
        midpoint_variant: args.midpoint_variant,
        exact: args.exact,
        budget: Some(args.budget.unwrap_or(DEFAULT_BUDGET)),
    };
    let plan = plan_compiled(&compiled, options)?.ok_or_else(infeasible)?;
    emit(&args.output, &result_json(plan.result, args.output.no_timings))
}

fn run_check(args: CheckArgs) -> Outcome {
    let mut problem = load_problem(&args.problem)?;
    if let Some(perm) = &args.permutation {
        problem = problem.permuted(perm)?;
    }
    let text = read(&args.result)?;
    let claimed: PlanResult =
        serde_json::from_str(&text).map_err(|e| Failure(EXIT_DATA, format!("{}: {e}", args.result.display())))?;
    match check(&problem, &claimed) {
        Ok(report) => {
            println!("verified: satisfied {:?}, cost {}", report.satisfied, report.cost);
            Ok(())
        }
        Err(reason) => Err(Failure(EXIT_CHECK_FAILED, format!("check failed: {reason}"))),
    }
}

fn run_translate(args: TranslateArgs) -> Outcome {
    let alphabet = Alphabet::new(args.ap.iter().map(String::as_str))?;
    let formula = parse_ltl(&args.formula, alphabet.atoms())?;
    let mut automaton = translate(&formula, &alphabet)?;
    if args.nonblocking {
        automaton = make_nonblocking(&automaton);
    }
    let text = if args.dot {
        to_dot(&automaton)
    } else {
        let mut t = serde_json::to_string_pretty(&AutomatonDump::from(&automaton)).expect("dump serializes");
        t.push('\n');
        t
    };
    print!("{text}");
    Ok(())
}

fn run_reorder(args: ReorderArgs) -> Outcome {
    let problem = load_problem(&args.problem)?;
    let bytes = fs::read(&args.cache).map_err(|e| Failure(EXIT_IO, format!("{}: {e}", args.cache.display())))?;
    let cache =
        ReplanCache::from_vec(bytes).map_err(|e| Failure(EXIT_DATA, format!("{}: {e}", args.cache.display())))?;
    if cache.soft_count() != problem.softs.len() {
        return Err(Failure(
            EXIT_DATA,
            format!(
                "cache has {} soft constraints, problem has {}",
                cache.soft_count(),
                problem.softs.len()
            ),
        ));
    }
    if cache.max_ts_state().is_none_or(|s| s >= problem.ts.state_count()) {
        return Err(Failure(EXIT_DATA, "cache does not belong to this problem".into()));
    }
    let plan = replan_cached(&problem.ts, &cache, &args.permutation, args.midpoint_variant)?.ok_or_else(infeasible)?;
    emit(&args.output, &result_json(plan.result, args.output.no_timings))
}

fn run_bench(args: BenchArgs) -> Outcome {
    if !(0.0..=1.0).contains(&args.weight_probability) {
        return Err(Failure(EXIT_USAGE, "--weight-probability must lie in [0, 1]".into()));
    }
    let config = ExperimentConfig {
        sizes: args.sizes.clone(),
        trials: args.trials,
        budget: args.budget,
        seed: args.seed,
        soft_count: args.soft_count,
        weight_probability: args.weight_probability,
        rule: MidpointRule::from_flag(args.midpoint_variant),
        parallel: !args.sequential,
    };
    let (mut rows, mut records) = run_experiment(&config)?;
    if args.output.no_timings {
        for r in &mut rows {
            r.greedy_avg_ms = 0.0;
            r.brute_avg_ms = r.brute_avg_ms.map(|_| 0.0);
        }
        for r in &mut records {
            r.greedy_ms = 0.0;
            r.brute_ms = 0.0;
        }
    }
    let mut csv = Vec::new();
    write_rows_csv(&rows, &mut csv)?;
    if let Some(path) = &args.histogram {
        let mut tsv = Vec::new();
        write_histogram_tsv(&records, &args.sizes, 0.25, &mut tsv)?;
        write_file(path, &tsv)?;
    }
    if let Some(path) = &args.records {
        let mut lines = String::new();
        for r in &records {
            lines.push_str(&serde_json::to_string(r).expect("record serializes"));
            lines.push('\n');
        }
        write_file(path, lines.as_bytes())?;
    }
    emit(&args.output, &String::from_utf8(csv).expect("csv is utf-8"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Plan(a) => run_plan(a),
        Command::Check(a) => run_check(a),
        Command::Translate(a) => run_translate(a),
        Command::Reorder(a) => run_reorder(a),
        Command::Bench(a) => run_bench(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, message)) => {
            eprintln!("softltl: {message}");
            ExitCode::from(code)
        }
    }
}
