//! Command-line front end: solving, instance generation, exact reference values
//! and batch benchmarks with CSV output.

mod bench;
mod output;

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tapst::io::{
    gen_steiner, gen_wtap, parse_stp, parse_wtap, write_stp, write_wtap, GeneratorConfig,
};
use tapst::oracles;
use tapst::steiner::{choose_k, run_steiner, SteinerLimits, SteinerOptions};
use tapst::wtap::{run_wtap, Engine, WtapLimits, WtapOptions};

pub use bench::{bench_csv, bench_rows, BenchRow, BENCH_HEADER};
pub use output::{steiner_solution_text, steiner_trace_csv, wtap_solution_text, wtap_trace_csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_LIMIT: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(PathBuf, std::io::Error),
    Core(tapst::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(..) => EXIT_USAGE,
            CliError::Core(e) => match e {
                tapst::Error::Infeasible(_)
                | tapst::Error::InfeasibleStart
                | tapst::Error::Disconnected(..) => EXIT_INFEASIBLE,
                tapst::Error::SizeLimit { .. } | tapst::Error::Timeout { .. } => EXIT_LIMIT,
                _ => EXIT_USAGE,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Core(e @ tapst::Error::Timeout { .. }) => {
                write!(
                    f,
                    "{e}; raise --node-budget, lower --max-size or use --engine heuristic"
                )
            }
            CliError::Core(e @ tapst::Error::SizeLimit { .. }) => {
                write!(f, "{e}; pass a smaller --k or raise --max-size")
            }
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<tapst::Error> for CliError {
    fn from(e: tapst::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// `auto` or a fixed positive integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KChoice {
    #[default]
    Auto,
    Fixed(usize),
}

impl FromStr for KChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(KChoice::Auto);
        }
        s.parse::<usize>()
            .map(KChoice::Fixed)
            .map_err(|_| format!("expected `auto` or a positive integer, got {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Exact,
    Heuristic,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Exact => Engine::Exact,
            EngineArg::Heuristic => Engine::Heuristic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Wtap,
    Stp,
}

#[derive(Debug, Parser)]
#[command(
    name = "tapst",
    version,
    about = "Local search for weighted tree augmentation and Steiner tree"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a WTAP instance.
    WtapSolve(WtapSolveArgs),
    /// Solve a Steiner tree instance given in STP format.
    SteinerSolve(SteinerSolveArgs),
    /// Generate random instances.
    Gen(GenArgs),
    /// Compute exact optima by exhaustive search.
    Oracle(OracleArgs),
    /// Solve every instance of a directory or generated batch and emit a CSV table.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SolveCommon {
    #[arg(long)]
    pub input: PathBuf,
    /// Solution file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-iteration CSV trace.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Seconds; checked between iterations.
    #[arg(long)]
    pub time_budget: Option<f64>,
    /// Fill the elapsed_ms trace column.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Clone, Args)]
pub struct WtapSolveArgs {
    #[command(flatten)]
    pub common: SolveCommon,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    #[arg(long, default_value = "auto")]
    pub k: KChoice,
    #[arg(long, value_enum, default_value_t = EngineArg::Exact)]
    pub engine: EngineArg,
    /// Largest component size explored by the exact engine.
    #[arg(long)]
    pub max_size: Option<usize>,
    #[arg(long)]
    pub node_budget: Option<u64>,
    /// Solve the instance as given, without adding shadows.
    #[arg(long)]
    pub no_shadow_close: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SteinerSolveArgs {
    #[command(flatten)]
    pub common: SolveCommon,
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(long, default_value = "auto")]
    pub k: KChoice,
    /// Largest terminal count of a component.
    #[arg(long)]
    pub max_size: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub format: Format,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of vertices.
    #[arg(long)]
    pub n: usize,
    /// Number of links or edges.
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub terminals: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub max_weight: u32,
    /// Longest tree path a WTAP link may span.
    #[arg(long)]
    pub max_span: Option<usize>,
    /// With more than one instance, `--out` names a directory and seeds run upward from `--seed`.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also report the best k-restricted Steiner tree.
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Directory of instances; generated instances are used when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value = "auto")]
    pub k: KChoice,
    #[arg(long, value_enum, default_value_t = EngineArg::Exact)]
    pub engine: EngineArg,
    #[arg(long)]
    pub max_size: Option<usize>,
    #[arg(long)]
    pub node_budget: Option<u64>,
    #[arg(long)]
    pub time_budget: Option<f64>,
    #[arg(long)]
    pub timings: bool,
    /// Generated batch: number of instances.
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub m: usize,
    #[arg(long)]
    pub terminals: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub max_weight: u32,
    #[arg(long)]
    pub max_span: Option<usize>,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn time_budget(seconds: Option<f64>) -> CliResult<Option<Duration>> {
    seconds
        .map(|s| {
            Duration::try_from_secs_f64(s)
                .map_err(|_| CliError::Usage(format!("invalid time budget {s}")))
        })
        .transpose()
}

pub fn wtap_options(
    epsilon: f64,
    k: KChoice,
    engine: EngineArg,
    max_size: Option<usize>,
    node_budget: Option<u64>,
    time: Option<f64>,
) -> CliResult<WtapOptions> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(CliError::Usage(format!(
            "--epsilon must lie in (0, 0.5] for WTAP, got {epsilon}"
        )));
    }
    let mut limits = WtapLimits {
        size_cap: max_size,
        time_budget: time_budget(time)?,
        ..WtapLimits::default()
    };
    if let Some(b) = node_budget {
        limits.node_budget = b;
    }
    Ok(WtapOptions {
        epsilon,
        k: match k {
            KChoice::Auto => None,
            KChoice::Fixed(v) => Some(v),
        },
        engine: engine.into(),
        limits,
        shadow_close: true,
        record_timings: false,
    })
}

pub fn steiner_options(
    epsilon: f64,
    k: KChoice,
    max_size: Option<usize>,
    time: Option<f64>,
) -> CliResult<SteinerOptions> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(CliError::Usage(format!(
            "--epsilon must lie in (0, 1] for Steiner tree, got {epsilon}"
        )));
    }
    let mut limits = SteinerLimits {
        time_budget: time_budget(time)?,
        ..SteinerLimits::default()
    };
    if let Some(m) = max_size {
        limits.component_terminals = m;
    }
    let k = match k {
        KChoice::Fixed(v) if v < 2 => {
            return Err(CliError::Usage(format!("--k must be at least 2, got {v}")))
        }
        KChoice::Fixed(v) => v,
        KChoice::Auto => {
            let k = choose_k(epsilon);
            if k > limits.component_terminals {
                log::warn!(
                    "k = {k} chosen for epsilon = {epsilon} exceeds the component limit {}; pass --k explicitly",
                    limits.component_terminals
                );
            } else {
                log::info!("using k = {k}");
            }
            k
        }
    };
    Ok(SteinerOptions {
        epsilon,
        k: Some(k),
        limits,
        record_timings: false,
    })
}

fn cmd_wtap_solve(args: &WtapSolveArgs) -> CliResult<()> {
    let instance = parse_wtap(&read(&args.common.input)?)?;
    let mut options = wtap_options(
        args.epsilon,
        args.k,
        args.engine,
        args.max_size,
        args.node_budget,
        args.common.time_budget,
    )?;
    options.shadow_close = !args.no_shadow_close;
    options.record_timings = args.common.timings;
    let run = run_wtap(&instance, &options)?;
    if !oracles::validate_wtap(&run.instance, &run.solution) {
        return Err(CliError::Core(tapst::Error::Infeasible(
            "solver output failed independent validation".into(),
        )));
    }
    if let Some(path) = &args.common.out {
        write(path, &wtap_solution_text(&run))?;
    }
    if let Some(path) = &args.common.trace {
        write(path, &wtap_trace_csv(&run.trace))?;
    }
    println!(
        "weight={} iters={} phi={}",
        run.weight, run.iterations, run.potential
    );
    Ok(())
}

fn cmd_steiner_solve(args: &SteinerSolveArgs) -> CliResult<()> {
    let instance = parse_stp(&read(&args.common.input)?)?;
    let mut options =
        steiner_options(args.epsilon, args.k, args.max_size, args.common.time_budget)?;
    options.record_timings = args.common.timings;
    let run = run_steiner(&instance, &options)?;
    if !oracles::validate_steiner(&instance, &run.solution) {
        return Err(CliError::Core(tapst::Error::Infeasible(
            "solver output failed independent validation".into(),
        )));
    }
    if let Some(path) = &args.common.out {
        write(path, &steiner_solution_text(&instance, &run))?;
    }
    if let Some(path) = &args.common.trace {
        write(path, &steiner_trace_csv(&run.trace))?;
    }
    println!(
        "weight={} iters={} phi={}",
        run.weight, run.iterations, run.potential
    );
    Ok(())
}

pub fn generator_config(
    seed: u64,
    n: usize,
    m: usize,
    terminals: Option<usize>,
    max_weight: u32,
    max_span: Option<usize>,
) -> GeneratorConfig {
    let mut cfg = GeneratorConfig::new(seed, n, m);
    if let Some(t) = terminals {
        cfg.terminal_count = t;
    }
    cfg.max_weight = max_weight;
    cfg.max_link_span = max_span;
    cfg
}

/// Serialized instance for a generator configuration.
pub fn generate_text(format: Format, cfg: &GeneratorConfig) -> CliResult<String> {
    Ok(match format {
        Format::Wtap => write_wtap(&gen_wtap(cfg)?),
        Format::Stp => write_stp(&gen_steiner(cfg)?),
    })
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Wtap => "wtap",
        Format::Stp => "stp",
    }
}

fn cmd_gen(args: &GenArgs) -> CliResult<()> {
    if args.count == 0 {
        return Err(CliError::Usage("--count must be positive".into()));
    }
    let config = |seed| {
        generator_config(
            seed,
            args.n,
            args.m,
            args.terminals,
            args.max_weight,
            args.max_span,
        )
    };
    if args.count == 1 {
        let text = generate_text(args.format, &config(args.seed))?;
        match &args.out {
            Some(path) => write(path, &text)?,
            None => print!("{text}"),
        }
        return Ok(());
    }
    let dir = args
        .out
        .as_ref()
        .ok_or_else(|| CliError::Usage("--out DIR is required with --count > 1".into()))?;
    fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.clone(), e))?;
    for i in 0..args.count as u64 {
        let seed = args.seed + i;
        let text = generate_text(args.format, &config(seed))?;
        write(
            &dir.join(format!("gen-{seed:06}.{}", extension(args.format))),
            &text,
        )?;
    }
    Ok(())
}

fn infer_format(path: &Path, given: Option<Format>) -> CliResult<Format> {
    if let Some(f) = given {
        return Ok(f);
    }
    match path.extension().and_then(|e| e.to_str()) {
        Some("wtap") => Ok(Format::Wtap),
        Some("stp") => Ok(Format::Stp),
        _ => Err(CliError::Usage(format!(
            "cannot infer the format of {}; pass --format",
            path.display()
        ))),
    }
}

fn ids_text(ids: &[usize]) -> String {
    ids.iter()
        .map(|i| (i + 1).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_oracle(args: &OracleArgs) -> CliResult<()> {
    let text = read(&args.input)?;
    match infer_format(&args.input, args.format)? {
        Format::Wtap => {
            let instance = parse_wtap(&text)?;
            let report = oracles::opt_wtap_bruteforce(&instance, oracles::WTAP_BRUTEFORCE_LIMIT)?;
            println!(
                "opt={} links={}",
                report.opt_value,
                ids_text(&report.opt_certificate)
            );
        }
        Format::Stp => {
            let instance = parse_stp(&text)?;
            let report = oracles::opt_steiner_exact(&instance, oracles::STEINER_EXACT_LIMIT)?;
            println!(
                "opt={} edges={}",
                report.opt_value,
                ids_text(&report.opt_certificate)
            );
            if let Some(k) = args.k {
                let report =
                    oracles::opt_krestricted_bruteforce(&instance, k, oracles::KRESTRICTED_LIMIT)?;
                println!("opt_k={} k={k}", report.opt_value);
            }
        }
    }
    Ok(())
}

/// Runs one command; returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::WtapSolve(a) => cmd_wtap_solve(a),
        Command::SteinerSolve(a) => cmd_steiner_solve(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Bench(a) => bench::cmd_bench(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
