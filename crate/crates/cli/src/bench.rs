use std::fs;
use std::time::Instant;

use rayon::prelude::*;
use tapst::io::{parse_stp, parse_wtap};
use tapst::oracles;
use tapst::steiner::run_steiner;
use tapst::wtap::run_wtap;

use crate::{
    generate_text, generator_config, steiner_options, write, wtap_options, BenchArgs, CliError,
    CliResult, EngineArg, Format,
};

pub const BENCH_HEADER: &str = "# tapst bench v1";

const COLUMNS: [&str; 13] = [
    "instance",
    "n",
    "m",
    "size",
    "epsilon",
    "k",
    "engine",
    "weight",
    "opt",
    "ratio",
    "iterations",
    "elapsed_ms",
    "status",
];

/// Largest number of non-terminals for which the bench computes an exact Steiner optimum.
const BENCH_STEINER_FREE_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub instance: String,
    pub n: Option<usize>,
    pub m: Option<usize>,
    /// Links after shadow closure (WTAP) or terminals (Steiner).
    pub size: Option<usize>,
    pub epsilon: f64,
    pub k: Option<usize>,
    pub engine: &'static str,
    pub weight: Option<f64>,
    pub opt: Option<f64>,
    pub ratio: Option<f64>,
    pub iterations: Option<usize>,
    pub elapsed_ms: Option<f64>,
    pub status: String,
}

impl BenchRow {
    fn failed(instance: &str, epsilon: f64, engine: &'static str, error: &CliError) -> Self {
        let kind = match error.exit_code() {
            crate::EXIT_INFEASIBLE => "infeasible",
            crate::EXIT_LIMIT => "limit",
            _ => "error",
        };
        BenchRow {
            instance: instance.to_string(),
            n: None,
            m: None,
            size: None,
            epsilon,
            k: None,
            engine,
            weight: None,
            opt: None,
            ratio: None,
            iterations: None,
            elapsed_ms: None,
            status: format!("{kind}: {error}"),
        }
    }

    pub fn ok(&self) -> bool {
        self.status == "ok"
    }

    fn record(&self) -> Vec<String> {
        fn cell<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(T::to_string).unwrap_or_default()
        }
        vec![
            self.instance.clone(),
            cell(&self.n),
            cell(&self.m),
            cell(&self.size),
            self.epsilon.to_string(),
            cell(&self.k),
            self.engine.to_string(),
            cell(&self.weight),
            cell(&self.opt),
            cell(&self.ratio),
            cell(&self.iterations),
            self.elapsed_ms
                .map(|x| format!("{x:.3}"))
                .unwrap_or_default(),
            self.status.clone(),
        ]
    }
}

struct BenchSetup {
    format: Format,
    epsilon: f64,
    args: BenchArgs,
}

fn solve_one(setup: &BenchSetup, name: &str, text: &str) -> CliResult<BenchRow> {
    let args = &setup.args;
    let started = Instant::now();
    let mut row = match setup.format {
        Format::Wtap => {
            let instance = parse_wtap(text)?;
            let options = wtap_options(
                setup.epsilon,
                args.k,
                args.engine,
                args.max_size,
                args.node_budget,
                args.time_budget,
            )?;
            let run = run_wtap(&instance, &options)?;
            if !oracles::validate_wtap(&run.instance, &run.solution) {
                return Err(CliError::Core(tapst::Error::Infeasible(
                    "solution failed validation".into(),
                )));
            }
            let opt = if instance.links.len() <= oracles::WTAP_BRUTEFORCE_LIMIT {
                Some(
                    oracles::opt_wtap_bruteforce(&instance, oracles::WTAP_BRUTEFORCE_LIMIT)?
                        .opt_value,
                )
            } else {
                None
            };
            BenchRow {
                instance: name.to_string(),
                n: Some(instance.vertex_count()),
                m: Some(instance.links.len()),
                size: Some(run.instance.links.len()),
                epsilon: setup.epsilon,
                k: Some(run.k),
                engine: engine_name(args.engine),
                weight: Some(run.weight),
                opt,
                ratio: opt.map(|o| if o > 0.0 { run.weight / o } else { 1.0 }),
                iterations: Some(run.iterations),
                elapsed_ms: None,
                status: "ok".into(),
            }
        }
        Format::Stp => {
            let instance = parse_stp(text)?;
            let options = steiner_options(setup.epsilon, args.k, args.max_size, args.time_budget)?;
            let run = run_steiner(&instance, &options)?;
            if !oracles::validate_steiner(&instance, &run.solution) {
                return Err(CliError::Core(tapst::Error::Infeasible(
                    "solution failed validation".into(),
                )));
            }
            let free = instance.vertex_count() - instance.terminals().len();
            let opt = if free <= BENCH_STEINER_FREE_LIMIT {
                Some(
                    oracles::opt_steiner_enumeration(&instance, BENCH_STEINER_FREE_LIMIT)?
                        .opt_value,
                )
            } else if instance.terminals().len() <= 12 {
                Some(oracles::opt_steiner_exact(&instance, 12)?.opt_value)
            } else {
                None
            };
            BenchRow {
                instance: name.to_string(),
                n: Some(instance.vertex_count()),
                m: Some(instance.edges().len()),
                size: Some(instance.terminals().len()),
                epsilon: setup.epsilon,
                k: Some(run.k),
                engine: "exact",
                weight: Some(run.weight),
                opt,
                ratio: opt.map(|o| if o > 0.0 { run.weight / o } else { 1.0 }),
                iterations: Some(run.iterations),
                elapsed_ms: None,
                status: "ok".into(),
            }
        }
    };
    if args.timings {
        row.elapsed_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    Ok(row)
}

fn engine_name(e: EngineArg) -> &'static str {
    match e {
        EngineArg::Exact => "exact",
        EngineArg::Heuristic => "heuristic",
    }
}

fn default_epsilon(format: Format) -> f64 {
    match format {
        Format::Wtap => 0.5,
        Format::Stp => 1.0,
    }
}

/// Solves every `(name, text)` instance, in parallel, and returns rows sorted by name.
pub fn bench_rows(args: &BenchArgs, instances: Vec<(String, String)>) -> Vec<BenchRow> {
    let setup = BenchSetup {
        format: args.format,
        epsilon: args.epsilon.unwrap_or_else(|| default_epsilon(args.format)),
        args: args.clone(),
    };
    let engine = match args.format {
        Format::Wtap => engine_name(args.engine),
        Format::Stp => "exact",
    };
    let mut rows: Vec<BenchRow> = instances
        .par_iter()
        .map(|(name, text)| {
            solve_one(&setup, name, text)
                .unwrap_or_else(|e| BenchRow::failed(name, setup.epsilon, engine, &e))
        })
        .collect();
    rows.sort_by(|a, b| a.instance.cmp(&b.instance));
    rows
}

/// The CSV table with its version comment and a trailing aggregate comment.
pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(COLUMNS).unwrap();
    for row in rows {
        writer.write_record(row.record()).unwrap();
    }
    let body = String::from_utf8(writer.into_inner().unwrap()).unwrap();
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    let max = ratios
        .iter()
        .copied()
        .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))));
    let mean = (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64);
    let show = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_else(|| "none".into());
    format!(
        "{BENCH_HEADER}\n{body}# aggregate rows={} ok={} max_ratio={} mean_ratio={}\n",
        rows.len(),
        rows.iter().filter(|r| r.ok()).count(),
        show(max),
        show(mean)
    )
}

fn load_instances(args: &BenchArgs) -> CliResult<Vec<(String, String)>> {
    let ext = match args.format {
        Format::Wtap => "wtap",
        Format::Stp => "stp",
    };
    if let Some(dir) = &args.input {
        let entries = fs::read_dir(dir).map_err(|e| CliError::Io(dir.clone(), e))?;
        let mut paths = Vec::new();
        for entry in entries {
            let path = entry.map_err(|e| CliError::Io(dir.clone(), e))?.path();
            if path.extension().and_then(|e| e.to_str()) == Some(ext) {
                paths.push(path);
            }
        }
        paths.sort();
        if paths.is_empty() {
            return Err(CliError::Usage(format!(
                "no .{ext} instances in {}",
                dir.display()
            )));
        }
        return paths
            .into_iter()
            .map(|p| {
                let name = p.file_name().unwrap().to_string_lossy().into_owned();
                fs::read_to_string(&p)
                    .map(|t| (name, t))
                    .map_err(|e| CliError::Io(p, e))
            })
            .collect();
    }
    if args.count == 0 {
        return Err(CliError::Usage("--count must be positive".into()));
    }
    (0..args.count as u64)
        .map(|i| {
            let seed = args.seed + i;
            let cfg = generator_config(
                seed,
                args.n,
                args.m,
                args.terminals,
                args.max_weight,
                args.max_span,
            );
            Ok((
                format!("gen-{seed:06}.{ext}"),
                generate_text(args.format, &cfg)?,
            ))
        })
        .collect()
}

pub(crate) fn cmd_bench(args: &BenchArgs) -> CliResult<()> {
    let instances = load_instances(args)?;
    let rows = bench_rows(args, instances);
    let text = bench_csv(&rows);
    match &args.out {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    for row in rows.iter().filter(|r| !r.ok()) {
        log::warn!("{}: {}", row.instance, row.status);
    }
    if rows.iter().any(BenchRow::ok) {
        Ok(())
    } else {
        Err(CliError::Usage("no instance was solved".into()))
    }
}
