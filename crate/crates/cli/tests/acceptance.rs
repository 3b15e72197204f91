use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tapst::io::{
    gen_steiner, gen_wtap, parse_stp, parse_wtap, write_stp, write_wtap, GeneratorConfig,
};
use tapst::oracles::{
    best_component_bruteforce_wtap, drop_bruteforce_steiner, opt_krestricted_bruteforce,
    opt_steiner_enumeration, opt_wtap_bruteforce,
};
use tapst::steiner::{
    dreyfus_wagner, run_steiner_observed, witness_tree_for_component, ComponentCatalog,
    SteinerEvent, SteinerInstance, SteinerLimits, SteinerOptions, SteinerState, DEFAULT_DW_LIMIT,
    DEFAULT_WITNESS_LIMIT,
};
use tapst::tree::{Link, RootedTree};
use tapst::wtap::{
    best_component_exact, initial_wtap_solution, run_wtap_observed, shadow_close, Engine,
    ExactSearchLimits, UpLink, WtapEvent, WtapInstance, WtapOptions, WtapState,
};
use tapst::LN_4;

const WTAP_CORPUS: u64 = 120;
const STEINER_CORPUS: u64 = 60;
const EPSILON: f64 = 0.5;

struct Outcome {
    name: &'static str,
    failures: Vec<String>,
    detail: String,
}

impl Outcome {
    fn new(name: &'static str) -> Self {
        Outcome {
            name,
            failures: Vec::new(),
            detail: String::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

/// Shadow-closed instance with at most 15 links; seeds are retried until one fits.
fn wtap_instance(index: u64) -> WtapInstance {
    let n = 4 + (index % 7) as usize;
    for attempt in 0.. {
        let mut cfg = GeneratorConfig::new(index * 1_000 + attempt, n, n + 1);
        cfg.max_link_span = Some(2);
        let closed = shadow_close(&gen_wtap(&cfg).unwrap(), 1_000).unwrap();
        if closed.links.len() <= 15 {
            return closed;
        }
    }
    unreachable!()
}

fn steiner_instance(index: u64) -> SteinerInstance {
    let n = 4 + (index % 7) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(index);
    let max_edges = n * (n - 1) / 2;
    let mut cfg = GeneratorConfig::new(index, n, rng.gen_range(n - 1..=max_edges.min(2 * n)));
    cfg.terminal_count = rng.gen_range(2..=5.min(n));
    gen_steiner(&cfg).unwrap()
}

#[derive(Default)]
struct WtapSweep {
    approximation: Vec<String>,
    iterations: Vec<String>,
    per_step: Vec<String>,
    feasibility: Vec<String>,
    conservation: Vec<String>,
    worst_ratio: f64,
    steps: usize,
    checkpoints: usize,
}

fn wtap_checkpoint(sweep: &mut WtapSweep, tag: &str, state: &WtapState<'_>) {
    sweep.checkpoints += 1;
    let inst = state.instance();
    if !inst.is_cover(&state.solution()) || !state.uplinks_cover() || !state.uplinks_disjoint() {
        sweep
            .feasibility
            .push(format!("{tag}: cover or disjointness violated"));
    }
    let w = state.solution_weight();
    if (state.total_wbar() - w).abs() > 1e-9 * w {
        sweep
            .conservation
            .push(format!("{tag}: wbar {} vs w(F) {w}", state.total_wbar()));
    }
}

fn sweep_wtap() -> WtapSweep {
    let mut sweep = WtapSweep::default();
    for index in 0..WTAP_CORPUS {
        let instance = wtap_instance(index);
        let opt = opt_wtap_bruteforce(&instance, 22).unwrap().opt_value;
        let mut options = WtapOptions::new(EPSILON);
        options.k = Some(8);
        options.engine = Engine::Exact;
        let mut local = WtapSweep::default();
        let run = run_wtap_observed(&instance, &options, |event| match event {
            WtapEvent::Initialized(state) => {
                wtap_checkpoint(&mut local, &format!("#{index} init"), state)
            }
            WtapEvent::Step {
                before,
                after,
                gain,
                accepted,
                ..
            } => {
                if !accepted {
                    return;
                }
                local.steps += 1;
                wtap_checkpoint(&mut local, &format!("#{index} step"), after);
                let decrease = before.potential() - after.potential();
                if decrease < gain - 1e-9 * before.potential() {
                    local.per_step.push(format!(
                        "#{index}: potential fell {decrease} for gain {gain}"
                    ));
                }
            }
        })
        .unwrap();
        sweep.feasibility.append(&mut local.feasibility);
        sweep.conservation.append(&mut local.conservation);
        sweep.per_step.append(&mut local.per_step);
        sweep.steps += local.steps;
        sweep.checkpoints += local.checkpoints;

        let ratio = run.weight / opt;
        sweep.worst_ratio = sweep.worst_ratio.max(ratio);
        if run.weight > (1.5 + EPSILON) * opt {
            sweep
                .approximation
                .push(format!("#{index}: w(F) = {} vs OPT = {opt}", run.weight));
        }
        let n = instance.vertex_count() as f64;
        let bound = (1.5 * run.initial_weight / opt).ln() * 6.0 * n / EPSILON + 1.0;
        if run.iterations as f64 > bound {
            sweep.iterations.push(format!(
                "#{index}: {} iterations vs bound {bound}",
                run.iterations
            ));
        }
    }
    sweep
}

#[derive(Default)]
struct SteinerSweep {
    approximation: Vec<String>,
    restricted: Vec<String>,
    conservation: Vec<String>,
    witness_bound: Vec<String>,
    components: usize,
    restricted_checked: usize,
    worst_ratio: f64,
    checkpoints: usize,
}

fn steiner_checkpoint(sweep: &mut SteinerSweep, tag: &str, state: &SteinerState<'_>) {
    sweep.checkpoints += 1;
    let w = state.solution_weight();
    if (state.total_wbar() - w).abs() > 1e-9 * w {
        sweep
            .conservation
            .push(format!("{tag}: wbar {} vs w(F) {w}", state.total_wbar()));
    }
    if let Err(e) = state.check_invariants() {
        sweep.conservation.push(format!("{tag}: {e}"));
    }
}

fn sweep_steiner() -> SteinerSweep {
    let mut sweep = SteinerSweep::default();
    for index in 0..STEINER_CORPUS {
        let instance = steiner_instance(index);
        let catalog = ComponentCatalog::build(&instance, 3, &SteinerLimits::default()).unwrap();
        for c in catalog.components() {
            sweep.components += 1;
            if c.potential > LN_4 * c.weight + 1e-9 * c.weight {
                sweep.witness_bound.push(format!(
                    "#{index} {:?}: Phi(C) = {} vs w(C) = {}",
                    c.terminals, c.potential, c.weight
                ));
            }
        }
        let mut local = SteinerSweep::default();
        let run =
            run_steiner_observed(&instance, &SteinerOptions::new(EPSILON, Some(3)), |event| {
                match event {
                    SteinerEvent::Initialized(state) => {
                        steiner_checkpoint(&mut local, &format!("#{index} init"), state)
                    }
                    SteinerEvent::Step {
                        after, accepted, ..
                    } => {
                        if accepted {
                            steiner_checkpoint(&mut local, &format!("#{index} step"), after);
                        }
                    }
                }
            })
            .unwrap();
        sweep.conservation.append(&mut local.conservation);
        sweep.checkpoints += local.checkpoints;

        let opt = opt_steiner_enumeration(&instance, 20).unwrap().opt_value;
        let factor = (LN_4 + EPSILON) * 2.0;
        if opt > 0.0 {
            sweep.worst_ratio = sweep.worst_ratio.max(run.weight / opt);
        }
        if run.weight > factor * opt * (1.0 + 1e-9) {
            sweep
                .approximation
                .push(format!("#{index}: w(F) = {} vs OPT = {opt}", run.weight));
        }
        if instance.terminals().len() <= 6 {
            sweep.restricted_checked += 1;
            let opt_k = opt_krestricted_bruteforce(&instance, 3, 6)
                .unwrap()
                .opt_value;
            if run.weight > (LN_4 + EPSILON) * opt_k * (1.0 + 1e-9) {
                sweep.restricted.push(format!(
                    "#{index}: w(F) = {} vs OPT_3 = {opt_k}",
                    run.weight
                ));
            }
        }
    }
    sweep
}

fn random_cover(instance: &WtapInstance, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..instance.links.len()).collect();
    ids.shuffle(rng);
    let mut chosen = Vec::new();
    for id in ids {
        if instance.is_cover(&chosen) {
            break;
        }
        chosen.push(id);
    }
    chosen
}

fn component_search() -> Outcome {
    let mut out = Outcome::new("wtap component search equals enumeration");
    let mut states = 0;
    let mut index = 0u64;
    while states < 200 {
        index += 1;
        let instance = wtap_instance(10_000 + index);
        if instance.links.len() > 12 {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(index);
        let k = rng.gen_range(2..=4);
        let start = if index.is_multiple_of(2) {
            random_cover(&instance, &mut rng)
        } else {
            initial_wtap_solution(&instance).unwrap()
        };
        let state = WtapState::init(&instance, &start, EPSILON, k).unwrap();
        let size_cap = instance.links.len().min(2 * k);
        let limits = ExactSearchLimits {
            size_cap,
            node_budget: 10_000_000,
        };
        let (_, engine) = best_component_exact(&state, &limits).unwrap();
        let (_, oracle) = best_component_bruteforce_wtap(&state, size_cap, 12).unwrap();
        out.check(engine == oracle, || {
            format!("state {index}: engine {engine} vs oracle {oracle}")
        });
        states += 1;
    }
    out.detail = format!("{states} states");
    out
}

fn pruned_spanning_tree(
    instance: &SteinerInstance,
    keep: &[usize],
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let n = instance.vertex_count();
    let mut order: Vec<usize> = (0..instance.edges().len()).collect();
    order.shuffle(rng);
    let mut label: Vec<usize> = (0..n).collect();
    let mut edges = BTreeSet::new();
    for id in order {
        let e = instance.edge(id);
        let (a, b) = (label[e.u], label[e.v]);
        if a != b {
            label.iter_mut().filter(|l| **l == a).for_each(|l| *l = b);
            edges.insert(id);
        }
    }
    loop {
        let mut degree = vec![0usize; n];
        for &id in &edges {
            degree[instance.edge(id).u] += 1;
            degree[instance.edge(id).v] += 1;
        }
        let leaf = edges.iter().copied().find(|&id| {
            let e = instance.edge(id);
            [e.u, e.v]
                .iter()
                .any(|v| degree[*v] == 1 && !keep.contains(v))
        });
        match leaf {
            Some(id) => {
                edges.remove(&id);
            }
            None => return edges.into_iter().collect(),
        }
    }
}

fn subset(terminals: &[usize], rng: &mut ChaCha8Rng, max: usize) -> Vec<usize> {
    let size = rng.gen_range(2..=max.min(terminals.len()));
    let mut tc: Vec<usize> = terminals.choose_multiple(rng, size).copied().collect();
    tc.sort_unstable();
    tc
}

fn drop_correctness() -> Outcome {
    let mut out = Outcome::new("steiner drop equals enumeration and depends only on T_C");
    let mut states = 0;
    let mut index = 0u64;
    while states < 200 {
        index += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(index);
        let n = rng.gen_range(5..=10);
        let mut cfg = GeneratorConfig::new(
            20_000 + index,
            n,
            rng.gen_range(n - 1..=(2 * n).min(n * (n - 1) / 2)),
        );
        cfg.terminal_count = rng.gen_range(3..=n.min(9));
        let instance = gen_steiner(&cfg).unwrap();
        let mut state = SteinerState::init(&instance, EPSILON, 3).unwrap();
        for _ in 0..rng.gen_range(0..3) {
            let tc = subset(instance.terminals(), &mut rng, 3);
            let edges = pruned_spanning_tree(&instance, &tc, &mut rng);
            let c =
                witness_tree_for_component(&instance, &edges, &tc, DEFAULT_WITNESS_LIMIT).unwrap();
            state.apply_component(&c);
        }
        if state.terminal_tree().len() > 8 {
            continue;
        }
        let tc = subset(instance.terminals(), &mut rng, 4);
        let (_, oracle) = drop_bruteforce_steiner(&state, &tc, 8).unwrap();
        let engine = state.drop_wbar(&tc);
        out.check(engine == oracle, || {
            format!("state {index}: drop {engine} vs oracle {oracle}")
        });

        let (dw, _) = dreyfus_wagner(&instance, &tc, DEFAULT_DW_LIMIT).unwrap();
        let other = pruned_spanning_tree(&instance, &tc, &mut rng);
        let a = witness_tree_for_component(&instance, &dw, &tc, DEFAULT_WITNESS_LIMIT).unwrap();
        let b = witness_tree_for_component(&instance, &other, &tc, DEFAULT_WITNESS_LIMIT).unwrap();
        let (da, db) = (state.drop_wbar(&a.terminals), state.drop_wbar(&b.terminals));
        out.check(da == db, || {
            format!("state {index}: trees on {tc:?} give drops {da} and {db}")
        });
        states += 1;
    }
    out.detail = format!("{states} states");
    out
}

fn star_witness_potential() -> f64 {
    let star =
        SteinerInstance::new(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)], &[1, 2, 3]).unwrap();
    witness_tree_for_component(&star, &[0, 1, 2], &[1, 2, 3], DEFAULT_WITNESS_LIMIT)
        .unwrap()
        .potential
}

fn up(lower: usize, upper: usize) -> UpLink {
    UpLink { lower, upper }
}

fn wtap_exchange(out: &mut Outcome) {
    let edges = [
        (1, 0),
        (3, 2),
        (0, 3),
        (3, 4),
        (4, 5),
        (5, 6),
        (4, 7),
        (7, 8),
        (7, 9),
        (7, 10),
        (10, 11),
        (10, 12),
    ];
    let tree = RootedTree::new(13, &edges, 0).unwrap();
    let links = [
        (1, 5, 2.0),
        (3, 6, 3.0),
        (8, 9, 4.0),
        (2, 10, 2.0),
        (11, 12, 2.0),
        (6, 8, 1.0),
        (10, 9, 1.0),
    ]
    .iter()
    .enumerate()
    .map(|(id, &(a, b, w))| Link::new(id, a, b, w).unwrap())
    .collect();
    let instance = WtapInstance::new(tree, links).unwrap();
    let witnesses = vec![
        (0, vec![up(1, 0), up(5, 0)]),
        (1, vec![up(6, 5)]),
        (2, vec![up(8, 7), up(9, 7)]),
        (3, vec![up(2, 3), up(10, 4)]),
        (4, vec![up(11, 10), up(12, 10)]),
    ];
    let mut state = WtapState::from_witnesses(&instance, &witnesses, EPSILON, 8).unwrap();
    let report = state.apply_component(&[5, 6]);
    out.check(report.removed_links == [1, 2], || {
        format!("tree exchange removed {:?}", report.removed_links)
    });
    out.check(state.witness(3) == Some(vec![up(2, 3)]), || {
        format!("shrunk witness set is {:?}", state.witness(3))
    });
    let mut cyan = state.witness(5).unwrap_or_default();
    cyan.sort();
    out.check(cyan == [up(6, 5), up(8, 4)], || {
        format!("new witness set is {cyan:?}")
    });
    out.check(state.check_invariants().is_ok(), || {
        "tree exchange broke an invariant".into()
    });
}

fn steiner_exchange(out: &mut Outcome) {
    let text = fs::read_to_string(fixture("exchange.stp")).unwrap();
    let instance = parse_stp(&text).unwrap();
    let (e1, e2, e3, e4, e5, e6) = ((0, 1), (0, 3), (2, 3), (3, 4), (3, 5), (5, 6));
    let sets = [
        (0, vec![e1, e2]),
        (1, vec![e1]),
        (2, vec![e2]),
        (3, vec![e3]),
        (4, vec![e2, e3]),
        (5, vec![e4, e5]),
        (6, vec![e4]),
        (7, vec![e5]),
        (8, vec![e6]),
    ];
    let witnesses: BTreeMap<usize, BTreeSet<(usize, usize)>> = sets
        .into_iter()
        .map(|(e, ps)| (e, ps.into_iter().collect()))
        .collect();
    let mut state = SteinerState::from_witnesses(&instance, witnesses, EPSILON, 3).unwrap();
    let component =
        witness_tree_for_component(&instance, &[9, 10, 11], &[2, 5, 6], DEFAULT_WITNESS_LIMIT)
            .unwrap();
    let report = state.apply_component(&component);
    out.check(report.dropped == [e5, e6], || {
        format!("steiner exchange dropped {:?}", report.dropped)
    });
    out.check(report.removed_edges == [7, 8], || {
        format!("steiner exchange removed {:?}", report.removed_edges)
    });
    out.check(state.witness(5) == Some(&BTreeSet::from([e4])), || {
        "shared edge lost e4".into()
    });
    out.check(state.check_invariants().is_ok(), || {
        "steiner exchange broke an invariant".into()
    });
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn tapst(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_tapst"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(out.stdout)
    } else {
        Err(format!("{args:?} exited with {:?}", out.status.code()))
    }
}

/// Runs generation, both solvers and the bench into `dir`, returning every produced byte.
fn cli_artifacts(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();
    tapst(&[
        "gen",
        "--format",
        "wtap",
        "--seed",
        "7",
        "--n",
        "9",
        "--m",
        "10",
        "--max-span",
        "2",
        "--out",
        &p("g.wtap"),
    ])?;
    tapst(&[
        "gen",
        "--format",
        "stp",
        "--seed",
        "7",
        "--n",
        "9",
        "--m",
        "14",
        "--terminals",
        "4",
        "--out",
        &p("g.stp"),
    ])?;
    let mut stdout = Vec::new();
    stdout.extend(tapst(&[
        "wtap-solve",
        "--input",
        &p("g.wtap"),
        "--k",
        "8",
        "--out",
        &p("w.sol"),
        "--trace",
        &p("w.csv"),
    ])?);
    stdout.extend(tapst(&[
        "steiner-solve",
        "--input",
        &p("g.stp"),
        "--epsilon",
        "0.5",
        "--k",
        "3",
        "--out",
        &p("s.sol"),
        "--trace",
        &p("s.csv"),
    ])?);
    stdout.extend(tapst(&[
        "bench",
        "--format",
        "stp",
        "--count",
        "5",
        "--seed",
        "11",
        "--n",
        "8",
        "--m",
        "12",
        "--terminals",
        "4",
        "--k",
        "3",
        "--out",
        &p("b.csv"),
    ])?);
    let mut files = vec![("stdout".to_string(), stdout)];
    for name in [
        "g.wtap", "g.stp", "w.sol", "w.csv", "s.sol", "s.csv", "b.csv",
    ] {
        files.push((
            name.to_string(),
            fs::read(dir.join(name)).map_err(|e| e.to_string())?,
        ));
    }
    Ok(files)
}

fn determinism() -> Outcome {
    let mut out = Outcome::new("byte-identical output across runs");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    match (cli_artifacts(a.path()), cli_artifacts(b.path())) {
        (Ok(first), Ok(second)) => {
            for ((name, x), (_, y)) in first.iter().zip(&second) {
                out.check(x == y, || format!("{name} differs"));
            }
            out.detail = format!("{} artifacts", first.len());
        }
        (Err(e), _) | (_, Err(e)) => out.failures.push(e),
    }
    out
}

fn declared(text: &str, key: &str) -> Option<usize> {
    text.lines().find_map(|l| {
        let mut f = l.split_whitespace();
        (f.next() == Some(key))
            .then(|| f.next()?.parse().ok())
            .flatten()
    })
}

fn round_trips() -> Outcome {
    let mut out = Outcome::new("parser round trips and bundled fixtures");
    for seed in 0..100u64 {
        let n = 1 + (seed % 12) as usize;
        let mut cfg = GeneratorConfig::new(seed, n, n + 3);
        cfg.max_link_span = Some(1 + (seed % 3) as usize);
        let w = gen_wtap(&cfg).unwrap();
        let text = write_wtap(&w);
        let ok = parse_wtap(&text).map(|p| p == w && write_wtap(&p) == text);
        out.check(ok == Ok(true), || {
            format!("wtap seed {seed} does not round-trip")
        });

        let mut cfg =
            GeneratorConfig::new(seed, n, (n - 1 + (seed % 5) as usize).min(n * (n - 1) / 2));
        cfg.terminal_count = 1 + (seed as usize % n);
        let s = gen_steiner(&cfg).unwrap();
        let text = write_stp(&s);
        let ok = parse_stp(&text).map(|p| p == s && write_stp(&p) == text);
        out.check(ok == Ok(true), || {
            format!("stp seed {seed} does not round-trip")
        });
    }
    let mut fixtures = 0;
    for entry in fs::read_dir(fixture("")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("stp") {
            continue;
        }
        fixtures += 1;
        let text = fs::read_to_string(&path).unwrap();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        match parse_stp(&text) {
            Ok(inst) => {
                let counts = (
                    inst.vertex_count(),
                    inst.edges().len(),
                    inst.terminals().len(),
                );
                let want = (
                    declared(&text, "Nodes").unwrap_or(usize::MAX),
                    declared(&text, "Edges").unwrap_or(usize::MAX),
                    declared(&text, "Terminals").unwrap_or(usize::MAX),
                );
                out.check(counts == want, || {
                    format!("{name}: parsed {counts:?}, declared {want:?}")
                });
            }
            Err(e) => out.failures.push(format!("{name}: {e}")),
        }
    }
    out.detail = format!("200 generated instances, {fixtures} fixtures");
    out
}

fn outcome(name: &'static str, failures: Vec<String>, detail: String) -> Outcome {
    Outcome {
        name,
        failures,
        detail,
    }
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut results = Vec::new();

    let w = sweep_wtap();
    results.push(outcome(
        "wtap approximation w(F) <= 2 OPT",
        w.approximation,
        format!("{WTAP_CORPUS} instances, worst ratio {:.4}", w.worst_ratio),
    ));
    results.push(outcome(
        "wtap iteration bound",
        w.iterations,
        format!("{WTAP_CORPUS} instances"),
    ));
    results.push(outcome(
        "wtap potential decrease per step",
        w.per_step,
        format!("{} steps", w.steps),
    ));
    results.push(outcome(
        "wtap cover and disjointness",
        w.feasibility,
        format!("{} checkpoints", w.checkpoints),
    ));

    let s = sweep_steiner();
    let mut conservation = w.conservation;
    conservation.extend(s.conservation);
    results.push(outcome(
        "weight conservation in both engines",
        conservation,
        format!("{} checkpoints", w.checkpoints + s.checkpoints),
    ));
    results.push(component_search());

    let star = star_witness_potential();
    let mut bound = s.witness_bound;
    if star != 3.5 {
        bound.push(format!("star component potential {star}, expected 3.5"));
    }
    results.push(outcome(
        "steiner witness bound",
        bound,
        format!("{} components, star potential {star}", s.components),
    ));
    results.push(drop_correctness());

    let mut approx = s.approximation;
    approx.extend(s.restricted);
    results.push(outcome(
        "steiner approximation against OPT and OPT_3",
        approx,
        format!(
            "{STEINER_CORPUS} instances, worst ratio {:.4}, {} k-restricted checks",
            s.worst_ratio, s.restricted_checked
        ),
    ));

    let mut exchanges = Outcome::new("scripted exchange fixtures");
    wtap_exchange(&mut exchanges);
    steiner_exchange(&mut exchanges);
    exchanges.detail = "tree and steiner exchanges".into();
    results.push(exchanges);
    results.push(determinism());
    results.push(round_trips());

    let mut failed = 0;
    for (i, r) in results.iter().enumerate() {
        let verdict = if r.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        println!("criterion {:>2} {verdict} {} ({})", i + 1, r.name, r.detail);
        for f in r.failures.iter().take(5) {
            println!("    {f}");
        }
        if !r.failures.is_empty() {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        results.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
