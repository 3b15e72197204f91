use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::tree::LinkId;
use crate::wtap::search::{best_component_exact, best_component_heuristic, ExactSearchLimits};
use crate::wtap::{
    initial_wtap_solution, shadow_close, WtapInstance, WtapState, DEFAULT_SHADOW_CAP,
};
use crate::StopReason;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Exact,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WtapLimits {
    /// Component size cap for the exact engine; `None` means `min(|L|, 2k)`.
    pub size_cap: Option<usize>,
    pub node_budget: u64,
    /// Checked between iterations only.
    pub time_budget: Option<Duration>,
    pub max_iterations: Option<usize>,
    pub shadow_cap: usize,
}

impl Default for WtapLimits {
    fn default() -> Self {
        WtapLimits {
            size_cap: None,
            node_budget: 20_000_000,
            time_budget: None,
            max_iterations: None,
            shadow_cap: DEFAULT_SHADOW_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WtapOptions {
    pub epsilon: f64,
    /// Thinness bound; `None` means `ceil(4 / epsilon)`.
    pub k: Option<usize>,
    pub engine: Engine,
    pub limits: WtapLimits,
    /// Materialize all shadows before solving.
    pub shadow_close: bool,
    /// Record wall-clock time per trace row. Off by default so traces are reproducible.
    pub record_timings: bool,
}

impl WtapOptions {
    pub fn new(epsilon: f64) -> Self {
        WtapOptions {
            epsilon,
            k: None,
            engine: Engine::Exact,
            limits: WtapLimits::default(),
            shadow_close: true,
            record_timings: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WtapTraceRow {
    pub iteration: usize,
    pub potential_before: f64,
    pub potential_after: f64,
    pub solution_weight: f64,
    pub component_size: usize,
    pub drop_wbar: f64,
    pub component_weight: f64,
    pub gain: f64,
    pub accepted: bool,
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct WtapRun {
    /// The instance actually solved (shadow-closed unless disabled); solution ids refer to it.
    pub instance: WtapInstance,
    pub solution: Vec<LinkId>,
    pub weight: f64,
    pub potential: f64,
    pub initial_solution: Vec<LinkId>,
    pub initial_weight: f64,
    /// Accepted improvement steps.
    pub iterations: usize,
    pub k: usize,
    pub size_cap: usize,
    pub stop: StopReason,
    pub trace: Vec<WtapTraceRow>,
}

/// Hook points of the main loop.
pub enum WtapEvent<'e, 's> {
    Initialized(&'e WtapState<'s>),
    Step {
        before: &'e WtapState<'s>,
        after: &'e WtapState<'s>,
        component: &'e [LinkId],
        gain: f64,
        accepted: bool,
    },
}

pub fn default_k(epsilon: f64) -> usize {
    (4.0 / epsilon).ceil() as usize
}

pub fn run_wtap(instance: &WtapInstance, options: &WtapOptions) -> Result<WtapRun> {
    run_wtap_observed(instance, options, |_| {})
}

/// Local search for WTAP: repeatedly add the best k-thin component while the
/// potential shrinks by a factor of at least `1 - epsilon / (6 |V|)`.
pub fn run_wtap_observed<F>(
    instance: &WtapInstance,
    options: &WtapOptions,
    mut observe: F,
) -> Result<WtapRun>
where
    F: FnMut(WtapEvent<'_, '_>),
{
    let epsilon = options.epsilon;
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::Config(format!(
            "epsilon must lie in (0, 1/2], got {epsilon}"
        )));
    }
    let k = options.k.unwrap_or_else(|| default_k(epsilon));
    if !instance.is_feasible() {
        return Err(Error::Infeasible(
            "the full link set does not cover the tree".into(),
        ));
    }
    let solved = if options.shadow_close && !instance.shadow_closed {
        shadow_close(instance, options.limits.shadow_cap)?
    } else {
        instance.clone()
    };
    let size_cap = options
        .limits
        .size_cap
        .unwrap_or_else(|| solved.links.len().min(2 * k));
    let n = solved.vertex_count();

    if n == 1 {
        return Ok(WtapRun {
            instance: solved,
            solution: Vec::new(),
            weight: 0.0,
            potential: 0.0,
            initial_solution: Vec::new(),
            initial_weight: 0.0,
            iterations: 0,
            k,
            size_cap,
            stop: StopReason::Trivial,
            trace: Vec::new(),
        });
    }
    log::debug!(
        "wtap: n={} links={} epsilon={} k={} size_cap={}",
        n,
        solved.links.len(),
        epsilon,
        k,
        size_cap
    );

    let started = Instant::now();
    let initial_solution = initial_wtap_solution(&solved)?;
    let mut state = WtapState::init(&solved, &initial_solution, epsilon, k)?;
    observe(WtapEvent::Initialized(&state));

    let factor = 1.0 - epsilon / (6.0 * n as f64);
    let search_limits = ExactSearchLimits {
        size_cap,
        node_budget: options.limits.node_budget,
    };
    let mut trace = Vec::new();
    let mut iterations = 0;
    let stop = loop {
        if options
            .limits
            .max_iterations
            .is_some_and(|m| iterations >= m)
        {
            break StopReason::IterationLimit;
        }
        if options
            .limits
            .time_budget
            .is_some_and(|b| started.elapsed() >= b)
        {
            break StopReason::TimeBudget;
        }
        let step_started = Instant::now();
        let (component, gain) = match options.engine {
            Engine::Exact => best_component_exact(&state, &search_limits)?,
            Engine::Heuristic => best_component_heuristic(&state),
        };
        if component.is_empty() || gain <= 0.0 {
            break StopReason::NoImprovement;
        }
        let potential_before = state.potential();
        let mut tentative = state.clone();
        let report = tentative.apply_component(&component);
        let potential_after = tentative.potential();
        let accepted = potential_after <= factor * potential_before;
        trace.push(WtapTraceRow {
            iteration: iterations + 1,
            potential_before,
            potential_after,
            solution_weight: tentative.solution_weight(),
            component_size: component.len(),
            drop_wbar: report.drop_wbar,
            component_weight: report.component_weight,
            gain,
            accepted,
            elapsed_ms: options
                .record_timings
                .then(|| step_started.elapsed().as_secs_f64() * 1e3),
        });
        observe(WtapEvent::Step {
            before: &state,
            after: &tentative,
            component: &component,
            gain,
            accepted,
        });
        if !accepted {
            break StopReason::InsufficientDecrease;
        }
        state = tentative;
        iterations += 1;
    };

    let solution = state.solution();
    let weight = state.solution_weight();
    let potential = state.potential();
    let initial_weight = solved.weight_of(&initial_solution);
    drop(state);
    Ok(WtapRun {
        instance: solved,
        solution,
        weight,
        potential,
        initial_solution,
        initial_weight,
        iterations,
        k,
        size_cap,
        stop,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{Link, RootedTree};
    use crate::wtap::fixtures::*;

    #[test]
    fn path_fixture_reaches_optimum() {
        let run = run_wtap(&path_instance(), &WtapOptions::new(0.5)).unwrap();
        assert_eq!(run.weight, 2.0);
        assert!(run.instance.is_cover(&run.solution));
        assert_eq!(run.k, 8);
    }

    #[test]
    fn single_link_instance_takes_no_steps() {
        let tree = RootedTree::new(2, &[(0, 1)], 0).unwrap();
        let inst = WtapInstance::new(tree, vec![Link::new(0, 0, 1, 4.0).unwrap()]).unwrap();
        let run = run_wtap(&inst, &WtapOptions::new(0.5)).unwrap();
        assert_eq!(run.solution, vec![0]);
        assert_eq!(run.iterations, 0);
    }

    #[test]
    fn single_vertex_is_trivial() {
        let tree = RootedTree::new(1, &[], 0).unwrap();
        let inst = WtapInstance::new(tree, vec![]).unwrap();
        let run = run_wtap(&inst, &WtapOptions::new(0.5)).unwrap();
        assert!(run.solution.is_empty());
        assert_eq!(run.stop, StopReason::Trivial);
    }

    #[test]
    fn rejects_bad_epsilon_and_infeasible_instances() {
        assert!(matches!(
            run_wtap(&path_instance(), &WtapOptions::new(0.6)),
            Err(Error::Config(_))
        ));
        let tree = RootedTree::new(3, &[(0, 1), (1, 2)], 0).unwrap();
        let inst = WtapInstance::new(tree, vec![Link::new(0, 0, 1, 1.0).unwrap()]).unwrap();
        assert!(matches!(
            run_wtap(&inst, &WtapOptions::new(0.5)),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn heavy_start_improves() {
        // path 0-1-2-3; expensive parent links, one cheap long link
        let tree = RootedTree::new(4, &[(0, 1), (1, 2), (2, 3)], 0).unwrap();
        let links = vec![
            Link::new(0, 0, 1, 5.0).unwrap(),
            Link::new(1, 1, 2, 5.0).unwrap(),
            Link::new(2, 2, 3, 5.0).unwrap(),
            Link::new(3, 0, 3, 6.0).unwrap(),
        ];
        let inst = WtapInstance::new(tree, links).unwrap();
        let mut opts = WtapOptions::new(0.5);
        opts.shadow_close = false;
        let mut steps = 0;
        let run = run_wtap_observed(&inst, &opts, |event| match event {
            WtapEvent::Initialized(s) => s.check_invariants().unwrap(),
            WtapEvent::Step {
                before,
                after,
                gain,
                accepted,
                ..
            } => {
                after.check_invariants().unwrap();
                assert!(before.potential() - after.potential() >= gain - 1e-9 * before.potential());
                if accepted {
                    steps += 1;
                }
            }
        })
        .unwrap();
        assert_eq!(run.solution, vec![3]);
        assert_eq!(run.weight, 6.0);
        assert_eq!(steps, run.iterations);
        assert!(run
            .trace
            .iter()
            .filter(|r| r.accepted)
            .all(|r| r.potential_after <= r.potential_before));
    }
}
