use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::steiner::component::{
    witness_tree_for_component, SteinerComponent, DEFAULT_WITNESS_LIMIT,
};
use crate::steiner::state::SteinerState;
use crate::steiner::{dreyfus_wagner, SteinerInstance, DEFAULT_DW_LIMIT};
use crate::tree::{EdgeId, Vertex};
use crate::{harmonic, StopReason, LN_4};

/// `2^ceil(2 ln 4 / epsilon)`, saturating at `usize::MAX`.
pub fn choose_k(epsilon: f64) -> usize {
    let exponent = (2.0 * LN_4 / epsilon).ceil();
    if exponent >= usize::BITS as f64 {
        usize::MAX
    } else {
        1usize << exponent as u32
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteinerLimits {
    /// Largest `|T_C|` handed to the exact tree and witness-tree routines.
    pub component_terminals: usize,
    /// Largest number of terminal subsets in the component catalog.
    pub catalog_size: usize,
    /// Checked between iterations only.
    pub time_budget: Option<Duration>,
    pub max_iterations: Option<usize>,
}

impl Default for SteinerLimits {
    fn default() -> Self {
        SteinerLimits {
            component_terminals: DEFAULT_WITNESS_LIMIT,
            catalog_size: 200_000,
            time_budget: None,
            max_iterations: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteinerOptions {
    pub epsilon: f64,
    /// Component size bound; `None` means [`choose_k`].
    pub k: Option<usize>,
    pub limits: SteinerLimits,
    pub record_timings: bool,
}

impl SteinerOptions {
    pub fn new(epsilon: f64, k: Option<usize>) -> Self {
        SteinerOptions {
            epsilon,
            k,
            limits: SteinerLimits::default(),
            record_timings: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteinerTraceRow {
    pub iteration: usize,
    pub k: usize,
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
pub struct SteinerRun {
    pub solution: Vec<EdgeId>,
    pub weight: f64,
    pub potential: f64,
    pub initial_solution: Vec<EdgeId>,
    pub initial_weight: f64,
    pub iterations: usize,
    pub k: usize,
    pub stop: StopReason,
    pub trace: Vec<SteinerTraceRow>,
}

pub enum SteinerEvent<'e, 's> {
    Initialized(&'e SteinerState<'s>),
    Step {
        before: &'e SteinerState<'s>,
        after: &'e SteinerState<'s>,
        component: &'e SteinerComponent,
        gain: f64,
        accepted: bool,
    },
}

/// Cheapest component with its witness tree for every terminal subset of size
/// `2..=k`, ordered by size and then lexicographically. Depends only on the instance.
#[derive(Debug, Clone)]
pub struct ComponentCatalog {
    components: Vec<SteinerComponent>,
}

fn binomial(n: usize, r: usize) -> usize {
    (0..r).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn subsets_of_size(items: &[Vertex], size: usize, out: &mut Vec<Vec<Vertex>>) {
    fn go(
        items: &[Vertex],
        size: usize,
        start: usize,
        cur: &mut Vec<Vertex>,
        out: &mut Vec<Vec<Vertex>>,
    ) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < size - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, size, i + 1, cur, out);
            cur.pop();
        }
    }
    go(items, size, 0, &mut Vec::new(), out);
}

impl ComponentCatalog {
    pub fn build(instance: &SteinerInstance, k: usize, limits: &SteinerLimits) -> Result<Self> {
        let terminals = instance.terminals();
        let top = k.min(terminals.len());
        if top > limits.component_terminals {
            return Err(Error::SizeLimit {
                what: "component terminal count k",
                limit: limits.component_terminals,
                actual: top,
            });
        }
        let count: usize = (2..=top).fold(0usize, |acc, r| {
            acc.saturating_add(binomial(terminals.len(), r))
        });
        if count > limits.catalog_size {
            return Err(Error::SizeLimit {
                what: "component catalog",
                limit: limits.catalog_size,
                actual: count,
            });
        }
        let mut subsets = Vec::with_capacity(count);
        for r in 2..=top {
            subsets_of_size(terminals, r, &mut subsets);
        }
        let dw_limit = limits.component_terminals.max(DEFAULT_DW_LIMIT);
        let components = subsets
            .iter()
            .map(|subset| {
                let (edges, _) = dreyfus_wagner(instance, subset, dw_limit)?;
                witness_tree_for_component(instance, &edges, subset, limits.component_terminals)
            })
            .collect::<Result<Vec<_>>>()?;
        log::debug!("component catalog holds {} components", components.len());
        Ok(ComponentCatalog { components })
    }

    pub fn components(&self) -> &[SteinerComponent] {
        &self.components
    }

    /// The first component of maximum gain, if that gain is positive.
    pub fn best<'c>(&'c self, state: &SteinerState<'_>) -> Option<(&'c SteinerComponent, f64)> {
        let mut best: Option<(&SteinerComponent, f64)> = None;
        for c in &self.components {
            let gain = state.gain(c);
            if gain > 0.0 && best.is_none_or(|(_, g)| gain > g) {
                best = Some((c, gain));
            }
        }
        best
    }
}

/// Best k-component for `state`, computing every candidate from scratch.
pub fn best_k_component(
    state: &SteinerState<'_>,
    limits: &SteinerLimits,
) -> Result<Option<(SteinerComponent, f64)>> {
    let catalog = ComponentCatalog::build(state.instance(), state.k(), limits)?;
    Ok(catalog.best(state).map(|(c, g)| (c.clone(), g)))
}

pub fn run_steiner(instance: &SteinerInstance, options: &SteinerOptions) -> Result<SteinerRun> {
    run_steiner_observed(instance, options, |_| {})
}

/// Local search for Steiner tree: repeatedly add the best k-component while the
/// potential shrinks by a factor of at least `1 - epsilon / (2 H_n ln 4 |T|)`.
pub fn run_steiner_observed<F>(
    instance: &SteinerInstance,
    options: &SteinerOptions,
    mut observe: F,
) -> Result<SteinerRun>
where
    F: FnMut(SteinerEvent<'_, '_>),
{
    let epsilon = options.epsilon;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Config(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    let k = options.k.unwrap_or_else(|| choose_k(epsilon));
    if k < 2 {
        return Err(Error::Config(format!("k must be at least 2, got {k}")));
    }
    if instance.terminals().len() == 1 {
        return Ok(SteinerRun {
            solution: Vec::new(),
            weight: 0.0,
            potential: 0.0,
            initial_solution: Vec::new(),
            initial_weight: 0.0,
            iterations: 0,
            k,
            stop: StopReason::Trivial,
            trace: Vec::new(),
        });
    }

    let started = Instant::now();
    let mut state = SteinerState::init(instance, epsilon, k)?;
    let initial_solution = state.solution();
    let initial_weight = state.solution_weight();
    observe(SteinerEvent::Initialized(&state));
    let catalog = ComponentCatalog::build(instance, k, &options.limits)?;

    let n = instance.vertex_count();
    let factor = 1.0 - epsilon / (2.0 * harmonic(n) * LN_4 * instance.terminals().len() as f64);
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
        let Some((component, gain)) = catalog.best(&state) else {
            break StopReason::NoImprovement;
        };
        let potential_before = state.potential();
        let mut tentative = state.clone();
        let report = tentative.apply_component(component);
        let potential_after = tentative.potential();
        let accepted = potential_after <= factor * potential_before;
        trace.push(SteinerTraceRow {
            iteration: iterations + 1,
            k,
            potential_before,
            potential_after,
            solution_weight: tentative.solution_weight(),
            component_size: component.terminals.len(),
            drop_wbar: report.drop_wbar,
            component_weight: report.component_weight,
            gain,
            accepted,
            elapsed_ms: options
                .record_timings
                .then(|| step_started.elapsed().as_secs_f64() * 1e3),
        });
        observe(SteinerEvent::Step {
            before: &state,
            after: &tentative,
            component,
            gain,
            accepted,
        });
        if !accepted {
            break StopReason::InsufficientDecrease;
        }
        state = tentative;
        iterations += 1;
    };

    Ok(SteinerRun {
        solution: state.solution(),
        weight: state.solution_weight(),
        potential: state.potential(),
        initial_solution,
        initial_weight,
        iterations,
        k,
        stop,
        trace,
    })
}
