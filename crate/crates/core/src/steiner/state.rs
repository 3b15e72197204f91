use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::steiner::{metric_closure, terminal_mst, Dsu, Pair, SteinerComponent, SteinerInstance};
use crate::tree::{EdgeId, Vertex};
use crate::{harmonic, LN_4};

#[derive(Debug, Clone, PartialEq)]
pub struct SteinerStepReport {
    pub dropped: Vec<Pair>,
    pub drop_wbar: f64,
    pub component_weight: f64,
    /// Solution edges whose witness set became empty.
    pub removed_edges: Vec<EdgeId>,
}

/// Solution edges with their witness sets of terminal pairs.
#[derive(Debug, Clone)]
pub struct SteinerState<'a> {
    instance: &'a SteinerInstance,
    witnesses: BTreeMap<EdgeId, BTreeSet<Pair>>,
    epsilon: f64,
    k: usize,
}

/// Sums values in ascending order so equal multisets give identical totals.
pub(crate) fn sorted_sum(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values.into_iter().sum()
}

impl<'a> SteinerState<'a> {
    /// Starts from the terminal spanning tree of the metric closure: every tree pair
    /// is routed along its shortest path and witnesses each edge on it.
    pub fn init(instance: &'a SteinerInstance, epsilon: f64, k: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Config(format!(
                "epsilon must lie in (0, 1], got {epsilon}"
            )));
        }
        if k < 2 {
            return Err(Error::Config(format!("k must be at least 2, got {k}")));
        }
        let closure = metric_closure(instance)?;
        let mut witnesses: BTreeMap<EdgeId, BTreeSet<Pair>> = BTreeMap::new();
        for (a, b) in terminal_mst(&closure) {
            for e in closure.path(instance, a, b) {
                witnesses.entry(e).or_default().insert((a, b));
            }
        }
        Ok(SteinerState {
            instance,
            witnesses,
            epsilon,
            k,
        })
    }

    /// Builds a state from explicit witness sets, which must satisfy every invariant.
    pub fn from_witnesses(
        instance: &'a SteinerInstance,
        witnesses: BTreeMap<EdgeId, BTreeSet<Pair>>,
        epsilon: f64,
        k: usize,
    ) -> Result<Self> {
        if witnesses.keys().any(|&e| e >= instance.edges().len()) {
            return Err(Error::Config("witness map names an unknown edge".into()));
        }
        let state = SteinerState {
            instance,
            witnesses,
            epsilon,
            k,
        };
        state.check_invariants().map_err(Error::Config)?;
        Ok(state)
    }

    pub fn instance(&self) -> &'a SteinerInstance {
        self.instance
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Sorted edge ids of `F`.
    pub fn solution(&self) -> Vec<EdgeId> {
        self.witnesses.keys().copied().collect()
    }

    pub fn solution_weight(&self) -> f64 {
        self.witnesses
            .keys()
            .map(|&e| self.instance.edge(e).weight)
            .sum()
    }

    pub fn witness(&self, edge: EdgeId) -> Option<&BTreeSet<Pair>> {
        self.witnesses.get(&edge)
    }

    pub fn witnesses(&self) -> &BTreeMap<EdgeId, BTreeSet<Pair>> {
        &self.witnesses
    }

    /// The terminal tree `S` with the spread weight of every pair.
    pub fn terminal_tree(&self) -> BTreeMap<Pair, f64> {
        let mut wbar: BTreeMap<Pair, f64> = BTreeMap::new();
        for (&e, set) in &self.witnesses {
            let share = self.instance.edge(e).weight / set.len() as f64;
            for p in set {
                *wbar.entry(*p).or_insert(0.0) += share;
            }
        }
        wbar
    }

    pub fn total_wbar(&self) -> f64 {
        self.terminal_tree().values().sum()
    }

    pub fn potential(&self) -> f64 {
        self.witnesses
            .iter()
            .map(|(&e, set)| harmonic(set.len()) * self.instance.edge(e).weight)
            .sum()
    }

    /// Maximum-`wbar` pair set whose removal leaves `(T, S \ D)` connected once
    /// `component_terminals` is contracted: the complement of a minimum spanning tree
    /// of the contracted terminal tree, with ties broken by pair.
    pub fn drop_s(&self, component_terminals: &[Vertex]) -> Vec<Pair> {
        let terminals = self.instance.terminals();
        let index = |t: Vertex| {
            terminals
                .binary_search(&t)
                .expect("component vertex is a terminal")
        };
        let mut dsu = Dsu::new(terminals.len());
        if let Some((&first, rest)) = component_terminals.split_first() {
            for &t in rest {
                dsu.union(index(first), index(t));
            }
        }
        let mut pairs: Vec<(f64, Pair)> = self
            .terminal_tree()
            .into_iter()
            .map(|(p, w)| (w, p))
            .collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        let mut dropped: Vec<Pair> = pairs
            .into_iter()
            .filter(|&(_, (a, b))| !dsu.union(index(a), index(b)))
            .map(|(_, p)| p)
            .collect();
        dropped.sort_unstable();
        dropped
    }

    pub fn drop_wbar(&self, component_terminals: &[Vertex]) -> f64 {
        let wbar = self.terminal_tree();
        sorted_sum(
            self.drop_s(component_terminals)
                .iter()
                .map(|p| wbar[p])
                .collect(),
        )
    }

    pub fn gain(&self, component: &SteinerComponent) -> f64 {
        self.drop_wbar(&component.terminals) - LN_4 * component.weight
    }

    /// Removes the drop of the component's terminals from all witness sets, then adds
    /// the component; an edge already in `F` keeps the union of both witness sets.
    pub fn apply_component(&mut self, component: &SteinerComponent) -> SteinerStepReport {
        let wbar = self.terminal_tree();
        let dropped = self.drop_s(&component.terminals);
        let drop_wbar = sorted_sum(dropped.iter().map(|p| wbar[p]).collect());
        let gone: BTreeSet<Pair> = dropped.iter().copied().collect();
        let mut removed_edges = Vec::new();
        self.witnesses.retain(|&e, set| {
            set.retain(|p| !gone.contains(p));
            if set.is_empty() {
                removed_edges.push(e);
                false
            } else {
                true
            }
        });
        for (&e, set) in &component.witness_sets {
            if set.is_empty() {
                continue;
            }
            self.witnesses
                .entry(e)
                .or_default()
                .extend(set.iter().copied());
        }
        removed_edges.retain(|e| !self.witnesses.contains_key(e));
        SteinerStepReport {
            dropped,
            drop_wbar,
            component_weight: component.weight,
            removed_edges,
        }
    }

    /// Checks the bookkeeping invariants; the error names the first violation.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let terminals = self.instance.terminals();
        if self.witnesses.values().any(BTreeSet::is_empty) {
            return Err("a solution edge has an empty witness set".into());
        }
        let wbar = self.terminal_tree();
        if wbar.len() + 1 != terminals.len() {
            return Err(format!(
                "terminal tree has {} pairs for {} terminals",
                wbar.len(),
                terminals.len()
            ));
        }
        let mut dsu = Dsu::new(terminals.len());
        for &(a, b) in wbar.keys() {
            let (Ok(i), Ok(j)) = (terminals.binary_search(&a), terminals.binary_search(&b)) else {
                return Err(format!("pair ({a}, {b}) has a non-terminal end"));
            };
            if !dsu.union(i, j) {
                return Err(format!("terminal tree has a cycle through ({a}, {b})"));
            }
        }
        for &(a, b) in wbar.keys() {
            let witnessing: Vec<EdgeId> = self
                .witnesses
                .iter()
                .filter(|(_, set)| set.contains(&(a, b)))
                .map(|(&e, _)| e)
                .collect();
            if !connects(self.instance, &witnessing, a, b) {
                return Err(format!(
                    "edges witnessing ({a}, {b}) do not connect its ends"
                ));
            }
        }
        let total: f64 = wbar.values().sum();
        let weight = self.solution_weight();
        if (total - weight).abs() > 1e-9 * weight.max(1.0) {
            return Err(format!(
                "spread weight {total} differs from solution weight {weight}"
            ));
        }
        let phi = self.potential();
        let h_n = harmonic(self.instance.vertex_count());
        if phi < weight - 1e-9 * weight || phi > h_n * weight + 1e-9 * weight {
            return Err(format!(
                "potential {phi} outside [w(F), H_n w(F)] for w(F) = {weight}"
            ));
        }
        Ok(())
    }
}

fn connects(instance: &SteinerInstance, edges: &[EdgeId], a: Vertex, b: Vertex) -> bool {
    let mut adj: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for &e in edges {
        let edge = instance.edge(e);
        adj.entry(edge.u).or_default().push(edge.v);
        adj.entry(edge.v).or_default().push(edge.u);
    }
    let mut seen = BTreeSet::from([a]);
    let mut queue = VecDeque::from([a]);
    while let Some(v) = queue.pop_front() {
        if v == b {
            return true;
        }
        for &u in adj.get(&v).into_iter().flatten() {
            if seen.insert(u) {
                queue.push_back(u);
            }
        }
    }
    false
}
