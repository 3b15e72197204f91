//! Selection of the next component: an exact branch-and-bound over link subsets
//! and a cheap heuristic for instances beyond desk scale.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::tree::{Link, LinkId, RootedTree};
use crate::wtap::state::canonical;
use crate::wtap::WtapState;

/// True iff every vertex lies on the tree path of at most `k` component links.
pub fn is_k_thin(tree: &RootedTree, links: &[Link], component: &[LinkId], k: usize) -> bool {
    let mut load = vec![0usize; tree.vertex_count()];
    for &id in &canonical(component) {
        let l = &links[id];
        for v in tree.path_vertices(l.a, l.b) {
            load[v] += 1;
            if load[v] > k {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactSearchLimits {
    /// Maximum number of links in a component.
    pub size_cap: usize,
    /// Maximum number of search nodes before giving up with [`Error::Timeout`].
    pub node_budget: u64,
}

struct Search {
    link_slots: Vec<FixedBitSet>,
    link_vertices: Vec<Vec<usize>>,
    weights: Vec<f64>,
    uplinks: Vec<(FixedBitSet, f64)>,
    suffix: Vec<FixedBitSet>,
    k: usize,
    size_cap: usize,
    budget: u64,
    nodes: u64,
    load: Vec<usize>,
    chosen: Vec<LinkId>,
    best: (Vec<LinkId>, f64),
}

impl Search {
    fn dropped_wbar(&self, covered: &FixedBitSet) -> f64 {
        self.uplinks
            .iter()
            .filter(|(slots, _)| slots.is_subset(covered))
            .map(|(_, w)| w)
            .sum()
    }

    /// Pre-order include-first traversal, which visits subsets in lexicographic
    /// order of their id sequences; a later candidate therefore only replaces the
    /// incumbent on a strictly larger gain.
    fn visit(&mut self, next: usize, covered: &FixedBitSet, weight: f64) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Timeout {
                budget: self.budget,
            });
        }
        let gain = self.dropped_wbar(covered) - 1.5 * weight;
        if gain > self.best.1 {
            self.best = (self.chosen.clone(), gain);
        }
        if next == self.link_slots.len() || self.chosen.len() >= self.size_cap {
            return Ok(());
        }
        let mut reach = covered.clone();
        reach.union_with(&self.suffix[next]);
        if self.dropped_wbar(&reach) - 1.5 * weight <= self.best.1 {
            return Ok(());
        }

        for i in next..self.link_slots.len() {
            if self.link_vertices[i]
                .iter()
                .any(|&v| self.load[v] >= self.k)
            {
                continue;
            }
            for &v in &self.link_vertices[i] {
                self.load[v] += 1;
            }
            self.chosen.push(i);
            let mut grown = covered.clone();
            grown.union_with(&self.link_slots[i]);
            let result = self.visit(i + 1, &grown, weight + self.weights[i]);
            self.chosen.pop();
            for &v in &self.link_vertices[i] {
                self.load[v] -= 1;
            }
            result?;

            // every subset whose smallest remaining id is > i lives in this bound
            let mut reach = covered.clone();
            if i + 1 < self.suffix.len() {
                reach.union_with(&self.suffix[i + 1]);
            }
            if self.dropped_wbar(&reach) - 1.5 * weight <= self.best.1 {
                break;
            }
        }
        Ok(())
    }
}

/// Exact k-thin component of at most `size_cap` links maximizing the gain, with the
/// lexicographically smallest id sequence among maximizers. The empty component
/// (gain 0) is always admissible.
pub fn best_component_exact(
    state: &WtapState<'_>,
    limits: &ExactSearchLimits,
) -> Result<(Vec<LinkId>, f64)> {
    let instance = state.instance();
    let tree = &instance.tree;
    let slots_of = |pairs: &mut dyn Iterator<Item = usize>| {
        let mut set = FixedBitSet::with_capacity(tree.vertex_count());
        for s in pairs {
            set.insert(s);
        }
        set
    };
    let link_slots: Vec<FixedBitSet> = instance
        .links
        .iter()
        .map(|l| slots_of(&mut tree.path_slots(l.a, l.b).into_iter()))
        .collect();
    let link_vertices = instance
        .links
        .iter()
        .map(|l| tree.path_vertices(l.a, l.b))
        .collect();
    let uplinks = state
        .uplinks()
        .map(|(id, u, _)| {
            (
                slots_of(&mut tree.vertical_slots(u.lower, u.upper)),
                state.wbar(id),
            )
        })
        .collect();
    let mut suffix = vec![FixedBitSet::with_capacity(tree.vertex_count()); link_slots.len()];
    for i in (0..link_slots.len()).rev() {
        let mut acc = link_slots[i].clone();
        if i + 1 < link_slots.len() {
            acc.union_with(&suffix[i + 1]);
        }
        suffix[i] = acc;
    }

    let mut search = Search {
        link_slots,
        link_vertices,
        weights: instance.links.iter().map(|l| l.weight).collect(),
        uplinks,
        suffix,
        k: state.k(),
        size_cap: limits.size_cap,
        budget: limits.node_budget,
        nodes: 0,
        load: vec![0; tree.vertex_count()],
        chosen: Vec::new(),
        best: (Vec::new(), 0.0),
    };
    let empty = FixedBitSet::with_capacity(tree.vertex_count());
    search.visit(0, &empty, 0.0)?;
    log::trace!("exact component search used {} nodes", search.nodes);
    Ok(search.best)
}

/// Best component among all single links and all pairs of links sharing an apex.
pub fn best_component_heuristic(state: &WtapState<'_>) -> (Vec<LinkId>, f64) {
    let instance = state.instance();
    let tree = &instance.tree;
    let mut best: (Vec<LinkId>, f64) = (Vec::new(), 0.0);
    let mut consider = |candidate: Vec<LinkId>| {
        if !is_k_thin(tree, &instance.links, &candidate, state.k()) {
            return;
        }
        let gain = state.gain(&candidate);
        if gain > best.1 || (gain == best.1 && !best.0.is_empty() && candidate < best.0) {
            best = (candidate, gain);
        }
    };

    let mut by_apex: BTreeMap<usize, Vec<LinkId>> = BTreeMap::new();
    for l in &instance.links {
        by_apex.entry(tree.lca(l.a, l.b)).or_default().push(l.id);
    }
    for l in &instance.links {
        consider(vec![l.id]);
    }
    for group in by_apex.values() {
        for (i, &x) in group.iter().enumerate() {
            for &y in &group[i + 1..] {
                consider(vec![x, y]);
            }
        }
    }
    best
}
