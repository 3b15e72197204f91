//! Steiner tree: instances, shortest paths, exact small-subset trees and the
//! witness-tree local search.

mod component;
mod solver;
mod state;

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap};

use crate::error::{Error, Result};
use crate::tree::{normalize, EdgeId, Vertex};

pub use component::{witness_tree_for_component, SteinerComponent, DEFAULT_WITNESS_LIMIT};
pub use solver::{
    best_k_component, choose_k, run_steiner, run_steiner_observed, ComponentCatalog, SteinerEvent,
    SteinerLimits, SteinerOptions, SteinerRun, SteinerTraceRow,
};
pub use state::{SteinerState, SteinerStepReport};

/// An unordered terminal pair `(a, b)` with `a < b`.
pub type Pair = (Vertex, Vertex);

/// Default bound on the subset size accepted by [`dreyfus_wagner`].
pub const DEFAULT_DW_LIMIT: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteinerEdge {
    pub id: EdgeId,
    pub u: Vertex,
    pub v: Vertex,
    pub weight: f64,
}

impl SteinerEdge {
    pub fn other(&self, x: Vertex) -> Vertex {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteinerInstance {
    vertex_count: usize,
    edges: Vec<SteinerEdge>,
    terminals: Vec<Vertex>,
    adjacency: Vec<Vec<(Vertex, EdgeId)>>,
}

impl SteinerInstance {
    /// Edges get ids in input order; terminals are sorted and deduplicated.
    pub fn new(
        vertex_count: usize,
        edges: &[(Vertex, Vertex, f64)],
        terminals: &[Vertex],
    ) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::Config("a graph needs at least one vertex".into()));
        }
        let mut adjacency = vec![Vec::new(); vertex_count];
        let mut list = Vec::with_capacity(edges.len());
        for (id, &(u, v, weight)) in edges.iter().enumerate() {
            for x in [u, v] {
                if x >= vertex_count {
                    return Err(Error::BadVertex(x));
                }
            }
            if u == v {
                return Err(Error::Config(format!(
                    "edge {id} is a self-loop at vertex {u}"
                )));
            }
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(Error::Config(format!(
                    "edge {id} has non-positive weight {weight}"
                )));
            }
            adjacency[u].push((v, id));
            adjacency[v].push((u, id));
            list.push(SteinerEdge { id, u, v, weight });
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        let terminals: BTreeSet<Vertex> = terminals.iter().copied().collect();
        if terminals.is_empty() {
            return Err(Error::Config("the terminal set is empty".into()));
        }
        if let Some(&t) = terminals.iter().find(|&&t| t >= vertex_count) {
            return Err(Error::BadVertex(t));
        }
        Ok(SteinerInstance {
            vertex_count,
            edges: list,
            terminals: terminals.into_iter().collect(),
            adjacency,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[SteinerEdge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &SteinerEdge {
        &self.edges[id]
    }

    /// Sorted terminal list.
    pub fn terminals(&self) -> &[Vertex] {
        &self.terminals
    }

    pub fn is_terminal(&self, v: Vertex) -> bool {
        self.terminals.binary_search(&v).is_ok()
    }

    /// Sorted `(neighbor, edge id)` list of `v`.
    pub fn neighbors(&self, v: Vertex) -> &[(Vertex, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn weight_of(&self, ids: &[EdgeId]) -> f64 {
        ids.iter().map(|&e| self.edges[e].weight).sum()
    }

    /// All terminals lie in one connected component.
    pub fn is_feasible(&self) -> bool {
        let dist = self.dijkstra(self.terminals[0]);
        self.terminals.iter().all(|&t| dist[t].is_finite())
    }

    pub(crate) fn dijkstra(&self, source: Vertex) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.vertex_count];
        dist[source] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((Dist(0.0), source)));
        while let Some(Reverse((Dist(d), v))) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(u, e) in &self.adjacency[v] {
                let nd = d + self.edges[e].weight;
                if nd < dist[u] {
                    dist[u] = nd;
                    heap.push(Reverse((Dist(nd), u)));
                }
            }
        }
        dist
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Dist(f64);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

fn tight(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Shortest-path distances between all terminal pairs, with one canonical path per pair.
#[derive(Debug, Clone)]
pub struct MetricClosure {
    terminals: Vec<Vertex>,
    dist: Vec<Vec<f64>>,
}

impl MetricClosure {
    pub fn terminals(&self) -> &[Vertex] {
        &self.terminals
    }

    fn index(&self, t: Vertex) -> usize {
        self.terminals
            .binary_search(&t)
            .unwrap_or_else(|_| panic!("vertex {t} is not a terminal"))
    }

    pub fn distance(&self, a: Vertex, b: Vertex) -> f64 {
        self.dist[self.index(a)][b]
    }

    /// Edge ids of the shortest `a`–`b` path with the lexicographically smallest
    /// vertex sequence, listed from `a` to `b`.
    pub fn path(&self, instance: &SteinerInstance, a: Vertex, b: Vertex) -> Vec<EdgeId> {
        let from_a = &self.dist[self.index(a)];
        let from_b = &self.dist[self.index(b)];
        let total = from_a[b];
        let mut path = Vec::new();
        let mut v = a;
        while v != b {
            let step = instance.adjacency[v]
                .iter()
                .filter(|&&(u, e)| {
                    let w = instance.edges[e].weight;
                    tight(from_a[v] + w, from_a[u]) && tight(from_a[u] + from_b[u], total)
                })
                .min_by(|&&(u1, e1), &&(u2, e2)| {
                    u1.cmp(&u2)
                        .then(
                            instance.edges[e1]
                                .weight
                                .total_cmp(&instance.edges[e2].weight),
                        )
                        .then(e1.cmp(&e2))
                })
                .copied()
                .expect("a shortest path continues from every vertex on it");
            path.push(step.1);
            v = step.0;
        }
        path
    }
}

pub fn metric_closure(instance: &SteinerInstance) -> Result<MetricClosure> {
    let terminals = instance.terminals.clone();
    let dist: Vec<Vec<f64>> = terminals.iter().map(|&t| instance.dijkstra(t)).collect();
    for (i, &t) in terminals.iter().enumerate() {
        if let Some(&u) = terminals.iter().find(|&&u| !dist[i][u].is_finite()) {
            return Err(Error::Disconnected(t, u));
        }
    }
    Ok(MetricClosure { terminals, dist })
}

#[derive(Debug, Clone, Copy)]
enum Back {
    None,
    Leaf,
    Merge(usize),
    Edge(Vertex, EdgeId),
}

/// Minimum-weight tree connecting `subset`, by dynamic programming over
/// (vertex, sub-subset) states. Returns the sorted edge ids and their total weight.
pub fn dreyfus_wagner(
    instance: &SteinerInstance,
    subset: &[Vertex],
    limit: usize,
) -> Result<(Vec<EdgeId>, f64)> {
    let subset: Vec<Vertex> = subset
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if subset.is_empty() {
        return Err(Error::Config("empty vertex subset".into()));
    }
    if subset.len() > limit {
        return Err(Error::SizeLimit {
            what: "Dreyfus-Wagner subset",
            limit,
            actual: subset.len(),
        });
    }
    if let Some(&v) = subset.iter().find(|&&v| v >= instance.vertex_count) {
        return Err(Error::BadVertex(v));
    }
    if subset.len() == 1 {
        return Ok((Vec::new(), 0.0));
    }

    let n = instance.vertex_count;
    let full = (1usize << subset.len()) - 1;
    let mut cost = vec![vec![f64::INFINITY; n]; full + 1];
    let mut back = vec![vec![Back::None; n]; full + 1];
    for (i, &t) in subset.iter().enumerate() {
        cost[1 << i][t] = 0.0;
        back[1 << i][t] = Back::Leaf;
    }
    for mask in 1..=full {
        if mask.count_ones() > 1 {
            for v in 0..n {
                // each unordered split once: the part holding the lowest bit
                let low = mask & mask.wrapping_neg();
                let mut sub = (mask - 1) & mask;
                while sub > 0 {
                    if sub & low != 0 {
                        let c = cost[sub][v] + cost[mask ^ sub][v];
                        if c < cost[mask][v] {
                            cost[mask][v] = c;
                            back[mask][v] = Back::Merge(sub);
                        }
                    }
                    sub = (sub - 1) & mask;
                }
            }
        }
        let row = &mut cost[mask];
        let brow = &mut back[mask];
        let mut heap: BinaryHeap<Reverse<(Dist, Vertex)>> = (0..n)
            .filter(|&v| row[v].is_finite())
            .map(|v| Reverse((Dist(row[v]), v)))
            .collect();
        while let Some(Reverse((Dist(d), v))) = heap.pop() {
            if d > row[v] {
                continue;
            }
            for &(u, e) in &instance.adjacency[v] {
                let nd = d + instance.edges[e].weight;
                if nd < row[u] {
                    row[u] = nd;
                    brow[u] = Back::Edge(v, e);
                    heap.push(Reverse((Dist(nd), u)));
                }
            }
        }
    }

    let root = subset[0];
    if !cost[full][root].is_finite() {
        let missing = subset
            .iter()
            .copied()
            .find(|&t| !cost[1][t].is_finite())
            .unwrap_or(subset[1]);
        return Err(Error::Disconnected(root, missing));
    }
    let mut used = BTreeSet::new();
    let mut stack = vec![(full, root)];
    while let Some((mask, v)) = stack.pop() {
        match back[mask][v] {
            Back::Leaf | Back::None => {}
            Back::Merge(sub) => {
                stack.push((sub, v));
                stack.push((mask ^ sub, v));
            }
            Back::Edge(u, e) => {
                used.insert(e);
                stack.push((mask, u));
            }
        }
    }
    let edges = prune_to_tree(instance, used.into_iter().collect(), &subset);
    let weight = instance.weight_of(&edges);
    Ok((edges, weight))
}

/// Reduces a connected edge set to a spanning tree of it (cheapest edges first)
/// and strips leaves outside `keep`. Returns sorted edge ids.
pub(crate) fn prune_to_tree(
    instance: &SteinerInstance,
    mut edges: Vec<EdgeId>,
    keep: &[Vertex],
) -> Vec<EdgeId> {
    edges.sort_by(|&a, &b| {
        instance.edges[a]
            .weight
            .total_cmp(&instance.edges[b].weight)
            .then(a.cmp(&b))
    });
    let mut dsu = Dsu::new(instance.vertex_count);
    let mut tree: Vec<EdgeId> = edges
        .into_iter()
        .filter(|&e| dsu.union(instance.edges[e].u, instance.edges[e].v))
        .collect();
    loop {
        let mut degree = vec![0usize; instance.vertex_count];
        for &e in &tree {
            degree[instance.edges[e].u] += 1;
            degree[instance.edges[e].v] += 1;
        }
        let before = tree.len();
        tree.retain(|&e| {
            let edge = &instance.edges[e];
            let dangling = |x: Vertex| degree[x] == 1 && !keep.contains(&x);
            !(dangling(edge.u) || dangling(edge.v))
        });
        if tree.len() == before {
            break;
        }
    }
    tree.sort_unstable();
    tree
}

/// Union-find with path halving.
#[derive(Debug, Clone)]
pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; false if they were already merged.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Terminal pairs of a minimum spanning tree of the metric closure, ties by pair.
pub(crate) fn terminal_mst(closure: &MetricClosure) -> Vec<Pair> {
    let ts = &closure.terminals;
    let mut pairs: Vec<(f64, Pair)> = Vec::new();
    for (i, &a) in ts.iter().enumerate() {
        for &b in &ts[i + 1..] {
            pairs.push((closure.dist[i][b], normalize(a, b)));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let mut dsu = Dsu::new(ts.len());
    let index = |t: Vertex| ts.binary_search(&t).unwrap();
    let mut tree: Vec<Pair> = pairs
        .into_iter()
        .filter(|&(_, (a, b))| dsu.union(index(a), index(b)))
        .map(|(_, p)| p)
        .collect();
    tree.sort_unstable();
    tree
}


#[cfg(test)]
mod tests {
    use super::fixtures::star;
    use super::*;

    #[test]
    fn closure_on_star() {
        let inst = star();
        let mc = metric_closure(&inst).unwrap();
        for (a, b) in [(1, 2), (1, 3), (2, 3)] {
            assert_eq!(mc.distance(a, b), 2.0);
        }
        assert_eq!(mc.path(&inst, 1, 3), vec![0, 2]);
    }

    #[test]
    fn closure_single_edge() {
        let inst = SteinerInstance::new(2, &[(0, 1, 5.0)], &[0, 1]).unwrap();
        assert_eq!(metric_closure(&inst).unwrap().distance(0, 1), 5.0);
    }

    #[test]
    fn closure_reports_disconnected_terminal() {
        let inst = SteinerInstance::new(3, &[(0, 1, 1.0)], &[0, 2]).unwrap();
        assert_eq!(
            metric_closure(&inst).unwrap_err(),
            Error::Disconnected(0, 2)
        );
        assert!(!inst.is_feasible());
    }

    #[test]
    fn closure_picks_lexicographically_smallest_path() {
        // square 0-1-3 and 0-2-3 with equal lengths
        let inst = SteinerInstance::new(
            4,
            &[(0, 2, 1.0), (2, 3, 1.0), (0, 1, 1.0), (1, 3, 1.0)],
            &[0, 3],
        )
        .unwrap();
        let mc = metric_closure(&inst).unwrap();
        assert_eq!(mc.path(&inst, 0, 3), vec![2, 3]);
        assert_eq!(mc.path(&inst, 3, 0), vec![3, 2]);
    }

    #[test]
    fn dw_examples_on_star() {
        let inst = star();
        assert_eq!(
            dreyfus_wagner(&inst, &[1, 2], 14).unwrap(),
            (vec![0, 1], 2.0)
        );
        assert_eq!(
            dreyfus_wagner(&inst, &[1, 2, 3], 14).unwrap(),
            (vec![0, 1, 2], 3.0)
        );
        assert_eq!(dreyfus_wagner(&inst, &[2], 14).unwrap(), (vec![], 0.0));
    }

    #[test]
    fn dw_limits_and_disconnection() {
        let inst = star();
        assert!(matches!(
            dreyfus_wagner(&inst, &[1, 2, 3], 2),
            Err(Error::SizeLimit {
                limit: 2,
                actual: 3,
                ..
            })
        ));
        let split = SteinerInstance::new(3, &[(0, 1, 1.0)], &[0, 2]).unwrap();
        assert!(matches!(
            dreyfus_wagner(&split, &[0, 2], 14),
            Err(Error::Disconnected(..))
        ));
    }

    #[test]
    fn dw_prefers_steiner_point_over_direct_edges() {
        // triangle of heavy terminal edges plus a cheap hub
        let inst = SteinerInstance::new(
            4,
            &[
                (0, 1, 3.0),
                (1, 2, 3.0),
                (0, 2, 3.0),
                (3, 0, 1.0),
                (3, 1, 1.0),
                (3, 2, 1.0),
            ],
            &[0, 1, 2],
        )
        .unwrap();
        let (edges, cost) = dreyfus_wagner(&inst, &[0, 1, 2], 14).unwrap();
        assert_eq!(cost, 3.0);
        assert_eq!(edges, vec![3, 4, 5]);
    }

    #[test]
    fn terminal_mst_breaks_ties_by_pair() {
        let mc = metric_closure(&star()).unwrap();
        assert_eq!(terminal_mst(&mc), vec![(1, 2), (1, 3)]);
    }

    #[test]
    fn instance_validation() {
        assert!(SteinerInstance::new(2, &[(0, 1, 0.0)], &[0]).is_err());
        assert!(SteinerInstance::new(2, &[(0, 0, 1.0)], &[0]).is_err());
        assert!(SteinerInstance::new(2, &[(0, 1, 1.0)], &[]).is_err());
        assert_eq!(
            SteinerInstance::new(2, &[(0, 1, 1.0)], &[5]).unwrap_err(),
            Error::BadVertex(5)
        );
        let inst = SteinerInstance::new(3, &[(0, 1, 1.0)], &[1, 0, 1]).unwrap();
        assert_eq!(inst.terminals(), &[0, 1]);
    }
}
