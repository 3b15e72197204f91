use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::steiner::{Pair, SteinerInstance};
use crate::tree::{normalize, EdgeId, Vertex};
use crate::{harmonic, LN_4};

/// Default bound on `|T_C|` for witness-tree enumeration.
pub const DEFAULT_WITNESS_LIMIT: usize = 7;

/// A tree of graph edges together with the terminal tree `S_C` that pays for it.
#[derive(Debug, Clone, PartialEq)]
pub struct SteinerComponent {
    /// Sorted terminal set `T_C`.
    pub terminals: Vec<Vertex>,
    /// Sorted edge ids.
    pub edges: Vec<EdgeId>,
    pub weight: f64,
    /// Sorted pairs of `S_C`.
    pub witness_tree: Vec<Pair>,
    /// Witness sets of the component edges; edges on no witness path are absent.
    pub witness_sets: BTreeMap<EdgeId, BTreeSet<Pair>>,
    /// `sum over f of H_|W_f| * w(f)`.
    pub potential: f64,
}

/// Decodes a Prüfer sequence over labels `0..n` into the edge list of a labeled tree.
fn prufer_tree(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &x in seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &x in seq {
        let leaf = (0..n).find(|&i| degree[i] == 1).unwrap();
        edges.push((leaf, x));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&i| degree[i] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Steps `seq` to the next sequence over `0..q` in odometer order; false after the last.
fn advance(seq: &mut [usize], q: usize) -> bool {
    for i in (0..seq.len()).rev() {
        seq[i] += 1;
        if seq[i] < q {
            return true;
        }
        seq[i] = 0;
    }
    false
}

/// Edge ids on the path between `a` and `b` inside the tree given by `adj`.
fn tree_path(adj: &BTreeMap<Vertex, Vec<(Vertex, EdgeId)>>, a: Vertex, b: Vertex) -> Vec<EdgeId> {
    let mut prev: BTreeMap<Vertex, (Vertex, EdgeId)> = BTreeMap::new();
    let mut stack = vec![a];
    let mut seen = BTreeSet::from([a]);
    while let Some(v) = stack.pop() {
        if v == b {
            break;
        }
        for &(u, e) in &adj[&v] {
            if seen.insert(u) {
                prev.insert(u, (v, e));
                stack.push(u);
            }
        }
    }
    let mut path = Vec::new();
    let mut v = b;
    while v != a {
        let (p, e) = prev[&v];
        path.push(e);
        v = p;
    }
    path
}

/// Chooses, over all labeled spanning trees `S_C` on `terminals`, the one minimizing
/// the component potential; ties go to the lexicographically smallest pair list.
pub fn witness_tree_for_component(
    instance: &SteinerInstance,
    edges: &[EdgeId],
    terminals: &[Vertex],
    limit: usize,
) -> Result<SteinerComponent> {
    let terminals: Vec<Vertex> = terminals
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut edges = edges.to_vec();
    edges.sort_unstable();
    edges.dedup();
    let q = terminals.len();
    if q < 2 {
        return Err(Error::Config(
            "a component needs at least two terminals".into(),
        ));
    }
    if q > limit {
        return Err(Error::SizeLimit {
            what: "component terminal set",
            limit,
            actual: q,
        });
    }

    let mut adj: BTreeMap<Vertex, Vec<(Vertex, EdgeId)>> = BTreeMap::new();
    for &e in &edges {
        let edge = instance.edge(e);
        adj.entry(edge.u).or_default().push((edge.v, e));
        adj.entry(edge.v).or_default().push((edge.u, e));
    }
    let mut reached = BTreeSet::new();
    if adj.contains_key(&terminals[0]) {
        let mut stack = vec![terminals[0]];
        reached.insert(terminals[0]);
        while let Some(v) = stack.pop() {
            for &(u, _) in &adj[&v] {
                if reached.insert(u) {
                    stack.push(u);
                }
            }
        }
    }
    if reached.len() != adj.len()
        || edges.len() + 1 != adj.len()
        || terminals.iter().any(|t| !reached.contains(t))
    {
        return Err(Error::Config(
            "component edges do not form a tree spanning its terminals".into(),
        ));
    }

    let mut pair_paths: BTreeMap<Pair, Vec<EdgeId>> = BTreeMap::new();
    for (i, &a) in terminals.iter().enumerate() {
        for &b in &terminals[i + 1..] {
            pair_paths.insert((a, b), tree_path(&adj, a, b));
        }
    }

    let weight = instance.weight_of(&edges);
    let position: BTreeMap<EdgeId, usize> =
        edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut best: Option<(f64, Vec<Pair>)> = None;
    let mut seq = vec![0usize; q - 2];
    loop {
        let mut candidate: Vec<Pair> = prufer_tree(&seq, q)
            .into_iter()
            .map(|(x, y)| normalize(terminals[x], terminals[y]))
            .collect();
        candidate.sort_unstable();
        let mut counts = vec![0usize; edges.len()];
        for p in &candidate {
            for e in &pair_paths[p] {
                counts[position[e]] += 1;
            }
        }
        let phi: f64 = edges
            .iter()
            .zip(&counts)
            .map(|(&e, &c)| harmonic(c) * instance.edge(e).weight)
            .sum();
        let better = match &best {
            None => true,
            Some((b, pairs)) => phi < *b || (phi == *b && candidate < *pairs),
        };
        if better {
            best = Some((phi, candidate));
        }

        if !advance(&mut seq, q) {
            break;
        }
    }

    let (potential, witness_tree) = best.expect("at least one labeled tree exists");
    assert!(
        potential <= LN_4 * weight + 1e-9 * weight,
        "component potential {potential} exceeds ln 4 times its weight {weight}"
    );
    let mut witness_sets: BTreeMap<EdgeId, BTreeSet<Pair>> = BTreeMap::new();
    for p in &witness_tree {
        for &e in &pair_paths[p] {
            witness_sets.entry(e).or_default().insert(*p);
        }
    }
    Ok(SteinerComponent {
        terminals,
        edges,
        weight,
        witness_tree,
        witness_sets,
        potential,
    })
}
