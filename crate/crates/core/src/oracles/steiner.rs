use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::oracles::{sorted_sum, Components, OracleReport};
use crate::steiner::{dreyfus_wagner, Pair, SteinerInstance, SteinerState};
use crate::tree::{EdgeId, Vertex};

/// True iff the given edges connect all terminals.
pub fn validate_steiner(instance: &SteinerInstance, ids: &[EdgeId]) -> bool {
    let m = instance.edges().len();
    if ids.iter().any(|&e| e >= m) {
        return false;
    }
    let mut adj = vec![Vec::new(); instance.vertex_count()];
    for &e in ids {
        let edge = instance.edge(e);
        adj[edge.u].push(edge.v);
        adj[edge.v].push(edge.u);
    }
    let start = instance.terminals()[0];
    let mut seen = vec![false; instance.vertex_count()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    instance.terminals().iter().all(|&t| seen[t])
}

/// Exact Steiner tree on the full terminal set by the subset dynamic program.
pub fn opt_steiner_exact(instance: &SteinerInstance, max_terminals: usize) -> Result<OracleReport> {
    let started = Instant::now();
    let terminals = instance.terminals();
    if terminals.len() > max_terminals {
        return Err(Error::SizeLimit {
            what: "exact Steiner terminal set",
            limit: max_terminals,
            actual: terminals.len(),
        });
    }
    let (edges, weight) = dreyfus_wagner(instance, terminals, max_terminals)?;
    Ok(OracleReport {
        opt_value: weight,
        opt_certificate: edges,
        search_space_size: (1u64 << terminals.len()) * instance.vertex_count() as u64,
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Cheapest tree spanning `required`: the best minimum spanning tree of the
/// subgraph induced by `required` plus any set of other vertices.
fn cheapest_tree(
    instance: &SteinerInstance,
    required: &[Vertex],
    max_free: usize,
) -> Result<(f64, Vec<EdgeId>, u64)> {
    let n = instance.vertex_count();
    let free: Vec<Vertex> = (0..n).filter(|v| !required.contains(v)).collect();
    if free.len() > max_free {
        return Err(Error::SizeLimit {
            what: "Steiner point candidates",
            limit: max_free,
            actual: free.len(),
        });
    }
    let mut order: Vec<EdgeId> = (0..instance.edges().len()).collect();
    order.sort_by(|&a, &b| {
        instance
            .edge(a)
            .weight
            .total_cmp(&instance.edge(b).weight)
            .then(a.cmp(&b))
    });
    let mut best: Option<(f64, Vec<EdgeId>)> = None;
    let mut inside = vec![false; n];
    for mask in 0u64..(1u64 << free.len()) {
        inside.iter_mut().for_each(|x| *x = false);
        for &v in required {
            inside[v] = true;
        }
        for (i, &v) in free.iter().enumerate() {
            if mask >> i & 1 == 1 {
                inside[v] = true;
            }
        }
        let size = inside.iter().filter(|&&x| x).count();
        let mut comps = Components::new(n);
        let mut tree = Vec::new();
        let mut cost = 0.0;
        for &e in &order {
            let edge = instance.edge(e);
            if inside[edge.u] && inside[edge.v] && comps.join(edge.u, edge.v) {
                tree.push(e);
                cost += edge.weight;
            }
        }
        if tree.len() + 1 != size {
            continue;
        }
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            tree.sort_unstable();
            best = Some((cost, tree));
        }
    }
    let (cost, tree) = best.ok_or_else(|| {
        let t = required[0];
        let u = required.iter().copied().find(|&u| u != t).unwrap_or(t);
        Error::Disconnected(t, u)
    })?;
    Ok((cost, tree, 1u64 << free.len()))
}

/// Exact Steiner tree by enumerating the set of Steiner points.
pub fn opt_steiner_enumeration(
    instance: &SteinerInstance,
    max_free: usize,
) -> Result<OracleReport> {
    let started = Instant::now();
    let (cost, tree, examined) = cheapest_tree(instance, instance.terminals(), max_free)?;
    Ok(OracleReport {
        opt_value: cost,
        opt_certificate: tree,
        search_space_size: examined,
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Cheapest k-restricted Steiner tree: a collection of components, each a cheapest
/// tree on at most `k` terminals, whose terminal sets form a connected hypergraph.
/// The value is the sum of component costs; the certificate is the union of their edges.
pub fn opt_krestricted_bruteforce(
    instance: &SteinerInstance,
    k: usize,
    max_terminals: usize,
) -> Result<OracleReport> {
    let started = Instant::now();
    let terminals = instance.terminals();
    let t = terminals.len();
    if t > max_terminals {
        return Err(Error::SizeLimit {
            what: "k-restricted terminal set",
            limit: max_terminals,
            actual: t,
        });
    }
    if k < 2 {
        return Err(Error::Config(format!("k must be at least 2, got {k}")));
    }
    if t == 1 {
        return Ok(OracleReport {
            opt_value: 0.0,
            opt_certificate: Vec::new(),
            search_space_size: 1,
            elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
        });
    }
    let free_limit = instance.vertex_count();
    let mut hyperedges: Vec<(usize, f64, Vec<EdgeId>)> = Vec::new();
    let mut examined = 0u64;
    for mask in 1usize..(1 << t) {
        let size = mask.count_ones() as usize;
        if size < 2 || size > k {
            continue;
        }
        let members: Vec<Vertex> = (0..t)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| terminals[i])
            .collect();
        let (cost, tree, n) = cheapest_tree(instance, &members, free_limit)?;
        examined += n;
        hyperedges.push((mask, cost, tree));
    }

    // grow connected collections one hyperedge at a time; every connected
    // collection can be built so that each step shares a terminal
    let full = (1usize << t) - 1;
    let mut best: Vec<Option<(f64, Vec<usize>)>> = vec![None; full + 1];
    for (h, &(mask, cost, _)) in hyperedges.iter().enumerate() {
        if best[mask].as_ref().is_none_or(|(b, _)| cost < *b) {
            best[mask] = Some((cost, vec![h]));
        }
    }
    for mask in 1..=full {
        let Some((base, used)) = best[mask].clone() else {
            continue;
        };
        for (h, &(hmask, cost, _)) in hyperedges.iter().enumerate() {
            if hmask & mask == 0 || hmask & !mask == 0 {
                continue;
            }
            let grown = mask | hmask;
            let total = base + cost;
            if best[grown].as_ref().is_none_or(|(b, _)| total < *b) {
                let mut with = used.clone();
                with.push(h);
                best[grown] = Some((total, with));
            }
        }
    }
    let (value, used) = best[full].clone().expect("terminals are connected");
    let certificate: BTreeSet<EdgeId> = used
        .iter()
        .flat_map(|&h| hyperedges[h].2.iter().copied())
        .collect();
    Ok(OracleReport {
        opt_value: value,
        opt_certificate: certificate.into_iter().collect(),
        search_space_size: examined,
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Maximum-weight `D` of the state's terminal tree such that `(T, S \ D)` with
/// `component_terminals` contracted is a tree, by trying every subset of `S`.
pub fn drop_bruteforce_steiner(
    state: &SteinerState<'_>,
    component_terminals: &[Vertex],
    max_pairs: usize,
) -> Result<(Vec<Pair>, f64)> {
    let wbar: BTreeMap<Pair, f64> = state.terminal_tree();
    let pairs: Vec<(Pair, f64)> = wbar.into_iter().collect();
    if pairs.len() > max_pairs {
        return Err(Error::SizeLimit {
            what: "brute-force terminal tree",
            limit: max_pairs,
            actual: pairs.len(),
        });
    }
    let terminals = state.instance().terminals();
    let node = |v: Vertex| -> usize {
        if component_terminals.contains(&v) {
            0
        } else {
            1 + terminals
                .iter()
                .position(|&t| t == v)
                .expect("pair ends are terminals")
        }
    };
    let contracted: BTreeSet<usize> = terminals.iter().map(|&t| node(t)).collect();

    let mut best: Option<(f64, Vec<Pair>)> = None;
    for mask in 0u32..(1u32 << pairs.len()) {
        let kept: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 0)
            .map(|(_, &((a, b), _))| (node(a), node(b)))
            .collect();
        if kept.len() + 1 != contracted.len() || kept.iter().any(|(x, y)| x == y) {
            continue;
        }
        let mut comps = Components::new(terminals.len() + 1);
        if !kept.iter().all(|&(x, y)| comps.join(x, y)) {
            continue;
        }
        let dropped: Vec<(Pair, f64)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &p)| p)
            .collect();
        let value = sorted_sum(dropped.iter().map(|&(_, w)| w).collect());
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, dropped.into_iter().map(|(p, _)| p).collect()));
        }
    }
    let (value, dropped) =
        best.expect("dropping every pair outside a spanning tree is always valid");
    Ok((dropped, value))
}
