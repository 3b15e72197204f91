use std::collections::VecDeque;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::oracles::OracleReport;
use crate::tree::{LinkId, Vertex};
use crate::wtap::{WtapInstance, WtapState};

/// Parent pointers and depths from a breadth-first search of the tree edge list.
struct Climb {
    parent: Vec<Vertex>,
    depth: Vec<usize>,
}

impl Climb {
    fn new(instance: &WtapInstance) -> Self {
        let n = instance.vertex_count();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in instance.tree.edges() {
            adj[a].push(b);
            adj[b].push(a);
        }
        let root = instance.tree.root();
        let mut parent = vec![usize::MAX; n];
        let mut depth = vec![0; n];
        parent[root] = root;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if parent[u] == usize::MAX {
                    parent[u] = v;
                    depth[u] = depth[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        Climb { parent, depth }
    }

    /// Tree edges on the `a`–`b` path, each named by its lower endpoint, plus the
    /// vertices of the path.
    fn path(&self, mut a: Vertex, mut b: Vertex) -> (Vec<Vertex>, Vec<Vertex>) {
        let mut edges = Vec::new();
        let mut vertices = Vec::new();
        while a != b {
            if self.depth[a] >= self.depth[b] {
                edges.push(a);
                vertices.push(a);
                a = self.parent[a];
            } else {
                edges.push(b);
                vertices.push(b);
                b = self.parent[b];
            }
        }
        vertices.push(a);
        (edges, vertices)
    }
}

/// True iff the given links cover every tree edge.
pub fn validate_wtap(instance: &WtapInstance, ids: &[LinkId]) -> bool {
    if ids.iter().any(|&i| i >= instance.links.len()) {
        return false;
    }
    let climb = Climb::new(instance);
    let mut covered = vec![false; instance.vertex_count()];
    covered[instance.tree.root()] = true;
    for &i in ids {
        let l = &instance.links[i];
        for e in climb.path(l.a, l.b).0 {
            covered[e] = true;
        }
    }
    covered.into_iter().all(|c| c)
}

/// Minimum-weight cover by exhaustive include-first search over links in id order;
/// the certificate is the lexicographically smallest optimal id list.
pub fn opt_wtap_bruteforce(instance: &WtapInstance, max_links: usize) -> Result<OracleReport> {
    let started = Instant::now();
    let m = instance.links.len();
    if m > max_links {
        return Err(Error::SizeLimit {
            what: "brute-force link set",
            limit: max_links,
            actual: m,
        });
    }
    let all: Vec<LinkId> = (0..m).collect();
    if !validate_wtap(instance, &all) {
        return Err(Error::Infeasible(
            "the full link set does not cover the tree".into(),
        ));
    }
    let climb = Climb::new(instance);
    let n = instance.vertex_count();
    let root = instance.tree.root();
    let paths: Vec<Vec<Vertex>> = instance
        .links
        .iter()
        .map(|l| climb.path(l.a, l.b).0)
        .collect();
    let mut last_cover = vec![0usize; n];
    for (i, p) in paths.iter().enumerate() {
        for &e in p {
            last_cover[e] = i;
        }
    }

    struct Search<'s> {
        paths: &'s [Vec<Vertex>],
        weights: Vec<f64>,
        last_cover: Vec<usize>,
        root: Vertex,
        counts: Vec<u32>,
        uncovered: usize,
        chosen: Vec<LinkId>,
        best: Option<(f64, Vec<LinkId>)>,
        nodes: u64,
    }

    impl Search<'_> {
        fn go(&mut self, i: usize, cost: f64) {
            self.nodes += 1;
            if self.uncovered == 0 {
                if self.best.as_ref().is_none_or(|(b, _)| cost < *b) {
                    self.best = Some((cost, self.chosen.clone()));
                }
                return;
            }
            if i == self.paths.len() || self.best.as_ref().is_some_and(|(b, _)| cost >= *b) {
                return;
            }
            let stranded = (0..self.counts.len())
                .any(|e| e != self.root && self.counts[e] == 0 && self.last_cover[e] < i);
            if stranded {
                return;
            }
            for &e in &self.paths[i] {
                if self.counts[e] == 0 {
                    self.uncovered -= 1;
                }
                self.counts[e] += 1;
            }
            self.chosen.push(i);
            self.go(i + 1, cost + self.weights[i]);
            self.chosen.pop();
            for &e in &self.paths[i] {
                self.counts[e] -= 1;
                if self.counts[e] == 0 {
                    self.uncovered += 1;
                }
            }
            self.go(i + 1, cost);
        }
    }

    let mut search = Search {
        paths: &paths,
        weights: instance.links.iter().map(|l| l.weight).collect(),
        last_cover,
        root,
        counts: vec![0; n],
        uncovered: n - 1,
        chosen: Vec::new(),
        best: None,
        nodes: 0,
    };
    search.go(0, 0.0);
    let (_, certificate) = search.best.expect("a feasible instance has a cover");
    Ok(OracleReport {
        opt_value: certificate.iter().map(|&i| instance.links[i].weight).sum(),
        opt_certificate: certificate,
        search_space_size: search.nodes,
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Plain enumeration of all link subsets of at most `size_cap` links that are
/// `k`-thin, maximizing the gain against `state`; ties go to the lexicographically
/// smallest id list, and the empty set (gain 0) is always a candidate.
pub fn best_component_bruteforce_wtap(
    state: &WtapState<'_>,
    size_cap: usize,
    max_links: usize,
) -> Result<(Vec<LinkId>, f64)> {
    let instance = state.instance();
    let m = instance.links.len();
    if m > max_links {
        return Err(Error::SizeLimit {
            what: "brute-force component link set",
            limit: max_links,
            actual: m,
        });
    }
    let climb = Climb::new(instance);
    let n = instance.vertex_count();
    let paths: Vec<(Vec<Vertex>, Vec<Vertex>)> = instance
        .links
        .iter()
        .map(|l| climb.path(l.a, l.b))
        .collect();
    let uplinks: Vec<(Vec<Vertex>, f64)> = state
        .uplinks()
        .map(|(id, u, _)| (climb.path(u.lower, u.upper).0, state.wbar(id)))
        .collect();
    let k = state.k();

    let mut best: (Vec<LinkId>, f64) = (Vec::new(), 0.0);
    let mut subset: Vec<LinkId> = Vec::new();
    // include-first pre-order: subsets in lexicographic order of their id lists
    fn visit(
        next: usize,
        m: usize,
        size_cap: usize,
        subset: &mut Vec<LinkId>,
        on_subset: &mut dyn FnMut(&[LinkId]),
    ) {
        on_subset(subset);
        if subset.len() == size_cap {
            return;
        }
        for i in next..m {
            subset.push(i);
            visit(i + 1, m, size_cap, subset, on_subset);
            subset.pop();
        }
    }
    visit(0, m, size_cap, &mut subset, &mut |c: &[LinkId]| {
        let mut load = vec![0usize; n];
        let mut covered = vec![false; n];
        for &i in c {
            for &v in &paths[i].1 {
                load[v] += 1;
            }
            for &e in &paths[i].0 {
                covered[e] = true;
            }
        }
        if load.iter().any(|&x| x > k) {
            return;
        }
        let dropped: f64 = uplinks
            .iter()
            .filter(|(edges, _)| edges.iter().all(|&e| covered[e]))
            .map(|(_, w)| w)
            .sum();
        let weight = c.iter().fold(0.0, |acc, &i| acc + instance.links[i].weight);
        let gain = dropped - 1.5 * weight;
        if gain > best.1 {
            best = (c.to_vec(), gain);
        }
    });
    Ok(best)
}
