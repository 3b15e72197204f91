use std::collections::BTreeSet;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::steiner::SteinerInstance;
use crate::tree::{normalize, Link, RootedTree, Vertex};
use crate::wtap::WtapInstance;

/// Parameters of the random instance generators. All randomness comes from a
/// ChaCha8 stream seeded with `seed`, so output is identical across platforms.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub vertex_count: usize,
    /// Links (WTAP) or edges (Steiner) to generate; raised when feasibility needs more.
    pub link_or_edge_count: usize,
    /// Steiner only.
    pub terminal_count: usize,
    /// Weights are integers drawn uniformly from `1..=max_weight`.
    pub max_weight: u32,
    /// WTAP only: longest tree path, in edges, a link may span.
    pub max_link_span: Option<usize>,
}

impl GeneratorConfig {
    pub fn new(seed: u64, vertex_count: usize, link_or_edge_count: usize) -> Self {
        GeneratorConfig {
            seed,
            vertex_count,
            link_or_edge_count,
            terminal_count: vertex_count.div_ceil(2).max(1),
            max_weight: 10,
            max_link_span: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.vertex_count == 0 {
            return Err(Error::Config("vertex_count must be positive".into()));
        }
        if self.max_weight == 0 {
            return Err(Error::Config("max_weight must be positive".into()));
        }
        if self.max_link_span == Some(0) {
            return Err(Error::Config("max_link_span must be positive".into()));
        }
        Ok(())
    }
}

fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> Vec<(Vertex, Vertex)> {
    (1..n).map(|v| (rng.gen_range(0..v), v)).collect()
}

/// Random tree by parent attachment (root 0), then one covering link for every
/// still-uncovered edge bottom-up, then random extra links up to the requested count.
pub fn gen_wtap(config: &GeneratorConfig) -> Result<WtapInstance> {
    config.validate()?;
    let n = config.vertex_count;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let tree = RootedTree::new(n, &random_tree(&mut rng, n), 0)?;
    let span = config.max_link_span.unwrap_or(n).max(1);

    let mut pairs: Vec<(Vertex, Vertex)> = Vec::new();
    let mut seen: BTreeSet<(Vertex, Vertex)> = BTreeSet::new();
    let mut covered = vec![false; n];
    let mut order: Vec<Vertex> = (1..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(tree.depth(v)));
    for v in order {
        if covered[v] {
            continue;
        }
        let mut top = v;
        for _ in 0..rng.gen_range(1..=span.min(tree.depth(v))) {
            top = tree.parent(top);
        }
        let mut x = v;
        while x != top {
            covered[x] = true;
            x = tree.parent(x);
        }
        if seen.insert(normalize(v, top)) {
            pairs.push((v, top));
        }
    }

    let max_pairs = n * (n - 1) / 2;
    let target = config.link_or_edge_count.min(max_pairs);
    let mut attempts = 0usize;
    while pairs.len() < target && attempts < 100 * target.max(1) {
        attempts += 1;
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b || tree.path_vertices(a, b).len() - 1 > span {
            continue;
        }
        if seen.insert(normalize(a, b)) {
            pairs.push((a, b));
        }
    }
    pairs.shuffle(&mut rng);
    let links = pairs
        .into_iter()
        .enumerate()
        .map(|(id, (a, b))| Link {
            id,
            a,
            b,
            weight: f64::from(rng.gen_range(1..=config.max_weight)),
        })
        .collect();
    WtapInstance::new(tree, links)
}

/// Connected random graph (random tree plus distinct extra edges) with a random
/// terminal subset.
pub fn gen_steiner(config: &GeneratorConfig) -> Result<SteinerInstance> {
    config.validate()?;
    let n = config.vertex_count;
    if config.terminal_count == 0 || config.terminal_count > n {
        return Err(Error::Config(format!(
            "terminal_count must lie in 1..={n}, got {}",
            config.terminal_count
        )));
    }
    let max_edges = n * (n - 1) / 2;
    if config.link_or_edge_count > max_edges {
        return Err(Error::Config(format!(
            "{} edges do not fit a simple graph on {n} vertices",
            config.link_or_edge_count
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut pairs = random_tree(&mut rng, n);
    let mut seen: BTreeSet<(Vertex, Vertex)> =
        pairs.iter().map(|&(a, b)| normalize(a, b)).collect();
    while pairs.len() < config.link_or_edge_count {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b && seen.insert(normalize(a, b)) {
            pairs.push((a, b));
        }
    }
    pairs.shuffle(&mut rng);
    let edges: Vec<(Vertex, Vertex, f64)> = pairs
        .into_iter()
        .map(|(a, b)| (a, b, f64::from(rng.gen_range(1..=config.max_weight))))
        .collect();
    let terminals = index::sample(&mut rng, n, config.terminal_count).into_vec();
    SteinerInstance::new(n, &edges, &terminals)
}
