//! Weighted tree augmentation: instance handling, witness-set state and the
//! potential-guided local search.

mod search;
mod solver;
mod state;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::tree::{normalize, Link, LinkId, RootedTree, Vertex};

pub use search::{best_component_exact, best_component_heuristic, is_k_thin, ExactSearchLimits};
pub use solver::{
    default_k, run_wtap, run_wtap_observed, Engine, WtapEvent, WtapLimits, WtapOptions, WtapRun,
    WtapTraceRow,
};
pub use state::{StepReport, UpLink, UplinkId, WtapState};

/// Default cap on the number of links produced by [`shadow_close`].
pub const DEFAULT_SHADOW_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct WtapInstance {
    pub tree: RootedTree,
    pub links: Vec<Link>,
    pub shadow_closed: bool,
}

impl WtapInstance {
    /// Links must be numbered `0..links.len()` in order and reference tree vertices.
    pub fn new(tree: RootedTree, links: Vec<Link>) -> Result<Self> {
        for (i, l) in links.iter().enumerate() {
            if l.id != i {
                return Err(Error::Config(format!(
                    "link at position {i} has id {}",
                    l.id
                )));
            }
            for v in [l.a, l.b] {
                if v >= tree.vertex_count() {
                    return Err(Error::BadVertex(v));
                }
            }
        }
        Ok(WtapInstance {
            tree,
            links,
            shadow_closed: false,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.tree.vertex_count()
    }

    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id]
    }

    pub fn is_feasible(&self) -> bool {
        self.tree.is_cover(&self.links)
    }

    pub fn is_cover(&self, ids: &[LinkId]) -> bool {
        self.tree.is_cover(ids.iter().map(|&i| &self.links[i]))
    }

    pub fn weight_of(&self, ids: &[LinkId]) -> f64 {
        ids.iter().map(|&i| self.links[i].weight).sum()
    }
}

/// Adds every shadow of every link, weighted by the cheapest link it is a shadow of.
///
/// Existing link ids are kept; an existing link whose pair is also generated as a
/// cheaper shadow takes the cheaper weight. New pairs are appended in pair order.
pub fn shadow_close(instance: &WtapInstance, cap: usize) -> Result<WtapInstance> {
    let tree = &instance.tree;
    let mut cheapest: BTreeMap<(Vertex, Vertex), f64> = BTreeMap::new();
    for link in &instance.links {
        let on_path = tree.path_vertices(link.a, link.b);
        for (i, &x) in on_path.iter().enumerate() {
            for &y in &on_path[i + 1..] {
                let w = cheapest.entry(normalize(x, y)).or_insert(link.weight);
                if link.weight < *w {
                    *w = link.weight;
                }
            }
            if cheapest.len() > cap {
                return Err(Error::SizeLimit {
                    what: "shadow-closed link set",
                    limit: cap,
                    actual: cheapest.len(),
                });
            }
        }
    }

    let mut links = instance.links.clone();
    for link in &mut links {
        if let Some(&w) = cheapest.get(&link.pair()) {
            if w < link.weight {
                link.weight = w;
            }
        }
    }
    let present: std::collections::HashSet<_> = links.iter().map(Link::pair).collect();
    for (&(a, b), &w) in &cheapest {
        if !present.contains(&(a, b)) {
            let id = links.len();
            links.push(Link {
                id,
                a,
                b,
                weight: w,
            });
        }
    }
    if links.len() > cap {
        return Err(Error::SizeLimit {
            what: "shadow-closed link set",
            limit: cap,
            actual: links.len(),
        });
    }
    Ok(WtapInstance {
        tree: instance.tree.clone(),
        links,
        shadow_closed: true,
    })
}

/// Splits a link at its apex into the (one or two) up-links covering the same edges.
pub fn split_to_uplinks(tree: &RootedTree, a: Vertex, b: Vertex) -> Vec<UpLink> {
    let apex = tree.lca(a, b);
    if apex == a {
        vec![UpLink { lower: b, upper: a }]
    } else if apex == b {
        vec![UpLink { lower: a, upper: b }]
    } else {
        vec![
            UpLink {
                lower: a,
                upper: apex,
            },
            UpLink {
                lower: b,
                upper: apex,
            },
        ]
    }
}

/// Inclusion-minimal cover by greedy pruning: heaviest links are removed first
/// (ties by id) whenever the remainder still covers the tree.
pub fn initial_wtap_solution(instance: &WtapInstance) -> Result<Vec<LinkId>> {
    let tree = &instance.tree;
    let mut counts = tree.coverage_counts(instance.links.iter().map(|l| (l.a, l.b)));
    if (0..tree.vertex_count()).any(|v| v != tree.root() && counts[v] == 0) {
        return Err(Error::Infeasible(
            "the full link set does not cover the tree".into(),
        ));
    }
    let mut order: Vec<LinkId> = (0..instance.links.len()).collect();
    order.sort_by(|&x, &y| {
        instance.links[y]
            .weight
            .total_cmp(&instance.links[x].weight)
            .then(x.cmp(&y))
    });
    let mut keep = vec![true; instance.links.len()];
    for id in order {
        let l = &instance.links[id];
        let slots = tree.path_slots(l.a, l.b);
        if slots.iter().all(|&s| counts[s] >= 2) {
            keep[id] = false;
            for s in slots {
                counts[s] -= 1;
            }
        }
    }
    Ok((0..instance.links.len()).filter(|&i| keep[i]).collect())
}
