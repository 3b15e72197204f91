use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::harmonic;
use crate::tree::{LinkId, Vertex};
use crate::wtap::{split_to_uplinks, WtapInstance};

pub type UplinkId = usize;

/// A link between a vertex and one of its strict ancestors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UpLink {
    pub lower: Vertex,
    pub upper: Vertex,
}

#[derive(Debug, Clone)]
struct Entry {
    link: UpLink,
    owner: LinkId,
}

/// Outcome of a single exchange step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub dropped: Vec<UplinkId>,
    pub drop_wbar: f64,
    pub component_weight: f64,
    pub removed_links: Vec<LinkId>,
}

/// Current solution `F` together with its witness sets.
///
/// The up-link solution `U` is the disjoint union of all witness sets; each entry
/// carries a stable id so that identical up-link pairs owned by different links
/// stay distinguishable.
#[derive(Debug, Clone)]
pub struct WtapState<'a> {
    instance: &'a WtapInstance,
    witnesses: BTreeMap<LinkId, Vec<UplinkId>>,
    uplinks: BTreeMap<UplinkId, Entry>,
    next_id: UplinkId,
    epsilon: f64,
    k: usize,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon <= 0.5 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "epsilon must lie in (0, 1/2], got {epsilon}"
        )))
    }
}

/// Deduplicated ascending copy of a component.
pub(crate) fn canonical(component: &[LinkId]) -> Vec<LinkId> {
    let mut c = component.to_vec();
    c.sort_unstable();
    c.dedup();
    c
}

impl<'a> WtapState<'a> {
    /// Witness sets `W_l = U_l` for every link of the starting cover, then shortened.
    pub fn init(
        instance: &'a WtapInstance,
        initial: &[LinkId],
        epsilon: f64,
        k: usize,
    ) -> Result<Self> {
        check_epsilon(epsilon)?;
        let initial = canonical(initial);
        if let Some(&bad) = initial.iter().find(|&&id| id >= instance.links.len()) {
            return Err(Error::Config(format!("unknown link id {bad}")));
        }
        if !instance.is_cover(&initial) {
            return Err(Error::InfeasibleStart);
        }
        let mut state = WtapState {
            instance,
            witnesses: BTreeMap::new(),
            uplinks: BTreeMap::new(),
            next_id: 0,
            epsilon,
            k,
        };
        for id in initial {
            state.insert_fresh(id);
        }
        state.shorten_uplinks();
        Ok(state)
    }

    /// Builds a state from explicit witness sets without shortening. Every witness
    /// must be an up-link shadow of its owner and the witnesses must cover the tree.
    pub fn from_witnesses(
        instance: &'a WtapInstance,
        witnesses: &[(LinkId, Vec<UpLink>)],
        epsilon: f64,
        k: usize,
    ) -> Result<Self> {
        check_epsilon(epsilon)?;
        let tree = &instance.tree;
        let mut state = WtapState {
            instance,
            witnesses: BTreeMap::new(),
            uplinks: BTreeMap::new(),
            next_id: 0,
            epsilon,
            k,
        };
        for (owner, set) in witnesses {
            let link = instance
                .links
                .get(*owner)
                .ok_or_else(|| Error::Config(format!("unknown link id {owner}")))?;
            if set.is_empty() || set.len() > 2 || state.witnesses.contains_key(owner) {
                return Err(Error::Config(format!(
                    "link {owner} needs one witness set of size 1 or 2"
                )));
            }
            let mut ids = Vec::new();
            for &u in set {
                let vertical = u.lower != u.upper && tree.is_ancestor(u.upper, u.lower);
                if !vertical || !tree.is_shadow((u.lower, u.upper), (link.a, link.b))? {
                    return Err(Error::Config(format!(
                        "{u:?} is not an up-link shadow of link {owner}"
                    )));
                }
                ids.push(state.push_entry(u, *owner));
            }
            state.witnesses.insert(*owner, ids);
        }
        if !state.uplinks_cover() {
            return Err(Error::InfeasibleStart);
        }
        Ok(state)
    }

    fn push_entry(&mut self, link: UpLink, owner: LinkId) -> UplinkId {
        let id = self.next_id;
        self.next_id += 1;
        self.uplinks.insert(id, Entry { link, owner });
        id
    }

    /// Inserts `id` into `F` with a fresh witness set `U_l`, discarding any old one.
    fn insert_fresh(&mut self, id: LinkId) {
        if let Some(old) = self.witnesses.remove(&id) {
            for u in old {
                self.uplinks.remove(&u);
            }
        }
        let link = &self.instance.links[id];
        let ids = split_to_uplinks(&self.instance.tree, link.a, link.b)
            .into_iter()
            .map(|u| self.push_entry(u, id))
            .collect();
        self.witnesses.insert(id, ids);
    }

    pub fn instance(&self) -> &'a WtapInstance {
        self.instance
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Link ids of the current solution `F`, ascending.
    pub fn solution(&self) -> Vec<LinkId> {
        self.witnesses.keys().copied().collect()
    }

    pub fn contains(&self, link: LinkId) -> bool {
        self.witnesses.contains_key(&link)
    }

    pub fn solution_weight(&self) -> f64 {
        self.witnesses
            .keys()
            .map(|&l| self.instance.links[l].weight)
            .sum()
    }

    /// Witness set of a solution link.
    pub fn witness(&self, link: LinkId) -> Option<Vec<UpLink>> {
        self.witnesses
            .get(&link)
            .map(|ids| ids.iter().map(|u| self.uplinks[u].link).collect())
    }

    /// Entries of `U` as `(id, up-link, owner)`, ascending by id.
    pub fn uplinks(&self) -> impl Iterator<Item = (UplinkId, UpLink, LinkId)> + '_ {
        self.uplinks.iter().map(|(&id, e)| (id, e.link, e.owner))
    }

    pub fn uplink_count(&self) -> usize {
        self.uplinks.len()
    }

    /// `w(owner) / |W_owner|`.
    pub fn wbar(&self, id: UplinkId) -> f64 {
        let owner = self.uplinks[&id].owner;
        self.instance.links[owner].weight / self.witnesses[&owner].len() as f64
    }

    pub fn total_wbar(&self) -> f64 {
        self.uplinks.keys().map(|&u| self.wbar(u)).sum()
    }

    /// `sum over F of H_{|W_l|} * w(l)`.
    pub fn potential(&self) -> f64 {
        self.witnesses
            .iter()
            .map(|(&l, ws)| harmonic(ws.len()) * self.instance.links[l].weight)
            .sum()
    }

    /// Up-links of `U` whose whole path is covered by the component.
    pub fn drop_u(&self, component: &[LinkId]) -> Vec<UplinkId> {
        let tree = &self.instance.tree;
        let mut marked = vec![false; tree.vertex_count()];
        for &id in component {
            let l = &self.instance.links[id];
            for s in tree.path_slots(l.a, l.b) {
                marked[s] = true;
            }
        }
        self.uplinks
            .iter()
            .filter(|(_, e)| {
                tree.vertical_slots(e.link.lower, e.link.upper)
                    .all(|s| marked[s])
            })
            .map(|(&id, _)| id)
            .collect()
    }

    /// `wbar(Drop_U(C)) - 1.5 * w(C)`.
    pub fn gain(&self, component: &[LinkId]) -> f64 {
        let component = canonical(component);
        let dropped: f64 = self.drop_u(&component).iter().map(|&u| self.wbar(u)).sum();
        dropped - 1.5 * self.instance.weight_of(&component)
    }

    /// Deletes redundant up-links (ascending id), then trims every remaining
    /// up-link to the shortest vertical subpath that keeps `U` a cover (descending
    /// id, so that freshly added witnesses are trimmed against established ones).
    /// Afterwards the up-link paths are pairwise edge-disjoint.
    pub fn shorten_uplinks(&mut self) {
        let tree = &self.instance.tree;
        let mut counts =
            tree.coverage_counts(self.uplinks.values().map(|e| (e.link.lower, e.link.upper)));

        let ids: Vec<UplinkId> = self.uplinks.keys().copied().collect();
        let mut deleted = Vec::new();
        for &id in &ids {
            let e = &self.uplinks[&id];
            let slots: Vec<Vertex> = tree.vertical_slots(e.link.lower, e.link.upper).collect();
            if slots.iter().all(|&s| counts[s] >= 2) {
                for s in slots {
                    counts[s] -= 1;
                }
                deleted.push(id);
            }
        }
        for id in &deleted {
            self.uplinks.remove(id);
        }

        for &id in ids.iter().rev() {
            let Some(entry) = self.uplinks.get_mut(&id) else {
                continue;
            };
            let slots: Vec<Vertex> = tree
                .vertical_slots(entry.link.lower, entry.link.upper)
                .collect();
            let first = slots.iter().position(|&s| counts[s] == 1);
            let last = slots.iter().rposition(|&s| counts[s] == 1);
            let (Some(first), Some(last)) = (first, last) else {
                unreachable!("non-redundant up-link without a private edge");
            };
            for (i, &s) in slots.iter().enumerate() {
                if i < first || i > last {
                    counts[s] -= 1;
                }
            }
            entry.link = UpLink {
                lower: slots[first],
                upper: tree.parent(slots[last]),
            };
        }

        if !deleted.is_empty() {
            for ws in self.witnesses.values_mut() {
                ws.retain(|u| !deleted.contains(u));
            }
            self.witnesses.retain(|_, ws| !ws.is_empty());
        }
    }

    /// One exchange step: remove `Drop_U(C)`, add `C` with fresh witness sets,
    /// shorten, and discard links whose witness set became empty.
    pub fn apply_component(&mut self, component: &[LinkId]) -> StepReport {
        let component = canonical(component);
        let dropped = self.drop_u(&component);
        let drop_wbar: f64 = dropped.iter().map(|&u| self.wbar(u)).sum();
        let before: Vec<LinkId> = self.solution();

        for u in &dropped {
            self.uplinks.remove(u);
        }
        for ws in self.witnesses.values_mut() {
            ws.retain(|u| self.uplinks.contains_key(u));
        }
        self.witnesses.retain(|_, ws| !ws.is_empty());

        for &id in &component {
            self.insert_fresh(id);
        }
        self.shorten_uplinks();

        let removed_links = before
            .into_iter()
            .filter(|l| !self.witnesses.contains_key(l))
            .collect();
        StepReport {
            dropped,
            drop_wbar,
            component_weight: self.instance.weight_of(&component),
            removed_links,
        }
    }

    fn uplink_counts(&self) -> Vec<u32> {
        self.instance
            .tree
            .coverage_counts(self.uplinks.values().map(|e| (e.link.lower, e.link.upper)))
    }

    pub fn uplinks_cover(&self) -> bool {
        let tree = &self.instance.tree;
        let counts = self.uplink_counts();
        (0..tree.vertex_count()).all(|v| v == tree.root() || counts[v] > 0)
    }

    pub fn uplinks_disjoint(&self) -> bool {
        self.uplink_counts().iter().all(|&c| c <= 1)
    }

    /// Checks every structural invariant of the state, with relative tolerance
    /// `1e-9` for the weight identities.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let tree = &self.instance.tree;
        for (&l, ws) in &self.witnesses {
            let link = &self.instance.links[l];
            if ws.is_empty() || ws.len() > 2 {
                return Err(format!("link {l} has {} witnesses", ws.len()));
            }
            for u in ws {
                let e = self
                    .uplinks
                    .get(u)
                    .ok_or_else(|| format!("dangling up-link {u} in W_{l}"))?;
                if e.owner != l {
                    return Err(format!("up-link {u} owned by {} listed in W_{l}", e.owner));
                }
                let up = e.link;
                if up.lower == up.upper || !tree.is_ancestor(up.upper, up.lower) {
                    return Err(format!("{up:?} is not an up-link"));
                }
                if !tree.on_path(up.lower, (link.a, link.b))
                    || !tree.on_path(up.upper, (link.a, link.b))
                {
                    return Err(format!("{up:?} is not a shadow of link {l}"));
                }
            }
        }
        if self.uplinks.len() != self.witnesses.values().map(Vec::len).sum::<usize>() {
            return Err("up-link table and witness sets disagree".into());
        }
        if !self.instance.is_cover(&self.solution()) {
            return Err("F is not a cover".into());
        }
        if !self.uplinks_cover() {
            return Err("U is not a cover".into());
        }
        if !self.uplinks_disjoint() {
            return Err("up-link paths overlap".into());
        }
        let w = self.solution_weight();
        let spread = self.total_wbar();
        if (spread - w).abs() > 1e-9 * w {
            return Err(format!("wbar(U) = {spread} but w(F) = {w}"));
        }
        let phi = self.potential();
        if phi < w * (1.0 - 1e-9) || phi > 1.5 * w * (1.0 + 1e-9) {
            return Err(format!(
                "potential {phi} outside [w(F), 1.5 w(F)] for w(F) = {w}"
            ));
        }
        Ok(())
    }
}
