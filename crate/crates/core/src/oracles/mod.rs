//! Exhaustive reference solvers and feasibility checks for desk-scale instances.
//!
//! Nothing here reuses the engines' coverage, contraction or selection logic, so
//! agreement between the two is meaningful evidence.

mod steiner;
mod wtap;

pub use steiner::{
    drop_bruteforce_steiner, opt_krestricted_bruteforce, opt_steiner_enumeration,
    opt_steiner_exact, validate_steiner,
};
pub use wtap::{best_component_bruteforce_wtap, opt_wtap_bruteforce, validate_wtap};

pub const WTAP_BRUTEFORCE_LIMIT: usize = 22;
pub const COMPONENT_BRUTEFORCE_LIMIT: usize = 12;
pub const STEINER_EXACT_LIMIT: usize = 14;
/// Largest number of non-terminal vertices for [`opt_steiner_enumeration`].
pub const STEINER_ENUMERATION_LIMIT: usize = 20;
pub const KRESTRICTED_LIMIT: usize = 6;
pub const DROP_BRUTEFORCE_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub opt_value: f64,
    /// Sorted link or edge ids of an optimal solution.
    pub opt_certificate: Vec<usize>,
    /// Number of search nodes or candidates examined.
    pub search_space_size: u64,
    pub elapsed_ms: f64,
}

/// Ascending-order sum, so equal multisets of values give identical totals.
fn sorted_sum(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values.into_iter().sum()
}

/// Minimal union-find for the oracles.
struct Components {
    parent: Vec<usize>,
}

impl Components {
    fn new(n: usize) -> Self {
        Components {
            parent: (0..n).collect(),
        }
    }

    fn root(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn join(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.root(a), self.root(b));
        if ra == rb {
            return false;
        }
        self.parent[rb] = ra;
        true
    }
}
