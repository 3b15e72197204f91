//! Local-search approximation algorithms for weighted tree augmentation and
//! Steiner tree, with exact reference solvers, instance formats and generators.

pub mod error;
pub mod io;
pub mod oracles;
pub mod steiner;
pub mod tree;
pub mod wtap;

pub use error::{Error, Result};

/// Why a local search stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Nothing to optimize (single vertex or single terminal).
    Trivial,
    /// No component has positive gain.
    NoImprovement,
    /// The best component did not shrink the potential by the required factor.
    InsufficientDecrease,
    TimeBudget,
    IterationLimit,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::Trivial => "trivial",
            StopReason::NoImprovement => "no-improvement",
            StopReason::InsufficientDecrease => "insufficient-decrease",
            StopReason::TimeBudget => "time-budget",
            StopReason::IterationLimit => "iteration-limit",
        }
    }
}

/// `ln 4`, the approximation factor target of the Steiner local search.
pub const LN_4: f64 = 2.0 * std::f64::consts::LN_2;

/// The harmonic number `H_q = 1 + 1/2 + ... + 1/q` (`H_0 = 0`).
pub fn harmonic(q: usize) -> f64 {
    (1..=q).map(|i| 1.0 / i as f64).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(0), 0.0);
        assert_eq!(harmonic(1), 1.0);
        assert_eq!(harmonic(2), 1.5);
        assert!((harmonic(3) - 11.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn ln4_matches_std() {
        assert!((LN_4 - 4f64.ln()).abs() < 1e-15);
    }
}
