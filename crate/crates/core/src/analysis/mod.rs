//! Termination probabilities and value distributions.

mod bounds;
mod chain;
mod dist;
mod iterate;
mod solve;

pub use bounds::{prob_bounds, Bounds};
pub use chain::{build_chain, build_chain_to_depth, ChainGraph, Edge, NodeStatus};
pub use dist::Distribution;
pub use iterate::{
    cuff_path, phi_lower, phi_sequence, psi_stratified, red_set, xi_distribution, xi_sequence,
    RedPath, Stratified,
};
pub use solve::{exact_distribution, reach_probabilities, solve_exact, Incomplete};

use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("cuff normalisation did not finish within {0} steps")]
    CuffBudget(usize),
    #[error(transparent)]
    Incomplete(#[from] Incomplete),
}

/// Budgets shared by the analyses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Effort {
    /// Maximum number of chain nodes explored per configuration.
    pub nodes: usize,
    /// Maximum length of a cuff path.
    pub cuff: usize,
    /// Iteration count for Φ, Ξ and Ψ.
    pub iterations: usize,
}

impl Default for Effort {
    fn default() -> Self {
        Effort {
            nodes: 20_000,
            cuff: 200,
            iterations: 30,
        }
    }
}

impl Effort {
    /// Scales the node budget and iteration count by `factor`.
    pub fn scaled(self, factor: usize) -> Self {
        let f = factor.max(1);
        Effort {
            nodes: self.nodes.saturating_mul(f),
            cuff: self.cuff.saturating_mul(f),
            iterations: self.iterations.saturating_mul(f),
        }
    }
}
