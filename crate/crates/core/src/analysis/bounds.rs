use super::chain::{build_chain, NodeStatus};
use super::solve::reach_probabilities;
use crate::prob::Prob;
use crate::semantics::Config;

/// Two-sided bounds on the termination probability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub lower: Prob,
    pub upper: Prob,
    /// The explored chain was closed, so `lower == upper` is the exact value.
    pub exact: bool,
    pub nodes: usize,
}

impl Bounds {
    pub fn width(&self) -> Prob {
        &self.upper - &self.lower
    }

    pub fn contains(&self, p: &Prob) -> bool {
        self.lower <= *p && *p <= self.upper
    }
}

/// Explores at most `node_budget` configurations. The lower bound counts
/// unexplored nodes as diverging, the upper bound as terminating.
pub fn prob_bounds(c: &Config, node_budget: usize) -> Bounds {
    let g = build_chain(c, node_budget);
    let lower = reach_probabilities(&g, |i| g.status[i] == NodeStatus::Value)[0].clone();
    if g.complete() {
        return Bounds {
            upper: lower.clone(),
            lower,
            exact: true,
            nodes: g.len(),
        };
    }
    let upper = reach_probabilities(&g, |i| {
        matches!(g.status[i], NodeStatus::Value | NodeStatus::Frontier)
    })[0]
        .clone();
    Bounds {
        lower,
        upper,
        exact: false,
        nodes: g.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn cfg(s: &str) -> Config {
        Config::new(parse_term(s).unwrap())
    }

    #[test]
    fn exact_when_closed() {
        let b = prob_bounds(&cfg("ifz rand 4 then () else (fn x => x x) (fn x => x x)"), 100);
        assert!(b.exact);
        assert_eq!(b.lower, Prob::new(1, 4));
        assert_eq!(b.upper, Prob::new(1, 4));
    }

    #[test]
    fn open_chain_brackets_truth() {
        // Counts upward forever with probability 1/2 at each step; terminates a.s.
        let src = "(fn f => f f 1) (fn f => fn n => ifz rand 2 then n else f f (succ n))";
        let b = prob_bounds(&cfg(src), 200);
        assert!(!b.exact);
        assert!(b.contains(&Prob::one()));
        assert!(b.lower > Prob::new(9, 10));
    }
}
