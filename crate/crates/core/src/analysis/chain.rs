use std::collections::{HashMap, VecDeque};
use std::fmt::Write;

use crate::prob::Prob;
use crate::semantics::{Config, Step, StepKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeStatus {
    Value,
    Stuck,
    /// Fully expanded: out-weights sum to 1.
    Live,
    /// Not expanded because a budget ran out.
    Frontier,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub target: usize,
    pub weight: Prob,
    pub kind: StepKind,
}

/// Reachable configurations from a root (node 0), numbered in
/// breadth-first discovery order.
#[derive(Clone, Debug)]
pub struct ChainGraph {
    pub nodes: Vec<Config>,
    pub status: Vec<NodeStatus>,
    pub edges: Vec<Vec<Edge>>,
    /// Breadth-first distance from the root.
    pub depth: Vec<usize>,
    index: HashMap<Config, usize>,
}

impl ChainGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// True iff no node was left unexpanded.
    pub fn complete(&self) -> bool {
        !self.status.contains(&NodeStatus::Frontier)
    }

    pub fn node_of(&self, c: &Config) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    /// Nodes from which some node satisfying `target` is reachable.
    pub fn can_reach(&self, target: impl Fn(usize) -> bool) -> Vec<bool> {
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); self.len()];
        for (i, es) in self.edges.iter().enumerate() {
            for e in es {
                preds[e.target].push(i);
            }
        }
        let mut seen = vec![false; self.len()];
        let mut stack: Vec<usize> = (0..self.len()).filter(|&i| target(i)).collect();
        for &i in &stack {
            seen[i] = true;
        }
        while let Some(i) = stack.pop() {
            for &p in &preds[i] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Graphviz rendering.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph chain {\n  node [shape=box, fontname=monospace];\n");
        for (i, c) in self.nodes.iter().enumerate() {
            let shape = match self.status[i] {
                NodeStatus::Value => ", style=bold",
                NodeStatus::Stuck => ", style=dashed",
                NodeStatus::Frontier => ", style=dotted",
                NodeStatus::Live => "",
            };
            let label = c.to_string().replace('\\', "\\\\").replace('"', "\\\"");
            let _ = writeln!(s, "  n{i} [label=\"{label}\"{shape}];");
        }
        for (i, es) in self.edges.iter().enumerate() {
            for e in es {
                let _ = writeln!(s, "  n{i} -> n{} [label=\"{}\"];", e.target, e.weight);
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Explores the reachable graph breadth-first with at most `node_budget`
/// nodes.
pub fn build_chain(c: &Config, node_budget: usize) -> ChainGraph {
    build_chain_to_depth(c, node_budget, None)
}

/// Like [`build_chain`], additionally leaving nodes at distance `max_depth`
/// unexpanded unless they are values or stuck.
pub fn build_chain_to_depth(c: &Config, node_budget: usize, max_depth: Option<usize>) -> ChainGraph {
    let mut g = ChainGraph {
        nodes: vec![c.clone()],
        status: vec![NodeStatus::Frontier],
        edges: vec![Vec::new()],
        depth: vec![0],
        index: HashMap::from([(c.clone(), 0)]),
    };
    let budget = node_budget.max(1);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let steps = match g.nodes[i].step() {
            Step::Value => {
                g.status[i] = NodeStatus::Value;
                continue;
            }
            Step::Stuck => {
                g.status[i] = NodeStatus::Stuck;
                continue;
            }
            Step::Steps(s) => s,
        };
        if max_depth.is_some_and(|d| g.depth[i] >= d) {
            continue;
        }
        let fresh = steps
            .iter()
            .filter(|s| !g.index.contains_key(&s.target))
            .count();
        if g.len() + fresh > budget {
            continue;
        }
        let mut out: Vec<Edge> = Vec::with_capacity(steps.len());
        for s in steps {
            let j = match g.index.get(&s.target) {
                Some(&j) => j,
                None => {
                    let j = g.len();
                    g.index.insert(s.target.clone(), j);
                    g.nodes.push(s.target);
                    g.status.push(NodeStatus::Frontier);
                    g.edges.push(Vec::new());
                    g.depth.push(g.depth[i] + 1);
                    queue.push_back(j);
                    j
                }
            };
            match out.iter_mut().find(|e| e.target == j) {
                Some(e) => e.weight += &s.weight,
                None => out.push(Edge {
                    target: j,
                    weight: s.weight,
                    kind: s.kind,
                }),
            }
        }
        g.edges[i] = out;
        g.status[i] = NodeStatus::Live;
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn chain(s: &str, budget: usize) -> ChainGraph {
        build_chain(&Config::new(parse_term(s).unwrap()), budget)
    }

    #[test]
    fn rand_two() {
        let g = chain("rand 2", 10);
        assert_eq!(g.len(), 3);
        assert!(g.complete());
        assert_eq!(g.status[1], NodeStatus::Value);
    }

    #[test]
    fn omega_loops() {
        let g = chain("(fn x => x x) (fn x => x x)", 10);
        assert!(g.complete());
        assert_eq!(g.len(), 1);
        assert_eq!(g.edges[0][0].target, 0);
        assert!(!g.status.contains(&NodeStatus::Value));
    }

    #[test]
    fn budget_leaves_frontier() {
        let g = chain("succ (succ (succ 1))", 2);
        assert!(!g.complete());
        assert_eq!(g.len(), 2);
        let g = build_chain_to_depth(&Config::new(parse_term("succ (succ 1)").unwrap()), 100, Some(1));
        assert_eq!(g.status, vec![NodeStatus::Live, NodeStatus::Frontier]);
    }

    #[test]
    fn out_weights_sum_to_one() {
        let g = chain("let x = rand 3 in ifz x then () else rand 2", 100);
        for (i, es) in g.edges.iter().enumerate() {
            if g.status[i] == NodeStatus::Live {
                let total: Prob = es.iter().map(|e| &e.weight).sum();
                assert!(total.is_one());
            }
        }
    }
}
