//! Fixed-point iterations: termination probability Φ, value distributions Ξ,
//! and the stratified probability Ψ over `Red`.

use std::collections::{BTreeMap, HashMap};

use super::chain::{build_chain_to_depth, NodeStatus};
use super::dist::Distribution;
use super::AnalysisError;
use crate::prob::Prob;
use crate::semantics::{Config, Step, StepKind};

/// `Φᵏ(⊥)(c)` for `k = 0..=n`. Exact when the configurations within
/// distance `n - 1` fit in `node_budget`; a lower bound otherwise.
pub fn phi_sequence(c: &Config, n: usize, node_budget: usize) -> Vec<Prob> {
    let g = build_chain_to_depth(c, node_budget, Some(n.saturating_sub(1)));
    let mut x = vec![Prob::zero(); g.len()];
    let mut out = vec![Prob::zero()];
    for _ in 0..n {
        let next: Vec<Prob> = (0..g.len())
            .map(|i| match g.status[i] {
                NodeStatus::Value => Prob::one(),
                NodeStatus::Stuck | NodeStatus::Frontier => Prob::zero(),
                NodeStatus::Live => g.edges[i].iter().map(|e| &e.weight * &x[e.target]).sum(),
            })
            .collect();
        x = next;
        out.push(x[0].clone());
    }
    out
}

/// `Φⁿ(⊥)(c)`.
pub fn phi_lower(c: &Config, n: usize, node_budget: usize) -> Prob {
    phi_sequence(c, n, node_budget).pop().unwrap_or_default()
}

/// `Ξᵏ(⊥)(c)` for `k = 0..=n`.
pub fn xi_sequence(c: &Config, n: usize, node_budget: usize) -> Vec<Distribution> {
    let g = build_chain_to_depth(c, node_budget, Some(n.saturating_sub(1)));
    let mut x: Vec<BTreeMap<usize, Prob>> = vec![BTreeMap::new(); g.len()];
    let to_dist = |m: &BTreeMap<usize, Prob>| -> Distribution {
        m.iter().map(|(v, p)| (g.nodes[*v].clone(), p.clone())).collect()
    };
    let mut out = vec![Distribution::new()];
    for _ in 0..n {
        let next: Vec<BTreeMap<usize, Prob>> = (0..g.len())
            .map(|i| match g.status[i] {
                NodeStatus::Value => BTreeMap::from([(i, Prob::one())]),
                NodeStatus::Stuck | NodeStatus::Frontier => BTreeMap::new(),
                NodeStatus::Live => {
                    let mut acc: BTreeMap<usize, Prob> = BTreeMap::new();
                    for e in &g.edges[i] {
                        for (v, p) in &x[e.target] {
                            *acc.entry(*v).or_default() += &(&e.weight * p);
                        }
                    }
                    acc
                }
            })
            .collect();
        x = next;
        out.push(to_dist(&x[0]));
    }
    out
}

pub fn xi_distribution(c: &Config, n: usize, node_budget: usize) -> Distribution {
    xi_sequence(c, n, node_budget).pop().unwrap_or_default()
}

/// A path with exactly one choice or unfold-fold step, which is its last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedPath {
    /// Every configuration on the path, starting with the source.
    pub configs: Vec<Config>,
    pub weight: Prob,
    pub kind: StepKind,
}

impl RedPath {
    pub fn last(&self) -> &Config {
        self.configs.last().expect("paths are nonempty")
    }
}

/// The cuff-path from `c`: deterministic, choice-free, unfold-fold-free
/// steps up to a value, stuck term, or choice/unfold-fold redex.
pub fn cuff_path(c: &Config, budget: usize) -> Result<(Vec<Config>, Step), AnalysisError> {
    let mut path = vec![c.clone()];
    loop {
        let cur = path.last().expect("nonempty");
        match cur.step() {
            Step::Steps(mut s) if s.len() == 1 && s[0].kind == StepKind::Other => {
                if path.len() > budget {
                    return Err(AnalysisError::CuffBudget(budget));
                }
                let next = s.pop().expect("one successor").target;
                path.push(next);
            }
            other => return Ok((path, other)),
        }
    }
}

/// `Red(c)`: empty when `c` cuff-reduces to a value or a stuck term.
pub fn red_set(c: &Config, cuff_budget: usize) -> Result<Vec<RedPath>, AnalysisError> {
    let (prefix, step) = cuff_path(c, cuff_budget)?;
    let Step::Steps(succ) = step else {
        return Ok(Vec::new());
    };
    Ok(succ
        .into_iter()
        .map(|s| {
            let mut configs = prefix.clone();
            configs.push(s.target);
            RedPath {
                configs,
                weight: s.weight,
                kind: s.kind,
            }
        })
        .collect())
}

/// Memoised evaluator for `Ψᵏ(⊥)`.
pub struct Stratified {
    cuff_budget: usize,
    memo: HashMap<(Config, usize), Prob>,
}

impl Stratified {
    pub fn new(cuff_budget: usize) -> Self {
        Stratified {
            cuff_budget,
            memo: HashMap::new(),
        }
    }

    /// `Ψᵏ(⊥)(c)`.
    pub fn psi(&mut self, c: &Config, k: usize) -> Result<Prob, AnalysisError> {
        if k == 0 {
            return Ok(Prob::zero());
        }
        let (prefix, step) = cuff_path(c, self.cuff_budget)?;
        let succ = match step {
            Step::Value => return Ok(Prob::one()),
            Step::Stuck => return Ok(Prob::zero()),
            Step::Steps(s) => s,
        };
        let at = prefix.last().expect("nonempty").clone();
        if let Some(p) = self.memo.get(&(at.clone(), k)) {
            return Ok(p.clone());
        }
        let mut total = Prob::zero();
        for s in succ {
            let p = self.psi(&s.target, k - 1)?;
            total += &(&s.weight * &p);
        }
        self.memo.insert((at, k), total.clone());
        Ok(total)
    }
}

pub fn psi_stratified(c: &Config, k: usize, cuff_budget: usize) -> Result<Prob, AnalysisError> {
    Stratified::new(cuff_budget).psi(c, k)
}
