//! Exact absorption probabilities on finite chains.
//!
//! Nodes that cannot reach an accepting node are fixed at 0 first, which
//! selects the least solution of `x = A x + b`. The remaining system is
//! solved by eliminating states one at a time (deepest first) and then
//! back-substituting, over exact rationals.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use super::chain::{ChainGraph, NodeStatus};
use super::dist::Distribution;
use crate::prob::Prob;

type Q = BigRational;

#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
#[error("the chain is incomplete; raise the node budget")]
pub struct Incomplete;

/// Probability of reaching a value from each node.
pub fn solve_exact(g: &ChainGraph) -> Result<Vec<Prob>, Incomplete> {
    if !g.complete() {
        return Err(Incomplete);
    }
    Ok(reach_probabilities(g, |i| g.status[i] == NodeStatus::Value))
}

/// Least probability of reaching a node satisfying `accept`, treating every
/// other node without out-edges as absorbing with value 0.
pub fn reach_probabilities(g: &ChainGraph, accept: impl Fn(usize) -> bool) -> Vec<Prob> {
    solve_generic::<Q>(g, &accept, &|_| Q::one())
        .into_iter()
        .map(Prob::from_rational)
        .collect()
}

/// Distribution of terminal values reached from the root.
pub fn exact_distribution(g: &ChainGraph) -> Result<Distribution, Incomplete> {
    if !g.complete() {
        return Err(Incomplete);
    }
    let is_value = |i: usize| g.status[i] == NodeStatus::Value;
    let root = root_vector(g, &is_value);
    Ok(root
        .0
        .into_iter()
        .map(|(v, p)| (g.nodes[v].clone(), Prob::from_rational(p)))
        .collect())
}

fn root_vector(g: &ChainGraph, accept: &dyn Fn(usize) -> bool) -> SparseVec {
    let mut all = solve_generic::<SparseVec>(g, accept, &|i| SparseVec(BTreeMap::from([(i, Q::one())])));
    all.swap_remove(0)
}

trait Rhs: Clone {
    fn zero() -> Self;
    fn add_scaled(&mut self, other: &Self, c: &Q);
    fn scale(&mut self, c: &Q);
}

impl Rhs for Q {
    fn zero() -> Self {
        Zero::zero()
    }

    fn add_scaled(&mut self, other: &Self, c: &Q) {
        *self += other * c;
    }

    fn scale(&mut self, c: &Q) {
        *self *= c;
    }
}

#[derive(Clone, Debug, Default)]
struct SparseVec(BTreeMap<usize, Q>);

impl Rhs for SparseVec {
    fn zero() -> Self {
        Self::default()
    }

    fn add_scaled(&mut self, other: &Self, c: &Q) {
        for (k, v) in &other.0 {
            let e = self.0.entry(*k).or_insert_with(<Q as Zero>::zero);
            *e += v * c;
        }
    }

    fn scale(&mut self, c: &Q) {
        for v in self.0.values_mut() {
            *v *= c;
        }
    }
}

enum Target {
    Const(usize),
    Zero,
    Var(usize),
}


struct Row<R> {
    coef: BTreeMap<usize, Q>,
    b: R,
}

fn solve_generic<R: Rhs>(
    g: &ChainGraph,
    accept: &dyn Fn(usize) -> bool,
    unit: &dyn Fn(usize) -> R,
) -> Vec<R> {
    let n = g.len();
    let good = g.can_reach(accept);
    let unknown = |i: usize| !accept(i) && good[i];

    // Deterministic single-successor nodes share their successor's value.
    let mut rep: Vec<Option<usize>> = vec![None; n];
    let resolve = |i: usize, rep: &mut Vec<Option<usize>>| -> usize {
        let mut path = Vec::new();
        let mut cur = i;
        while unknown(cur) && g.edges[cur].len() == 1 && g.edges[cur][0].target != cur {
            if let Some(r) = rep[cur] {
                cur = r;
                break;
            }
            path.push(cur);
            cur = g.edges[cur][0].target;
        }
        for p in path {
            rep[p] = Some(cur);
        }
        cur
    };
    let mut var_of: Vec<Option<usize>> = vec![None; n];
    let mut vars: Vec<usize> = Vec::new();
    let mut target_of = |i: usize, rep: &mut Vec<Option<usize>>, vars: &mut Vec<usize>| -> Target {
        let r = resolve(i, rep);
        if accept(r) {
            Target::Const(r)
        } else if !good[r] {
            Target::Zero
        } else {
            Target::Var(*var_of[r].get_or_insert_with(|| {
                vars.push(r);
                vars.len() - 1
            }))
        }
    };

    // Variables are discovered lazily as rows mention them.
    let targets: Vec<Target> = (0..n).map(|i| target_of(i, &mut rep, &mut vars)).collect();
    let mut rows: Vec<Row<R>> = Vec::new();
    while rows.len() < vars.len() {
        let node = vars[rows.len()];
        let mut row = Row {
            coef: BTreeMap::new(),
            b: R::zero(),
        };
        for e in &g.edges[node] {
            let w = e.weight.as_rational();
            match target_of(e.target, &mut rep, &mut vars) {
                Target::Const(c) => row.b.add_scaled(&unit(c), w),
                Target::Zero => {}
                Target::Var(v) => *row.coef.entry(v).or_insert_with(<Q as Zero>::zero) += w,
            }
        }
        rows.push(row);
    }

    let m = rows.len();
    let mut preds: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m];
    for (i, r) in rows.iter().enumerate() {
        for &j in r.coef.keys() {
            if j != i {
                preds[j].insert(i);
            }
        }
    }
    // Eliminate in reverse discovery order of the underlying nodes.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(vars[v]));
    let mut eliminated = vec![false; m];
    let mut zeroed = vec![false; m];
    for &k in &order {
        let mut row = std::mem::replace(
            &mut rows[k],
            Row {
                coef: BTreeMap::new(),
                b: R::zero(),
            },
        );
        let self_loop = row.coef.remove(&k).unwrap_or_else(<Q as Zero>::zero);
        if self_loop >= Q::one() {
            // Cannot happen for nodes that reach an accepting node.
            zeroed[k] = true;
            row.coef.clear();
            row.b = R::zero();
        } else if !self_loop.is_zero() {
            let f = (Q::one() - self_loop).recip();
            for v in row.coef.values_mut() {
                *v *= &f;
            }
            row.b.scale(&f);
        }
        for &s in row.coef.keys() {
            preds[s].remove(&k);
        }
        let ps: Vec<usize> = std::mem::take(&mut preds[k]).into_iter().collect();
        for p in ps {
            if eliminated[p] || p == k {
                continue;
            }
            let Some(a_pk) = rows[p].coef.remove(&k) else { continue };
            for (&s, a_ks) in &row.coef {
                *rows[p].coef.entry(s).or_insert_with(<Q as Zero>::zero) += &a_pk * a_ks;
                if s != p {
                    preds[s].insert(p);
                }
            }
            let bk = row.b.clone();
            rows[p].b.add_scaled(&bk, &a_pk);
        }
        eliminated[k] = true;
        rows[k] = row;
    }
    // Back-substitution: each eliminated row mentions only later variables.
    let mut value: Vec<Option<R>> = vec![None; m];
    for &k in order.iter().rev() {
        let mut x = rows[k].b.clone();
        if !zeroed[k] {
            for (s, c) in &rows[k].coef {
                let xs = value[*s].as_ref().expect("later variable solved");
                x.add_scaled(xs, c);
            }
        }
        value[k] = Some(x);
    }
    targets
        .into_iter()
        .map(|t| match t {
            Target::Const(c) => unit(c),
            Target::Zero => R::zero(),
            Target::Var(v) => value[v].clone().expect("solved"),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::chain::build_chain;
    use crate::semantics::Config;
    use crate::syntax::build::num;
    use crate::syntax::parse_term;

    fn graph(s: &str) -> ChainGraph {
        build_chain(&Config::new(parse_term(s).unwrap()), 10_000)
    }

    const OMEGA: &str = "((fn x => x x) (fn x => x x))";

    #[test]
    fn omega_is_zero() {
        assert_eq!(solve_exact(&graph(OMEGA)).unwrap()[0], Prob::zero());
    }

    #[test]
    fn one_in_three() {
        let g = graph(&format!("ifz rand 3 then () else {OMEGA}"));
        assert_eq!(solve_exact(&g).unwrap()[0], Prob::new(1, 3));
    }

    #[test]
    fn geometric_loop() {
        // Retry until the die shows 1: terminates almost surely.
        let src = "(fn f => f f 1) (fn f => fn n => ifz rand 3 then n else f f (succ n))";
        let g = graph(src);
        // n grows without bound, so the chain is infinite.
        assert!(!g.complete());
        let src = "(fn f => f f) (fn f => ifz rand 3 then () else f f)";
        let g = graph(src);
        assert!(g.complete());
        assert_eq!(solve_exact(&g).unwrap()[0], Prob::one());
    }

    #[test]
    fn distribution_of_rand() {
        let d = exact_distribution(&graph("rand 2")).unwrap();
        assert_eq!(d.value_prob(&num(1)), Prob::new(1, 2));
        assert_eq!(d.value_prob(&num(2)), Prob::new(1, 2));
    }

    #[test]
    fn distribution_mass_matches_solver() {
        let src = format!("(fn f => f f) (fn f => ifz rand 3 then rand 2 else ifz rand 2 then {OMEGA} else f f)");
        let g = graph(&src);
        let d = exact_distribution(&g).unwrap();
        let p = solve_exact(&g).unwrap()[0].clone();
        assert_eq!(d.mass(), p);
        // x = 1/3 + 2/3 * 1/2 * x  =>  x = 1/2
        assert_eq!(p, Prob::new(1, 2));
        assert_eq!(d.value_prob(&num(1)), Prob::new(1, 4));
    }

    #[test]
    fn incomplete_is_reported() {
        let g = build_chain(&Config::new(parse_term("succ (succ 1)").unwrap()), 1);
        assert_eq!(solve_exact(&g), Err(Incomplete));
    }
}
