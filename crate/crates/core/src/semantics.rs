//! Weighted small-step reduction on configurations (heap plus closed term).

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::prob::Prob;
use crate::syntax::{decompose, pretty, Decomposition, Side, Term};

/// A heap and a closed term. Constructed configurations are canonical:
/// locations are numbered by first occurrence in the term, then the
/// remaining cells in their previous order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Config {
    pub heap: Vec<u64>,
    pub term: Arc<Term>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StepKind {
    Choice,
    UnfoldFold,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedStep {
    pub weight: Prob,
    pub target: Config,
    pub kind: StepKind,
}

/// Classification of a configuration together with its successors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Value,
    Stuck,
    /// Nonempty; weights sum to 1.
    Steps(Vec<WeightedStep>),
}

impl Config {
    /// A configuration with an empty heap.
    pub fn new(term: Term) -> Config {
        Config::canonical(Vec::new(), Arc::new(term))
    }

    pub fn canonical(heap: Vec<u64>, term: Arc<Term>) -> Config {
        let mut order: Vec<usize> = Vec::new();
        collect_locs(&term, &mut order);
        let mut seen = vec![false; heap.len()];
        let mut dangling = false;
        for &l in &order {
            match seen.get_mut(l) {
                Some(s) => *s = true,
                None => dangling = true,
            }
        }
        // Dangling locations make the config stuck; keep it as is.
        if dangling {
            return Config { heap, term };
        }
        order.extend((0..heap.len()).filter(|&l| !seen[l]));
        if order.iter().enumerate().all(|(i, &l)| i == l) {
            return Config { heap, term };
        }
        let mut rename = vec![0; heap.len()];
        for (new, &old) in order.iter().enumerate() {
            rename[old] = new;
        }
        let new_heap = order.iter().map(|&old| heap[old]).collect();
        let term = rename_locs(&term, &rename).unwrap_or(term);
        Config {
            heap: new_heap,
            term,
        }
    }

    pub fn is_value(&self) -> bool {
        self.term.is_value()
    }

    pub fn step(&self) -> Step {
        step(self)
    }

    pub fn successors(&self) -> Vec<WeightedStep> {
        match step(self) {
            Step::Steps(s) => s,
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.heap.is_empty() {
            let cells: Vec<String> = self
                .heap
                .iter()
                .enumerate()
                .map(|(l, n)| format!("<loc {l}> -> {n}"))
                .collect();
            write!(f, "{{{}}} ", cells.join(", "))?;
        }
        f.write_str(&pretty(&self.term))
    }
}

fn collect_locs(t: &Term, out: &mut Vec<usize>) {
    if let Term::Loc(l) = t {
        if !out.contains(l) {
            out.push(*l);
        }
        return;
    }
    for c in t.children() {
        collect_locs(c, out);
    }
}

fn rename_locs(t: &Arc<Term>, rename: &[usize]) -> Option<Arc<Term>> {
    if let Term::Loc(l) = **t {
        return (rename[l] != l).then(|| Arc::new(Term::Loc(rename[l])));
    }
    let kids = t.children();
    if kids.is_empty() {
        return None;
    }
    let new: Vec<Option<Arc<Term>>> = kids.iter().map(|c| rename_locs(c, rename)).collect();
    if new.iter().all(Option::is_none) {
        return None;
    }
    let mut it = new
        .into_iter()
        .zip(kids)
        .map(|(n, old)| n.unwrap_or_else(|| old.clone()));
    let mut next = || it.next().expect("arity");
    Some(Arc::new(match &**t {
        Term::Rand(_) => Term::Rand(next()),
        Term::Succ(_) => Term::Succ(next()),
        Term::Pred(_) => Term::Pred(next()),
        Term::Inl(_) => Term::Inl(next()),
        Term::Inr(_) => Term::Inr(next()),
        Term::Unfold(_) => Term::Unfold(next()),
        Term::Ref(_) => Term::Ref(next()),
        Term::Deref(_) => Term::Deref(next()),
        Term::Proj(s, _) => Term::Proj(*s, next()),
        Term::Fun(h, ty, _) => Term::Fun(h.clone(), ty.clone(), next()),
        Term::TFun(n, _) => Term::TFun(n.clone(), next()),
        Term::TApp(_, ty) => Term::TApp(next(), ty.clone()),
        Term::Pack(_, ty) => Term::Pack(next(), ty.clone()),
        Term::Fold(_, ty) => Term::Fold(next(), ty.clone()),
        Term::Pair(..) => Term::Pair(next(), next()),
        Term::App(..) => Term::App(next(), next()),
        Term::Assign(..) => Term::Assign(next(), next()),
        Term::Unpack(_, h, _) => Term::Unpack(next(), h.clone(), next()),
        Term::Ifz(..) => Term::Ifz(next(), next(), next()),
        Term::Match(_, h1, _, h2, _) => Term::Match(next(), h1.clone(), next(), h2.clone(), next()),
        Term::Var(_) | Term::Unit | Term::Num(_) | Term::Loc(_) => unreachable!("leaf"),
    }))
}

fn step(c: &Config) -> Step {
    let (ctx, redex) = match decompose(&c.term) {
        Decomposition::Value => return Step::Value,
        Decomposition::Stuck => return Step::Stuck,
        Decomposition::Redex(e, r) => (e, r),
    };
    let one = |t: Arc<Term>, heap: Vec<u64>, kind: StepKind| {
        Step::Steps(vec![WeightedStep {
            weight: Prob::one(),
            target: Config::canonical(heap, ctx.plug_arc(t)),
            kind,
        }])
    };
    let other = |t: Term| one(Arc::new(t), c.heap.clone(), StepKind::Other);
    match &*redex {
        Term::App(f, v) => match &**f {
            Term::Fun(_, _, body) => other(body.open(v)),
            _ => Step::Stuck,
        },
        Term::Proj(s, p) => match (&**p, s) {
            (Term::Pair(a, _), Side::First) => one(a.clone(), c.heap.clone(), StepKind::Other),
            (Term::Pair(_, b), Side::Second) => one(b.clone(), c.heap.clone(), StepKind::Other),
            _ => Step::Stuck,
        },
        Term::Match(s, _, a, _, b) => match &**s {
            Term::Inl(v) => other(a.open(v)),
            Term::Inr(v) => other(b.open(v)),
            _ => Step::Stuck,
        },
        Term::TApp(f, _) => match &**f {
            Term::TFun(_, body) => one(body.clone(), c.heap.clone(), StepKind::Other),
            _ => Step::Stuck,
        },
        Term::Unpack(p, _, body) => match &**p {
            Term::Pack(v, _) => other(body.open(v)),
            _ => Step::Stuck,
        },
        Term::Unfold(f) => match &**f {
            Term::Fold(v, _) => one(v.clone(), c.heap.clone(), StepKind::UnfoldFold),
            _ => Step::Stuck,
        },
        Term::Rand(n) => match **n {
            Term::Num(n) => Step::Steps(
                (1..=n)
                    .map(|k| WeightedStep {
                        weight: Prob::new(1, n),
                        target: Config::canonical(c.heap.clone(), ctx.plug_arc(Arc::new(Term::Num(k)))),
                        kind: StepKind::Choice,
                    })
                    .collect(),
            ),
            _ => Step::Stuck,
        },
        Term::Pred(n) => match **n {
            Term::Num(n) => other(Term::Num(n.saturating_sub(1).max(1))),
            _ => Step::Stuck,
        },
        Term::Succ(n) => match **n {
            Term::Num(n) => other(Term::Num(n.saturating_add(1))),
            _ => Step::Stuck,
        },
        Term::Ifz(s, a, b) => match **s {
            Term::Num(1) => one(a.clone(), c.heap.clone(), StepKind::Other),
            Term::Num(_) => one(b.clone(), c.heap.clone(), StepKind::Other),
            _ => Step::Stuck,
        },
        Term::Ref(n) => match **n {
            Term::Num(n) => {
                let mut heap = c.heap.clone();
                heap.push(n);
                let l = heap.len() - 1;
                one(Arc::new(Term::Loc(l)), heap, StepKind::Other)
            }
            _ => Step::Stuck,
        },
        Term::Deref(l) => match **l {
            Term::Loc(l) if l < c.heap.len() => other(Term::Num(c.heap[l])),
            _ => Step::Stuck,
        },
        Term::Assign(l, n) => match (&**l, &**n) {
            (Term::Loc(l), Term::Num(n)) if *l < c.heap.len() => {
                let mut heap = c.heap.clone();
                heap[*l] = *n;
                one(Arc::new(Term::Unit), heap, StepKind::Other)
            }
            _ => Step::Stuck,
        },
        _ => Step::Stuck,
    }
}

/// The kind of the next reduction, if any.
pub fn redex_kind(c: &Config) -> Option<StepKind> {
    match decompose(&c.term) {
        Decomposition::Redex(_, r) => Some(match &*r {
            Term::Rand(_) => StepKind::Choice,
            Term::Unfold(_) => StepKind::UnfoldFold,
            _ => StepKind::Other,
        }),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CuffOutcome {
    Value(Config),
    Stuck(Config),
    /// The next reduction is a choice or an unfold-fold.
    AtChoiceOrUnfold(Config),
    BudgetExceeded(Config),
}

/// Follows deterministic steps that are neither choices nor unfold-folds.
pub fn cuff_normalize(c: &Config, budget: usize) -> CuffOutcome {
    let mut cur = c.clone();
    let mut taken = 0;
    loop {
        match step(&cur) {
            Step::Value => return CuffOutcome::Value(cur),
            Step::Stuck => return CuffOutcome::Stuck(cur),
            Step::Steps(mut s) => {
                if s.len() != 1 || s[0].kind != StepKind::Other {
                    return CuffOutcome::AtChoiceOrUnfold(cur);
                }
                if taken == budget {
                    return CuffOutcome::BudgetExceeded(cur);
                }
                taken += 1;
                cur = s.pop().expect("one successor").target;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    Terminated(Config),
    StuckAt(Config),
    FuelExhausted(Config),
}

/// Samples one execution, resolving choices with a generator seeded by `seed`.
pub fn sample_run(c: &Config, seed: u64, fuel: usize) -> (RunOutcome, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = c.clone();
    for steps in 0..=fuel {
        match step(&cur) {
            Step::Value => return (RunOutcome::Terminated(cur), steps),
            Step::Stuck => return (RunOutcome::StuckAt(cur), steps),
            Step::Steps(mut s) => {
                if steps == fuel {
                    break;
                }
                let i = if s.len() == 1 { 0 } else { rng.random_range(0..s.len()) };
                cur = s.swap_remove(i).target;
            }
        }
    }
    (RunOutcome::FuelExhausted(cur), fuel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::build::*;
    use crate::syntax::parse_term;

    fn cfg(s: &str) -> Config {
        Config::new(parse_term(s).unwrap())
    }

    #[test]
    fn rand_has_uniform_successors() {
        let s = cfg("rand 2").successors();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].target, Config::new(num(1)));
        assert_eq!(s[1].target, Config::new(num(2)));
        assert!(s.iter().all(|w| w.weight == Prob::new(1, 2) && w.kind == StepKind::Choice));
        let s = cfg("rand 1").successors();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].kind, StepKind::Choice);
    }

    #[test]
    fn pred_clamps_and_ifz_branches() {
        assert_eq!(cfg("pred 1").successors()[0].target, Config::new(num(1)));
        assert_eq!(cfg("pred 5").successors()[0].target, Config::new(num(4)));
        assert_eq!(cfg("ifz 1 then 7 else 8").successors()[0].target, Config::new(num(7)));
        assert_eq!(cfg("ifz 3 then 7 else 8").successors()[0].target, Config::new(num(8)));
    }

    #[test]
    fn heap_rules() {
        let s = cfg("ref 5").successors();
        assert_eq!(s[0].target.heap, vec![5]);
        assert_eq!(*s[0].target.term, Term::Loc(0));
        let mut c = cfg("let r = ref 1 in r := succ !r; !r");
        for _ in 0..20 {
            match c.step() {
                Step::Steps(mut s) => c = s.pop().unwrap().target,
                _ => break,
            }
        }
        assert_eq!(*c.term, Term::Num(2));
        assert_eq!(c.heap, vec![2]);
    }

    #[test]
    fn canonical_renumbering() {
        let t = Arc::new(pair(Term::Loc(1), Term::Loc(0)));
        let c = Config::canonical(vec![10, 20], t);
        assert_eq!(c.heap, vec![20, 10]);
        assert_eq!(*c.term, pair(Term::Loc(0), Term::Loc(1)));
        let d = Config::canonical(vec![20, 10], Arc::new(pair(Term::Loc(0), Term::Loc(1))));
        assert_eq!(c, d);
    }

    #[test]
    fn dangling_location_is_stuck() {
        let c = Config::canonical(vec![], Arc::new(deref(Term::Loc(3))));
        assert_eq!(c.step(), Step::Stuck);
    }

    #[test]
    fn cuff_normalization() {
        assert_eq!(cuff_normalize(&cfg("(fn x => x) ()"), 10), CuffOutcome::Value(cfg("()")));
        let c = cfg("() (+) ()");
        assert_eq!(cuff_normalize(&c, 10), CuffOutcome::AtChoiceOrUnfold(c.clone()));
        let c = cfg("unfold (fold ())");
        assert_eq!(cuff_normalize(&c, 10), CuffOutcome::AtChoiceOrUnfold(c.clone()));
        assert!(matches!(
            cuff_normalize(&cfg("succ (succ 1)"), 1),
            CuffOutcome::BudgetExceeded(_)
        ));
    }

    #[test]
    fn sampling_is_deterministic() {
        let c = cfg("rand 2");
        let (a, _) = sample_run(&c, 7, 10);
        let (b, _) = sample_run(&c, 7, 10);
        assert_eq!(a, b);
        assert!(matches!(a, RunOutcome::Terminated(_)));
        let omega = cfg("(fn x => x x) (fn x => x x)");
        assert!(matches!(sample_run(&omega, 1, 100).0, RunOutcome::FuelExhausted(_)));
        assert!(matches!(sample_run(&cfg("()"), 1, 0).0, RunOutcome::Terminated(_)));
    }
}
