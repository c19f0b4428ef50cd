//! CIU approximation testing: compare termination probabilities of two
//! terms under a pool of evaluation contexts enumerated from the hole type.
//!
//! A refutation is sound: it needs a context whose lower bound on the left
//! exceeds the upper bound on the right. Agreement on the pool is only
//! evidence up to the pool depth and the exploration budget.

use std::collections::HashSet;
use std::sync::Arc;

use thiserror::Error;

use crate::analysis::{build_chain, exact_distribution, prob_bounds, Bounds, Effort};
use crate::corpus;
use crate::prob::Prob;
use crate::semantics::Config;
use crate::syntax::{parse_type, pretty, pretty_type, EvalContext, Frame, Hint, Side, Term, Type};
use crate::typecheck::typecheck;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EquivError {
    #[error("{side} does not have type {ty}: {message}")]
    IllTyped {
        side: &'static str,
        ty: String,
        message: String,
    },
    #[error("the hole type {0} is not closed")]
    OpenType(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EquivOptions {
    /// Maximum number of generated frames per context.
    pub depth: usize,
    /// Node budget per plugged term.
    pub nodes: usize,
    /// Cap on the pool size; registered contexts always fit.
    pub max_contexts: usize,
}

impl Default for EquivOptions {
    fn default() -> Self {
        EquivOptions {
            depth: 3,
            nodes: Effort::default().nodes,
            max_contexts: 2_000,
        }
    }
}

/// Evaluation contexts accepting a given hole type, in a fixed order.
#[derive(Clone, Debug)]
pub struct ContextPool {
    pub hole: Type,
    pub depth: usize,
    pub contexts: Vec<EvalContext>,
    seen: HashSet<EvalContext>,
}

impl ContextPool {
    fn new(hole: Type, depth: usize) -> Self {
        ContextPool {
            hole,
            depth,
            contexts: Vec::new(),
            seen: HashSet::new(),
        }
    }

    /// Adds `e` unless it is already present.
    pub fn register(&mut self, e: EvalContext) {
        if self.seen.insert(e.clone()) {
            self.contexts.push(e);
        }
    }

    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }
}

fn arc(t: Term) -> Arc<Term> {
    Arc::new(t)
}

fn erased(src: &str, extra: &[(&str, &Term)]) -> Term {
    corpus::build_using(src, extra).erase()
}

fn omega() -> Term {
    corpus::omega().erase()
}

/// Closed terms of type `ty` used as arguments and context leaves. Most
/// are values; helper functions defined through `fix` are not.
pub fn seeds(ty: &Type) -> Vec<Term> {
    seeds_fuel(ty, 2)
}

fn seeds_fuel(ty: &Type, fuel: usize) -> Vec<Term> {
    use crate::syntax::build::*;
    let mut out: Vec<Term> = match ty {
        Type::Unit => vec![unit()],
        Type::Nat => vec![num(1), num(2), num(3)],
        Type::Sum(a, b) => {
            let mut v: Vec<Term> = seeds_fuel(a, fuel).into_iter().take(2).map(inl).collect();
            v.extend(seeds_fuel(b, fuel).into_iter().take(2).map(inr));
            v
        }
        Type::Prod(a, b) => {
            let sa = seeds_fuel(a, fuel);
            let sb = seeds_fuel(b, fuel);
            let mut v = Vec::new();
            for x in sa.iter().take(2) {
                for y in sb.iter().take(2) {
                    v.push(pair(x.clone(), y.clone()));
                }
            }
            v
        }
        Type::Arrow(a, b) => {
            let mut v: Vec<Term> = seeds_fuel(b, fuel)
                .into_iter()
                .take(2)
                .map(|s| corpus::build_using("fn _ => s", &[("s", &s)]))
                .collect();
            if a == b {
                v.insert(0, corpus::build("fn x => x"));
            }
            for (name, hty) in corpus::HELPER_TYPES {
                if parse_type(hty).ok().as_ref() == Some(ty) {
                    v.push(corpus::helper(name).expect("helper"));
                }
            }
            v
        }
        Type::All(..) if *ty == parse_type("all a. a -> a").expect("type") => {
            vec![corpus::build("tfn fn x => x")]
        }
        Type::Mu(_, body) if fuel > 0 => seeds_fuel(&body.open(ty), fuel - 1)
            .into_iter()
            .take(3)
            .map(fold)
            .collect(),
        _ => Vec::new(),
    };
    let mut seen = HashSet::new();
    out.retain(|t| seen.insert(t.clone()));
    out
}

/// Single frames accepting `ty`, each with the type it produces.
fn frames(ty: &Type) -> Vec<(Vec<Frame>, Type)> {
    let om = arc(omega());
    let un = arc(Term::Unit);
    let x = Hint::new("x");
    let y = Hint::new("y");
    let bound0 = arc(Term::Var(crate::syntax::Var::Bound(0)));
    let one = |f: Frame, t: Type| (vec![f], t);
    match ty {
        Type::Nat => vec![
            one(Frame::Ifz(un.clone(), om.clone()), Type::Unit),
            one(Frame::Ifz(om.clone(), un.clone()), Type::Unit),
            one(Frame::Succ, Type::Nat),
            one(Frame::Pred, Type::Nat),
            one(Frame::Rand, Type::Nat),
        ],
        Type::Sum(a, b) => vec![
            one(Frame::Match(x.clone(), un.clone(), y.clone(), om.clone()), Type::Unit),
            one(Frame::Match(x.clone(), om.clone(), y.clone(), un.clone()), Type::Unit),
            one(Frame::Match(x.clone(), bound0.clone(), y.clone(), om.clone()), (**a).clone()),
            one(Frame::Match(x.clone(), om.clone(), y.clone(), bound0.clone()), (**b).clone()),
        ],
        Type::Prod(a, b) => vec![
            one(Frame::Proj(Side::First), (**a).clone()),
            one(Frame::Proj(Side::Second), (**b).clone()),
        ],
        Type::Arrow(a, b) => {
            let args = seeds(a);
            let mut v: Vec<(Vec<Frame>, Type)> = args
                .iter()
                .take(3)
                .map(|s| one(Frame::AppL(arc(s.clone())), (**b).clone()))
                .collect();
            if let Some(s) = args.first() {
                let s2 = args.get(1).unwrap_or(s);
                let twice = erased("fn f => let z = f s in f t", &[("s", s), ("t", s2)]);
                v.push(one(Frame::AppR(arc(twice)), (**b).clone()));
            }
            v
        }
        Type::All(_, body) => {
            let at_unit = body.open(&Type::Unit);
            let mut v = vec![one(Frame::TApp(None), at_unit.clone())];
            let at_nat = body.open(&Type::Nat);
            if at_nat != at_unit {
                v.push(one(Frame::TApp(None), at_nat));
            }
            let twice = erased("fn f => let z = f[] in f[]", &[]);
            v.push(one(Frame::AppR(arc(twice)), at_unit));
            v
        }
        Type::Mu(_, body) => vec![one(Frame::Unfold, body.open(ty))],
        Type::RefNat => vec![one(Frame::Deref, Type::Nat)],
        _ => Vec::new(),
    }
}

fn counter_type() -> Type {
    parse_type(corpus::COUNTER).expect("type")
}

/// Hand-written contexts for hole types the generic frames cannot reach.
fn registered(ty: &Type, depth: usize) -> Vec<EvalContext> {
    let mut out = Vec::new();
    if *ty == parse_type("all a. a -> a").expect("type") {
        out.push(corpus::twice_context());
    }
    if *ty == counter_type() {
        for m in 0..=3 {
            let obs = corpus::counter_observation(m);
            for e in generate(&Type::Nat, depth.saturating_sub(1)) {
                out.push(e.compose(&obs));
            }
        }
        let two = [
            "unpack [-] as c in let r = fst c () in let s = fst c () in \
             snd (snd c) r; snd (snd c) s; snd (snd c) r; fst (snd c) r",
            "unpack [-] as c in let r = fst c () in let s = fst c () in \
             snd (snd c) r; snd (snd c) s; snd (snd c) r; fst (snd c) s",
            "unpack [-] as c in let r = fst c () in \
             snd (snd c) r; ifz fst (snd c) r then () else (snd (snd c) r; fst (snd c) r; ())",
        ];
        for src in two {
            out.push(crate::syntax::parse_context(src).expect("valid context"));
        }
    }
    out
}

fn generate(ty: &Type, depth: usize) -> Vec<EvalContext> {
    let mut out = vec![EvalContext::hole()];
    if depth == 0 {
        return out;
    }
    for (fs, next) in frames(ty) {
        let inner = EvalContext::from_frames(fs);
        for outer in generate(&next, depth - 1) {
            out.push(outer.compose(&inner));
        }
    }
    out
}

/// All contexts of at most `depth` generated frames accepting `ty`, plus the
/// registered ones. Always starts with the empty context.
pub fn enumerate_contexts(ty: &Type, depth: usize) -> ContextPool {
    let mut pool = ContextPool::new(ty.clone(), depth);
    for e in generate(ty, depth) {
        pool.register(e);
    }
    for e in registered(ty, depth) {
        pool.register(e);
    }
    pool
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Every context confirmed `P(E[e1]) <= P(E[e2])`.
    Holds { contexts: usize, depth: usize, nodes: usize },
    /// `lower(E[e1]) > upper(E[e2])`: a sound refutation.
    Distinguished {
        context: EvalContext,
        lower: Prob,
        upper: Prob,
    },
    /// Some context could be neither confirmed nor refuted.
    Inconclusive {
        context: EvalContext,
        left: Bounds,
        right: Bounds,
    },
    /// Exact output distributions differ on `value`.
    Differ {
        context: EvalContext,
        value: Term,
        left: Prob,
        right: Prob,
    },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds { .. })
    }

    pub fn is_refutation(&self) -> bool {
        matches!(self, Verdict::Distinguished { .. } | Verdict::Differ { .. })
    }

    pub fn context(&self) -> Option<&EvalContext> {
        match self {
            Verdict::Holds { .. } => None,
            Verdict::Distinguished { context, .. }
            | Verdict::Inconclusive { context, .. }
            | Verdict::Differ { context, .. } => Some(context),
        }
    }
}

fn check_at(e: &Term, ty: &Type, side: &'static str) -> Result<(), EquivError> {
    typecheck(e, Some(ty)).map(|_| ()).map_err(|err| EquivError::IllTyped {
        side,
        ty: pretty_type(ty),
        message: err.to_string(),
    })
}

fn plug(e: &EvalContext, t: &Term) -> Config {
    Config::new(e.plug(t.clone()).erase())
}

/// `e1 ≲ e2` at `ty`, tested on the pool for `ty`.
pub fn ciu_approx(e1: &Term, e2: &Term, ty: &Type, opts: &EquivOptions) -> Result<Verdict, EquivError> {
    if !ty.is_closed() {
        return Err(EquivError::OpenType(pretty_type(ty)));
    }
    check_at(e1, ty, "left")?;
    check_at(e2, ty, "right")?;
    let pool = enumerate_contexts(ty, opts.depth);
    Ok(match approx_on(e1, e2, &pool.contexts, opts) {
        // Report the search depth, not the deepest context that exists.
        Verdict::Holds { contexts, nodes, .. } => Verdict::Holds {
            contexts,
            depth: opts.depth,
            nodes,
        },
        other => other,
    })
}

/// Like [`ciu_approx`] on a given list of contexts, without typechecking.
pub fn approx_on(e1: &Term, e2: &Term, contexts: &[EvalContext], opts: &EquivOptions) -> Verdict {
    let e1 = e1.erase();
    let e2 = e2.erase();
    let mut inconclusive = None;
    let mut checked = 0;
    for e in contexts.iter().take(opts.max_contexts) {
        let left = prob_bounds(&plug(e, &e1), opts.nodes);
        let right = prob_bounds(&plug(e, &e2), opts.nodes);
        checked += 1;
        if left.lower > right.upper {
            return Verdict::Distinguished {
                context: e.clone(),
                lower: left.lower,
                upper: right.upper,
            };
        }
        if left.upper > right.lower && inconclusive.is_none() {
            inconclusive = Some(Verdict::Inconclusive {
                context: e.clone(),
                left,
                right,
            });
        }
    }
    inconclusive.unwrap_or(Verdict::Holds {
        contexts: checked,
        depth: contexts.iter().map(|c| c.frames.len()).max().unwrap_or(0),
        nodes: opts.nodes,
    })
}

/// Both directions.
pub fn ciu_equiv(e1: &Term, e2: &Term, ty: &Type, opts: &EquivOptions) -> Result<(Verdict, Verdict), EquivError> {
    Ok((ciu_approx(e1, e2, ty, opts)?, ciu_approx(e2, e1, ty, opts)?))
}

/// Compares exact output distributions (marginal over values) per context.
pub fn distribution_equiv(
    e1: &Term,
    e2: &Term,
    ty: &Type,
    contexts: &[EvalContext],
    nodes: usize,
) -> Result<Verdict, EquivError> {
    check_at(e1, ty, "left")?;
    check_at(e2, ty, "right")?;
    let e1 = e1.erase();
    let e2 = e2.erase();
    for e in contexts {
        let gl = build_chain(&plug(e, &e1), nodes);
        let gr = build_chain(&plug(e, &e2), nodes);
        let (Ok(dl), Ok(dr)) = (exact_distribution(&gl), exact_distribution(&gr)) else {
            return Ok(Verdict::Inconclusive {
                context: e.clone(),
                left: prob_bounds(&plug(e, &e1), nodes),
                right: prob_bounds(&plug(e, &e2), nodes),
            });
        };
        let (vl, vr) = (dl.values(), dr.values());
        let mut keys: Vec<&Arc<Term>> = vl.keys().chain(vr.keys()).collect();
        keys.sort_by_key(|t| pretty(t));
        keys.dedup();
        for v in keys {
            let l = vl.get(v).cloned().unwrap_or_default();
            let r = vr.get(v).cloned().unwrap_or_default();
            if l != r {
                return Ok(Verdict::Differ {
                    context: e.clone(),
                    value: (**v).clone(),
                    left: l,
                    right: r,
                });
            }
        }
    }
    Ok(Verdict::Holds {
        contexts: contexts.len(),
        depth: contexts.iter().map(|c| c.frames.len()).max().unwrap_or(0),
        nodes,
    })
}

/// Recomputes a refutation from scratch with exact solves on the witness.
/// Returns the two exact probabilities when the witness stands.
pub fn recheck(e1: &Term, e2: &Term, v: &Verdict, nodes: usize) -> Option<(Prob, Prob)> {
    let Verdict::Distinguished { context, .. } = v else {
        return None;
    };
    let l = prob_bounds(&plug(context, &e1.erase()), nodes);
    let r = prob_bounds(&plug(context, &e2.erase()), nodes);
    (l.lower > r.upper).then_some((l.lower, r.upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, pretty_context};

    fn ty(s: &str) -> Type {
        parse_type(s).unwrap()
    }

    #[test]
    fn depth_zero_is_the_empty_context() {
        let p = enumerate_contexts(&Type::Nat, 0);
        assert_eq!(p.contexts, vec![EvalContext::hole()]);
    }

    #[test]
    fn nat_frames_at_depth_one() {
        let p = enumerate_contexts(&Type::Nat, 1);
        let printed: Vec<String> = p.contexts.iter().map(pretty_context).collect();
        for want in ["succ [-]", "pred [-]", "rand [-]"] {
            assert!(printed.iter().any(|s| s == want), "{want} in {printed:?}");
        }
        assert!(printed.iter().any(|s| s.starts_with("ifz [-] then () else")));
    }

    #[test]
    fn twice_context_is_registered() {
        let p = enumerate_contexts(&ty("all a. a -> a"), 3);
        assert!(p.contexts.contains(&corpus::twice_context()));
    }

    #[test]
    fn pool_is_deterministic() {
        let a = enumerate_contexts(&ty("(unit + unit) -> nat"), 3);
        let b = enumerate_contexts(&ty("(unit + unit) -> nat"), 3);
        assert_eq!(a.contexts, b.contexts);
    }

    #[test]
    fn seeds_have_their_types() {
        for s in ["unit", "nat", "unit + unit", "nat * unit", "nat -> nat", "all a. a -> a", "mu l. unit + nat * l"] {
            let t = ty(s);
            assert!(!seeds(&t).is_empty(), "{s}");
            for v in seeds(&t) {
                typecheck(&v, Some(&t)).unwrap_or_else(|e| panic!("{s}: {}: {e}", pretty(&v)));
            }
        }
    }

    #[test]
    fn choice_with_divergence_approximates() {
        let l = corpus::build("() (+) omega");
        let r = parse_term("()").unwrap();
        let opts = EquivOptions::default();
        assert!(ciu_approx(&l, &r, &Type::Unit, &opts).unwrap().holds());
        let v = ciu_approx(&r, &l, &Type::Unit, &opts).unwrap();
        match &v {
            Verdict::Distinguished { context, lower, upper } => {
                assert!(context.is_hole());
                assert_eq!(*lower, Prob::one());
                assert_eq!(*upper, Prob::new(1, 2));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(recheck(&r, &l, &v, opts.nodes), Some((Prob::one(), Prob::new(1, 2))));
    }

    #[test]
    fn ill_typed_sides_are_rejected() {
        let e = parse_term("1").unwrap();
        let err = ciu_approx(&e, &e, &Type::Unit, &EquivOptions::default()).unwrap_err();
        assert!(matches!(err, EquivError::IllTyped { side: "left", .. }));
    }

    #[test]
    fn distributions_differ_on_a_value() {
        let l = parse_term("rand 2").unwrap();
        let r = parse_term("1 (+) 1").unwrap();
        let v = distribution_equiv(&l, &r, &Type::Nat, &[EvalContext::hole()], 1000).unwrap();
        match v {
            Verdict::Differ { value, left, right, .. } => {
                assert_eq!(value, Term::Num(1));
                assert_eq!(left, Prob::new(1, 2));
                assert_eq!(right, Prob::one());
            }
            other => panic!("{other:?}"),
        }
    }
}
