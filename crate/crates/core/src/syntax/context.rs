//! Call-by-value evaluation contexts and unique decomposition.

use std::sync::Arc;

use super::lexer::Pos;
use super::{parse_term, Hint, ParseError, Side, Term, Type, Var};

/// Placeholder variable name used to display a hole.
pub(crate) const HOLE: &str = "[-]";

/// One layer of an evaluation context; the hole is the missing child.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Frame {
    PairL(Arc<Term>),
    PairR(Arc<Term>),
    AppL(Arc<Term>),
    AppR(Arc<Term>),
    Proj(Side),
    Inl,
    Inr,
    Pack(Option<Type>),
    Match(Hint, Arc<Term>, Hint, Arc<Term>),
    TApp(Option<Type>),
    Unpack(Hint, Arc<Term>),
    Fold(Option<Type>),
    Unfold,
    Ifz(Arc<Term>, Arc<Term>),
    Rand,
    Pred,
    Succ,
    Ref,
    AssignL(Arc<Term>),
    AssignR(Arc<Term>),
    Deref,
}

impl Frame {
    pub fn plug(&self, t: Arc<Term>) -> Term {
        match self {
            Frame::PairL(r) => Term::Pair(t, r.clone()),
            Frame::PairR(l) => Term::Pair(l.clone(), t),
            Frame::AppL(a) => Term::App(t, a.clone()),
            Frame::AppR(f) => Term::App(f.clone(), t),
            Frame::Proj(s) => Term::Proj(*s, t),
            Frame::Inl => Term::Inl(t),
            Frame::Inr => Term::Inr(t),
            Frame::Pack(ty) => Term::Pack(t, ty.clone()),
            Frame::Match(h1, a, h2, b) => Term::Match(t, h1.clone(), a.clone(), h2.clone(), b.clone()),
            Frame::TApp(ty) => Term::TApp(t, ty.clone()),
            Frame::Unpack(h, b) => Term::Unpack(t, h.clone(), b.clone()),
            Frame::Fold(ty) => Term::Fold(t, ty.clone()),
            Frame::Unfold => Term::Unfold(t),
            Frame::Ifz(a, b) => Term::Ifz(t, a.clone(), b.clone()),
            Frame::Rand => Term::Rand(t),
            Frame::Pred => Term::Pred(t),
            Frame::Succ => Term::Succ(t),
            Frame::Ref => Term::Ref(t),
            Frame::AssignL(r) => Term::Assign(t, r.clone()),
            Frame::AssignR(l) => Term::Assign(l.clone(), t),
            Frame::Deref => Term::Deref(t),
        }
    }
}

/// An evaluation context, stored outermost frame first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EvalContext {
    pub frames: Vec<Frame>,
}

impl EvalContext {
    pub fn hole() -> Self {
        Self::default()
    }

    pub fn is_hole(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn from_frames(frames: Vec<Frame>) -> Self {
        EvalContext { frames }
    }

    /// `self ∘ inner`: plugging into the result equals `self[inner[-]]`.
    pub fn compose(&self, inner: &EvalContext) -> EvalContext {
        let mut frames = self.frames.clone();
        frames.extend(inner.frames.iter().cloned());
        EvalContext { frames }
    }

    /// Adds a frame just around the hole.
    pub fn push(&mut self, f: Frame) {
        self.frames.push(f);
    }

    pub fn plug(&self, t: Term) -> Term {
        self.plug_arc(Arc::new(t)).as_ref().clone()
    }

    pub fn plug_arc(&self, t: Arc<Term>) -> Arc<Term> {
        self.frames
            .iter()
            .rev()
            .fold(t, |acc, f| Arc::new(f.plug(acc)))
    }
}

/// Identifier standing for the hole while a context is parsed.
const HOLE_IDENT: &str = "__hole__";

/// Parses a context written with a single `[-]` hole in evaluation position.
pub fn parse_context(src: &str) -> Result<EvalContext, ParseError> {
    if src.matches("[-]").count() != 1 {
        return Err(ParseError::new(Pos { line: 1, col: 1 }, "expected exactly one `[-]` hole".into()));
    }
    let t = parse_term(&src.replace("[-]", HOLE_IDENT))?;
    context_of(&t, HOLE_IDENT).ok_or_else(|| {
        ParseError::new(Pos { line: 1, col: 1 }, "the hole is not in evaluation position".into())
    })
}

/// Recovers `E` from `E[x]` where `x` is the free variable `hole`.
pub fn context_of(t: &Term, hole: &str) -> Option<EvalContext> {
    let mut frames = Vec::new();
    let mut cur = t;
    loop {
        if let Term::Var(Var::Free(n)) = cur {
            if &**n == hole {
                return Some(EvalContext { frames });
            }
        }
        let has = |x: &Arc<Term>| x.free_vars().iter().any(|n| &**n == hole);
        let (frame, next) = match cur {
            Term::Pair(l, r) if has(l) => (Frame::PairL(r.clone()), l),
            Term::Pair(l, r) if l.is_value() => (Frame::PairR(l.clone()), r),
            Term::App(f, a) if has(f) => (Frame::AppL(a.clone()), f),
            Term::App(f, a) if f.is_value() => (Frame::AppR(f.clone()), a),
            Term::Assign(l, r) if has(l) => (Frame::AssignL(r.clone()), l),
            Term::Assign(l, r) if l.is_value() => (Frame::AssignR(l.clone()), r),
            Term::Proj(s, e) => (Frame::Proj(*s), e),
            Term::Inl(e) => (Frame::Inl, e),
            Term::Inr(e) => (Frame::Inr, e),
            Term::Pack(e, ty) => (Frame::Pack(ty.clone()), e),
            Term::Match(e, h1, a, h2, b) => (Frame::Match(h1.clone(), a.clone(), h2.clone(), b.clone()), e),
            Term::TApp(e, ty) => (Frame::TApp(ty.clone()), e),
            Term::Unpack(e, h, b) => (Frame::Unpack(h.clone(), b.clone()), e),
            Term::Fold(e, ty) => (Frame::Fold(ty.clone()), e),
            Term::Unfold(e) => (Frame::Unfold, e),
            Term::Ifz(e, a, b) => (Frame::Ifz(a.clone(), b.clone()), e),
            Term::Rand(e) => (Frame::Rand, e),
            Term::Pred(e) => (Frame::Pred, e),
            Term::Succ(e) => (Frame::Succ, e),
            Term::Ref(e) => (Frame::Ref, e),
            Term::Deref(e) => (Frame::Deref, e),
            _ => return None,
        };
        if !has(next) {
            return None;
        }
        frames.push(frame);
        cur = next;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decomposition {
    Value,
    Stuck,
    Redex(EvalContext, Arc<Term>),
}

enum Step<'a> {
    Redex,
    Stuck,
    Descend(Frame, &'a Arc<Term>),
}

/// Splits a term into `E[r]` with `r` a redex of a basic reduction, or
/// reports that it is a value or stuck.
pub fn decompose(t: &Arc<Term>) -> Decomposition {
    if t.is_value() {
        return Decomposition::Value;
    }
    let mut frames = Vec::new();
    let mut cur = t;
    loop {
        match classify(cur) {
            Step::Redex => return Decomposition::Redex(EvalContext { frames }, cur.clone()),
            Step::Stuck => return Decomposition::Stuck,
            Step::Descend(f, child) => {
                frames.push(f);
                cur = child;
            }
        }
    }
}

// Only called on non-values.
fn classify(t: &Arc<Term>) -> Step<'_> {
    use Step::*;
    let num = |a: &Term| matches!(a, Term::Num(_));
    match &**t {
        Term::Var(_) => Stuck,
        Term::Unit | Term::Num(_) | Term::Loc(_) | Term::Fun(..) | Term::TFun(..) => Stuck,
        Term::Pair(a, b) => {
            if !a.is_value() {
                Descend(Frame::PairL(b.clone()), a)
            } else {
                Descend(Frame::PairR(a.clone()), b)
            }
        }
        Term::Inl(a) => Descend(Frame::Inl, a),
        Term::Inr(a) => Descend(Frame::Inr, a),
        Term::Pack(a, ty) => Descend(Frame::Pack(ty.clone()), a),
        Term::Fold(a, ty) => Descend(Frame::Fold(ty.clone()), a),
        Term::App(f, a) => {
            if !f.is_value() {
                Descend(Frame::AppL(a.clone()), f)
            } else if !a.is_value() {
                Descend(Frame::AppR(f.clone()), a)
            } else if matches!(**f, Term::Fun(..)) {
                Redex
            } else {
                Stuck
            }
        }
        Term::Proj(s, a) => {
            if !a.is_value() {
                Descend(Frame::Proj(*s), a)
            } else if matches!(**a, Term::Pair(..)) {
                Redex
            } else {
                Stuck
            }
        }
        Term::Match(s, h1, a, h2, b) => {
            if !s.is_value() {
                Descend(Frame::Match(h1.clone(), a.clone(), h2.clone(), b.clone()), s)
            } else if matches!(**s, Term::Inl(_) | Term::Inr(_)) {
                Redex
            } else {
                Stuck
            }
        }
        Term::TApp(a, ty) => {
            if !a.is_value() {
                Descend(Frame::TApp(ty.clone()), a)
            } else if matches!(**a, Term::TFun(..)) {
                Redex
            } else {
                Stuck
            }
        }
        Term::Unpack(a, h, b) => {
            if !a.is_value() {
                Descend(Frame::Unpack(h.clone(), b.clone()), a)
            } else if matches!(**a, Term::Pack(..)) {
                Redex
            } else {
                Stuck
            }
        }
        Term::Unfold(a) => {
            if !a.is_value() {
                Descend(Frame::Unfold, a)
            } else if matches!(**a, Term::Fold(..)) {
                Redex
            } else {
                Stuck
            }
        }
        Term::Ifz(c, a, b) => {
            if !c.is_value() {
                Descend(Frame::Ifz(a.clone(), b.clone()), c)
            } else if num(c) {
                Redex
            } else {
                Stuck
            }
        }
        Term::Rand(a) | Term::Pred(a) | Term::Succ(a) | Term::Ref(a) => {
            if !a.is_value() {
                let f = match &**t {
                    Term::Rand(_) => Frame::Rand,
                    Term::Pred(_) => Frame::Pred,
                    Term::Succ(_) => Frame::Succ,
                    _ => Frame::Ref,
                };
                Descend(f, a)
            } else if num(a) {
                Redex
            } else {
                Stuck
            }
        }
        Term::Assign(l, r) => {
            if !l.is_value() {
                Descend(Frame::AssignL(r.clone()), l)
            } else if !r.is_value() {
                Descend(Frame::AssignR(l.clone()), r)
            } else if matches!(**l, Term::Loc(_)) && num(r) {
                Redex
            } else {
                Stuck
            }
        }
        Term::Deref(a) => {
            if !a.is_value() {
                Descend(Frame::Deref, a)
            } else if matches!(**a, Term::Loc(_)) {
                Redex
            } else {
                Stuck
            }
        }
    }
}
