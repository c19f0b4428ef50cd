//! Abstract syntax for the language: types, terms, evaluation contexts, and
//! the concrete-syntax front end.
//!
//! Both terms and types use a locally nameless representation. Bound
//! variables are de Bruijn indices counted from the nearest enclosing binder
//! of the same sort; free variables carry names. Binder names are kept as
//! [`Hint`]s, which are invisible to equality and hashing, so α-equivalent
//! terms and types are structurally equal.

pub mod build;
mod context;
mod lexer;
mod parser;
mod pretty;
mod subst;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

pub use context::{context_of, decompose, parse_context, Decomposition, EvalContext, Frame};
pub use lexer::Pos;
pub use parser::{parse_term, parse_type, ParseError};
pub use pretty::{pretty, pretty_context, pretty_type};
pub(crate) use pretty::pretty_in;
pub(crate) use subst::subst_types;
pub use subst::{substitute, Bindings};

/// Name of a free variable (term or type).
pub type Name = Arc<str>;

/// Display name attached to a binder. All hints compare equal.
#[derive(Clone)]
pub struct Hint(Arc<str>);

impl Hint {
    pub fn new(name: &str) -> Self {
        Hint(Arc::from(name))
    }

    pub fn anon() -> Self {
        Hint::new("_")
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Hint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl PartialEq for Hint {
    fn eq(&self, _: &Hint) -> bool {
        true
    }
}

impl Eq for Hint {}

impl Hash for Hint {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl PartialOrd for Hint {
    fn partial_cmp(&self, other: &Hint) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Hint {
    fn cmp(&self, _: &Hint) -> Ordering {
        Ordering::Equal
    }
}

/// Types. `Bound` indices count enclosing `Mu`/`All`/`Ex` binders.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Unit,
    Nat,
    /// `ref nat`; the store is ground, so no other reference type exists.
    RefNat,
    Bound(usize),
    Free(Name),
    /// Unification variable. Only the typechecker creates these and they
    /// never escape a successful check.
    #[doc(hidden)]
    Meta(u32),
    Prod(Box<Type>, Box<Type>),
    Sum(Box<Type>, Box<Type>),
    Arrow(Box<Type>, Box<Type>),
    Mu(Hint, Box<Type>),
    All(Hint, Box<Type>),
    Ex(Hint, Box<Type>),
}

impl Type {
    pub fn var(name: &str) -> Type {
        Type::Free(Arc::from(name))
    }

    pub fn prod(a: Type, b: Type) -> Type {
        Type::Prod(Box::new(a), Box::new(b))
    }

    pub fn sum(a: Type, b: Type) -> Type {
        Type::Sum(Box::new(a), Box::new(b))
    }

    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Box::new(a), Box::new(b))
    }

    /// `μname.body`, binding the free variable `name` in `body`.
    pub fn mu(name: &str, body: Type) -> Type {
        Type::Mu(Hint::new(name), Box::new(body.close(name)))
    }

    pub fn all(name: &str, body: Type) -> Type {
        Type::All(Hint::new(name), Box::new(body.close(name)))
    }

    pub fn ex(name: &str, body: Type) -> Type {
        Type::Ex(Hint::new(name), Box::new(body.close(name)))
    }

    /// Booleans, `1 + 1`.
    pub fn bool() -> Type {
        Type::sum(Type::Unit, Type::Unit)
    }

    /// Lists `μα. 1 + elem × α`.
    pub fn list(elem: Type) -> Type {
        let fresh = fresh_name("l", &elem.free_vars());
        Type::mu(
            &fresh,
            Type::sum(Type::Unit, Type::prod(elem, Type::var(&fresh))),
        )
    }

    /// Abstracts the free variable `name` into bound index 0.
    pub fn close(&self, name: &str) -> Type {
        self.close_at(name, 0)
    }

    fn close_at(&self, name: &str, depth: usize) -> Type {
        self.map_leaves(depth, &|t, d| match t {
            Type::Free(n) if &**n == name => Some(Type::Bound(d)),
            _ => None,
        })
    }

    /// Replaces bound index 0 (of a binder body) with `with`.
    pub fn open(&self, with: &Type) -> Type {
        self.map_leaves(0, &|t, d| match t {
            Type::Bound(i) if *i == d => Some(with.clone()),
            _ => None,
        })
    }

    /// Substitutes free type variables simultaneously.
    pub fn subst_free(&self, map: &dyn Fn(&str) -> Option<Type>) -> Type {
        self.map_leaves(0, &|t, _| match t {
            Type::Free(n) => map(n),
            _ => None,
        })
    }

    fn map_leaves(&self, depth: usize, f: &dyn Fn(&Type, usize) -> Option<Type>) -> Type {
        match self {
            Type::Unit | Type::Nat | Type::RefNat | Type::Meta(_) => self.clone(),
            Type::Bound(_) | Type::Free(_) => f(self, depth).unwrap_or_else(|| self.clone()),
            Type::Prod(a, b) => Type::prod(a.map_leaves(depth, f), b.map_leaves(depth, f)),
            Type::Sum(a, b) => Type::sum(a.map_leaves(depth, f), b.map_leaves(depth, f)),
            Type::Arrow(a, b) => Type::arrow(a.map_leaves(depth, f), b.map_leaves(depth, f)),
            Type::Mu(h, b) => Type::Mu(h.clone(), Box::new(b.map_leaves(depth + 1, f))),
            Type::All(h, b) => Type::All(h.clone(), Box::new(b.map_leaves(depth + 1, f))),
            Type::Ex(h, b) => Type::Ex(h.clone(), Box::new(b.map_leaves(depth + 1, f))),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Name>) {
        match self {
            Type::Free(n) => {
                out.insert(n.clone());
            }
            Type::Prod(a, b) | Type::Sum(a, b) | Type::Arrow(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Type::Mu(_, b) | Type::All(_, b) | Type::Ex(_, b) => b.collect_free(out),
            _ => {}
        }
    }

    /// True when no bound index escapes its binders.
    pub fn is_locally_closed(&self) -> bool {
        fn go(t: &Type, depth: usize) -> bool {
            match t {
                Type::Bound(i) => *i < depth,
                Type::Prod(a, b) | Type::Sum(a, b) | Type::Arrow(a, b) => {
                    go(a, depth) && go(b, depth)
                }
                Type::Mu(_, b) | Type::All(_, b) | Type::Ex(_, b) => go(b, depth + 1),
                _ => true,
            }
        }
        go(self, 0)
    }

    pub fn has_metas(&self) -> bool {
        match self {
            Type::Meta(_) => true,
            Type::Prod(a, b) | Type::Sum(a, b) | Type::Arrow(a, b) => a.has_metas() || b.has_metas(),
            Type::Mu(_, b) | Type::All(_, b) | Type::Ex(_, b) => b.has_metas(),
            _ => false,
        }
    }

    /// Closed, with no free or bound-escaping variables.
    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty() && self.is_locally_closed() && !self.has_metas()
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_type(self))
    }
}

/// A term variable occurrence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Bound(usize),
    Free(Name),
}

/// Projection index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    First,
    Second,
}

/// Terms. Term binders are `Fun`, both `Match` branches and the `Unpack`
/// body; `TFun` binds a type variable and is transparent to term indices.
///
/// `Option<Type>` fields and the `TFun` name are annotations for the
/// typechecker. [`Term::erase`] removes them all.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    Unit,
    /// Numerals start at 1.
    Num(u64),
    /// Heap location; produced only by evaluation.
    Loc(usize),
    Rand(Arc<Term>),
    Succ(Arc<Term>),
    Pred(Arc<Term>),
    Ifz(Arc<Term>, Arc<Term>, Arc<Term>),
    Pair(Arc<Term>, Arc<Term>),
    Proj(Side, Arc<Term>),
    Fun(Hint, Option<Type>, Arc<Term>),
    App(Arc<Term>, Arc<Term>),
    Inl(Arc<Term>),
    Inr(Arc<Term>),
    Match(Arc<Term>, Hint, Arc<Term>, Hint, Arc<Term>),
    TFun(Option<Name>, Arc<Term>),
    TApp(Arc<Term>, Option<Type>),
    Pack(Arc<Term>, Option<Type>),
    Unpack(Arc<Term>, Hint, Arc<Term>),
    Fold(Arc<Term>, Option<Type>),
    Unfold(Arc<Term>),
    Ref(Arc<Term>),
    Assign(Arc<Term>, Arc<Term>),
    Deref(Arc<Term>),
}

impl Term {
    pub fn is_value(&self) -> bool {
        match self {
            Term::Unit | Term::Num(_) | Term::Loc(_) | Term::Fun(..) | Term::TFun(..) => true,
            Term::Pair(a, b) => a.is_value() && b.is_value(),
            Term::Inl(a) | Term::Inr(a) | Term::Pack(a, _) | Term::Fold(a, _) => a.is_value(),
            _ => false,
        }
    }

    /// Replaces the bound variable of a binder body (index 0) with `v`.
    /// `v` must be locally closed.
    pub fn open(&self, v: &Arc<Term>) -> Term {
        match self.rewrite_vars(0, &|var, depth| match var {
            Var::Bound(i) if *i == depth => Some(v.clone()),
            _ => None,
        }) {
            Some(t) => (*t).clone(),
            None => self.clone(),
        }
    }

    /// Abstracts the free variable `name` into bound index 0.
    pub fn close(&self, name: &str) -> Term {
        match self.rewrite_vars(0, &|var, depth| match var {
            Var::Free(n) if &**n == name => Some(Arc::new(Term::Var(Var::Bound(depth)))),
            _ => None,
        }) {
            Some(t) => (*t).clone(),
            None => self.clone(),
        }
    }

    /// Rewrites variable occurrences bottom-up, returning `None` when nothing
    /// changed so unchanged subtrees stay shared.
    pub(crate) fn rewrite_vars(
        &self,
        depth: usize,
        f: &dyn Fn(&Var, usize) -> Option<Arc<Term>>,
    ) -> Option<Arc<Term>> {
        fn sub(
            t: &Arc<Term>,
            depth: usize,
            f: &dyn Fn(&Var, usize) -> Option<Arc<Term>>,
        ) -> Option<Arc<Term>> {
            t.rewrite_vars(depth, f)
        }
        fn pick(new: Option<Arc<Term>>, old: &Arc<Term>) -> Arc<Term> {
            new.unwrap_or_else(|| old.clone())
        }
        macro_rules! unary {
            ($ctor:expr, $a:expr, $d:expr) => {{
                let na = sub($a, $d, f)?;
                Some(Arc::new($ctor(na)))
            }};
        }
        macro_rules! binary {
            ($ctor:expr, $a:expr, $da:expr, $b:expr, $db:expr) => {{
                let na = sub($a, $da, f);
                let nb = sub($b, $db, f);
                if na.is_none() && nb.is_none() {
                    None
                } else {
                    Some(Arc::new($ctor(pick(na, $a), pick(nb, $b))))
                }
            }};
        }
        match self {
            Term::Var(v) => f(v, depth),
            Term::Unit | Term::Num(_) | Term::Loc(_) => None,
            Term::Rand(a) => unary!(Term::Rand, a, depth),
            Term::Succ(a) => unary!(Term::Succ, a, depth),
            Term::Pred(a) => unary!(Term::Pred, a, depth),
            Term::Inl(a) => unary!(Term::Inl, a, depth),
            Term::Inr(a) => unary!(Term::Inr, a, depth),
            Term::Unfold(a) => unary!(Term::Unfold, a, depth),
            Term::Ref(a) => unary!(Term::Ref, a, depth),
            Term::Deref(a) => unary!(Term::Deref, a, depth),
            Term::Proj(s, a) => unary!(|x| Term::Proj(*s, x), a, depth),
            Term::Fun(h, ty, body) => unary!(|x| Term::Fun(h.clone(), ty.clone(), x), body, depth + 1),
            Term::TFun(n, body) => unary!(|x| Term::TFun(n.clone(), x), body, depth),
            Term::TApp(a, ty) => unary!(|x| Term::TApp(x, ty.clone()), a, depth),
            Term::Pack(a, ty) => unary!(|x| Term::Pack(x, ty.clone()), a, depth),
            Term::Fold(a, ty) => unary!(|x| Term::Fold(x, ty.clone()), a, depth),
            Term::Pair(a, b) => binary!(Term::Pair, a, depth, b, depth),
            Term::App(a, b) => binary!(Term::App, a, depth, b, depth),
            Term::Assign(a, b) => binary!(Term::Assign, a, depth, b, depth),
            Term::Unpack(a, h, b) => {
                binary!(|x, y| Term::Unpack(x, h.clone(), y), a, depth, b, depth + 1)
            }
            Term::Ifz(c, a, b) => {
                let nc = sub(c, depth, f);
                let na = sub(a, depth, f);
                let nb = sub(b, depth, f);
                if nc.is_none() && na.is_none() && nb.is_none() {
                    None
                } else {
                    Some(Arc::new(Term::Ifz(pick(nc, c), pick(na, a), pick(nb, b))))
                }
            }
            Term::Match(s, h1, a, h2, b) => {
                let ns = sub(s, depth, f);
                let na = sub(a, depth + 1, f);
                let nb = sub(b, depth + 1, f);
                if ns.is_none() && na.is_none() && nb.is_none() {
                    None
                } else {
                    Some(Arc::new(Term::Match(
                        pick(ns, s),
                        h1.clone(),
                        pick(na, a),
                        h2.clone(),
                        pick(nb, b),
                    )))
                }
            }
        }
    }

    /// Immediate subterms, in left-to-right order.
    pub fn children(&self) -> Vec<&Arc<Term>> {
        match self {
            Term::Var(_) | Term::Unit | Term::Num(_) | Term::Loc(_) => vec![],
            Term::Rand(a)
            | Term::Succ(a)
            | Term::Pred(a)
            | Term::Inl(a)
            | Term::Inr(a)
            | Term::Unfold(a)
            | Term::Ref(a)
            | Term::Deref(a)
            | Term::Proj(_, a)
            | Term::Fun(_, _, a)
            | Term::TFun(_, a)
            | Term::TApp(a, _)
            | Term::Pack(a, _)
            | Term::Fold(a, _) => vec![a],
            Term::Pair(a, b) | Term::App(a, b) | Term::Assign(a, b) | Term::Unpack(a, _, b) => {
                vec![a, b]
            }
            Term::Ifz(a, b, c) | Term::Match(a, _, b, _, c) => vec![a, b, c],
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let Term::Var(Var::Free(n)) = t {
                out.insert(n.clone());
            }
        });
        out
    }

    /// Free type variable names mentioned by annotations, excluding names
    /// bound by an enclosing named `tfn`.
    pub fn free_type_vars(&self) -> BTreeSet<Name> {
        fn go(t: &Term, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
            let mut note = |ty: &Option<Type>, bound: &Vec<Name>| {
                if let Some(ty) = ty {
                    for n in ty.free_vars() {
                        if !bound.contains(&n) {
                            out.insert(n);
                        }
                    }
                }
            };
            match t {
                Term::Fun(_, ty, _) | Term::TApp(_, ty) | Term::Pack(_, ty) | Term::Fold(_, ty) => {
                    note(ty, bound)
                }
                _ => {}
            }
            if let Term::TFun(Some(n), body) = t {
                bound.push(n.clone());
                go(body, bound, out);
                bound.pop();
                return;
            }
            for c in t.children() {
                go(c, bound, out);
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// True when no bound index escapes its binders and no free variable occurs.
    pub fn is_closed(&self) -> bool {
        fn go(t: &Term, depth: usize) -> bool {
            match t {
                Term::Var(Var::Bound(i)) => *i < depth,
                Term::Var(Var::Free(_)) => false,
                Term::Fun(_, _, b) => go(b, depth + 1),
                Term::Unpack(a, _, b) => go(a, depth) && go(b, depth + 1),
                Term::Match(s, _, a, _, b) => go(s, depth) && go(a, depth + 1) && go(b, depth + 1),
                _ => t.children().into_iter().all(|c| go(c, depth)),
            }
        }
        go(self, 0)
    }

    pub fn has_locations(&self) -> bool {
        let mut found = false;
        self.visit(&mut |t| {
            if matches!(t, Term::Loc(_)) {
                found = true;
            }
        });
        found
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut dyn FnMut(&Term)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Strips every annotation, leaving the untyped term that evaluation sees.
    pub fn erase(&self) -> Term {
        fn go(t: &Arc<Term>) -> Arc<Term> {
            Arc::new(t.erase())
        }
        match self {
            Term::Var(_) | Term::Unit | Term::Num(_) | Term::Loc(_) => self.clone(),
            Term::Rand(a) => Term::Rand(go(a)),
            Term::Succ(a) => Term::Succ(go(a)),
            Term::Pred(a) => Term::Pred(go(a)),
            Term::Inl(a) => Term::Inl(go(a)),
            Term::Inr(a) => Term::Inr(go(a)),
            Term::Unfold(a) => Term::Unfold(go(a)),
            Term::Ref(a) => Term::Ref(go(a)),
            Term::Deref(a) => Term::Deref(go(a)),
            Term::Proj(s, a) => Term::Proj(*s, go(a)),
            Term::Fun(h, _, b) => Term::Fun(h.clone(), None, go(b)),
            Term::TFun(_, b) => Term::TFun(None, go(b)),
            Term::TApp(a, _) => Term::TApp(go(a), None),
            Term::Pack(a, _) => Term::Pack(go(a), None),
            Term::Fold(a, _) => Term::Fold(go(a), None),
            Term::Pair(a, b) => Term::Pair(go(a), go(b)),
            Term::App(a, b) => Term::App(go(a), go(b)),
            Term::Assign(a, b) => Term::Assign(go(a), go(b)),
            Term::Unpack(a, h, b) => Term::Unpack(go(a), h.clone(), go(b)),
            Term::Ifz(c, a, b) => Term::Ifz(go(c), go(a), go(b)),
            Term::Match(s, h1, a, h2, b) => Term::Match(go(s), h1.clone(), go(a), h2.clone(), go(b)),
        }
    }

    pub fn is_erased(&self) -> bool {
        let mut erased = true;
        self.visit(&mut |t| match t {
            Term::Fun(_, Some(_), _)
            | Term::TFun(Some(_), _)
            | Term::TApp(_, Some(_))
            | Term::Pack(_, Some(_))
            | Term::Fold(_, Some(_)) => erased = false,
            _ => {}
        });
        erased
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty(self))
    }
}

/// Picks `base`, or `base` with a numeric suffix, avoiding `taken`.
pub(crate) fn fresh_name(base: &str, taken: &BTreeSet<Name>) -> String {
    let base = if base.is_empty() || base == "_" { "x" } else { base };
    if !taken.contains(base) {
        return base.to_string();
    }
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "x" } else { stem };
    (1..)
        .map(|i| format!("{stem}{i}"))
        .find(|c| !taken.contains(c.as_str()))
        .expect("unbounded search")
}

#[cfg(test)]
mod tests {
    use super::build::*;
    use super::*;

    #[test]
    fn alpha_equivalent_terms_are_equal() {
        assert_eq!(lam("x", var("x")), lam("y", var("y")));
        assert_ne!(lam("x", var("x")), lam("x", var("y")));
        assert_eq!(
            Type::all("a", Type::arrow(Type::var("a"), Type::var("a"))),
            Type::all("b", Type::arrow(Type::var("b"), Type::var("b")))
        );
    }

    #[test]
    fn open_replaces_only_the_outer_binder() {
        let body = match lam("x", lam("y", app(var("x"), var("y")))) {
            Term::Fun(_, _, b) => b,
            _ => unreachable!(),
        };
        let opened = body.open(&Arc::new(Term::Unit));
        assert_eq!(opened, lam("y", app(unit(), var("y"))));
    }

    #[test]
    fn fold_of_value_is_a_value() {
        assert!(fold(inr(pair(num(1), fold(inl(unit()))))).is_value());
        assert!(!fold(rand(num(2))).is_value());
    }

    #[test]
    fn erase_drops_annotations() {
        let t = tfun_named("a", lam_t("x", Type::var("a"), var("x")));
        assert!(!t.is_erased());
        assert!(t.erase().is_erased());
        assert_eq!(t.erase(), tfun(lam("x", var("x"))));
    }
}
