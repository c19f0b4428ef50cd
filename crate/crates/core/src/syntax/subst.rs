//! Simultaneous substitution of free term and type variables.
//!
//! Bound variables are indices, so substituting for free names can never
//! capture: a binder in `e` has no name that a substituted value could refer
//! to. The printer picks fresh binder names when a free name would clash.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{Name, Term, Type, Var};

#[derive(Clone, Debug, Default)]
pub struct Bindings {
    pub terms: BTreeMap<Name, Term>,
    pub types: BTreeMap<Name, Type>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(mut self, x: &str, v: Term) -> Self {
        self.terms.insert(Arc::from(x), v);
        self
    }

    pub fn ty(mut self, a: &str, t: Type) -> Self {
        self.types.insert(Arc::from(a), t);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty() && self.types.is_empty()
    }
}

pub fn substitute(e: &Term, b: &Bindings) -> Term {
    if b.is_empty() {
        return e.clone();
    }
    let terms: BTreeMap<&str, Arc<Term>> = b
        .terms
        .iter()
        .map(|(k, v)| (&**k, Arc::new(v.clone())))
        .collect();
    let e = match e.rewrite_vars(0, &|v, _| match v {
        Var::Free(n) => terms.get(&**n).cloned(),
        Var::Bound(_) => None,
    }) {
        Some(t) => (*t).clone(),
        None => e.clone(),
    };
    if b.types.is_empty() {
        e
    } else {
        subst_types(&e, &b.types)
    }
}

pub(crate) fn subst_types(e: &Term, types: &BTreeMap<Name, Type>) -> Term {
    let go = |t: &Arc<Term>| Arc::new(subst_types(t, types));
    let on = |ty: &Option<Type>| {
        ty.as_ref()
            .map(|ty| ty.subst_free(&|n| types.get(n).cloned()))
    };
    match e {
        Term::Var(_) | Term::Unit | Term::Num(_) | Term::Loc(_) => e.clone(),
        Term::Fun(h, ty, b) => Term::Fun(h.clone(), on(ty), go(b)),
        Term::TApp(a, ty) => Term::TApp(go(a), on(ty)),
        Term::Pack(a, ty) => Term::Pack(go(a), on(ty)),
        Term::Fold(a, ty) => Term::Fold(go(a), on(ty)),
        Term::TFun(Some(n), b) if types.contains_key(n) => {
            let mut inner = types.clone();
            inner.remove(n);
            Term::TFun(Some(n.clone()), Arc::new(subst_types(b, &inner)))
        }
        Term::TFun(n, b) => Term::TFun(n.clone(), go(b)),
        Term::Rand(a) => Term::Rand(go(a)),
        Term::Succ(a) => Term::Succ(go(a)),
        Term::Pred(a) => Term::Pred(go(a)),
        Term::Inl(a) => Term::Inl(go(a)),
        Term::Inr(a) => Term::Inr(go(a)),
        Term::Unfold(a) => Term::Unfold(go(a)),
        Term::Ref(a) => Term::Ref(go(a)),
        Term::Deref(a) => Term::Deref(go(a)),
        Term::Proj(s, a) => Term::Proj(*s, go(a)),
        Term::Pair(a, b) => Term::Pair(go(a), go(b)),
        Term::App(a, b) => Term::App(go(a), go(b)),
        Term::Assign(a, b) => Term::Assign(go(a), go(b)),
        Term::Unpack(a, h, b) => Term::Unpack(go(a), h.clone(), go(b)),
        Term::Ifz(c, a, b) => Term::Ifz(go(c), go(a), go(b)),
        Term::Match(s, h1, a, h2, b) => Term::Match(go(s), h1.clone(), go(a), h2.clone(), go(b)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::build::*;
    use crate::syntax::pretty;

    #[test]
    fn replaces_free_occurrences() {
        let b = Bindings::new().term("x", unit());
        assert_eq!(substitute(&var("x"), &b), unit());
        let b = Bindings::new().term("x", num(1));
        assert_eq!(substitute(&lam("x", var("x")), &b), lam("x", var("x")));
    }

    #[test]
    fn avoids_capture() {
        let b = Bindings::new().term("x", lam("z", var("y")));
        let out = substitute(&lam("y", var("x")), &b);
        assert_eq!(pretty(&out), "fn y1 => fn z => y");
    }

    #[test]
    fn simultaneous() {
        let b = Bindings::new().term("x", var("y")).term("y", var("x"));
        assert_eq!(substitute(&pair(var("x"), var("y")), &b), pair(var("y"), var("x")));
    }

    #[test]
    fn type_variables_respect_named_tfn() {
        let t = pair(
            lam_t("x", Type::var("a"), var("x")),
            tfun_named("a", lam_t("x", Type::var("a"), var("x"))),
        );
        let b = Bindings::new().ty("a", Type::Nat);
        let out = substitute(&t, &b);
        assert_eq!(
            out,
            pair(
                lam_t("x", Type::Nat, var("x")),
                tfun_named("a", lam_t("x", Type::var("a"), var("x")))
            )
        );
    }
}
