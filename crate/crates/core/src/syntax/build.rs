//! Named-variable constructors for terms. Binders take the variable name and
//! abstract its free occurrences in the body.

use std::sync::Arc;

use super::{Hint, Side, Term, Type, Var};

fn a(t: Term) -> Arc<Term> {
    Arc::new(t)
}

pub fn var(x: &str) -> Term {
    Term::Var(Var::Free(Arc::from(x)))
}

pub fn unit() -> Term {
    Term::Unit
}

/// Panics on 0; numerals start at 1.
pub fn num(n: u64) -> Term {
    assert!(n >= 1, "numerals start at 1");
    Term::Num(n)
}

pub fn rand(e: Term) -> Term {
    Term::Rand(a(e))
}

pub fn succ(e: Term) -> Term {
    Term::Succ(a(e))
}

pub fn pred(e: Term) -> Term {
    Term::Pred(a(e))
}

pub fn ifz(c: Term, then: Term, els: Term) -> Term {
    Term::Ifz(a(c), a(then), a(els))
}

pub fn pair(l: Term, r: Term) -> Term {
    Term::Pair(a(l), a(r))
}

pub fn fst(e: Term) -> Term {
    Term::Proj(Side::First, a(e))
}

pub fn snd(e: Term) -> Term {
    Term::Proj(Side::Second, a(e))
}

pub fn lam(x: &str, body: Term) -> Term {
    Term::Fun(Hint::new(x), None, a(body.close(x)))
}

pub fn lam_t(x: &str, ty: Type, body: Term) -> Term {
    Term::Fun(Hint::new(x), Some(ty), a(body.close(x)))
}

pub fn app(f: Term, arg: Term) -> Term {
    Term::App(a(f), a(arg))
}

pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
    args.into_iter().fold(f, app)
}

pub fn inl(e: Term) -> Term {
    Term::Inl(a(e))
}

pub fn inr(e: Term) -> Term {
    Term::Inr(a(e))
}

pub fn match_(scrut: Term, x: &str, left: Term, y: &str, right: Term) -> Term {
    Term::Match(
        a(scrut),
        Hint::new(x),
        a(left.close(x)),
        Hint::new(y),
        a(right.close(y)),
    )
}

pub fn tfun(body: Term) -> Term {
    Term::TFun(None, a(body))
}

/// `tfn` whose annotations refer to the type variable `name`.
pub fn tfun_named(name: &str, body: Term) -> Term {
    Term::TFun(Some(Arc::from(name)), a(body))
}

pub fn tapp(e: Term) -> Term {
    Term::TApp(a(e), None)
}

pub fn tapp_at(e: Term, ty: Type) -> Term {
    Term::TApp(a(e), Some(ty))
}

pub fn pack(e: Term, ty: Type) -> Term {
    Term::Pack(a(e), Some(ty))
}

pub fn unpack(e: Term, x: &str, body: Term) -> Term {
    Term::Unpack(a(e), Hint::new(x), a(body.close(x)))
}

pub fn fold(e: Term) -> Term {
    Term::Fold(a(e), None)
}

pub fn fold_at(e: Term, ty: Type) -> Term {
    Term::Fold(a(e), Some(ty))
}

pub fn unfold(e: Term) -> Term {
    Term::Unfold(a(e))
}

pub fn ref_(e: Term) -> Term {
    Term::Ref(a(e))
}

pub fn assign(l: Term, r: Term) -> Term {
    Term::Assign(a(l), a(r))
}

pub fn deref(e: Term) -> Term {
    Term::Deref(a(e))
}

/// `let x = e in body`, i.e. `(fn x => body) e`.
pub fn let_(x: &str, e: Term, body: Term) -> Term {
    app(lam(x, body), e)
}

/// `e1 ; e2`, i.e. `(fn _ => e2) e1`.
pub fn seq(e1: Term, e2: Term) -> Term {
    app(Term::Fun(Hint::anon(), None, a(e2)), e1)
}

/// `e1 (+) e2`, i.e. `ifz (rand 2) then e1 else e2`.
pub fn choice(e1: Term, e2: Term) -> Term {
    ifz(rand(num(2)), e1, e2)
}

pub fn tru() -> Term {
    inl(unit())
}

pub fn fls() -> Term {
    inr(unit())
}
