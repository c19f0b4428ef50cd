//! Bidirectional typechecker with local unification.
//!
//! Annotations are optional where unification can recover them: lambda
//! parameters, type-application arguments and existential witnesses become
//! unification variables. A type application of a term whose type is not
//! yet known to be polymorphic, `unfold` of a term of unknown type, and
//! `pack`/`fold` without an annotation in synthesis position are rejected.
//! Unification variables left unconstrained at the end default to `unit`.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::semantics::Config;
use crate::syntax::{fresh_name, pretty_in, pretty_type, subst_types, Hint, Name, Term, Type, Var};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{message}")]
pub struct TypeError {
    pub message: String,
}

/// True iff every free type variable of `ty` is listed in `delta`.
pub fn check_type(delta: &[&str], ty: &Type) -> bool {
    ty.is_locally_closed()
        && !ty.has_metas()
        && ty.free_vars().iter().all(|n| delta.contains(&&**n))
}

/// Typechecks a closed, location-free program, in checking mode when
/// `expected` is given.
pub fn typecheck(e: &Term, expected: Option<&Type>) -> Result<Type, TypeError> {
    elaborate(e, expected).map(|(_, t)| t)
}

/// Typechecks and returns the program with every annotation filled in.
pub fn elaborate(e: &Term, expected: Option<&Type>) -> Result<(Term, Type), TypeError> {
    Checker::new(false).run(e, expected)
}

/// Typechecks a runtime configuration; every location has type `ref nat`.
pub fn typecheck_config(c: &Config, expected: Option<&Type>) -> Result<Type, TypeError> {
    let mut dangling = None;
    c.term.visit(&mut |t| {
        if let Term::Loc(l) = t {
            if *l >= c.heap.len() {
                dangling = Some(*l);
            }
        }
    });
    if let Some(l) = dangling {
        return Err(TypeError {
            message: format!("location {l} is not allocated"),
        });
    }
    Checker::new(true).run(&c.term, expected).map(|(_, t)| t)
}

struct MetaVar {
    solution: Option<Type>,
    /// Number of rigid type variables the solution may mention.
    scope: usize,
}

struct Checker {
    metas: Vec<MetaVar>,
    delta: Vec<Name>,
    env: Vec<(String, Type)>,
    allow_locs: bool,
}

type Res<T> = Result<T, TypeError>;

fn err<T>(message: String) -> Res<T> {
    Err(TypeError { message })
}

fn arc(t: Term) -> Arc<Term> {
    Arc::new(t)
}

impl Checker {
    fn new(allow_locs: bool) -> Self {
        Checker {
            metas: Vec::new(),
            delta: Vec::new(),
            env: Vec::new(),
            allow_locs,
        }
    }

    fn run(mut self, e: &Term, expected: Option<&Type>) -> Res<(Term, Type)> {
        if !e.is_closed() {
            let free: Vec<String> = e.free_vars().iter().map(|n| n.to_string()).collect();
            return err(format!("unbound variable(s): {}", free.join(", ")));
        }
        if !self.allow_locs && e.has_locations() {
            return err("source programs may not contain locations".into());
        }
        let (t, ty) = match expected {
            Some(exp) => {
                if !check_type(&[], exp) {
                    return err(format!("expected type `{}` is not closed", pretty_type(exp)));
                }
                (self.check(e, exp)?, exp.clone())
            }
            None => self.infer(e)?,
        };
        let ty = self.finish(&ty);
        let t = self.finish_term(&t);
        Ok((t, ty))
    }

    // ---- unification variables ----

    fn meta(&mut self) -> Type {
        self.metas.push(MetaVar {
            solution: None,
            scope: self.delta.len(),
        });
        Type::Meta(self.metas.len() as u32 - 1)
    }

    /// Follows solved unification variables at the head.
    fn resolve(&self, t: &Type) -> Type {
        let mut cur = t.clone();
        while let Type::Meta(m) = cur {
            match &self.metas[m as usize].solution {
                Some(s) => cur = s.clone(),
                None => break,
            }
        }
        cur
    }

    fn zonk(&self, t: &Type) -> Type {
        match self.resolve(t) {
            Type::Prod(a, b) => Type::prod(self.zonk(&a), self.zonk(&b)),
            Type::Sum(a, b) => Type::sum(self.zonk(&a), self.zonk(&b)),
            Type::Arrow(a, b) => Type::arrow(self.zonk(&a), self.zonk(&b)),
            Type::Mu(h, b) => Type::Mu(h, Box::new(self.zonk(&b))),
            Type::All(h, b) => Type::All(h, Box::new(self.zonk(&b))),
            Type::Ex(h, b) => Type::Ex(h, Box::new(self.zonk(&b))),
            other => other,
        }
    }

    /// Zonks and defaults the remaining unification variables to `unit`.
    fn finish(&self, t: &Type) -> Type {
        fn default(t: Type) -> Type {
            match t {
                Type::Meta(_) => Type::Unit,
                Type::Prod(a, b) => Type::prod(default(*a), default(*b)),
                Type::Sum(a, b) => Type::sum(default(*a), default(*b)),
                Type::Arrow(a, b) => Type::arrow(default(*a), default(*b)),
                Type::Mu(h, b) => Type::Mu(h, Box::new(default(*b))),
                Type::All(h, b) => Type::All(h, Box::new(default(*b))),
                Type::Ex(h, b) => Type::Ex(h, Box::new(default(*b))),
                other => other,
            }
        }
        default(self.zonk(t))
    }

    fn finish_term(&self, t: &Term) -> Term {
        let on = |ty: &Option<Type>| ty.as_ref().map(|ty| self.finish(ty));
        let go = |a: &Arc<Term>| arc(self.finish_term(a));
        match t {
            Term::Fun(h, ty, b) => Term::Fun(h.clone(), on(ty), go(b)),
            Term::TApp(a, ty) => Term::TApp(go(a), on(ty)),
            Term::Pack(a, ty) => Term::Pack(go(a), on(ty)),
            Term::Fold(a, ty) => Term::Fold(go(a), on(ty)),
            Term::TFun(n, b) => Term::TFun(n.clone(), go(b)),
            Term::Var(_) | Term::Unit | Term::Num(_) | Term::Loc(_) => t.clone(),
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

    fn show(&self, t: &Type) -> String {
        pretty_type(&self.zonk(t))
    }

    fn show_term(&self, e: &Term) -> String {
        let names: Vec<String> = self.env.iter().map(|(n, _)| n.clone()).collect();
        let s = pretty_in(e, &names);
        if s.len() > 80 {
            format!("{}...", s.chars().take(77).collect::<String>())
        } else {
            s
        }
    }

    // ---- rigid type variables ----

    fn rigid_index(&self, n: &str) -> Option<usize> {
        self.delta.iter().rposition(|d| &**d == n)
    }

    fn fresh_rigid(&self, base: &str) -> Name {
        let taken: BTreeSet<Name> = self.delta.iter().cloned().collect();
        Arc::from(fresh_name(base, &taken).as_str())
    }

    fn push_rigid(&mut self, n: Name) {
        self.delta.push(n);
    }

    fn pop_rigid(&mut self) {
        self.delta.pop();
        let len = self.delta.len();
        for m in &mut self.metas {
            if m.solution.is_none() && m.scope > len {
                m.scope = len;
            }
        }
    }

    fn well_formed(&self, ty: &Type, e: &Term) -> Res<()> {
        if !ty.is_locally_closed() {
            return err(format!("malformed annotation in `{}`", self.show_term(e)));
        }
        for n in ty.free_vars() {
            if self.rigid_index(&n).is_none() {
                return err(format!(
                    "unbound type variable `{n}` in annotation of `{}`",
                    self.show_term(e)
                ));
            }
        }
        Ok(())
    }

    // ---- unification ----

    fn unify_at(&mut self, e: &Term, expected: &Type, found: &Type) -> Res<()> {
        if self.unify(expected, found).is_err() {
            return err(format!(
                "type mismatch in `{}`: expected `{}`, found `{}`",
                self.show_term(e),
                self.show(expected),
                self.show(found)
            ));
        }
        Ok(())
    }

    fn unify(&mut self, a: &Type, b: &Type) -> Result<(), ()> {
        let a = self.resolve(a);
        let b = self.resolve(b);
        match (&a, &b) {
            (Type::Meta(x), Type::Meta(y)) if x == y => Ok(()),
            (Type::Meta(m), t) | (t, Type::Meta(m)) => self.solve(*m, t),
            (Type::Unit, Type::Unit) | (Type::Nat, Type::Nat) | (Type::RefNat, Type::RefNat) => Ok(()),
            (Type::Free(x), Type::Free(y)) if x == y => Ok(()),
            (Type::Bound(x), Type::Bound(y)) if x == y => Ok(()),
            (Type::Prod(a1, a2), Type::Prod(b1, b2))
            | (Type::Sum(a1, a2), Type::Sum(b1, b2))
            | (Type::Arrow(a1, a2), Type::Arrow(b1, b2)) => {
                self.unify(a1, b1)?;
                self.unify(a2, b2)
            }
            (Type::Mu(_, x), Type::Mu(_, y))
            | (Type::All(_, x), Type::All(_, y))
            | (Type::Ex(_, x), Type::Ex(_, y)) => {
                let s = self.fresh_rigid("u");
                let sv = Type::Free(s.clone());
                self.push_rigid(s);
                let r = self.unify(&x.open(&sv), &y.open(&sv));
                self.pop_rigid();
                r
            }
            _ => Err(()),
        }
    }

    fn solve(&mut self, m: u32, t: &Type) -> Result<(), ()> {
        let t = self.zonk(t);
        let scope = self.metas[m as usize].scope;
        let mut ok = true;
        let mut lower = Vec::new();
        fn walk(t: &Type, m: u32, c: &Checker, ok: &mut bool, scope: usize, lower: &mut Vec<u32>) {
            match t {
                Type::Meta(x) => {
                    if *x == m {
                        *ok = false;
                    } else if c.metas[*x as usize].scope > scope {
                        lower.push(*x);
                    }
                }
                Type::Free(n) => match c.rigid_index(n) {
                    Some(i) if i < scope => {}
                    _ => *ok = false,
                },
                Type::Prod(a, b) | Type::Sum(a, b) | Type::Arrow(a, b) => {
                    walk(a, m, c, ok, scope, lower);
                    walk(b, m, c, ok, scope, lower);
                }
                Type::Mu(_, b) | Type::All(_, b) | Type::Ex(_, b) => walk(b, m, c, ok, scope, lower),
                _ => {}
            }
        }
        walk(&t, m, self, &mut ok, scope, &mut lower);
        if !ok {
            return Err(());
        }
        for x in lower {
            self.metas[x as usize].scope = scope;
        }
        self.metas[m as usize].solution = Some(t);
        Ok(())
    }

    // ---- environment ----

    fn lookup(&self, i: usize) -> Type {
        self.env[self.env.len() - 1 - i].1.clone()
    }

    fn with_var<T>(&mut self, hint: &Hint, ty: Type, f: impl FnOnce(&mut Self) -> Res<T>) -> Res<T> {
        let names: BTreeSet<Name> = self.env.iter().map(|(n, _)| Arc::from(n.as_str())).collect();
        let name = fresh_name(hint.as_str(), &names);
        self.env.push((name, ty));
        let r = f(self);
        self.env.pop();
        r
    }

    /// Picks the rigid name for a type abstraction and renames annotations
    /// in the body to it if needed.
    fn tfun_binder(&self, name: &Option<Name>, body: &Term, hint: Option<&Hint>) -> Res<(Name, Term)> {
        match name {
            Some(n) => {
                if self.rigid_index(n).is_none() {
                    return Ok((n.clone(), body.clone()));
                }
                let s = self.fresh_rigid(n);
                let mut map = std::collections::BTreeMap::new();
                map.insert(n.clone(), Type::Free(s.clone()));
                Ok((s, subst_types(body, &map)))
            }
            None => {
                let open: Vec<Name> = body
                    .free_type_vars()
                    .into_iter()
                    .filter(|n| self.rigid_index(n).is_none())
                    .collect();
                let hint = hint.map(|h| h.as_str()).filter(|h| *h != "_");
                let chosen = match (open.len(), hint) {
                    (0, Some(h)) => self.fresh_rigid(h),
                    (0, None) => self.fresh_rigid("a"),
                    (1, _) => open[0].clone(),
                    (_, Some(h)) if open.iter().any(|n| &**n == h) => Arc::from(h),
                    _ => {
                        let names: Vec<String> = open.iter().map(|n| n.to_string()).collect();
                        return err(format!(
                            "ambiguous type abstraction: annotations mention {}; write `tfn NAME. ...`",
                            names.join(", ")
                        ));
                    }
                };
                Ok((chosen, body.clone()))
            }
        }
    }

    // ---- synthesis ----

    fn infer(&mut self, e: &Term) -> Res<(Term, Type)> {
        match e {
            Term::Var(Var::Bound(i)) => Ok((e.clone(), self.lookup(*i))),
            Term::Var(Var::Free(n)) => err(format!("unbound variable `{n}`")),
            Term::Unit => Ok((e.clone(), Type::Unit)),
            Term::Num(_) => Ok((e.clone(), Type::Nat)),
            Term::Loc(_) => {
                if self.allow_locs {
                    Ok((e.clone(), Type::RefNat))
                } else {
                    err("source programs may not contain locations".into())
                }
            }
            Term::Rand(a) => Ok((Term::Rand(arc(self.check(a, &Type::Nat)?)), Type::Nat)),
            Term::Succ(a) => Ok((Term::Succ(arc(self.check(a, &Type::Nat)?)), Type::Nat)),
            Term::Pred(a) => Ok((Term::Pred(arc(self.check(a, &Type::Nat)?)), Type::Nat)),
            Term::Ref(a) => Ok((Term::Ref(arc(self.check(a, &Type::Nat)?)), Type::RefNat)),
            Term::Deref(a) => Ok((Term::Deref(arc(self.check(a, &Type::RefNat)?)), Type::Nat)),
            Term::Assign(l, r) => {
                let l = self.check(l, &Type::RefNat)?;
                let r = self.check(r, &Type::Nat)?;
                Ok((Term::Assign(arc(l), arc(r)), Type::Unit))
            }
            Term::Ifz(c, a, b) => {
                let c = self.check(c, &Type::Nat)?;
                let (a, t) = self.infer(a)?;
                let b = self.check(b, &t)?;
                Ok((Term::Ifz(arc(c), arc(a), arc(b)), t))
            }
            Term::Pair(a, b) => {
                let (a, ta) = self.infer(a)?;
                let (b, tb) = self.infer(b)?;
                Ok((Term::Pair(arc(a), arc(b)), Type::prod(ta, tb)))
            }
            Term::Proj(s, a) => {
                let (a2, ta) = self.infer(a)?;
                let (l, r) = match self.resolve(&ta) {
                    Type::Prod(l, r) => (*l, *r),
                    _ => {
                        let (l, r) = (self.meta(), self.meta());
                        self.unify_at(a, &Type::prod(l.clone(), r.clone()), &ta)?;
                        (l, r)
                    }
                };
                let t = match s {
                    crate::syntax::Side::First => l,
                    crate::syntax::Side::Second => r,
                };
                Ok((Term::Proj(*s, arc(a2)), t))
            }
            Term::Fun(h, ann, body) => {
                let param = match ann {
                    Some(ty) => {
                        self.well_formed(ty, e)?;
                        ty.clone()
                    }
                    None => self.meta(),
                };
                let (body, r) = self.with_var(h, param.clone(), |c| c.infer(body))?;
                Ok((
                    Term::Fun(h.clone(), Some(param.clone()), arc(body)),
                    Type::arrow(param, r),
                ))
            }
            Term::App(f, a) => {
                if let Term::Fun(h, None, body) = &**f {
                    // `let`: the bound expression's type flows into the body.
                    let (a2, ta) = self.infer(a)?;
                    let (body, r) = self.with_var(h, ta.clone(), |c| c.infer(body))?;
                    return Ok((
                        Term::App(arc(Term::Fun(h.clone(), Some(ta), arc(body))), arc(a2)),
                        r,
                    ));
                }
                let (f2, tf) = self.infer(f)?;
                let (p, r) = match self.resolve(&tf) {
                    Type::Arrow(p, r) => (*p, *r),
                    Type::Meta(_) => {
                        let (p, r) = (self.meta(), self.meta());
                        self.unify_at(f, &Type::arrow(p.clone(), r.clone()), &tf)?;
                        (p, r)
                    }
                    other => {
                        return err(format!(
                            "`{}` is applied but has non-function type `{}`",
                            self.show_term(f),
                            self.show(&other)
                        ))
                    }
                };
                let a2 = self.check(a, &p)?;
                Ok((Term::App(arc(f2), arc(a2)), r))
            }
            Term::Inl(a) => {
                let (a, t) = self.infer(a)?;
                let r = self.meta();
                Ok((Term::Inl(arc(a)), Type::sum(t, r)))
            }
            Term::Inr(a) => {
                let (a, t) = self.infer(a)?;
                let l = self.meta();
                Ok((Term::Inr(arc(a)), Type::sum(l, t)))
            }
            Term::Match(s, h1, a, h2, b) => {
                let (s2, l, r) = self.scrutinee(s)?;
                let (a, t) = self.with_var(h1, l, |c| c.infer(a))?;
                let b = self.with_var(h2, r, |c| c.check(b, &t))?;
                Ok((Term::Match(arc(s2), h1.clone(), arc(a), h2.clone(), arc(b)), t))
            }
            Term::TFun(name, body) => {
                let (s, body) = self.tfun_binder(name, body, None)?;
                self.push_rigid(s.clone());
                let r = self.infer(&body);
                let r = r.map(|(b, t)| (b, self.zonk(&t)));
                self.pop_rigid();
                let (b, t) = r?;
                Ok((
                    Term::TFun(Some(s.clone()), arc(b)),
                    Type::All(Hint::new(&s), Box::new(t.close(&s))),
                ))
            }
            Term::TApp(a, ann) => {
                let (a2, ta) = self.infer(a)?;
                let body = match self.resolve(&ta) {
                    Type::All(_, body) => body,
                    other => {
                        return err(format!(
                            "type application of `{}`, which has non-polymorphic type `{}`",
                            self.show_term(a),
                            self.show(&other)
                        ))
                    }
                };
                let inst = match ann {
                    Some(ty) => {
                        self.well_formed(ty, e)?;
                        ty.clone()
                    }
                    None => self.meta(),
                };
                Ok((Term::TApp(arc(a2), Some(inst.clone())), body.open(&inst)))
            }
            Term::Pack(a, Some(ty)) => {
                self.well_formed(ty, e)?;
                let a = self.check_pack(e, a, ty)?;
                Ok((Term::Pack(arc(a), Some(ty.clone())), ty.clone()))
            }
            Term::Pack(_, None) => err(format!(
                "`{}` needs an existential type annotation: `pack e as ex a. T`",
                self.show_term(e)
            )),
            Term::Unpack(p, h, body) => self.unpack(p, h, body, None),
            Term::Fold(a, Some(ty)) => {
                self.well_formed(ty, e)?;
                let a = self.check_fold(e, a, ty)?;
                Ok((Term::Fold(arc(a), Some(ty.clone())), ty.clone()))
            }
            Term::Fold(_, None) => err(format!(
                "cannot infer the recursive type of `{}`; write `fold e at mu a. T`",
                self.show_term(e)
            )),
            Term::Unfold(a) => {
                let (a2, ta) = self.infer(a)?;
                match self.resolve(&ta) {
                    Type::Mu(h, body) => {
                        let mu = Type::Mu(h, body.clone());
                        Ok((Term::Unfold(arc(a2)), body.open(&mu)))
                    }
                    other => err(format!(
                        "`{}` is unfolded but has type `{}`, not a recursive type",
                        self.show_term(a),
                        self.show(&other)
                    )),
                }
            }
        }
    }

    fn scrutinee(&mut self, s: &Term) -> Res<(Term, Type, Type)> {
        let (s2, ts) = self.infer(s)?;
        match self.resolve(&ts) {
            Type::Sum(l, r) => Ok((s2, *l, *r)),
            _ => {
                let (l, r) = (self.meta(), self.meta());
                self.unify_at(s, &Type::sum(l.clone(), r.clone()), &ts)?;
                Ok((s2, l, r))
            }
        }
    }

    fn check_pack(&mut self, e: &Term, a: &Term, ty: &Type) -> Res<Term> {
        match self.resolve(ty) {
            Type::Ex(_, body) => {
                let witness = self.meta();
                self.check(a, &body.open(&witness))
            }
            other => err(format!(
                "`{}` is packed at `{}`, which is not an existential type",
                self.show_term(e),
                self.show(&other)
            )),
        }
    }

    fn check_fold(&mut self, e: &Term, a: &Term, ty: &Type) -> Res<Term> {
        match self.resolve(ty) {
            Type::Mu(h, body) => {
                let mu = Type::Mu(h, body.clone());
                self.check(a, &body.open(&mu))
            }
            other => err(format!(
                "`{}` is folded at `{}`, which is not a recursive type",
                self.show_term(e),
                self.show(&other)
            )),
        }
    }

    fn unpack(&mut self, p: &Term, h: &Hint, body: &Term, expected: Option<&Type>) -> Res<(Term, Type)> {
        let (p2, tp) = self.infer(p)?;
        let (eh, inner) = match self.resolve(&tp) {
            Type::Ex(eh, inner) => (eh, inner),
            other => {
                return err(format!(
                    "`{}` is unpacked but has type `{}`, not an existential type",
                    self.show_term(p),
                    self.show(&other)
                ))
            }
        };
        let s = self.fresh_rigid(eh.as_str());
        self.push_rigid(s.clone());
        let opened = inner.open(&Type::Free(s.clone()));
        let r = self.with_var(h, opened, |c| match expected {
            Some(t) => c.check(body, t).map(|b| (b, t.clone())),
            None => c.infer(body),
        });
        let r = r.map(|(b, t)| (b, self.zonk(&t)));
        self.pop_rigid();
        let (b, t) = r?;
        if t.free_vars().contains(&s) {
            return err(format!(
                "abstract type `{s}` escapes its `unpack` in `{}`",
                self.show_term(body)
            ));
        }
        Ok((Term::Unpack(arc(p2), h.clone(), arc(b)), t))
    }

    // ---- checking ----

    fn check(&mut self, e: &Term, ty: &Type) -> Res<Term> {
        let want = self.resolve(ty);
        match (e, &want) {
            (Term::Fun(h, ann, body), Type::Arrow(p, r)) => {
                let param = match ann {
                    Some(a) => {
                        self.well_formed(a, e)?;
                        self.unify_at(e, p, a)?;
                        a.clone()
                    }
                    None => (**p).clone(),
                };
                let body = self.with_var(h, param.clone(), |c| c.check(body, r))?;
                Ok(Term::Fun(h.clone(), Some(param), arc(body)))
            }
            (Term::TFun(name, body), Type::All(hint, inner)) => {
                let (s, body) = self.tfun_binder(name, body, Some(hint))?;
                self.push_rigid(s.clone());
                let r = self.check(&body, &inner.open(&Type::Free(s.clone())));
                self.pop_rigid();
                Ok(Term::TFun(Some(s), arc(r?)))
            }
            (Term::Pair(a, b), Type::Prod(l, r)) => {
                let a = self.check(a, l)?;
                let b = self.check(b, r)?;
                Ok(Term::Pair(arc(a), arc(b)))
            }
            (Term::Inl(a), Type::Sum(l, _)) => Ok(Term::Inl(arc(self.check(a, l)?))),
            (Term::Inr(a), Type::Sum(_, r)) => Ok(Term::Inr(arc(self.check(a, r)?))),
            (Term::Fold(a, ann), Type::Mu(..)) => {
                if let Some(t) = ann {
                    self.well_formed(t, e)?;
                    self.unify_at(e, &want, t)?;
                }
                let a = self.check_fold(e, a, &want)?;
                Ok(Term::Fold(arc(a), Some(want.clone())))
            }
            (Term::Pack(a, ann), Type::Ex(..)) => {
                if let Some(t) = ann {
                    self.well_formed(t, e)?;
                    self.unify_at(e, &want, t)?;
                }
                let a = self.check_pack(e, a, &want)?;
                Ok(Term::Pack(arc(a), Some(want.clone())))
            }
            (Term::Ifz(c, a, b), _) => {
                let c = self.check(c, &Type::Nat)?;
                let a = self.check(a, &want)?;
                let b = self.check(b, &want)?;
                Ok(Term::Ifz(arc(c), arc(a), arc(b)))
            }
            (Term::Match(s, h1, a, h2, b), _) => {
                let (s2, l, r) = self.scrutinee(s)?;
                let a = self.with_var(h1, l, |c| c.check(a, &want))?;
                let b = self.with_var(h2, r, |c| c.check(b, &want))?;
                Ok(Term::Match(arc(s2), h1.clone(), arc(a), h2.clone(), arc(b)))
            }
            (Term::Unpack(p, h, body), _) => self.unpack(p, h, body, Some(&want)).map(|(t, _)| t),
            (Term::App(f, a), _) if matches!(&**f, Term::Fun(_, None, _)) => {
                let Term::Fun(h, _, body) = &**f else { unreachable!() };
                let (a2, ta) = self.infer(a)?;
                let body = self.with_var(h, ta.clone(), |c| c.check(body, &want))?;
                Ok(Term::App(arc(Term::Fun(h.clone(), Some(ta), arc(body))), arc(a2)))
            }
            (Term::Fold(_, None), Type::Meta(_)) | (Term::Pack(_, None), Type::Meta(_)) => err(format!(
                "cannot determine the type of `{}`; add an annotation",
                self.show_term(e)
            )),
            _ => {
                let (e2, found) = self.infer(e)?;
                self.unify_at(e, &want, &found)?;
                Ok(e2)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, parse_type};

    fn ty(s: &str) -> Type {
        parse_type(s).unwrap()
    }

    fn infer(s: &str) -> Result<Type, TypeError> {
        typecheck(&parse_term(s).unwrap(), None)
    }

    fn check(s: &str, t: &str) -> Result<Type, TypeError> {
        typecheck(&parse_term(s).unwrap(), Some(&ty(t)))
    }

    #[test]
    fn well_formed_types() {
        assert!(check_type(&["a"], &ty("a -> a")));
        assert!(!check_type(&[], &ty("a")));
        assert!(check_type(&[], &ty("all a. a -> a")));
    }

    #[test]
    fn basic_synthesis() {
        assert_eq!(infer("rand 3").unwrap(), Type::Nat);
        assert_eq!(infer("tfn (fn (x:a) => x)").unwrap(), ty("all a. a -> a"));
        assert_eq!(infer("fn (x:nat) => (x, ())").unwrap(), ty("nat -> nat * unit"));
        assert_eq!(infer("let r = ref 1 in r := 2; !r").unwrap(), Type::Nat);
        assert_eq!(infer("(fn x => succ x) 2").unwrap(), Type::Nat);
    }

    #[test]
    fn mismatch_is_reported() {
        let e = infer("fn (x:nat) => x x").unwrap_err();
        assert!(e.message.contains("non-function"), "{}", e.message);
        let e = check("fn (x:nat) => x", "unit -> nat").unwrap_err();
        assert!(e.message.contains("expected `unit`"), "{}", e.message);
        assert!(infer("ifz 1 then () else 2").is_err());
    }

    #[test]
    fn polymorphism() {
        assert_eq!(check("tfn fn x => x", "all a. a -> a").unwrap(), ty("all a. a -> a"));
        assert_eq!(infer("(tfn fn (x:a) => x)[nat] 3").unwrap(), Type::Nat);
        assert_eq!(infer("(tfn fn (x:a) => x)[] 3").unwrap(), Type::Nat);
        assert!(check("tfn fn x => 1", "all a. a -> a").is_err());
        assert_eq!(
            check("tfn a. tfn b. fn (x:a) => fn (y:b) => x", "all p. all q. p -> q -> p").unwrap(),
            ty("all a. all b. a -> b -> a")
        );
        assert!(infer("tfn a. tfn a. fn (x:a) => x").is_ok());
    }

    #[test]
    fn recursive_types() {
        let nil = "fold inl () at mu l. unit + nat * l";
        assert_eq!(infer(nil).unwrap(), ty("mu l. unit + nat * l"));
        assert!(check("fold inl ()", "mu l. unit + nat * l").is_ok());
        assert!(infer("fold inl ()").is_err());
        assert_eq!(infer(&format!("unfold ({nil})")).unwrap(), ty("unit + nat * (mu l. unit + nat * l)"));
    }

    #[test]
    fn existentials() {
        let t = "ex a. (unit -> a) * (a -> nat)";
        let p = format!("pack (fn _ => 1, fn (x:nat) => x) as {t}");
        assert_eq!(infer(&p).unwrap(), ty(t));
        assert_eq!(infer(&format!("unpack {p} as c in (snd c) (fst c ())")).unwrap(), Type::Nat);
        assert!(infer(&format!("unpack {p} as c in fst c ()")).is_err());
        let bare = Term::Pack(Arc::new(Term::Num(1)), None);
        assert!(typecheck(&bare, None).is_err());
    }

    #[test]
    fn sums_and_matches() {
        assert_eq!(check("inl ()", "unit + unit").unwrap(), Type::bool());
        assert_eq!(
            infer("fn (b: unit + unit) => match b with inl x => 1 | inr y => 2").unwrap(),
            ty("unit + unit -> nat")
        );
    }

    #[test]
    fn locations_only_in_configs() {
        let t = Term::Loc(0);
        assert!(typecheck(&t, None).is_err());
        let c = Config::canonical(vec![3], Arc::new(Term::Deref(Arc::new(t))));
        assert_eq!(typecheck_config(&c, None).unwrap(), Type::Nat);
    }

    #[test]
    fn elaboration_is_coherent() {
        let src = "let f = (tfn fn x => x)[] in f 2";
        let e = parse_term(src).unwrap();
        let (ann, t) = elaborate(&e, None).unwrap();
        assert_eq!(ann.erase(), e.erase());
        assert_eq!(typecheck(&ann, None).unwrap(), t);
    }
}
