//! Pretty-printer producing concrete syntax that parses back to the same term.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::{fresh_name, Name, Side, Term, Type, Var};
use super::context::{EvalContext, HOLE};

// Term precedence levels; higher binds tighter.
const SEQ: u8 = 0;
const ASSIGN: u8 = 1;
const CHOICE: u8 = 2;
const APP: u8 = 3;
const UNARY: u8 = 4;
const POSTFIX: u8 = 5;
const ATOM: u8 = 6;

pub fn pretty(t: &Term) -> String {
    let mut taken: BTreeSet<Name> = t.free_vars();
    let mut p = Printer {
        names: Vec::new(),
        taken: &mut taken,
    };
    p.term(t, SEQ, true)
}

/// Prints a term whose loose bound indices refer to `names` (innermost last).
pub(crate) fn pretty_in(t: &Term, names: &[String]) -> String {
    let mut taken: BTreeSet<Name> = t.free_vars();
    taken.extend(names.iter().map(|n| Arc::from(n.as_str())));
    let mut p = Printer {
        names: names.to_vec(),
        taken: &mut taken,
    };
    p.term(t, SEQ, true)
}

/// Prints an evaluation context with its hole shown as `[-]`.
pub fn pretty_context(e: &EvalContext) -> String {
    pretty(&e.plug(Term::Var(Var::Free(Arc::from(HOLE)))))
}

pub fn pretty_type(t: &Type) -> String {
    let mut taken = t.free_vars();
    ty(t, 0, true, &mut Vec::new(), &mut taken)
}

struct Printer<'a> {
    names: Vec<String>,
    taken: &'a mut BTreeSet<Name>,
}

fn paren(s: String, yes: bool) -> String {
    if yes {
        format!("({s})")
    } else {
        s
    }
}

fn uses_index(t: &Term, depth: usize) -> bool {
    match t {
        Term::Var(Var::Bound(i)) => *i == depth,
        Term::Fun(_, _, b) => uses_index(b, depth + 1),
        Term::Unpack(a, _, b) => uses_index(a, depth) || uses_index(b, depth + 1),
        Term::Match(s, _, a, _, b) => {
            uses_index(s, depth) || uses_index(a, depth + 1) || uses_index(b, depth + 1)
        }
        _ => t.children().into_iter().any(|c| uses_index(c, depth)),
    }
}

fn annot(t: &Type) -> String {
    let s = pretty_type(t);
    let atomic = matches!(
        t,
        Type::Unit | Type::Nat | Type::RefNat | Type::Free(_) | Type::Bound(_) | Type::Meta(_)
    );
    paren(s, !atomic)
}

impl Printer<'_> {
    /// Prints a binder body with a fresh name for its bound variable.
    fn under(&mut self, hint: &str, body: &Term, print: impl FnOnce(&mut Self) -> String) -> (String, String) {
        let used = uses_index(body, 0);
        let name = if !used && hint == "_" {
            "_".to_string()
        } else {
            let mut avoid = self.taken.clone();
            avoid.extend(self.names.iter().map(|n| Arc::from(n.as_str())));
            fresh_name(hint, &avoid)
        };
        self.names.push(name.clone());
        let s = print(self);
        self.names.pop();
        (name, s)
    }

    fn term(&mut self, t: &Term, level: u8, tail: bool) -> String {
        match t {
            Term::Var(Var::Free(n)) => n.to_string(),
            Term::Var(Var::Bound(i)) => match self.names.len().checked_sub(i + 1) {
                Some(k) => self.names[k].clone(),
                None => format!("<unbound {i}>"),
            },
            Term::Unit => "()".to_string(),
            Term::Num(n) => n.to_string(),
            Term::Loc(l) => format!("<loc {l}>"),
            Term::Pair(a, b) => format!("({}, {})", self.term(a, SEQ, true), self.term(b, SEQ, true)),
            Term::Rand(a) => self.prefix("rand", a, level),
            Term::Succ(a) => self.prefix("succ", a, level),
            Term::Pred(a) => self.prefix("pred", a, level),
            Term::Proj(Side::First, a) => self.prefix("fst", a, level),
            Term::Proj(Side::Second, a) => self.prefix("snd", a, level),
            Term::Inl(a) => self.prefix("inl", a, level),
            Term::Inr(a) => self.prefix("inr", a, level),
            Term::Unfold(a) => self.prefix("unfold", a, level),
            Term::Ref(a) => self.prefix("ref", a, level),
            Term::Deref(a) => {
                let s = format!("!{}", self.term(a, UNARY, false));
                paren(s, level > UNARY)
            }
            Term::Fold(a, ty) => {
                let mut s = format!("fold {}", self.term(a, UNARY, false));
                if let Some(ty) = ty {
                    s = format!("{s} at {}", annot(ty));
                }
                paren(s, level > UNARY)
            }
            Term::Pack(a, ty) => {
                let s = match ty {
                    Some(ty) => format!("pack {} as {}", self.term(a, UNARY, false), annot(ty)),
                    // Not parseable; only erased runtime terms lack the annotation.
                    None => format!("pack {}", self.term(a, UNARY, false)),
                };
                paren(s, level > UNARY)
            }
            Term::TApp(a, ty) => {
                let arg = ty.as_ref().map(pretty_type).unwrap_or_default();
                format!("{}[{arg}]", self.term(a, POSTFIX, false))
            }
            Term::App(f, arg) => {
                if let Term::Fun(h, None, body) = &**f {
                    return self.let_or_seq(h.as_str(), body, arg, level, tail);
                }
                let s = format!("{} {}", self.term(f, APP, false), self.term(arg, ATOM, false));
                paren(s, level > APP)
            }
            Term::Assign(a, b) => {
                let s = format!(
                    "{} := {}",
                    self.term(a, ASSIGN, false),
                    self.term(b, CHOICE, tail && level <= ASSIGN)
                );
                paren(s, level > ASSIGN)
            }
            Term::Ifz(c, a, b) if **c == Term::Rand(Arc::new(Term::Num(2))) => {
                let s = format!(
                    "{} (+) {}",
                    self.term(a, CHOICE, false),
                    self.term(b, APP, tail && level <= CHOICE)
                );
                paren(s, level > CHOICE)
            }
            Term::Ifz(c, a, b) => {
                let s = format!(
                    "ifz {} then {} else {}",
                    self.term(c, SEQ, true),
                    self.term(a, SEQ, true),
                    self.term(b, SEQ, true)
                );
                self.binding(s, level, tail)
            }
            Term::Fun(h, ty, body) => {
                let (x, b) = self.under(h.as_str(), body, |p| p.term(body, SEQ, true));
                let s = match ty {
                    Some(ty) => format!("fn ({x}:{}) => {b}", pretty_type(ty)),
                    None => format!("fn {x} => {b}"),
                };
                self.binding(s, level, tail)
            }
            Term::TFun(name, body) => {
                let b = self.term(body, SEQ, true);
                let s = match name {
                    Some(n) => format!("tfn {n}. {b}"),
                    None => format!("tfn {b}"),
                };
                self.binding(s, level, tail)
            }
            Term::Match(s, h1, a, h2, b) => {
                let scrut = self.term(s, SEQ, true);
                let (x, l) = self.under(h1.as_str(), a, |p| p.term(a, SEQ, true));
                let (y, r) = self.under(h2.as_str(), b, |p| p.term(b, SEQ, true));
                let s = format!("match {scrut} with inl {x} => {l} | inr {y} => {r}");
                self.binding(s, level, tail)
            }
            Term::Unpack(e, h, body) => {
                let scrut = self.term(e, SEQ, true);
                let (x, b) = self.under(h.as_str(), body, |p| p.term(body, SEQ, true));
                let s = format!("unpack {scrut} as {x} in {b}");
                self.binding(s, level, tail)
            }
        }
    }

    fn prefix(&mut self, kw: &str, a: &Term, level: u8) -> String {
        let s = format!("{kw} {}", self.term(a, UNARY, false));
        paren(s, level > UNARY)
    }

    fn binding(&self, s: String, level: u8, tail: bool) -> String {
        paren(s, level > SEQ || !tail)
    }

    fn let_or_seq(&mut self, hint: &str, body: &Term, arg: &Term, level: u8, tail: bool) -> String {
        if hint == "_" && !uses_index(body, 0) {
            let first = self.term(arg, SEQ, false);
            let (_, rest) = self.under("_", body, |p| p.term(body, ASSIGN, tail && level == SEQ));
            return paren(format!("{first}; {rest}"), level > SEQ);
        }
        let e = self.term(arg, SEQ, true);
        let (x, b) = self.under(hint, body, |p| p.term(body, SEQ, true));
        self.binding(format!("let {x} = {e} in {b}"), level, tail)
    }
}

fn ty(t: &Type, level: u8, tail: bool, names: &mut Vec<String>, taken: &mut BTreeSet<Name>) -> String {
    match t {
        Type::Unit => "unit".into(),
        Type::Nat => "nat".into(),
        Type::RefNat => "ref nat".into(),
        Type::Free(n) => n.to_string(),
        Type::Bound(i) => match names.len().checked_sub(i + 1) {
            Some(k) => names[k].clone(),
            None => format!("<unbound {i}>"),
        },
        Type::Meta(m) => format!("?{m}"),
        Type::Arrow(a, b) => {
            let s = format!(
                "{} -> {}",
                ty(a, 1, false, names, taken),
                ty(b, 0, tail || level > 0, names, taken)
            );
            paren(s, level > 0)
        }
        Type::Sum(a, b) => {
            let s = format!(
                "{} + {}",
                ty(a, 1, false, names, taken),
                ty(b, 2, false, names, taken)
            );
            paren(s, level > 1)
        }
        Type::Prod(a, b) => {
            let s = format!(
                "{} * {}",
                ty(a, 2, false, names, taken),
                ty(b, 3, false, names, taken)
            );
            paren(s, level > 2)
        }
        Type::Mu(h, b) | Type::All(h, b) | Type::Ex(h, b) => {
            let kw = match t {
                Type::Mu(..) => "mu",
                Type::All(..) => "all",
                _ => "ex",
            };
            let mut avoid = taken.clone();
            avoid.extend(names.iter().map(|n| Arc::from(n.as_str())));
            let name = fresh_name(h.as_str(), &avoid);
            names.push(name.clone());
            let body = ty(b, 0, true, names, taken);
            names.pop();
            paren(format!("{kw} {name}. {body}"), level > 0 || !tail)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::build::*;
    use crate::syntax::parse_term;

    fn round_trip(t: &Term) {
        let s = pretty(t);
        let back = parse_term(&s).unwrap_or_else(|e| panic!("{s}: {e}"));
        assert_eq!(&back, t, "{s}");
    }

    #[test]
    fn simple_forms() {
        assert_eq!(pretty(&num(3)), "3");
        assert_eq!(pretty(&lam("x", var("x"))), "fn x => x");
        assert_eq!(pretty(&choice(unit(), num(1))), "() (+) 1");
        assert_eq!(pretty(&let_("y", num(1), succ(var("y")))), "let y = 1 in succ y");
        assert_eq!(pretty(&seq(num(1), num(2))), "1; 2");
    }

    #[test]
    fn shadowed_binders_are_renamed() {
        let t = lam("x", lam("x", app(var("x"), var("x"))));
        assert_eq!(pretty(&t), "fn x => fn x1 => x1 x1");
        let t = lam("x", app(var("x1"), var("x")));
        assert_eq!(pretty(&t), "fn x => x1 x");
        let t = lam("x1", lam("x", var("x1")));
        round_trip(&t);
    }

    #[test]
    fn nested_forms_round_trip() {
        let samples = vec![
            app(lam("x", var("x")), lam("y", var("y"))),
            seq(lam("x", var("x")), unit()),
            seq(seq(num(1), num(2)), num(3)),
            seq(num(1), seq(num(2), num(3))),
            choice(lam("x", var("x")), lam("y", var("y"))),
            choice(choice(num(1), num(2)), num(3)),
            choice(num(1), choice(num(2), num(3))),
            succ(app(var("f"), num(1))),
            app(succ(var("f")), num(1)),
            tapp(app(var("f"), var("x"))),
            fold_at(inl(unit()), Type::list(Type::Nat)),
            app(fold(unit()), unit()),
            pack(pair(num(1), lam("x", var("x"))), Type::ex("a", Type::prod(Type::var("a"), Type::arrow(Type::var("a"), Type::Nat)))),
            assign(ref_(num(1)), deref(ref_(num(2)))),
            seq(assign(var("r"), num(2)), deref(var("r"))),
            ifz(ifz(num(1), num(2), num(3)), lam("x", var("x")), num(4)),
            match_(inl(unit()), "a", match_(var("a"), "b", var("b"), "c", var("c")), "d", var("d")),
            tfun_named("a", lam_t("x", Type::arrow(Type::var("a"), Type::var("a")), var("x"))),
            unpack(var("p"), "z", app(fst(var("z")), snd(var("z")))),
            app(var("f"), let_("x", num(1), var("x"))),
            pair(seq(num(1), num(2)), let_("x", num(1), var("x"))),
            Term::Fun(crate::syntax::Hint::new("_"), None, Arc::new(Term::Var(Var::Bound(0)))),
        ];
        for t in &samples {
            round_trip(t);
        }
    }

    #[test]
    fn types_print_with_minimal_parens() {
        let t = Type::arrow(Type::arrow(Type::Nat, Type::Nat), Type::Nat);
        assert_eq!(pretty_type(&t), "(nat -> nat) -> nat");
        let t = Type::arrow(Type::all("a", Type::var("a")), Type::Nat);
        assert_eq!(pretty_type(&t), "(all a. a) -> nat");
        assert_eq!(pretty_type(&Type::list(Type::Nat)), "mu l. unit + nat * l");
        let t = Type::all("a", Type::all("a", Type::var("a")));
        assert_eq!(pretty_type(&t), "all a. all a1. a1");
    }
}
