//! Recursive-descent parser for the concrete syntax.
//!
//! Term precedence, loosest first: `;`, `:=`, `(+)`, application, prefix
//! operators, postfix `[T]`, atoms. Binding forms (`fn`, `tfn`, `let`,
//! `ifz`, `match`, `unpack`) extend as far right as possible.

use std::sync::Arc;

use thiserror::Error;

use super::build::*;
use super::lexer::{lex, Pos, Tok};
use super::{Hint, Term, Type};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{pos}: {message}")]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(pos: Pos, message: String) -> Self {
        ParseError { pos, message }
    }
}

type PResult<T> = Result<T, ParseError>;

pub fn parse_term(src: &str) -> PResult<Term> {
    let mut p = Parser::new(src)?;
    let t = p.seq()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_type(src: &str) -> PResult<Type> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    p.expect_eof()?;
    Ok(t)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser {
            toks: lex(src)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Kw(x) if *x == k)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        let hit = self.is_kw(k);
        if hit {
            self.bump();
        }
        hit
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        let hit = self.is_sym(s);
        if hit {
            self.bump();
        }
        hit
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        Err(ParseError::new(
            self.pos(),
            format!("expected {expected}, found {}", self.peek()),
        ))
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.error(&format!("`{k}`"))
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(&format!("`{s}`"))
        }
    }

    fn expect_eof(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error("end of input")
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.error("identifier"),
        }
    }

    // ---- types ----

    fn ty(&mut self) -> PResult<Type> {
        let lhs = self.ty_sum()?;
        if self.eat_sym("->") {
            Ok(Type::arrow(lhs, self.ty()?))
        } else {
            Ok(lhs)
        }
    }

    fn ty_sum(&mut self) -> PResult<Type> {
        let mut t = self.ty_prod()?;
        while self.eat_sym("+") {
            t = Type::sum(t, self.ty_prod()?);
        }
        Ok(t)
    }

    fn ty_prod(&mut self) -> PResult<Type> {
        let mut t = self.ty_atom()?;
        while self.eat_sym("*") {
            t = Type::prod(t, self.ty_atom()?);
        }
        Ok(t)
    }

    fn ty_atom(&mut self) -> PResult<Type> {
        match self.peek().clone() {
            Tok::Kw("unit") => {
                self.bump();
                Ok(Type::Unit)
            }
            Tok::Kw("nat") => {
                self.bump();
                Ok(Type::Nat)
            }
            Tok::Kw("ref") => {
                self.bump();
                self.expect_kw("nat")?;
                Ok(Type::RefNat)
            }
            Tok::Kw(k @ ("mu" | "all" | "ex")) => {
                self.bump();
                let name = self.ident()?;
                self.expect_sym(".")?;
                let body = self.ty()?;
                Ok(match k {
                    "mu" => Type::mu(&name, body),
                    "all" => Type::all(&name, body),
                    _ => Type::ex(&name, body),
                })
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Type::var(&name))
            }
            Tok::Sym("(") => {
                self.bump();
                let t = self.ty()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            _ => self.error("a type"),
        }
    }

    // ---- terms ----

    fn seq(&mut self) -> PResult<Term> {
        let mut t = self.assign()?;
        while self.eat_sym(";") {
            t = seq(t, self.assign()?);
        }
        Ok(t)
    }

    fn assign(&mut self) -> PResult<Term> {
        let mut t = self.choice()?;
        while self.eat_sym(":=") {
            t = assign(t, self.choice()?);
        }
        Ok(t)
    }

    fn choice(&mut self) -> PResult<Term> {
        let mut t = self.app()?;
        while self.eat_sym("(+)") {
            t = choice(t, self.app()?);
        }
        Ok(t)
    }

    fn starts_binding_form(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Kw("fn" | "tfn" | "let" | "ifz" | "match" | "unpack")
        )
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::Num(_) | Tok::Sym("("))
    }

    fn app(&mut self) -> PResult<Term> {
        let mut t = self.unary()?;
        loop {
            if self.starts_binding_form() {
                let arg = self.binding_form()?;
                return Ok(app(t, arg));
            }
            if !self.starts_atom() {
                return Ok(t);
            }
            let arg = self.postfix()?;
            t = app(t, arg);
        }
    }

    fn unary(&mut self) -> PResult<Term> {
        if self.starts_binding_form() {
            return self.binding_form();
        }
        let k = match self.peek() {
            Tok::Kw(k) => *k,
            Tok::Sym("!") => "!",
            _ => return self.postfix(),
        };
        let ctor: fn(Term) -> Term = match k {
            "rand" => rand,
            "succ" => succ,
            "pred" => pred,
            "fst" => fst,
            "snd" => snd,
            "inl" => inl,
            "inr" => inr,
            "unfold" => unfold,
            "ref" => ref_,
            "!" => deref,
            "fold" => {
                self.bump();
                let e = self.unary()?;
                if self.eat_kw("at") {
                    return Ok(fold_at(e, self.ty()?));
                }
                return Ok(fold(e));
            }
            "pack" => {
                self.bump();
                let e = self.unary()?;
                self.expect_kw("as")?;
                return Ok(pack(e, self.ty()?));
            }
            _ => return self.postfix(),
        };
        self.bump();
        Ok(ctor(self.unary()?))
    }

    fn postfix(&mut self) -> PResult<Term> {
        let mut t = self.atom()?;
        while self.eat_sym("[") {
            if self.eat_sym("]") {
                t = tapp(t);
            } else {
                let ty = self.ty()?;
                self.expect_sym("]")?;
                t = tapp_at(t, ty);
            }
        }
        Ok(t)
    }

    fn atom(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                if name == "_" {
                    return self.error("a term (`_` is only a binder)");
                }
                self.bump();
                Ok(var(&name))
            }
            Tok::Num(n) => {
                self.bump();
                Ok(num(n))
            }
            Tok::Sym("(") => {
                self.bump();
                if self.eat_sym(")") {
                    return Ok(unit());
                }
                let first = self.seq()?;
                if self.eat_sym(",") {
                    let second = self.seq()?;
                    self.expect_sym(")")?;
                    return Ok(pair(first, second));
                }
                self.expect_sym(")")?;
                Ok(first)
            }
            _ => self.error("a term"),
        }
    }

    fn binder(&mut self) -> PResult<String> {
        self.ident()
    }

    fn binding_form(&mut self) -> PResult<Term> {
        match self.bump() {
            Tok::Kw("fn") => {
                let (x, ty) = if self.eat_sym("(") {
                    let x = self.binder()?;
                    let ty = if self.eat_sym(":") {
                        Some(self.ty()?)
                    } else {
                        None
                    };
                    self.expect_sym(")")?;
                    (x, ty)
                } else {
                    (self.binder()?, None)
                };
                self.expect_sym("=>")?;
                let body = self.seq()?;
                Ok(make_fun(&x, ty, body))
            }
            Tok::Kw("tfn") => {
                let name = match (self.peek().clone(), self.peek2()) {
                    (Tok::Ident(n), Tok::Sym(".")) => {
                        self.bump();
                        self.bump();
                        Some(n)
                    }
                    _ => None,
                };
                let body = self.seq()?;
                Ok(match name {
                    Some(n) => tfun_named(&n, body),
                    None => tfun(body),
                })
            }
            Tok::Kw("let") => {
                let x = self.binder()?;
                self.expect_sym("=")?;
                let e = self.seq()?;
                self.expect_kw("in")?;
                let body = self.seq()?;
                Ok(app(make_fun(&x, None, body), e))
            }
            Tok::Kw("ifz") => {
                let c = self.seq()?;
                self.expect_kw("then")?;
                let a = self.seq()?;
                self.expect_kw("else")?;
                let b = self.seq()?;
                Ok(ifz(c, a, b))
            }
            Tok::Kw("match") => {
                let s = self.seq()?;
                self.expect_kw("with")?;
                self.eat_sym("|");
                self.expect_kw("inl")?;
                let x = self.binder()?;
                self.expect_sym("=>")?;
                let l = self.seq()?;
                self.expect_sym("|")?;
                self.expect_kw("inr")?;
                let y = self.binder()?;
                self.expect_sym("=>")?;
                let r = self.seq()?;
                Ok(match_(s, &x, l, &y, r))
            }
            Tok::Kw("unpack") => {
                let e = self.seq()?;
                self.expect_kw("as")?;
                let x = self.binder()?;
                self.expect_kw("in")?;
                let body = self.seq()?;
                Ok(unpack(e, &x, body))
            }
            _ => unreachable!("binding_form called on a non-binding token"),
        }
    }
}

fn make_fun(x: &str, ty: Option<Type>, body: Term) -> Term {
    let body = if x == "_" { body } else { body.close(x) };
    Term::Fun(Hint::new(x), ty, Arc::new(body))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{Side, Var};

    fn p(s: &str) -> Term {
        parse_term(s).unwrap_or_else(|e| panic!("{s}: {e}"))
    }

    #[test]
    fn grammar_productions() {
        assert_eq!(p("rand 2"), Term::Rand(Arc::new(Term::Num(2))));
        assert_eq!(
            p("tfn (fn (x:nat) => x)"),
            tfun(lam_t("x", Type::Nat, var("x")))
        );
        assert_eq!(p("a (+) b"), ifz(rand(num(2)), var("a"), var("b")));
        assert_eq!(p("()"), Term::Unit);
        assert_eq!(p("fst (1, 2)"), Term::Proj(Side::First, Arc::new(pair(num(1), num(2)))));
    }

    #[test]
    fn sugar() {
        assert_eq!(p("let x = 1 in x"), app(lam("x", var("x")), num(1)));
        assert_eq!(p("a; b"), seq(var("a"), var("b")));
        assert_eq!(p("x := 1; !x"), seq(assign(var("x"), num(1)), deref(var("x"))));
    }

    #[test]
    fn application_is_left_associative_and_tight() {
        assert_eq!(p("f x y"), app(app(var("f"), var("x")), var("y")));
        assert_eq!(p("succ f x"), app(succ(var("f")), var("x")));
        assert_eq!(p("f x (+) g y"), choice(app(var("f"), var("x")), app(var("g"), var("y"))));
        assert_eq!(p("f[] x"), app(tapp(var("f")), var("x")));
        assert_eq!(p("f[nat]"), tapp_at(var("f"), Type::Nat));
    }

    #[test]
    fn binding_forms_extend_right() {
        assert_eq!(
            p("fn x => x; x"),
            lam("x", seq(var("x"), var("x")))
        );
        assert_eq!(p("f fn x => x"), app(var("f"), lam("x", var("x"))));
        let m = p("match y with inl a => a | inr b => succ b");
        assert_eq!(m, match_(var("y"), "a", var("a"), "b", succ(var("b"))));
    }

    #[test]
    fn tfn_with_binder_name() {
        let t = p("tfn a. fn (x:a) => x");
        assert_eq!(t, tfun_named("a", lam_t("x", Type::var("a"), var("x"))));
        assert_eq!(t.erase(), p("tfn fn x => x"));
    }

    #[test]
    fn underscore_binder_does_not_bind() {
        match p("fn _ => 1") {
            Term::Fun(h, None, body) => {
                assert_eq!(h.as_str(), "_");
                assert_eq!(*body, Term::Num(1));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_term("fn _ => _").is_err());
    }

    #[test]
    fn bound_variables_become_indices() {
        match p("fn x => fn y => x") {
            Term::Fun(_, _, b) => match &*b {
                Term::Fun(_, _, b) => assert_eq!(**b, Term::Var(Var::Bound(1))),
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn types() {
        let t = parse_type("all a. a -> a").unwrap();
        assert_eq!(t, Type::all("a", Type::arrow(Type::var("a"), Type::var("a"))));
        assert_eq!(
            parse_type("unit + nat * nat -> nat").unwrap(),
            Type::arrow(
                Type::sum(Type::Unit, Type::prod(Type::Nat, Type::Nat)),
                Type::Nat
            )
        );
        assert_eq!(parse_type("ref nat").unwrap(), Type::RefNat);
        assert!(parse_type("ref unit").is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_term("fn x =>\n  (x,").unwrap_err();
        assert_eq!(e.pos.line, 2);
        let e = parse_term("rand 0").unwrap_err();
        assert!(e.message.contains("start at 1"));
        assert!(parse_term("fn x => x )").is_err());
    }
}
