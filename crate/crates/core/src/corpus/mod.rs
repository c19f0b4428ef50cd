//! Example programs: fixed points, arithmetic helpers, the termination
//! probability gadgets `e_r`/`t_r`, von Neumann's fair coin, the one-time
//! pad, counters with state, and lists with `map`.
//!
//! Helpers are written in concrete syntax with free names for other helpers,
//! which are substituted in afterwards. All substituted terms are closed.

mod generate;

pub use generate::{generate_suite, Generator};

use std::sync::OnceLock;

use thiserror::Error;

use crate::prob::Prob;
use crate::semantics::Config;
use crate::syntax::build::{fold_at, inl, inr, num, pair, unit};
use crate::syntax::{parse_context, parse_term, parse_type, substitute, Bindings, EvalContext, Term, Type};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("unknown program `{0}`")]
    Unknown(String),
    #[error("bad parameters for `{name}`: {reason}")]
    Params { name: String, reason: String },
}

fn bad(name: &str, reason: impl Into<String>) -> CorpusError {
    CorpusError::Params {
        name: name.into(),
        reason: reason.into(),
    }
}

/// A named program with its declared type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgramSpec {
    pub name: String,
    pub params: Vec<String>,
    /// Annotated term, as given to the typechecker.
    pub term: Term,
    pub ty: Type,
}

impl ProgramSpec {
    pub fn new(name: &str, params: Vec<String>, term: Term, ty: &str) -> Self {
        ProgramSpec {
            name: name.into(),
            params,
            term,
            ty: ty_of(ty),
        }
    }

    /// The erased term, ready to run.
    pub fn erased(&self) -> Term {
        self.term.erase()
    }

    pub fn config(&self) -> Config {
        Config::new(self.erased())
    }

    /// Full display name, e.g. `er(1,3)`.
    pub fn label(&self) -> String {
        if self.params.is_empty() {
            self.name.clone()
        } else {
            format!("{}({})", self.name, self.params.join(","))
        }
    }
}

fn ty_of(src: &str) -> Type {
    parse_type(src).unwrap_or_else(|e| panic!("corpus type `{src}`: {e}"))
}

pub const BOOL: &str = "unit + unit";
pub const COUNTER: &str = "ex a. (unit -> a) * ((a -> nat) * (a -> unit))";

pub fn list_type_src(elem: &str) -> String {
    format!("mu l. unit + ({elem}) * l")
}

const HELPERS: &[(&str, &str)] = &[
    (
        "fix",
        "tfn a. tfn b. fn (f : (a -> b) -> a -> b) => fn (z : a) =>
           (fn (y : mu r. r -> a -> b) => let y1 = unfold y in f (fn (x : a) => y1 y x))
           (fold (fn (y : mu r. r -> a -> b) => let y1 = unfold y in f (fn (x : a) => y1 y x))
              at mu r. r -> a -> b)
           z",
    ),
    ("omega", "fix[unit][unit] (fn f => fn x => f x) ()"),
    (
        "leq",
        "fix[nat][nat -> unit + unit] (fn leq => fn x => fn y =>
           ifz x then inl () else ifz y then inr () else leq (pred x) (pred y))",
    ),
    (
        "add",
        "fix[nat][nat -> nat] (fn add => fn x => fn y =>
           ifz y then succ x else succ (add x (pred y)))",
    ),
    (
        "mul",
        "fix[nat][nat -> nat] (fn mul => fn x => fn y =>
           ifz y then x else add x (mul x (pred y)))",
    ),
    (
        "minus",
        "fix[nat][nat -> nat] (fn minus => fn x => fn y =>
           ifz y then pred x else minus (pred x) (pred y))",
    ),
    // Numerators that may be zero are stored shifted by one: `n` as `n+1`.
    (
        "smul",
        "fix[nat][nat -> nat] (fn smul => fn n => fn m =>
           ifz n then 1 else add (smul (pred n) m) m)",
    ),
    (
        "ssub",
        "fix[nat][nat -> nat] (fn ssub => fn x => fn y =>
           ifz y then x else ssub (pred x) (pred y))",
    ),
    (
        "half",
        "fix[nat][nat] (fn half => fn n => ifz pred n then 1 else succ (half (pred (pred n))))",
    ),
    (
        "not",
        "fn (x : unit + unit) => match x with inl _ => inr () | inr _ => inl ()",
    ),
    (
        "xor",
        "fn (x : unit + unit) => fn (y : unit + unit) => match x with inl _ => not y | inr _ => y",
    ),
    ("gen", "inl () (+) inr ()"),
    ("nil", "tfn a. fold (inl ()) at mu l. unit + a * l"),
    (
        "cons",
        "tfn a. fn (x : a) => fn (xs : mu l. unit + a * l) => fold (inr (x, xs)) at mu l. unit + a * l",
    ),
    (
        "map",
        "tfn a. tfn b. fn (f : a -> b) =>
           fix[mu l. unit + a * l][mu l. unit + b * l]
             (fn (m : (mu l. unit + a * l) -> mu l. unit + b * l) => fn (xs : mu l. unit + a * l) =>
                match unfold xs with inl _ => nil[b] | inr p => cons[b] (f (fst p)) (m (snd p)))",
    ),
];

/// Declared types of the helpers, checked in tests.
pub const HELPER_TYPES: &[(&str, &str)] = &[
    ("fix", "all a. all b. ((a -> b) -> a -> b) -> a -> b"),
    ("omega", "unit"),
    ("leq", "nat -> nat -> unit + unit"),
    ("add", "nat -> nat -> nat"),
    ("mul", "nat -> nat -> nat"),
    ("minus", "nat -> nat -> nat"),
    ("smul", "nat -> nat -> nat"),
    ("ssub", "nat -> nat -> nat"),
    ("half", "nat -> nat"),
    ("not", "unit + unit -> unit + unit"),
    ("xor", "unit + unit -> unit + unit -> unit + unit"),
    ("gen", "unit + unit"),
    ("nil", "all a. mu l. unit + a * l"),
    ("cons", "all a. a -> (mu l. unit + a * l) -> mu l. unit + a * l"),
    ("map", "all a. all b. (a -> b) -> (mu l. unit + a * l) -> mu l. unit + b * l"),
];

fn helpers() -> &'static Bindings {
    static LIB: OnceLock<Bindings> = OnceLock::new();
    LIB.get_or_init(|| {
        let mut b = Bindings::new();
        for (name, src) in HELPERS {
            let t = build_with(src, &b);
            assert!(t.is_closed(), "helper `{name}` is not closed");
            b = b.term(name, t);
        }
        b
    })
}

fn build_with(src: &str, b: &Bindings) -> Term {
    let t = parse_term(src).unwrap_or_else(|e| panic!("corpus source `{src}`: {e}"));
    substitute(&t, b)
}

/// Parses `src` and fills in every helper it mentions.
pub fn build(src: &str) -> Term {
    build_with(src, helpers())
}

/// Like [`build`], with additional closed definitions.
pub fn build_using(src: &str, extra: &[(&str, &Term)]) -> Term {
    let mut b = helpers().clone();
    for (x, t) in extra {
        b = b.term(x, (*t).clone());
    }
    build_with(src, &b)
}

/// A helper by name.
pub fn helper(name: &str) -> Option<Term> {
    helpers().terms.get(name).cloned()
}

pub fn fix() -> Term {
    helper("fix").expect("fix")
}

/// Divergence at type `unit`, through `fix`.
pub fn omega() -> Term {
    helper("omega").expect("omega")
}

/// Divergence at any type.
pub fn omega_at(ty: &str) -> Term {
    build(&format!("fix[unit][{ty}] (fn f => fn x => f x) ()"))
}

pub fn tru() -> Term {
    inl(unit())
}

pub fn fls() -> Term {
    inr(unit())
}

fn check_kn(name: &str, k: u64, n: u64, strict: bool) -> Result<(), CorpusError> {
    if k == 0 || n == 0 || k > n || (strict && k == n) {
        let need = if strict { "1 <= k < n" } else { "1 <= k <= n" };
        return Err(bad(name, format!("need {need}, got k = {k}, n = {n}")));
    }
    Ok(())
}

/// `e_r` for `r = k/n`, of type `unit -> unit`.
pub fn er_rational(k: u64, n: u64) -> Result<ProgramSpec, CorpusError> {
    check_kn("er", k, n, false)?;
    let src = format!(
        "fn (_ : unit) => let y = rand {n} in match leq y {k} with inl _ => () | inr _ => omega"
    );
    Ok(ProgramSpec::new("er", vec![k.to_string(), n.to_string()], build(&src), "unit -> unit"))
}

/// `t_r = tfn a. fn x => e_r (); x` for `r = k/n`.
pub fn tr(k: u64, n: u64) -> Result<ProgramSpec, CorpusError> {
    let er = er_rational(k, n)?.term;
    let t = build_using("tfn a. fn (x : a) => er (); x", &[("er", &er)]);
    Ok(ProgramSpec::new("tr", vec![k.to_string(), n.to_string()], t, "all a. a -> a"))
}

/// The sequence as a nonempty list of pairs whose last entry repeats
/// forever. The pair `(a, b)` stands for `(a - 1) / b`.
fn sequence_list(qs: &[Prob]) -> Term {
    let enc = |q: &Prob| -> Term {
        let a = q.numer().to_string().parse::<u64>().expect("small numerator") + 1;
        let b = q.denom().to_string().parse::<u64>().expect("small denominator");
        pair(num(a), num(b))
    };
    list_value(&qs.iter().map(enc).collect::<Vec<_>>(), "nat * nat")
}

/// `e_r` for the supremum of a nondecreasing rational sequence. Each round
/// tests the head `q` and otherwise retries with the renormalised tail
/// `r'(z) = (r(z+1) - q) / (1 - q)`. Zero is kept as `(1, 1)` so that a
/// constant tail reaches a fixed point and the chain stays finite.
pub fn er_sequence(qs: &[Prob]) -> Result<ProgramSpec, CorpusError> {
    if qs.is_empty() {
        return Err(bad("er-seq", "the sequence is empty"));
    }
    if qs.iter().any(|q| *q > Prob::one()) {
        return Err(bad("er-seq", "entries must lie in [0, 1]"));
    }
    if qs.windows(2).any(|w| w[0] > w[1]) {
        return Err(bad("er-seq", "the sequence must be nondecreasing"));
    }
    let list = list_type_src("nat * nat");
    let phi = format!(
        "fn (f : ({list}) -> unit) => fn (r : {list}) =>
        match unfold r with
          inl _ => omega
        | inr c =>
          let q = fst c in
          let a = fst q in
          let b = snd q in
          let rest = snd c in
          let tail = match unfold rest with inl _ => r | inr _ => rest in
          let y = rand b in
          match leq (succ y) a with
            inl _ => ()
          | inr _ => f (map[nat * nat][nat * nat] (fn (p : nat * nat) =>
              let n = ssub (smul (fst p) b) (smul a (snd p)) in
              ifz n then (1, 1) else (n, mul (snd p) (minus (succ b) a))) tail)"
    );
    let e = build_using(
        &format!("fn (_ : unit) => fix[{list}][unit] ({phi}) r"),
        &[("r", &sequence_list(qs))],
    );
    let params = qs.iter().map(|q| q.to_string()).collect();
    Ok(ProgramSpec::new("er-seq", params, e, "unit -> unit"))
}

/// `t_{1/2} (+) t_{1/3}` under a type abstraction, and `t_{5/12}` likewise.
pub fn mixed_identity_pair() -> (ProgramSpec, ProgramSpec) {
    let t12 = tr(1, 2).expect("valid").term;
    let t13 = tr(1, 3).expect("valid").term;
    let t512 = tr(5, 12).expect("valid").term;
    let lhs = build_using("tfn a. t12[a] (+) t13[a]", &[("t12", &t12), ("t13", &t13)]);
    let rhs = build_using("tfn a. t512[a]", &[("t512", &t512)]);
    (
        ProgramSpec::new("id-mix", vec![], lhs, "all a. a -> a"),
        ProgramSpec::new("id-single", vec![], rhs, "all a. a -> a"),
    )
}

/// Instantiates twice, so a choice under the type abstraction is made once
/// but the resulting function runs twice.
pub const TWICE_CONTEXT: &str = "let f = [-][] in let x = f () in f ()";

pub fn twice_context() -> EvalContext {
    parse_context(TWICE_CONTEXT).expect("valid context")
}

/// Von Neumann's fair coin from a coin biased `k/n` towards `true`.
pub fn von_neumann(k: u64, n: u64) -> Result<ProgramSpec, CorpusError> {
    check_kn("vn", k, n, true)?;
    let tp = build(&format!("fn (_ : unit) => let y = rand {n} in leq y {k}"));
    let phi = "fn (f : unit -> unit + unit) => fn (_ : unit) =>
        let x = tp () in
        let y = tp () in
        match (match x with inl _ => y | inr _ => (match y with inl _ => inr () | inr _ => inl ()))
        with inl _ => f () | inr _ => x";
    let t = build_using(&format!("fix[unit][unit + unit] ({phi})"), &[("tp", &tp)]);
    Ok(ProgramSpec::new("vn", vec![k.to_string(), n.to_string()], t, "unit -> unit + unit"))
}

pub fn fair_coin() -> ProgramSpec {
    ProgramSpec::new("coin", vec![], build("fn (_ : unit) => inl () (+) inr ()"), "unit -> unit + unit")
}

/// Flips a coin to either return its argument or try again.
pub fn hesitant() -> ProgramSpec {
    let t = build("tfn a. fix[a][a] (fn (f : a -> a) => fn (x : a) => x (+) f x)");
    ProgramSpec::new("hesitant", vec![], t, "all a. a -> a")
}

pub fn identity() -> ProgramSpec {
    ProgramSpec::new("id", vec![], build("tfn a. fn (x : a) => x"), "all a. a -> a")
}

/// One-time pad programs, all at `bool -> bool -> bool`.
pub fn otp(name: &str) -> Result<ProgramSpec, CorpusError> {
    let body = match name {
        "exp" => "xor (x (+) y) gen",
        "rnd" => "gen",
        "exp1" => "xor x gen",
        "exp2" => "xor y gen",
        _ => return Err(CorpusError::Unknown(name.into())),
    };
    let t = build(&format!("fn (x : unit + unit) => fn (y : unit + unit) => {body}"));
    Ok(ProgramSpec::new(name, vec![], t, "(unit + unit) -> (unit + unit) -> unit + unit"))
}

/// Two counter modules `(alloc, (get, inc))`; `inc` increments with
/// probability 1/2. The second stores twice the count.
pub fn counters() -> (ProgramSpec, ProgramSpec) {
    let c1 = build(&format!(
        "pack (fn (_ : unit) => ref 1,
               (fn (x : ref nat) => !x, fn (x : ref nat) => () (+) (x := succ !x))) as {COUNTER}"
    ));
    let c2 = build(&format!(
        "pack (fn (_ : unit) => ref 2,
               (fn (x : ref nat) => half (!x), fn (x : ref nat) => () (+) (x := succ (succ !x)))) as {COUNTER}"
    ));
    (
        ProgramSpec::new("counter1", vec![], c1, COUNTER),
        ProgramSpec::new("counter2", vec![], c2, COUNTER),
    )
}

/// Allocates a counter, increments it `m` times, and reads it.
pub fn counter_observation(m: usize) -> EvalContext {
    let incs: String = (0..m).map(|_| "inc r; ").collect();
    let src = format!(
        "unpack [-] as c in let alloc = fst c in let get = fst (snd c) in let inc = snd (snd c) in \
         let r = alloc () in {incs}get r"
    );
    parse_context(&src).expect("valid context")
}

pub fn nil() -> Term {
    helper("nil").expect("nil")
}

pub fn cons() -> Term {
    helper("cons").expect("cons")
}

pub fn map() -> Term {
    helper("map").expect("map")
}

/// A list literal as a value, `fold (inr (x, ...))` with annotations.
pub fn list_value(elems: &[Term], elem_ty: &str) -> Term {
    let ty = ty_of(&list_type_src(elem_ty));
    let mut acc = fold_at(inl(unit()), ty.clone());
    for x in elems.iter().rev() {
        acc = fold_at(inr(pair(x.clone(), acc)), ty.clone());
    }
    acc
}

/// `fn x => f (g x)`.
pub fn compose(f: &Term, g: &Term) -> Term {
    build_using("fn x => f (g x)", &[("f", f), ("g", g)])
}

/// `map (f . g) xs` and `(map f . map g) xs`.
pub fn map_fusion_pair(f: &Term, g: &Term, xs: &Term) -> (Term, Term) {
    let fused = build_using("map[][] fg xs", &[("fg", &compose(f, g)), ("xs", xs)]);
    let mf = build_using("map[][] f", &[("f", f)]);
    let mg = build_using("map[][] g", &[("g", g)]);
    let split = build_using("fg xs", &[("fg", &compose(&mf, &mg)), ("xs", xs)]);
    (fused, split)
}

/// Every named program, with default parameters where it takes any.
pub fn catalogue() -> Vec<ProgramSpec> {
    let mut out: Vec<ProgramSpec> = HELPER_TYPES
        .iter()
        .map(|(name, ty)| ProgramSpec::new(name, vec![], helper(name).expect("helper"), ty))
        .collect();
    out.push(er_rational(1, 2).expect("valid"));
    out.push(er_sequence(&[Prob::new(1, 4), Prob::new(1, 2)]).expect("valid"));
    out.push(tr(1, 2).expect("valid"));
    let (l, r) = mixed_identity_pair();
    out.push(l);
    out.push(r);
    out.push(von_neumann(1, 3).expect("valid"));
    out.push(fair_coin());
    out.push(hesitant());
    out.push(identity());
    for n in ["exp", "rnd", "exp1", "exp2"] {
        out.push(otp(n).expect("known"));
    }
    let (c1, c2) = counters();
    out.push(c1);
    out.push(c2);
    out
}

fn parse_u64s(name: &str, params: &[String], want: usize) -> Result<Vec<u64>, CorpusError> {
    if params.len() != want {
        return Err(bad(name, format!("expected {want} parameters, got {}", params.len())));
    }
    params
        .iter()
        .map(|p| p.parse::<u64>().map_err(|_| bad(name, format!("`{p}` is not a number"))))
        .collect()
}

/// Looks up a program by name, e.g. `lookup("vn", &["1", "3"])`.
pub fn lookup(name: &str, params: &[String]) -> Result<ProgramSpec, CorpusError> {
    match name {
        "er" => {
            let v = parse_u64s(name, params, 2)?;
            er_rational(v[0], v[1])
        }
        "tr" => {
            let v = parse_u64s(name, params, 2)?;
            tr(v[0], v[1])
        }
        "vn" => {
            let v = parse_u64s(name, params, 2)?;
            von_neumann(v[0], v[1])
        }
        "er-seq" => {
            let qs = params
                .iter()
                .map(|p| p.parse::<Prob>().map_err(|_| bad(name, format!("`{p}` is not a rational"))))
                .collect::<Result<Vec<_>, _>>()?;
            er_sequence(&qs)
        }
        _ => {
            if !params.is_empty() {
                return Err(bad(name, "takes no parameters"));
            }
            catalogue()
                .into_iter()
                .find(|p| p.name == name)
                .ok_or_else(|| CorpusError::Unknown(name.into()))
        }
    }
}

/// Closed programs of ground type whose chains are finite, for checks that
/// quantify over the corpus.
pub fn closed_programs() -> Vec<ProgramSpec> {
    let mut out = Vec::new();
    let mut add = |name: &str, t: Term, ty: &str| out.push(ProgramSpec::new(name, vec![], t, ty));
    let er12 = er_rational(1, 2).expect("valid").term;
    let er23 = er_rational(2, 3).expect("valid").term;
    add("unit", unit(), "unit");
    add("er12-run", build_using("er ()", &[("er", &er12)]), "unit");
    add("er23-run", build_using("er ()", &[("er", &er23)]), "unit");
    add("omega", omega(), "unit");
    add("choice-omega", build("() (+) omega"), "unit");
    let t12 = tr(1, 2).expect("valid").term;
    add("tr12-run", build_using("t[] 3", &[("t", &t12)]), "nat");
    let (l, r) = mixed_identity_pair();
    let ctx = twice_context();
    add("id-mix-run", ctx.plug(l.term), "unit");
    add("id-single-run", ctx.plug(r.term), "unit");
    let vn = von_neumann(1, 3).expect("valid").term;
    add("vn13-run", build_using("vn ()", &[("vn", &vn)]), BOOL);
    add("hesitant-run", build_using("h[] 5", &[("h", &hesitant().term)]), "nat");
    let exp = otp("exp").expect("known").term;
    add("exp-run", build_using("e (inl ()) (inr ())", &[("e", &exp)]), BOOL);
    add("leq-run", build("leq 2 3"), BOOL);
    add("half-run", build("half 6"), "nat");
    let (c1, c2) = counters();
    let obs = counter_observation(2);
    add("counter1-run", obs.plug(c1.term), "nat");
    add("counter2-run", obs.plug(c2.term), "nat");
    let xs = list_value(&[num(1), num(2)], "nat");
    add(
        "map-run",
        build_using("map[][] (fn (x : nat) => succ x (+) x) xs", &[("xs", &xs)]),
        &list_type_src("nat"),
    );
    add("rand-sum", build("add (rand 3) (rand 2)"), "nat");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{build_chain, exact_distribution, phi_lower, solve_exact};
    use crate::semantics::StepKind;
    use crate::typecheck::typecheck;

    fn exact(t: &Term) -> Prob {
        let g = build_chain(&Config::new(t.erase()), 50_000);
        solve_exact(&g).expect("complete chain")[0].clone()
    }

    #[test]
    fn helpers_typecheck() {
        for (name, ty) in HELPER_TYPES {
            let t = helper(name).unwrap();
            let want = ty_of(ty);
            typecheck(&t, Some(&want)).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn catalogue_typechecks() {
        for p in catalogue() {
            typecheck(&p.term, Some(&p.ty)).unwrap_or_else(|e| panic!("{}: {e}", p.label()));
        }
        for p in closed_programs() {
            typecheck(&p.term, Some(&p.ty)).unwrap_or_else(|e| panic!("{}: {e}", p.label()));
        }
    }

    #[test]
    fn arithmetic_by_evaluation() {
        let value = |src: &str| {
            let d = exact_distribution(&build_chain(&Config::new(build(src).erase()), 50_000)).unwrap();
            let v = d.values();
            assert_eq!(v.len(), 1, "{src}");
            v.into_keys().next().unwrap()
        };
        assert_eq!(*value("add 3 4"), num(7));
        assert_eq!(*value("mul 3 4"), num(12));
        assert_eq!(*value("minus 7 3"), num(4));
        assert_eq!(*value("minus 3 7"), num(1));
        assert_eq!(*value("smul 3 4"), num(9));
        assert_eq!(*value("ssub 9 4"), num(6));
        assert_eq!(*value("ssub 4 9"), num(1));
        assert_eq!(*value("half 8"), num(4));
        assert_eq!(*value("half 2"), num(1));
        assert_eq!(*value("leq 2 3"), tru());
        assert_eq!(*value("leq 3 3"), tru());
        assert_eq!(*value("leq 4 3"), fls());
    }

    #[test]
    fn helpers_are_choice_free() {
        for src in ["add 3 4", "mul 2 3", "minus 5 2", "leq 3 5", "half 6", "smul 3 2", "ssub 5 2"] {
            let g = build_chain(&Config::new(build(src).erase()), 50_000);
            assert!(g.complete());
            assert!(g.edges.iter().flatten().all(|e| e.kind != StepKind::Choice), "{src}");
        }
    }

    #[test]
    fn fix_basics() {
        assert_eq!(exact(&build("fix[unit][unit] (fn f => fn x => x) ()")), Prob::one());
        assert_eq!(exact(&omega()), Prob::zero());
    }

    #[test]
    fn er_rational_is_exact() {
        for n in 1..=6 {
            for k in 1..=n {
                let t = build_using("e ()", &[("e", &er_rational(k, n).unwrap().term)]);
                assert_eq!(exact(&t), Prob::new(k, n), "k = {k}, n = {n}");
            }
        }
        assert!(er_rational(0, 3).is_err());
        assert!(er_rational(4, 3).is_err());
    }

    #[test]
    fn er_sequence_reaches_its_supremum() {
        let run = |qs: &[Prob]| {
            let e = er_sequence(qs).unwrap();
            typecheck(&e.term, Some(&e.ty)).unwrap();
            build_using("e ()", &[("e", &e.term)])
        };
        let oracle = |k, n| exact(&build_using("e ()", &[("e", &er_rational(k, n).unwrap().term)]));
        assert_eq!(exact(&run(&[Prob::new(1, 2)])), oracle(1, 2));
        assert_eq!(exact(&run(&[Prob::zero()])), Prob::zero());
        assert_eq!(exact(&run(&[Prob::new(1, 4), Prob::new(1, 2)])), oracle(1, 2));
        assert_eq!(
            exact(&run(&[Prob::new(1, 3), Prob::new(1, 2), Prob::new(2, 3)])),
            oracle(2, 3)
        );
        assert_eq!(exact(&run(&[Prob::zero(), Prob::one()])), Prob::one());
        // One round only tests the head.
        let first = phi_lower(&Config::new(run(&[Prob::new(1, 4), Prob::new(1, 2)]).erase()), 400, 20_000);
        assert!(first >= Prob::new(1, 4) && first <= Prob::new(1, 2), "{first}");
    }

    #[test]
    fn parameters_are_validated() {
        assert!(von_neumann(3, 3).is_err());
        assert!(er_sequence(&[Prob::new(1, 2), Prob::new(1, 3)]).is_err());
        assert!(lookup("vn", &["1".into()]).is_err());
        assert_eq!(lookup("nope", &[]), Err(CorpusError::Unknown("nope".into())));
        assert_eq!(lookup("vn", &["1".into(), "3".into()]).unwrap().label(), "vn(1,3)");
    }

    #[test]
    fn list_literal_types() {
        let xs = list_value(&[num(1), num(2)], "nat");
        typecheck(&xs, Some(&ty_of(&list_type_src("nat")))).unwrap();
    }
}
