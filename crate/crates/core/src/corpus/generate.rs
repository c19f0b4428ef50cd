//! Seeded generator of small closed programs at `nat`, `unit` and `bool`.
//!
//! Programs are built from a template grammar that is well typed by
//! construction and keeps reachable state spaces finite: loops only retry a
//! fixed body, and counters are bounded by their numerals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{build, ProgramSpec, BOOL};

pub struct Generator {
    rng: ChaCha8Rng,
    next_var: usize,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            next_var: 0,
        }
    }

    fn fresh(&mut self) -> String {
        self.next_var += 1;
        format!("v{}", self.next_var)
    }

    fn numeral(&mut self) -> u64 {
        self.rng.random_range(1..=4)
    }

    /// A program of type `nat`, as source text. `vars` are in scope at `nat`.
    pub fn nat(&mut self, depth: usize, vars: &[String]) -> String {
        let leaf = depth == 0 || self.rng.random_bool(0.25);
        if leaf {
            if !vars.is_empty() && self.rng.random_bool(0.5) {
                let i = self.rng.random_range(0..vars.len());
                return vars[i].clone();
            }
            return match self.rng.random_range(0..2) {
                0 => self.numeral().to_string(),
                _ => format!("rand {}", self.numeral()),
            };
        }
        let d = depth - 1;
        match self.rng.random_range(0..9) {
            0 => format!("succ ({})", self.nat(d, vars)),
            1 => format!("pred ({})", self.nat(d, vars)),
            2 => format!("rand ({})", self.nat(d, vars)),
            3 => format!(
                "ifz {} then {} else {}",
                self.paren_nat(d, vars),
                self.paren_nat(d, vars),
                self.paren_nat(d, vars)
            ),
            4 => format!("{} (+) {}", self.paren_nat(d, vars), self.paren_nat(d, vars)),
            5 => {
                let x = self.fresh();
                let e = self.nat(d, vars);
                let mut inner = vars.to_vec();
                inner.push(x.clone());
                format!("(let {x} = {e} in {})", self.nat(d, &inner))
            }
            6 => {
                // Geometric retry: terminates almost surely.
                let k = self.rng.random_range(2..=4);
                let body = self.nat(d, vars);
                format!(
                    "fix[unit][nat] (fn (f : unit -> nat) => fn (_ : unit) => \
                     ifz rand {k} then {body} else f ()) ()"
                )
            }
            7 => {
                let r = self.fresh();
                let init = self.nat(d, vars);
                let upd = self.nat(d, vars);
                format!("(let {r} = ref ({init}) in {r} := ({upd}); !{r})")
            }
            _ => {
                let b = self.bool(d, vars);
                format!(
                    "(match {b} with inl _ => {} | inr _ => {})",
                    self.nat(d, vars),
                    self.nat(d, vars)
                )
            }
        }
    }

    fn paren_nat(&mut self, depth: usize, vars: &[String]) -> String {
        format!("({})", self.nat(depth, vars))
    }

    pub fn bool(&mut self, depth: usize, vars: &[String]) -> String {
        if depth == 0 || self.rng.random_bool(0.3) {
            return match self.rng.random_range(0..3) {
                0 => "(inl ())".into(),
                1 => "(inr ())".into(),
                _ => "(inl () (+) inr ())".into(),
            };
        }
        let d = depth - 1;
        match self.rng.random_range(0..3) {
            0 => format!("(leq ({}) ({}))", self.nat(d, vars), self.nat(d, vars)),
            1 => format!("(not {})", self.bool(d, vars)),
            _ => format!("(xor {} {})", self.bool(d, vars), self.bool(d, vars)),
        }
    }

    /// A program of type `unit`, possibly diverging.
    pub fn unit(&mut self, depth: usize) -> String {
        match self.rng.random_range(0..4) {
            0 => format!("ifz {} then () else omega", self.paren_nat(depth, &[])),
            1 => format!("(fn (_ : nat) => ()) ({})", self.nat(depth, &[])),
            2 => format!("() (+) ({})", self.unit(depth.saturating_sub(1))),
            _ => "omega (+) ()".into(),
        }
    }
}

/// `count` programs from `seed`, cycling through `nat`, `unit` and `bool`.
pub fn generate_suite(seed: u64, count: usize) -> Vec<ProgramSpec> {
    let mut g = Generator::new(seed);
    (0..count)
        .map(|i| {
            let (src, ty) = match i % 3 {
                0 => (g.nat(3, &[]), "nat"),
                1 => (g.unit(3), "unit"),
                _ => (g.bool(3, &[]), BOOL),
            };
            ProgramSpec::new(&format!("gen{i}"), vec![], build(&src), ty)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::build_chain;
    use crate::typecheck::typecheck;

    #[test]
    fn suite_is_deterministic_and_well_typed() {
        let a = generate_suite(7, 30);
        let b = generate_suite(7, 30);
        assert_eq!(a, b);
        for p in &a {
            typecheck(&p.term, Some(&p.ty)).unwrap_or_else(|e| panic!("{}: {e}", crate::syntax::pretty(&p.term)));
        }
    }

    #[test]
    fn suite_chains_are_finite() {
        for p in generate_suite(11, 30) {
            let g = build_chain(&p.config(), 20_000);
            assert!(g.complete(), "{}", crate::syntax::pretty(&p.term));
        }
    }
}
