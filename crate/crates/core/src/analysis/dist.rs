use std::collections::BTreeMap;
use std::sync::Arc;

use crate::prob::Prob;
use crate::semantics::Config;
use crate::syntax::{pretty, Term};

/// Finite subprobability distribution over terminal configurations.
/// Zero entries are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Distribution {
    entries: BTreeMap<Config, Prob>,
}

impl Distribution {
    pub fn new() -> Self {
        Self::default()
    }

    /// The Dirac distribution at `c`.
    pub fn point(c: Config) -> Self {
        let mut d = Self::new();
        d.add(c, &Prob::one());
        d
    }

    pub fn add(&mut self, c: Config, p: &Prob) {
        if p.is_zero() {
            return;
        }
        *self.entries.entry(c).or_default() += p;
    }

    /// `self += p * other`.
    pub fn add_scaled(&mut self, other: &Distribution, p: &Prob) {
        for (c, q) in &other.entries {
            self.add(c.clone(), &(p * q));
        }
    }

    pub fn mass(&self) -> Prob {
        self.entries.values().sum()
    }

    pub fn get(&self, c: &Config) -> Prob {
        self.entries.get(c).cloned().unwrap_or_default()
    }

    /// Probability of the value `v` paired with any heap.
    pub fn value_prob(&self, v: &Term) -> Prob {
        self.entries
            .iter()
            .filter(|(c, _)| *c.term == *v)
            .map(|(_, p)| p)
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Config, &Prob)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Marginal over values, dropping the final heaps.
    pub fn values(&self) -> BTreeMap<Arc<Term>, Prob> {
        let mut out: BTreeMap<Arc<Term>, Prob> = BTreeMap::new();
        for (c, p) in &self.entries {
            *out.entry(c.term.clone()).or_default() += p;
        }
        out
    }

    /// Entries sorted by their printed form, as `(printed, prob)`.
    pub fn sorted_printed(&self) -> Vec<(String, Prob)> {
        let mut v: Vec<(String, Prob)> = self
            .entries
            .iter()
            .map(|(c, p)| {
                let s = if c.heap.is_empty() { pretty(&c.term) } else { c.to_string() };
                (s, p.clone())
            })
            .collect();
        v.sort();
        v
    }
}

impl FromIterator<(Config, Prob)> for Distribution {
    fn from_iter<I: IntoIterator<Item = (Config, Prob)>>(iter: I) -> Self {
        let mut d = Distribution::new();
        for (c, p) in iter {
            d.add(c, &p);
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::build::num;

    #[test]
    fn accumulates_and_drops_zeros() {
        let mut d = Distribution::new();
        d.add(Config::new(num(1)), &Prob::new(1, 4));
        d.add(Config::new(num(1)), &Prob::new(1, 4));
        d.add(Config::new(num(2)), &Prob::zero());
        assert_eq!(d.len(), 1);
        assert_eq!(d.mass(), Prob::new(1, 2));
        assert_eq!(d.value_prob(&num(1)), Prob::new(1, 2));
    }

    #[test]
    fn values_marginalise_heaps() {
        let a = Config::canonical(vec![1], Arc::new(num(3)));
        let b = Config::canonical(vec![2], Arc::new(num(3)));
        let d: Distribution = [(a, Prob::new(1, 3)), (b, Prob::new(1, 3))].into_iter().collect();
        assert_eq!(d.len(), 2);
        assert_eq!(d.values().get(&Arc::new(num(3))), Some(&Prob::new(2, 3)));
    }
}
