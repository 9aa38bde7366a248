use std::collections::btree_map::{self, BTreeMap};
use std::fmt;
use std::ops::Bound;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::symbol::Symbol;

/// A finite multiset of symbols. Entries with multiplicity zero are never
/// stored, so iteration only ever yields present symbols.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<(Symbol, u32)>", into = "Vec<(Symbol, u32)>")]
pub struct Multiset {
    items: BTreeMap<Symbol, u32>,
}

impl Multiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Total number of symbol occurrences.
    pub fn len(&self) -> u64 {
        self.items.values().map(|&n| n as u64).sum()
    }

    /// Number of distinct symbols.
    pub fn distinct(&self) -> usize {
        self.items.len()
    }

    pub fn count(&self, sym: &Symbol) -> u32 {
        self.items.get(sym).copied().unwrap_or(0)
    }

    pub fn contains(&self, sym: &Symbol) -> bool {
        self.items.contains_key(sym)
    }

    pub fn insert(&mut self, sym: Symbol) {
        self.insert_n(sym, 1);
    }

    pub fn insert_n(&mut self, sym: Symbol, n: u32) {
        if n > 0 {
            *self.items.entry(sym).or_insert(0) += n;
        }
    }

    /// Removes up to `n` copies; returns how many were actually removed.
    pub fn remove_n(&mut self, sym: &Symbol, n: u32) -> u32 {
        let Some(have) = self.items.get_mut(sym) else {
            return 0;
        };
        let taken = n.min(*have);
        *have -= taken;
        if *have == 0 {
            self.items.remove(sym);
        }
        taken
    }

    pub fn union_with(&mut self, other: &Multiset) {
        for (s, &n) in &other.items {
            self.insert_n(s.clone(), n);
        }
    }

    /// Adds `times` copies of every element of `other`.
    pub fn add_scaled(&mut self, other: &Multiset, times: u32) {
        for (s, &n) in &other.items {
            self.insert_n(s.clone(), n * times);
        }
    }

    /// `self ⊇ other`, respecting multiplicities.
    pub fn includes(&self, other: &Multiset) -> bool {
        other.items.iter().all(|(s, &n)| self.count(s) >= n)
    }

    /// Multiset difference, saturating at zero.
    pub fn difference(&self, other: &Multiset) -> Multiset {
        let mut out = self.clone();
        for (s, &n) in &other.items {
            out.remove_n(s, n);
        }
        out
    }

    /// How many disjoint copies of `other` fit inside `self`. An empty
    /// `other` fits once.
    pub fn fits(&self, other: &Multiset) -> u32 {
        other
            .items
            .iter()
            .map(|(s, &n)| self.count(s) / n)
            .min()
            .unwrap_or(1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, u32)> {
        self.items.iter().map(|(s, &n)| (s, n))
    }

    /// All entries whose functor is `functor`, in structural order.
    pub fn with_functor<'a>(
        &'a self,
        functor: &'a Arc<str>,
    ) -> impl Iterator<Item = (&'a Symbol, u32)> + 'a {
        self.items
            .range((
                Bound::Included(Symbol::lower_bound(functor)),
                Bound::Unbounded,
            ))
            .take_while(move |(s, _)| s.functor() == &**functor)
            .map(|(s, &n)| (s, n))
    }
}

impl FromIterator<Symbol> for Multiset {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for s in iter {
            m.insert(s);
        }
        m
    }
}

impl FromIterator<(Symbol, u32)> for Multiset {
    fn from_iter<I: IntoIterator<Item = (Symbol, u32)>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for (s, n) in iter {
            m.insert_n(s, n);
        }
        m
    }
}

impl From<Vec<(Symbol, u32)>> for Multiset {
    fn from(v: Vec<(Symbol, u32)>) -> Self {
        v.into_iter().collect()
    }
}

impl From<Multiset> for Vec<(Symbol, u32)> {
    fn from(m: Multiset) -> Self {
        m.items.into_iter().collect()
    }
}

impl IntoIterator for Multiset {
    type Item = (Symbol, u32);
    type IntoIter = btree_map::IntoIter<Symbol, u32>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.into_iter()
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (s, n)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if n == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{n}")?;
            }
        }
        f.write_str("}")
    }
}
