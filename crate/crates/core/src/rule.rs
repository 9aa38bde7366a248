//! Prioritized multiset rewriting rules with promoters, and their generic
//! instantiation.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::RuleError;
use crate::multiset::Multiset;
use crate::pattern::{Bindings, Pattern, Var};
use crate::symbol::Symbol;

/// Name of a cell state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateId(Arc<str>);

impl StateId {
    pub fn new(name: &str) -> Self {
        StateId(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for StateId {
    fn from(s: &str) -> Self {
        StateId::new(s)
    }
}

/// How often something happens: once, or as many times as possible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Multiplicity {
    Once,
    Max,
}

/// Combined instantiation and application mode of a rule. A classical
/// (non-generic) `min`/`max` rule is written as `once·α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleMode {
    pub instantiation: Multiplicity,
    pub application: Multiplicity,
}

impl RuleMode {
    pub const MIN_MIN: RuleMode = RuleMode::new(Multiplicity::Once, Multiplicity::Once);
    pub const MIN_MAX: RuleMode = RuleMode::new(Multiplicity::Once, Multiplicity::Max);
    pub const MAX_MIN: RuleMode = RuleMode::new(Multiplicity::Max, Multiplicity::Once);
    pub const MAX_MAX: RuleMode = RuleMode::new(Multiplicity::Max, Multiplicity::Max);

    pub const fn new(instantiation: Multiplicity, application: Multiplicity) -> Self {
        RuleMode {
            instantiation,
            application,
        }
    }
}

impl fmt::Display for RuleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |m: Multiplicity| match m {
            Multiplicity::Once => "min",
            Multiplicity::Max => "max",
        };
        write!(f, "{}·{}", name(self.instantiation), name(self.application))
    }
}

/// A (possibly generic) rule `S x →mode S' x' (y)↓∀ | z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub label: String,
    pub current: StateId,
    pub consumed: Vec<Pattern>,
    pub target: StateId,
    pub produced: Vec<Pattern>,
    pub broadcast: Vec<Pattern>,
    pub promoters: Vec<Pattern>,
    pub mode: RuleMode,
}

/// A fully instantiated rule: every multiset is ground.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundRule {
    pub consumed: Multiset,
    pub produced: Multiset,
    pub broadcast: Multiset,
    pub promoters: Multiset,
}

impl GroundRule {
    /// Applicable once against `contents`: consumed and promoters present.
    pub fn applicable(&self, contents: &Multiset) -> bool {
        contents.includes(&self.consumed) && contents.includes(&self.promoters)
    }

    /// How many times the rule can fire on `contents` under maximal
    /// application. Rules consuming nothing fire at most once per step.
    pub fn max_applications(&self, contents: &Multiset) -> u32 {
        if !contents.includes(&self.promoters) {
            return 0;
        }
        contents.fits(&self.consumed)
    }
}

impl Rule {
    pub fn new(
        label: impl Into<String>,
        current: impl Into<StateId>,
        target: impl Into<StateId>,
    ) -> Self {
        Rule {
            label: label.into(),
            current: current.into(),
            consumed: Vec::new(),
            target: target.into(),
            produced: Vec::new(),
            broadcast: Vec::new(),
            promoters: Vec::new(),
            mode: RuleMode::MIN_MIN,
        }
    }

    pub fn consume(mut self, pats: impl IntoIterator<Item = Pattern>) -> Self {
        self.consumed.extend(pats);
        self
    }

    pub fn produce(mut self, pats: impl IntoIterator<Item = Pattern>) -> Self {
        self.produced.extend(pats);
        self
    }

    pub fn send(mut self, pats: impl IntoIterator<Item = Pattern>) -> Self {
        self.broadcast.extend(pats);
        self
    }

    pub fn promote(mut self, pats: impl IntoIterator<Item = Pattern>) -> Self {
        self.promoters.extend(pats);
        self
    }

    pub fn mode(mut self, mode: RuleMode) -> Self {
        self.mode = mode;
        self
    }

    /// Every variable on the right-hand side must be bound by a consumed or
    /// promoter pattern.
    pub fn validate(&self) -> Result<(), RuleError> {
        let bound: BTreeSet<Var> = self
            .consumed
            .iter()
            .chain(&self.promoters)
            .flat_map(|p| p.vars())
            .collect();
        for p in self.produced.iter().chain(&self.broadcast) {
            if let Some(v) = p.vars().find(|v| !bound.contains(v)) {
                return Err(RuleError::UnboundVariable {
                    rule: self.label.clone(),
                    var: v.0.to_string(),
                });
            }
        }
        Ok(())
    }

    /// All distinct ground instances applicable to `contents`, in structural
    /// order. Promoters bind variables but reserve nothing; consumed patterns
    /// must be satisfiable simultaneously.
    pub fn instances(&self, contents: &Multiset) -> Vec<GroundRule> {
        let mut found = BTreeSet::new();
        let mut reserved = Vec::new();
        self.search(0, Bindings::new(), &mut reserved, contents, &mut found);
        found.into_iter().collect()
    }

    fn search(
        &self,
        idx: usize,
        bindings: Bindings,
        reserved: &mut Vec<Symbol>,
        contents: &Multiset,
        found: &mut BTreeSet<GroundRule>,
    ) {
        let n_consumed = self.consumed.len();
        if idx == n_consumed + self.promoters.len() {
            if let Some(g) = self.ground(&bindings) {
                if g.applicable(contents) {
                    found.insert(g);
                }
            }
            return;
        }
        let is_consumed = idx < n_consumed;
        let pattern = if is_consumed {
            &self.consumed[idx]
        } else {
            &self.promoters[idx - n_consumed]
        };

        let mut try_symbol = |sym: &Symbol, count: u32, reserved: &mut Vec<Symbol>| {
            if is_consumed {
                let used = reserved.iter().filter(|s| *s == sym).count() as u32;
                if used >= count {
                    return;
                }
            }
            if let Some(next) = pattern.matches(sym, &bindings) {
                if is_consumed {
                    reserved.push(sym.clone());
                    self.search(idx + 1, next, reserved, contents, found);
                    reserved.pop();
                } else {
                    self.search(idx + 1, next, reserved, contents, found);
                }
            }
        };

        // Fully determined patterns need a single lookup instead of a scan.
        if let Some(sym) = pattern.ground(&bindings) {
            let count = contents.count(&sym);
            if count > 0 {
                try_symbol(&sym, count, reserved);
            }
            return;
        }
        for (sym, count) in contents.with_functor(pattern.functor()) {
            try_symbol(sym, count, reserved);
        }
    }

    /// Grounds every pattern of the rule. `None` when some variable is
    /// unbound or an arithmetic term goes negative.
    pub fn ground(&self, bindings: &Bindings) -> Option<GroundRule> {
        let build = |pats: &[Pattern]| -> Option<Multiset> {
            pats.iter().map(|p| p.ground(bindings)).collect()
        };
        Some(GroundRule {
            consumed: build(&self.consumed)?,
            produced: build(&self.produced)?,
            broadcast: build(&self.broadcast)?,
            promoters: build(&self.promoters)?,
        })
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |pats: &[Pattern]| {
            pats.iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        write!(f, "[{}] {}", self.label, self.current)?;
        if !self.consumed.is_empty() {
            write!(f, " {}", join(&self.consumed))?;
        }
        write!(f, " →{} {}", self.mode, self.target)?;
        if !self.produced.is_empty() {
            write!(f, " {}", join(&self.produced))?;
        }
        if !self.broadcast.is_empty() {
            write!(f, " ({})↓", join(&self.broadcast))?;
        }
        if !self.promoters.is_empty() {
            write!(f, " | {}", join(&self.promoters))?;
        }
        Ok(())
    }
}

/// A linearly ordered rule set; a rule's index is its priority (lower index
/// wins).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    rules: Vec<Rule>,
}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Result<Self, RuleError> {
        for r in &rules {
            r.validate()?;
        }
        Ok(Program { rules })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn find(&self, label: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.label == label)
    }

    /// Rules whose current state is `state`, with their priorities.
    pub fn rules_for<'a>(
        &'a self,
        state: &'a StateId,
    ) -> impl Iterator<Item = (usize, &'a Rule)> + 'a {
        self.rules
            .iter()
            .enumerate()
            .filter(move |(_, r)| &r.current == state)
    }

    pub fn states(&self) -> BTreeSet<StateId> {
        self.rules
            .iter()
            .flat_map(|r| [r.current.clone(), r.target.clone()])
            .collect()
    }
}
