//! Patterns over symbols with free variables and small arithmetic terms.

use std::fmt;
use std::sync::Arc;

use crate::symbol::{Arg, Symbol};

/// A free variable of a generic rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub &'static str);

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

/// One argument position of a pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatArg {
    Lit(Arg),
    Var(Var),
    /// `k + offset` over non-negative integers (`k+1`, `k-1`).
    Offset(Var, i64),
    /// `k + l` where `l` is existentially bound with `l >= 1`: matches any
    /// integer strictly above the value of `k`.
    Above(Var, Var),
}

/// A symbol template: functor plus pattern arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    functor: Arc<str>,
    args: Vec<PatArg>,
}

/// A consistent partial assignment of variables to arguments.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bindings(Vec<(Var, Arg)>);

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: Var) -> Option<&Arg> {
        self.0.iter().find(|(v, _)| *v == var).map(|(_, a)| a)
    }

    /// Binds `var`, or checks the existing binding agrees. Returns false on
    /// conflict.
    pub fn bind(&mut self, var: Var, value: Arg) -> bool {
        match self.get(var) {
            Some(existing) => *existing == value,
            None => {
                self.0.push((var, value));
                true
            }
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Var, Arg)> {
        self.0.iter()
    }

    /// Canonical form, sorted by variable name.
    pub fn normalized(mut self) -> Self {
        self.0.sort();
        self
    }
}

impl<const N: usize> From<[(Var, Arg); N]> for Bindings {
    fn from(v: [(Var, Arg); N]) -> Self {
        v.into_iter().collect()
    }
}

/// Later conflicting pairs are dropped.
impl FromIterator<(Var, Arg)> for Bindings {
    fn from_iter<I: IntoIterator<Item = (Var, Arg)>>(iter: I) -> Self {
        let mut b = Bindings::new();
        for (var, a) in iter {
            b.bind(var, a);
        }
        b
    }
}

fn shift(value: u32, offset: i64) -> Option<u32> {
    u32::try_from(value as i64 + offset).ok()
}

impl Pattern {
    pub fn new(functor: impl Into<Arc<str>>, args: Vec<PatArg>) -> Self {
        Pattern {
            functor: functor.into(),
            args,
        }
    }

    pub fn atom(functor: impl Into<Arc<str>>) -> Self {
        Pattern::new(functor, Vec::new())
    }

    pub fn functor(&self) -> &Arc<str> {
        &self.functor
    }

    pub fn args(&self) -> &[PatArg] {
        &self.args
    }

    /// Variables occurring in the pattern.
    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.args.iter().flat_map(|a| match a {
            PatArg::Lit(_) => vec![],
            PatArg::Var(v) | PatArg::Offset(v, _) => vec![*v],
            PatArg::Above(k, l) => vec![*k, *l],
        })
    }

    /// Unifies the pattern with a ground symbol, extending `bindings`.
    ///
    /// Arithmetic positions only match integers. `Above(k, l)` needs `k` or
    /// `l` bound beforehand; when both are free the match fails.
    pub fn matches(&self, symbol: &Symbol, bindings: &Bindings) -> Option<Bindings> {
        if *self.functor != *symbol.functor() || self.args.len() != symbol.arity() {
            return None;
        }
        let mut out = bindings.clone();
        for (pat, arg) in self.args.iter().zip(symbol.args()) {
            match pat {
                PatArg::Lit(lit) => {
                    if lit != arg {
                        return None;
                    }
                }
                PatArg::Var(v) => {
                    if !out.bind(*v, arg.clone()) {
                        return None;
                    }
                }
                PatArg::Offset(v, off) => {
                    let k = shift(arg.as_int()?, -off)?;
                    if !out.bind(*v, Arg::Int(k)) {
                        return None;
                    }
                }
                PatArg::Above(k, l) => {
                    let value = arg.as_int()?;
                    match (out.get(*k).cloned(), out.get(*l).cloned()) {
                        (Some(kv), _) => {
                            let kv = kv.as_int()?;
                            if value <= kv || !out.bind(*l, Arg::Int(value - kv)) {
                                return None;
                            }
                        }
                        (None, Some(lv)) => {
                            let lv = lv.as_int()?;
                            if lv == 0 || value < lv {
                                return None;
                            }
                            out.bind(*k, Arg::Int(value - lv));
                        }
                        (None, None) => return None,
                    }
                }
            }
        }
        Some(out)
    }

    /// Builds the ground symbol under `bindings`. Returns `None` if a
    /// variable is unbound or an arithmetic term leaves the non-negative
    /// integers.
    pub fn ground(&self, bindings: &Bindings) -> Option<Symbol> {
        let mut args = Vec::with_capacity(self.args.len());
        for pat in &self.args {
            let a = match pat {
                PatArg::Lit(lit) => lit.clone(),
                PatArg::Var(v) => bindings.get(*v)?.clone(),
                PatArg::Offset(v, off) => Arg::Int(shift(bindings.get(*v)?.as_int()?, *off)?),
                PatArg::Above(k, l) => {
                    let kv = bindings.get(*k)?.as_int()?;
                    let lv = bindings.get(*l)?.as_int()?;
                    if lv == 0 {
                        return None;
                    }
                    Arg::Int(kv.checked_add(lv)?)
                }
            };
            args.push(a);
        }
        Some(Symbol::new(self.functor.clone(), args))
    }

    /// True when the pattern has no variables at all.
    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|a| matches!(a, PatArg::Lit(_)))
    }
}

impl fmt::Display for PatArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatArg::Lit(a) => write!(f, "{a}"),
            PatArg::Var(v) => write!(f, "{v}"),
            PatArg::Offset(v, off) if *off >= 0 => write!(f, "{v}+{off}"),
            PatArg::Offset(v, off) => write!(f, "{v}{off}"),
            PatArg::Above(k, l) => write!(f, "{k}+{l}"),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.functor)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Shorthand constructors used when writing rule programs.
pub mod dsl {
    use super::*;
    use crate::symbol::CellId;

    pub fn var(name: &'static str) -> PatArg {
        PatArg::Var(Var(name))
    }

    pub fn plus(name: &'static str, offset: i64) -> PatArg {
        PatArg::Offset(Var(name), offset)
    }

    pub fn above(k: &'static str, l: &'static str) -> PatArg {
        PatArg::Above(Var(k), Var(l))
    }

    pub fn int(v: u32) -> PatArg {
        PatArg::Lit(Arg::Int(v))
    }

    pub fn cell(c: u32) -> PatArg {
        PatArg::Lit(Arg::Cell(CellId(c)))
    }

    pub fn pat(functor: &'static str, args: impl IntoIterator<Item = PatArg>) -> Pattern {
        Pattern::new(functor, args.into_iter().collect())
    }

    pub fn atom(functor: &'static str) -> Pattern {
        Pattern::atom(functor)
    }
}
