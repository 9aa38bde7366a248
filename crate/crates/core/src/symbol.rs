//! Symbols: elementary atoms and compound terms carried in cell contents.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ParseError;

/// Identifier of a cell (a node of the structural digraph).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CellId(pub u32);

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One argument of a compound symbol.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Arg {
    Int(u32),
    Cell(CellId),
    Sym(Symbol),
}

impl Arg {
    pub fn as_int(&self) -> Option<u32> {
        match self {
            Arg::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_cell(&self) -> Option<CellId> {
        match self {
            Arg::Cell(c) => Some(*c),
            _ => None,
        }
    }
}

impl From<u32> for Arg {
    fn from(v: u32) -> Self {
        Arg::Int(v)
    }
}

impl From<CellId> for Arg {
    fn from(c: CellId) -> Self {
        Arg::Cell(c)
    }
}

impl From<Symbol> for Arg {
    fn from(s: Symbol) -> Self {
        Arg::Sym(s)
    }
}

/// An immutable symbol: a functor name plus an ordered, possibly empty,
/// argument list. Equality and ordering are structural.
///
/// Ordering compares the functor first, so all symbols sharing a functor form
/// a contiguous range inside an ordered multiset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    functor: Arc<str>,
    args: Arc<[Arg]>,
}

impl Symbol {
    pub fn new(functor: impl Into<Arc<str>>, args: Vec<Arg>) -> Self {
        Symbol {
            functor: functor.into(),
            args: args.into(),
        }
    }

    pub fn atom(functor: impl Into<Arc<str>>) -> Self {
        Symbol::new(functor, Vec::new())
    }

    pub fn functor(&self) -> &str {
        &self.functor
    }

    pub fn args(&self) -> &[Arg] {
        &self.args
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_elementary(&self) -> bool {
        self.args.is_empty()
    }

    /// Smallest symbol with this functor under the structural order.
    pub(crate) fn lower_bound(functor: &Arc<str>) -> Self {
        Symbol {
            functor: functor.clone(),
            args: Arc::from(Vec::new()),
        }
    }
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Int(v) => write!(f, "{v}"),
            Arg::Cell(c) => write!(f, "#{c}"),
            Arg::Sym(s) => write!(f, "{s}"),
        }
    }
}

/// Text form: `name` for elementary symbols, `name(arg,...)` otherwise.
/// Integers print bare, cell ids with a leading `#`.
impl fmt::Display for Symbol {
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

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError::Symbol {
            input: self.src.to_string(),
            message: format!("{msg} at offset {}", self.pos),
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn expect(&mut self, ch: char) -> Result<(), ParseError> {
        if self.peek() == Some(ch) {
            self.pos += ch.len_utf8();
            Ok(())
        } else {
            Err(self.err(&format!("expected '{ch}'")))
        }
    }

    fn number(&mut self) -> Result<u32, ParseError> {
        let digits = self.take_while(|c| c.is_ascii_digit());
        digits.parse().map_err(|_| self.err("expected number"))
    }

    fn symbol(&mut self) -> Result<Symbol, ParseError> {
        let name = self.take_while(|c| c.is_alphanumeric() || c == '_');
        if name.is_empty() || name.chars().next().is_some_and(|c| c.is_ascii_digit()) {
            return Err(self.err("expected functor name"));
        }
        let mut args = Vec::new();
        if self.peek() == Some('(') {
            self.pos += 1;
            loop {
                args.push(self.arg()?);
                match self.peek() {
                    Some(',') => self.pos += 1,
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.err("expected ',' or ')'")),
                }
            }
        }
        Ok(Symbol::new(name, args))
    }

    fn arg(&mut self) -> Result<Arg, ParseError> {
        match self.peek() {
            Some('#') => {
                self.expect('#')?;
                Ok(Arg::Cell(CellId(self.number()?)))
            }
            Some(c) if c.is_ascii_digit() => Ok(Arg::Int(self.number()?)),
            Some(_) => Ok(Arg::Sym(self.symbol()?)),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

impl FromStr for Symbol {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { src: s, pos: 0 };
        let sym = p.symbol()?;
        if p.pos != s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(sym)
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
