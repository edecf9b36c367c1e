//! Context-free grammars, the line-oriented grammar text format, and Weak
//! Chomsky Normal Form.

mod parse;
mod presets;
mod symbol;
mod wcnf;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

pub use parse::parse_grammar;
pub use presets::{preset, Preset};
pub use symbol::{IndexTag, Symbol, SymbolKind};
pub use wcnf::{
    load_wcnf, to_wcnf, validate_wcnf, BinaryRule, NontermId, Violation, ViolationKind, WcnfError,
    WcnfGrammar,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrammarError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("undeclared symbol `{symbol}`")]
    UndeclaredSymbol { symbol: String },
    #[error("grammar uses more than one index variable (`{first}` and `{second}`)")]
    MultipleIndexVariables { first: String, second: String },
    #[error("`{symbol}` and its overbar counterpart are declared with different kinds")]
    BarCollision { symbol: String },
    #[error("grammar has no productions")]
    Empty,
    #[error("unknown grammar preset `{0}`")]
    UnknownPreset(String),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Production {
    pub lhs: Symbol,
    /// Empty for an epsilon production.
    pub rhs: Vec<Symbol>,
}

impl Production {
    pub fn new(lhs: Symbol, rhs: Vec<Symbol>) -> Self {
        let rhs = rhs.into_iter().filter(|s| !s.is_epsilon()).collect();
        Production { lhs, rhs }
    }

    /// True when some symbol of the production carries the index variable.
    pub fn is_indexed(&self) -> bool {
        self.lhs.is_family() || self.rhs.iter().any(Symbol::is_family)
    }
}

impl fmt::Display for Production {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ->", self.lhs)?;
        if self.rhs.is_empty() {
            return f.write_str(" eps");
        }
        for s in &self.rhs {
            write!(f, " {}", s)?;
        }
        Ok(())
    }
}

/// A context-free grammar `(N, Σ, P, S)`.
///
/// Non-terminals are ordered by first appearance as a left-hand side and
/// terminals by first appearance in a right-hand side, so that building the
/// same productions always yields the same grammar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cfg {
    nonterminals: Vec<Symbol>,
    terminals: Vec<Symbol>,
    productions: Vec<Production>,
    start: Symbol,
}

impl Cfg {
    /// Builds a grammar from its productions. `start` defaults to the
    /// left-hand side of the first production.
    pub fn new(productions: Vec<Production>, start: Option<Symbol>) -> Result<Self, GrammarError> {
        if productions.is_empty() {
            return Err(GrammarError::Empty);
        }
        let mut nonterminals: Vec<Symbol> = Vec::new();
        let mut declared = BTreeSet::new();
        for p in &productions {
            if !p.lhs.is_nonterminal() {
                return Err(GrammarError::UndeclaredSymbol { symbol: p.lhs.to_string() });
            }
            if declared.insert(p.lhs.clone()) {
                nonterminals.push(p.lhs.clone());
            }
        }
        let mut terminals: Vec<Symbol> = Vec::new();
        let mut seen_terminals = BTreeSet::new();
        for s in productions.iter().flat_map(|p| p.rhs.iter()) {
            match s.kind() {
                SymbolKind::Nonterminal if !declared.contains(s) => {
                    return Err(GrammarError::UndeclaredSymbol { symbol: s.to_string() });
                }
                SymbolKind::Terminal => {
                    if seen_terminals.insert(s.clone()) {
                        terminals.push(s.clone());
                    }
                }
                _ => {}
            }
        }
        let start = start.unwrap_or_else(|| productions[0].lhs.clone());
        if !declared.contains(&start) {
            return Err(GrammarError::UndeclaredSymbol { symbol: start.to_string() });
        }

        let mut var: Option<&str> = None;
        for s in nonterminals.iter().chain(terminals.iter()) {
            if let Some(v) = s.index_var() {
                match var {
                    None => var = Some(v),
                    Some(first) if first != v => {
                        return Err(GrammarError::MultipleIndexVariables {
                            first: first.to_string(),
                            second: v.to_string(),
                        })
                    }
                    _ => {}
                }
            }
        }

        let kinds: BTreeMap<(&str, bool), SymbolKind> = nonterminals
            .iter()
            .chain(terminals.iter())
            .map(|s| ((s.base(), s.is_family()), s.kind()))
            .collect();
        for (&(base, family), kind) in &kinds {
            if let Some(stem) = base.strip_suffix("_bar") {
                if let Some(other) = kinds.get(&(stem, family)) {
                    if other != kind {
                        return Err(GrammarError::BarCollision { symbol: base.to_string() });
                    }
                }
            }
        }

        Ok(Cfg { nonterminals, terminals, productions, start })
    }

    pub fn nonterminals(&self) -> &[Symbol] {
        &self.nonterminals
    }

    pub fn terminals(&self) -> &[Symbol] {
        &self.terminals
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn start(&self) -> &Symbol {
        &self.start
    }

    /// The single index variable used by the grammar, if any.
    pub fn index_var(&self) -> Option<&str> {
        self.nonterminals.iter().chain(self.terminals.iter()).find_map(Symbol::index_var)
    }
}

/// Serializes in the grammar text format; consecutive productions with the
/// same left-hand side share a line.
impl fmt::Display for Cfg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "start: {}", self.start)?;
        let mut i = 0;
        while i < self.productions.len() {
            let lhs = &self.productions[i].lhs;
            write!(f, "{} ->", lhs)?;
            let mut first = true;
            while i < self.productions.len() && &self.productions[i].lhs == lhs {
                if !first {
                    f.write_str(" |")?;
                }
                first = false;
                let p = &self.productions[i];
                if p.rhs.is_empty() {
                    f.write_str(" eps")?;
                }
                for s in &p.rhs {
                    write!(f, " {}", s)?;
                }
                i += 1;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
