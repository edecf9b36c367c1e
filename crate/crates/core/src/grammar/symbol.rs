use alloc::string::String;
use core::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Terminal,
    Nonterminal,
    Epsilon,
}

/// Index attached to a symbol.
///
/// Grammar symbols carry the index *variable* (`load_[i]`); graph labels and
/// expanded per-index symbols carry a concrete index *value* (`load_f12`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IndexTag {
    Var(String),
    Value(String),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    kind: SymbolKind,
    base: String,
    index: Option<IndexTag>,
}

impl Symbol {
    pub fn terminal(base: impl Into<String>) -> Self {
        Symbol { kind: SymbolKind::Terminal, base: base.into(), index: None }
    }

    pub fn nonterminal(base: impl Into<String>) -> Self {
        Symbol { kind: SymbolKind::Nonterminal, base: base.into(), index: None }
    }

    pub fn epsilon() -> Self {
        Symbol { kind: SymbolKind::Epsilon, base: String::new(), index: None }
    }

    /// Attaches an index variable. Epsilon never carries an index.
    pub fn with_var(mut self, var: impl Into<String>) -> Self {
        if self.kind != SymbolKind::Epsilon {
            self.index = Some(IndexTag::Var(var.into()));
        }
        self
    }

    pub fn with_value(mut self, value: impl Into<String>) -> Self {
        if self.kind != SymbolKind::Epsilon {
            self.index = Some(IndexTag::Value(value.into()));
        }
        self
    }

    /// Same symbol with the index removed.
    pub fn unindexed(&self) -> Self {
        Symbol { kind: self.kind, base: self.base.clone(), index: None }
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn index(&self) -> Option<&IndexTag> {
        self.index.as_ref()
    }

    pub fn is_terminal(&self) -> bool {
        self.kind == SymbolKind::Terminal
    }

    pub fn is_nonterminal(&self) -> bool {
        self.kind == SymbolKind::Nonterminal
    }

    pub fn is_epsilon(&self) -> bool {
        self.kind == SymbolKind::Epsilon
    }

    /// True for symbols parameterized by the grammar's index variable.
    pub fn is_family(&self) -> bool {
        matches!(self.index, Some(IndexTag::Var(_)))
    }

    pub fn index_var(&self) -> Option<&str> {
        match &self.index {
            Some(IndexTag::Var(v)) => Some(v),
            _ => None,
        }
    }

    pub fn index_value(&self) -> Option<&str> {
        match &self.index {
            Some(IndexTag::Value(v)) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kind == SymbolKind::Epsilon {
            return f.write_str("eps");
        }
        match &self.index {
            None => f.write_str(&self.base),
            Some(IndexTag::Var(v)) => write!(f, "{}_[{}]", self.base, v),
            Some(IndexTag::Value(v)) => write!(f, "{}_{}", self.base, v),
        }
    }
}
