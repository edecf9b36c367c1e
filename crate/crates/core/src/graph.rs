//! Edge-labeled directed graphs in the triple text format (`<u> <label> <v>`
//! per line, `#` comment lines skipped).
//!
//! Labels are resolved against a grammar: a label equal to a terminal of the
//! grammar is that terminal; otherwise, if it starts with `base_` for some
//! indexed terminal `base_[i]`, the longest such base wins and the remainder
//! is the index value. Any other label is kept as an opaque terminal.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use crate::grammar::{Symbol, WcnfGrammar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("line {line}: expected `<source> <label> <target>`")]
    MalformedLine { line: usize },
    #[error("line {line}: label `{label}` is indexed in the grammar but carries no index")]
    MissingIndex { line: usize, label: String },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub source: usize,
    pub label: Symbol,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    vertex_names: Vec<String>,
    edges: Vec<Edge>,
    index_universe: Vec<String>,
    label_index: BTreeMap<Symbol, Vec<usize>>,
}

/// Label resolution derived from a grammar's terminals.
struct LabelResolver {
    plain: BTreeSet<String>,
    /// Indexed bases, longest first.
    indexed: Vec<String>,
}

impl LabelResolver {
    fn new(g: &WcnfGrammar) -> Self {
        let plain = g.terminals().iter().filter(|t| t.index().is_none()).map(|t| t.base().to_string()).collect();
        let mut indexed: Vec<String> =
            g.terminals().iter().filter(|t| t.is_family()).map(|t| t.base().to_string()).collect();
        indexed.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        indexed.dedup();
        LabelResolver { plain, indexed }
    }

    fn resolve(&self, label: &str, line: usize) -> Result<Symbol, GraphError> {
        if self.plain.contains(label) {
            return Ok(Symbol::terminal(label));
        }
        for base in &self.indexed {
            if let Some(rest) = label.strip_prefix(base.as_str()) {
                match rest.strip_prefix('_') {
                    Some(index) if !index.is_empty() => {
                        return Ok(Symbol::terminal(base.clone()).with_value(index));
                    }
                    _ if rest.is_empty() || rest == "_" => {
                        return Err(GraphError::MissingIndex { line, label: label.to_string() });
                    }
                    _ => {}
                }
            }
        }
        Ok(Symbol::terminal(label))
    }
}

/// Incremental construction of a [`LabeledGraph`]. Exact duplicate edges are
/// dropped.
#[derive(Default)]
pub struct GraphBuilder {
    vertex_ids: BTreeMap<String, usize>,
    vertex_names: Vec<String>,
    edges: Vec<Edge>,
    seen: BTreeSet<Edge>,
    universe: Vec<String>,
    universe_set: BTreeSet<String>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, name: &str) -> usize {
        if let Some(&id) = self.vertex_ids.get(name) {
            return id;
        }
        let id = self.vertex_names.len();
        self.vertex_ids.insert(name.to_string(), id);
        self.vertex_names.push(name.to_string());
        id
    }

    /// Declares vertices `0..n` (named by their id) so that isolated
    /// vertices count.
    pub fn with_vertices(mut self, n: usize) -> Self {
        for v in 0..n {
            self.vertex(&format!("{v}"));
        }
        self
    }

    pub fn edge(&mut self, source: &str, label: Symbol, target: &str) -> &mut Self {
        let source = self.vertex(source);
        let target = self.vertex(target);
        if let Some(v) = label.index_value() {
            if self.universe_set.insert(v.to_string()) {
                self.universe.push(v.to_string());
            }
        }
        let e = Edge { source, label, target };
        if self.seen.insert(e.clone()) {
            self.edges.push(e);
        }
        self
    }

    pub fn build(self) -> LabeledGraph {
        let mut label_index: BTreeMap<Symbol, Vec<usize>> = BTreeMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            label_index.entry(e.label.clone()).or_default().push(i);
        }
        LabeledGraph {
            vertex_names: self.vertex_names,
            edges: self.edges,
            index_universe: self.universe,
            label_index,
        }
    }
}

impl LabeledGraph {
    /// Parses triple text, resolving labels against `g`.
    pub fn parse(text: &str, g: &WcnfGrammar) -> Result<Self, GraphError> {
        let resolver = LabelResolver::new(g);
        let mut b = GraphBuilder::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(u), Some(label), Some(v), None) = (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(GraphError::MalformedLine { line: line_no });
            };
            let label = resolver.resolve(label, line_no)?;
            b.edge(u, label, v);
        }
        Ok(b.build())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn vertex_name(&self, id: usize) -> &str {
        &self.vertex_names[id]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Index values in order of first appearance; position = block slot.
    pub fn index_universe(&self) -> &[String] {
        &self.index_universe
    }

    pub fn index_slot(&self, value: &str) -> Option<usize> {
        self.index_universe.iter().position(|v| v == value)
    }

    pub fn label_index(&self) -> &BTreeMap<Symbol, Vec<usize>> {
        &self.label_index
    }

    /// Serializes with interned integer vertex ids.
    pub fn to_triples(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {}", e.source, e.label, e.target);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{parse_grammar, preset, to_wcnf, validate_wcnf};
    use alloc::vec;

    fn plain_grammar() -> WcnfGrammar {
        to_wcnf(&parse_grammar("S -> a S b | a b").unwrap())
    }

    #[test]
    fn loads_plain_graph() {
        let g = LabeledGraph::parse("0 a 1\n1 b 2\n", &plain_grammar()).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges().len(), 2);
        assert!(g.index_universe().is_empty());
    }

    #[test]
    fn splits_indexed_labels() {
        let w = validate_wcnf(&preset("cscvf-wcnf").unwrap()).unwrap();
        let g = LabeledGraph::parse("0 call_f1 1\n1 ret_f1 2\n", &w).unwrap();
        assert_eq!(g.index_universe(), &["f1".to_string()]);
        assert_eq!(g.edges()[0].label, Symbol::terminal("call").with_value("f1"));
        assert_eq!(g.edges()[1].label, Symbol::terminal("ret").with_value("f1"));
    }

    #[test]
    fn longest_indexed_base_wins() {
        let w = validate_wcnf(&preset("fsjpt-opt").unwrap()).unwrap();
        let g = LabeledGraph::parse("0 store_bar_x 1\n1 store_y 2\n2 alloc_bar 3\n", &w).unwrap();
        assert_eq!(g.edges()[0].label, Symbol::terminal("store_bar").with_value("x"));
        assert_eq!(g.edges()[1].label, Symbol::terminal("store").with_value("y"));
        assert_eq!(g.edges()[2].label, Symbol::terminal("alloc_bar"));
        assert_eq!(g.index_universe(), &["x".to_string(), "y".to_string()]);
    }

    #[test]
    fn index_universe_counts_distinct_suffixes() {
        let w = validate_wcnf(&preset("fsjpt-opt").unwrap()).unwrap();
        let text = "0 load_f1 1\n1 load_f2 2\n2 load_f1 3\n3 load_g 4\n# c\n4 assign 5\n";
        let g = LabeledGraph::parse(text, &w).unwrap();
        // independent scan of suffixes
        let suffixes: BTreeSet<&str> = text
            .lines()
            .filter_map(|l| l.split_whitespace().nth(1))
            .filter_map(|l| l.strip_prefix("load_"))
            .collect();
        assert_eq!(g.index_universe().len(), suffixes.len());
    }

    #[test]
    fn missing_index_is_an_error() {
        let w = validate_wcnf(&preset("cscvf-wcnf").unwrap()).unwrap();
        let err = LabeledGraph::parse("0 a 1\n1 call 2\n", &w).unwrap_err();
        assert_eq!(err, GraphError::MissingIndex { line: 2, label: "call".into() });
        assert!(LabeledGraph::parse("0 call_ 2\n", &w).is_err());
    }

    #[test]
    fn malformed_lines() {
        let w = plain_grammar();
        assert_eq!(
            LabeledGraph::parse("0 a 1\n0 a\n", &w).unwrap_err(),
            GraphError::MalformedLine { line: 2 }
        );
        assert!(LabeledGraph::parse("0 a 1 2\n", &w).is_err());
    }

    #[test]
    fn string_vertices_and_duplicates() {
        let w = plain_grammar();
        let g = LabeledGraph::parse("x a y\nx a y\ny y y\n\n", &w).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edges().len(), 2);
        assert_eq!(g.vertex_name(1), "y");
        assert_eq!(g.label_index()[&Symbol::terminal("y")], vec![1]);
    }

    #[test]
    fn serialization_round_trips() {
        let w = validate_wcnf(&preset("cscvf-wcnf").unwrap()).unwrap();
        let g = LabeledGraph::parse("p call_7 q\nq a r\nr ret_7 p\nq ret_8 q\n", &w).unwrap();
        let again = LabeledGraph::parse(&g.to_triples(), &w).unwrap();
        assert_eq!(again.edges(), g.edges());
        assert_eq!(again.index_universe(), g.index_universe());
        assert_eq!(again.vertex_count(), g.vertex_count());
    }
}
