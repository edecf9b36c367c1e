//! Brute-force CFL-r by worklist closure, one fact at a time.
//!
//! Used only to check the matrix solver, so it deliberately avoids the
//! sparse and semiring modules: indexed families are expanded into one
//! concrete non-terminal per index value up front.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::grammar::{Symbol, WcnfGrammar};
use crate::graph::LabeledGraph;

/// `source` reaches `target` along a path derived from `nonterminal`.
/// Family members carry their index value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReachTriple {
    pub nonterminal: Symbol,
    pub source: usize,
    pub target: usize,
}

/// Concrete instances of a grammar symbol: itself, or one per index value.
fn instances(s: &Symbol, universe: &[alloc::string::String], value: Option<&str>) -> Vec<Symbol> {
    if !s.is_family() {
        return vec![s.clone()];
    }
    match value {
        Some(v) => vec![s.unindexed().with_value(v)],
        None => universe.iter().map(|v| s.unindexed().with_value(v.clone())).collect(),
    }
}

pub fn oracle_solve(graph: &LabeledGraph, g: &WcnfGrammar) -> BTreeSet<ReachTriple> {
    let n = graph.vertex_count();
    let universe = graph.index_universe();

    let mut names: Vec<Symbol> = Vec::new();
    let mut ids: BTreeMap<Symbol, usize> = BTreeMap::new();
    let mut id_of = |s: Symbol| -> usize {
        *ids.entry(s.clone()).or_insert_with(|| {
            names.push(s);
            names.len() - 1
        })
    };

    // concrete binary rules, keyed both ways
    let mut rules: Vec<(usize, usize, usize)> = Vec::new();
    for r in g.binary_rules() {
        let (c, a, b) = (g.nonterminal(r.lhs), g.nonterminal(r.left), g.nonterminal(r.right));
        if c.is_family() || a.is_family() || b.is_family() {
            for v in universe {
                let one = |s: &Symbol| instances(s, universe, Some(v)).remove(0);
                rules.push((id_of(one(c)), id_of(one(a)), id_of(one(b))));
            }
        } else {
            rules.push((id_of(c.clone()), id_of(a.clone()), id_of(b.clone())));
        }
    }

    let mut seeds: Vec<(usize, usize, usize)> = Vec::new();
    for (key, lhs) in g.terminal_rules() {
        for &x in lhs {
            let x = g.nonterminal(x);
            if key.is_epsilon() {
                for s in instances(x, universe, None) {
                    let id = id_of(s);
                    seeds.extend((0..n).map(|v| (id, v, v)));
                }
                continue;
            }
            for e in graph.edges() {
                let value = if key.is_family() {
                    match e.label.index_value() {
                        Some(v) if e.label.base() == key.base() && e.label.kind() == key.kind() => Some(v),
                        _ => continue,
                    }
                } else if &e.label == key {
                    None
                } else {
                    continue;
                };
                for s in instances(x, universe, value) {
                    seeds.push((id_of(s), e.source, e.target));
                }
            }
        }
    }

    let count = names.len();
    let mut by_left: Vec<Vec<(usize, usize)>> = vec![Vec::new(); count];
    let mut by_right: Vec<Vec<(usize, usize)>> = vec![Vec::new(); count];
    for &(c, a, b) in &rules {
        by_left[a].push((c, b));
        by_right[b].push((c, a));
    }

    let mut present = vec![false; count * n * n];
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); count * n];
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); count * n];
    let mut work: Vec<(usize, usize, usize)> = Vec::new();
    let mut add = |x: usize, i: usize, j: usize, work: &mut Vec<_>, outgoing: &mut Vec<Vec<usize>>, incoming: &mut Vec<Vec<usize>>| {
        let slot = (x * n + i) * n + j;
        if !present[slot] {
            present[slot] = true;
            outgoing[x * n + i].push(j);
            incoming[x * n + j].push(i);
            work.push((x, i, j));
        }
    };
    for (x, i, j) in seeds {
        add(x, i, j, &mut work, &mut outgoing, &mut incoming);
    }
    while let Some((x, i, j)) = work.pop() {
        // (x, i, j) as the left operand: c -> x b with (b, j, k)
        for &(c, b) in &by_left[x] {
            let targets = outgoing[b * n + j].clone();
            for k in targets {
                add(c, i, k, &mut work, &mut outgoing, &mut incoming);
            }
        }
        // as the right operand: c -> a x with (a, h, i)
        for &(c, a) in &by_right[x] {
            let sources = incoming[a * n + i].clone();
            for h in sources {
                add(c, h, j, &mut work, &mut outgoing, &mut incoming);
            }
        }
    }

    let mut out = BTreeSet::new();
    for x in 0..count {
        for i in 0..n {
            for &j in &outgoing[x * n + i] {
                out.insert(ReachTriple { nonterminal: names[x].clone(), source: i, target: j });
            }
        }
    }
    out
}
