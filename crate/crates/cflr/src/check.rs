//! Compares solver variants against the worklist oracle.

use std::collections::BTreeSet;
use std::fmt;

use cflr_core::oracle::{oracle_solve, ReachTriple};
use cflr_core::solver::{SolveError, VariantFlags};
use cflr_core::{LabeledGraph, NontermMatrix, WcnfGrammar};

/// The solver under test; swapped for a faulty one in tests.
pub type SolverFn<'a> = dyn Fn(&LabeledGraph, &WcnfGrammar, &VariantFlags) -> Result<NontermMatrix, SolveError> + 'a;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Divergence {
    pub variant: String,
    pub triple: ReachTriple,
    pub in_oracle: bool,
    /// Readable vertex names of `triple`.
    pub source_name: String,
    pub target_name: String,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (o, v) = if self.in_oracle { ("present", "absent") } else { ("absent", "present") };
        write!(
            f,
            "{} ({}, {}): {o} in oracle, {v} in {}",
            self.triple.nonterminal, self.source_name, self.target_name, self.variant
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    Agree { triples: usize },
    Diverge(Divergence),
}

/// Runs the oracle and every variant; reports the smallest differing triple
/// of the first variant that disagrees.
pub fn check_variants(
    graph: &LabeledGraph,
    g: &WcnfGrammar,
    variants: &[(String, VariantFlags)],
    solver: &SolverFn<'_>,
) -> Result<CheckOutcome, SolveError> {
    let expect = oracle_solve(graph, g);
    for (name, flags) in variants {
        let got: BTreeSet<ReachTriple> = solver(graph, g, flags)?.triples(g, graph.index_universe());
        let first = expect.symmetric_difference(&got).next();
        if let Some(t) = first {
            return Ok(CheckOutcome::Diverge(Divergence {
                variant: name.clone(),
                triple: t.clone(),
                in_oracle: expect.contains(t),
                source_name: graph.vertex_name(t.source).to_string(),
                target_name: graph.vertex_name(t.target).to_string(),
            }));
        }
    }
    Ok(CheckOutcome::Agree { triples: expect.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use cflr_core::grammar::{load_wcnf, preset};
    use cflr_core::solver::solve;

    #[test]
    fn faulty_solver_is_caught() {
        let g = load_wcnf(&preset("dyck").unwrap());
        let graph = LabeledGraph::parse("0 a 1\n1 b 2\n", &g).unwrap();
        let variants = vec![("ma1".to_string(), VariantFlags::ma1())];
        assert_eq!(check_variants(&graph, &g, &variants, &solve).unwrap(), CheckOutcome::Agree { triples: 3 });
        let empty = |graph: &LabeledGraph, g: &WcnfGrammar, _: &VariantFlags| {
            Ok(NontermMatrix::zeros(g, graph.vertex_count(), graph.index_universe().len()))
        };
        let CheckOutcome::Diverge(d) = check_variants(&graph, &g, &variants, &empty).unwrap() else { panic!() };
        assert!(d.in_oracle);
        assert_eq!(d.to_string(), "S (0, 2): present in oracle, absent in ma1");
    }
}
