//! The fixpoint loop.
//!
//! The baseline repeats `M ← M ∪ M·M` until `M` stops changing. With delta
//! iteration each round only computes `C = (M_old · ΔM) ∪ (ΔM · M)` and the
//! next delta is `C \ M`; `M_old · M_old` was already added one round
//! earlier.
//!
//! Accumulated matrices live in *stores*, one per (non-terminal, operand
//! view, layout) actually read by some rule. With dual format the left
//! operand stores are column-major so that the delta, on the right, drives
//! the product column by column; right operand stores stay row-major and
//! the delta drives from the left. With lazy union every store is a
//! [`MatrixForest`].

mod flags;
mod forest;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

pub use flags::{FlagsError, Variant, VariantFlags, DEFAULT_B};
pub use forest::{forest_difference, forest_insert, multiply_with_forest, DeltaSide, MatrixForest};

use crate::exec::{Executor, Sequential};
use crate::grammar::WcnfGrammar;
use crate::graph::LabeledGraph;
use crate::semiring::{NontermMatrix, Plan, View};
use crate::sparse::{convert, difference, spgemm, union, BoolMat, Layout, OpCounter, Orientation, SparseError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Flags(#[from] FlagsError),
    #[error(transparent)]
    Sparse(#[from] SparseError),
    #[error("graph has indexed edges but the grammar has no indexed symbols")]
    IndexMismatch,
    #[error("interrupted after {iterations} iterations")]
    Interrupted { iterations: usize },
}

/// Matrices seen by one iteration, all in canonical form.
#[derive(Clone, Debug)]
pub struct Snapshot {
    /// `M` before this iteration's delta was added.
    pub m_old: NontermMatrix,
    /// The delta multiplied in this iteration. For the baseline: the
    /// entries the iteration adds.
    pub delta: NontermMatrix,
    /// `M_old ∪ ΔM`.
    pub m: NontermMatrix,
    /// The product this iteration computed: `(M_old · ΔM) ∪ (ΔM · M)`, or
    /// `M_old · M_old` for the baseline.
    pub product: NontermMatrix,
}

#[derive(Clone, Debug)]
pub struct IterationInfo<'a> {
    /// 1-based.
    pub iteration: usize,
    /// Counters of this iteration alone.
    pub counters: OpCounter,
    pub snapshot: Option<&'a Snapshot>,
}

/// Observation and cancellation points of a run.
pub trait SolveHooks {
    /// Polled before each iteration.
    fn should_stop(&mut self) -> bool {
        false
    }

    fn wants_snapshots(&self) -> bool {
        false
    }

    fn on_iteration(&mut self, _info: &IterationInfo<'_>) {}
}

pub struct NoHooks;

impl SolveHooks for NoHooks {}

#[derive(Clone, Debug)]
pub struct SolveOutput {
    pub matrix: NontermMatrix,
    pub iterations: usize,
    pub counters: OpCounter,
}

pub fn solve(graph: &LabeledGraph, g: &WcnfGrammar, flags: &VariantFlags) -> Result<NontermMatrix, SolveError> {
    Ok(solve_with(graph, g, flags, &Sequential, &mut NoHooks)?.matrix)
}

pub fn solve_with<E: Executor>(
    graph: &LabeledGraph,
    g: &WcnfGrammar,
    flags: &VariantFlags,
    exec: &E,
    hooks: &mut dyn SolveHooks,
) -> Result<SolveOutput, SolveError> {
    flags.validate()?;
    if !graph.index_universe().is_empty() && g.index_var().is_none() {
        return Err(SolveError::IndexMismatch);
    }
    let plan = Plan::new(g, graph.vertex_count(), graph.index_universe().len(), flags.indexed_blocks);
    let initial = plan.initial(graph, g);
    if flags.delta {
        DeltaRun::new(plan, flags).run(initial, exec, hooks)
    } else {
        baseline(&plan, initial, exec, hooks)
    }
}

fn baseline<E: Executor>(
    plan: &Plan,
    mut m: Vec<BoolMat>,
    exec: &E,
    hooks: &mut dyn SolveHooks,
) -> Result<SolveOutput, SolveError> {
    let mut total = OpCounter::default();
    let mut iterations = 0;
    loop {
        if hooks.should_stop() {
            return Err(SolveError::Interrupted { iterations });
        }
        iterations += 1;
        let products = exec.map(&plan.steps, |step| -> Result<(BoolMat, OpCounter), SparseError> {
            let mut c = OpCounter::default();
            let l = plan.view(step.left.0, &m[step.left.0], step.left.1, Layout::RowMajor)?;
            let r = plan.view(step.right.0, &m[step.right.0], step.right.1, Layout::RowMajor)?;
            let p = plan.output(step, spgemm(&l, &r, Orientation::RowByRow, &mut c)?)?;
            Ok((p, c))
        });
        let mut counter = OpCounter::default();
        let mut product: Vec<BoolMat> = (0..plan.slots.len()).map(|s| plan.canonical_zero(s)).collect();
        for (step, res) in plan.steps.iter().zip(products) {
            let (p, c) = res?;
            counter += c;
            product[step.lhs] = union(&product[step.lhs], &p, &mut counter)?;
        }
        let next = m.iter().zip(&product).map(|(a, p)| union(a, p, &mut counter)).collect::<Result<Vec<_>, _>>()?;
        let before: usize = m.iter().map(BoolMat::nnz).sum();
        let after: usize = next.iter().map(BoolMat::nnz).sum();
        total += counter;
        let snapshot = if hooks.wants_snapshots() {
            let added = next.iter().zip(&m).map(|(n, o)| difference(n, o)).collect::<Result<Vec<_>, _>>()?;
            Some(Snapshot {
                m_old: plan.assemble(m.clone()),
                delta: plan.assemble(added),
                m: plan.assemble(next.clone()),
                product: plan.assemble(product),
            })
        } else {
            None
        };
        hooks.on_iteration(&IterationInfo { iteration: iterations, counters: counter, snapshot: snapshot.as_ref() });
        m = next;
        if after == before {
            break;
        }
    }
    Ok(SolveOutput { matrix: plan.assemble(m), iterations, counters: total })
}

type StoreKey = (usize, View, Layout);

#[derive(Clone, Debug)]
enum Store {
    Single(BoolMat),
    Forest(MatrixForest),
}

impl Store {
    #[cfg(test)]
    fn layout(&self) -> Layout {
        match self {
            Store::Single(m) => m.layout(),
            Store::Forest(f) => f.layout(),
        }
    }

    fn insert(&mut self, d: &BoolMat, counter: &mut OpCounter) -> Result<(), SparseError> {
        match self {
            Store::Single(m) => {
                *m = union(m, &convert(d, m.layout()), counter)?;
                Ok(())
            }
            Store::Forest(f) => forest_insert(f, d, counter),
        }
    }

    fn materialize(&self) -> BoolMat {
        match self {
            Store::Single(m) => m.clone(),
            Store::Forest(f) => f.materialize(),
        }
    }

    fn subtract_from(&self, d: &BoolMat) -> Result<BoolMat, SparseError> {
        match self {
            Store::Single(m) => difference(d, m),
            Store::Forest(f) => forest_difference(d, f),
        }
    }

    /// `d · self` or `self · d` in the orientation of the store layout.
    fn multiply(&self, d: &BoolMat, side: DeltaSide, counter: &mut OpCounter) -> Result<BoolMat, SparseError> {
        match self {
            Store::Single(m) => {
                let orientation = match m.layout() {
                    Layout::RowMajor => Orientation::RowByRow,
                    Layout::ColMajor => Orientation::ColumnByColumn,
                };
                let d = convert(d, m.layout());
                match side {
                    DeltaSide::Left => spgemm(&d, m, orientation, counter),
                    DeltaSide::Right => spgemm(m, &d, orientation, counter),
                }
            }
            Store::Forest(f) => multiply_with_forest(d, f, side, counter),
        }
    }
}

struct DeltaRun {
    plan: Plan,
    keys: Vec<StoreKey>,
    stores: Vec<Store>,
    /// Per slot: the store used for `C \ M` and for reading `M` back.
    primary: Vec<usize>,
    /// Per step: store of the left operand (`M_old · ΔM`) and of the right
    /// operand (`ΔM · M`).
    left_store: Vec<usize>,
    right_store: Vec<usize>,
    left_layout: Layout,
}

impl DeltaRun {
    fn new(plan: Plan, flags: &VariantFlags) -> Self {
        let left_layout = if flags.dual_format { Layout::ColMajor } else { Layout::RowMajor };
        let mut keys: Vec<StoreKey> = Vec::new();
        fn intern(keys: &mut Vec<StoreKey>, key: StoreKey) -> usize {
            keys.iter().position(|&k| k == key).unwrap_or_else(|| {
                keys.push(key);
                keys.len() - 1
            })
        }
        let mut left_store = Vec::new();
        let mut right_store = Vec::new();
        for step in &plan.steps {
            left_store.push(intern(&mut keys, (step.left.0, step.left.1, left_layout)));
            right_store.push(intern(&mut keys, (step.right.0, step.right.1, Layout::RowMajor)));
        }
        let primary = (0..plan.slots.len())
            .map(|s| {
                let canonical = (s, plan.slots[s].canonical_view(), Layout::RowMajor);
                keys.iter()
                    .position(|&k| k == canonical)
                    .or_else(|| keys.iter().position(|&(slot, view, _)| slot == s && view.is_bijective()))
                    .unwrap_or_else(|| intern(&mut keys, canonical))
            })
            .collect();
        let stores = keys
            .iter()
            .map(|&(_, view, layout)| {
                let (rows, cols) = plan.view_shape(view);
                if flags.lazy_union {
                    Store::Forest(MatrixForest::new(rows, cols, layout, flags.b))
                } else {
                    Store::Single(BoolMat::zeros(rows, cols, layout))
                }
            })
            .collect();
        DeltaRun { plan, keys, stores, primary, left_store, right_store, left_layout }
    }

    /// Canonical `M` read back from the primary stores.
    fn current(&self) -> Result<Vec<BoolMat>, SparseError> {
        (0..self.plan.slots.len())
            .map(|s| {
                let p = self.primary[s];
                self.plan.unview(s, &self.stores[p].materialize(), self.keys[p].1)
            })
            .collect()
    }

    fn run<E: Executor>(
        mut self,
        mut delta: Vec<BoolMat>,
        exec: &E,
        hooks: &mut dyn SolveHooks,
    ) -> Result<SolveOutput, SolveError> {
        let mut total = OpCounter::default();
        let mut iterations = 0;
        while delta.iter().any(|d| !d.is_empty()) {
            if hooks.should_stop() {
                return Err(SolveError::Interrupted { iterations });
            }
            iterations += 1;
            let mut counter = OpCounter::default();
            let plan = &self.plan;

            // Every (slot, view, layout) the delta is read in.
            let mut wanted: BTreeSet<StoreKey> = self.keys.iter().copied().collect();
            for step in &plan.steps {
                wanted.insert((step.right.0, step.right.1, self.left_layout));
                wanted.insert((step.left.0, step.left.1, Layout::RowMajor));
            }
            let views = wanted
                .into_iter()
                .map(|key| Ok((key, plan.view(key.0, &delta[key.0], key.1, key.2)?)))
                .collect::<Result<BTreeMap<_, _>, SparseError>>()?;
            let m_old = if hooks.wants_snapshots() { Some(self.current()?) } else { None };

            let order: Vec<usize> = (0..plan.steps.len()).collect();
            let stores = &self.stores;
            let (left_store, right_store, left_layout) = (&self.left_store, &self.right_store, self.left_layout);
            let old_products = exec.map(&order, |&i| {
                let step = &plan.steps[i];
                let mut c = OpCounter::default();
                let d = &views[&(step.right.0, step.right.1, left_layout)];
                let p = stores[left_store[i]].multiply(d, DeltaSide::Right, &mut c)?;
                Ok::<_, SparseError>((p, c))
            });

            for (store, key) in self.stores.iter_mut().zip(&self.keys) {
                store.insert(&views[key], &mut counter)?;
            }

            let stores = &self.stores;
            let new_products = exec.map(&order, |&i| {
                let step = &plan.steps[i];
                let mut c = OpCounter::default();
                let d = &views[&(step.left.0, step.left.1, Layout::RowMajor)];
                let p = stores[right_store[i]].multiply(d, DeltaSide::Left, &mut c)?;
                Ok::<_, SparseError>((p, c))
            });

            let mut product: Vec<BoolMat> = (0..plan.slots.len()).map(|s| plan.canonical_zero(s)).collect();
            for ((step, a), b) in plan.steps.iter().zip(old_products).zip(new_products) {
                for res in [a, b] {
                    let (p, c) = res?;
                    counter += c;
                    let p = plan.output(step, convert(&p, Layout::RowMajor))?;
                    product[step.lhs] = union(&product[step.lhs], &p, &mut counter)?;
                }
            }

            let next = (0..plan.slots.len())
                .map(|s| {
                    let p = self.primary[s];
                    let (_, view, layout) = self.keys[p];
                    let c = plan.view(s, &product[s], view, layout)?;
                    plan.unview(s, &self.stores[p].subtract_from(&c)?, view)
                })
                .collect::<Result<Vec<_>, SparseError>>()?;

            total += counter;
            let snapshot = match m_old {
                Some(m_old) => Some(Snapshot {
                    m_old: plan.assemble(m_old),
                    delta: plan.assemble(delta.clone()),
                    m: plan.assemble(self.current()?),
                    product: plan.assemble(product),
                }),
                None => None,
            };
            hooks.on_iteration(&IterationInfo { iteration: iterations, counters: counter, snapshot: snapshot.as_ref() });
            delta = next;
        }
        Ok(SolveOutput { matrix: self.plan.assemble(self.current()?), iterations, counters: total })
    }
}

impl DeltaRun {
    #[cfg(test)]
    fn store_layouts(&self) -> Vec<(usize, View, Layout)> {
        self.keys.iter().zip(&self.stores).map(|(&(s, v, _), st)| (s, v, st.layout())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{parse_grammar, preset, to_wcnf, validate_wcnf, Symbol};
    use crate::graph::GraphBuilder;
    use alloc::vec;

    const ALL: [VariantFlags; 5] = [
        VariantFlags::ma(),
        VariantFlags::ma1(),
        VariantFlags::ma14(),
        VariantFlags::ma1234(),
        VariantFlags { lazy_union: true, ..VariantFlags::ma1() },
    ];

    #[test]
    fn empty_graph_without_epsilon() {
        let g = to_wcnf(&parse_grammar("S -> a S b | a b").unwrap());
        let graph = GraphBuilder::new().with_vertices(3).build();
        for flags in ALL {
            assert!(solve(&graph, &g, &flags).unwrap().is_empty());
        }
    }

    #[test]
    fn nested_path() {
        let g = to_wcnf(&parse_grammar("S -> a S b | a b").unwrap());
        let graph = LabeledGraph::parse("0 a 1\n1 a 2\n2 b 3\n3 b 4\n", &g).unwrap();
        let s = g.nonterminal_id(&Symbol::nonterminal("S")).unwrap();
        for flags in ALL {
            assert_eq!(solve(&graph, &g, &flags).unwrap().pairs(s), vec![(0, 4), (1, 3)], "{flags:?}");
        }
    }

    #[test]
    fn balanced_call_return() {
        let g = validate_wcnf(&preset("cscvf-wcnf").unwrap()).unwrap();
        let graph = LabeledGraph::parse("0 call_f1 1\n1 a 2\n2 ret_f1 3\n", &g).unwrap();
        let a = g.nonterminal_id(&Symbol::nonterminal("A")).unwrap();
        let ah = g.nonterminal_id(&Symbol::nonterminal("AH")).unwrap();
        for flags in ALL {
            let m = solve(&graph, &g, &flags).unwrap();
            let pairs = m.pairs(a);
            assert!(pairs.contains(&(0, 3)));
            assert!((0..4).all(|v| pairs.contains(&(v, v))));
            assert!(m.pairs(ah).contains(&(0, 3)));
        }
    }

    #[test]
    fn rejects_invalid_flags() {
        let g = to_wcnf(&parse_grammar("S -> a").unwrap());
        let graph = GraphBuilder::new().build();
        let flags = VariantFlags { lazy_union: true, ..VariantFlags::ma() };
        assert_eq!(solve(&graph, &g, &flags).unwrap_err(), SolveError::Flags(FlagsError::LazyWithoutDelta));
    }

    #[test]
    fn dual_format_stores_only_needed_copies() {
        let g = to_wcnf(&parse_grammar("S -> A B | S B\nA -> a\nB -> b").unwrap());
        let plan = Plan::new(&g, 3, 0, true);
        let run = DeltaRun::new(plan, &VariantFlags { dual_format: true, ..VariantFlags::ma1() });
        let id = |s: &str| g.nonterminal_id(&Symbol::nonterminal(s)).unwrap();
        let layouts = run.store_layouts();
        let of = |s: &str| -> Vec<Layout> { layouts.iter().filter(|k| k.0 == id(s)).map(|k| k.2).collect() };
        // S and A only appear on the left, B only on the right
        assert_eq!(of("A"), vec![Layout::ColMajor]);
        assert_eq!(of("B"), vec![Layout::RowMajor]);
        assert_eq!(of("S"), vec![Layout::ColMajor]);
    }

    struct Stop(usize);

    impl SolveHooks for Stop {
        fn should_stop(&mut self) -> bool {
            self.0 = self.0.saturating_sub(1);
            self.0 == 0
        }
    }

    #[test]
    fn interruption() {
        let g = to_wcnf(&parse_grammar("S -> a S b | a b").unwrap());
        let graph = LabeledGraph::parse("0 a 1\n1 a 2\n2 b 3\n3 b 4\n", &g).unwrap();
        let err = solve_with(&graph, &g, &VariantFlags::ma1(), &Sequential, &mut Stop(2)).unwrap_err();
        assert_eq!(err, SolveError::Interrupted { iterations: 1 });
    }
}
