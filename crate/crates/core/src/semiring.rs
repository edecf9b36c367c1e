//! The reachability semiring over sets of non-terminals.
//!
//! Addition is set union; `A ⊗ B = { c | c -> a b, a ∈ A, b ∈ B }`. A
//! semiring-valued `|V| x |V|` matrix is stored as one Boolean matrix per
//! non-terminal, so a semiring product is one Boolean SpGEMM per binary
//! rule.
//!
//! An indexed family `X_[i]` is stored as a single *vertical* block matrix
//! (`k·|V| x |V|`, slot `t` in row block `t`). With indexed blocks enabled a
//! whole rule family is executed by one SpGEMM whose operands are re-indexed
//! views of those blocks:
//!
//! | rule shape              | left operand        | right operand   | result      |
//! |-------------------------|---------------------|-----------------|-------------|
//! | `C -> A B`              | `A`                 | `B`             | `C`         |
//! | `C -> A_i B_i`          | horizontal `A`      | vertical `B`    | `C`         |
//! | `C_i -> A B_i`          | `A`                 | horizontal `B`  | horizontal  |
//! | `C_i -> A_i B`          | vertical `A`        | `B`             | vertical    |
//! | `C_i -> A_i B_i`        | block diagonal `A`  | vertical `B`    | vertical    |
//! | `C -> A_i B`, `C -> A B_i` | collapsed family | plain           | `C`         |
//! | `C_i -> A B`            | `A`                 | `B`             | every slot  |
//!
//! Without indexed blocks every family is expanded into `k` plain matrices
//! and every indexed rule into `k` plain rules.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::grammar::{NontermId, Symbol, WcnfGrammar};
use crate::graph::LabeledGraph;
use crate::oracle::ReachTriple;
use crate::solver::VariantFlags;
use crate::sparse::{
    block_collapse_vertical, block_diagonalize, convert, diagonal_to_vertical, horizontal_to_vertical, spgemm,
    union, vertical_to_horizontal, BoolMat, Layout, OpCounter, Orientation, SparseError,
};

/// An element of `2^N`: concrete non-terminals (family members carry their
/// index value).
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct NontermSet {
    pub members: BTreeSet<Symbol>,
}

impl NontermSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, s: Symbol) -> bool {
        self.members.insert(s)
    }

    pub fn union(&self, other: &NontermSet) -> NontermSet {
        NontermSet { members: &self.members | &other.members }
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

impl FromIterator<Symbol> for NontermSet {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        NontermSet { members: iter.into_iter().collect() }
    }
}

/// Matches a concrete non-terminal against a rule operand. `Some(None)`:
/// plain match; `Some(Some(v))`: family member with index value `v`.
fn bind<'a>(template: &Symbol, concrete: &'a Symbol) -> Option<Option<&'a str>> {
    if template.is_family() {
        match concrete.index_value() {
            Some(v) if concrete.base() == template.base() && concrete.is_nonterminal() => Some(Some(v)),
            _ => None,
        }
    } else if template == concrete {
        Some(None)
    } else {
        None
    }
}

/// `a ⊗ b`. `universe` supplies the index values for rules whose result is
/// indexed while neither operand is.
pub fn scalar_mul(a: &NontermSet, b: &NontermSet, g: &WcnfGrammar, universe: &[String]) -> NontermSet {
    let mut out = NontermSet::new();
    for rule in g.binary_rules() {
        let (c, x, y) = (g.nonterminal(rule.lhs), g.nonterminal(rule.left), g.nonterminal(rule.right));
        for s in &a.members {
            let Some(bx) = bind(x, s) else { continue };
            for t in &b.members {
                let Some(by) = bind(y, t) else { continue };
                let value = match (bx, by) {
                    (Some(v1), Some(v2)) if v1 != v2 => continue,
                    (v1, v2) => v1.or(v2),
                };
                if !c.is_family() {
                    out.insert(c.clone());
                } else if let Some(v) = value {
                    out.insert(c.unindexed().with_value(v));
                } else {
                    for v in universe {
                        out.insert(c.unindexed().with_value(v.clone()));
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemiringError {
    #[error("matrix does not match the grammar: {0}")]
    Shape(&'static str),
    #[error(transparent)]
    Sparse(#[from] SparseError),
}

/// A `|V| x |V|` matrix over the reachability semiring, stored per
/// non-terminal: `n x n` for plain non-terminals and a `k·n x n` vertical
/// block for families. All matrices are row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NontermMatrix {
    n: usize,
    universe: usize,
    matrices: Vec<BoolMat>,
}

impl NontermMatrix {
    pub fn zeros(g: &WcnfGrammar, n: usize, universe: usize) -> Self {
        let matrices = (0..g.nonterminals().len())
            .map(|id| {
                let rows = if g.is_family(id) { universe * n } else { n };
                BoolMat::zeros(rows, n, Layout::RowMajor)
            })
            .collect();
        NontermMatrix { n, universe, matrices }
    }

    /// Builds from `(nonterminal, slot, source, target)` entries; `slot` is
    /// required for families and ignored otherwise.
    pub fn from_entries<I>(g: &WcnfGrammar, n: usize, universe: usize, entries: I) -> Result<Self, SemiringError>
    where
        I: IntoIterator<Item = (NontermId, Option<usize>, usize, usize)>,
    {
        let count = g.nonterminals().len();
        let mut per: Vec<Vec<(usize, usize)>> = vec![Vec::new(); count];
        for (id, slot, u, v) in entries {
            if id >= count {
                return Err(SemiringError::Shape("unknown non-terminal"));
            }
            if g.is_family(id) {
                let t = slot.ok_or(SemiringError::Shape("family entry without slot"))?;
                if t >= universe {
                    return Err(SemiringError::Shape("slot outside the index universe"));
                }
                per[id].push((t * n + u, v));
            } else {
                per[id].push((u, v));
            }
        }
        let matrices = per
            .into_iter()
            .enumerate()
            .map(|(id, e)| {
                let rows = if g.is_family(id) { universe * n } else { n };
                BoolMat::from_entries(rows, n, Layout::RowMajor, e)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(NontermMatrix { n, universe, matrices })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn universe_size(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.iter().all(BoolMat::is_empty)
    }

    pub fn matrix(&self, id: NontermId) -> &BoolMat {
        &self.matrices[id]
    }

    pub fn matrices(&self) -> &[BoolMat] {
        &self.matrices
    }

    pub fn nnz(&self, id: NontermId) -> usize {
        self.matrices[id].nnz()
    }

    pub fn total_nnz(&self) -> usize {
        self.matrices.iter().map(BoolMat::nnz).sum()
    }

    /// Vertex pairs of a non-terminal; for a family, of any member.
    pub fn pairs(&self, id: NontermId) -> Vec<(usize, usize)> {
        let m = &self.matrices[id];
        if m.rows() == self.n {
            return m.sorted_entries();
        }
        let set: BTreeSet<(usize, usize)> = m.iter().map(|(r, c)| (r % self.n, c)).collect();
        set.into_iter().collect()
    }

    /// `(slot, source, target)` entries of a family, sorted.
    pub fn indexed_pairs(&self, id: NontermId) -> Vec<(usize, usize, usize)> {
        self.matrices[id].sorted_entries().into_iter().map(|(r, c)| (r / self.n, r % self.n, c)).collect()
    }

    pub fn union(&self, other: &NontermMatrix) -> Result<NontermMatrix, SemiringError> {
        if self.n != other.n || self.universe != other.universe || self.len() != other.len() {
            return Err(SemiringError::Shape("operands differ in shape"));
        }
        let mut c = OpCounter::default();
        let matrices = self
            .matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| union(a, b, &mut c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(NontermMatrix { n: self.n, universe: self.universe, matrices })
    }

    /// The semiring value of cell `(i, j)`.
    pub fn cell(&self, g: &WcnfGrammar, universe: &[String], i: usize, j: usize) -> NontermSet {
        let mut out = NontermSet::new();
        for (id, m) in self.matrices.iter().enumerate() {
            let s = g.nonterminal(id);
            if g.is_family(id) {
                for (t, v) in universe.iter().enumerate().take(self.universe) {
                    if m.contains(t * self.n + i, j) {
                        out.insert(s.unindexed().with_value(v.clone()));
                    }
                }
            } else if m.contains(i, j) {
                out.insert(s.clone());
            }
        }
        out
    }

    /// Every `(non-terminal, source, target)` fact, family members named by
    /// their index value.
    pub fn triples(&self, g: &WcnfGrammar, universe: &[String]) -> BTreeSet<ReachTriple> {
        let mut out = BTreeSet::new();
        for (id, m) in self.matrices.iter().enumerate() {
            let s = g.nonterminal(id);
            for (r, c) in m.iter() {
                let (nonterminal, source) = if g.is_family(id) {
                    (s.unindexed().with_value(universe[r / self.n].clone()), r % self.n)
                } else {
                    (s.clone(), r)
                };
                out.insert(ReachTriple { nonterminal, source, target: c });
            }
        }
        out
    }
}

/// Cell-wise `(left · right)` over the semiring.
pub fn semiring_matmul(
    left: &NontermMatrix,
    right: &NontermMatrix,
    g: &WcnfGrammar,
    flags: &VariantFlags,
) -> Result<NontermMatrix, SemiringError> {
    semiring_matmul_counted(left, right, g, flags, &mut OpCounter::default())
}

pub fn semiring_matmul_counted(
    left: &NontermMatrix,
    right: &NontermMatrix,
    g: &WcnfGrammar,
    flags: &VariantFlags,
    counter: &mut OpCounter,
) -> Result<NontermMatrix, SemiringError> {
    let (n, k) = (left.n, left.universe);
    if right.n != n || right.universe != k {
        return Err(SemiringError::Shape("operands differ in shape"));
    }
    for m in [left, right] {
        if m.len() != g.nonterminals().len() {
            return Err(SemiringError::Shape("non-terminal count differs from the grammar"));
        }
    }
    let plan = Plan::new(g, n, k, flags.indexed_blocks);
    let (ls, rs) = (plan.split(left), plan.split(right));
    let layout = if flags.dual_format { Layout::ColMajor } else { Layout::RowMajor };
    let orientation = if flags.dual_format { Orientation::ColumnByColumn } else { Orientation::RowByRow };
    let mut acc: Vec<BoolMat> = plan.slots.iter().map(|s| plan.zero(s.shape_rows(n, k), Layout::RowMajor)).collect();
    for step in &plan.steps {
        let l = plan.view(step.left.0, &ls[step.left.0], step.left.1, layout)?;
        let r = plan.view(step.right.0, &rs[step.right.0], step.right.1, layout)?;
        let p = convert(&spgemm(&l, &r, orientation, counter)?, Layout::RowMajor);
        let p = plan.output(step, p)?;
        acc[step.lhs] = union(&acc[step.lhs], &p, counter)?;
    }
    Ok(plan.assemble(acc))
}

/// Initial matrix: terminal rules over edges, full diagonals for epsilon
/// rules.
pub fn initial_matrix(graph: &LabeledGraph, g: &WcnfGrammar) -> NontermMatrix {
    let plan = Plan::new(g, graph.vertex_count(), graph.index_universe().len(), true);
    plan.assemble(plan.initial(graph, g))
}

/// Re-indexed form of a stored matrix used as a SpGEMM operand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum View {
    Plain,
    Horizontal,
    Vertical,
    Diagonal,
    Collapsed,
}

impl View {
    /// Views that determine the stored matrix uniquely.
    pub(crate) fn is_bijective(self) -> bool {
        !matches!(self, View::Collapsed)
    }
}

/// How a product becomes a contribution to the rule's result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Output {
    Same,
    FromHorizontal,
    Replicate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Slot {
    pub nonterm: NontermId,
    /// Concrete index slot of an expanded family member.
    pub member: Option<usize>,
    /// Whole family held as a vertical block.
    pub block: bool,
}

impl Slot {
    fn shape_rows(&self, n: usize, k: usize) -> usize {
        if self.block {
            k * n
        } else {
            n
        }
    }

    pub(crate) fn canonical_view(&self) -> View {
        if self.block {
            View::Vertical
        } else {
            View::Plain
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Step {
    pub lhs: usize,
    pub left: (usize, View),
    pub right: (usize, View),
    pub out: Output,
}

/// Binary rules compiled into SpGEMM steps over storage slots.
#[derive(Clone, Debug)]
pub(crate) struct Plan {
    pub n: usize,
    pub k: usize,
    pub slots: Vec<Slot>,
    pub steps: Vec<Step>,
    /// `slot_of[id]`: first slot of non-terminal `id`; expanded families own
    /// `k` consecutive slots.
    slot_of: Vec<usize>,
}

impl Plan {
    pub(crate) fn new(g: &WcnfGrammar, n: usize, k: usize, blocks: bool) -> Self {
        let mut slots = Vec::new();
        let mut slot_of = Vec::new();
        for id in 0..g.nonterminals().len() {
            slot_of.push(slots.len());
            if !g.is_family(id) {
                slots.push(Slot { nonterm: id, member: None, block: false });
            } else if blocks {
                slots.push(Slot { nonterm: id, member: None, block: true });
            } else {
                slots.extend((0..k).map(|t| Slot { nonterm: id, member: Some(t), block: false }));
            }
        }
        let mut steps = Vec::new();
        for rule in g.binary_rules() {
            let (fc, fa, fb) = (g.is_family(rule.lhs), g.is_family(rule.left), g.is_family(rule.right));
            let (c, a, b) = (slot_of[rule.lhs], slot_of[rule.left], slot_of[rule.right]);
            if blocks || !(fc || fa || fb) {
                use View::*;
                let (lv, rv, out) = match (fc, fa, fb) {
                    (false, false, false) => (Plain, Plain, Output::Same),
                    (false, true, true) => (Horizontal, Vertical, Output::Same),
                    (true, false, true) => (Plain, Horizontal, Output::FromHorizontal),
                    (true, true, false) => (Vertical, Plain, Output::Same),
                    (true, true, true) => (Diagonal, Vertical, Output::Same),
                    (false, true, false) => (Collapsed, Plain, Output::Same),
                    (false, false, true) => (Plain, Collapsed, Output::Same),
                    (true, false, false) => (Plain, Plain, Output::Replicate),
                };
                steps.push(Step { lhs: c, left: (a, lv), right: (b, rv), out });
            } else {
                let at = |base: usize, fam: bool, t: usize| if fam { base + t } else { base };
                for t in 0..k {
                    steps.push(Step {
                        lhs: at(c, fc, t),
                        left: (at(a, fa, t), View::Plain),
                        right: (at(b, fb, t), View::Plain),
                        out: Output::Same,
                    });
                }
            }
        }
        Plan { n, k, slots, steps, slot_of }
    }

    pub(crate) fn zero(&self, rows: usize, layout: Layout) -> BoolMat {
        BoolMat::zeros(rows, self.n, layout)
    }

    pub(crate) fn canonical_zero(&self, slot: usize) -> BoolMat {
        self.zero(self.slots[slot].shape_rows(self.n, self.k), Layout::RowMajor)
    }

    pub(crate) fn view_shape(&self, view: View) -> (usize, usize) {
        let (n, k) = (self.n, self.k);
        match view {
            View::Plain | View::Collapsed => (n, n),
            View::Horizontal => (n, k * n),
            View::Vertical => (k * n, n),
            View::Diagonal => (k * n, k * n),
        }
    }

    /// `m` (canonical, any layout) re-indexed into `view` and stored in
    /// `layout`.
    pub(crate) fn view(&self, slot: usize, m: &BoolMat, view: View, layout: Layout) -> Result<BoolMat, SparseError> {
        let (n, k) = (self.n, self.k);
        let v = match (self.slots[slot].block, view) {
            (false, View::Plain) | (true, View::Vertical) => return Ok(convert(m, layout)),
            (true, View::Horizontal) => vertical_to_horizontal(m, n, k)?,
            (true, View::Diagonal) => block_diagonalize(m, n, k)?,
            (true, View::Collapsed) => block_collapse_vertical(m, n, k)?,
            _ => unreachable!("view {view:?} of a plain slot"),
        };
        Ok(convert(&v, layout))
    }

    /// Inverse of [`Plan::view`] for bijective views; returns row-major.
    pub(crate) fn unview(&self, slot: usize, m: &BoolMat, view: View) -> Result<BoolMat, SparseError> {
        let (n, k) = (self.n, self.k);
        let row = convert(m, Layout::RowMajor);
        match (self.slots[slot].block, view) {
            (false, View::Plain) | (true, View::Vertical) => Ok(row),
            (true, View::Horizontal) => horizontal_to_vertical(&row, n, k),
            (true, View::Diagonal) => diagonal_to_vertical(&row, n, k),
            _ => unreachable!("no inverse for view {view:?}"),
        }
    }

    /// Product of a step (row-major) as a canonical contribution to `step.lhs`.
    pub(crate) fn output(&self, step: &Step, p: BoolMat) -> Result<BoolMat, SparseError> {
        let (n, k) = (self.n, self.k);
        match step.out {
            Output::Same => Ok(p),
            Output::FromHorizontal => horizontal_to_vertical(&p, n, k),
            Output::Replicate => {
                let entries = p.iter().flat_map(|(r, c)| (0..k).map(move |t| (t * n + r, c)));
                BoolMat::from_entries(k * n, n, Layout::RowMajor, entries)
            }
        }
    }

    /// Canonical per-slot matrices from per-non-terminal ones.
    pub(crate) fn split(&self, m: &NontermMatrix) -> Vec<BoolMat> {
        let n = self.n;
        self.slots
            .iter()
            .map(|s| {
                let src = &m.matrices[s.nonterm];
                match s.member {
                    Some(t) => {
                        let entries = src.iter().filter(|&(r, _)| r / n == t).map(|(r, c)| (r - t * n, c));
                        BoolMat::from_entries(n, n, Layout::RowMajor, entries).expect("slice in range")
                    }
                    None => src.clone(),
                }
            })
            .collect()
    }

    /// Per-non-terminal matrix from canonical per-slot ones.
    pub(crate) fn assemble(&self, per_slot: Vec<BoolMat>) -> NontermMatrix {
        let (n, k) = (self.n, self.k);
        let mut matrices = Vec::with_capacity(self.slot_of.len());
        let mut slots = per_slot.into_iter().zip(self.slots.iter()).peekable();
        for id in 0..self.slot_of.len() {
            let mut members: Vec<(usize, usize)> = Vec::new();
            let mut whole = None;
            while let Some((_, s)) = slots.peek() {
                if s.nonterm != id {
                    break;
                }
                let (m, s) = slots.next().unwrap();
                match s.member {
                    Some(t) => members.extend(m.iter().map(|(r, c)| (t * n + r, c))),
                    None => whole = Some(convert(&m, Layout::RowMajor)),
                }
            }
            matrices.push(match whole {
                Some(m) => m,
                // expanded family, possibly with k = 0 members
                None => BoolMat::from_entries(k * n, n, Layout::RowMajor, members).expect("member in range"),
            });
        }
        NontermMatrix { n, universe: k, matrices }
    }

    /// Canonical per-slot initial matrices.
    pub(crate) fn initial(&self, graph: &LabeledGraph, g: &WcnfGrammar) -> Vec<BoolMat> {
        let (n, k) = (self.n, self.k);
        let mut per: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.slots.len()];
        // (slot, row, col) for a fact about `id`, member `t` (None: every member)
        let mut put = |id: NontermId, t: Option<usize>, u: usize, v: usize| {
            let base = self.slot_of[id];
            let s = &self.slots[base];
            let members: Vec<usize> = match t {
                Some(t) => vec![t],
                None => (0..k).collect(),
            };
            if !g.is_family(id) {
                per[base].push((u, v));
            } else if s.block {
                for t in members {
                    per[base].push((t * n + u, v));
                }
            } else {
                for t in members {
                    per[base + t].push((u, v));
                }
            }
        };
        let var = g.index_var();
        let rules = g.terminal_rules();
        let mut by_key: BTreeMap<Symbol, Vec<(usize, Option<usize>, usize)>> = BTreeMap::new();
        for e in graph.edges() {
            let (key, slot) = match (e.label.index_value(), var) {
                (Some(value), Some(var)) => (e.label.unindexed().with_var(var), graph.index_slot(value)),
                _ => (e.label.clone(), None),
            };
            by_key.entry(key).or_default().push((e.source, slot, e.target));
        }
        for (key, lhs) in rules {
            if key.is_epsilon() {
                for &id in lhs {
                    for u in 0..n {
                        put(id, None, u, u);
                    }
                }
                continue;
            }
            for &(u, slot, v) in by_key.get(key).map(Vec::as_slice).unwrap_or(&[]) {
                for &id in lhs {
                    put(id, slot, u, v);
                }
            }
        }
        per.into_iter()
            .enumerate()
            .map(|(i, e)| {
                BoolMat::from_entries(self.slots[i].shape_rows(n, k), n, Layout::RowMajor, e).expect("initial entry in range")
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{parse_grammar, preset, to_wcnf, validate_wcnf, Symbol};
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn nt(s: &str) -> Symbol {
        Symbol::nonterminal(s)
    }

    fn set(xs: &[&str]) -> NontermSet {
        xs.iter().map(|s| nt(s)).collect()
    }

    #[test]
    fn scalar_examples() {
        let g4 = validate_wcnf(&preset("cscvf-wcnf").unwrap()).unwrap();
        assert_eq!(scalar_mul(&set(&[]), &set(&["A", "AH"]), &g4, &[]), set(&[]));
        assert_eq!(scalar_mul(&set(&["A"]), &set(&["AH"]), &g4, &[]), set(&["A"]));
        let g2 = validate_wcnf(&preset("fica-opt").unwrap()).unwrap();
        assert_eq!(scalar_mul(&set(&["N1"]), &set(&["M"]), &g2, &[]), set(&["N2"]));
        assert_eq!(scalar_mul(&set(&["N2"]), &set(&["N1"]), &g2, &[]), set(&[]));
    }

    #[test]
    fn scalar_indexed_binding() {
        let g4 = validate_wcnf(&preset("cscvf-wcnf").unwrap()).unwrap();
        let call = |v: &str| Symbol::nonterminal("call#t").with_value(v);
        let ar = |v: &str| Symbol::nonterminal("AR").with_value(v);
        let a: NontermSet = [call("x")].into_iter().collect();
        let b: NontermSet = [ar("x"), ar("y")].into_iter().collect();
        assert_eq!(scalar_mul(&a, &b, &g4, &[]), set(&["AH"]));
        let b: NontermSet = [ar("y")].into_iter().collect();
        assert!(scalar_mul(&a, &b, &g4, &[]).is_empty());
        let ret = |v: &str| Symbol::nonterminal("ret#t").with_value(v);
        let b: NontermSet = [ret("y")].into_iter().collect();
        assert_eq!(scalar_mul(&set(&["A"]), &b, &g4, &[]), [ar("y")].into_iter().collect());
        // indexed result from plain operands spans the universe
        let g = validate_wcnf(&parse_grammar("X_[i] -> A B\nA -> a\nB -> b").unwrap()).unwrap();
        let u = ["p".to_string(), "q".to_string()];
        let x = |v: &str| Symbol::nonterminal("X").with_value(v);
        assert_eq!(scalar_mul(&set(&["A"]), &set(&["B"]), &g, &u), [x("p"), x("q")].into_iter().collect());
    }

    #[test]
    fn scalar_distributes_over_union_exhaustively() {
        let g = validate_wcnf(
            &parse_grammar("A -> B C | C C | x\nB -> A E | D B | y\nC -> E A | z\nD -> B B | w\nE -> D C | A A | v")
                .unwrap(),
        )
        .unwrap();
        let names = ["A", "B", "C", "D", "E"];
        let subset = |mask: u32| -> NontermSet { names.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, s)| nt(s)).collect() };
        let products: Vec<Vec<NontermSet>> =
            (0..32).map(|x| (0..32).map(|y| scalar_mul(&subset(x), &subset(y), &g, &[])).collect()).collect();
        for a in 0..32u32 {
            for b in 0..32u32 {
                for c in 0..32u32 {
                    let ab = (a | b) as usize;
                    let (a, b, c) = (a as usize, b as usize, c as usize);
                    assert_eq!(products[ab][c], products[a][c].union(&products[b][c]));
                    assert_eq!(products[c][ab], products[c][a].union(&products[c][b]));
                }
            }
        }
    }

    #[test]
    fn initial_examples() {
        let g = validate_wcnf(&parse_grammar("A -> eps").unwrap()).unwrap();
        let graph = crate::graph::GraphBuilder::new().with_vertices(4).build();
        let m = initial_matrix(&graph, &g);
        assert_eq!(m.pairs(0), vec![(0, 0), (1, 1), (2, 2), (3, 3)]);

        let g = validate_wcnf(&parse_grammar("S -> a").unwrap()).unwrap();
        let graph = LabeledGraph::parse("0 a 1", &g).unwrap();
        assert_eq!(initial_matrix(&graph, &g).pairs(0), vec![(0, 1)]);

        let g = validate_wcnf(&preset("fica-opt").unwrap()).unwrap();
        let graph = LabeledGraph::parse("0 d_bar 1\n1 d 2\n", &g).unwrap();
        let m = initial_matrix(&graph, &g);
        for (id, s) in g.nonterminals().iter().enumerate() {
            let expect = match s.base() {
                "N1" => vec![(0, 1)],
                "N3" => vec![(1, 2)],
                _ => vec![],
            };
            assert_eq!(m.pairs(id), expect, "{s}");
        }
    }

    #[test]
    fn zero_times_anything() {
        let g = validate_wcnf(&preset("cscvf-wcnf").unwrap()).unwrap();
        let graph = LabeledGraph::parse("0 call_f 1\n1 a 2\n2 ret_f 0\n", &g).unwrap();
        let m = initial_matrix(&graph, &g);
        let z = NontermMatrix::zeros(&g, 3, 1);
        for flags in [VariantFlags::ma1(), VariantFlags::ma14(), VariantFlags::ma1234()] {
            assert!(semiring_matmul(&z, &m, &g, &flags).unwrap().is_empty());
            assert!(semiring_matmul(&m, &z, &g, &flags).unwrap().is_empty());
        }
    }

    #[test]
    fn two_vertex_call_return() {
        // 0 -call_f1-> 1 -ret_f1-> 0, hand-simulated: A has the diagonal from
        // A -> eps, so AR_f1 gains (1, 0) from A · ret; a second product then
        // gives AH (0, 0) from call · AR.
        let g = validate_wcnf(&preset("cscvf-wcnf").unwrap()).unwrap();
        let graph = LabeledGraph::parse("0 call_f1 1\n1 ret_f1 0\n", &g).unwrap();
        let universe = graph.index_universe().to_vec();
        let id = |s: &Symbol| g.nonterminal_id(s).unwrap();
        let ar = id(&nt("AR").with_var("i"));
        let ah = id(&nt("AH"));
        for flags in [VariantFlags::ma(), VariantFlags::ma14()] {
            let m0 = initial_matrix(&graph, &g);
            let m1 = m0.union(&semiring_matmul(&m0, &m0, &g, &flags).unwrap()).unwrap();
            assert_eq!(m1.indexed_pairs(ar), vec![(0, 1, 0)]);
            assert!(m1.pairs(ah).is_empty());
            let m2 = m1.union(&semiring_matmul(&m1, &m1, &g, &flags).unwrap()).unwrap();
            assert_eq!(m2.pairs(ah), vec![(0, 0)]);
            // cross-check each cell against scalar products
            for i in 0..2 {
                for j in 0..2 {
                    let mut expect = m1.cell(&g, &universe, i, j);
                    for k in 0..2 {
                        let p = scalar_mul(&m1.cell(&g, &universe, i, k), &m1.cell(&g, &universe, k, j), &g, &universe);
                        expect = expect.union(&p);
                    }
                    assert_eq!(m2.cell(&g, &universe, i, j), expect);
                }
            }
        }
    }

    fn grammar_by(i: usize) -> WcnfGrammar {
        match i {
            0 => validate_wcnf(&preset("cscvf-wcnf").unwrap()).unwrap(),
            1 => validate_wcnf(&preset("fsjpt-opt").unwrap()).unwrap(),
            2 => to_wcnf(&preset("fsca-wcnf").unwrap()),
            _ => validate_wcnf(&parse_grammar("X_[i] -> A B | X_[i] A\nA -> a | A X_[i]\nB -> b").unwrap()).unwrap(),
        }
    }

    fn random_matrix(g: &WcnfGrammar, n: usize, k: usize, seed: u64, density: u64) -> NontermMatrix {
        let mut s = seed | 1;
        let mut next = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            s
        };
        let mut e = Vec::new();
        for id in 0..g.nonterminals().len() {
            let members = if g.is_family(id) { k } else { 1 };
            for t in 0..members {
                for u in 0..n {
                    for v in 0..n {
                        if next() % 100 < density {
                            e.push((id, Some(t), u, v));
                        }
                    }
                }
            }
        }
        NontermMatrix::from_entries(g, n, k, e).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn matmul_matches_cellwise_scalar(gi in 0usize..4, n in 1usize..=6, k in 0usize..=3, seed in any::<u64>(), flag in 0usize..4) {
            let g = grammar_by(gi);
            let universe: Vec<String> = (0..k).map(|t| alloc::format!("v{t}")).collect();
            let left = random_matrix(&g, n, k, seed, 25);
            let right = random_matrix(&g, n, k, seed.rotate_left(17) ^ 0xabcdef, 25);
            let flags = [VariantFlags::ma(), VariantFlags::ma1(), VariantFlags::ma14(), VariantFlags::ma1234()][flag];
            let got = semiring_matmul(&left, &right, &g, &flags).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let mut expect = NontermSet::new();
                    for x in 0..n {
                        let p = scalar_mul(&left.cell(&g, &universe, i, x), &right.cell(&g, &universe, x, j), &g, &universe);
                        expect = expect.union(&p);
                    }
                    prop_assert_eq!(got.cell(&g, &universe, i, j), expect, "cell ({}, {})", i, j);
                }
            }
        }

        #[test]
        fn blocks_and_layouts_do_not_change_products(gi in 0usize..4, n in 1usize..=8, k in 0usize..=4, seed in any::<u64>()) {
            let g = grammar_by(gi);
            let left = random_matrix(&g, n, k, seed, 20);
            let right = random_matrix(&g, n, k, !seed, 20);
            let base = semiring_matmul(&left, &right, &g, &VariantFlags::ma1()).unwrap();
            for flags in [VariantFlags::ma14(), VariantFlags::ma1234(), VariantFlags { dual_format: true, ..VariantFlags::ma1() }] {
                prop_assert_eq!(&semiring_matmul(&left, &right, &g, &flags).unwrap(), &base);
            }
        }
    }
}
