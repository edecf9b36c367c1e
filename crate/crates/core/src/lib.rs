//! Matrix-based context-free language reachability (CFL-r).
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. It contains:
//!
//! * [`grammar`]: grammar text format, Weak Chomsky Normal Form validation
//!   and normalization, indexed symbol families and the built-in presets.
//! * [`graph`]: edge-labeled graphs parsed from triple text.
//! * [`sparse`]: sparse Boolean matrices with row/column-major and
//!   hypersparse storage, SpGEMM in both orientations and block transforms.
//! * [`semiring`]: the reachability semiring over per-non-terminal matrices.
//! * [`solver`]: the fixpoint loop, with delta iteration, dual storage
//!   layouts, lazy union through a [`solver::MatrixForest`] and indexed
//!   block matrices as independent switches.
//! * [`oracle`]: a worklist closure that shares no code with the matrix path.
//!
//! ```
//! use cflr_core::{grammar, graph::LabeledGraph, solver::{solve, VariantFlags}};
//!
//! let cfg = grammar::parse_grammar("S -> a S b | a b").unwrap();
//! let g = grammar::to_wcnf(&cfg);
//! let graph = LabeledGraph::parse("0 a 1\n1 a 2\n2 b 3\n3 b 4\n", &g).unwrap();
//! let m = solve(&graph, &g, &VariantFlags::ma1()).unwrap();
//! let s = g.nonterminal_id(&grammar::Symbol::nonterminal("S")).unwrap();
//! assert_eq!(m.pairs(s), vec![(0, 4), (1, 3)]);
//! ```

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod exec;
pub mod grammar;
pub mod graph;
pub mod oracle;
pub mod semiring;
pub mod solver;
pub mod sparse;

pub use grammar::{Cfg, Symbol, WcnfGrammar};
pub use graph::LabeledGraph;
pub use semiring::NontermMatrix;
pub use solver::{solve, VariantFlags};
pub use sparse::{BoolMat, Layout, OpCounter};
