//! Synthetic graphs.

use std::str::FromStr;

use anyhow::{bail, Context};
use cflr_core::graph::GraphBuilder;
use cflr_core::{LabeledGraph, Symbol, WcnfGrammar};
use rand::Rng;

/// Path `0 -a-> 1 -a-> … -b-> n` with `n / 2` `a` edges followed by `b`
/// edges. Under the Dyck grammar each prefix of `a`s matches one suffix of
/// `b`s, so derivations get as deep as the path is long.
pub fn chain(n: usize) -> LabeledGraph {
    let mut b = GraphBuilder::new().with_vertices(n + 1);
    for i in 0..n {
        let label = if i < n / 2 { "a" } else { "b" };
        b.edge(&i.to_string(), Symbol::terminal(label), &(i + 1).to_string());
    }
    b.build()
}

/// `n x n` grid, `a` edges to the right and `b` edges downwards.
pub fn grid(n: usize) -> LabeledGraph {
    let mut b = GraphBuilder::new().with_vertices(n * n);
    let v = |r: usize, c: usize| (r * n + c).to_string();
    for r in 0..n {
        for c in 0..n {
            if c + 1 < n {
                b.edge(&v(r, c), Symbol::terminal("a"), &v(r, c + 1));
            }
            if r + 1 < n {
                b.edge(&v(r, c), Symbol::terminal("b"), &v(r + 1, c));
            }
        }
    }
    b.build()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceSpec {
    Chain(usize),
    Grid(usize),
}

impl InstanceSpec {
    pub fn build(self) -> LabeledGraph {
        match self {
            InstanceSpec::Chain(n) => chain(n),
            InstanceSpec::Grid(n) => grid(n),
        }
    }
}

impl FromStr for InstanceSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, n) = s.split_once(':').context("expected `chain:N` or `grid:N`")?;
        let n: usize = n.parse().with_context(|| format!("bad size in `{s}`"))?;
        match kind {
            "chain" => Ok(InstanceSpec::Chain(n)),
            "grid" => Ok(InstanceSpec::Grid(n)),
            _ => bail!("unknown instance kind `{kind}`"),
        }
    }
}

impl std::fmt::Display for InstanceSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InstanceSpec::Chain(n) => write!(f, "chain:{n}"),
            InstanceSpec::Grid(n) => write!(f, "grid:{n}"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RandomSpec {
    pub max_vertices: usize,
    pub max_edges: usize,
    pub max_indices: usize,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec { max_vertices: 30, max_edges: 120, max_indices: 4 }
    }
}

/// Random graph labelled with the grammar's terminals; indexed terminals
/// get values `v0, v1, …` below a random universe size.
pub fn random_graph(g: &WcnfGrammar, spec: RandomSpec, rng: &mut impl Rng) -> LabeledGraph {
    let n = rng.gen_range(1..=spec.max_vertices.max(1));
    let edges = rng.gen_range(0..=spec.max_edges);
    let k = rng.gen_range(1..=spec.max_indices.max(1));
    let terminals = g.terminals();
    let mut b = GraphBuilder::new().with_vertices(n);
    if terminals.is_empty() {
        return b.build();
    }
    for _ in 0..edges {
        let t = &terminals[rng.gen_range(0..terminals.len())];
        let label = if t.is_family() { t.unindexed().with_value(format!("v{}", rng.gen_range(0..k))) } else { t.clone() };
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        b.edge(&u.to_string(), label, &v.to_string());
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use cflr_core::grammar::{load_wcnf, preset};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn chain_shape() {
        let g = chain(4);
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.to_triples(), "0 a 1\n1 a 2\n2 b 3\n3 b 4\n");
    }

    #[test]
    fn grid_shape() {
        let g = grid(3);
        assert_eq!(g.vertex_count(), 9);
        assert_eq!(g.edges().len(), 12);
    }

    #[test]
    fn specs_parse() {
        assert_eq!("chain:128".parse::<InstanceSpec>().unwrap(), InstanceSpec::Chain(128));
        assert_eq!("grid:4".parse::<InstanceSpec>().unwrap().to_string(), "grid:4");
        assert!("tree:4".parse::<InstanceSpec>().is_err());
        assert!("chain".parse::<InstanceSpec>().is_err());
    }

    #[test]
    fn random_respects_bounds_and_seed() {
        let g = load_wcnf(&preset("cscvf-wcnf").unwrap());
        let spec = RandomSpec::default();
        for seed in 0..20 {
            let a = random_graph(&g, spec, &mut ChaCha8Rng::seed_from_u64(seed));
            let b = random_graph(&g, spec, &mut ChaCha8Rng::seed_from_u64(seed));
            assert_eq!(a.to_triples(), b.to_triples());
            assert!(a.vertex_count() <= 30 && a.edges().len() <= 120 && a.index_universe().len() <= 4);
        }
    }
}
