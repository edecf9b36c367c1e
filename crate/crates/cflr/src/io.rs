//! Reading grammars and graphs, and the pair output format.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use cflr_core::grammar::{load_wcnf, parse_grammar, Cfg, NontermId, Preset};
use cflr_core::solver::Variant;
use cflr_core::{LabeledGraph, NontermMatrix, WcnfGrammar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GrammarSource {
    File(PathBuf),
    Preset(String),
}

#[derive(Debug)]
pub struct LoadedGrammar {
    /// File path or preset name, for reports.
    pub id: String,
    pub grammar: WcnfGrammar,
}

/// A variant asked for a grammar that cannot be provided.
#[derive(Debug)]
pub struct VariantGrammarMismatch(pub String);

impl std::fmt::Display for VariantGrammarMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for VariantGrammarMismatch {}

pub fn read_cfg(path: &Path) -> anyhow::Result<Cfg> {
    let text = fs::read_to_string(path).with_context(|| format!("reading grammar {}", path.display()))?;
    parse_grammar(&text).with_context(|| format!("parsing grammar {}", path.display()))
}

/// Loads the grammar a variant runs on. `ma12345` swaps a preset for its
/// hand-optimized form and rejects anything without one.
pub fn load_grammar(source: &GrammarSource, variant: Variant) -> anyhow::Result<LoadedGrammar> {
    let (id, cfg) = match source {
        GrammarSource::File(path) => {
            if variant.needs_optimized_grammar() {
                return Err(VariantGrammarMismatch(format!(
                    "variant {variant} needs a preset with an optimized form, not a grammar file"
                ))
                .into());
            }
            (path.display().to_string(), read_cfg(path)?)
        }
        GrammarSource::Preset(name) => {
            let p = Preset::from_name(name).ok_or_else(|| {
                let known: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
                anyhow!("unknown preset `{name}` (known: {})", known.join(", "))
            })?;
            let p = if variant.needs_optimized_grammar() {
                p.optimized().ok_or_else(|| {
                    VariantGrammarMismatch(format!("variant {variant} needs a preset with an optimized form; `{name}` has none"))
                })?
            } else {
                p
            };
            (p.name().to_string(), p.cfg())
        }
    };
    Ok(LoadedGrammar { id, grammar: load_wcnf(&cfg) })
}

pub fn read_graph(path: &Path, g: &WcnfGrammar) -> anyhow::Result<LabeledGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading graph {}", path.display()))?;
    LabeledGraph::parse(&text, g).with_context(|| format!("parsing graph {}", path.display()))
}

/// Looks a non-terminal up by its written form (`AR_[i]`) or by its base
/// name (`AR`).
pub fn resolve_nonterminal(g: &WcnfGrammar, name: &str) -> anyhow::Result<NontermId> {
    let all = g.nonterminals();
    if let Some(id) = all.iter().position(|s| s.to_string() == name) {
        return Ok(id);
    }
    let by_base: Vec<usize> = (0..all.len()).filter(|&i| all[i].base() == name).collect();
    match by_base.as_slice() {
        [id] => Ok(*id),
        [] => bail!("grammar has no non-terminal `{name}`"),
        _ => bail!("non-terminal name `{name}` is ambiguous"),
    }
}

/// Pairs of one non-terminal as `u v` lines (`u v index` for a family),
/// sorted by vertex id, then index slot.
pub fn format_pairs(m: &NontermMatrix, g: &WcnfGrammar, graph: &LabeledGraph, id: NontermId) -> String {
    let mut out = String::new();
    if g.is_family(id) {
        let mut rows = m.indexed_pairs(id);
        rows.sort_by_key(|&(t, u, v)| (u, v, t));
        for (t, u, v) in rows {
            let _ = writeln!(out, "{} {} {}", graph.vertex_name(u), graph.vertex_name(v), graph.index_universe()[t]);
        }
    } else {
        for (u, v) in m.pairs(id) {
            let _ = writeln!(out, "{} {}", graph.vertex_name(u), graph.vertex_name(v));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use cflr_core::solver::{solve, VariantFlags};

    #[test]
    fn optimized_presets() {
        let src = GrammarSource::Preset("fsjpt".into());
        assert_eq!(load_grammar(&src, Variant::Ma12345).unwrap().id, "fsjpt-opt");
        assert_eq!(load_grammar(&src, Variant::Ma1).unwrap().id, "fsjpt");
        let src = GrammarSource::Preset("dyck".into());
        assert!(load_grammar(&src, Variant::Ma12345).unwrap_err().is::<VariantGrammarMismatch>());
        assert!(load_grammar(&GrammarSource::Preset("nope".into()), Variant::Ma).is_err());
    }

    #[test]
    fn family_lines_carry_index() {
        let g = load_grammar(&GrammarSource::Preset("cscvf-wcnf".into()), Variant::Ma1).unwrap().grammar;
        let graph = LabeledGraph::parse("x call_f y\ny ret_f z\n", &g).unwrap();
        let m = solve(&graph, &g, &VariantFlags::ma1()).unwrap();
        let ar = resolve_nonterminal(&g, "AR").unwrap();
        assert_eq!(format_pairs(&m, &g, &graph, ar), "y z f\n");
        let ah = resolve_nonterminal(&g, "AH").unwrap();
        assert_eq!(format_pairs(&m, &g, &graph, ah), "x z\n");
        assert!(resolve_nonterminal(&g, "Q").is_err());
    }
}
