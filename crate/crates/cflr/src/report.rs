//! Line-oriented `key=value` run records.
//!
//! Keys, in order: `variant`, `grammar`, `graph`, `iterations`,
//! `wall_seconds`, `peak_memory_bytes` (`n/a` when unknown),
//! `spgemm_calls`, `scalar_ops`, `union_entries`, `driver_entries`, then
//! one `pairs.<non-terminal>` per grammar non-terminal. Records are
//! separated by a blank line.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use cflr_core::{NontermMatrix, OpCounter, WcnfGrammar};

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub variant: String,
    pub grammar: String,
    pub graph: String,
    /// Non-terminals of the source grammar with their final nnz.
    pub pair_counts: Vec<(String, usize)>,
    pub iterations: usize,
    pub wall_seconds: f64,
    pub peak_memory_bytes: Option<u64>,
    pub counters: OpCounter,
}

/// nnz per source non-terminal; normalization helpers are left out.
pub fn pair_counts(m: &NontermMatrix, g: &WcnfGrammar) -> Vec<(String, usize)> {
    g.source().nonterminals().iter().map(|s| (s.to_string(), m.nnz(g.nonterminal_id(s).expect("source symbol")))).collect()
}

impl RunReport {
    pub fn to_record(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: &dyn std::fmt::Display| {
            let _ = writeln!(out, "{k}={v}");
        };
        kv("variant", &self.variant);
        kv("grammar", &self.grammar);
        kv("graph", &self.graph);
        kv("iterations", &self.iterations);
        kv("wall_seconds", &format_args!("{:.6}", self.wall_seconds));
        match self.peak_memory_bytes {
            Some(b) => kv("peak_memory_bytes", &b),
            None => kv("peak_memory_bytes", &"n/a"),
        }
        write_counters(&mut out, &self.counters);
        for (name, count) in &self.pair_counts {
            let _ = writeln!(out, "pairs.{name}={count}");
        }
        out
    }
}

pub fn write_counters(out: &mut String, c: &OpCounter) {
    let _ = writeln!(out, "spgemm_calls={}", c.spgemm_calls);
    let _ = writeln!(out, "scalar_ops={}", c.scalar_ops);
    let _ = writeln!(out, "union_entries={}", c.union_entries);
    let _ = writeln!(out, "driver_entries={}", c.driver_entries);
}

/// Splits a stream of records into key-value maps.
pub fn parse_records(text: &str) -> Vec<BTreeMap<String, String>> {
    let mut out = Vec::new();
    let mut cur = BTreeMap::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            continue;
        }
        if let Some((k, v)) = line.split_once('=') {
            cur.insert(k.to_string(), v.to_string());
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Resident set high-water mark, where the OS reports one.
pub fn peak_memory_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}
