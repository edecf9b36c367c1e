//! Weak Chomsky Normal Form: every production is `A -> t`, `A -> eps` or
//! `C -> A B` over non-terminals.
//!
//! Hand-written normal forms commonly pair a terminal with a non-terminal in
//! a binary rule (`A -> A a`). [`validate_wcnf`] accepts that shorthand and
//! lifts the terminal into a unit non-terminal (`a#t -> a`); it rejects
//! everything else that is not in normal form. [`to_wcnf`] normalizes any
//! grammar.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::{Cfg, Production, Symbol};

pub type NontermId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BinaryRule {
    pub lhs: NontermId,
    pub left: NontermId,
    pub right: NontermId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    RhsTooLong(usize),
    TerminalPair,
    UnitRule,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub production: Production,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ViolationKind::RhsTooLong(n) => {
                write!(f, "`{}`: right-hand side has {} symbols", self.production, n)
            }
            ViolationKind::TerminalPair => {
                write!(f, "`{}`: binary rule over two terminals", self.production)
            }
            ViolationKind::UnitRule => write!(f, "`{}`: unit rule", self.production),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("grammar is not in weak Chomsky normal form ({} violations)", violations.len())]
pub struct WcnfError {
    pub violations: Vec<Violation>,
}

/// A grammar in Weak Chomsky Normal Form, with its rules split by shape.
///
/// Non-terminal ids index [`WcnfGrammar::nonterminals`]. An indexed
/// non-terminal (`AR_[i]`) has a single id standing for the whole family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WcnfGrammar {
    source: Cfg,
    nonterminals: Vec<Symbol>,
    ids: BTreeMap<Symbol, NontermId>,
    start: NontermId,
    terminal_rules: BTreeMap<Symbol, BTreeSet<NontermId>>,
    binary_rules: Vec<BinaryRule>,
    indexed_families: Vec<Production>,
}

impl WcnfGrammar {
    /// The grammar this one was built from, verbatim.
    pub fn source(&self) -> &Cfg {
        &self.source
    }

    /// Source non-terminals first, then helpers introduced by normalization.
    pub fn nonterminals(&self) -> &[Symbol] {
        &self.nonterminals
    }

    pub fn nonterminal_id(&self, s: &Symbol) -> Option<NontermId> {
        self.ids.get(s).copied()
    }

    pub fn nonterminal(&self, id: NontermId) -> &Symbol {
        &self.nonterminals[id]
    }

    pub fn is_family(&self, id: NontermId) -> bool {
        self.nonterminals[id].is_family()
    }

    pub fn start(&self) -> NontermId {
        self.start
    }

    pub fn terminals(&self) -> &[Symbol] {
        self.source.terminals()
    }

    /// Terminal (or epsilon) to the non-terminals deriving it directly.
    pub fn terminal_rules(&self) -> &BTreeMap<Symbol, BTreeSet<NontermId>> {
        &self.terminal_rules
    }

    pub fn binary_rules(&self) -> &[BinaryRule] {
        &self.binary_rules
    }

    /// Productions quantified over the index variable; each stands for one
    /// concrete production per index value.
    pub fn indexed_families(&self) -> &[Production] {
        &self.indexed_families
    }

    pub fn index_var(&self) -> Option<&str> {
        self.source.index_var()
    }

    /// Every production in strict normal form, terminal rules first.
    pub fn productions(&self) -> Vec<Production> {
        let mut out = Vec::new();
        for (t, lhs) in &self.terminal_rules {
            for &a in lhs {
                let rhs = if t.is_epsilon() { vec![] } else { vec![t.clone()] };
                out.push(Production::new(self.nonterminals[a].clone(), rhs));
            }
        }
        for r in &self.binary_rules {
            out.push(Production::new(
                self.nonterminals[r.lhs].clone(),
                vec![self.nonterminals[r.left].clone(), self.nonterminals[r.right].clone()],
            ));
        }
        out
    }
}

struct Builder {
    nonterminals: Vec<Symbol>,
    ids: BTreeMap<Symbol, NontermId>,
    taken: BTreeSet<String>,
    lifted: BTreeMap<Symbol, NontermId>,
    terminal_rules: BTreeMap<Symbol, BTreeSet<NontermId>>,
    binary_rules: BTreeSet<BinaryRule>,
    rule_order: Vec<BinaryRule>,
}

impl Builder {
    fn new(cfg: &Cfg) -> Self {
        let mut b = Builder {
            nonterminals: Vec::new(),
            ids: BTreeMap::new(),
            taken: cfg
                .nonterminals()
                .iter()
                .chain(cfg.terminals())
                .map(|s| String::from(s.base()))
                .collect(),
            lifted: BTreeMap::new(),
            terminal_rules: BTreeMap::new(),
            binary_rules: BTreeSet::new(),
            rule_order: Vec::new(),
        };
        for s in cfg.nonterminals() {
            b.intern(s.clone());
        }
        b
    }

    fn intern(&mut self, s: Symbol) -> NontermId {
        if let Some(&id) = self.ids.get(&s) {
            return id;
        }
        let id = self.nonterminals.len();
        self.taken.insert(String::from(s.base()));
        self.ids.insert(s.clone(), id);
        self.nonterminals.push(s);
        id
    }

    fn add_terminal_rule(&mut self, t: Symbol, lhs: NontermId) {
        self.terminal_rules.entry(t).or_default().insert(lhs);
    }

    fn add_binary(&mut self, rule: BinaryRule) {
        if self.binary_rules.insert(rule) {
            self.rule_order.push(rule);
        }
    }

    /// Non-terminal deriving exactly the terminal `t`.
    fn lift(&mut self, t: &Symbol) -> NontermId {
        if let Some(&id) = self.lifted.get(t) {
            return id;
        }
        let name = fresh_name(&self.taken, &format!("{}#t", t.base()));
        let mut s = Symbol::nonterminal(name);
        if let Some(v) = t.index_var() {
            s = s.with_var(v);
        }
        let id = self.intern(s);
        self.add_terminal_rule(t.clone(), id);
        self.lifted.insert(t.clone(), id);
        id
    }

    fn operand(&mut self, s: &Symbol) -> NontermId {
        if s.is_terminal() {
            self.lift(s)
        } else {
            self.ids[s]
        }
    }

    fn finish(self, source: Cfg, indexed_families: Vec<Production>) -> WcnfGrammar {
        let start = self.ids[source.start()];
        WcnfGrammar {
            source,
            nonterminals: self.nonterminals,
            ids: self.ids,
            start,
            terminal_rules: self.terminal_rules,
            binary_rules: self.rule_order,
            indexed_families,
        }
    }
}

fn fresh_name(taken: &BTreeSet<String>, preferred: &str) -> String {
    if !taken.contains(preferred) {
        return String::from(preferred);
    }
    (2..).map(|k| format!("{preferred}{k}")).find(|n| !taken.contains(n)).unwrap()
}

/// Checks the normal form and splits the rules. A single terminal in a binary
/// rule is accepted and lifted; two terminals, unit rules and longer
/// right-hand sides are reported.
pub fn validate_wcnf(g: &Cfg) -> Result<WcnfGrammar, WcnfError> {
    build(g.clone(), g, false)
}

fn build(source: Cfg, shaped: &Cfg, lift_pairs: bool) -> Result<WcnfGrammar, WcnfError> {
    let mut b = Builder::new(shaped);
    let mut violations = Vec::new();
    let mut families = Vec::new();
    for p in shaped.productions() {
        let lhs = b.ids[&p.lhs];
        match p.rhs.as_slice() {
            [] => b.add_terminal_rule(Symbol::epsilon(), lhs),
            [t] if t.is_terminal() => b.add_terminal_rule(t.clone(), lhs),
            [_] => violations.push(Violation { production: p.clone(), kind: ViolationKind::UnitRule }),
            [x, y] if x.is_terminal() && y.is_terminal() && !lift_pairs => violations
                .push(Violation { production: p.clone(), kind: ViolationKind::TerminalPair }),
            [x, y] => {
                let left = b.operand(x);
                let right = b.operand(y);
                b.add_binary(BinaryRule { lhs, left, right });
            }
            rhs => violations.push(Violation {
                production: p.clone(),
                kind: ViolationKind::RhsTooLong(rhs.len()),
            }),
        }
        if p.is_indexed() {
            families.push(p.clone());
        }
    }
    if !violations.is_empty() {
        return Err(WcnfError { violations });
    }
    Ok(b.finish(source, families))
}

/// The grammar as given when it already is in normal form, otherwise its
/// normalization.
pub fn load_wcnf(g: &Cfg) -> WcnfGrammar {
    validate_wcnf(g).unwrap_or_else(|_| to_wcnf(g))
}

/// Normalizes any grammar into an equivalent WCNF grammar.
///
/// Long right-hand sides are split left to right through fresh chain
/// non-terminals `lhs#k`; a chain non-terminal is indexed iff the suffix it
/// derives mentions the index variable. A unit rule `A -> B` becomes
/// `A -> B eps#` with `eps# -> eps`. Terminals in binary rules are lifted.
/// Epsilon productions are kept.
pub fn to_wcnf(g: &Cfg) -> WcnfGrammar {
    let mut taken: BTreeSet<String> = g
        .nonterminals()
        .iter()
        .chain(g.terminals())
        .map(|s| String::from(s.base()))
        .collect();
    let var = g.index_var().map(String::from);
    let mut productions = Vec::new();
    let mut eps_helper: Option<Symbol> = None;
    let mut extra = Vec::new();
    let mut chain_counters: BTreeMap<String, usize> = BTreeMap::new();

    for p in g.productions() {
        match p.rhs.len() {
            1 if p.rhs[0].is_nonterminal() => {
                let helper = eps_helper
                    .get_or_insert_with(|| {
                        let name = fresh_name(&taken, "eps#");
                        taken.insert(name.clone());
                        let h = Symbol::nonterminal(name);
                        extra.push(Production::new(h.clone(), vec![]));
                        h
                    })
                    .clone();
                productions.push(Production::new(p.lhs.clone(), vec![p.rhs[0].clone(), helper]));
            }
            0..=2 => productions.push(p.clone()),
            n => {
                let mut current = p.lhs.clone();
                for j in 0..n - 2 {
                    let counter = chain_counters.entry(String::from(p.lhs.base())).or_insert(0usize);
                    let name = loop {
                        *counter += 1;
                        let candidate = format!("{}#{}", p.lhs.base(), counter);
                        if !taken.contains(&candidate) {
                            break candidate;
                        }
                    };
                    taken.insert(name.clone());
                    let mut helper = Symbol::nonterminal(name);
                    if p.rhs[j + 1..].iter().any(Symbol::is_family) {
                        if let Some(v) = &var {
                            helper = helper.with_var(v.clone());
                        }
                    }
                    productions.push(Production::new(current, vec![p.rhs[j].clone(), helper.clone()]));
                    current = helper;
                }
                productions.push(Production::new(current, p.rhs[n - 2..].to_vec()));
            }
        }
    }
    productions.extend(extra);
    let shaped = Cfg::new(productions, Some(g.start().clone()))
        .expect("normalization keeps the grammar well formed");
    build(g.clone(), &shaped, true).expect("normalized grammar is in WCNF")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{parse_grammar, preset};
    use alloc::string::ToString;

    #[test]
    fn accepts_figure_normal_forms() {
        let g = validate_wcnf(&preset("cscvf-wcnf").unwrap()).unwrap();
        assert_eq!(g.binary_rules().len(), 4);
        assert!(validate_wcnf(&preset("fica-opt").unwrap()).is_ok());
    }

    #[test]
    fn rejects_terminal_pair() {
        let err = validate_wcnf(&parse_grammar("S -> a b").unwrap()).unwrap_err();
        assert_eq!(err.violations.len(), 1);
        assert_eq!(err.violations[0].kind, ViolationKind::TerminalPair);
    }

    #[test]
    fn reports_every_violation() {
        let g = parse_grammar("S -> a S b | T\nT -> t").unwrap();
        let err = validate_wcnf(&g).unwrap_err();
        let kinds: Vec<_> = err.violations.iter().map(|v| v.kind.clone()).collect();
        assert_eq!(kinds, vec![ViolationKind::RhsTooLong(3), ViolationKind::UnitRule]);
        assert!(err.violations[0].to_string().contains("3 symbols"));
    }

    #[test]
    fn fsjpt_opt_families() {
        let g = validate_wcnf(&preset("fsjpt-opt").unwrap()).unwrap();
        let fam: BTreeSet<String> = g
            .indexed_families()
            .iter()
            .filter(|p| p.lhs.is_family())
            .map(|p| p.to_string())
            .collect();
        let expected: BTreeSet<String> = [
            "LPFS_[i] -> LP_[i] FS_[i]",
            "LP_[i] -> load_[i] PT",
            "FS_[i] -> FT store_[i]",
            "SPFL_[i] -> SP_[i] FL_[i]",
            "SP_[i] -> store_bar_[i] PT",
            "FL_[i] -> FT load_bar_[i]",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        assert_eq!(fam, expected);
        // PT -> LPFS_[i] PT and FT -> FT SPFL_[i] quantify over the index too
        assert_eq!(g.indexed_families().len(), 8);
    }

    #[test]
    fn lifting_shares_one_nonterminal_per_terminal() {
        let g = validate_wcnf(&parse_grammar("S -> a S | S a | a").unwrap()).unwrap();
        let lifted = g.nonterminal_id(&Symbol::nonterminal("a#t")).unwrap();
        assert_eq!(g.nonterminals().len(), 2);
        assert_eq!(g.terminal_rules()[&Symbol::terminal("a")], [0, lifted].into_iter().collect());
    }

    #[test]
    fn to_wcnf_binarizes_left_to_right() {
        let g = to_wcnf(&parse_grammar("S -> a S b").unwrap());
        let lines: Vec<String> = g.productions().iter().map(|p| p.to_string()).collect();
        assert_eq!(lines, vec!["a#t -> a", "b#t -> b", "S -> a#t S#1", "S#1 -> S b#t"]);
        for p in g.productions() {
            assert!(p.rhs.len() <= 2);
        }
    }

    #[test]
    fn to_wcnf_indexes_chain_helpers() {
        let g = to_wcnf(&preset("fsjpt").unwrap());
        let h1 = g.nonterminal_id(&Symbol::nonterminal("PTH#1").with_var("i"));
        let h2 = g.nonterminal_id(&Symbol::nonterminal("PTH#2").with_var("i"));
        assert!(h1.is_some() && h2.is_some());
        let lines: Vec<String> = g.productions().iter().map(|p| p.to_string()).collect();
        assert!(lines.contains(&"PTH -> load#t_[i] PTH#1_[i]".to_string()));
        assert!(lines.contains(&"PTH#1_[i] -> Al PTH#2_[i]".to_string()));
        assert!(lines.contains(&"PTH#2_[i] -> store#t_[i] PTH".to_string()));
    }

    #[test]
    fn to_wcnf_unit_rule_uses_epsilon_helper() {
        let g = to_wcnf(&preset("fsca-wcnf").unwrap());
        let lines: Vec<String> = g.productions().iter().map(|p| p.to_string()).collect();
        assert!(lines.contains(&"V -> M eps#".to_string()));
        assert!(lines.contains(&"eps# -> eps".to_string()));
    }

    #[test]
    fn to_wcnf_keeps_normal_form_input() {
        for name in ["cscvf-wcnf", "fsjpt-opt", "fica-opt"] {
            let cfg = preset(name).unwrap();
            assert_eq!(to_wcnf(&cfg), validate_wcnf(&cfg).unwrap(), "{name}");
        }
        // only the unit rule V -> M changes
        let cfg = preset("fsca-wcnf").unwrap();
        let normalized: Vec<String> =
            to_wcnf(&cfg).productions().iter().map(|q| q.to_string()).collect();
        for p in cfg.productions() {
            let all_nonterminal_pair = p.rhs.len() == 2 && p.rhs.iter().all(Symbol::is_nonterminal);
            if all_nonterminal_pair {
                assert!(normalized.contains(&p.to_string()), "{p}");
            }
        }
    }

    #[test]
    fn validate_of_normalized_is_stable() {
        for name in ["fsjpt", "fica", "fsca", "cscvf", "dyck"] {
            let g = to_wcnf(&preset(name).unwrap());
            for p in g.productions() {
                assert!(p.rhs.len() <= 2);
                if p.rhs.len() == 2 {
                    assert!(p.rhs.iter().all(Symbol::is_nonterminal), "{p}");
                }
                if p.rhs.len() == 1 {
                    assert!(p.rhs[0].is_terminal(), "{p}");
                }
            }
        }
    }
}
