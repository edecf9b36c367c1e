//! Built-in grammars for the four analyses, each in its original form and in
//! its hand-written normal form, plus a Dyck-style grammar used by the
//! synthetic benchmarks.

use super::{parse_grammar, Cfg, GrammarError};
use alloc::string::ToString;

/// Field-sensitive Java points-to.
const FSJPT: &str = "\
PT -> PTH alloc
PTH -> eps | assign PTH
PTH -> load_[i] Al store_[i] PTH
FT -> alloc_bar FTH
FTH -> eps | assign_bar FTH
FTH -> store_bar_[i] Al load_bar_[i] FTH
Al -> PT FT
";

const FSJPT_OPT: &str = "\
PT -> alloc | assign PT | LPFS_[i] PT
FT -> alloc_bar | FT assign_bar | FT SPFL_[i]
LPFS_[i] -> LP_[i] FS_[i]
LP_[i] -> load_[i] PT
FS_[i] -> FT store_[i]
SPFL_[i] -> SP_[i] FL_[i]
SP_[i] -> store_bar_[i] PT
FL_[i] -> FT load_bar_[i]
";

/// Field-insensitive C/C++ memory alias.
const FICA: &str = "\
M -> d_bar V d
V -> eps | V1 V2 V3
V1 -> eps | V2 a_bar V1
V2 -> eps | M
V3 -> eps | a V2 V3
";

/// Only `M` is preserved by this rewrite; `V` has no counterpart.
const FICA_OPT: &str = "\
M -> N1 N3 | N2 N3
N1 -> d_bar | N1 a_bar | N2 a_bar
N2 -> N1 M
N3 -> d | a N3 | AM N3
AM -> a M
";

/// Field-sensitive C/C++ alias.
const FSCA: &str = "\
M -> d_bar V d
V -> A_bar V A | f_bar_[i] V f_[i] | M | eps
A -> a M? | eps
A_bar -> M? a_bar | eps
";

const FSCA_WCNF: &str = "\
M -> DV d
DV -> d_bar V
V -> A_bar V | V A | FV_[i] f_[i] | M | eps
FV_[i] -> f_bar_[i] V
A -> a M | a | eps
A_bar -> M a_bar | a_bar | eps
";

/// Context-sensitive C/C++ value flow.
const CSCVF: &str = "\
A -> A A | a | eps
A -> call_[i] A ret_[i]
";

const CSCVF_WCNF: &str = "\
A -> A a | A AH | eps
AH -> call_[i] AR_[i]
AR_[i] -> A ret_[i]
";

/// Non-empty balanced words over one bracket pair.
const DYCK: &str = "\
S -> a S b | S S | a b
";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    Fsjpt,
    FsjptOpt,
    Fica,
    FicaOpt,
    Fsca,
    FscaWcnf,
    Cscvf,
    CscvfWcnf,
    Dyck,
}

impl Preset {
    pub const ALL: [Preset; 9] = [
        Preset::Fsjpt,
        Preset::FsjptOpt,
        Preset::Fica,
        Preset::FicaOpt,
        Preset::Fsca,
        Preset::FscaWcnf,
        Preset::Cscvf,
        Preset::CscvfWcnf,
        Preset::Dyck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fsjpt => "fsjpt",
            Preset::FsjptOpt => "fsjpt-opt",
            Preset::Fica => "fica",
            Preset::FicaOpt => "fica-opt",
            Preset::Fsca => "fsca",
            Preset::FscaWcnf => "fsca-wcnf",
            Preset::Cscvf => "cscvf",
            Preset::CscvfWcnf => "cscvf-wcnf",
            Preset::Dyck => "dyck",
        }
    }

    pub fn from_name(name: &str) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn text(self) -> &'static str {
        match self {
            Preset::Fsjpt => FSJPT,
            Preset::FsjptOpt => FSJPT_OPT,
            Preset::Fica => FICA,
            Preset::FicaOpt => FICA_OPT,
            Preset::Fsca => FSCA,
            Preset::FscaWcnf => FSCA_WCNF,
            Preset::Cscvf => CSCVF,
            Preset::CscvfWcnf => CSCVF_WCNF,
            Preset::Dyck => DYCK,
        }
    }

    /// The hand-transformed counterpart, where one exists.
    pub fn optimized(self) -> Option<Preset> {
        match self {
            Preset::Fsjpt | Preset::FsjptOpt => Some(Preset::FsjptOpt),
            Preset::Fica | Preset::FicaOpt => Some(Preset::FicaOpt),
            _ => None,
        }
    }

    pub fn cfg(self) -> Cfg {
        parse_grammar(self.text()).expect("built-in grammar parses")
    }
}

pub fn preset(name: &str) -> Result<Cfg, GrammarError> {
    Preset::from_name(name)
        .map(Preset::cfg)
        .ok_or_else(|| GrammarError::UnknownPreset(name.to_string()))
}
