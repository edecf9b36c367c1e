//! The `cflr` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 input error, 3 divergence found
//! by `check`, 4 timeout.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand};
use cflr_core::solver::{solve_with, SolveError, Variant, VariantFlags, DEFAULT_B};
use cflr_core::LabeledGraph;

use crate::bench::{bench_variant, Deadline};
use crate::check::{check_variants, CheckOutcome, SolverFn};
use crate::exec::RayonExecutor;
use crate::instances::InstanceSpec;
use crate::io::{format_pairs, load_grammar, read_graph, resolve_nonterminal, GrammarSource, VariantGrammarMismatch};
use crate::report::{pair_counts, peak_memory_bytes, RunReport};

#[derive(Parser, Debug)]
#[command(name = "cflr", version, about = "Matrix-based context-free language reachability")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve one instance and write the pairs of one non-terminal.
    Solve(SolveArgs),
    /// Compare variants against the brute-force oracle.
    Check(CheckArgs),
    /// Time variants over repeated runs.
    Bench(BenchArgs),
}

#[derive(Args, Debug, Clone)]
pub struct GrammarArgs {
    /// Grammar file.
    #[arg(long, conflicts_with = "preset")]
    pub grammar: Option<PathBuf>,
    /// Built-in grammar: fsjpt, fsjpt-opt, fica, fica-opt, fsca, fsca-wcnf,
    /// cscvf, cscvf-wcnf, dyck.
    #[arg(long)]
    pub preset: Option<String>,
}

impl GrammarArgs {
    fn source(&self) -> Option<GrammarSource> {
        match (&self.grammar, &self.preset) {
            (Some(p), _) => Some(GrammarSource::File(p.clone())),
            (None, Some(name)) => Some(GrammarSource::Preset(name.clone())),
            (None, None) => None,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Worker threads for per-rule products.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Forest growth factor.
    #[arg(long, default_value_t = DEFAULT_B)]
    pub b: usize,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[command(flatten)]
    pub grammar: GrammarArgs,
    /// ma, ma1, ma14, ma1234 or ma12345.
    #[arg(long, default_value = "ma1234", value_parser = parse_variant)]
    pub variant: Variant,
    /// Non-terminal to output (default: the start symbol).
    #[arg(long)]
    pub nonterminal: Option<String>,
    /// Pair file (default: stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Run report file (default: stderr).
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = 600)]
    pub timeout_secs: u64,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[command(flatten)]
    pub grammar: GrammarArgs,
    #[arg(long, value_delimiter = ',', default_value = "ma,ma1,ma14,ma1234", value_parser = parse_variant)]
    pub variants: Vec<Variant>,
    /// Refuse larger graphs; the oracle is cubic.
    #[arg(long, default_value_t = 500)]
    pub max_vertices: usize,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Synthetic instance, `chain:N` or `grid:N`, solved with the Dyck
    /// grammar unless a grammar is given.
    #[arg(long, conflicts_with = "graph")]
    pub instance: Option<InstanceSpec>,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[command(flatten)]
    pub grammar: GrammarArgs,
    #[arg(long, value_delimiter = ',', default_value = "ma,ma1,ma14,ma1234", value_parser = parse_variant)]
    pub variants: Vec<Variant>,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, default_value_t = 600)]
    pub timeout_secs: u64,
    /// Report file (default: stdout).
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    Variant::from_name(s).ok_or_else(|| format!("unknown variant `{s}` (expected ma, ma1, ma14, ma1234 or ma12345)"))
}

#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Input(anyhow::Error),
    Divergence(String),
    Timeout(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Divergence(_) => 3,
            Failure::Timeout(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(e) | Failure::Input(e) => write!(f, "{e:#}"),
            Failure::Divergence(m) => write!(f, "divergence: {m}"),
            Failure::Timeout(m) => write!(f, "timeout: {m}"),
        }
    }
}

/// Variant/grammar combinations that cannot work are usage errors; the
/// rest are input errors.
fn classify(e: anyhow::Error) -> Failure {
    if e.is::<VariantGrammarMismatch>() {
        Failure::Usage(e)
    } else {
        Failure::Input(e)
    }
}

fn flags_for(variant: Variant, run: &RunArgs) -> Result<VariantFlags, Failure> {
    let flags = variant.flags().with_b(run.b);
    flags.validate().map_err(|e| Failure::Usage(e.into()))?;
    Ok(flags)
}

fn executor(run: &RunArgs) -> Result<RayonExecutor, Failure> {
    RayonExecutor::new(run.threads).map_err(Failure::Usage)
}

fn write_out(path: Option<&PathBuf>, text: &str, fallback: &mut dyn std::io::Write) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(anyhow!("writing {}: {e}", p.display()))),
        None => fallback.write_all(text.as_bytes()).map_err(|e| Failure::Input(e.into())),
    }
}

pub fn run_solve(args: &SolveArgs) -> Result<(), Failure> {
    let source = args.grammar.source().ok_or_else(|| Failure::Usage(anyhow!("one of --grammar or --preset is required")))?;
    let flags = flags_for(args.variant, &args.run)?;
    let loaded = load_grammar(&source, args.variant).map_err(classify)?;
    let g = &loaded.grammar;
    let graph = read_graph(&args.graph, g).map_err(Failure::Input)?;
    let target = match &args.nonterminal {
        Some(name) => resolve_nonterminal(g, name).map_err(Failure::Input)?,
        None => g.start(),
    };
    let exec = executor(&args.run)?;
    let start = Instant::now();
    let out = match solve_with(&graph, g, &flags, &exec, &mut Deadline::after(Duration::from_secs(args.timeout_secs))) {
        Ok(out) => out,
        Err(SolveError::Interrupted { iterations }) => {
            return Err(Failure::Timeout(format!("OOT after {iterations} iterations ({} s budget)", args.timeout_secs)))
        }
        Err(e) => return Err(Failure::Input(e.into())),
    };
    let wall_seconds = start.elapsed().as_secs_f64();
    write_out(args.output.as_ref(), &format_pairs(&out.matrix, g, &graph, target), &mut std::io::stdout())?;
    let report = RunReport {
        variant: args.variant.name().to_string(),
        grammar: loaded.id.clone(),
        graph: args.graph.display().to_string(),
        pair_counts: pair_counts(&out.matrix, g),
        iterations: out.iterations,
        wall_seconds,
        peak_memory_bytes: peak_memory_bytes(),
        counters: out.counters,
    };
    write_out(args.report.as_ref(), &report.to_record(), &mut std::io::stderr())
}

/// `check` with an injectable solver.
pub fn run_check_with(args: &CheckArgs, solver: &SolverFn<'_>) -> Result<String, Failure> {
    let source = args.grammar.source().ok_or_else(|| Failure::Usage(anyhow!("one of --grammar or --preset is required")))?;
    if let Some(v) = args.variants.iter().find(|v| v.needs_optimized_grammar()) {
        return Err(Failure::Usage(anyhow!("variant {v} changes the grammar; check the optimized preset directly")));
    }
    let variants = args
        .variants
        .iter()
        .map(|&v| Ok((v.name().to_string(), flags_for(v, &args.run)?)))
        .collect::<Result<Vec<_>, Failure>>()?;
    let loaded = load_grammar(&source, Variant::Ma).map_err(classify)?;
    let g = &loaded.grammar;
    let graph: LabeledGraph = read_graph(&args.graph, g).map_err(Failure::Input)?;
    if graph.vertex_count() > args.max_vertices {
        return Err(Failure::Input(anyhow!(
            "graph has {} vertices, above --max-vertices {}",
            graph.vertex_count(),
            args.max_vertices
        )));
    }
    match check_variants(&graph, g, &variants, solver).map_err(|e| Failure::Input(e.into()))? {
        CheckOutcome::Agree { triples } => {
            Ok(format!("ok: oracle and {} variants agree on {triples} triples\n", variants.len()))
        }
        CheckOutcome::Diverge(d) => Err(Failure::Divergence(d.to_string())),
    }
}

pub fn run_check(args: &CheckArgs) -> Result<String, Failure> {
    let exec = executor(&args.run)?;
    let solver = |graph: &LabeledGraph, g: &cflr_core::WcnfGrammar, flags: &VariantFlags| {
        solve_with(graph, g, flags, &exec, &mut cflr_core::solver::NoHooks).map(|o| o.matrix)
    };
    run_check_with(args, &solver)
}

pub fn run_bench(args: &BenchArgs) -> Result<String, Failure> {
    let (instance, graph_of): (String, Box<dyn Fn(&cflr_core::WcnfGrammar) -> anyhow::Result<LabeledGraph>>) =
        match (&args.instance, &args.graph) {
            (Some(spec), _) => {
                let spec = *spec;
                (spec.to_string(), Box::new(move |_| Ok(spec.build())))
            }
            (None, Some(path)) => {
                let path = path.clone();
                (path.display().to_string(), Box::new(move |g| read_graph(&path, g)))
            }
            (None, None) => return Err(Failure::Usage(anyhow!("one of --instance or --graph is required"))),
        };
    let source = match args.grammar.source() {
        Some(s) => s,
        None if args.instance.is_some() => GrammarSource::Preset("dyck".into()),
        None => return Err(Failure::Usage(anyhow!("one of --grammar or --preset is required"))),
    };
    let exec = executor(&args.run)?;
    let timeout = Duration::from_secs(args.timeout_secs);
    let mut out = String::new();
    for &variant in &args.variants {
        let flags = flags_for(variant, &args.run)?;
        let loaded = load_grammar(&source, variant).map_err(classify)?;
        let graph = graph_of(&loaded.grammar).map_err(Failure::Input)?;
        let row = bench_variant(&instance, variant.name(), &graph, &loaded.grammar, &flags, &exec, args.reps, timeout)
            .map_err(|e| Failure::Input(e.into()))?;
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(&format!("grammar={}\n", loaded.id));
        out.push_str(&row.to_record());
    }
    match &args.report {
        Some(p) => {
            fs::write(p, &out).map_err(|e| Failure::Input(anyhow!("writing {}: {e}", p.display())))?;
            Ok(String::new())
        }
        None => Ok(out),
    }
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => run_solve(a).map(|()| String::new()),
        Command::Check(a) => run_check(a),
        Command::Bench(a) => run_bench(a),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            let _ = std::io::stdout().flush();
            0
        }
        Err(f) => {
            eprintln!("cflr: {f}");
            f.exit_code()
        }
    }
}
