//! Repeated timed runs.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use cflr_core::exec::Executor;
use cflr_core::solver::{solve_with, SolveError, SolveHooks, SolveOutput, VariantFlags};
use cflr_core::{LabeledGraph, OpCounter, WcnfGrammar};

use crate::report::{pair_counts, write_counters};

/// Stops a run once the wall-clock budget is spent. Checked between
/// iterations, so a run can overshoot by one iteration.
pub struct Deadline {
    at: Instant,
}

impl Deadline {
    pub fn after(budget: Duration) -> Self {
        Deadline { at: Instant::now() + budget }
    }
}

impl SolveHooks for Deadline {
    fn should_stop(&mut self) -> bool {
        Instant::now() >= self.at
    }
}

/// Mean and unbiased standard deviation; the latter needs two samples.
pub fn mean_and_sd(xs: &[f64]) -> (f64, Option<f64>) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, None);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Some(var.sqrt()))
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub instance: String,
    pub variant: String,
    pub seconds: Vec<f64>,
    /// Last successful run; `None` when a run timed out.
    pub result: Option<(usize, OpCounter, Vec<(String, usize)>)>,
}

impl BenchRow {
    pub fn timed_out(&self) -> bool {
        self.result.is_none()
    }

    pub fn to_record(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "instance={}", self.instance);
        let _ = writeln!(out, "variant={}", self.variant);
        let _ = writeln!(out, "reps={}", self.seconds.len());
        match &self.result {
            None => {
                let _ = writeln!(out, "status=OOT");
            }
            Some((iterations, counters, pairs)) => {
                let (mean, sd) = mean_and_sd(&self.seconds);
                let _ = writeln!(out, "status=ok");
                let _ = writeln!(out, "mean_seconds={mean:.6}");
                match sd {
                    Some(sd) => writeln!(out, "stddev_seconds={sd:.6}"),
                    None => writeln!(out, "stddev_seconds=n/a"),
                }
                .ok();
                let _ = writeln!(out, "iterations={iterations}");
                write_counters(&mut out, counters);
                for (name, count) in pairs {
                    let _ = writeln!(out, "pairs.{name}={count}");
                }
            }
        }
        out
    }
}

/// Runs one variant `reps` times, stopping at the first timeout.
pub fn bench_variant<E: Executor>(
    instance: &str,
    variant: &str,
    graph: &LabeledGraph,
    g: &WcnfGrammar,
    flags: &VariantFlags,
    exec: &E,
    reps: usize,
    timeout: Duration,
) -> Result<BenchRow, SolveError> {
    let mut row = BenchRow { instance: instance.to_string(), variant: variant.to_string(), seconds: Vec::new(), result: None };
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        match solve_with(graph, g, flags, exec, &mut Deadline::after(timeout)) {
            Ok(SolveOutput { matrix, iterations, counters }) => {
                row.seconds.push(start.elapsed().as_secs_f64());
                row.result = Some((iterations, counters, pair_counts(&matrix, g)));
            }
            Err(SolveError::Interrupted { .. }) => {
                row.seconds.push(start.elapsed().as_secs_f64());
                row.result = None;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(row)
}
