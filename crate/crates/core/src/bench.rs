//! Iteration statistics over batches of random standard-normal instances.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::generate::{dataset_seed, generate_normal};
use crate::oracle::kkt_check;
use crate::solver::{solve, SolverConfig};

/// KKT tolerance applied to every benchmark solve, relative to scale.
pub const BENCH_KKT_EPS: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    /// Datasets that solved and passed the KKT check; means are over these.
    pub datasets: usize,
    pub mean_iters: f64,
    pub mean_updates: f64,
    pub mean_time_s: f64,
    /// Datasets excluded from the means, with the reason.
    pub failures: Vec<BenchFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchFailure {
    pub dataset: usize,
    pub seed: u64,
    pub reason: String,
}

struct Sample {
    iters: usize,
    updates: usize,
    time_s: f64,
}

fn run_one(n: usize, m: usize, seed: u64, cfg: &SolverConfig) -> Result<Sample, String> {
    let inst = generate_normal(n, m, seed).map_err(|e| e.to_string())?;
    let res = solve(&inst, cfg).map_err(|e| e.to_string())?;
    let kkt = kkt_check(&inst, &res.x_star, &res.dual, BENCH_KKT_EPS);
    if !kkt.passed {
        return Err(format!("KKT check failed (worst residual {:e})", kkt.worst()));
    }
    Ok(Sample {
        iters: res.stats.major_iterations,
        updates: res.stats.spair_updates,
        time_s: res.stats.wall_time.as_secs_f64(),
    })
}

/// Solves `datasets` generated instances per `(n, m)` cell. Datasets run in
/// parallel; rows and failures are ordered by cell and dataset index.
pub fn run_bench(grid: &[(usize, usize)], datasets: usize, seed: u64, cfg: &SolverConfig) -> Vec<BenchRow> {
    grid.iter()
        .map(|&(n, m)| {
            let outcomes: Vec<_> = (0..datasets)
                .into_par_iter()
                .map(|k| {
                    let s = dataset_seed(seed, n, m, k);
                    (k, s, run_one(n, m, s, cfg))
                })
                .collect();
            let mut ok = Vec::new();
            let mut failures = Vec::new();
            for (dataset, seed, out) in outcomes {
                match out {
                    Ok(s) => ok.push(s),
                    Err(reason) => failures.push(BenchFailure { dataset, seed, reason }),
                }
            }
            let mean = |f: &dyn Fn(&Sample) -> f64| {
                if ok.is_empty() {
                    f64::NAN
                } else {
                    ok.iter().map(f).sum::<f64>() / ok.len() as f64
                }
            };
            BenchRow {
                n,
                m,
                datasets: ok.len(),
                mean_iters: mean(&|s| s.iters as f64),
                mean_updates: mean(&|s| s.updates as f64),
                mean_time_s: mean(&|s| s.time_s),
                failures,
            }
        })
        .collect()
}

/// Plain-text table: one line per cell with mean iterations, mean support
/// pair updates and mean wall time.
pub fn format_table(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>6} {:>7} {:>9} {:>10} {:>14} {:>12}",
        "n", "m", "datasets", "Iters", "S-pair upd.", "Time (s)"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:>6} {:>7} {:>9} {:>10.2} {:>14.2} {:>12.6}",
            r.n, r.m, r.datasets, r.mean_iters, r.mean_updates, r.mean_time_s
        );
        for f in &r.failures {
            let _ = writeln!(out, "       excluded dataset {} (seed {}): {}", f.dataset, f.seed, f.reason);
        }
    }
    out
}

pub fn rows_to_json(rows: &[BenchRow]) -> String {
    serde_json::to_string_pretty(rows).expect("plain data serializes")
}
