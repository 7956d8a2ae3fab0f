//! Naive versus sublinear support identification over linear patterns.
//!
//! For each `(q, α)` the workload is a linear pattern with enough rows for
//! `t`-sparse mixed-sign recovery, Vandermonde ingredients, and `trials`
//! seeded random signals. Per-row solves and class labelling run once per
//! signal, untimed. Only the step from labelled rows to the signed support
//! is timed, sequentially, as the median of `repetitions` passes over all
//! signals.

use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::compose::ComposedMatrix;
use crate::field::Field;
use crate::hash_family::{gen_linear, linear_row_requirement, HashFamilyError};
use crate::ingredient::{make_vandermonde_ingredient, spread_nodes, IngredientError};
use crate::par::Execution;
use crate::recover::{
    identify_naive, identify_sublinear, per_row_solve, RecoverError, RecoveryOptions, RowAnalysis,
    RowRule,
};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    HashFamily(#[from] HashFamilyError),
    #[error(transparent)]
    Ingredient(#[from] IngredientError),
    #[error(transparent)]
    Recover(#[from] RecoverError),
    #[error("{0}")]
    Compose(String),
    #[error("q = {q}, alpha = {alpha}: naive and sublinear supports differ on trial {trial}")]
    Disagreement { q: u32, alpha: usize, trial: usize },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    /// `(q, α)` pairs; each yields `n = q^α` columns.
    pub points: Vec<(u32, usize)>,
    pub t: usize,
    pub trials: usize,
    pub repetitions: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            points: vec![(7, 2), (11, 2), (13, 2), (49, 2), (7, 3), (7, 4)],
            t: 2,
            trials: 20,
            repetitions: 5,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub t: usize,
    pub alpha: usize,
    /// Median seconds per signal.
    pub naive_time: f64,
    pub sublinear_time: f64,
    /// Largest `max(|V⁺|, |V⁻|)` over the trials.
    pub candidate_count: usize,
    pub q: u32,
    pub m: usize,
}

/// Pattern rows needed for mixed-sign `t`-sparse recovery with degree bound `alpha`.
pub fn rows_for(t: usize, alpha: usize) -> usize {
    let w1 = t.div_ceil(2);
    let w2 = (t + 2) / 2;
    linear_row_requirement(alpha, w1, w2).max(alpha)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn time_median<F: FnMut()>(reps: usize, mut f: F) -> f64 {
    let samples = (0..reps)
        .map(|_| {
            let start = Instant::now();
            f();
            start.elapsed().as_secs_f64()
        })
        .collect();
    median(samples)
}

/// Runs one workload point.
pub fn bench_point(q: u32, alpha: usize, cfg: &BenchConfig) -> Result<BenchRow, SweepError> {
    if cfg.trials == 0 || cfg.repetitions == 0 {
        return Err(SweepError::BadConfig(
            "trials and repetitions must be positive".into(),
        ));
    }
    let field = Field::of_order(q).map_err(|e| SweepError::BadConfig(e.to_string()))?;
    let m = rows_for(cfg.t, alpha);
    let pattern = gen_linear(&field, alpha, m)?;
    let nodes = spread_nodes(q as usize);
    let opts = RecoveryOptions {
        execution: Execution::Sequential,
        ..RecoveryOptions::default()
    };
    let ingredient =
        make_vandermonde_ingredient(q as usize, cfg.t.max(1), Some(&nodes), &opts.tol)?;
    let c = ComposedMatrix::homogeneous(&pattern, &ingredient)
        .map_err(|e| SweepError::Compose(e.to_string()))?;
    let lp = c
        .linear()
        .expect("generated families carry row labels")
        .clone();
    let n = c.cols();
    if cfg.t > n {
        return Err(SweepError::BadConfig(format!(
            "t = {} exceeds n = {n}",
            cfg.t
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ ((q as u64) << 32) ^ alpha as u64);
    let bounds = vec![cfg.t; m];
    let mut analyses = Vec::with_capacity(cfg.trials);
    for _ in 0..cfg.trials {
        let mut x = vec![0.0; n];
        for j in sample(&mut rng, n, cfg.t) {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            x[j] = sign * rng.gen_range(0.5..2.0);
        }
        let y = c
            .sample(&x)
            .map_err(|e| SweepError::Compose(e.to_string()))?;
        let rows = per_row_solve(&c, &y, &bounds, &opts)?;
        analyses.push(RowAnalysis::new(
            c.pattern(),
            &rows,
            RowRule::General,
            &opts.tol,
        )?);
    }
    let mut candidate_count = 0;
    for (trial, a) in analyses.iter().enumerate() {
        let naive = identify_naive(c.pattern(), a, Execution::Sequential);
        let (fast, stats) = identify_sublinear(&lp, a, Execution::Sequential)?;
        if naive != fast {
            return Err(SweepError::Disagreement { q, alpha, trial });
        }
        candidate_count = candidate_count.max(stats.max());
    }
    let naive_total = time_median(cfg.repetitions, || {
        for a in &analyses {
            std::hint::black_box(identify_naive(c.pattern(), a, Execution::Sequential));
        }
    });
    let sublinear_total = time_median(cfg.repetitions, || {
        for a in &analyses {
            std::hint::black_box(identify_sublinear(&lp, a, Execution::Sequential).ok());
        }
    });
    Ok(BenchRow {
        n,
        t: cfg.t,
        alpha,
        naive_time: naive_total / cfg.trials as f64,
        sublinear_time: sublinear_total / cfg.trials as f64,
        candidate_count,
        q,
        m,
    })
}

pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>, SweepError> {
    cfg.points
        .iter()
        .map(|&(q, a)| bench_point(q, a, cfg))
        .collect()
}

pub const CSV_HEADER: &str = "n,t,alpha,naive_time,sublinear_time,candidate_count,q,m";

pub fn write_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.6e},{:.6e},{},{},{}\n",
            r.n, r.t, r.alpha, r.naive_time, r.sublinear_time, r.candidate_count, r.q, r.m
        ));
    }
    out
}

/// A standalone matplotlib script plotting the CSV at `csv_path`.
pub fn plot_script(csv_path: &str) -> String {
    format!(
        r#"#!/usr/bin/env python3
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else {csv_path:?}
with open(path) as f:
    rows = list(csv.DictReader(f))
rows.sort(key=lambda r: int(r["n"]))
n = [int(r["n"]) for r in rows]
naive = [float(r["naive_time"]) for r in rows]
fast = [float(r["sublinear_time"]) for r in rows]

fig, ax = plt.subplots()
ax.loglog(n, naive, "o-", label="naive (scan all columns)")
ax.loglog(n, fast, "s-", label="sublinear (interpolate candidates)")
for r, x, y in zip(rows, n, fast):
    ax.annotate("q={{}} a={{}}".format(r["q"], r["alpha"]), (x, y), fontsize=7)
ax.set_xlabel("columns n")
ax.set_ylabel("support identification time per signal (s)")
ax.legend()
fig.tight_layout()
out = path.rsplit(".", 1)[0] + ".png"
fig.savefig(out, dpi=150)
print("wrote", out)
"#
    )
}
