//! Sweep orchestration: per-seed scenarios, per-algorithm runs, and the
//! objective gap against the best compared solution.

use rayon::prelude::*;

use abal_core::isac::isac_solve;
use abal_core::oracles::reference_solve;
use abal_core::Scenario64;

use crate::config::{AlgoName, BenchConfig};
use crate::error::BenchError;
use crate::generate::generate_scenario;
use crate::report::BenchRow;

/// Largest dimensions at which the dense reference anchor is attempted.
const REFERENCE_N_CAP: usize = 16;
const REFERENCE_K_CAP: usize = 4;

/// Runs the configured sweep. Every algorithm within a cell consumes the
/// identical scenario per seed; per-run failures become unsolved rows and
/// never abort the sweep. With `parallel > 1` the (cell, seed) jobs run on a
/// thread pool; row order is independent of scheduling.
pub fn run_benchmark(config: &BenchConfig, parallel: usize) -> Result<Vec<BenchRow>, BenchError> {
    config.validate()?;
    let mut jobs = Vec::new();
    for &(n, k) in &config.grid {
        for seed in 0..config.seeds {
            jobs.push((n, k, seed));
        }
    }

    let run_job = |&(n, k, seed): &(usize, usize, u64)| -> Result<Vec<BenchRow>, BenchError> {
        let scenario = generate_scenario(seed, n, k, &config.channel)?;
        Ok(run_cell_seed(config, &scenario, n, k, seed))
    };

    let nested: Vec<Vec<BenchRow>> = if parallel > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallel)
            .build()
            .map_err(|e| BenchError::Report(e.to_string()))?;
        pool.install(|| jobs.par_iter().map(run_job).collect::<Result<_, _>>())?
    } else {
        jobs.iter().map(run_job).collect::<Result<_, _>>()?
    };
    Ok(nested.into_iter().flatten().collect())
}

fn run_cell_seed(
    config: &BenchConfig,
    scenario: &Scenario64,
    n: usize,
    k: usize,
    seed: u64,
) -> Vec<BenchRow> {
    struct Outcome {
        algo: AlgoName,
        objective: f64,
        iterations: usize,
        time_seconds: f64,
        solved: bool,
    }

    let solver_config = config.solver_config(seed);
    let outcomes: Vec<Outcome> = config
        .algorithms
        .iter()
        .map(|&algo| {
            match isac_solve(scenario, &solver_config, config.eps, config.algorithm(algo)) {
                Ok(run) => Outcome {
                    algo,
                    objective: run.report.objective,
                    iterations: run.report.iterations,
                    time_seconds: run.report.wall_time_secs,
                    solved: run.certificate.satisfied,
                },
                Err(e) => {
                    eprintln!("notice: {algo} failed on (n={n}, k={k}, seed={seed}): {e}");
                    Outcome {
                        algo,
                        objective: f64::INFINITY,
                        iterations: config.max_iter,
                        time_seconds: 0.0,
                        solved: false,
                    }
                }
            }
        })
        .collect();

    // Objective anchor: the best solved objective among the compared
    // algorithms and, at reference scale, the high-accuracy reference solve.
    let mut f_min = f64::INFINITY;
    if config.reference_anchor && n <= REFERENCE_N_CAP && k <= REFERENCE_K_CAP {
        match reference_solve(scenario, config.eps) {
            Ok(reference) => f_min = reference.objective,
            Err(e) => {
                eprintln!("notice: reference anchor failed on (n={n}, k={k}, seed={seed}): {e}");
            }
        }
    }
    for o in &outcomes {
        if o.solved && o.objective < f_min {
            f_min = o.objective;
        }
    }

    outcomes
        .into_iter()
        .map(|o| BenchRow {
            n,
            k,
            algo: o.algo,
            f_gap: (o.solved && f_min.is_finite())
                .then(|| (o.objective - f_min) / f_min.abs()),
            iterations: o.iterations,
            time_seconds: o.time_seconds,
            solved: o.solved,
        })
        .collect()
}
