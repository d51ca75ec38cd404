//! `bench` CLI: sweep benchmarks, single solves, and scenario generation.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 when the
//! requested runs contain failures (budget exhausted or certificate not
//! reached).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use abal_bench::config::{AlgoName, BenchConfig};
use abal_bench::error::BenchError;
use abal_bench::generate::{generate_scenario, ScenarioParams};
use abal_bench::report;
use abal_bench::runner::run_benchmark;
use abal_core::isac::io::{ScenarioFile, SolveResultFile};
use abal_core::isac::isac_solve;

#[derive(Parser)]
#[command(name = "bench", about = "Benchmark harness for the beamforming solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured sweep and emit CSV/JSON reports.
    Run {
        /// JSON configuration file (fields default to the desk-scale baseline).
        #[arg(long)]
        config: PathBuf,
        /// Output directory for `bench_rows.csv` and `bench_report.json`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for independent (cell, seed) runs.
        #[arg(long, default_value_t = 1)]
        parallel: usize,
    },
    /// Solve one scenario file and print the result JSON to stdout.
    Solve {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_enum)]
        algo: AlgoName,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        /// Initial stepsize; also the constant stepsize of `bal_c`.
        #[arg(long, default_value_t = 1.0)]
        tau0: f64,
        #[arg(long, default_value_t = 1e-2)]
        theta: f64,
    },
    /// Generate a scenario file.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
        /// Linear SINR target for every user.
        #[arg(long, default_value_t = 10.0)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
        #[arg(long, default_value_t = 100.0)]
        p_t: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, BenchError> {
    match cli.command {
        Command::Run { config, out, parallel } => cmd_run(&config, out.as_deref(), parallel),
        Command::Solve {
            scenario,
            algo,
            eps,
            max_iter,
            tau0,
            theta,
        } => cmd_solve(&scenario, algo, eps, max_iter, tau0, theta),
        Command::Gen {
            seed,
            n,
            k,
            out,
            gamma,
            sigma2,
            p_t,
        } => cmd_gen(seed, n, k, &out, gamma, sigma2, p_t),
    }
}

fn cmd_run(config_path: &Path, out: Option<&Path>, parallel: usize) -> Result<ExitCode, BenchError> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| BenchError::io(format!("reading {}", config_path.display()), e))?;
    let config: BenchConfig =
        serde_json::from_str(&text).map_err(|e| BenchError::Config(e.to_string()))?;
    config.validate()?;

    let rows = run_benchmark(&config, parallel.max(1))?;

    let out_dir = out
        .map(PathBuf::from)
        .or_else(|| config.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| BenchError::io(format!("creating {}", out_dir.display()), e))?;
    report::write_csv(&rows, &out_dir.join("bench_rows.csv"))?;
    report::write_json(&config, &rows, &out_dir.join("bench_report.json"))?;

    print!("{}", report::render_table(&rows));
    println!(
        "{} runs, {} solved; reports in {}",
        rows.len(),
        rows.iter().filter(|r| r.solved).count(),
        out_dir.display()
    );
    if rows.iter().any(|r| !r.solved) {
        Ok(ExitCode::from(2))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn cmd_solve(
    scenario_path: &Path,
    algo: AlgoName,
    eps: f64,
    max_iter: usize,
    tau0: f64,
    theta: f64,
) -> Result<ExitCode, BenchError> {
    let scenario = ScenarioFile::load(scenario_path)?.to_scenario::<f64>()?;
    let config = BenchConfig {
        max_iter,
        tau0,
        theta,
        bal_tau: tau0,
        eps,
        ..BenchConfig::default()
    };
    let run = isac_solve(
        &scenario,
        &config.solver_config(0),
        eps,
        config.algorithm(algo),
    )?;
    let result = SolveResultFile::from_run(algo.as_str(), scenario.n(), scenario.k(), &run);
    println!("{}", result.to_json()?);
    if run.certificate.satisfied {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(2))
    }
}

fn cmd_gen(
    seed: u64,
    n: usize,
    k: usize,
    out: &Path,
    gamma: f64,
    sigma2: f64,
    p_t: f64,
) -> Result<ExitCode, BenchError> {
    let params = ScenarioParams { gamma, sigma2, p_t };
    let scenario = generate_scenario(seed, n, k, &params)?;
    ScenarioFile::from_scenario(&scenario).save(out)?;
    println!("wrote {}", out.display());
    Ok(ExitCode::SUCCESS)
}
