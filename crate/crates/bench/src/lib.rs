//! Benchmark harness for the beamforming solvers: deterministic scenario
//! generation, sweep orchestration, and CSV/JSON reporting. The `bench`
//! binary wraps this library; see the crate README for the CLI surface.

// `!(x > 0)` guards reject NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod generate;
pub mod report;
pub mod runner;

pub use config::{AlgoName, BenchConfig};
pub use error::BenchError;
pub use generate::{generate_scenario, ScenarioParams};
pub use report::{parse_csv_str, render_table, summarize, to_csv_string, BenchRow, CellSummary};
pub use runner::run_benchmark;
