//! Benchmark configuration and algorithm naming.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use abal_core::isac::IsacAlgorithm;
use abal_core::splitting::AbalConfig;

use crate::error::BenchError;
use crate::generate::ScenarioParams;

/// Algorithms the harness can compare.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum AlgoName {
    #[value(name = "abal")]
    Abal,
    #[value(name = "bal_c")]
    BalC,
    #[value(name = "tfpdhg")]
    Tfpdhg,
}

impl AlgoName {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlgoName::Abal => "abal",
            AlgoName::BalC => "bal_c",
            AlgoName::Tfpdhg => "tfpdhg",
        }
    }
}

impl fmt::Display for AlgoName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgoName {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "abal" => Ok(AlgoName::Abal),
            "bal_c" => Ok(AlgoName::BalC),
            "tfpdhg" => Ok(AlgoName::Tfpdhg),
            other => Err(BenchError::Config(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// Full sweep configuration; every field has a desk-scale default, so a
/// config file only needs to override what it changes.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    /// `(N, K)` cells to sweep.
    pub grid: Vec<(usize, usize)>,
    /// Monte-Carlo runs per cell; seeds are `0..seeds`.
    pub seeds: u64,
    /// Relaxation of the SINR right-hand side.
    pub eps: f64,
    /// Algorithms to compare on each scenario.
    pub algorithms: Vec<AlgoName>,
    pub max_iter: usize,
    pub tau0: f64,
    pub theta: f64,
    pub eta_lo: f64,
    pub eta_hi: f64,
    /// Constant stepsize of the `bal_c` baseline.
    pub bal_tau: f64,
    /// Dual stepsize of the `bal_c` baseline.
    pub bal_gamma: f64,
    /// Dual scaling of the `tfpdhg` baseline.
    pub upsilon: f64,
    /// Channel generation parameters.
    pub channel: ScenarioParams,
    /// Anchor the objective gap with a high-accuracy reference solve (only
    /// attempted at reference scale, `N ≤ 16`, `K ≤ 4`).
    pub reference_anchor: bool,
    /// Default output directory for reports.
    pub out_dir: Option<String>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            grid: vec![(8, 2), (8, 4), (16, 2), (16, 4)],
            seeds: 20,
            eps: 1e-3,
            algorithms: vec![AlgoName::Abal, AlgoName::BalC, AlgoName::Tfpdhg],
            max_iter: 10_000,
            tau0: 1.0,
            theta: 1e-2,
            eta_lo: 1e-2,
            eta_hi: 1e2,
            bal_tau: 1.0,
            bal_gamma: 1.0,
            upsilon: 1.0,
            channel: ScenarioParams::default(),
            reference_anchor: true,
            out_dir: None,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.grid.is_empty() {
            return Err(BenchError::Config("grid must not be empty".into()));
        }
        for &(n, k) in &self.grid {
            if n <= 1 || k == 0 {
                return Err(BenchError::Config(format!(
                    "cell ({n}, {k}) needs n > 1 and k >= 1"
                )));
            }
        }
        if self.seeds == 0 {
            return Err(BenchError::Config("seeds must be at least 1".into()));
        }
        if !(self.eps > 0.0) {
            return Err(BenchError::Config("eps must be positive".into()));
        }
        if self.algorithms.is_empty() {
            return Err(BenchError::Config("at least one algorithm".into()));
        }
        self.solver_config(0)
            .validate()
            .map_err(|e| BenchError::Config(e.to_string()))?;
        Ok(())
    }

    /// Solver configuration for one run; the seed feeds any randomized
    /// pieces (the TF-PDHG power iteration).
    pub fn solver_config(&self, seed: u64) -> AbalConfig<f64> {
        AbalConfig {
            tau0: self.tau0,
            theta: self.theta,
            eta_lo: self.eta_lo,
            eta_hi: self.eta_hi,
            max_iter: self.max_iter,
            seed,
            ..AbalConfig::default()
        }
    }

    pub fn algorithm(&self, name: AlgoName) -> IsacAlgorithm<f64> {
        match name {
            AlgoName::Abal => IsacAlgorithm::Abal,
            AlgoName::BalC => IsacAlgorithm::BalConstant {
                tau: self.bal_tau,
                gamma: self.bal_gamma,
            },
            AlgoName::Tfpdhg => IsacAlgorithm::TfPdhg {
                upsilon: self.upsilon,
            },
        }
    }
}
