//! JSON file formats for scenarios and solve results.
//!
//! Complex values are serialized as `[re, im]` pairs; matrices as nested
//! row-major arrays of pairs. The scenario schema is
//!
//! ```json
//! { "n": 2, "k": 1, "sigma2": 1.0, "p_t": 100.0,
//!   "gamma": [10.0],
//!   "h": [[[re, im]], [[re, im]]] }
//! ```
//!
//! with `h[i][j]` the channel coefficient of antenna `i`, user `j`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{real, to_f64, CMatrix, Complex, RVector, Real};
use crate::splitting::RunReport;

use super::certificate::FeasibilityCertificate;
use super::scenario::ScenarioData;
use super::solve::IsacRun;

/// On-disk scenario description.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ScenarioFile {
    pub n: usize,
    pub k: usize,
    pub sigma2: f64,
    pub p_t: f64,
    pub gamma: Vec<f64>,
    pub h: Vec<Vec<[f64; 2]>>,
}

impl ScenarioFile {
    pub fn from_scenario<T: Real>(scenario: &ScenarioData<T>) -> Self {
        let h = (0..scenario.n())
            .map(|i| {
                (0..scenario.k())
                    .map(|j| {
                        let z = scenario.channels()[(i, j)];
                        [to_f64(z.re), to_f64(z.im)]
                    })
                    .collect()
            })
            .collect();
        Self {
            n: scenario.n(),
            k: scenario.k(),
            sigma2: to_f64(scenario.sigma2()),
            p_t: to_f64(scenario.p_t()),
            gamma: scenario.gamma().iter().map(|&g| to_f64(g)).collect(),
            h,
        }
    }

    pub fn to_scenario<T: Real>(&self) -> Result<ScenarioData<T>> {
        if self.h.len() != self.n || self.h.iter().any(|row| row.len() != self.k) {
            return Err(Error::DimensionMismatch(
                "channel matrix does not match n x k".into(),
            ));
        }
        let h = CMatrix::from_fn(self.n, self.k, |i, j| {
            Complex::new(real::<T>(self.h[i][j][0]), real::<T>(self.h[i][j][1]))
        });
        let gamma = RVector::from_fn(self.gamma.len(), |i, _| real::<T>(self.gamma[i]));
        ScenarioData::new(h, gamma, real(self.sigma2), real(self.p_t))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text)?;
        Ok(())
    }
}

/// Certificate fields as serialized in result files.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CertificateFile {
    pub eps: f64,
    pub tol: f64,
    pub sinr_residual: f64,
    pub coupling_residual: f64,
    pub satisfied: bool,
    pub original_feasible: bool,
}

impl CertificateFile {
    pub fn from_certificate<T: Real>(c: &FeasibilityCertificate<T>) -> Self {
        Self {
            eps: to_f64(c.eps),
            tol: to_f64(c.tol),
            sinr_residual: to_f64(c.sinr_residual),
            coupling_residual: to_f64(c.coupling_residual),
            satisfied: c.satisfied,
            original_feasible: c.original_feasible,
        }
    }
}

/// On-disk solve result: headline numbers, the certificate, and the returned
/// point with `W` blocks and `Z` as row-major `[re, im]` matrices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveResultFile {
    pub algorithm: String,
    pub n: usize,
    pub k: usize,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub termination: String,
    pub time_seconds: f64,
    pub certificate: CertificateFile,
    pub w: Vec<Vec<Vec<[f64; 2]>>>,
    pub z: Vec<Vec<[f64; 2]>>,
}

fn matrix_to_pairs<T: Real>(m: &CMatrix<T>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [to_f64(m[(i, j)].re), to_f64(m[(i, j)].im)])
                .collect()
        })
        .collect()
}

impl SolveResultFile {
    pub fn from_run<T: Real>(algorithm: &str, n: usize, k: usize, run: &IsacRun<T>) -> Self {
        let RunReport {
            iterations,
            objective,
            converged,
            wall_time_secs,
            termination,
            ..
        } = &run.report;
        Self {
            algorithm: algorithm.to_string(),
            n,
            k,
            objective: to_f64(*objective),
            iterations: *iterations,
            converged: *converged,
            termination: termination.as_str().to_string(),
            time_seconds: *wall_time_secs,
            certificate: CertificateFile::from_certificate(&run.certificate),
            w: run.primal.w.iter().map(|m| matrix_to_pairs(m)).collect(),
            z: matrix_to_pairs(&run.primal.z),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text)?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
