//! Deterministic scenario generation.
//!
//! Channels are i.i.d. circularly-symmetric complex Gaussian with unit
//! variance (`re, im ~ N(0, 1/2)`), targets and powers come from
//! [`ScenarioParams`]. Reproducibility across platforms and runs relies on a
//! counter-based generator with an explicit stream-splitting rule:
//!
//! * generator: ChaCha8, keyed by the run seed;
//! * stream id: `(n << 32) | k`, so every `(seed, n, k)` cell draws from its
//!   own independent stream;
//! * draw order: column-major over `H` (users outer, antennas inner), real
//!   part before imaginary part.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use abal_core::scalar::Complex;
use abal_core::{CMatrix, RVector, Scenario64};

use crate::error::BenchError;

/// Channel and constraint parameters; defaults are the desk-scale baseline
/// (linear SINR target 10, unit noise, power budget 100).
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioParams {
    /// Linear SINR target applied to every user.
    pub gamma: f64,
    /// Noise power `σ²`.
    pub sigma2: f64,
    /// Transmit power budget `P_T`.
    pub p_t: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            gamma: 10.0,
            sigma2: 1.0,
            p_t: 100.0,
        }
    }
}

/// Generates the scenario of cell `(n, k)` under the given seed.
/// Identical arguments produce bit-identical scenarios.
pub fn generate_scenario(
    seed: u64,
    n: usize,
    k: usize,
    params: &ScenarioParams,
) -> Result<Scenario64, BenchError> {
    if n <= 1 {
        return Err(BenchError::Config("generator requires n > 1".into()));
    }
    if k == 0 {
        return Err(BenchError::Config("generator requires k >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 32) | k as u64);
    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2)
        .expect("valid normal parameters");

    let mut entries = Vec::with_capacity(n * k);
    for _user in 0..k {
        for _antenna in 0..n {
            let re = normal.sample(&mut rng);
            let im = normal.sample(&mut rng);
            entries.push(Complex::new(re, im));
        }
    }
    let h = CMatrix::from_vec(n, k, entries);
    let gamma = RVector::from_element(k, params.gamma);
    Scenario64::new(h, gamma, params.sigma2, params.p_t).map_err(BenchError::from)
}
