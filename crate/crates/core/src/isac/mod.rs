//! Cramér-Rao-bound beamforming design for integrated sensing and
//! communication, solved by a customized balanced AL iteration.
//!
//! The original problem minimizes `tr((Σ_k W_k)⁻¹)` over Hermitian PSD
//! covariance blocks subject to per-user SINR constraints and a transmit
//! power budget. Every inequality holds with equality at some solution, so
//! the solvers work on the equality-constrained reformulation with the
//! coupling variable `Z = Σ_k W_k` (see [`scenario`]), a relaxed SINR
//! right-hand side `(1+ε)σ²`, and the feasibility certificate of
//! [`certificate`] that converts a small-residual relaxed point into an
//! exactly feasible point of the original problem.

mod certificate;
mod dual;
pub mod io;
mod prox;
mod scenario;
mod solve;
mod tighten;

pub use certificate::{certificate_tolerance, check_certificate, FeasibilityCertificate};
pub use dual::DualSystemFactor;
pub use prox::{cubic_positive_root, prox_trace_inverse, project_w, simplex_project};
pub use scenario::{objective_from_blocks, objective_from_z, ScenarioData};
pub use solve::{
    customized_iteration, isac_solve, isac_solve_with, operator_norm_sq_isac, DualState,
    IsacAlgorithm, IsacProblem, IsacRun, IsacSolveOptions, IsacState, IterationStats, PrimalState,
};
pub use tighten::tighten_solution;
