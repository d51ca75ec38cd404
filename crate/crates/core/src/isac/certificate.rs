//! Feasibility certificate for points returned on the `(1+ε)`-relaxed
//! problem.
//!
//! Solving with the SINR right-hand side inflated to `(1+ε)σ²` buys slack:
//! once the residuals of the relaxed equality system are small enough,
//!
//! ```text
//! max{ ‖𝒜(W, Z) − (1+ε)σ² 1‖, ‖ℬ(W, Z)‖_F } ≤ tol,
//! tol = ε σ² / (1 + max_k ‖h_k‖²),
//! ```
//!
//! the point `W` is exactly feasible for the original inequality-constrained
//! problem: the slack of user `k` is bounded below by
//! `ε σ² − (1 + ‖h_k‖²)·tol ≥ 0`.

use crate::error::Result;
use crate::scalar::{RVector, Real, CMatrix};

use super::scenario::ScenarioData;

/// Residuals and verdicts of one certificate evaluation.
#[derive(Clone, Copy, Debug)]
pub struct FeasibilityCertificate<T> {
    /// Relative slack `ε` of the relaxed problem.
    pub eps: T,
    /// Termination tolerance `ε σ² / (1 + max_k ‖h_k‖²)`.
    pub tol: T,
    /// `‖𝒜(W, Z) − (1+ε)σ² 1‖`.
    pub sinr_residual: T,
    /// `‖ℬ(W, Z)‖_F`.
    pub coupling_residual: T,
    /// Both residuals within `tol`.
    pub satisfied: bool,
    /// Exact SINR slacks of the original problem are all nonnegative.
    pub original_feasible: bool,
}

/// Tolerance under which a relaxed solution is certified feasible for the
/// original problem.
pub fn certificate_tolerance<T: Real>(scenario: &ScenarioData<T>, eps: T) -> T {
    eps * scenario.sigma2() / (T::one() + scenario.max_channel_gain())
}

/// Evaluates the certificate at `(W, Z)` and, independently, the exact
/// original-problem SINR slacks at the unrelaxed noise level.
pub fn check_certificate<T: Real>(
    scenario: &ScenarioData<T>,
    w: &[CMatrix<T>],
    z: &CMatrix<T>,
    eps: T,
) -> Result<FeasibilityCertificate<T>> {
    let tol = certificate_tolerance(scenario, eps);
    let relaxed_rhs = (T::one() + eps) * scenario.sigma2();

    let a = scenario.apply_a(w, z)?;
    let ones = RVector::from_element(scenario.k(), relaxed_rhs);
    let sinr_residual = (a - ones).norm();
    let coupling_residual = scenario.apply_b(w, z)?.norm();
    let satisfied = sinr_residual.max(coupling_residual) <= tol;

    let slacks = scenario.sinr_slacks(w, scenario.sigma2())?;
    let original_feasible = slacks.iter().all(|&s| s >= T::zero());

    Ok(FeasibilityCertificate {
        eps,
        tol,
        sinr_residual,
        coupling_residual,
        satisfied,
        original_feasible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cre, CMatrix};
    use approx::assert_relative_eq;

    #[test]
    fn tolerance_value() {
        // ε = 1e-3, σ² = 1, all channel gains 1 → tol = 5e-4.
        let h = CMatrix::from_vec(1, 1, vec![cre(1.0)]);
        let s = ScenarioData::new(h, RVector::from_vec(vec![1.0]), 1.0, 1.0).unwrap();
        assert_relative_eq!(certificate_tolerance(&s, 1e-3), 5e-4, epsilon = 1e-18);
    }

    #[test]
    fn exact_relaxed_point_is_certified() {
        // N = 1, K = 1, h = 1, Γ = 1 (ρ = 2), σ² = 1, ε = 1e-3.
        // W₁ = w, W₂ = s, Z = w + s with 2w − (w + s) = (1+ε)σ².
        let h = CMatrix::from_vec(1, 1, vec![cre(1.0)]);
        let s = ScenarioData::new(h, RVector::from_vec(vec![1.0]), 1.0, 10.0).unwrap();
        let eps = 1e-3;
        let w1 = 2.0 + eps;
        let w2 = 1.0;
        let w = vec![
            CMatrix::from_vec(1, 1, vec![cre(w1)]),
            CMatrix::from_vec(1, 1, vec![cre(w2)]),
        ];
        let z = CMatrix::from_vec(1, 1, vec![cre(w1 + w2)]);
        let cert = check_certificate(&s, &w, &z, eps).unwrap();
        assert_relative_eq!(cert.sinr_residual, 0.0, epsilon = 1e-12);
        assert_relative_eq!(cert.coupling_residual, 0.0, epsilon = 1e-12);
        assert!(cert.satisfied);
        assert!(cert.original_feasible);
    }

    #[test]
    fn infeasible_point_fails_certificate() {
        let h = CMatrix::from_vec(1, 1, vec![cre(1.0)]);
        let s = ScenarioData::new(h, RVector::from_vec(vec![1.0]), 1.0, 10.0).unwrap();
        let w = vec![
            CMatrix::from_vec(1, 1, vec![cre(0.1)]),
            CMatrix::from_vec(1, 1, vec![cre(0.0)]),
        ];
        let z = CMatrix::from_vec(1, 1, vec![cre(0.1)]);
        let cert = check_certificate(&s, &w, &z, 1e-3).unwrap();
        assert!(!cert.satisfied);
        assert!(!cert.original_feasible);
    }
}
