//! Constructive activation of every inequality constraint at a feasible
//! point, without increasing the objective.
//!
//! The original problem always has a solution where both the power budget
//! and every SINR constraint hold with equality, and the construction is
//! explicit:
//!
//! 1. scale the whole point by `ϱ = P_T / Σ_k tr(W_k) ≥ 1`, which activates
//!    the power constraint and strictly decreases `tr((Σ W_k)⁻¹)` when
//!    `ϱ > 1`;
//! 2. for each user `k` with strict SINR slack, shrink its block by
//!    `ϱ̂_k = (⟨Q_k, Σ_i W_i⟩ + σ²) / ⟨Q_k, ρ_k W_k⟩ ∈ (0, 1)` and move the
//!    removed part `(1 − ϱ̂_k) W_k` into the sensing block `W_{K+1}`. This
//!    transfer leaves `Σ_i W_i`, and hence the objective and every other
//!    constraint, unchanged while activating constraint `k`.
//!
//! At most `K` transfers are needed.

use crate::error::{Error, Result};
use crate::linalg::quad_form;
use crate::scalar::{real, CMatrix, Real};

use super::scenario::ScenarioData;

/// Tightens a feasible point of the original problem so that the power
/// budget and all SINR constraints are active. Inputs may violate
/// feasibility by at most `1e-9·σ²` (treated as rounding and clipped).
pub fn tighten_solution<T: Real>(
    scenario: &ScenarioData<T>,
    w: &[CMatrix<T>],
) -> Result<Vec<CMatrix<T>>> {
    let k = scenario.k();
    let n = scenario.n();
    if w.len() != scenario.blocks() {
        return Err(Error::DimensionMismatch(format!(
            "{} blocks, scenario expects {}",
            w.len(),
            scenario.blocks()
        )));
    }
    let sigma2 = scenario.sigma2();
    let feas_tol = real::<T>(1e-9) * sigma2;

    let slacks = scenario.sinr_slacks(w, sigma2)?;
    if let Some(user) = slacks.iter().position(|&s| s < -feas_tol) {
        return Err(Error::ContractViolation(format!(
            "input violates SINR constraint of user {user}"
        )));
    }
    let total = scenario.total_power(w);
    if !(total > T::zero()) {
        return Err(Error::ContractViolation(
            "input has nonpositive total power".into(),
        ));
    }
    if total > scenario.p_t() * (T::one() + real::<T>(1e-9)) {
        return Err(Error::ContractViolation(
            "input exceeds the power budget".into(),
        ));
    }

    // (1) Power activation.
    let scale = scenario.p_t() / total;
    let mut out: Vec<CMatrix<T>> = w.iter().map(|m| m.scale(scale)).collect();

    // Σ_i W_i is invariant under the transfers below; compute it once.
    let mut sum = CMatrix::<T>::zeros(n, n);
    for block in &out {
        sum += block;
    }

    // (2) SINR activation by transfer into the sensing block.
    for user in 0..k {
        let hk = scenario.channel(user);
        let load = quad_form(hk, &sum).re;
        let gain = quad_form(hk, &out[user]).re * scenario.rho()[user];
        let slack = gain - load - sigma2;
        if slack <= T::zero() {
            continue;
        }
        if !(gain > T::zero()) {
            // Positive slack demands gain > load + σ² > 0; a vanishing gain
            // means the SINR target cannot be reached from this point.
            return Err(Error::InfeasibleSinr { user });
        }
        let shrink = (load + sigma2) / gain;
        let removed = out[user].scale(T::one() - shrink);
        out[user].scale_mut(shrink);
        out[k] += removed;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isac::scenario::objective_from_blocks;
    use crate::linalg::trace_real;
    use crate::scalar::{cre, RVector};
    use approx::assert_relative_eq;

    fn scenario() -> ScenarioData<f64> {
        let h = CMatrix::from_vec(1, 1, vec![cre(1.0)]);
        ScenarioData::new(h, RVector::from_vec(vec![1.0]), 1.0, 4.0).unwrap()
    }

    fn blocks(a: f64, b: f64) -> Vec<CMatrix<f64>> {
        vec![
            CMatrix::from_vec(1, 1, vec![cre(a)]),
            CMatrix::from_vec(1, 1, vec![cre(b)]),
        ]
    }

    #[test]
    fn tight_input_is_unchanged() {
        // ρ = 2: slack = 2a − (a + b) − 1 and power = a + b, so a = 2.5,
        // b = 1.5 activates both constraints.
        let s = scenario();
        let w = blocks(2.5, 1.5);
        let out = tighten_solution(&s, &w).unwrap();
        for (x, y) in w.iter().zip(out.iter()) {
            assert_relative_eq!((x - y).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn power_slack_scales_objective_by_homogeneity() {
        // Half the budget in use: tightening scales by ϱ = 2 and the
        // trace-inverse objective halves.
        let s = scenario();
        let w = blocks(1.6, 0.4); // slack = 3.2 − 2 − 1 = 0.2 ≥ 0, power = 2 = P_T/2
        let before = objective_from_blocks(&w);
        let out = tighten_solution(&s, &w).unwrap();
        let total: f64 = out.iter().map(trace_real).sum();
        assert_relative_eq!(total, 4.0, epsilon = 1e-12);
        let after = objective_from_blocks(&out);
        assert_relative_eq!(after, before / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn transfer_activates_sinr_and_preserves_sum() {
        let s = scenario();
        // Full power, strict SINR slack: 2·3 − 4 − 1 = 1 > 0.
        let w = blocks(3.0, 1.0);
        let out = tighten_solution(&s, &w).unwrap();
        let slacks = s.sinr_slacks(&out, 1.0).unwrap();
        assert_relative_eq!(slacks[0], 0.0, epsilon = 1e-10);
        // Σ W_k unchanged by the transfer.
        let sum_before: f64 = w.iter().map(trace_real).sum();
        let sum_after: f64 = out.iter().map(trace_real).sum();
        assert_relative_eq!(sum_before, sum_after, epsilon = 1e-12);
        assert_relative_eq!(
            objective_from_blocks(&out),
            objective_from_blocks(&w),
            epsilon = 1e-12
        );
    }

    #[test]
    fn infeasible_input_is_rejected() {
        let s = scenario();
        let w = blocks(0.5, 0.5); // slack = 1 − 1 − 1 = −1
        assert!(matches!(
            tighten_solution(&s, &w),
            Err(Error::ContractViolation(_))
        ));
    }
}
