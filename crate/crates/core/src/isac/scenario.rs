//! Scenario data for the beamforming design problem and the linear operators
//! of its equality-constrained reformulation.
//!
//! A scenario is a base station with `N` antennas serving `K` single-antenna
//! users through channels `h_k` (the columns of `H`), with SINR targets
//! `Γ_k`, noise power `σ²`, and a transmit power budget `P_T`. The problem
//! variables are `K + 1` Hermitian covariance blocks `W_k` plus the coupling
//! variable `Z = Σ_k W_k`, tied together by two linear operators:
//!
//! ```text
//! 𝒜(W, Z)_k = ρ_k h_k† W_k h_k − h_k† Z h_k          (ρ_k = 1 + Γ_k⁻¹)
//! ℬ(W, Z)   = Σ_k W_k − Z
//! ```
//!
//! The rank-one matrices `Q_k = h_k h_k†` are never stored densely; every
//! contraction `⟨Q_k, M⟩` is evaluated as `h_k† M h_k` in `O(N²)`.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_part, outer, quad_form, trace_inverse, trace_real};
use crate::scalar::{precision_floor, real, CMatrix, RVector, Real};

/// Channels, targets, and power budget of one problem instance.
#[derive(Clone, Debug)]
pub struct ScenarioData<T: Real> {
    n: usize,
    k: usize,
    h: CMatrix<T>,
    gamma: RVector<T>,
    sigma2: T,
    p_t: T,
    rho: RVector<T>,
}

impl<T: Real> ScenarioData<T> {
    /// Builds a scenario from the `N×K` channel matrix and per-user SINR
    /// targets. Derives `ρ_k = 1 + Γ_k⁻¹`.
    pub fn new(h: CMatrix<T>, gamma: RVector<T>, sigma2: T, p_t: T) -> Result<Self> {
        let n = h.nrows();
        let k = h.ncols();
        if n == 0 || k == 0 {
            return Err(Error::InvalidConfig(
                "scenario needs at least one antenna and one user".into(),
            ));
        }
        if gamma.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "{} SINR targets for {} users",
                gamma.len(),
                k
            )));
        }
        if !(sigma2 > T::zero()) {
            return Err(Error::InvalidConfig("sigma2 must be positive".into()));
        }
        if !(p_t > T::zero()) {
            return Err(Error::InvalidConfig("p_t must be positive".into()));
        }
        for j in 0..k {
            if !(gamma[j] > T::zero()) {
                return Err(Error::InvalidConfig(format!(
                    "SINR target of user {j} must be positive"
                )));
            }
            if h.column(j).norm() == T::zero() {
                return Err(Error::InvalidConfig(format!("channel of user {j} is zero")));
            }
        }
        let rho = RVector::from_fn(k, |j, _| T::one() + T::one() / gamma[j]);
        Ok(Self {
            n,
            k,
            h,
            gamma,
            sigma2,
            p_t,
            rho,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of primal blocks, `K + 1`.
    pub fn blocks(&self) -> usize {
        self.k + 1
    }

    pub fn channels(&self) -> &CMatrix<T> {
        &self.h
    }

    pub fn channel(&self, k: usize) -> nalgebra::DVectorView<'_, crate::scalar::Complex<T>> {
        self.h.column(k)
    }

    pub fn gamma(&self) -> &RVector<T> {
        &self.gamma
    }

    pub fn rho(&self) -> &RVector<T> {
        &self.rho
    }

    pub fn sigma2(&self) -> T {
        self.sigma2
    }

    pub fn p_t(&self) -> T {
        self.p_t
    }

    /// Largest channel gain `max_k ‖h_k‖²`.
    pub fn max_channel_gain(&self) -> T {
        (0..self.k)
            .map(|j| self.h.column(j).norm_squared())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Smallest channel gain `min_k ‖h_k‖²`.
    pub fn min_channel_gain(&self) -> T {
        (0..self.k)
            .map(|j| self.h.column(j).norm_squared())
            .fold(real::<T>(f64::INFINITY), |a, b| a.min(b))
    }

    fn check_state_dims(&self, w: &[CMatrix<T>], z: &CMatrix<T>) -> Result<()> {
        if w.len() != self.blocks() {
            return Err(Error::DimensionMismatch(format!(
                "{} primal blocks, scenario expects {}",
                w.len(),
                self.blocks()
            )));
        }
        for (idx, block) in w.iter().enumerate() {
            if block.nrows() != self.n || block.ncols() != self.n {
                return Err(Error::DimensionMismatch(format!(
                    "block {idx} is {}x{}, scenario expects {}x{}",
                    block.nrows(),
                    block.ncols(),
                    self.n,
                    self.n
                )));
            }
        }
        if z.nrows() != self.n || z.ncols() != self.n {
            return Err(Error::DimensionMismatch("Z has wrong shape".into()));
        }
        Ok(())
    }

    /// `𝒜(W, Z)`: the per-user SINR functionals. Imaginary parts, which are
    /// rounding noise for Hermitian inputs, are checked against a small
    /// tolerance and discarded.
    pub fn apply_a(&self, w: &[CMatrix<T>], z: &CMatrix<T>) -> Result<RVector<T>> {
        self.check_state_dims(w, z)?;
        let tol = precision_floor::<T>(1e-10);
        let mut out = RVector::zeros(self.k);
        for j in 0..self.k {
            let hk = self.h.column(j);
            let val = quad_form(hk, &w[j]) * crate::scalar::cre(self.rho[j]) - quad_form(hk, z);
            if val.im.abs() > tol * (T::one() + val.re.abs()) {
                return Err(Error::ContractViolation(format!(
                    "apply_a: non-Hermitian input for user {j}"
                )));
            }
            out[j] = val.re;
        }
        Ok(out)
    }

    /// `ℬ(W, Z) = Σ_k W_k − Z`.
    pub fn apply_b(&self, w: &[CMatrix<T>], z: &CMatrix<T>) -> Result<CMatrix<T>> {
        self.check_state_dims(w, z)?;
        let mut sum = CMatrix::<T>::zeros(self.n, self.n);
        for block in w {
            sum += block;
        }
        sum -= z;
        let tol = precision_floor::<T>(1e-10);
        if crate::linalg::hermitian_violation(&sum) > tol * (T::one() + sum.norm()) {
            return Err(Error::ContractViolation(
                "apply_b: non-Hermitian input".into(),
            ));
        }
        Ok(sum)
    }

    /// Adjoint of the stacked operator `(𝒜, ℬ)` evaluated at multipliers
    /// `(μ, Λ)`:
    ///
    /// ```text
    /// G_{W,k} = ρ_k μ_k Q_k + Λ  (k ≤ K),    G_{W,K+1} = Λ,
    /// G_Z     = −Σ_k μ_k Q_k − Λ,
    /// ```
    ///
    /// with the aggregate `Σ_k μ_k Q_k` formed as `H · Diag(μ) · H†`.
    pub fn apply_adjoint(
        &self,
        mu: &RVector<T>,
        lambda: &CMatrix<T>,
    ) -> Result<(Vec<CMatrix<T>>, CMatrix<T>)> {
        if mu.len() != self.k {
            return Err(Error::DimensionMismatch(format!(
                "mu has length {}, scenario expects {}",
                mu.len(),
                self.k
            )));
        }
        if lambda.nrows() != self.n || lambda.ncols() != self.n {
            return Err(Error::DimensionMismatch("Lambda has wrong shape".into()));
        }
        let mut g_w = Vec::with_capacity(self.blocks());
        for j in 0..self.k {
            let hk = self.h.column(j).clone_owned();
            let mut block = outer(&hk);
            block.scale_mut(self.rho[j] * mu[j]);
            block += lambda;
            g_w.push(block);
        }
        g_w.push(lambda.clone());

        let mut scaled = self.h.clone();
        for j in 0..self.k {
            scaled.column_mut(j).scale_mut(mu[j]);
        }
        let aggregate = &scaled * self.h.adjoint();
        let g_z = -(aggregate + lambda);
        Ok((g_w, g_z))
    }

    /// Exact SINR slacks `ρ_k ⟨Q_k, W_k⟩ − Σ_i ⟨Q_k, W_i⟩ − rhs` of the
    /// original inequality-constrained problem at the point `W`.
    pub fn sinr_slacks(&self, w: &[CMatrix<T>], rhs: T) -> Result<RVector<T>> {
        if w.len() != self.blocks() {
            return Err(Error::DimensionMismatch("wrong number of blocks".into()));
        }
        let mut sum = CMatrix::<T>::zeros(self.n, self.n);
        for block in w {
            sum += block;
        }
        let mut out = RVector::zeros(self.k);
        for j in 0..self.k {
            let hk = self.h.column(j);
            let gain = quad_form(hk, &w[j]).re * self.rho[j];
            let load = quad_form(hk, &sum).re;
            out[j] = gain - load - rhs;
        }
        Ok(out)
    }

    /// Total transmit power `Σ_k tr(W_k)`.
    pub fn total_power(&self, w: &[CMatrix<T>]) -> T {
        w.iter().map(trace_real).fold(T::zero(), |a, b| a + b)
    }
}

/// Objective of the original problem, `tr((Σ_k W_k)⁻¹)`.
///
/// Returns `+inf` when the sum is singular or indefinite.
pub fn objective_from_blocks<T: Real>(w: &[CMatrix<T>]) -> T {
    if w.is_empty() {
        return real::<T>(f64::INFINITY);
    }
    let mut sum = CMatrix::<T>::zeros(w[0].nrows(), w[0].ncols());
    for block in w {
        sum += block;
    }
    trace_inverse(&sum)
}

/// Objective in the coupled form, `tr(Z⁻¹)`; `+inf` when `Z` is not
/// positive definite.
pub fn objective_from_z<T: Real>(z: &CMatrix<T>) -> T {
    trace_inverse(&hermitian_part(z))
}
