//! Structured solve with the regularized dual normal matrix.
//!
//! Stacking the multipliers as `λ = (μ; vec(Λ))`, the dual update needs the
//! action of `(𝒟𝒟† + θ² I)⁻¹` where `𝒟` stacks the operators `𝒜` and `ℬ`.
//! In block form
//!
//! ```text
//! 𝒟𝒟† + θ² I = [ A₁A₁† + |H†H|² + θ² I   T₁₂        ]
//!              [ T₁₂†                     d · I_{N²} ],      d = K + 2 + θ²,
//! ```
//!
//! whose inverse reduces, through the Schur complement
//!
//! ```text
//! L = θ² I + |H†H|² ⊙ (Diag(ρ ⊙ ρ) + S),
//! s_ij = 1 − (ρ_i + 1)(ρ_j + 1) / d,
//! ```
//!
//! to one `K×K` solve plus the actions of `T₁₂` and its adjoint:
//! `T₁₂ vec(R) = diag(H† R H) ⊙ (ρ + 1)` and
//! `T₁₂† μ = H · Diag(μ ⊙ (ρ + 1)) · H†`. After an `O(K²N + K³)` setup each
//! application costs `O(K² + K N²)` instead of the dense `O((K + N²)³)`.

use nalgebra::linalg::Cholesky;
use nalgebra::Dyn;

use crate::error::{Error, Result};
use crate::linalg::hermitian_part;
use crate::scalar::{CMatrix, RMatrix, RVector, Real};

use super::scenario::ScenarioData;

/// Precomputed Schur-complement factorization of the dual normal matrix.
#[derive(Clone, Debug)]
pub struct DualSystemFactor<T: Real> {
    theta: T,
    /// `d = K + 2 + θ²`.
    d: T,
    l: RMatrix<T>,
    chol: Cholesky<T, Dyn>,
    h: CMatrix<T>,
    rho_plus_one: RVector<T>,
}

impl<T: Real> DualSystemFactor<T> {
    /// Assembles `|H†H|²`, `S`, and `L`, and factors `L`.
    pub fn build(scenario: &ScenarioData<T>, theta: T) -> Result<Self> {
        if !(theta > T::zero()) {
            return Err(Error::InvalidConfig("theta must be positive".into()));
        }
        let k = scenario.k();
        let rho = scenario.rho();
        let d = real_usize::<T>(k + 2) + theta * theta;

        let gram = scenario.channels().adjoint() * scenario.channels();
        let mut l = RMatrix::<T>::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                let gram_sq = gram[(i, j)].norm_sqr();
                let s_ij = T::one() - (rho[i] + T::one()) * (rho[j] + T::one()) / d;
                let diag_rho = if i == j { rho[i] * rho[i] } else { T::zero() };
                l[(i, j)] = gram_sq * (diag_rho + s_ij);
            }
            l[(i, i)] += theta * theta;
        }

        let chol = Cholesky::new(l.clone())
            .ok_or(Error::Factorization("Schur complement L is not positive definite"))?;
        Ok(Self {
            theta,
            d,
            l,
            chol,
            h: scenario.channels().clone(),
            rho_plus_one: RVector::from_fn(k, |i, _| rho[i] + T::one()),
        })
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    /// `K + 2 + θ²`.
    pub fn coupling_scalar(&self) -> T {
        self.d
    }

    /// The assembled Schur complement `L` (for inspection and tests).
    pub fn schur_complement(&self) -> &RMatrix<T> {
        &self.l
    }

    /// `T₁₂ vec(R) = diag(H† R H) ⊙ (ρ + 1)`, real for Hermitian `R`.
    pub fn t12_apply(&self, r_mat: &CMatrix<T>) -> RVector<T> {
        let k = self.h.ncols();
        let rh = r_mat * &self.h;
        RVector::from_fn(k, |j, _| {
            self.h.column(j).dotc(&rh.column(j)).re * self.rho_plus_one[j]
        })
    }

    /// `T₁₂† μ = H · Diag(μ ⊙ (ρ + 1)) · H†`.
    pub fn t12_adjoint_apply(&self, mu: &RVector<T>) -> CMatrix<T> {
        let mut scaled = self.h.clone();
        for j in 0..self.h.ncols() {
            scaled.column_mut(j).scale_mut(mu[j] * self.rho_plus_one[j]);
        }
        &scaled * self.h.adjoint()
    }

    /// Applies `(𝒟𝒟† + θ² I)⁻¹` to the stacked right-hand side `(r; vec(R))`:
    ///
    /// ```text
    /// Δμ = L⁻¹ (r − T₁₂ vec(R) / d),
    /// ΔΛ = (R − T₁₂† Δμ) / d.
    /// ```
    pub fn solve(&self, r: &RVector<T>, r_mat: &CMatrix<T>) -> Result<(RVector<T>, CMatrix<T>)> {
        let k = self.h.ncols();
        let n = self.h.nrows();
        if r.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "r has length {}, factor expects {k}",
                r.len()
            )));
        }
        if r_mat.nrows() != n || r_mat.ncols() != n {
            return Err(Error::DimensionMismatch("R has wrong shape".into()));
        }
        let coupled = r - self.t12_apply(r_mat).unscale(self.d);
        let delta_mu = self.chol.solve(&coupled);
        let delta_lambda =
            hermitian_part(&(r_mat - self.t12_adjoint_apply(&delta_mu)).unscale(self.d));
        Ok((delta_mu, delta_lambda))
    }
}

fn real_usize<T: Real>(x: usize) -> T {
    crate::scalar::real::<T>(x as f64)
}
