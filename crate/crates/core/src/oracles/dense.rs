//! Dense vectorized view of the beamforming problem.
//!
//! Stacking `u = [vec(W_1); …; vec(W_{K+1}); vec(Z)]` and `λ = (μ; vec(Λ))`
//! turns the problem into the generic equality-constrained form with an
//! explicit coefficient matrix `D = [A, B]`:
//!
//! ```text
//! A = [A₁; A₂],  A₁ row k = ρ_k vec(Q_k)† placed in block k,
//!               A₂ = [I … I]  (N²×(K+1)N²),
//! B = [B₁; B₂],  B₁ row k = −vec(Q_k)†,  B₂ = −I,
//! b = [(1+ε)σ² · 1_K; 0].
//! ```
//!
//! Everything here is deliberately unstructured (dense matvecs, a dense
//! factorization of `D D† + θ² I`, bisection-based proximal maps) so it can
//! serve as ground truth for the structured path. The only shared code is
//! the basic Hermitian eigendecomposition.

use nalgebra::linalg::Cholesky;
use nalgebra::Dyn;

use crate::error::{Error, Result};
use crate::isac::{PrimalState, ScenarioData};
use crate::linalg::{hermitian_eigen, hermitian_part, rebuild_hermitian, trace_inverse};
use crate::scalar::{cre, real, CMatrix, CVector, Complex, RVector, Real};
use crate::splitting::{abal_solve, AbalConfig, RunReport, SplitProblem};

use super::checks::scalar_prox_oracle;

/// Stacks `(μ; vec(Λ))` into one complex vector.
pub fn stack_dual<T: Real>(mu: &RVector<T>, lambda: &CMatrix<T>) -> CVector<T> {
    let k = mu.len();
    let n = lambda.nrows();
    let mut out = CVector::zeros(k + n * n);
    for i in 0..k {
        out[i] = cre(mu[i]);
    }
    for (q, z) in lambda.iter().enumerate() {
        out[k + q] = *z;
    }
    out
}

/// Splits a stacked dual vector back into `(μ, Λ)`, taking real parts of the
/// `μ` block (imaginary parts are rounding noise for structured right-hand
/// sides).
pub fn unstack_dual<T: Real>(v: &CVector<T>, k: usize, n: usize) -> (RVector<T>, CMatrix<T>) {
    let mu = RVector::from_fn(k, |i, _| v[i].re);
    let lambda = CMatrix::from_fn(n, n, |i, j| v[k + j * n + i]);
    (mu, lambda)
}

/// Stacks the primal blocks column-major into one vector.
pub fn stack_primal<T: Real>(primal: &PrimalState<T>) -> CVector<T> {
    let n = primal.z.nrows();
    let blocks = primal.w.len();
    let mut out = CVector::zeros((blocks + 1) * n * n);
    for (idx, block) in primal.w.iter().enumerate() {
        for (q, z) in block.iter().enumerate() {
            out[idx * n * n + q] = *z;
        }
    }
    for (q, z) in primal.z.iter().enumerate() {
        out[blocks * n * n + q] = *z;
    }
    out
}

/// Inverse of [`stack_primal`].
pub fn unstack_primal<T: Real>(u: &CVector<T>, k: usize, n: usize) -> PrimalState<T> {
    let nn = n * n;
    let mut w = Vec::with_capacity(k + 1);
    for idx in 0..=k {
        w.push(CMatrix::from_fn(n, n, |i, j| u[idx * nn + j * n + i]));
    }
    let z = CMatrix::from_fn(n, n, |i, j| u[(k + 1) * nn + j * n + i]);
    PrimalState { w, z }
}

/// Assembles the dense coefficient matrix `D = [A, B]` of size
/// `(K + N²) × (K + 2) N²`.
pub fn assemble_constraint_matrix<T: Real>(scenario: &ScenarioData<T>) -> CMatrix<T> {
    let k = scenario.k();
    let n = scenario.n();
    let nn = n * n;
    let rows = k + nn;
    let cols = (k + 2) * nn;
    let mut d = CMatrix::<T>::zeros(rows, cols);

    for user in 0..k {
        let h = scenario.channel(user);
        let rho = scenario.rho()[user];
        // vec(Q)_q = h_i conj(h_j) at q = j·N + i; the row carries its
        // conjugate.
        for j in 0..n {
            for i in 0..n {
                let q = j * n + i;
                let conj_vec_q = h[i].conj() * h[j];
                d[(user, user * nn + q)] = conj_vec_q * cre(rho);
                d[(user, (k + 1) * nn + q)] = -conj_vec_q;
            }
        }
    }
    for q in 0..nn {
        for block in 0..=k {
            d[(k + q, block * nn + q)] = cre(T::one());
        }
        d[(k + q, (k + 1) * nn + q)] = cre(-T::one());
    }
    d
}

/// Fully assembled regularized dual normal matrix `D D† + θ² I` with a dense
/// Cholesky factorization: the unstructured `O((K + N²)³)` path the
/// Schur-complement solve is verified against.
#[derive(Clone, Debug)]
pub struct DenseDualSystem<T: Real> {
    matrix: CMatrix<T>,
    chol: Cholesky<Complex<T>, Dyn>,
}

impl<T: Real> DenseDualSystem<T> {
    pub fn build(scenario: &ScenarioData<T>, theta: T) -> Result<Self> {
        let d = assemble_constraint_matrix(scenario);
        Self::from_constraint_matrix(&d, theta)
    }

    pub fn from_constraint_matrix(d: &CMatrix<T>, theta: T) -> Result<Self> {
        if !(theta > T::zero()) {
            return Err(Error::InvalidConfig("theta must be positive".into()));
        }
        let rows = d.nrows();
        let mut matrix = d * d.adjoint();
        for i in 0..rows {
            matrix[(i, i)] += cre(theta * theta);
        }
        matrix = hermitian_part(&matrix);
        let chol = Cholesky::new(matrix.clone())
            .ok_or(Error::Factorization("dense dual system is not positive definite"))?;
        Ok(Self { matrix, chol })
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Direct solve; ground truth for the structured dual solve.
    pub fn solve(&self, p: &CVector<T>) -> CVector<T> {
        self.chol.solve(p)
    }
}

/// The beamforming problem as a generic [`SplitProblem`] with dense operator
/// matvecs and bisection-based proximal maps.
#[derive(Clone, Debug)]
pub struct DenseVectorizedProblem<T: Real> {
    k: usize,
    n: usize,
    p_t: T,
    theta: T,
    d: CMatrix<T>,
    rhs: CVector<T>,
    system: DenseDualSystem<T>,
}

impl<T: Real> DenseVectorizedProblem<T> {
    pub fn new(scenario: &ScenarioData<T>, eps: T, theta: T) -> Result<Self> {
        if !(eps > T::zero()) {
            return Err(Error::InvalidConfig("eps must be positive".into()));
        }
        let k = scenario.k();
        let n = scenario.n();
        let d = assemble_constraint_matrix(scenario);
        let system = DenseDualSystem::from_constraint_matrix(&d, theta)?;
        let relaxed = (T::one() + eps) * scenario.sigma2();
        let mut rhs = CVector::zeros(k + n * n);
        for i in 0..k {
            rhs[i] = cre(relaxed);
        }
        Ok(Self {
            k,
            n,
            p_t: scenario.p_t(),
            theta,
            d,
            rhs,
            system,
        })
    }

    pub fn users(&self) -> usize {
        self.k
    }

    pub fn antennas(&self) -> usize {
        self.n
    }

    fn block(&self, u: &CVector<T>, idx: usize) -> CMatrix<T> {
        let nn = self.n * self.n;
        CMatrix::from_fn(self.n, self.n, |i, j| u[idx * nn + j * self.n + i])
    }

    fn write_block(&self, out: &mut CVector<T>, idx: usize, m: &CMatrix<T>) {
        let nn = self.n * self.n;
        for (q, z) in m.iter().enumerate() {
            out[idx * nn + q] = *z;
        }
    }
}

impl<T: Real> SplitProblem<T> for DenseVectorizedProblem<T> {
    fn primal_dim(&self) -> usize {
        (self.k + 2) * self.n * self.n
    }

    fn dual_dim(&self) -> usize {
        self.k + self.n * self.n
    }

    fn theta(&self) -> T {
        self.theta
    }

    fn prox(&self, v: &CVector<T>, tau: T) -> CVector<T> {
        let mut out = v.clone();
        // W part: joint spectral projection with a bisection threshold.
        let mut bases = Vec::with_capacity(self.k + 1);
        let mut spectra = Vec::new();
        for idx in 0..=self.k {
            let m = self.block(v, idx);
            let (u, w) = hermitian_eigen(&m, idx).expect("oracle prox: eigendecomposition failed");
            spectra.extend(w.iter().copied());
            bases.push(u);
        }
        let projected = simplex_project_bisect(&spectra, self.p_t);
        for (idx, u) in bases.iter().enumerate() {
            let vals = RVector::from_fn(self.n, |i, _| projected[idx * self.n + i]);
            self.write_block(&mut out, idx, &rebuild_hermitian(u, &vals));
        }
        // Z part: per-eigenvalue bisection on the prox optimality cubic.
        let z = self.block(v, self.k + 1);
        let (u, w) = hermitian_eigen(&z, self.k + 1).expect("oracle prox: eigendecomposition failed");
        let vals = RVector::from_fn(self.n, |i, _| scalar_prox_oracle(w[i], tau));
        self.write_block(&mut out, self.k + 1, &rebuild_hermitian(&u, &vals));
        out
    }

    fn apply_constraint(&self, u: &CVector<T>) -> CVector<T> {
        &self.d * u
    }

    fn apply_adjoint(&self, lambda: &CVector<T>) -> CVector<T> {
        self.d.ad_mul(lambda)
    }

    fn solve_regularized(&self, p: &CVector<T>) -> CVector<T> {
        self.system.solve(p)
    }

    fn rhs(&self) -> CVector<T> {
        self.rhs.clone()
    }

    fn objective(&self, u: &CVector<T>) -> T {
        trace_inverse(&self.block(u, self.k + 1))
    }
}

/// Euclidean simplex projection by bisection on the shift `θ` in
/// `x = max(v − θ, 0)`; independent of the sort-and-threshold implementation
/// used by the solver.
pub fn simplex_project_bisect<T: Real>(v: &[T], s: T) -> Vec<T> {
    let m = v.len();
    let phi = |shift: T| {
        v.iter()
            .map(|&x| (x - shift).max(T::zero()))
            .fold(T::zero(), |a, b| a + b)
            - s
    };
    let min = v.iter().copied().fold(real::<T>(f64::INFINITY), |a, b| a.min(b));
    let max = v.iter().copied().fold(real::<T>(f64::NEG_INFINITY), |a, b| a.max(b));
    let mut lo = min - s / real::<T>(m as f64);
    let mut hi = max;
    for _ in 0..200 {
        if hi - lo <= T::default_epsilon() * (T::one() + hi.abs() + lo.abs()) {
            break;
        }
        let mid = (lo + hi) / real::<T>(2.0);
        if phi(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let shift = (lo + hi) / real::<T>(2.0);
    v.iter().map(|&x| (x - shift).max(T::zero())).collect()
}

/// High-accuracy anchor solution of the relaxed problem via the generic
/// adaptive solver on the dense vectorized form.
#[derive(Clone, Debug)]
pub struct ReferenceSolution<T: Real> {
    pub w: Vec<CMatrix<T>>,
    pub z: CMatrix<T>,
    /// `tr((Σ_k W_k)⁻¹)` at the anchor point.
    pub objective: T,
    pub report: RunReport<T>,
}

/// Reference solve with the default `τ_0 = 1`.
///
/// Intended for small instances (`N ≤ 16`, `K ≤ 4`); the dense dual system
/// factorization is `O((K + N²)³)`.
pub fn reference_solve<T: Real>(scenario: &ScenarioData<T>, eps: T) -> Result<ReferenceSolution<T>> {
    reference_solve_with_tau0(scenario, eps, T::one())
}

/// Reference solve with an explicit initial stepsize (used to confirm the
/// anchor is solver-parameter independent).
pub fn reference_solve_with_tau0<T: Real>(
    scenario: &ScenarioData<T>,
    eps: T,
    tau0: T,
) -> Result<ReferenceSolution<T>> {
    let theta = real::<T>(1e-2);
    let problem = DenseVectorizedProblem::new(scenario, eps, theta)?;
    let config = AbalConfig {
        tau0,
        theta,
        stop_tol: real(1e-10),
        max_iter: 200_000,
        ..AbalConfig::default()
    };
    let u0 = stack_primal(&PrimalState::initial(scenario));
    let lambda0 = CVector::zeros(problem.dual_dim());
    let out = abal_solve(&problem, &config, &u0, &lambda0)?;
    if !out.report.converged {
        return Err(Error::ReferenceNotConverged);
    }
    let primal = unstack_primal(&out.u, scenario.k(), scenario.n());
    let objective = crate::isac::objective_from_blocks(&primal.w);
    Ok(ReferenceSolution {
        w: primal.w,
        z: primal.z,
        objective,
        report: out.report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isac::DualState;
    use approx::assert_relative_eq;
    use nalgebra::DVector;

    fn tiny_scenario() -> ScenarioData<f64> {
        let h = CMatrix::from_vec(1, 1, vec![cre(1.0)]);
        ScenarioData::new(h, DVector::from_vec(vec![1.0]), 1.0, 1.0).unwrap()
    }

    #[test]
    fn dense_system_matches_hand_blocks() {
        // N = 1, K = 1, h = 1, ρ = 2, θ = 1:
        // D = [[2, 0, −1], [1, 1, −1]], DD† + I = [[6, 3], [3, 4]].
        let system = DenseDualSystem::build(&tiny_scenario(), 1.0).unwrap();
        let m = system.matrix();
        assert_relative_eq!(m[(0, 0)].re, 6.0, epsilon = 1e-14);
        assert_relative_eq!(m[(0, 1)].re, 3.0, epsilon = 1e-14);
        assert_relative_eq!(m[(1, 1)].re, 4.0, epsilon = 1e-14);
    }

    #[test]
    fn dense_solve_is_a_true_inverse() {
        let system = DenseDualSystem::build(&tiny_scenario(), 0.3).unwrap();
        let p = CVector::from_vec(vec![cre(1.0), cre(-2.0)]);
        let x = system.solve(&p);
        let back = system.matrix() * &x;
        assert_relative_eq!((back - &p).norm(), 0.0, epsilon = 1e-12);

        let zero = system.solve(&CVector::zeros(2));
        assert_eq!(zero.norm(), 0.0);
    }

    #[test]
    fn stacking_roundtrip() {
        let scenario = tiny_scenario();
        let primal = PrimalState::initial(&scenario);
        let u = stack_primal(&primal);
        let back = unstack_primal(&u, scenario.k(), scenario.n());
        assert_relative_eq!((&primal.z - &back.z).norm(), 0.0, epsilon = 1e-15);

        let dual = DualState::zeros(&scenario);
        let v = stack_dual(&dual.mu, &dual.lambda);
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn bisect_simplex_agrees_with_closed_forms() {
        let x = simplex_project_bisect(&[0.5, 0.5, 0.5], 1.0);
        for xi in &x {
            assert_relative_eq!(*xi, 1.0 / 3.0, epsilon = 1e-12);
        }
        let y = simplex_project_bisect(&[2.0, 0.0], 1.0);
        assert_relative_eq!(y[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(y[1], 0.0, epsilon = 1e-12);
    }
}
