//! Customized solver loop for the beamforming problem.
//!
//! The iteration mirrors the generic adaptive balanced AL loop but operates
//! directly on the matrix states `(W, Z, μ, Λ)` and exploits structure
//! everywhere: rank-one contractions for the operators, eigenvalue-based
//! proximal maps, and the Schur-complement dual solve. One iteration costs
//! `O((K + 2) N³)`, dominated by the `K + 2` Hermitian eigendecompositions.
//!
//! The dual update uses the generic form `λ⁺ = λ + (γ τ_t)⁻¹ (𝒟𝒟† + θ²I)⁻¹ p`
//! realized through [`DualSystemFactor::solve`]; an optional per-iteration
//! cross-check against the dense solve is available for verification runs.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_part, matrix_is_finite};
use crate::oracles::{stack_dual, DenseDualSystem};
use crate::scalar::{real, CMatrix, RVector, Real};
use crate::splitting::{
    adapt_stepsize, AbalConfig, RunReport, StepsizeState, Termination, DIVERGENCE_RESIDUAL,
};

use super::certificate::{certificate_tolerance, check_certificate, FeasibilityCertificate};
use super::dual::DualSystemFactor;
use super::prox::{project_w, prox_trace_inverse};
use super::scenario::{objective_from_blocks, ScenarioData};

/// Primal variables: `K + 1` Hermitian blocks and the coupling matrix `Z`.
#[derive(Clone, Debug)]
pub struct PrimalState<T: Real> {
    pub w: Vec<CMatrix<T>>,
    pub z: CMatrix<T>,
}

impl<T: Real> PrimalState<T> {
    /// Deterministic feasible start: `W_k = (P_T / ((K+1) N)) I` for every
    /// block and `Z = Σ_k W_k`, which is strictly positive definite.
    pub fn initial(scenario: &ScenarioData<T>) -> Self {
        let n = scenario.n();
        let blocks = scenario.blocks();
        let c = scenario.p_t() / (real::<T>(blocks as f64) * real::<T>(n as f64));
        let block = CMatrix::<T>::identity(n, n).scale(c);
        let mut z = CMatrix::<T>::zeros(n, n);
        for _ in 0..blocks {
            z += &block;
        }
        Self {
            w: vec![block; blocks],
            z,
        }
    }

    pub fn norm_squared(&self) -> T {
        self.w
            .iter()
            .map(|m| m.norm_squared())
            .fold(T::zero(), |a, b| a + b)
            + self.z.norm_squared()
    }

    pub fn is_finite(&self) -> bool {
        self.w.iter().all(matrix_is_finite) && matrix_is_finite(&self.z)
    }
}

/// Dual variables: real multipliers `μ` for the SINR equalities and the
/// Hermitian multiplier `Λ` for the coupling constraint.
#[derive(Clone, Debug)]
pub struct DualState<T: Real> {
    pub mu: RVector<T>,
    pub lambda: CMatrix<T>,
}

impl<T: Real> DualState<T> {
    pub fn zeros(scenario: &ScenarioData<T>) -> Self {
        Self {
            mu: RVector::zeros(scenario.k()),
            lambda: CMatrix::zeros(scenario.n(), scenario.n()),
        }
    }

    pub fn norm_squared(&self) -> T {
        self.mu.norm_squared() + self.lambda.norm_squared()
    }

    pub fn is_finite(&self) -> bool {
        self.mu.iter().all(|x| x.is_finite()) && matrix_is_finite(&self.lambda)
    }
}

/// Problem instance prepared for the customized loop: the scenario plus the
/// relaxation `ε`, the regularization `θ`, the factored dual system, and the
/// relaxed right-hand side `(1+ε)σ² 1`.
#[derive(Clone, Debug)]
pub struct IsacProblem<T: Real> {
    scenario: ScenarioData<T>,
    eps: T,
    theta: T,
    factor: DualSystemFactor<T>,
    relaxed_rhs: RVector<T>,
    tol: T,
}

impl<T: Real> IsacProblem<T> {
    pub fn new(scenario: ScenarioData<T>, eps: T, theta: T) -> Result<Self> {
        if !(eps > T::zero()) {
            return Err(Error::InvalidConfig("eps must be positive".into()));
        }
        let factor = DualSystemFactor::build(&scenario, theta)?;
        let relaxed_rhs =
            RVector::from_element(scenario.k(), (T::one() + eps) * scenario.sigma2());
        let tol = certificate_tolerance(&scenario, eps);
        Ok(Self {
            scenario,
            eps,
            theta,
            factor,
            relaxed_rhs,
            tol,
        })
    }

    pub fn scenario(&self) -> &ScenarioData<T> {
        &self.scenario
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn factor(&self) -> &DualSystemFactor<T> {
        &self.factor
    }

    /// Certificate tolerance the loop terminates against.
    pub fn tolerance(&self) -> T {
        self.tol
    }

    /// Relaxed SINR right-hand side `(1+ε)σ² 1`.
    pub fn relaxed_rhs(&self) -> &RVector<T> {
        &self.relaxed_rhs
    }
}

/// Loop state: primal and dual iterates, the stepsize controller, and the
/// cached operator values at the current point (each iteration evaluates the
/// operators once, at the new point).
#[derive(Clone, Debug)]
pub struct IsacState<T: Real> {
    pub primal: PrimalState<T>,
    pub dual: DualState<T>,
    pub stepsize: StepsizeState<T>,
    a_cur: RVector<T>,
    b_cur: CMatrix<T>,
}

impl<T: Real> IsacState<T> {
    /// Fresh state from the deterministic initialization and `τ_{−1} = τ_0`.
    pub fn initial(problem: &IsacProblem<T>, tau0: T) -> Result<Self> {
        let primal = PrimalState::initial(problem.scenario());
        let dual = DualState::zeros(problem.scenario());
        Self::from_states(problem, primal, dual, tau0)
    }

    pub fn from_states(
        problem: &IsacProblem<T>,
        primal: PrimalState<T>,
        dual: DualState<T>,
        tau0: T,
    ) -> Result<Self> {
        let a_cur = problem.scenario().apply_a(&primal.w, &primal.z)?;
        let b_cur = problem.scenario().apply_b(&primal.w, &primal.z)?;
        Ok(Self {
            primal,
            dual,
            stepsize: StepsizeState::new(tau0),
            a_cur,
            b_cur,
        })
    }
}

/// Residual norms at the new point produced by one iteration.
#[derive(Clone, Copy, Debug)]
pub struct IterationStats<T> {
    /// `‖𝒜(W, Z) − (1+ε)σ² 1‖`.
    pub sinr_residual: T,
    /// `‖ℬ(W, Z)‖_F`.
    pub coupling_residual: T,
}

impl<T: Real> IterationStats<T> {
    /// Stacked equality residual `‖𝒟(W, Z) − b‖`.
    pub fn combined(&self) -> T {
        (self.sinr_residual * self.sinr_residual
            + self.coupling_residual * self.coupling_residual)
            .sqrt()
    }
}

enum KappaRule<T> {
    Adaptive { omega: T, bounds: (T, T) },
    Frozen,
}

enum DualUpdate<T> {
    Regularized { gamma: T },
    OperatorNorm { upsilon: T, op_norm_sq: T },
}

/// One adaptive iteration of the customized loop (the `γ = 1` regularized
/// dual update). Updates `state` in place and returns the residual norms at
/// the new point.
pub fn customized_iteration<T: Real>(
    problem: &IsacProblem<T>,
    state: &mut IsacState<T>,
    omega_t: T,
    eta_bounds: (T, T),
) -> Result<IterationStats<T>> {
    step(
        problem,
        state,
        KappaRule::Adaptive {
            omega: omega_t,
            bounds: eta_bounds,
        },
        &DualUpdate::Regularized { gamma: T::one() },
        None,
    )
}

fn step<T: Real>(
    problem: &IsacProblem<T>,
    state: &mut IsacState<T>,
    kappa_rule: KappaRule<T>,
    dual_update: &DualUpdate<T>,
    dense_check: Option<&DenseDualSystem<T>>,
) -> Result<IterationStats<T>> {
    let scenario = problem.scenario();
    let theta = problem.theta();
    let tau_prev = state.stepsize.tau;

    // Primal steps: (W̃, Z̃) = (W, Z) − τ_{t−1} 𝒟†(μ, Λ), then the two
    // proximal maps.
    let (g_w, g_z) = scenario.apply_adjoint(&state.dual.mu, &state.dual.lambda)?;
    let w_tilde: Vec<CMatrix<T>> = state
        .primal
        .w
        .iter()
        .zip(g_w.iter())
        .map(|(w, g)| w - g.scale(tau_prev))
        .collect();
    let z_tilde = &state.primal.z - g_z.scale(tau_prev);

    let w_next = project_w(&w_tilde, scenario.p_t())?;
    let z_next = prox_trace_inverse(&z_tilde, tau_prev)?;

    // Stepsize adaptation from the Frobenius-norm ratio; the gap norm folds
    // in θ τ_{t−1} times the dual norm.
    state.stepsize = match kappa_rule {
        KappaRule::Adaptive { omega, bounds } => {
            let norm_new = (w_next
                .iter()
                .map(|m| m.norm_squared())
                .fold(T::zero(), |a, b| a + b)
                + z_next.norm_squared())
            .sqrt();
            let gap = (w_next
                .iter()
                .zip(w_tilde.iter())
                .map(|(a, b)| (a - b).norm_squared())
                .fold(T::zero(), |acc, x| acc + x)
                + (&z_next - &z_tilde).norm_squared()
                + theta * theta * tau_prev * tau_prev * state.dual.norm_squared())
            .sqrt();
            adapt_stepsize(&state.stepsize, norm_new, gap, omega, bounds)
        }
        KappaRule::Frozen => state.stepsize.advance_frozen(),
    };
    debug_assert!(state.stepsize.tau > T::zero(), "stepsize must stay positive");
    let kappa = state.stepsize.kappa;
    let tau_t = state.stepsize.tau;

    // Extrapolated equality residuals.
    let a_next = scenario.apply_a(&w_next, &z_next)?;
    let b_next = scenario.apply_b(&w_next, &z_next)?;
    let r = a_next.scale(T::one() + kappa) - state.a_cur.scale(kappa) - problem.relaxed_rhs();
    let r_mat = b_next.scale(T::one() + kappa) - state.b_cur.scale(kappa);

    // Dual update.
    let (d_mu, d_lambda) = match dual_update {
        DualUpdate::Regularized { gamma } => {
            let (raw_mu, raw_lambda) = problem.factor().solve(&r, &r_mat)?;
            if let Some(system) = dense_check {
                verify_against_dense(system, &r, &r_mat, &raw_mu, &raw_lambda)?;
            }
            let scale = *gamma * tau_t;
            (raw_mu.unscale(scale), raw_lambda.unscale(scale))
        }
        DualUpdate::OperatorNorm { upsilon, op_norm_sq } => {
            let scale = *upsilon * tau_t * *op_norm_sq;
            (r.unscale(scale), r_mat.unscale(scale))
        }
    };
    state.dual.mu += d_mu;
    state.dual.lambda = hermitian_part(&(&state.dual.lambda + d_lambda));

    let stats = IterationStats {
        sinr_residual: (&a_next - problem.relaxed_rhs()).norm(),
        coupling_residual: b_next.norm(),
    };
    state.primal.w = w_next;
    state.primal.z = z_next;
    state.a_cur = a_next;
    state.b_cur = b_next;
    Ok(stats)
}

fn verify_against_dense<T: Real>(
    system: &DenseDualSystem<T>,
    r: &RVector<T>,
    r_mat: &CMatrix<T>,
    mu: &RVector<T>,
    lambda: &CMatrix<T>,
) -> Result<()> {
    let dense = system.solve(&stack_dual(r, r_mat));
    let structured = stack_dual(mu, lambda);
    let err = (&structured - &dense).norm();
    let scale = dense.norm().max(T::one());
    if err > real::<T>(1e-8) * scale {
        return Err(Error::DualSolveMismatch(format!(
            "relative error {:.3e}",
            crate::scalar::to_f64(err / scale)
        )));
    }
    Ok(())
}

/// Algorithm selector for [`isac_solve`].
#[derive(Clone, Copy, Debug)]
pub enum IsacAlgorithm<T> {
    /// Adaptive balanced AL with the structured dual solve.
    Abal,
    /// Balanced AL with constant stepsize `τ` and dual stepsize `γ ≥ 3/4`.
    BalConstant { tau: T, gamma: T },
    /// Adaptive loop with the `(υ τ_t ‖𝒟‖₂²)⁻¹` dual step, `υ ≥ 1`.
    TfPdhg { upsilon: T },
}

/// Extra solver switches.
#[derive(Clone, Copy, Debug, Default)]
pub struct IsacSolveOptions {
    /// Cross-check every structured dual solve against the dense inverse.
    /// Costs `O((K + N²)²)` per iteration; intended for verification runs at
    /// small sizes.
    pub dense_check: bool,
}

/// Solver output: run record, final states, and the feasibility certificate
/// at the returned point.
#[derive(Clone, Debug)]
pub struct IsacRun<T: Real> {
    pub report: RunReport<T>,
    pub primal: PrimalState<T>,
    pub dual: DualState<T>,
    pub certificate: FeasibilityCertificate<T>,
}

/// Solves the relaxed problem (SINR right-hand side `(1+ε)σ²`) from the
/// deterministic initialization until the feasibility certificate holds or
/// the budget runs out. The certificate tolerance governs termination;
/// `config.stop_tol` is not consulted. The reported objective is
/// `tr((Σ_k W_k)⁻¹)` at the returned point.
pub fn isac_solve<T: Real>(
    scenario: &ScenarioData<T>,
    config: &AbalConfig<T>,
    eps: T,
    algo: IsacAlgorithm<T>,
) -> Result<IsacRun<T>> {
    isac_solve_with(scenario, config, eps, algo, &IsacSolveOptions::default())
}

/// [`isac_solve`] with explicit options.
pub fn isac_solve_with<T: Real>(
    scenario: &ScenarioData<T>,
    config: &AbalConfig<T>,
    eps: T,
    algo: IsacAlgorithm<T>,
    opts: &IsacSolveOptions,
) -> Result<IsacRun<T>> {
    config.validate()?;
    let started = Instant::now();
    let problem = IsacProblem::new(scenario.clone(), eps, config.theta)?;

    let (tau0, kappa_template, dual_update) = match algo {
        IsacAlgorithm::Abal => (
            config.tau0,
            true,
            DualUpdate::Regularized { gamma: T::one() },
        ),
        IsacAlgorithm::BalConstant { tau, gamma } => {
            if !(tau > T::zero()) {
                return Err(Error::InvalidConfig("tau must be positive".into()));
            }
            if !(gamma >= real(0.75)) {
                return Err(Error::InvalidConfig("gamma must be at least 3/4".into()));
            }
            (tau, false, DualUpdate::Regularized { gamma })
        }
        IsacAlgorithm::TfPdhg { upsilon } => {
            if !(upsilon >= T::one()) {
                return Err(Error::InvalidConfig("upsilon must be at least 1".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let op_norm_sq = operator_norm_sq_isac(scenario, &mut rng)?;
            if !(op_norm_sq > T::zero()) {
                return Err(Error::InvalidConfig(
                    "operator norm estimate is not positive".into(),
                ));
            }
            (config.tau0, true, DualUpdate::OperatorNorm { upsilon, op_norm_sq })
        }
    };

    let dense_system = if opts.dense_check {
        Some(DenseDualSystem::build(scenario, config.theta)?)
    } else {
        None
    };

    let mut state = IsacState::initial(&problem, tau0)?;
    let mut residuals = Vec::new();
    let mut taus = Vec::new();
    let mut termination = Termination::MaxIter;
    let mut converged = false;
    let diverged_at = real::<T>(DIVERGENCE_RESIDUAL);

    // Plateau diagnostics for suspected-infeasible instances.
    let mut best_residual = real::<T>(f64::INFINITY);
    let mut last_improvement = 0usize;
    let improvement_factor = T::one() - real::<T>(1e-3);
    let tau_collapse = tau0 * real::<T>(1e-8);

    for t in 0..config.max_iter {
        let rule = if kappa_template {
            KappaRule::Adaptive {
                omega: config.omega.value(t as u64),
                bounds: (config.eta_lo, config.eta_hi),
            }
        } else {
            KappaRule::Frozen
        };
        let stats = step(&problem, &mut state, rule, &dual_update, dense_system.as_ref())?;
        let combined = stats.combined();
        residuals.push(combined);
        taus.push(state.stepsize.tau);

        if !combined.is_finite()
            || combined > diverged_at
            || !state.primal.is_finite()
            || !state.dual.is_finite()
        {
            termination = Termination::Divergence;
            break;
        }
        if stats.sinr_residual.max(stats.coupling_residual) <= problem.tolerance() {
            converged = true;
            termination = Termination::Tolerance;
            break;
        }
        if combined < best_residual * improvement_factor {
            last_improvement = t;
        }
        best_residual = best_residual.min(combined);
        if t - last_improvement >= 2000 && state.stepsize.tau < tau_collapse {
            termination = Termination::SuspectedInfeasible;
            break;
        }
    }

    let certificate = check_certificate(scenario, &state.primal.w, &state.primal.z, eps)?;
    let report = RunReport {
        iterations: residuals.len(),
        objective: objective_from_blocks(&state.primal.w),
        primal_residuals: residuals,
        tau_history: taus,
        converged,
        wall_time_secs: started.elapsed().as_secs_f64(),
        termination,
    };
    Ok(IsacRun {
        report,
        primal: state.primal,
        dual: state.dual,
        certificate,
    })
}

/// `‖𝒟‖₂²` of the stacked constraint operator by power iteration on `𝒟𝒟†`
/// over the dual space of pairs `(μ, Λ)` with `Λ` Hermitian (an invariant
/// subspace containing the extreme eigenvectors). Relative tolerance `1e-6`,
/// at most 500 iterations.
pub fn operator_norm_sq_isac<T: Real>(
    scenario: &ScenarioData<T>,
    rng: &mut impl Rng,
) -> Result<T> {
    let k = scenario.k();
    let n = scenario.n();
    let mut mu = RVector::<T>::from_fn(k, |_, _| real::<T>(rng.random::<f64>() - 0.5));
    let raw = CMatrix::<T>::from_fn(n, n, |_, _| {
        crate::scalar::Complex::new(
            real::<T>(rng.random::<f64>() - 0.5),
            real::<T>(rng.random::<f64>() - 0.5),
        )
    });
    let mut lambda = hermitian_part(&raw);
    let norm = (mu.norm_squared() + lambda.norm_squared()).sqrt();
    if norm == T::zero() {
        return Err(Error::InvalidConfig("degenerate start vector".into()));
    }
    mu.unscale_mut(norm);
    lambda.unscale_mut(norm);

    let rel_tol = real::<T>(1e-6);
    let mut estimate = T::zero();
    for _ in 0..500 {
        let (g_w, g_z) = scenario.apply_adjoint(&mu, &lambda)?;
        let a = scenario.apply_a(&g_w, &g_z)?;
        let b = scenario.apply_b(&g_w, &g_z)?;
        let rayleigh = mu.dot(&a) + lambda.dotc(&b).re;
        let norm = (a.norm_squared() + b.norm_squared()).sqrt();
        if norm == T::zero() {
            return Ok(T::zero());
        }
        mu = a.unscale(norm);
        lambda = b.unscale(norm);
        if (rayleigh - estimate).abs() <= rel_tol * rayleigh.abs().max(T::one()) {
            return Ok(rayleigh);
        }
        estimate = rayleigh;
    }
    Ok(estimate)
}
