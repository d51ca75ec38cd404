//! Generic balanced augmented Lagrangian solvers for linear-equality
//! constrained convex programs over the complex field,
//!
//! ```text
//! minimize f(u)   subject to  D u = b,   u ∈ ℂⁿ,
//! ```
//!
//! accessed solely through the [`SplitProblem`] contract: the proximal
//! mapping of `f`, the constraint operator `D` and its adjoint, and a solve
//! with the regularized normal matrix `D D† + θ² I`.
//!
//! Three solvers share this contract:
//!
//! * [`abal_solve`]: balanced AL iteration with a per-iteration adaptive
//!   stepsize `τ_t` driven by the ratio `η_t` and a summable relaxation
//!   schedule `ω_t`;
//! * [`bal_solve`]: balanced AL with a constant stepsize `τ` and dual
//!   stepsize `γ`;
//! * [`tfpdhg_solve`]: the adaptive loop with the regularized dual solve
//!   replaced by the scalar approximation `(υ τ_t ‖D‖₂²)⁻¹ p`.

use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::vector_is_finite;
use crate::scalar::{real, CVector, Complex, Real};

/// Residual magnitude beyond which a run is declared divergent.
pub const DIVERGENCE_RESIDUAL: f64 = 1e12;

/// Capability set a problem must expose to the solvers.
///
/// All vectors are dense complex; real problems simply carry zero imaginary
/// parts. Implementations must satisfy the adjoint identity
/// `Re⟨apply_constraint(u), λ⟩ = Re⟨u, apply_adjoint(λ)⟩` and
/// `(D D† + θ² I) · solve_regularized(p) = p`; both are checked by the
/// harness in [`crate::oracles`].
pub trait SplitProblem<T: Real> {
    /// Length of the primal vector `u`.
    fn primal_dim(&self) -> usize;
    /// Length of the dual vector `λ` (rows of `D`).
    fn dual_dim(&self) -> usize;
    /// Regularization parameter `θ > 0` baked into [`Self::solve_regularized`].
    fn theta(&self) -> T;
    /// Proximal mapping `prox_{τ f}(v)`.
    fn prox(&self, v: &CVector<T>, tau: T) -> CVector<T>;
    /// `D u`.
    fn apply_constraint(&self, u: &CVector<T>) -> CVector<T>;
    /// `D† λ`.
    fn apply_adjoint(&self, lambda: &CVector<T>) -> CVector<T>;
    /// `(D D† + θ² I)⁻¹ p`.
    fn solve_regularized(&self, p: &CVector<T>) -> CVector<T>;
    /// Right-hand side `b`.
    fn rhs(&self) -> CVector<T>;
    /// Objective value `f(u)`, for reporting.
    fn objective(&self, u: &CVector<T>) -> T;
    /// Stopping predicate checked after each iteration. The default accepts
    /// once the primal residual `‖D u − b‖` is within `stop_tol`; problems
    /// with their own convergence criterion may override it.
    fn converged(&self, u: &CVector<T>, residual: T, stop_tol: T) -> bool {
        let _ = u;
        residual <= stop_tol
    }
}

/// Relaxation schedule `t ↦ ω_t`.
///
/// Convergence of the adaptive stepsize requires `ω_0 = 1`, `ω_t ∈ (0, 1]`
/// and `Σ_t ω_t < ∞`; the default rule `ω_t = (t+1)⁻²` satisfies all three.
/// Custom schedules may take the value `0` (freezing the stepsize from that
/// iteration on), which is useful for reductions and experiments even though
/// it falls outside the convergence theory.
#[derive(Clone, Default)]
pub enum OmegaSchedule<T> {
    /// `ω_t = (t+1)⁻²`.
    #[default]
    InverseSquare,
    /// User-supplied rule; values must lie in `[0, 1]`.
    Custom(Arc<dyn Fn(u64) -> T + Send + Sync>),
}

impl<T: Real> OmegaSchedule<T> {
    pub fn value(&self, t: u64) -> T {
        match self {
            OmegaSchedule::InverseSquare => omega_default(t),
            OmegaSchedule::Custom(f) => f(t),
        }
    }

    /// Constant schedule `ω_t ≡ c`.
    pub fn constant(c: T) -> Self {
        OmegaSchedule::Custom(Arc::new(move |_| c))
    }
}

impl<T> fmt::Debug for OmegaSchedule<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaSchedule::InverseSquare => write!(f, "InverseSquare"),
            OmegaSchedule::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Default relaxation rule `ω_t = (t+1)⁻²`.
pub fn omega_default<T: Real>(t: u64) -> T {
    let tp1 = real::<T>((t + 1) as f64);
    T::one() / (tp1 * tp1)
}

/// Configuration of the adaptive solvers.
#[derive(Clone, Debug)]
pub struct AbalConfig<T> {
    /// Initial stepsize `τ_0 > 0`.
    pub tau0: T,
    /// Regularization `θ` used when the config is the source of a problem
    /// construction (e.g. the ISAC solvers). Generic solvers read `θ` from
    /// the problem itself, which bakes it into `solve_regularized`.
    pub theta: T,
    /// Lower clamp `η̲ > 0` of the stepsize ratio.
    pub eta_lo: T,
    /// Upper clamp `η̄ > η̲`.
    pub eta_hi: T,
    /// Relaxation schedule `ω_t`.
    pub omega: OmegaSchedule<T>,
    /// Iteration budget.
    pub max_iter: usize,
    /// Stopping tolerance on the primal residual `‖D u − b‖`.
    pub stop_tol: T,
    /// Seed for any randomized pieces (power iteration start vectors).
    pub seed: u64,
}

impl<T: Real> Default for AbalConfig<T> {
    fn default() -> Self {
        Self {
            tau0: T::one(),
            theta: real(1e-2),
            eta_lo: real(1e-2),
            eta_hi: real(1e2),
            omega: OmegaSchedule::default(),
            max_iter: 10_000,
            stop_tol: real(1e-6),
            seed: 0,
        }
    }
}

impl<T: Real> AbalConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau0 > T::zero()) {
            return Err(Error::InvalidConfig("tau0 must be positive".into()));
        }
        if !(self.theta > T::zero()) {
            return Err(Error::InvalidConfig("theta must be positive".into()));
        }
        if !(T::zero() < self.eta_lo && self.eta_lo < self.eta_hi) {
            return Err(Error::InvalidConfig(
                "eta bounds must satisfy 0 < eta_lo < eta_hi".into(),
            ));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if !(self.stop_tol >= T::zero()) {
            return Err(Error::InvalidConfig("stop_tol must be nonnegative".into()));
        }
        // Sample the schedule; ω_t ∈ [0, 1] with ω_0 = 1 required by the
        // convergence theory, but ω ≡ 0 (stepsize freeze) is accepted.
        for t in 0..16u64 {
            let w = self.omega.value(t);
            if !(w >= T::zero() && w <= T::one()) {
                return Err(Error::InvalidConfig(format!(
                    "omega schedule leaves [0, 1] at t = {t}"
                )));
            }
        }
        Ok(())
    }
}

/// Stepsize controller state: `τ_{t−1}`, `τ_t`, and the quantities that
/// produced the latest update.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepsizeState<T> {
    /// `τ_{t−1}`.
    pub tau_prev: T,
    /// `τ_t = κ_t τ_{t−1}`.
    pub tau: T,
    /// Clamped ratio `η_t`.
    pub eta: T,
    /// `κ_t = 1 − ω_t + ω_t η_t`.
    pub kappa: T,
    /// Number of adaptations performed.
    pub t: u64,
}

impl<T: Real> StepsizeState<T> {
    /// Fresh state; by convention `τ_{−1} := τ_0`, so the first primal step
    /// uses `τ_0` directly.
    pub fn new(tau0: T) -> Self {
        Self {
            tau_prev: tau0,
            tau: tau0,
            eta: T::one(),
            kappa: T::one(),
            t: 0,
        }
    }

    /// Advances the counter without adapting (constant-stepsize solvers).
    pub fn advance_frozen(&self) -> Self {
        Self {
            tau_prev: self.tau,
            tau: self.tau,
            eta: T::one(),
            kappa: T::one(),
            t: self.t + 1,
        }
    }
}

/// One stepsize adaptation:
/// `η_t = proj_{[η̲, η̄]}(norm_u / norm_gap)`, `κ_t = 1 − ω_t + ω_t η_t`,
/// `τ_t = κ_t τ_{t−1}`.
///
/// A vanishing gap norm signals an exact fixed point; the ratio is then taken
/// as the upper clamp `η̄`.
pub fn adapt_stepsize<T: Real>(
    state: &StepsizeState<T>,
    norm_u: T,
    norm_gap: T,
    omega: T,
    bounds: (T, T),
) -> StepsizeState<T> {
    let (lo, hi) = bounds;
    debug_assert!(T::zero() < lo && lo < hi, "invalid eta bounds");
    let ratio = norm_u / norm_gap;
    // A vanishing gap is an exact fixed point; a non-finite ratio means the
    // iterate is already blowing up and the divergence check will catch it
    // after this iteration. Both clamp to the upper bound.
    let eta = if norm_gap == T::zero() || !ratio.is_finite() {
        hi
    } else {
        ratio.clamp(lo, hi)
    };
    let kappa = T::one() - omega + omega * eta;
    StepsizeState {
        tau_prev: state.tau,
        tau: kappa * state.tau,
        eta,
        kappa,
        t: state.t + 1,
    }
}

/// Why a run stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// Stopping criterion met.
    Tolerance,
    /// Iteration budget exhausted.
    MaxIter,
    /// Non-finite iterate or exploding residual.
    Divergence,
    /// Residual plateaued above tolerance while the stepsize collapsed;
    /// the instance is likely infeasible.
    SuspectedInfeasible,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Tolerance => "tolerance",
            Termination::MaxIter => "max_iter",
            Termination::Divergence => "divergence",
            Termination::SuspectedInfeasible => "suspected_infeasible",
        }
    }
}

/// Per-run record: residual and stepsize traces plus counters and timings.
#[derive(Clone, Debug)]
pub struct RunReport<T> {
    pub iterations: usize,
    pub objective: T,
    /// `‖D u − b‖` after each iteration; length equals `iterations`.
    pub primal_residuals: Vec<T>,
    /// `τ_t` after each iteration; length equals `iterations`.
    pub tau_history: Vec<T>,
    pub converged: bool,
    pub wall_time_secs: f64,
    pub termination: Termination,
}

/// Final iterates together with the run record.
#[derive(Clone, Debug)]
pub struct SolveOutput<T: Real> {
    pub report: RunReport<T>,
    pub u: CVector<T>,
    pub lambda: CVector<T>,
}

enum DualStep<T> {
    /// `λ ← λ + τ_t⁻¹ (D D† + θ² I)⁻¹ p`.
    Regularized,
    /// `λ ← λ + (υ τ_t ‖D‖₂²)⁻¹ p`.
    OperatorNorm { upsilon: T, op_norm_sq: T },
}

/// Adaptive balanced AL method. One iteration performs
///
/// ```text
/// ũᵗ     = uᵗ − τ_{t−1} D† λᵗ
/// u^{t+1} = prox_{τ_{t−1} f}(ũᵗ)
/// η_t    = proj_{[η̲,η̄]}( ‖u^{t+1}‖ / ‖(u^{t+1} − ũᵗ; θ τ_{t−1} λᵗ)‖ )
/// κ_t    = 1 − ω_t + ω_t η_t,   τ_t = κ_t τ_{t−1}
/// p^{t+1} = D(u^{t+1} + κ_t (u^{t+1} − uᵗ)) − b
/// λ^{t+1} = λᵗ + τ_t⁻¹ (D D† + θ² I)⁻¹ p^{t+1}
/// ```
///
/// and stops once `‖D u − b‖ ≤ stop_tol` or the budget is exhausted.
pub fn abal_solve<T: Real, P: SplitProblem<T>>(
    problem: &P,
    config: &AbalConfig<T>,
    u0: &CVector<T>,
    lambda0: &CVector<T>,
) -> Result<SolveOutput<T>> {
    run_adaptive(problem, config, u0, lambda0, DualStep::Regularized)
}

/// The tuning-free-PDHG-style baseline: the adaptive loop of [`abal_solve`]
/// with the dual solve approximated by `(υ τ_t ‖D‖₂²)⁻¹ p`, `υ ≥ 1`.
/// `‖D‖₂²` is estimated once by power iteration on `D D†`.
pub fn tfpdhg_solve<T: Real, P: SplitProblem<T>>(
    problem: &P,
    config: &AbalConfig<T>,
    upsilon: T,
    u0: &CVector<T>,
    lambda0: &CVector<T>,
) -> Result<SolveOutput<T>> {
    if !(upsilon >= T::one()) {
        return Err(Error::InvalidConfig("upsilon must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let op_norm_sq = operator_norm_sq(problem, &mut rng)?;
    if !(op_norm_sq > T::zero()) {
        return Err(Error::InvalidConfig(
            "operator norm estimate is not positive".into(),
        ));
    }
    run_adaptive(
        problem,
        config,
        u0,
        lambda0,
        DualStep::OperatorNorm { upsilon, op_norm_sq },
    )
}

fn run_adaptive<T: Real, P: SplitProblem<T>>(
    problem: &P,
    config: &AbalConfig<T>,
    u0: &CVector<T>,
    lambda0: &CVector<T>,
    dual_step: DualStep<T>,
) -> Result<SolveOutput<T>> {
    config.validate()?;
    check_dims(problem, u0, lambda0)?;

    let started = Instant::now();
    let theta = problem.theta();
    let b = problem.rhs();

    let mut u = u0.clone();
    let mut lambda = lambda0.clone();
    let mut du = problem.apply_constraint(&u);
    let mut ss = StepsizeState::new(config.tau0);

    let mut residuals = Vec::new();
    let mut taus = Vec::new();
    let mut termination = Termination::MaxIter;
    let mut converged = false;
    let diverged_at = real::<T>(DIVERGENCE_RESIDUAL);

    for t in 0..config.max_iter {
        let tau_prev = ss.tau;
        let omega = config.omega.value(t as u64);

        let u_tilde = &u - problem.apply_adjoint(&lambda).scale(tau_prev);
        let u_next = problem.prox(&u_tilde, tau_prev);

        let norm_u = u_next.norm();
        let gap = ((&u_next - &u_tilde).norm_squared()
            + theta * theta * tau_prev * tau_prev * lambda.norm_squared())
        .sqrt();
        ss = adapt_stepsize(&ss, norm_u, gap, omega, (config.eta_lo, config.eta_hi));
        debug_assert!(ss.tau > T::zero(), "stepsize must stay positive");

        let du_next = problem.apply_constraint(&u_next);
        let p = du_next.scale(T::one() + ss.kappa) - du.scale(ss.kappa) - &b;
        let delta = match dual_step {
            DualStep::Regularized => problem.solve_regularized(&p).unscale(ss.tau),
            DualStep::OperatorNorm { upsilon, op_norm_sq } => {
                p.unscale(upsilon * ss.tau * op_norm_sq)
            }
        };
        lambda += delta;

        let residual = (&du_next - &b).norm();
        residuals.push(residual);
        taus.push(ss.tau);
        u = u_next;
        du = du_next;

        if !residual.is_finite()
            || residual > diverged_at
            || !vector_is_finite(&u)
            || !vector_is_finite(&lambda)
        {
            termination = Termination::Divergence;
            break;
        }
        if problem.converged(&u, residual, config.stop_tol) {
            converged = true;
            termination = Termination::Tolerance;
            break;
        }
    }

    let objective = problem.objective(&u);
    Ok(SolveOutput {
        report: RunReport {
            iterations: residuals.len(),
            objective,
            primal_residuals: residuals,
            tau_history: taus,
            converged,
            wall_time_secs: started.elapsed().as_secs_f64(),
            termination,
        },
        u,
        lambda,
    })
}

/// Balanced AL method with constant stepsizes:
///
/// ```text
/// u^{t+1} = prox_{τ f}(uᵗ − τ D† λᵗ)
/// p^{t+1} = D(2 u^{t+1} − uᵗ) − b
/// λ^{t+1} = λᵗ + (γ τ)⁻¹ (D D† + θ² I)⁻¹ p^{t+1}
/// ```
///
/// `γ = 1` recovers the original balanced AL iteration; any `γ ≥ 3/4` is
/// accepted.
pub fn bal_solve<T: Real, P: SplitProblem<T>>(
    problem: &P,
    tau: T,
    gamma: T,
    max_iter: usize,
    stop_tol: T,
    u0: &CVector<T>,
    lambda0: &CVector<T>,
) -> Result<SolveOutput<T>> {
    if !(tau > T::zero()) {
        return Err(Error::InvalidConfig("tau must be positive".into()));
    }
    if !(gamma >= real(0.75)) {
        return Err(Error::InvalidConfig("gamma must be at least 3/4".into()));
    }
    if max_iter == 0 {
        return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
    }
    check_dims(problem, u0, lambda0)?;

    let started = Instant::now();
    let b = problem.rhs();
    let mut u = u0.clone();
    let mut lambda = lambda0.clone();
    let mut du = problem.apply_constraint(&u);

    let mut residuals = Vec::new();
    let mut taus = Vec::new();
    let mut termination = Termination::MaxIter;
    let mut converged = false;
    let diverged_at = real::<T>(DIVERGENCE_RESIDUAL);
    let two = real::<T>(2.0);

    for _ in 0..max_iter {
        let u_tilde = &u - problem.apply_adjoint(&lambda).scale(tau);
        let u_next = problem.prox(&u_tilde, tau);
        let du_next = problem.apply_constraint(&u_next);
        let p = du_next.scale(two) - du.scale(T::one()) - &b;
        lambda += problem.solve_regularized(&p).unscale(gamma * tau);

        let residual = (&du_next - &b).norm();
        residuals.push(residual);
        taus.push(tau);
        u = u_next;
        du = du_next;

        if !residual.is_finite()
            || residual > diverged_at
            || !vector_is_finite(&u)
            || !vector_is_finite(&lambda)
        {
            termination = Termination::Divergence;
            break;
        }
        if problem.converged(&u, residual, stop_tol) {
            converged = true;
            termination = Termination::Tolerance;
            break;
        }
    }

    let objective = problem.objective(&u);
    Ok(SolveOutput {
        report: RunReport {
            iterations: residuals.len(),
            objective,
            primal_residuals: residuals,
            tau_history: taus,
            converged,
            wall_time_secs: started.elapsed().as_secs_f64(),
            termination,
        },
        u,
        lambda,
    })
}

/// Scalar-preconditioned dual step `λ⁺ = λ + (υ τ_t ‖D‖₂²)⁻¹ p`.
pub fn tfpdhg_dual_update<T: Real>(
    lambda: &CVector<T>,
    p: &CVector<T>,
    tau: T,
    upsilon: T,
    op_norm_sq: T,
) -> Result<CVector<T>> {
    if !(op_norm_sq > T::zero()) {
        return Err(Error::InvalidConfig(
            "op_norm_sq must be positive".into(),
        ));
    }
    Ok(lambda + p.unscale(upsilon * tau * op_norm_sq))
}

/// Largest eigenvalue of `D D†` (that is, `‖D‖₂²`) by power iteration with
/// Rayleigh-quotient estimates, relative tolerance `1e-6`, at most 500
/// iterations. Returns the last estimate if the cap is hit.
pub fn operator_norm_sq<T: Real, P: SplitProblem<T>>(
    problem: &P,
    rng: &mut impl Rng,
) -> Result<T> {
    let m = problem.dual_dim();
    if m == 0 {
        return Err(Error::InvalidConfig("dual dimension is zero".into()));
    }
    let mut v = CVector::<T>::from_fn(m, |_, _| {
        Complex::new(
            real::<T>(rng.random::<f64>() - 0.5),
            real::<T>(rng.random::<f64>() - 0.5),
        )
    });
    let nv = v.norm();
    if nv == T::zero() {
        return Err(Error::InvalidConfig("degenerate start vector".into()));
    }
    v.unscale_mut(nv);

    let rel_tol = real::<T>(1e-6);
    let mut estimate = T::zero();
    for _ in 0..500 {
        let w = problem.apply_constraint(&problem.apply_adjoint(&v));
        let rayleigh = v.dotc(&w).re;
        let nw = w.norm();
        if nw == T::zero() {
            return Ok(T::zero());
        }
        v = w.unscale(nw);
        if (rayleigh - estimate).abs() <= rel_tol * rayleigh.abs().max(T::one()) {
            return Ok(rayleigh);
        }
        estimate = rayleigh;
    }
    Ok(estimate)
}

fn check_dims<T: Real, P: SplitProblem<T>>(
    problem: &P,
    u0: &CVector<T>,
    lambda0: &CVector<T>,
) -> Result<()> {
    if u0.len() != problem.primal_dim() {
        return Err(Error::DimensionMismatch(format!(
            "u0 has length {}, problem expects {}",
            u0.len(),
            problem.primal_dim()
        )));
    }
    if lambda0.len() != problem.dual_dim() {
        return Err(Error::DimensionMismatch(format!(
            "lambda0 has length {}, problem expects {}",
            lambda0.len(),
            problem.dual_dim()
        )));
    }
    Ok(())
}
