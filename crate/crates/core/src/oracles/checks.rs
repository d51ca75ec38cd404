//! Brute-force verifiers and random instance generators used by tests and
//! debug assertions. None of these share code with the optimized paths they
//! check beyond the basic matrix types.

use rand::Rng;

use crate::error::Result;
use crate::isac::ScenarioData;
use crate::linalg::{hermitian_eigen, hermitian_part, inner_re, trace_real};
use crate::scalar::{real, CMatrix, CVector, Complex, RVector, Real};
use crate::splitting::SplitProblem;

/// Minimizer of `τ/z + ½(z − σ)²` over `z > 0` by bisection on the strictly
/// increasing derivative factor `z³ − σ z² − τ`, driven to machine precision.
/// This is the independent oracle for the trace-inverse prox eigenvalue map.
pub fn scalar_prox_oracle<T: Real>(sigma: T, tau: T) -> T {
    assert!(tau > T::zero(), "scalar prox oracle requires tau > 0");
    let g = |z: T| z * z * (z - sigma) - tau;
    let mut lo = sigma.max(T::zero());
    let mut hi = lo + tau.cbrt() + T::one();
    while g(hi) < T::zero() {
        hi += hi - lo;
    }
    for _ in 0..200 {
        if hi - lo <= T::default_epsilon() * hi.max(T::one()) {
            break;
        }
        let mid = (lo + hi) / real::<T>(2.0);
        if g(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / real::<T>(2.0)
}

/// Standard complex Gaussian-ish entry (uniform re/im is enough for test
/// instances; distribution shape is irrelevant to the identities checked).
pub fn random_complex<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    Complex::new(
        real::<T>(rng.random::<f64>() * 2.0 - 1.0),
        real::<T>(rng.random::<f64>() * 2.0 - 1.0),
    )
}

pub fn random_complex_vector<T: Real, R: Rng + ?Sized>(len: usize, rng: &mut R) -> CVector<T> {
    CVector::from_fn(len, |_, _| random_complex(rng))
}

pub fn random_hermitian<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix<T> {
    let raw = CMatrix::from_fn(n, n, |_, _| random_complex(rng));
    hermitian_part(&raw)
}

/// Random scenario with nonzero channels; SINR targets 10, unit noise,
/// power budget 100 (overridable by callers that need other scales).
pub fn random_scenario<T: Real, R: Rng + ?Sized>(
    n: usize,
    k: usize,
    rng: &mut R,
) -> ScenarioData<T> {
    random_scenario_with::<T, R>(n, k, real(10.0), real(1.0), real(100.0), rng)
}

pub fn random_scenario_with<T: Real, R: Rng + ?Sized>(
    n: usize,
    k: usize,
    gamma: T,
    sigma2: T,
    p_t: T,
    rng: &mut R,
) -> ScenarioData<T> {
    let h = CMatrix::from_fn(n, k, |_, _| random_complex(rng));
    ScenarioData::new(h, RVector::from_element(k, gamma), sigma2, p_t)
        .expect("random scenario is valid")
}

/// Random point of the feasible set: positive semidefinite blocks rescaled
/// to total trace `p_t`.
pub fn sample_feasible_blocks<T: Real, R: Rng + ?Sized>(
    blocks: usize,
    n: usize,
    p_t: T,
    rng: &mut R,
) -> Vec<CMatrix<T>> {
    let mut out: Vec<CMatrix<T>> = (0..blocks)
        .map(|_| {
            let g = CMatrix::from_fn(n, n, |_, _| random_complex::<T, R>(rng));
            hermitian_part(&(&g * g.adjoint()))
        })
        .collect();
    let total: T = out.iter().map(trace_real).fold(T::zero(), |a, b| a + b);
    let scale = p_t / total;
    for m in &mut out {
        m.scale_mut(scale);
    }
    out
}

/// Membership test for the power-coupled spectrahedron at tolerance `tol`
/// (relative for the trace, absolute-scaled for the eigenvalues).
pub fn in_feasible_set<T: Real>(blocks: &[CMatrix<T>], p_t: T, tol: T) -> bool {
    let total: T = blocks.iter().map(trace_real).fold(T::zero(), |a, b| a + b);
    if (total - p_t).abs() > tol * p_t.max(T::one()) {
        return false;
    }
    for (idx, m) in blocks.iter().enumerate() {
        match hermitian_eigen(m, idx) {
            Ok((_, w)) => {
                let scale = T::one().max(m.norm());
                if w.iter().any(|&x| x < -tol * scale) {
                    return false;
                }
            }
            Err(_) => return false,
        }
    }
    true
}

/// Checks that `candidate` is the Euclidean projection of `point` onto the
/// feasible set: it must be feasible and at least as close to `point` as
/// every sampled feasible comparison point.
pub fn projection_distance_check<T: Real, R: Rng + ?Sized>(
    point: &[CMatrix<T>],
    candidate: &[CMatrix<T>],
    p_t: T,
    trials: usize,
    rng: &mut R,
) -> bool {
    if !in_feasible_set(candidate, p_t, real(1e-10)) {
        return false;
    }
    let n = point[0].nrows();
    let dist = |a: &[CMatrix<T>], b: &[CMatrix<T>]| {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm_squared())
            .fold(T::zero(), |acc, v| acc + v)
            .sqrt()
    };
    let d_candidate = dist(point, candidate);
    let slack = real::<T>(1e-10);
    for _ in 0..trials {
        let sample = sample_feasible_blocks(point.len(), n, p_t, rng);
        if d_candidate > dist(point, &sample) + slack {
            return false;
        }
    }
    true
}

/// Feasible point of the original problem with exactly prescribed SINR
/// slacks `slack_scale[k] · σ²` and a small sensing block `sensing_level · I`.
///
/// Each user's block is a rank-one covariance along the zero-forcing
/// direction (the component of `h_k` orthogonal to every other channel), so
/// cross terms vanish and the slack of user `k` depends only on its own
/// power coefficient. Requires `K ≤ N` and channels in general position.
pub fn engineered_feasible_point<T: Real>(
    scenario: &ScenarioData<T>,
    slack_scale: &[T],
    sensing_level: T,
) -> Vec<CMatrix<T>> {
    let n = scenario.n();
    let k = scenario.k();
    assert!(k <= n, "zero-forcing construction needs K <= N");
    assert_eq!(slack_scale.len(), k);
    let h = scenario.channels();
    let sigma2 = scenario.sigma2();
    let mut blocks = Vec::with_capacity(k + 1);
    for (user, &slack) in slack_scale.iter().enumerate() {
        // Orthonormal basis of the other channels, then project h_user onto
        // their orthogonal complement.
        let mut basis: Vec<CVector<T>> = Vec::new();
        for other in 0..k {
            if other == user {
                continue;
            }
            let mut v = h.column(other).clone_owned();
            for q in &basis {
                let coef = q.dotc(&v);
                v -= q * coef;
            }
            let norm = v.norm();
            if norm > real::<T>(1e-12) {
                basis.push(v.unscale(norm));
            }
        }
        let mut u = h.column(user).clone_owned();
        for q in &basis {
            let coef = q.dotc(&u);
            u -= q * coef;
        }
        let norm = u.norm();
        assert!(
            norm > real::<T>(1e-9),
            "zero-forcing direction degenerate for user {user}"
        );
        let direction = u.unscale(norm);
        let profile = &direction * direction.adjoint();
        let d = crate::linalg::quad_form(h.column(user), &profile).re;
        let rho = scenario.rho()[user];
        let load_sensing = sensing_level * h.column(user).norm_squared();
        let c = (sigma2 * (T::one() + slack) + load_sensing) / ((rho - T::one()) * d);
        blocks.push(profile.scale(c));
    }
    blocks.push(CMatrix::identity(n, n).scale(sensing_level));
    blocks
}

/// Maximum relative error of the adjoint identity
/// `⟨𝒜(W,Z), μ⟩ + Re⟨ℬ(W,Z), Λ⟩ = Re⟨(W,Z), 𝒟†(μ,Λ)⟩`
/// over random Hermitian draws.
pub fn adjoint_consistency<T: Real, R: Rng + ?Sized>(
    scenario: &ScenarioData<T>,
    trials: usize,
    rng: &mut R,
) -> Result<T> {
    let n = scenario.n();
    let k = scenario.k();
    let mut worst = T::zero();
    for _ in 0..trials {
        let w: Vec<CMatrix<T>> = (0..scenario.blocks())
            .map(|_| random_hermitian(n, rng))
            .collect();
        let z = random_hermitian(n, rng);
        let mu = RVector::from_fn(k, |_, _| real::<T>(rng.random::<f64>() * 2.0 - 1.0));
        let lambda = random_hermitian(n, rng);

        let a = scenario.apply_a(&w, &z)?;
        let b = scenario.apply_b(&w, &z)?;
        let lhs = a.dot(&mu) + inner_re(&b, &lambda);

        let (g_w, g_z) = scenario.apply_adjoint(&mu, &lambda)?;
        let rhs = w
            .iter()
            .zip(g_w.iter())
            .map(|(x, g)| inner_re(x, g))
            .fold(T::zero(), |acc, v| acc + v)
            + inner_re(&z, &g_z);

        let scale = lhs.abs().max(rhs.abs()).max(T::one());
        worst = worst.max((lhs - rhs).abs() / scale);
    }
    Ok(worst)
}

/// Residuals of the problem-contract identities over random draws:
/// adjoint consistency of `apply_constraint`/`apply_adjoint` and exactness of
/// `solve_regularized` against `D D† + θ² I` applied through the operators.
#[derive(Clone, Copy, Debug)]
pub struct ContractCheck<T> {
    pub adjoint_error: T,
    pub inverse_error: T,
}

pub fn check_split_contract<T: Real, P: SplitProblem<T>, R: Rng + ?Sized>(
    problem: &P,
    trials: usize,
    rng: &mut R,
) -> ContractCheck<T> {
    let mut adjoint_error = T::zero();
    let mut inverse_error = T::zero();
    let theta_sq = problem.theta() * problem.theta();
    for _ in 0..trials {
        let u = random_complex_vector(problem.primal_dim(), rng);
        let lambda = random_complex_vector(problem.dual_dim(), rng);

        let lhs = problem.apply_constraint(&u).dotc(&lambda).re;
        let rhs = u.dotc(&problem.apply_adjoint(&lambda)).re;
        let scale = lhs.abs().max(rhs.abs()).max(T::one());
        adjoint_error = adjoint_error.max((lhs - rhs).abs() / scale);

        let p = random_complex_vector(problem.dual_dim(), rng);
        let x = problem.solve_regularized(&p);
        let back = problem.apply_constraint(&problem.apply_adjoint(&x)) + x.scale(theta_sq);
        let err = (&back - &p).norm() / p.norm().max(T::one());
        inverse_error = inverse_error.max(err);
    }
    ContractCheck {
        adjoint_error,
        inverse_error,
    }
}
