//! Proximal maps of the beamforming problem: the projection of the Hermitian
//! blocks onto the power-coupled spectrahedron
//!
//! ```text
//! 𝒲 = { (W_1, …, W_{K+1}) : W_k ⪰ 0,  Σ_k tr(W_k) = P_T }
//! ```
//!
//! and the proximal map of `tr(Z⁻¹)` over the positive definite cone. Both
//! reduce to eigenvalue computations: `𝒲` is invariant under block-wise
//! unitary conjugation, so its projection keeps each block's eigenbasis and
//! jointly projects the concatenated spectra onto the scaled simplex; the
//! trace-inverse prox maps each eigenvalue `σ` to the unique positive root of
//! `z³ − σ z² − τ = 0`.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, rebuild_hermitian};
use crate::scalar::{precision_floor, real, CMatrix, RVector, Real};

/// Euclidean projection of `v` onto `{x ≥ 0, Σ x = s}` by sort-and-threshold
/// in `O(m log m)`.
pub fn simplex_project<T: Real>(v: &RVector<T>, s: T) -> RVector<T> {
    debug_assert!(s > T::zero(), "simplex scale must be positive");
    let m = v.len();
    let mut sorted: Vec<T> = v.iter().copied().collect();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("non-comparable entry"));

    let mut cumsum = T::zero();
    let mut threshold = T::zero();
    for (j, &x) in sorted.iter().enumerate() {
        cumsum += x;
        let count = real::<T>((j + 1) as f64);
        let candidate = (cumsum - s) / count;
        if x - candidate > T::zero() {
            threshold = candidate;
        }
    }
    RVector::from_fn(m, |i, _| (v[i] - threshold).max(T::zero()))
}

/// Projects Hermitian blocks onto `𝒲`: eigendecompose every block, jointly
/// project all `(K+1)·N` eigenvalues onto the simplex scaled to `P_T`, and
/// rebuild each block in its own eigenbasis.
pub fn project_w<T: Real>(blocks: &[CMatrix<T>], p_t: T) -> Result<Vec<CMatrix<T>>> {
    if !(p_t > T::zero()) {
        return Err(Error::Domain("power budget must be positive".into()));
    }
    let mut bases = Vec::with_capacity(blocks.len());
    let mut spectra = Vec::new();
    for (idx, block) in blocks.iter().enumerate() {
        let (u, w) = hermitian_eigen(block, idx)?;
        spectra.extend(w.iter().copied());
        bases.push((u, w.len()));
    }
    let projected = simplex_project(&RVector::from_vec(spectra), p_t);

    let mut out = Vec::with_capacity(blocks.len());
    let mut offset = 0;
    for (u, len) in bases {
        let vals = RVector::from_fn(len, |i, _| projected[offset + i]);
        offset += len;
        out.push(rebuild_hermitian(&u, &vals));
    }
    Ok(out)
}

/// Unique positive root of `z³ − σ z² − τ = 0` for `τ > 0`.
///
/// `g(z) = z²(z − σ)` is negative on `(0, max(σ, 0)]` and strictly increasing
/// beyond, so the root is unique and exceeds `max(σ, 0)`; it also lies below
/// `max(σ, 0) + τ^{1/3}`. Newton iteration starts at that upper end with a
/// bisection safeguard on the bracket.
pub fn cubic_positive_root<T: Real>(sigma: T, tau: T) -> Result<T> {
    if !(tau > T::zero()) {
        return Err(Error::Domain("cubic root requires tau > 0".into()));
    }
    let g = |z: T| z * z * (z - sigma) - tau;

    let mut lo = sigma.max(T::zero());
    let mut hi = lo + tau.cbrt() + T::one();
    let mut expansions = 0;
    while g(hi) < T::zero() {
        hi += hi - lo;
        expansions += 1;
        if expansions > 200 {
            return Err(Error::RootSolver("bracket expansion failed".into()));
        }
    }

    let tol = precision_floor::<T>(1e-12);
    let two = real::<T>(2.0);
    let three = real::<T>(3.0);
    let mut z = sigma.max(T::zero()) + tau.cbrt();
    if z <= lo || z >= hi {
        z = (lo + hi) / two;
    }
    for _ in 0..200 {
        let gz = g(z);
        if gz.abs() <= tol * T::one().max(z * z * z) {
            return Ok(z);
        }
        if gz > T::zero() {
            hi = z;
        } else {
            lo = z;
        }
        let dg = z * (three * z - two * sigma);
        let mut next = if dg > T::zero() { z - gz / dg } else { lo };
        if !(next > lo && next < hi) {
            next = (lo + hi) / two;
        }
        if (hi - lo) <= T::default_epsilon() * hi.max(T::one()) {
            return Ok((lo + hi) / two);
        }
        z = next;
    }
    Err(Error::RootSolver(
        "cubic root iteration did not converge".into(),
    ))
}

/// Proximal map of `τ · tr(Z⁻¹)` restricted to Hermitian positive definite
/// matrices: eigendecompose `Z̃`, replace each eigenvalue `σ_i` by the
/// positive root of `z³ − σ_i z² − τ = 0`, and rebuild. The result is
/// Hermitian positive definite for any Hermitian input.
pub fn prox_trace_inverse<T: Real>(z_tilde: &CMatrix<T>, tau: T) -> Result<CMatrix<T>> {
    if !(tau > T::zero()) {
        return Err(Error::Domain("prox stepsize must be positive".into()));
    }
    let (u, w) = hermitian_eigen(z_tilde, 0)?;
    let mut roots = RVector::zeros(w.len());
    for i in 0..w.len() {
        roots[i] = cubic_positive_root(w[i], tau)?;
    }
    Ok(rebuild_hermitian(&u, &roots))
}
