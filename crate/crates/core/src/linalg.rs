//! Small dense Hermitian helpers shared by the solvers and their verifiers.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::ComplexField;

use crate::error::{Error, Result};
use crate::scalar::{real, CMatrix, CVector, Complex, RVector, Real};

/// Hermitian part `(M + M†)/2`.
///
/// For any matrix this is the Euclidean projection onto the Hermitian
/// subspace; the solvers use it to keep rounding noise out of the iterates.
pub fn hermitian_part<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    (m + m.adjoint()).scale(real::<T>(0.5))
}

/// Largest entrywise deviation from Hermitian symmetry, `max |m_ij - conj(m_ji)|`.
pub fn hermitian_violation<T: Real>(m: &CMatrix<T>) -> T {
    let n = m.nrows();
    let mut worst = T::zero();
    for j in 0..n {
        for i in 0..=j {
            let d = m[(i, j)] - m[(j, i)].conj();
            worst = worst.max(d.modulus());
        }
    }
    worst
}

/// Eigendecomposition of a Hermitian matrix, returning `(U, w)` with
/// `M = U Diag(w) U†`. The input is symmetrized first so that callers feeding
/// matrices that are Hermitian only up to rounding get a deterministic result.
pub fn hermitian_eigen<T: Real>(m: &CMatrix<T>, block: usize) -> Result<(CMatrix<T>, RVector<T>)> {
    let n = m.nrows();
    if !matrix_is_finite(m) {
        return Err(Error::Eigendecomposition { block });
    }
    let sym = hermitian_part(m);
    let eig = SymmetricEigen::try_new(sym, T::default_epsilon(), 100 * n + 1000)
        .ok_or(Error::Eigendecomposition { block })?;
    Ok((eig.eigenvectors, eig.eigenvalues))
}

/// Rebuilds `U Diag(w) U†` from an eigenbasis and (possibly transformed)
/// eigenvalues, re-symmetrizing to keep the result Hermitian to rounding.
pub fn rebuild_hermitian<T: Real>(u: &CMatrix<T>, vals: &RVector<T>) -> CMatrix<T> {
    let mut scaled = u.clone();
    for (j, &v) in vals.iter().enumerate() {
        scaled.column_mut(j).scale_mut(v);
    }
    hermitian_part(&(scaled * u.adjoint()))
}

/// Real part of the trace.
pub fn trace_real<T: Real>(m: &CMatrix<T>) -> T {
    let mut t = T::zero();
    for i in 0..m.nrows().min(m.ncols()) {
        t += m[(i, i)].re;
    }
    t
}

/// `tr(M⁻¹)` of a Hermitian positive definite matrix.
///
/// Returns `+inf` when the Cholesky factorization fails (the matrix is
/// singular or indefinite); callers treat that as an out-of-domain sentinel
/// rather than an error.
pub fn trace_inverse<T: Real>(m: &CMatrix<T>) -> T {
    if !matrix_is_finite(m) {
        return real::<T>(f64::INFINITY);
    }
    match nalgebra::linalg::Cholesky::new(hermitian_part(m)) {
        Some(chol) => {
            let n = m.nrows();
            let inv = chol.solve(&CMatrix::<T>::identity(n, n));
            trace_real(&inv)
        }
        None => real::<T>(f64::INFINITY),
    }
}

/// Real inner product `Re⟨A, B⟩ = Re tr(A† B)`.
pub fn inner_re<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    a.dotc(b).re
}

pub fn matrix_is_finite<T: Real>(m: &CMatrix<T>) -> bool {
    m.iter().all(|z| z.is_finite())
}

pub fn vector_is_finite<T: Real>(v: &CVector<T>) -> bool {
    v.iter().all(|z| z.is_finite())
}

/// Rank-one outer product `h h†` of a column vector.
pub fn outer<T: Real>(h: &CVector<T>) -> CMatrix<T> {
    h * h.adjoint()
}

/// Quadratic form `h† M h` without materializing `h h†`.
pub fn quad_form<T: Real>(h: nalgebra::DVectorView<Complex<T>>, m: &CMatrix<T>) -> Complex<T> {
    let mh = m * h;
    h.dotc(&mh)
}
