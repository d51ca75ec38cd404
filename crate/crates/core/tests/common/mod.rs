//! Shared test instances for the generic solvers.

use abal_core::scalar::{cre, Complex};
use abal_core::splitting::SplitProblem;
use abal_core::{CMatrix, CVector};
use nalgebra::linalg::Cholesky;
use rand::Rng;

/// min ½‖u − c‖² s.t. D u = b with a random dense `D` (full row rank almost
/// surely) and a strongly feasible `b = D u_feas`. The solution is
/// `u* = c − D† (D D†)⁻¹ (D c − b)`.
pub struct AffineProblem {
    pub c: CVector<f64>,
    pub d: CMatrix<f64>,
    pub b: CVector<f64>,
    theta: f64,
    regularized: Cholesky<Complex<f64>, nalgebra::Dyn>,
    gram: Cholesky<Complex<f64>, nalgebra::Dyn>,
}

impl AffineProblem {
    pub fn random(n: usize, m: usize, theta: f64, rng: &mut impl Rng) -> Self {
        assert!(m <= n);
        let mut entry = |_: usize, _: usize| {
            Complex::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
        };
        let d = CMatrix::from_fn(m, n, &mut entry);
        let c = CVector::from_fn(n, |_, _| entry(0, 0));
        let u_feas = CVector::from_fn(n, |_, _| entry(0, 0));
        let b = &d * &u_feas;

        let gram_matrix = &d * d.adjoint();
        let mut reg = gram_matrix.clone();
        for i in 0..m {
            reg[(i, i)] += cre(theta * theta);
        }
        Self {
            c,
            d,
            b,
            theta,
            regularized: Cholesky::new(reg).expect("regularized gram is PD"),
            gram: Cholesky::new(gram_matrix).expect("gram is PD"),
        }
    }

    pub fn solution(&self) -> CVector<f64> {
        let residual = &self.d * &self.c - &self.b;
        &self.c - self.d.ad_mul(&self.gram.solve(&residual))
    }
}

impl SplitProblem<f64> for AffineProblem {
    fn primal_dim(&self) -> usize {
        self.d.ncols()
    }
    fn dual_dim(&self) -> usize {
        self.d.nrows()
    }
    fn theta(&self) -> f64 {
        self.theta
    }
    fn prox(&self, v: &CVector<f64>, tau: f64) -> CVector<f64> {
        (v + self.c.scale(tau)).unscale(1.0 + tau)
    }
    fn apply_constraint(&self, u: &CVector<f64>) -> CVector<f64> {
        &self.d * u
    }
    fn apply_adjoint(&self, lambda: &CVector<f64>) -> CVector<f64> {
        self.d.ad_mul(lambda)
    }
    fn solve_regularized(&self, p: &CVector<f64>) -> CVector<f64> {
        self.regularized.solve(p)
    }
    fn rhs(&self) -> CVector<f64> {
        self.b.clone()
    }
    fn objective(&self, u: &CVector<f64>) -> f64 {
        0.5 * (u - &self.c).norm_squared()
    }
}
