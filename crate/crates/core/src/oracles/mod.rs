//! Independent dense-algebra and brute-force verifiers.
//!
//! These back the tests and debug assertions for the structured paths: the
//! dense dual system against the Schur-complement solve, bisection proximal
//! maps against the sort/Newton implementations, feasible-point sampling
//! against the spectral projection, and a high-accuracy reference solve used
//! as the objective anchor in benchmarks.

mod checks;
mod dense;

pub use checks::{
    adjoint_consistency, check_split_contract, engineered_feasible_point, in_feasible_set,
    projection_distance_check, random_complex, random_complex_vector, random_hermitian,
    random_scenario, random_scenario_with, sample_feasible_blocks, scalar_prox_oracle,
    ContractCheck,
};
pub use dense::{
    assemble_constraint_matrix, reference_solve, reference_solve_with_tau0, simplex_project_bisect,
    stack_dual, stack_primal, unstack_dual, unstack_primal, DenseDualSystem,
    DenseVectorizedProblem, ReferenceSolution,
};
