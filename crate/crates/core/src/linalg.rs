//! Small wrappers around the dense routines the solver needs.
//!
//! faer's internal rayon-blocked matmul produces wrong results for a
//! window of matrix sizes (observed at n ≈ 352..384 with two threads), so
//! every entry point here pins faer to its sequential kernels. The crate's
//! own data parallelism (assembly rows, sweep points) is unaffected.

use faer::linalg::solvers::{Eigen, PartialPivLu, Solve};
use faer::Mat;
use std::sync::Once;

static PIN_SEQ: Once = Once::new();

fn pin_sequential_kernels() {
    PIN_SEQ.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

/// Full eigendecomposition of a real square matrix (complex pairs allowed).
pub fn eigen_real(a: &Mat<f64>) -> Result<Eigen<f64>, super::steklov_solver::SolverError> {
    pin_sequential_kernels();
    Eigen::<f64>::new_from_real(a.as_ref())
        .map_err(|e| super::steklov_solver::SolverError::LinAlg(format!("{e:?}")))
}

/// Solve `a X = rhs` for a matrix of right-hand sides.
pub fn solve_multi(a: &Mat<f64>, rhs: &Mat<f64>) -> Mat<f64> {
    pin_sequential_kernels();
    let lu = PartialPivLu::new(a.as_ref());
    lu.solve(rhs)
}

/// Dense product `a * b`.
pub fn mat_mul(a: &Mat<f64>, b: &Mat<f64>) -> Mat<f64> {
    pin_sequential_kernels();
    a * b
}
