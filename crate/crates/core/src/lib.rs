//! Numerical toolkit for the Steklov spectra of two-disk domains and the
//! explicit solution families of the half-Laplacian Liouville equation on
//! the real line.
//!
//! The crate is organized around five subsystems:
//!
//! * [`closed_forms`] — the explicit bubble solutions, their scale
//!   derivatives, and their harmonic extensions to the upper half-plane.
//! * [`fractional_ops`] — principal-value quadrature for the 1D
//!   half-Laplacian and the Poisson extension, used to certify that the
//!   closed forms solve the equations they claim to solve.
//! * [`conformal_geometry`] — the power map to a cone, the Möbius map to a
//!   disk pair, and the normalized intersection/union domains.
//! * [`steklov_solver`] — a boundary-integral Dirichlet-to-Neumann
//!   discretization with corner-graded panels, dense spectra, symmetry
//!   sectors, and boundary nodal counting.
//! * [`verification`] — named pass/fail certificates for every quantitative
//!   spectral claim the toolkit checks.
//!
//! With the default `parallel` feature the data-parallel inner loops
//! (matrix assembly, parameter sweeps, certificate batches) run on rayon;
//! disabling it yields a bit-identical sequential build.

pub mod closed_forms;
pub mod conformal_geometry;
pub mod fractional_ops;
pub mod steklov_solver;
pub mod verification;

pub mod quadrature;

pub(crate) mod linalg;
pub mod parallel;
