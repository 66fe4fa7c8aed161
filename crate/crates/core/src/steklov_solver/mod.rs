//! Steklov eigenvalues and boundary eigenfunctions of disk-pair domains
//! (and the unit disk) via a boundary-integral Dirichlet-to-Neumann
//! discretization.
//!
//! The harmonic extension is represented as a single-layer potential plus
//! a constant; the bordered system `[V 1; w 0]` makes that representation
//! well-posed regardless of logarithmic capacity (the unit disk has
//! capacity exactly 1, where the plain single-layer operator is singular).
//! The DtN map is the interior normal-derivative trace `(I/2 + K') sigma`,
//! symmetrized in the boundary-L2 inner product and handed to a dense
//! symmetric eigensolver, either whole or restricted to a parity sector.

mod assembly;
mod mesh;
mod spectrum;

use thiserror::Error;

pub use assembly::{assemble_dtn, assemble_layers, DtnOperator, Layers};
pub use mesh::{
    discretize, discretize_full, discretize_scaled, BoundaryDiscretization, DomainSpec, Panel,
    DEFAULT_PANEL_ORDER, ELL_MAX, ELL_MIN,
};
pub use spectrum::{
    boundary_nodal_count, classify_symmetry, compute_sector_spectrum, compute_spectrum,
    interior_eval, DomainSummary, InteriorEvaluator, Sector, SpectrumDocument, SteklovSpectrum,
    SymmetryLabel,
};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("half-distance ell = {0} outside the supported range [0.02, 0.98]")]
    DegenerateDomain(f64),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("spectrum not converged: successive refinements disagree by {est_error:e} > tol {tol:e}")]
    NotConverged { est_error: f64, tol: f64 },
    #[error("evaluation point too close to the boundary for the interior representation")]
    TooCloseToBoundary,
    #[error("dense linear algebra failed: {0}")]
    LinAlg(String),
}
