//! Ricci flow and Lie bracket flow of diagonal metrics on nilpotent Lie
//! algebras with nice bases.
//!
//! A [`BracketSpec`] lists the nonzero structure constants over an orthogonal
//! basis. Diagonal metrics evolve under the Ricci flow through the structure
//! vector `a` alone, governed by the root matrix `Y` and Gram matrix
//! `U = Y Y^T` of a [`RootSystem`].

pub mod algebra;
pub mod catalog;
pub mod curvature;
pub mod error;
pub mod flow;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod ode;
pub mod projective;

pub use algebra::{
    ad_matrix, nilpotency_class, rescaled_constants, root_system, structure_vector,
    structure_vector_exact, validate_jacobi, BracketEntry, BracketSpec, DiagonalMetric,
    JacobiReport, RootSystem, StructureVector, Triple,
};
pub use catalog::CatalogEntry;
pub use curvature::{
    find_soliton_metric, is_ricci_diagonal, is_stably_ricci_diagonal, ricci_form_oracle,
    ricci_vector, soliton_test, soliton_test_exact, verify_derivation, verify_derivation_exact,
    ExactSolitonCertificate, SolitonCertificate,
};
pub use error::{Error, Result};
pub use flow::{
    collapse_analysis, conserved_monomials, integrate, integrate_batch, monitor_invariants,
    soliton_trajectory, volume_normalize, CollapseReport, FlowState, IntegratorConfig, Trajectory,
};
pub use linalg::Rational;
pub use projective::{
    equilibria, integrate_projective, ProjectiveSystem, Provenance, SimplexState,
};
