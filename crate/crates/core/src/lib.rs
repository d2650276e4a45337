//! Rational models of nilmanifolds: free commutative differential graded
//! algebras, their cohomology, and the toral-rank bounds computed from them.

pub mod algebra;
pub mod cdga;
pub mod cohomology;
pub mod dsl;
pub mod lie;
pub mod linalg;
pub mod models;
pub mod trc;

use thiserror::Error;

pub use algebra::{AlgebraError, Element, Monomial, Rational, Signature};
pub use cdga::{Cdga, CdgaError};
pub use cohomology::{betti, BettiTable, CohomologyError};
pub use dsl::{parse, Diagnostic, SourceDocument};
pub use lie::{LieError, LiePresentation};
pub use linalg::{LinalgError, SparseExactMatrix};
pub use models::ModelError;
pub use trc::TrcError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Cdga(#[from] CdgaError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Trc(#[from] TrcError),
}
