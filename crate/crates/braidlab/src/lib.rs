//! Numerical verification lab for a braided tensor product of C*-algebras
//! carrying an action of the real line.
//!
//! The lab discretizes the line on a finite centered lattice, represents the
//! relevant operator algebras as dense complex matrices, and checks the
//! structural identities of the braided product numerically: exchange
//! relations between position-type and momentum-type embeddings, injectivity
//! of the braided embedding, the shear unitary that implements
//! associativity, and three concrete crossed-product models (continuous
//! line, discrete lattice, dense quasi-lattice).
//!
//! Everything is deterministic: fixed summation orders, seeded RNG, no
//! threading, no platform-dependent BLAS. Checks are grouped into suites
//! (see [`suite`]) runnable through the `verify` binary or directly; each
//! suite produces a [`report::Report`] with one record per residual.

pub mod algebra;
pub mod associator;
pub mod braided;
pub mod crossed;
pub mod gauss;
pub mod grid;
pub mod linalg;
pub mod report;
pub mod suite;
pub mod weyl;

pub use linalg::{CMat, CVec, C64};

/// Errors produced by constructors and checks.
///
/// Numerical routines return `Err` only for structural problems (bad sizes,
/// incompatible lattices, unparseable input); a large residual is data, not
/// an error.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("incompatible lattice: {0}")]
    IncompatibleLattice(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub fn lattice(msg: impl Into<String>) -> Self {
        Error::IncompatibleLattice(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
