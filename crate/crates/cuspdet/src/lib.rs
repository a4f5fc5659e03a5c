//! Spectrum, spectral zeta function and zeta-regularized determinant of the
//! Dirichlet pseudo-Laplacian on a hyperbolic cusp `S¹ × ]a, ∞[` twisted by a
//! flat unitary line bundle with holonomy `e^{2iπα}`.
//!
//! The eigenvalues are `λ = 1/4 + r²` where `r` runs over the real zeros of
//! `ν ↦ K_{iν}(2π|k+α|a)`, one family per Fourier mode `k`.

pub mod hypergeom;
pub mod quad;
pub mod ramanujan;
pub mod specfun;
pub mod spectrum;
pub mod zetadet;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl Error {
    /// True for errors caused by invalid input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Numeric(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub use spectrum::Geometry;
pub use zetadet::SpectralZetaParams;
