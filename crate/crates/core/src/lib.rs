//! Cardinal spline wavelet dictionaries on a compact interval.
//!
//! The crate builds multiresolution bases and redundant dictionaries of
//! B-splines and semi-orthogonal spline wavelets, verifies constructively
//! that refining the translation lattice spans higher-dimensional spline
//! spaces, quantifies dictionary coherence, and runs greedy sparse
//! approximation (forward selection, swapping refinement, backward pruning)
//! against sampled signals.
//!
//! Layout:
//! - [`dyadic`]: exact dyadic-rational arithmetic for knots and translations.
//! - [`poly`]: piecewise polynomials with exact breakpoints and L2 inner
//!   products; the concrete representation of every atom.
//! - [`mra`]: B-splines, Chui-Wang wavelets, and the cut-off bases for the
//!   nested spaces V_j and their complements W_j.
//! - [`dictionary`]: redundant families on refined translation lattices,
//!   sampling, and Gram matrices.
//! - [`analysis`]: cumulative coherence, refinement expansions, and span
//!   verification.
//! - [`pursuit`]: the three-stage greedy approximation.
//! - [`signals`] / [`experiment`]: signal generation and the experiment
//!   runner behind the CLI.

pub mod analysis;
pub mod dictionary;
pub mod dyadic;
pub mod experiment;
pub mod mra;
pub mod poly;
pub mod pursuit;
mod quad;
pub mod signals;

pub use dyadic::Dyadic;
pub use poly::PiecewisePoly;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("signal input{}: {message}", .line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    SignalInput { line: Option<usize>, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
