//! Beamforming for MIMO amplify-and-forward relay links with limited feedback.
//!
//! The crate covers the full pipeline from channel realizations to BER curves:
//!
//! - [`numerics`] — dense complex linear algebra, full SVD, reproducible
//!   counter-based random streams.
//! - [`channels`] — quasi-static i.i.d. Rayleigh channel sets for the
//!   direct, Tx-relay and relay-Rx links.
//! - [`codebooks`] — chordal distance, max–min line packings, random
//!   codebooks, nearest/best codeword queries, codebook files.
//! - [`schemes`] — transmit/relay/receive beamformer solvers: optimal and
//!   quantized, with and without the direct link, plus baselines.
//! - [`analysis`] — closed-form SNR-loss bounds and the inequality checks
//!   backing them.
//! - [`simulator`] — two-slot BPSK Monte-Carlo BER engine with
//!   common-random-numbers scheme comparison and feedback-bit accounting.
//! - [`cli`] — config-driven scenario runner used by the `grassrelay`
//!   binary.
//!
//! Interval-level Monte-Carlo loops run on rayon when the default
//! `parallel` feature is enabled and fall back to sequential execution
//! without it; results are bit-identical either way.

pub mod analysis;
pub mod channels;
pub mod cli;
pub mod codebooks;
pub mod numerics;
pub mod schemes;
pub mod simulator;

/// Deterministic indexed map over Monte-Carlo work units: rayon
/// data-parallel with the `parallel` feature, plain sequential without.
/// Results come back in index order either way.
pub(crate) mod exec {
    #[cfg(feature = "parallel")]
    pub fn map_indexed<T, F>(n: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }

    #[cfg(not(feature = "parallel"))]
    pub fn map_indexed<T, F>(n: u64, f: F) -> Vec<T>
    where
        F: Fn(u64) -> T,
    {
        (0..n).map(f).collect()
    }
}

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-finite matrix")]
    NonFiniteMatrix,
    #[error("zero vector has no canonical phase")]
    ZeroVector,
    #[error("vector norm {norm} is not unit")]
    NonUnitVector { norm: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("codebook needs at least {needed} vectors, got {got}")]
    CodebookTooSmall { needed: usize, got: usize },
    #[error("codewords {i} and {j} coincide as lines")]
    DuplicateCodeword { i: usize, j: usize },
    #[error("{path}:{line}: {message}")]
    CodebookParse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("relay-receiver hop carries no signal")]
    DegenerateRelayHop,
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
