//! Belief-propagation decoding of BCH and punctured Reed-Muller codes on
//! permutation-stacked parity-check matrices.
//!
//! The library builds cyclic codes from their generator polynomials over
//! GF(2^m), extends them by an overall parity bit, and stacks column-permuted
//! copies of a circulant parity-check matrix into one large matrix `H`. A
//! weighted belief-propagation decoder runs on the Tanner graph of `H` with a
//! small bank of tied weights that is shared across all permuted blocks.
//! The weights can be trained end to end with exact hand-rolled gradients.
//!
//! Module map:
//!
//! - [`gf2m`]: GF(2^m) field tables, binary polynomials, cyclotomic cosets
//!   and minimal polynomials.
//! - [`code`]: code construction (BCH / punctured RM), the index mapping `f`,
//!   the translation permutations, circulant and stacked check matrices,
//!   encoding and membership tests.
//! - [`tanner`]: the structured Tanner graph of the stacked matrix with its
//!   edge triples and tied-weight slots.
//! - [`decoder`]: forward decoding (weighted and classic sum-product BP),
//!   the list-decoding baseline, the brute-force ML oracle.
//! - [`learn`]: loss, exact reverse-mode gradients, the training loop and
//!   weight-file persistence.
//! - [`channel`]: BPSK/AWGN channel model and the Monte-Carlo BER/FER
//!   harness with CSV/JSON reports.

pub mod channel;
pub mod code;
pub mod decoder;
pub mod gf2m;
pub mod learn;
pub mod tanner;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unsupported field degree m={0}; supported range is 2..=16")]
    UnsupportedDegree(usize),

    #[error("division by the zero polynomial")]
    ZeroDivisor,

    #[error("degenerate code: {0}")]
    DegenerateCode(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("graph construction mismatch: {0}")]
    ConstructionMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("training diverged at step {step}: loss = {loss}")]
    Diverged { step: usize, loss: f64 },

    #[error("weight file metadata mismatch: {0}")]
    MetadataMismatch(String),

    #[error("malformed file: {0}")]
    Malformed(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
