//! Entropy-stream analysis of executable files.
//!
//! `entrospect` turns raw bytes into chunked Shannon entropy streams,
//! decomposes those streams with a Haar wavelet transform into
//! multi-resolution energy spectra, and trains two kinds of malware
//! classifiers on top:
//!
//! - a per-size-group logistic model whose cross-validated predicted
//!   probability is a single "suspiciously structured entropic change"
//!   score per file ([`ssecs`]), and
//! - a large-scale sparse pipeline combining string, summary-entropy, and
//!   wavelet-energy indicator features under an l1-penalized logistic
//!   regression ([`features`], [`lasso`]).
//!
//! A deterministic synthetic corpus generator ([`synth`]) provides labeled
//! files with realistic entropy regimes so the whole pipeline can be
//! exercised and evaluated without any real malware. Evaluation helpers
//! (ROC/AUC, likelihood-ratio tests, the per-size-group "danger map") live
//! in [`eval`].
//!
//! Start with the runnable programs under `examples/` for a tour of each
//! capability; the `entrospect` binary exposes the same pipeline as
//! subcommands.

pub mod binformat;
pub mod cli;
pub mod corpus;
pub mod entropy;
pub mod error;
pub mod eval;
pub mod features;
pub mod lasso;
pub mod rng;
pub mod ssecs;
pub mod stats;
pub mod synth;
pub mod wavelet;

pub use entropy::{chunk_entropy, entropy_stream, EntropyStream, DEFAULT_CHUNK_SIZE};
pub use error::{Error, Result};
pub use wavelet::{dwt_haar, energy_spectrum, mra_approximation, EnergySpectrum, WaveletDecomposition};
