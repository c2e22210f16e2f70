//! Kernelized locality-sensitive hashcodes for classifying discrete structures.
//!
//! The pipeline: load a corpus of labeled paths or trees, compute
//! convolution-kernel similarities against a small reference set, hash the
//! kernel vectors into long binary codes, and train a random-subspace forest
//! on the codes. The hashing model itself (kernel parameters, per-edge-label
//! nonstationarity gates, the reference set) is optimized by maximizing an
//! approximation of the mutual information between codes and class labels.
//!
//! Modules:
//! - [`structures`]: paths, trees, labeled corpora, embeddings, file ingestion
//! - [`kernels`]: token / tuple / subsequence / tree kernels with edge gates
//! - [`klsh`]: hash families over a reference set and the bit encoder
//! - [`infotheory`]: entropies, total-correlation explanation, the MI objective
//! - [`optimize`]: greedy reference selection, MCMC over gates, grid search
//! - [`forest`]: random-subspace / bagging forest plus a Hamming-kNN baseline
//! - [`synth`]: planted-motif synthetic corpora for desk-scale evaluation
//! - [`model`]: versioned artifact files (trained model, flags, reference sets)

pub mod error;
pub mod forest;
pub mod infotheory;
pub mod kernels;
pub mod klsh;
pub mod model;
pub mod optimize;
pub mod seeding;
pub mod structures;
pub mod synth;

pub use error::{Error, Result};
