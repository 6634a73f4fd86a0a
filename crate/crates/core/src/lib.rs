//! Computational core of a thermogram lesion-classification pipeline.
//!
//! The crate is organised along the pipeline:
//!
//! * [`imaging`]: image ingestion, min-max normalisation, bilinear resizing,
//!   Moore-neighbour contour tracing and radial-signal construction.
//! * [`nonlinear`]: delay embedding, Rosenstein Lyapunov estimates,
//!   approximate entropy and box-counting dimension.
//! * [`diffusion`]: DDPM noise schedules, forward corruption, reverse steps,
//!   ancestral sampling and the simple noise-prediction loss, written against
//!   a pluggable [`diffusion::Denoiser`].
//! * [`genmetrics`]: Fréchet distance and Inception Score over externally
//!   supplied embeddings and class-probability rows.
//! * [`classify`]: feature fusion, second-order gradient-boosted trees with
//!   logistic loss, stratified k-fold evaluation and confusion metrics.
//! * [`synth`]: ground-truth generators (Koch curve, chaotic maps, synthetic
//!   benign/malignant contours) used to validate every estimator.

pub mod classify;
pub mod diffusion;
pub mod error;
pub mod genmetrics;
pub mod imaging;
pub mod io;
pub mod nonlinear;
pub mod synth;

pub use error::{Error, Result};

/// Portable, seedable generator used for every stochastic routine.
pub type SeededRng = rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    SeededRng::seed_from_u64(seed)
}

/// Crate version, embedded into every emitted report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
