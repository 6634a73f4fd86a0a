//! Generative-model evaluation metrics over externally computed embeddings.
//!
//! Embedding matrices have one sample per row. The networks that produce the
//! embeddings and class probabilities are not part of this crate.

mod frechet;
mod inception;

pub use frechet::{fit_gaussian, frechet_distance, matrix_from_rows, sliced_fid, GaussianStats};
pub use inception::{inception_score, InceptionScore, ProbMatrix};
