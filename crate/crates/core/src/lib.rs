//! Unsupervised clustering-based core-set selection.
//!
//! The pipeline is: stratified base split over task labels, spherical k-means
//! over the embeddings of the remaining records, per-cluster easy/hard sampling
//! by cosine distance to the centroid, and core-set assembly. SARI and ROUGE-L
//! scoring plus sweep analysis (win percentages, best-overall search) sit
//! alongside for evaluating the models trained on the selected data.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the on-disk
//! embedding formats are `f32`, so most callers use the aliases below.

pub mod analysis;
pub mod cluster;
mod error;
pub mod io;
pub mod matrix;
pub mod metrics;
mod scalar;
pub mod select;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use scalar::Scalar;

/// Row-major `f32` embedding matrix, the type every on-disk format decodes to.
pub type EmbeddingMatrix = Matrix<f32>;
/// Clustering over `f32` embeddings.
pub type EmbeddingClustering = cluster::Clustering<f32>;
/// `f64` matrix, used where extra precision is wanted (oracles, synthetic data).
pub type Matrix64 = Matrix<f64>;
