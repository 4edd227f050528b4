//! Similarity-network analytics for query-by-example collections.
//!
//! Starting from a pairwise dissimilarity matrix (for example one derived
//! from audio similarity scores), this crate builds sparse similarity
//! networks, detects communities with nine interchangeable algorithms,
//! re-ranks retrieval answers with the detected communities, evaluates the
//! improvement, and locates the prototype item of each community through
//! centrality.
//!
//! Modules:
//! - [`matrix`] / [`graph`]: dissimilarity matrices, thresholded networks,
//!   components, spanning trees.
//! - [`metrics`]: network metrics, threshold sweeps, random-graph baselines.
//! - [`clustering`]: k-medoids and agglomerative hierarchical clustering.
//! - [`communities`]: modularity optimization and the triangle-coherence
//!   detectors.
//! - [`eval`]: per-song F-measure, matrix refinement, average precision,
//!   MAP, significance testing.
//! - [`datasets`]: collections, experiment setups, the synthetic generator,
//!   and file I/O.
//! - [`prototype`]: centrality-based prototype detection inside communities.
//! - [`experiment`]: end-to-end pipelines used by the command-line driver.

pub mod clustering;
pub mod communities;
pub mod datasets;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod graph;
pub mod matrix;
pub mod metrics;
pub mod partition;
pub mod prototype;

pub use error::{Error, Result};
pub use graph::{Edge, Network};
pub use matrix::{DissimilarityMatrix, SimilarityInput};
pub use partition::Partition;
