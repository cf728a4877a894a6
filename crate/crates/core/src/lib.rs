//! Training-free graph anomaly detection.
//!
//! Node features are propagated over the normalized adjacency without any
//! learned transform. Per-layer affinity between each node's raw and
//! propagated features gates a residual back to the raw features, and the
//! gated layers are averaged into the final representation. The nodes whose
//! representation agrees most (least) with their raw features become
//! positive (negative) anchors, and every node is scored by distance
//! statistics to both anchor sets.
//!
//! ```
//! use freegad::{pipeline, FeatureMatrix, PipelineConfig, SparseGraph};
//!
//! let graph = SparseGraph::build_normalized(&[(0, 1), (1, 2), (2, 3), (3, 0)], 4).unwrap();
//! let x = FeatureMatrix::from_rows(&[[1.0, 0.0], [0.9, 0.1], [1.0, 0.1], [0.0, 1.0]]).unwrap();
//! let cfg = PipelineConfig { k: 1, ..Default::default() };
//! let out = pipeline::run(&graph, &x, &cfg).unwrap();
//! assert_eq!(out.scores.len(), 4);
//! ```

pub mod anchors;
pub mod bench;
pub mod cli;
pub mod encoder;
mod error;
pub mod graph;
pub mod grid;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod scoring;

pub use anchors::{node_affinity, select_anchors, AnchorSet};
pub use encoder::{encode, EncoderConfig, GateWeights, Representations, SimilarityMode};
pub use error::{Error, Result};
pub use graph::{FeatureMatrix, SparseGraph};
pub use io::Dataset;
pub use metrics::{auprc, auroc, LabeledScores};
pub use pipeline::{PipelineConfig, PipelineOutput, Stage, StageError};
pub use scoring::{final_scores, ScoreVector, ScoringConfig, StatMode};
