//! End-to-end scoring: encode, select anchors, score.

use std::time::{Duration, Instant};

use crate::anchors::{node_affinity, select_anchors, AnchorSet};
use crate::encoder::{encode, EncoderConfig};
use crate::error::Result;
use crate::graph::{FeatureMatrix, SparseGraph};
use crate::scoring::{final_scores, ScoreVector, ScoringConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub encoder: EncoderConfig,
    /// Anchors per side.
    pub k: usize,
    pub scoring: ScoringConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            encoder: EncoderConfig::default(),
            k: 10,
            scoring: ScoringConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.encoder.validate()?;
        self.scoring.validate()
    }
}

/// Which part of the pipeline a failure or a timing belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Load,
    Encode,
    Anchors,
    Score,
    Write,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Load => "load",
            Stage::Encode => "encode",
            Stage::Anchors => "anchors",
            Stage::Score => "score",
            Stage::Write => "write",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub encode: Duration,
    pub anchors: Duration,
    pub score: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.encode + self.anchors + self.score
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub representations: FeatureMatrix,
    pub anchors: AnchorSet,
    pub scores: ScoreVector,
    pub timings: StageTimings,
}

/// Pipeline failure tagged with the stage it came from.
#[derive(Debug)]
pub struct StageError {
    pub stage: Stage,
    pub error: crate::Error,
}

impl std::fmt::Display for StageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}] {}", self.stage.name(), self.error)
    }
}

impl std::error::Error for StageError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

pub(crate) trait AtStage<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageError>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageError> {
        self.map_err(|error| StageError { stage, error })
    }
}

/// Scores every node of `graph` in a single pass.
pub fn run(graph: &SparseGraph, x: &FeatureMatrix, cfg: &PipelineConfig) -> std::result::Result<PipelineOutput, StageError> {
    cfg.encoder.validate().at(Stage::Encode)?;
    cfg.scoring.validate().at(Stage::Score)?;

    let t = Instant::now();
    let reps = encode(graph, x, &cfg.encoder).at(Stage::Encode)?;
    let encode_time = t.elapsed();

    let t = Instant::now();
    let affinity = node_affinity(x, &reps.mixed, cfg.encoder.sigma, cfg.encoder.similarity).at(Stage::Anchors)?;
    let anchors = select_anchors(&affinity, cfg.k).at(Stage::Anchors)?;
    let anchors_time = t.elapsed();

    let t = Instant::now();
    let scores = final_scores(&reps.mixed, &anchors, &cfg.scoring).at(Stage::Score)?;
    let score_time = t.elapsed();

    Ok(PipelineOutput {
        representations: reps.mixed,
        anchors,
        scores,
        timings: StageTimings {
            encode: encode_time,
            anchors: anchors_time,
            score: score_time,
        },
    })
}
