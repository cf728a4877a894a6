//! Shared helpers for the integration tests.
#![allow(dead_code)]

pub mod dense;
pub mod invariants;

use freegad::{FeatureMatrix, PipelineConfig, ScoringConfig, SimilarityMode, SparseGraph, StatMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random pipeline problem small enough for the dense oracle.
#[derive(Debug, Clone)]
pub struct Instance {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub features: Vec<Vec<f64>>,
    pub cfg: PipelineConfig,
}

impl Instance {
    pub fn graph(&self) -> SparseGraph {
        SparseGraph::build_normalized(&self.edges, self.n).unwrap()
    }

    pub fn x(&self) -> FeatureMatrix {
        FeatureMatrix::from_rows(&self.features).unwrap()
    }
}

/// n <= 50, m <= 8, L <= 6, 1 <= K <= n/2, random modes and weights.
pub fn random_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=50);
    let m = rng.random_range(1..=8);
    let density: f64 = rng.random_range(0.0..0.3);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if rng.random_bool(density / 2.0) {
                edges.push((i, j));
            }
        }
    }
    let scale = [0.1, 1.0, 10.0][rng.random_range(0..3)];
    let features = (0..n)
        .map(|_| (0..m).map(|_| scale * rng.random_range(-1.0..1.0)).collect())
        .collect();
    let mut cfg = PipelineConfig::default();
    cfg.encoder.layers = rng.random_range(1..=6);
    cfg.encoder.similarity = if rng.random_bool(0.5) {
        SimilarityMode::SquaredNorm
    } else {
        SimilarityMode::Cosine
    };
    cfg.k = rng.random_range(1..=n / 2);
    cfg.scoring = ScoringConfig {
        alpha: rng.random_range(0.0..=1.0),
        beta: rng.random_range(0.0..=1.0),
        stat: [StatMode::Sum, StatMode::Min, StatMode::Max, StatMode::Avg][rng.random_range(0..4)],
    };
    Instance { n, edges, features, cfg }
}

/// Largest elementwise relative error, with denominators floored at `floor`.
pub fn max_rel_err(a: &[f64], b: &[f64], floor: f64) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / y.abs().max(floor))
        .fold(0.0, f64::max)
}

/// Pairwise AUROC with half credit for ties.
pub fn brute_auroc(scores: &[f64], labels: &[u8]) -> f64 {
    let mut credit = 0.0;
    let mut pairs = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        for (j, &sj) in scores.iter().enumerate() {
            if labels[i] == 1 && labels[j] == 0 {
                pairs += 1.0;
                if si > sj {
                    credit += 1.0;
                } else if si == sj {
                    credit += 0.5;
                }
            }
        }
    }
    credit / pairs
}

/// Average precision from the full PR curve: one threshold per distinct
/// score, recall increments weighted by the precision at that threshold.
pub fn brute_auprc(scores: &[f64], labels: &[u8]) -> f64 {
    let total_pos = labels.iter().filter(|&&l| l == 1).count() as f64;
    let mut thresholds: Vec<f64> = scores.to_vec();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for t in thresholds {
        let selected: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] >= t).collect();
        let tp = selected.iter().filter(|&&i| labels[i] == 1).count() as f64;
        let precision = tp / selected.len() as f64;
        let recall = tp / total_pos;
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    ap
}

/// Runs the library pipeline and the dense oracle on one instance. Returns
/// the largest elementwise relative error of the final scores, or a
/// description of a structural mismatch.
pub fn compare_with_dense(inst: &Instance) -> Result<f64, String> {
    let out = freegad::pipeline::run(&inst.graph(), &inst.x(), &inst.cfg).map_err(|e| e.to_string())?;
    let want = dense::run(inst);
    if out.anchors.positive != want.positive || out.anchors.negative != want.negative {
        return Err(format!(
            "anchor sets differ: {:?}/{:?} vs {:?}/{:?}",
            out.anchors.positive, out.anchors.negative, want.positive, want.negative
        ));
    }
    Ok(max_rel_err(&out.scores.scores, &want.scores, f64::MIN_POSITIVE))
}
