//! Hyperparameter search over `(L, K, alpha, beta)` scored by AUROC.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::anchors::{node_affinity, select_anchors};
use crate::encoder::{encode, EncoderConfig, SimilarityMode};
use crate::error::{Error, Result};
use crate::graph::{FeatureMatrix, SparseGraph};
use crate::metrics::{auprc, auroc, LabeledScores};
use crate::pipeline::PipelineConfig;
use crate::scoring::{anchor_statistics, ScoreVector, ScoringConfig, StatMode};

pub const LAYER_RANGE: (usize, usize) = (1, 20);
pub const K_RANGE: (usize, usize) = (10, 100);

/// Settings shared by every trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBase {
    pub sigma: f64,
    pub similarity: SimilarityMode,
    pub stat: StatMode,
    /// Reject values outside the usual search ranges.
    pub strict_ranges: bool,
}

impl Default for SearchBase {
    fn default() -> Self {
        Self {
            sigma: crate::encoder::DEFAULT_SIGMA,
            similarity: SimilarityMode::SquaredNorm,
            stat: StatMode::Sum,
            strict_ranges: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub layers: Vec<usize>,
    pub ks: Vec<usize>,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl GridSpec {
    pub fn len(&self) -> usize {
        self.layers.len() * self.ks.len() * self.alphas.len() * self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn normalized(&self) -> Self {
        fn sorted_usize(v: &[usize]) -> Vec<usize> {
            let mut v = v.to_vec();
            v.sort_unstable();
            v.dedup();
            v
        }
        fn sorted_f64(v: &[f64]) -> Vec<f64> {
            let mut v = v.to_vec();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        }
        Self {
            layers: sorted_usize(&self.layers),
            ks: sorted_usize(&self.ks),
            alphas: sorted_f64(&self.alphas),
            betas: sorted_f64(&self.betas),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trial {
    pub config: PipelineConfig,
    pub auroc: f64,
    pub auprc: f64,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub trials: Vec<Trial>,
    pub best: usize,
}

impl SearchResult {
    pub fn best_trial(&self) -> &Trial {
        &self.trials[self.best]
    }
}

fn check_ranges(base: &SearchBase, layers: usize, k: usize, alpha: f64, beta: f64) -> Result<()> {
    for (name, v) in [("alpha", alpha), ("beta", beta)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidConfig(format!("{name}={v} outside [0, 1]")));
        }
    }
    if base.strict_ranges {
        if !(LAYER_RANGE.0..=LAYER_RANGE.1).contains(&layers) {
            return Err(Error::InvalidConfig(format!(
                "L={layers} outside [{}, {}]",
                LAYER_RANGE.0, LAYER_RANGE.1
            )));
        }
        if !(K_RANGE.0..=K_RANGE.1).contains(&k) {
            return Err(Error::InvalidConfig(format!("K={k} outside [{}, {}]", K_RANGE.0, K_RANGE.1)));
        }
    }
    Ok(())
}

fn config(base: &SearchBase, layers: usize, k: usize, alpha: f64, beta: f64) -> PipelineConfig {
    PipelineConfig {
        encoder: EncoderConfig {
            layers,
            sigma: base.sigma,
            similarity: base.similarity,
            retain_layers: false,
        },
        k,
        scoring: ScoringConfig {
            alpha,
            beta,
            stat: base.stat,
        },
    }
}

/// Order used to break AUROC ties: smaller L, then smaller K, then (alpha, beta).
fn tie_order(a: &PipelineConfig, b: &PipelineConfig) -> Ordering {
    a.encoder
        .layers
        .cmp(&b.encoder.layers)
        .then(a.k.cmp(&b.k))
        .then(a.scoring.alpha.total_cmp(&b.scoring.alpha))
        .then(a.scoring.beta.total_cmp(&b.scoring.beta))
}

fn pick_best(trials: &[Trial]) -> usize {
    let mut best = 0;
    for (i, t) in trials.iter().enumerate().skip(1) {
        let b = &trials[best];
        let better = match t.auroc.total_cmp(&b.auroc) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => tie_order(&t.config, &b.config) == Ordering::Less,
        };
        if better {
            best = i;
        }
    }
    best
}

/// Caches the encoder output per layer count and anchor statistics per K.
struct Evaluator<'a> {
    graph: &'a SparseGraph,
    x: &'a FeatureMatrix,
    labels: &'a [u8],
    base: SearchBase,
    encoded: BTreeMap<usize, FeatureMatrix>,
    stats: BTreeMap<(usize, usize), (Vec<f64>, Vec<f64>)>,
}

impl<'a> Evaluator<'a> {
    fn new(graph: &'a SparseGraph, x: &'a FeatureMatrix, labels: &'a [u8], base: SearchBase) -> Result<Self> {
        if labels.len() != x.n() {
            return Err(Error::shape("label rows", x.n(), labels.len()));
        }
        Ok(Self {
            graph,
            x,
            labels,
            base,
            encoded: BTreeMap::new(),
            stats: BTreeMap::new(),
        })
    }

    fn statistics(&mut self, layers: usize, k: usize) -> Result<&(Vec<f64>, Vec<f64>)> {
        if !self.stats.contains_key(&(layers, k)) {
            if !self.encoded.contains_key(&layers) {
                let cfg = config(&self.base, layers, k, 0.0, 0.0).encoder;
                let reps = encode(self.graph, self.x, &cfg)?;
                self.encoded.insert(layers, reps.mixed);
            }
            let h = &self.encoded[&layers];
            let affinity = node_affinity(self.x, h, self.base.sigma, self.base.similarity)?;
            let anchors = select_anchors(&affinity, k)?;
            let parts = anchor_statistics(h, &anchors, self.base.stat)?;
            self.stats.insert((layers, k), parts);
        }
        Ok(&self.stats[&(layers, k)])
    }

    fn evaluate(&mut self, layers: usize, k: usize, alpha: f64, beta: f64) -> Result<Trial> {
        check_ranges(&self.base, layers, k, alpha, beta)?;
        let labels = self.labels.to_vec();
        let (pos, neg) = self.statistics(layers, k)?.clone();
        let scores = ScoreVector::combine(pos, neg, alpha, beta)?;
        let ls = LabeledScores::new(scores.scores, labels)?;
        Ok(Trial {
            config: config(&self.base, layers, k, alpha, beta),
            auroc: auroc(&ls)?,
            auprc: auprc(&ls)?,
        })
    }

    fn drop_layer(&mut self, layers: usize) {
        self.encoded.remove(&layers);
        self.stats.retain(|&(l, _), _| l != layers);
    }
}

/// Evaluates every combination of the grid, in ascending (L, K, alpha, beta) order.
pub fn grid_search(
    graph: &SparseGraph,
    x: &FeatureMatrix,
    labels: &[u8],
    spec: &GridSpec,
    base: &SearchBase,
) -> Result<SearchResult> {
    if spec.is_empty() {
        return Err(Error::InvalidConfig("grid has no points".into()));
    }
    let spec = spec.normalized();
    let mut eval = Evaluator::new(graph, x, labels, *base)?;
    let mut trials = Vec::with_capacity(spec.len());
    for &layers in &spec.layers {
        for &k in &spec.ks {
            for &alpha in &spec.alphas {
                for &beta in &spec.betas {
                    trials.push(eval.evaluate(layers, k, alpha, beta)?);
                }
            }
        }
        eval.drop_layer(layers);
    }
    let best = pick_best(&trials);
    Ok(SearchResult { trials, best })
}

/// Draws `(L, K, alpha, beta)` uniformly from the search ranges, capping K at `n / 2`.
pub fn random_configs(n: usize, trials: usize, seed: u64) -> Result<Vec<(usize, usize, f64, f64)>> {
    let k_max = K_RANGE.1.min(n / 2);
    if k_max < K_RANGE.0 {
        return Err(Error::KTooLarge { k: K_RANGE.0, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..trials)
        .map(|_| {
            (
                rng.random_range(LAYER_RANGE.0..=LAYER_RANGE.1),
                rng.random_range(K_RANGE.0..=k_max),
                rng.random_range(0.0..=1.0),
                rng.random_range(0.0..=1.0),
            )
        })
        .collect())
}

/// Seeded random search; trials are reported in draw order.
pub fn random_search(
    graph: &SparseGraph,
    x: &FeatureMatrix,
    labels: &[u8],
    trials: usize,
    seed: u64,
    base: &SearchBase,
) -> Result<SearchResult> {
    if trials == 0 {
        return Err(Error::InvalidConfig("random search needs at least one trial".into()));
    }
    let mut eval = Evaluator::new(graph, x, labels, *base)?;
    let mut out = Vec::with_capacity(trials);
    for (layers, k, alpha, beta) in random_configs(x.n(), trials, seed)? {
        out.push(eval.evaluate(layers, k, alpha, beta)?);
    }
    let best = pick_best(&out);
    Ok(SearchResult { trials: out, best })
}
