//! Parameter-free encoder: multi-hop propagation, per-layer affinity gates
//! and a gated residual back to the raw features, averaged over layers.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{FeatureMatrix, SparseGraph};

pub const DEFAULT_SIGMA: f64 = 1e-8;

/// How the affinity between a raw and a propagated feature vector is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum SimilarityMode {
    /// `<x0, xl> / (|x0|^2 |xl|^2 + sigma)`
    #[default]
    #[value(name = "paper", alias = "squared-norm")]
    SquaredNorm,
    /// `<x0, xl> / (|x0| |xl| + sigma)`
    Cosine,
}

impl fmt::Display for SimilarityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimilarityMode::SquaredNorm => "paper",
            SimilarityMode::Cosine => "cosine",
        })
    }
}

impl FromStr for SimilarityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" | "squared-norm" => Ok(SimilarityMode::SquaredNorm),
            "cosine" => Ok(SimilarityMode::Cosine),
            other => Err(Error::InvalidConfig(format!(
                "unknown similarity mode {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncoderConfig {
    /// Number of propagation layers, at least 1.
    pub layers: usize,
    pub sigma: f64,
    pub similarity: SimilarityMode,
    /// Keep every gated layer `h^(l)` in the output.
    pub retain_layers: bool,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self {
            layers: 2,
            sigma: DEFAULT_SIGMA,
            similarity: SimilarityMode::SquaredNorm,
            retain_layers: false,
        }
    }
}

impl EncoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.layers == 0 {
            return Err(Error::InvalidConfig("layer count L must be >= 1".into()));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "sigma must be a positive finite number, got {}",
                self.sigma
            )));
        }
        Ok(())
    }
}

/// Per-node, per-layer affinities and their softmax-normalized gates,
/// both stored row-major as `n x layers`.
#[derive(Debug, Clone, PartialEq)]
pub struct GateWeights {
    n: usize,
    layers: usize,
    raw_affinity: Vec<f64>,
    weights: Vec<f64>,
}

impl GateWeights {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn raw_affinity(&self, i: usize) -> &[f64] {
        &self.raw_affinity[i * self.layers..(i + 1) * self.layers]
    }

    pub fn weights(&self, i: usize) -> &[f64] {
        &self.weights[i * self.layers..(i + 1) * self.layers]
    }

    /// Gate of every node for layer `l` (zero-based over layers `1..=L`).
    pub fn layer_column(&self, l: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.weights[i * self.layers + l]).collect()
    }
}

#[derive(Debug, Clone)]
pub struct Representations {
    /// Gated representations `h^(1) .. h^(L)`, present when requested.
    pub per_layer: Option<Vec<FeatureMatrix>>,
    pub mixed: FeatureMatrix,
    pub gates: GateWeights,
}

/// Returns `[X, ÂX, Â²X, ..., Â^L X]`.
pub fn propagate(graph: &SparseGraph, x: &FeatureMatrix, layers: usize) -> Result<Vec<FeatureMatrix>> {
    if x.n() != graph.n() {
        return Err(Error::shape("feature rows vs graph nodes", graph.n(), x.n()));
    }
    let mut out = Vec::with_capacity(layers + 1);
    out.push(x.clone());
    for l in 0..layers {
        let next = graph.spmv(&out[l])?;
        out.push(next);
    }
    Ok(out)
}

/// Similarity between a raw feature vector and a propagated one.
///
/// Always finite for `sigma > 0`, including zero vectors.
pub fn affinity(x0: &[f64], xl: &[f64], sigma: f64, mode: SimilarityMode) -> f64 {
    debug_assert_eq!(x0.len(), xl.len());
    let mut dot = 0.0;
    let mut n0 = 0.0;
    let mut nl = 0.0;
    for (&a, &b) in x0.iter().zip(xl) {
        dot += a * b;
        n0 += a * a;
        nl += b * b;
    }
    let denom = match mode {
        SimilarityMode::SquaredNorm => n0 * nl + sigma,
        SimilarityMode::Cosine => n0.sqrt() * nl.sqrt() + sigma,
    };
    dot / denom
}

/// Row-wise softmax over the layer axis of an `n x layers` affinity matrix.
pub fn gate_weights(affinities: &[f64], n: usize, layers: usize) -> Result<GateWeights> {
    if layers == 0 {
        return Err(Error::InvalidConfig("layer count L must be >= 1".into()));
    }
    if affinities.len() != n * layers {
        return Err(Error::shape("affinity matrix entries", n * layers, affinities.len()));
    }
    let mut weights = vec![0.0; n * layers];
    weights
        .par_chunks_mut(layers)
        .zip(affinities.par_chunks(layers))
        .for_each(|(w, a)| softmax_into(a, w));
    Ok(GateWeights {
        n,
        layers,
        raw_affinity: affinities.to_vec(),
        weights,
    })
}

fn softmax_into(a: &[f64], out: &mut [f64]) {
    let max = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for (o, &v) in out.iter_mut().zip(a) {
        *o = (v - max).exp();
        total += *o;
    }
    for o in out.iter_mut() {
        *o /= total;
    }
}

/// `h_i = (1 - w_i) x_i^(l) + w_i x_i^(0)` for every node.
pub fn gated_residual(x0: &FeatureMatrix, xl: &FeatureMatrix, w: &[f64]) -> Result<FeatureMatrix> {
    x0.ensure_same_shape(xl, "gated residual operands")?;
    if w.len() != x0.n() {
        return Err(Error::shape("gate weight column", x0.n(), w.len()));
    }
    let m = x0.m();
    let mut out = vec![0.0; x0.n() * m];
    if m > 0 {
        out.par_chunks_mut(m).enumerate().for_each(|(i, h)| {
            for ((hj, &a), &b) in h.iter_mut().zip(x0.row(i)).zip(xl.row(i)) {
                *hj = gate(w[i], a, b);
            }
        });
    }
    Ok(FeatureMatrix::from_raw(x0.n(), m, out))
}

#[inline]
fn gate(w: f64, raw: f64, propagated: f64) -> f64 {
    if raw == propagated {
        return raw;
    }
    // rounding must not leave the segment between the two operands
    ((1.0 - w) * propagated + w * raw).clamp(raw.min(propagated), raw.max(propagated))
}

/// Mean of the per-layer representations.
///
/// Computed as the first layer plus the mean deviation from it, so a stack of
/// identical layers mixes back to that layer exactly.
pub fn mix(per_layer: &[FeatureMatrix]) -> Result<FeatureMatrix> {
    let first = per_layer
        .first()
        .ok_or_else(|| Error::InvalidConfig("cannot mix an empty layer stack".into()))?;
    for layer in &per_layer[1..] {
        first.ensure_same_shape(layer, "mixed layers")?;
    }
    let mut dev = vec![0.0; first.n() * first.m()];
    for layer in &per_layer[1..] {
        for ((d, &v), &b) in dev.iter_mut().zip(layer.as_slice()).zip(first.as_slice()) {
            *d += v - b;
        }
    }
    let count = per_layer.len() as f64;
    let out = dev.iter().zip(first.as_slice()).map(|(&d, &b)| b + d / count).collect();
    Ok(FeatureMatrix::from_raw(first.n(), first.m(), out))
}

/// Runs the full encoder on a graph and its raw features.
pub fn encode(graph: &SparseGraph, x: &FeatureMatrix, cfg: &EncoderConfig) -> Result<Representations> {
    cfg.validate()?;
    let stack = propagate(graph, x, cfg.layers)?;
    let n = x.n();
    let layers = cfg.layers;

    let mut affinities = vec![0.0; n * layers];
    affinities
        .par_chunks_mut(layers)
        .enumerate()
        .for_each(|(i, row)| {
            for (l, a) in row.iter_mut().enumerate() {
                *a = affinity(stack[0].row(i), stack[l + 1].row(i), cfg.sigma, cfg.similarity);
            }
        });
    let gates = gate_weights(&affinities, n, layers)?;

    let per_layer = if cfg.retain_layers {
        let mut out = Vec::with_capacity(layers);
        for l in 0..layers {
            out.push(gated_residual(&stack[0], &stack[l + 1], &gates.layer_column(l))?);
        }
        Some(out)
    } else {
        None
    };

    // Same per-element operation order as gated_residual followed by mix.
    let m = x.m();
    let mut mixed = vec![0.0; n * m];
    if m > 0 {
        mixed.par_chunks_mut(m).enumerate().for_each_init(
            || vec![0.0; m],
            |dev, (i, h)| {
                let w = gates.weights(i);
                let raw = stack[0].row(i);
                for ((hj, &a), &b) in h.iter_mut().zip(raw).zip(stack[1].row(i)) {
                    *hj = gate(w[0], a, b);
                }
                dev.fill(0.0);
                for l in 1..layers {
                    for (((d, &base), &a), &b) in dev.iter_mut().zip(h.iter()).zip(raw).zip(stack[l + 1].row(i)) {
                        *d += gate(w[l], a, b) - base;
                    }
                }
                for (hj, &d) in h.iter_mut().zip(dev.iter()) {
                    *hj += d / layers as f64;
                }
            },
        );
    }

    Ok(Representations {
        per_layer,
        mixed: FeatureMatrix::from_raw(n, m, mixed),
        gates,
    })
}
