//! Seeded synthetic attributed graphs with injected anomalies.
//!
//! The base graph is a sparse planted-partition graph whose node features
//! are noisy copies of per-community centroids. Two kinds of anomaly are
//! injected on disjoint node sets:
//!
//! - structural: groups of `clique_size` nodes are wired into a full clique;
//! - contextual: a node's features are replaced by those of the most distant
//!   of `candidates` randomly sampled nodes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::Dataset;
use crate::error::{Error, Result};
use crate::graph::{FeatureMatrix, SparseGraph};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticParams {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    /// Number of injected cliques.
    pub n_struct: usize,
    /// Number of contextual anomalies.
    pub n_ctx: usize,
    pub clique_size: usize,
    pub communities: usize,
    /// Expected mean degree of the base graph.
    pub avg_degree: f64,
    /// Probability that a base edge stays inside its community.
    pub intra_prob: f64,
    /// Standard deviation of per-node feature noise around the centroid.
    pub noise: f64,
    /// Candidate pool size for contextual feature swaps.
    pub candidates: usize,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        Self {
            n: 1000,
            m: 16,
            seed: 0,
            n_struct: 3,
            n_ctx: 15,
            clique_size: 5,
            communities: 10,
            avg_degree: 10.0,
            intra_prob: 0.9,
            noise: 0.3,
            candidates: 50,
        }
    }
}

impl SyntheticParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.n == 0 || self.m == 0 {
            return bad(format!("n and m must be positive, got n={} m={}", self.n, self.m));
        }
        let injected = self.n_struct * self.clique_size + self.n_ctx;
        if 4 * injected > self.n {
            return bad(format!(
                "{injected} injected anomalies exceed a quarter of n={}",
                self.n
            ));
        }
        if self.n_struct > 0 && self.clique_size < 2 {
            return bad("clique_size must be at least 2".into());
        }
        if self.n_ctx > 0 && self.candidates == 0 {
            return bad("candidates must be positive".into());
        }
        if self.communities == 0 || self.communities > self.n {
            return bad(format!("communities must lie in [1, n], got {}", self.communities));
        }
        if !(self.avg_degree >= 0.0 && self.avg_degree.is_finite()) {
            return bad(format!("avg_degree must be non-negative, got {}", self.avg_degree));
        }
        if !(0.0..=1.0).contains(&self.intra_prob) {
            return bad(format!("intra_prob must lie in [0, 1], got {}", self.intra_prob));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return bad(format!("noise must be non-negative, got {}", self.noise));
        }
        Ok(())
    }
}

/// Default generator settings with the given sizes.
pub fn generate_synthetic(
    n: usize,
    m: usize,
    seed: u64,
    n_struct: usize,
    n_ctx: usize,
    clique_size: usize,
) -> Result<Dataset> {
    generate(&SyntheticParams {
        n,
        m,
        seed,
        n_struct,
        n_ctx,
        clique_size,
        ..Default::default()
    })
}

pub fn generate(p: &SyntheticParams) -> Result<Dataset> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let n = p.n;

    let community: Vec<usize> = (0..n).map(|_| rng.random_range(0..p.communities)).collect();
    let mut members = vec![Vec::new(); p.communities];
    for (i, &c) in community.iter().enumerate() {
        members[c].push(i);
    }

    let target_edges = (n as f64 * p.avg_degree / 2.0).round() as usize;
    let mut edges = Vec::with_capacity(target_edges + p.n_struct * p.clique_size * p.clique_size / 2);
    if n > 1 {
        while edges.len() < target_edges {
            let u = rng.random_range(0..n);
            let v = if rng.random_bool(p.intra_prob) {
                let pool = &members[community[u]];
                pool[rng.random_range(0..pool.len())]
            } else {
                rng.random_range(0..n)
            };
            if u != v {
                edges.push((u, v));
            }
        }
    }

    // unit-norm centroids; per-node noise has expected norm `p.noise`
    let scale = 1.0 / (p.m as f64).sqrt();
    let centroids: Vec<Vec<f64>> = (0..p.communities)
        .map(|_| {
            let mut c: Vec<f64> = (0..p.m).map(|_| rng.sample(StandardNormal)).collect();
            let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                c.iter_mut().for_each(|v| *v /= norm);
            }
            c
        })
        .collect();
    let mut features = Vec::with_capacity(n * p.m);
    for &c in &community {
        for &cj in &centroids[c] {
            let noise: f64 = rng.sample(StandardNormal);
            features.push(cj + p.noise * scale * noise);
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let n_struct_nodes = p.n_struct * p.clique_size;
    let mut labels = vec![0u8; n];

    for clique in order[..n_struct_nodes].chunks(p.clique_size) {
        for (a, &u) in clique.iter().enumerate() {
            labels[u] = 1;
            for &v in &clique[a + 1..] {
                edges.push((u, v));
            }
        }
    }

    let original = features.clone();
    let row = |x: &[f64], i: usize| x[i * p.m..(i + 1) * p.m].to_vec();
    for &target in &order[n_struct_nodes..n_struct_nodes + p.n_ctx] {
        labels[target] = 1;
        let xt = row(&original, target);
        let mut best = (f64::NEG_INFINITY, target);
        for _ in 0..p.candidates {
            let c = rng.random_range(0..n);
            let d: f64 = xt
                .iter()
                .zip(&original[c * p.m..(c + 1) * p.m])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if d > best.0 {
                best = (d, c);
            }
        }
        let src = row(&original, best.1);
        features[target * p.m..(target + 1) * p.m].copy_from_slice(&src);
    }

    let graph = SparseGraph::build_normalized(&edges, n)?;
    let features = FeatureMatrix::new(n, p.m, features)?;
    Dataset::new(format!("synthetic-n{}-s{}", n, p.seed), graph, features, Some(labels))
}
