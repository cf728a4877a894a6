//! Pseudo-normal and pseudo-anomalous anchor selection by affinity ranking.

use rayon::prelude::*;

use crate::encoder::{affinity, SimilarityMode};
use crate::error::{Error, Result};
use crate::graph::FeatureMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct AnchorSet {
    /// K highest-affinity nodes, ascending index order.
    pub positive: Vec<usize>,
    /// K lowest-affinity nodes, ascending index order.
    pub negative: Vec<usize>,
    /// Affinity of every node between its raw feature and its representation.
    pub affinity: Vec<f64>,
}

impl AnchorSet {
    pub fn k(&self) -> usize {
        self.positive.len()
    }
}

/// Affinity of each node's raw feature `x_i` with its representation `h_i`.
pub fn node_affinity(
    x: &FeatureMatrix,
    h: &FeatureMatrix,
    sigma: f64,
    mode: SimilarityMode,
) -> Result<Vec<f64>> {
    x.ensure_same_shape(h, "raw features vs representations")?;
    Ok((0..x.n())
        .into_par_iter()
        .map(|i| affinity(x.row(i), h.row(i), sigma, mode))
        .collect())
}

/// Picks the top-K and bottom-K nodes of a stable descending affinity sort.
///
/// Equal affinities keep ascending node order inside the descending sort,
/// so ties favor low indices for positives and high indices for negatives.
pub fn select_anchors(affinity: &[f64], k: usize) -> Result<AnchorSet> {
    let n = affinity.len();
    if k == 0 {
        return Err(Error::KZero);
    }
    if 2 * k > n {
        return Err(Error::KTooLarge { k, n });
    }
    if let Some(index) = affinity.iter().position(|a| !a.is_finite()) {
        return Err(Error::NonFinite {
            what: "node affinity".into(),
            index,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| affinity[b].total_cmp(&affinity[a]).then(a.cmp(&b)));

    let mut positive = order[..k].to_vec();
    let mut negative = order[n - k..].to_vec();
    positive.sort_unstable();
    negative.sort_unstable();
    Ok(AnchorSet {
        positive,
        negative,
        affinity: affinity.to_vec(),
    })
}
