//! Anchor-guided anomaly scoring.
//!
//! Each node is scored by summary statistics of its Euclidean distances to
//! the positive and to the negative anchors. Higher scores are more anomalous.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::anchors::AnchorSet;
use crate::error::{Error, Result};
use crate::graph::FeatureMatrix;

/// Statistic applied to a node's set of anchor distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum StatMode {
    /// min + max + mean
    #[default]
    Sum,
    Min,
    Max,
    Avg,
}

impl StatMode {
    pub fn apply(self, distances: &[f64]) -> Result<f64> {
        if distances.is_empty() {
            return Err(Error::EmptyDistanceSet);
        }
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for &d in distances {
            min = min.min(d);
            max = max.max(d);
            sum += d;
        }
        let avg = sum / distances.len() as f64;
        Ok(match self {
            StatMode::Sum => min + max + avg,
            StatMode::Min => min,
            StatMode::Max => max,
            StatMode::Avg => avg,
        })
    }
}

impl fmt::Display for StatMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StatMode::Sum => "sum",
            StatMode::Min => "min",
            StatMode::Max => "max",
            StatMode::Avg => "avg",
        })
    }
}

impl FromStr for StatMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(StatMode::Sum),
            "min" => Ok(StatMode::Min),
            "max" => Ok(StatMode::Max),
            "avg" => Ok(StatMode::Avg),
            other => Err(Error::InvalidConfig(format!("unknown statistic mode {other:?}"))),
        }
    }
}

/// `min + max + avg` of a distance set.
pub fn stat_score(distances: &[f64]) -> Result<f64> {
    StatMode::Sum.apply(distances)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoringConfig {
    /// Weight of the positive-anchor statistic, in `[0, 1]`.
    pub alpha: f64,
    /// Weight of the negative-anchor statistic, in `[0, 1]`.
    pub beta: f64,
    pub stat: StatMode,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            stat: StatMode::Sum,
        }
    }
}

impl ScoringConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    pub scores: Vec<f64>,
    pub positive_part: Vec<f64>,
    pub negative_part: Vec<f64>,
}

impl ScoreVector {
    /// Combines per-node anchor statistics as `alpha * s+ - beta * s-`.
    pub fn combine(positive_part: Vec<f64>, negative_part: Vec<f64>, alpha: f64, beta: f64) -> Result<Self> {
        if positive_part.len() != negative_part.len() {
            return Err(Error::shape("score parts", positive_part.len(), negative_part.len()));
        }
        let scores = positive_part
            .iter()
            .zip(&negative_part)
            .map(|(&p, &q)| alpha * p - beta * q)
            .collect();
        let sv = Self {
            scores,
            positive_part,
            negative_part,
        };
        sv.check_finite()?;
        Ok(sv)
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        for (what, v) in [
            ("score", &self.scores),
            ("positive score", &self.positive_part),
            ("negative score", &self.negative_part),
        ] {
            if let Some(index) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite {
                    what: what.into(),
                    index,
                });
            }
        }
        Ok(())
    }
}

/// `n x K` matrix of Euclidean distances from every node to each anchor.
pub fn anchor_distances(h: &FeatureMatrix, anchors: &[usize]) -> Result<FeatureMatrix> {
    check_anchor_indices(h.n(), anchors)?;
    let k = anchors.len();
    let mut out = vec![0.0; h.n() * k];
    if k > 0 {
        out.par_chunks_mut(k).enumerate().for_each(|(i, row)| {
            for (d, &a) in row.iter_mut().zip(anchors) {
                *d = euclidean(h.row(i), h.row(a));
            }
        });
    }
    FeatureMatrix::new(h.n(), k, out)
}

fn check_anchor_indices(n: usize, anchors: &[usize]) -> Result<()> {
    match anchors.iter().find(|&&a| a >= n) {
        Some(&index) => Err(Error::IndexOutOfRange { index, n }),
        None => Ok(()),
    }
}

#[inline]
fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Per-node `(s+, s-)` statistics against both anchor sets.
pub fn anchor_statistics(h: &FeatureMatrix, anchors: &AnchorSet, stat: StatMode) -> Result<(Vec<f64>, Vec<f64>)> {
    if anchors.positive.is_empty() || anchors.negative.is_empty() {
        return Err(Error::EmptyDistanceSet);
    }
    check_anchor_indices(h.n(), &anchors.positive)?;
    check_anchor_indices(h.n(), &anchors.negative)?;
    let pairs: Vec<(f64, f64)> = (0..h.n())
        .into_par_iter()
        .map_init(
            || (Vec::with_capacity(anchors.positive.len()), Vec::with_capacity(anchors.negative.len())),
            |(dp, dn), i| {
                let hi = h.row(i);
                dp.clear();
                dn.clear();
                dp.extend(anchors.positive.iter().map(|&a| euclidean(hi, h.row(a))));
                dn.extend(anchors.negative.iter().map(|&a| euclidean(hi, h.row(a))));
                // both sets were checked non-empty above
                (stat.apply(dp).unwrap(), stat.apply(dn).unwrap())
            },
        )
        .collect();
    Ok(pairs.into_iter().unzip())
}

/// Final anomaly scores `alpha * s+ - beta * s-`.
pub fn final_scores(h: &FeatureMatrix, anchors: &AnchorSet, cfg: &ScoringConfig) -> Result<ScoreVector> {
    cfg.validate()?;
    let (pos, neg) = anchor_statistics(h, anchors, cfg.stat)?;
    ScoreVector::combine(pos, neg, cfg.alpha, cfg.beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> (FeatureMatrix, AnchorSet) {
        let h = FeatureMatrix::from_rows(&[[0.0], [1.0], [10.0]]).unwrap();
        let anchors = AnchorSet {
            positive: vec![0],
            negative: vec![2],
            affinity: vec![1.0, 0.5, 0.0],
        };
        (h, anchors)
    }

    #[test]
    fn distance_examples() {
        let h = FeatureMatrix::from_rows(&[[0.0, 0.0], [3.0, 4.0]]).unwrap();
        let d = anchor_distances(&h, &[1, 0]).unwrap();
        assert_eq!(d.row(0), &[5.0, 0.0]);
        assert_eq!(d.row(1), &[0.0, 5.0]);
        assert!(matches!(
            anchor_distances(&h, &[2]),
            Err(Error::IndexOutOfRange { index: 2, n: 2 })
        ));
    }

    #[test]
    fn stat_examples() {
        assert_eq!(stat_score(&[1.5]).unwrap(), 4.5);
        assert_eq!(stat_score(&[1.0, 2.0, 3.0]).unwrap(), 6.0);
        assert_eq!(stat_score(&[0.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(stat_score(&[]), Err(Error::EmptyDistanceSet)));
        assert_eq!(StatMode::Min.apply(&[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(StatMode::Max.apply(&[1.0, 2.0, 3.0]).unwrap(), 3.0);
        assert_eq!(StatMode::Avg.apply(&[1.0, 2.0, 3.0]).unwrap(), 2.0);
    }

    #[test]
    fn three_node_toy() {
        let (h, anchors) = toy();
        let s = final_scores(&h, &anchors, &ScoringConfig::default()).unwrap();
        assert_eq!(s.scores, vec![-30.0, -24.0, 30.0]);
        assert_eq!(s.positive_part, vec![0.0, 3.0, 30.0]);
        assert_eq!(s.negative_part, vec![30.0, 27.0, 0.0]);
    }

    #[test]
    fn degenerate_weightings() {
        let (h, anchors) = toy();
        let only_pos = ScoringConfig {
            alpha: 1.0,
            beta: 0.0,
            ..Default::default()
        };
        let s = final_scores(&h, &anchors, &only_pos).unwrap();
        assert_eq!(s.scores, s.positive_part);
        let only_neg = ScoringConfig {
            alpha: 0.0,
            beta: 1.0,
            ..Default::default()
        };
        let s = final_scores(&h, &anchors, &only_neg).unwrap();
        let negated: Vec<f64> = s.negative_part.iter().map(|v| -v).collect();
        assert_eq!(s.scores, negated);
    }

    #[test]
    fn weights_out_of_range() {
        let (h, anchors) = toy();
        let cfg = ScoringConfig {
            alpha: 1.5,
            ..Default::default()
        };
        assert!(matches!(final_scores(&h, &anchors, &cfg), Err(Error::InvalidConfig(_))));
    }
}
