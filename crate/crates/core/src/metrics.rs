//! Ranking metrics for anomaly scores against binary ground truth.

use crate::error::{Error, Result};

/// Scores paired with 0/1 labels (1 = anomaly).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledScores {
    scores: Vec<f64>,
    labels: Vec<u8>,
}

impl LabeledScores {
    pub fn new(scores: Vec<f64>, labels: Vec<u8>) -> Result<Self> {
        if scores.len() != labels.len() {
            return Err(Error::shape("labels", scores.len(), labels.len()));
        }
        if let Some(index) = scores.iter().position(|s| !s.is_finite()) {
            return Err(Error::NonFinite {
                what: "score".into(),
                index,
            });
        }
        if let Some(i) = labels.iter().position(|&l| l > 1) {
            return Err(Error::DegenerateLabels(format!(
                "label {} at position {i} is not 0 or 1",
                labels[i]
            )));
        }
        Ok(Self { scores, labels })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 1).count()
    }

    pub fn negatives(&self) -> usize {
        self.labels.len() - self.positives()
    }

    /// Groups of equal scores, highest score first.
    fn descending_groups(&self) -> Vec<(usize, usize)> {
        let mut order: Vec<usize> = (0..self.scores.len()).collect();
        order.sort_by(|&a, &b| self.scores[b].total_cmp(&self.scores[a]));
        let mut groups = Vec::new();
        let mut k = 0;
        while k < order.len() {
            let s = self.scores[order[k]];
            let (mut pos, mut neg) = (0, 0);
            while k < order.len() && self.scores[order[k]] == s {
                if self.labels[order[k]] == 1 {
                    pos += 1;
                } else {
                    neg += 1;
                }
                k += 1;
            }
            groups.push((pos, neg));
        }
        groups
    }
}

/// Area under the ROC curve as the normalized Mann-Whitney statistic.
/// Each tied positive/negative pair counts one half.
pub fn auroc(ls: &LabeledScores) -> Result<f64> {
    let (p, n) = (ls.positives(), ls.negatives());
    if p == 0 || n == 0 {
        return Err(Error::DegenerateLabels(format!(
            "AUROC needs both classes, got {p} anomalies and {n} normal nodes"
        )));
    }
    // walking groups from the top, every negative is beaten by the positives
    // already seen and ties with positives in its own group
    let mut pos_above = 0usize;
    let mut twice_u = 0u128;
    for (pos, neg) in ls.descending_groups() {
        twice_u += (neg as u128) * (2 * pos_above as u128 + pos as u128);
        pos_above += pos;
    }
    Ok(twice_u as f64 / (2.0 * p as f64 * n as f64))
}

/// Average precision: step-wise area under the precision-recall curve,
/// with equal scores crossing the threshold together.
pub fn auprc(ls: &LabeledScores) -> Result<f64> {
    let p = ls.positives();
    if p == 0 {
        return Err(Error::DegenerateLabels(
            "AUPRC needs at least one anomaly label".into(),
        ));
    }
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut ap = 0.0;
    for (pos, neg) in ls.descending_groups() {
        tp += pos;
        fp += neg;
        if pos > 0 {
            ap += pos as f64 * (tp as f64 / (tp + fp) as f64);
        }
    }
    Ok(ap / p as f64)
}
