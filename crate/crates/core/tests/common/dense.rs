//! Straightforward dense re-implementation of the whole pipeline.

use freegad::{SimilarityMode, StatMode};

use super::Instance;

pub type Mat = Vec<Vec<f64>>;

pub fn normalized_adjacency(n: usize, edges: &[(usize, usize)]) -> Mat {
    let mut a = vec![vec![0.0; n]; n];
    for &(i, j) in edges {
        a[i][j] = 1.0;
        a[j][i] = 1.0;
    }
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let deg: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    (0..n)
        .map(|i| (0..n).map(|j| a[i][j] / (deg[i] * deg[j]).sqrt()).collect())
        .collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let m = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| row.iter().zip(b).map(|(&aik, bk)| aik * bk[j]).sum())
                .collect()
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn similarity(x0: &[f64], xl: &[f64], sigma: f64, mode: SimilarityMode) -> f64 {
    let (a, b) = (dot(x0, x0), dot(xl, xl));
    match mode {
        SimilarityMode::SquaredNorm => dot(x0, xl) / (a * b + sigma),
        SimilarityMode::Cosine => dot(x0, xl) / (a.sqrt() * b.sqrt() + sigma),
    }
}

pub fn softmax(a: &[f64]) -> Vec<f64> {
    let max = a.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = a.iter().map(|v| (v - max).exp()).collect();
    let z: f64 = e.iter().sum();
    e.iter().map(|v| v / z).collect()
}

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

pub fn statistic(d: &[f64], mode: StatMode) -> f64 {
    let min = d.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let avg = d.iter().sum::<f64>() / d.len() as f64;
    match mode {
        StatMode::Sum => min + max + avg,
        StatMode::Min => min,
        StatMode::Max => max,
        StatMode::Avg => avg,
    }
}

pub struct DenseRun {
    pub stack: Vec<Mat>,
    pub weights: Mat,
    pub mixed: Mat,
    pub affinity: Vec<f64>,
    pub positive: Vec<usize>,
    pub negative: Vec<usize>,
    pub scores: Vec<f64>,
}

pub fn run(inst: &Instance) -> DenseRun {
    let cfg = &inst.cfg;
    let (layers, sigma, mode) = (cfg.encoder.layers, cfg.encoder.sigma, cfg.encoder.similarity);
    let a_hat = normalized_adjacency(inst.n, &inst.edges);
    let mut stack = vec![inst.features.clone()];
    for l in 0..layers {
        let next = matmul(&a_hat, &stack[l]);
        stack.push(next);
    }
    let x0 = &stack[0];
    let weights: Mat = (0..inst.n)
        .map(|i| {
            let raw: Vec<f64> = (1..=layers).map(|l| similarity(&x0[i], &stack[l][i], sigma, mode)).collect();
            softmax(&raw)
        })
        .collect();
    let m = x0[0].len();
    let mixed: Mat = (0..inst.n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    (1..=layers)
                        .map(|l| {
                            let w = weights[i][l - 1];
                            (1.0 - w) * stack[l][i][j] + w * x0[i][j]
                        })
                        .sum::<f64>()
                        / layers as f64
                })
                .collect()
        })
        .collect();

    let affinity: Vec<f64> = (0..inst.n).map(|i| similarity(&x0[i], &mixed[i], sigma, mode)).collect();
    let mut order: Vec<usize> = (0..inst.n).collect();
    order.sort_by(|&a, &b| affinity[b].partial_cmp(&affinity[a]).unwrap().then(a.cmp(&b)));
    let k = cfg.k;
    let mut positive = order[..k].to_vec();
    let mut negative = order[inst.n - k..].to_vec();
    positive.sort();
    negative.sort();

    let stat = cfg.scoring.stat;
    let scores = (0..inst.n)
        .map(|i| {
            let dp: Vec<f64> = positive.iter().map(|&p| euclid(&mixed[i], &mixed[p])).collect();
            let dn: Vec<f64> = negative.iter().map(|&q| euclid(&mixed[i], &mixed[q])).collect();
            cfg.scoring.alpha * statistic(&dp, stat) - cfg.scoring.beta * statistic(&dn, stat)
        })
        .collect();

    DenseRun {
        stack,
        weights,
        mixed,
        affinity,
        positive,
        negative,
        scores,
    }
}
