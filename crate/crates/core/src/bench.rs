//! Scaling benchmark on generated graphs.

use std::time::{Duration, Instant};

use crate::encoder::EncoderConfig;
use crate::error::{Error, Result};
use crate::io::{generate, SyntheticParams};
use crate::pipeline::{run, PipelineConfig, StageTimings};
use crate::scoring::ScoringConfig;

/// Requested graph size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchSize {
    Nodes(usize),
    /// Target undirected edge count; nodes follow from the mean degree.
    Edges(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub sizes: Vec<BenchSize>,
    pub m: usize,
    pub layers: usize,
    pub k: usize,
    pub avg_degree: f64,
    pub seed: u64,
    /// Pipeline runs per size; the fastest is reported.
    pub repeats: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![
                BenchSize::Edges(100_000),
                BenchSize::Edges(200_000),
                BenchSize::Edges(400_000),
                BenchSize::Edges(800_000),
            ],
            m: 16,
            layers: 8,
            k: 50,
            avg_degree: 10.0,
            seed: 0,
            repeats: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub edges: usize,
    /// Anchors per side actually used (capped at `n / 2`).
    pub k: usize,
    pub generate: Duration,
    pub timings: StageTimings,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of log(encode time) against log(edges).
    pub encode_slope: Option<f64>,
    pub total_slope: Option<f64>,
    pub peak_rss_bytes: Option<u64>,
}

impl ScalingReport {
    pub fn render(&self) -> String {
        let mut s = String::from("n\tedges\tK\tgenerate_s\tencode_s\tanchors_s\tscore_s\ttotal_s\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\n",
                r.n,
                r.edges,
                r.k,
                r.generate.as_secs_f64(),
                r.timings.encode.as_secs_f64(),
                r.timings.anchors.as_secs_f64(),
                r.timings.score.as_secs_f64(),
                r.timings.total().as_secs_f64(),
            ));
        }
        let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.3}"));
        s.push_str(&format!("encode log-log slope vs edges: {}\n", fmt(self.encode_slope)));
        s.push_str(&format!("total log-log slope vs edges: {}\n", fmt(self.total_slope)));
        if let Some(b) = self.peak_rss_bytes {
            s.push_str(&format!("peak resident memory: {:.1} MiB\n", b as f64 / (1024.0 * 1024.0)));
        }
        s
    }
}

/// Ordinary least-squares slope of `ln y` on `ln x`. Needs two distinct positive x values.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Peak resident set size of this process, from `/proc/self/status` where available.
pub fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kib: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kib * 1024)
}

pub fn run_scaling(cfg: &BenchConfig) -> Result<ScalingReport> {
    if cfg.sizes.is_empty() {
        return Err(Error::InvalidConfig("benchmark needs at least one size".into()));
    }
    if cfg.avg_degree <= 0.0 {
        return Err(Error::InvalidConfig("benchmark mean degree must be positive".into()));
    }
    let mut rows = Vec::with_capacity(cfg.sizes.len());
    for &size in &cfg.sizes {
        let n = match size {
            BenchSize::Nodes(n) => n,
            BenchSize::Edges(e) => ((2 * e) as f64 / cfg.avg_degree).round().max(2.0) as usize,
        };
        let params = SyntheticParams {
            n,
            m: cfg.m,
            seed: cfg.seed,
            n_struct: 0,
            n_ctx: 0,
            communities: 10.min(n),
            avg_degree: cfg.avg_degree,
            ..Default::default()
        };
        let t = Instant::now();
        let data = generate(&params)?;
        let generate_time = t.elapsed();

        let k = cfg.k.min(n / 2).max(1);
        let pipeline = PipelineConfig {
            encoder: EncoderConfig {
                layers: cfg.layers,
                ..Default::default()
            },
            k,
            scoring: ScoringConfig::default(),
        };
        let mut best: Option<StageTimings> = None;
        for _ in 0..cfg.repeats.max(1) {
            let out = run(&data.graph, &data.features, &pipeline).map_err(|e| e.error)?;
            best = Some(match best {
                None => out.timings,
                Some(b) => StageTimings {
                    encode: b.encode.min(out.timings.encode),
                    anchors: b.anchors.min(out.timings.anchors),
                    score: b.score.min(out.timings.score),
                },
            });
        }
        let row = BenchRow {
            n,
            edges: data.graph.num_edges(),
            k,
            generate: generate_time,
            timings: best.unwrap(),
        };
        log::info!(
            "bench n={} edges={} encode={:.4}s total={:.4}s",
            row.n,
            row.edges,
            row.timings.encode.as_secs_f64(),
            row.timings.total().as_secs_f64()
        );
        rows.push(row);
    }
    let edges: Vec<f64> = rows.iter().map(|r| r.edges as f64).collect();
    let encode: Vec<f64> = rows.iter().map(|r| r.timings.encode.as_secs_f64()).collect();
    let total: Vec<f64> = rows.iter().map(|r| r.timings.total().as_secs_f64()).collect();
    Ok(ScalingReport {
        encode_slope: loglog_slope(&edges, &encode),
        total_slope: loglog_slope(&edges, &total),
        peak_rss_bytes: peak_rss_bytes(),
        rows,
    })
}
