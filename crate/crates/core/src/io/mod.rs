//! On-disk dataset and score formats.
//!
//! A dataset is a directory holding:
//!
//! - `edges.tsv`: one edge per line, two zero-based node indices separated by
//!   tabs or spaces. Extra columns (such as weights) are ignored, `#` starts a
//!   comment.
//! - `features.bin`: little-endian `u64 n`, `u64 m`, then `n * m` `f64`
//!   values in row-major order.
//! - `labels.tsv` (optional): one `0` or `1` per line.
//! - `meta.toml` (optional): `key = value` lines; `name` and `n` are read.
//!
//! Score files are tab-separated with a `node_id\tscore[\tlabel]\tpositive\tnegative`
//! header. Floats are written with 17 significant digits so they read back
//! bit-exactly.

mod synthetic;

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{FeatureMatrix, SparseGraph};
use crate::scoring::ScoreVector;

pub use synthetic::{generate, generate_synthetic, SyntheticParams};

pub const EDGES_FILE: &str = "edges.tsv";
pub const FEATURES_FILE: &str = "features.bin";
pub const LABELS_FILE: &str = "labels.tsv";
pub const META_FILE: &str = "meta.toml";

#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub graph: SparseGraph,
    pub features: FeatureMatrix,
    pub labels: Option<Vec<u8>>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, graph: SparseGraph, features: FeatureMatrix, labels: Option<Vec<u8>>) -> Result<Self> {
        if features.n() != graph.n() {
            return Err(Error::shape("feature rows vs graph nodes", graph.n(), features.n()));
        }
        if let Some(l) = &labels {
            if l.len() != graph.n() {
                return Err(Error::shape("label rows", graph.n(), l.len()));
            }
        }
        Ok(Self {
            name: name.into(),
            graph,
            features,
            labels,
        })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }
}

/// Optional feature transforms applied at load time. Both default to off.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Preprocessing {
    /// Scale every row to unit L2 norm (zero rows stay zero).
    pub row_l2: bool,
    /// Center every column and divide by its population standard deviation.
    pub standardize: bool,
}

impl Preprocessing {
    pub fn is_identity(&self) -> bool {
        !self.row_l2 && !self.standardize
    }

    /// Standardization runs before row normalization when both are set.
    pub fn apply(&self, x: &FeatureMatrix) -> FeatureMatrix {
        let (n, m) = (x.n(), x.m());
        let mut data = x.as_slice().to_vec();
        if self.standardize && n > 0 {
            for j in 0..m {
                let mean = (0..n).map(|i| data[i * m + j]).sum::<f64>() / n as f64;
                let var = (0..n).map(|i| (data[i * m + j] - mean).powi(2)).sum::<f64>() / n as f64;
                let sd = var.sqrt();
                for i in 0..n {
                    let v = data[i * m + j] - mean;
                    data[i * m + j] = if sd > 0.0 { v / sd } else { v };
                }
            }
        }
        if self.row_l2 && m > 0 {
            for row in data.chunks_exact_mut(m) {
                let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > 0.0 {
                    row.iter_mut().for_each(|v| *v /= norm);
                }
            }
        }
        FeatureMatrix::from_raw(n, m, data)
    }

    pub fn describe(&self) -> String {
        match (self.standardize, self.row_l2) {
            (false, false) => "none".into(),
            (true, false) => "standardize".into(),
            (false, true) => "row-l2".into(),
            (true, true) => "standardize,row-l2".into(),
        }
    }
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile(path.to_path_buf())
        } else {
            Error::io(path, e)
        }
    })
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Reads the edge list. Line numbers in errors are one-based.
pub fn read_edges(path: &Path) -> Result<Vec<(usize, usize)>> {
    let reader = BufReader::new(open(path)?);
    let mut edges = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut fields = content.split_whitespace();
        let mut next_index = || -> Result<usize> {
            let tok = fields
                .next()
                .ok_or_else(|| parse_err(path, k + 1, "expected two node indices"))?;
            tok.parse()
                .map_err(|_| parse_err(path, k + 1, format!("invalid node index {tok:?}")))
        };
        let i = next_index()?;
        let j = next_index()?;
        edges.push((i, j));
    }
    Ok(edges)
}

pub fn write_edges(path: &Path, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for (i, j) in edges {
        writeln!(w, "{i}\t{j}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_features(path: &Path) -> Result<FeatureMatrix> {
    let bytes = fs::read(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile(path.to_path_buf())
        } else {
            Error::io(path, e)
        }
    })?;
    if bytes.len() < 16 {
        return Err(parse_err(path, 0, "feature file shorter than its 16-byte header"));
    }
    let header = |k: usize| u64::from_le_bytes(bytes[k * 8..k * 8 + 8].try_into().unwrap());
    let (n, m) = (header(0) as usize, header(1) as usize);
    let payload = &bytes[16..];
    let expected = n
        .checked_mul(m)
        .and_then(|c| c.checked_mul(8))
        .ok_or_else(|| parse_err(path, 0, format!("header dimensions {n} x {m} overflow")))?;
    if payload.len() != expected {
        return Err(Error::shape(
            format!("feature payload bytes in {}", path.display()),
            expected,
            payload.len(),
        ));
    }
    let data: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    FeatureMatrix::new(n, m, data)
}

pub fn write_features(path: &Path, x: &FeatureMatrix) -> Result<()> {
    let mut bytes = Vec::with_capacity(16 + x.as_slice().len() * 8);
    bytes.extend_from_slice(&(x.n() as u64).to_le_bytes());
    bytes.extend_from_slice(&(x.m() as u64).to_le_bytes());
    for v in x.as_slice() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn parse_label(path: &Path, line: usize, tok: &str) -> Result<u8> {
    match tok {
        "0" => Ok(0),
        "1" => Ok(1),
        other => Err(parse_err(path, line, format!("label must be 0 or 1, got {other:?}"))),
    }
}

pub fn read_labels(path: &Path) -> Result<Vec<u8>> {
    let reader = BufReader::new(open(path)?);
    let mut labels = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        labels.push(parse_label(path, k + 1, content)?);
    }
    Ok(labels)
}

pub fn write_labels(path: &Path, labels: &[u8]) -> Result<()> {
    let mut s = String::with_capacity(labels.len() * 2);
    for l in labels {
        s.push_str(if *l == 1 { "1\n" } else { "0\n" });
    }
    fs::write(path, s).map_err(|e| Error::io(path, e))
}

/// `key = value` pairs from a meta file; values may be double-quoted.
pub fn read_meta(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let content = line.trim();
        if content.is_empty() || content.starts_with('#') || content.starts_with('[') {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_err(path, k + 1, "expected key = value"))?;
        let value = value.trim();
        let value = value
            .strip_prefix('"')
            .and_then(|v| v.strip_suffix('"'))
            .unwrap_or(value);
        out.push((key.trim().to_string(), value.to_string()));
    }
    Ok(out)
}

pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    load_dataset_with(dir, &Preprocessing::default())
}

/// Loads a dataset directory and builds its normalized graph.
pub fn load_dataset_with(dir: &Path, prep: &Preprocessing) -> Result<Dataset> {
    let mut name = dir
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    let mut declared_n = None;
    let meta_path = dir.join(META_FILE);
    if meta_path.exists() {
        for (key, value) in read_meta(&meta_path)? {
            match key.as_str() {
                "name" => name = value,
                "n" => {
                    declared_n = Some(value.parse::<usize>().map_err(|_| {
                        parse_err(&meta_path, 0, format!("invalid node count {value:?}"))
                    })?)
                }
                _ => {}
            }
        }
    }

    let features = read_features(&dir.join(FEATURES_FILE))?;
    let n = match declared_n {
        Some(n) if n != features.n() => {
            return Err(Error::shape("feature rows vs meta node count", n, features.n()))
        }
        Some(n) => n,
        None => features.n(),
    };
    let edges = read_edges(&dir.join(EDGES_FILE))?;
    let graph = SparseGraph::build_normalized(&edges, n)?;

    let labels_path = dir.join(LABELS_FILE);
    let labels = if labels_path.exists() {
        let labels = read_labels(&labels_path)?;
        if labels.len() != n {
            return Err(Error::shape("label rows", n, labels.len()));
        }
        Some(labels)
    } else {
        None
    };

    let features = if prep.is_identity() {
        features
    } else {
        log::info!("preprocessing features: {}", prep.describe());
        prep.apply(&features)
    };
    Dataset::new(name, graph, features, labels)
}

/// Writes a dataset directory, creating it if needed.
pub fn save_dataset(dataset: &Dataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_edges(&dir.join(EDGES_FILE), dataset.graph.edges())?;
    write_features(&dir.join(FEATURES_FILE), &dataset.features)?;
    if let Some(labels) = &dataset.labels {
        write_labels(&dir.join(LABELS_FILE), labels)?;
    }
    let meta = format!("name = \"{}\"\nn = {}\n", dataset.name, dataset.n());
    let meta_path = dir.join(META_FILE);
    fs::write(&meta_path, meta).map_err(|e| Error::io(&meta_path, e))
}

/// Contents of a score file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreFile {
    pub scores: Vec<f64>,
    /// Anchor statistics `(positive, negative)`, present in files written by [`save_scores`].
    pub parts: Option<(Vec<f64>, Vec<f64>)>,
    pub labels: Option<Vec<u8>>,
}

impl ScoreFile {
    /// The full score vector, if the file carries both anchor statistics.
    pub fn score_vector(&self) -> Option<ScoreVector> {
        self.parts.as_ref().map(|(p, q)| ScoreVector {
            scores: self.scores.clone(),
            positive_part: p.clone(),
            negative_part: q.clone(),
        })
    }
}

#[inline]
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn save_scores(scores: &ScoreVector, labels: Option<&[u8]>, path: &Path) -> Result<()> {
    scores.check_finite()?;
    if let Some(l) = labels {
        if l.len() != scores.len() {
            return Err(Error::shape("label rows", scores.len(), l.len()));
        }
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    if labels.is_some() {
        writeln!(w, "node_id\tscore\tlabel\tpositive\tnegative").map_err(io)?;
    } else {
        writeln!(w, "node_id\tscore\tpositive\tnegative").map_err(io)?;
    }
    for i in 0..scores.len() {
        write!(w, "{i}\t{}", fmt_f64(scores.scores[i])).map_err(io)?;
        if let Some(l) = labels {
            write!(w, "\t{}", l[i]).map_err(io)?;
        }
        writeln!(
            w,
            "\t{}\t{}",
            fmt_f64(scores.positive_part[i]),
            fmt_f64(scores.negative_part[i])
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn load_scores(path: &Path) -> Result<ScoreFile> {
    let reader = BufReader::new(open(path)?);
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(h) => h.map_err(|e| Error::io(path, e))?,
        None => return Err(parse_err(path, 1, "missing header line")),
    };
    let columns: Vec<&str> = header.trim_end().split('\t').collect();
    let col = |name: &str| columns.iter().position(|c| *c == name);
    let (id_col, score_col) = match (col("node_id"), col("score")) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(parse_err(path, 1, "header must contain node_id and score")),
    };
    let part_cols = match (col("positive"), col("negative")) {
        (Some(a), Some(b)) => Some((a, b)),
        (None, None) => None,
        _ => return Err(parse_err(path, 1, "positive and negative columns must appear together")),
    };
    let label_col = col("label");

    let mut scores = Vec::new();
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    let mut labels = label_col.map(|_| Vec::new());
    for (k, line) in lines.enumerate() {
        let lineno = k + 2;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim_end().split('\t').collect();
        if fields.len() != columns.len() {
            return Err(parse_err(
                path,
                lineno,
                format!("expected {} fields, found {}", columns.len(), fields.len()),
            ));
        }
        let id: usize = fields[id_col]
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("invalid node id {:?}", fields[id_col])))?;
        if id != scores.len() {
            return Err(parse_err(
                path,
                lineno,
                format!("node ids must be consecutive from 0, expected {} found {id}", scores.len()),
            ));
        }
        let float = |c: usize| -> Result<f64> {
            let v: f64 = fields[c]
                .parse()
                .map_err(|_| parse_err(path, lineno, format!("invalid number {:?}", fields[c])))?;
            if !v.is_finite() {
                return Err(parse_err(path, lineno, format!("non-finite value {:?}", fields[c])));
            }
            Ok(v)
        };
        scores.push(float(score_col)?);
        if let Some((p, q)) = part_cols {
            positive.push(float(p)?);
            negative.push(float(q)?);
        }
        if let (Some(c), Some(l)) = (label_col, labels.as_mut()) {
            l.push(parse_label(path, lineno, fields[c])?);
        }
    }
    Ok(ScoreFile {
        scores,
        parts: part_cols.map(|_| (positive, negative)),
        labels,
    })
}
