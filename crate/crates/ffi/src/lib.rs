//! C ABI over the `freegad` library.
//!
//! Datasets and score vectors are opaque heap handles owned by the caller
//! and released with the matching `*_free` function. Every fallible call
//! returns a [`FreegadStatus`]; on failure a description is available from
//! [`freegad_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use freegad::io::{self, Dataset, SyntheticParams};
use freegad::{
    pipeline, EncoderConfig, Error, FeatureMatrix, LabeledScores, PipelineConfig, PipelineOutput, ScoringConfig,
    SimilarityMode, SparseGraph, StatMode,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreegadStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    ShapeMismatch = 5,
    IndexOutOfRange = 6,
    KTooLarge = 7,
    DegenerateLabels = 8,
    InvalidConfig = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreegadSimilarity {
    SquaredNorm = 0,
    Cosine = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreegadStatistic {
    Sum = 0,
    Min = 1,
    Max = 2,
    Avg = 3,
}

/// Pipeline hyperparameters.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FreegadConfig {
    pub layers: u32,
    pub k: u32,
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub similarity: FreegadSimilarity,
    pub statistic: FreegadStatistic,
}

impl From<&FreegadConfig> for PipelineConfig {
    fn from(c: &FreegadConfig) -> Self {
        PipelineConfig {
            encoder: EncoderConfig {
                layers: c.layers as usize,
                sigma: c.sigma,
                similarity: match c.similarity {
                    FreegadSimilarity::SquaredNorm => SimilarityMode::SquaredNorm,
                    FreegadSimilarity::Cosine => SimilarityMode::Cosine,
                },
                retain_layers: false,
            },
            k: c.k as usize,
            scoring: ScoringConfig {
                alpha: c.alpha,
                beta: c.beta,
                stat: match c.statistic {
                    FreegadStatistic::Sum => StatMode::Sum,
                    FreegadStatistic::Min => StatMode::Min,
                    FreegadStatistic::Max => StatMode::Max,
                    FreegadStatistic::Avg => StatMode::Avg,
                },
            },
        }
    }
}

/// Opaque loaded or generated dataset.
pub struct FreegadDataset {
    inner: Dataset,
}

/// Opaque result of one pipeline run.
pub struct FreegadScores {
    inner: PipelineOutput,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FreegadStatus {
    match e {
        Error::IndexOutOfRange { .. } => FreegadStatus::IndexOutOfRange,
        Error::EmptyGraph | Error::ShapeMismatch { .. } | Error::NonFinite { .. } => FreegadStatus::ShapeMismatch,
        Error::KTooLarge { .. } | Error::KZero => FreegadStatus::KTooLarge,
        Error::EmptyDistanceSet | Error::InvalidConfig(_) | Error::InvalidParams(_) => FreegadStatus::InvalidConfig,
        Error::DegenerateLabels(_) => FreegadStatus::DegenerateLabels,
        Error::MissingFile(_) | Error::Io { .. } => FreegadStatus::Io,
        Error::Parse { .. } => FreegadStatus::Parse,
    }
}

fn fail(status: FreegadStatus, msg: impl Into<String>) -> FreegadStatus {
    set_last_error(msg.into());
    status
}

fn guard(f: impl FnOnce() -> Result<(), FreegadStatus>) -> FreegadStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            FreegadStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => fail(FreegadStatus::Panic, "internal panic"),
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, FreegadStatus>;
}

impl<T> OrStatus<T> for freegad::Result<T> {
    fn or_status(self) -> Result<T, FreegadStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, FreegadStatus> {
    if p.is_null() {
        return Err(fail(FreegadStatus::NullPointer, "path is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(PathBuf::from)
        .map_err(|_| fail(FreegadStatus::InvalidArgument, "path is not valid UTF-8"))
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), FreegadStatus> {
    if p.is_null() {
        Err(fail(FreegadStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

/// Message describing the last failure on this thread, or NULL.
///
/// The pointer stays valid until the next `freegad_*` call on this thread.
#[no_mangle]
pub extern "C" fn freegad_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Defaults: L = 2, K = 10, alpha = beta = 1, sigma = 1e-8, squared-norm similarity, sum statistic.
#[no_mangle]
pub extern "C" fn freegad_config_default() -> FreegadConfig {
    let d = PipelineConfig::default();
    FreegadConfig {
        layers: d.encoder.layers as u32,
        k: d.k as u32,
        alpha: d.scoring.alpha,
        beta: d.scoring.beta,
        sigma: d.encoder.sigma,
        similarity: FreegadSimilarity::SquaredNorm,
        statistic: FreegadStatistic::Sum,
    }
}

/// Loads a dataset directory.
///
/// # Safety
/// `dir` must be a NUL-terminated string and `out` a valid pointer to write to.
#[no_mangle]
pub unsafe extern "C" fn freegad_dataset_load(dir: *const c_char, out: *mut *mut FreegadDataset) -> FreegadStatus {
    guard(|| {
        non_null(out, "out")?;
        let dir = path_arg(dir)?;
        let inner = io::load_dataset(&dir).or_status()?;
        *out = Box::into_raw(Box::new(FreegadDataset { inner }));
        Ok(())
    })
}

/// Builds a dataset from row-major features and an edge list of `2 * num_edges`
/// node indices. `labels` may be NULL.
///
/// # Safety
/// `features` must hold `n * m` doubles, `edges` `2 * num_edges` values (or be
/// NULL when `num_edges` is 0) and `labels`, when non-NULL, `n` bytes.
#[no_mangle]
pub unsafe extern "C" fn freegad_dataset_from_arrays(
    n: usize,
    m: usize,
    features: *const f64,
    edges: *const u64,
    num_edges: usize,
    labels: *const u8,
    out: *mut *mut FreegadDataset,
) -> FreegadStatus {
    guard(|| {
        non_null(out, "out")?;
        if n * m > 0 {
            non_null(features, "features")?;
        }
        if num_edges > 0 {
            non_null(edges, "edges")?;
        }
        let x = if n * m > 0 {
            std::slice::from_raw_parts(features, n * m).to_vec()
        } else {
            Vec::new()
        };
        let x = FeatureMatrix::new(n, m, x).or_status()?;
        let pairs: Vec<(usize, usize)> = if num_edges > 0 {
            std::slice::from_raw_parts(edges, 2 * num_edges)
                .chunks_exact(2)
                .map(|e| (e[0] as usize, e[1] as usize))
                .collect()
        } else {
            Vec::new()
        };
        let graph = SparseGraph::build_normalized(&pairs, n).or_status()?;
        let labels = if labels.is_null() {
            None
        } else {
            let l = std::slice::from_raw_parts(labels, n).to_vec();
            if let Some(i) = l.iter().position(|&v| v > 1) {
                return Err(fail(
                    FreegadStatus::InvalidArgument,
                    format!("label at position {i} is not 0 or 1"),
                ));
            }
            Some(l)
        };
        let inner = Dataset::new("ffi", graph, x, labels).or_status()?;
        *out = Box::into_raw(Box::new(FreegadDataset { inner }));
        Ok(())
    })
}

/// Generates a seeded synthetic dataset with injected anomalies.
///
/// # Safety
/// `out` must be a valid pointer to write to.
#[no_mangle]
pub unsafe extern "C" fn freegad_dataset_generate(
    n: usize,
    m: usize,
    seed: u64,
    n_struct: usize,
    n_ctx: usize,
    clique_size: usize,
    out: *mut *mut FreegadDataset,
) -> FreegadStatus {
    guard(|| {
        non_null(out, "out")?;
        let params = SyntheticParams {
            n,
            m,
            seed,
            n_struct,
            n_ctx,
            clique_size,
            communities: SyntheticParams::default().communities.min(n.max(1)),
            ..Default::default()
        };
        let inner = io::generate(&params).or_status()?;
        *out = Box::into_raw(Box::new(FreegadDataset { inner }));
        Ok(())
    })
}

/// Writes a dataset directory in the on-disk format.
///
/// # Safety
/// `dataset` must come from a `freegad_dataset_*` constructor; `dir` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn freegad_dataset_save(dataset: *const FreegadDataset, dir: *const c_char) -> FreegadStatus {
    guard(|| {
        non_null(dataset, "dataset")?;
        let dir = path_arg(dir)?;
        io::save_dataset(&(*dataset).inner, &dir).or_status()
    })
}

/// # Safety
/// `dataset` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn freegad_dataset_num_nodes(dataset: *const FreegadDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.inner.n())
}

/// # Safety
/// `dataset` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn freegad_dataset_num_features(dataset: *const FreegadDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.inner.features.m())
}

/// # Safety
/// `dataset` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn freegad_dataset_num_edges(dataset: *const FreegadDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.inner.graph.num_edges())
}

/// Copies the labels into `out` (length `n`). Fails when the dataset has none.
///
/// # Safety
/// `dataset` must be a live handle and `out` hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn freegad_dataset_labels(dataset: *const FreegadDataset, out: *mut u8, len: usize) -> FreegadStatus {
    guard(|| {
        non_null(dataset, "dataset")?;
        non_null(out, "out")?;
        let d = &(*dataset).inner;
        let labels = d
            .labels
            .as_ref()
            .ok_or_else(|| fail(FreegadStatus::DegenerateLabels, "dataset has no labels"))?;
        if len != labels.len() {
            return Err(fail(
                FreegadStatus::ShapeMismatch,
                format!("buffer holds {len} labels, dataset has {}", labels.len()),
            ));
        }
        ptr::copy_nonoverlapping(labels.as_ptr(), out, len);
        Ok(())
    })
}

/// # Safety
/// `dataset` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn freegad_dataset_free(dataset: *mut FreegadDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Runs the full pipeline. `config` may be NULL for defaults.
///
/// # Safety
/// `dataset` must be a live handle, `config` NULL or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn freegad_score(
    dataset: *const FreegadDataset,
    config: *const FreegadConfig,
    out: *mut *mut FreegadScores,
) -> FreegadStatus {
    guard(|| {
        non_null(dataset, "dataset")?;
        non_null(out, "out")?;
        let cfg = match config.as_ref() {
            Some(c) => PipelineConfig::from(c),
            None => PipelineConfig::default(),
        };
        let d = &(*dataset).inner;
        let inner = pipeline::run(&d.graph, &d.features, &cfg).map_err(|e| fail(status_of(&e.error), e.to_string()))?;
        *out = Box::into_raw(Box::new(FreegadScores { inner }));
        Ok(())
    })
}

/// # Safety
/// `scores` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn freegad_scores_len(scores: *const FreegadScores) -> usize {
    scores.as_ref().map_or(0, |s| s.inner.scores.len())
}

/// Copies final, positive-anchor and negative-anchor scores. Any output
/// pointer may be NULL to skip it; non-NULL ones must hold `len` doubles.
///
/// # Safety
/// See above; `scores` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn freegad_scores_copy(
    scores: *const FreegadScores,
    final_out: *mut f64,
    positive_out: *mut f64,
    negative_out: *mut f64,
    len: usize,
) -> FreegadStatus {
    guard(|| {
        non_null(scores, "scores")?;
        let s = &(*scores).inner.scores;
        if len != s.len() {
            return Err(fail(
                FreegadStatus::ShapeMismatch,
                format!("buffer holds {len} values, there are {} scores", s.len()),
            ));
        }
        for (dst, src) in [
            (final_out, &s.scores),
            (positive_out, &s.positive_part),
            (negative_out, &s.negative_part),
        ] {
            if !dst.is_null() {
                ptr::copy_nonoverlapping(src.as_ptr(), dst, len);
            }
        }
        Ok(())
    })
}

/// Anchors per side.
///
/// # Safety
/// `scores` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn freegad_scores_num_anchors(scores: *const FreegadScores) -> usize {
    scores.as_ref().map_or(0, |s| s.inner.anchors.k())
}

/// Copies the ascending positive and negative anchor indices (`k` each).
///
/// # Safety
/// `scores` must be a live handle; both outputs must hold `k` values.
#[no_mangle]
pub unsafe extern "C" fn freegad_scores_anchors(
    scores: *const FreegadScores,
    positive_out: *mut u64,
    negative_out: *mut u64,
    k: usize,
) -> FreegadStatus {
    guard(|| {
        non_null(scores, "scores")?;
        non_null(positive_out, "positive_out")?;
        non_null(negative_out, "negative_out")?;
        let a = &(*scores).inner.anchors;
        if k != a.k() {
            return Err(fail(
                FreegadStatus::ShapeMismatch,
                format!("buffers hold {k} anchors, there are {}", a.k()),
            ));
        }
        for (i, (&p, &q)) in a.positive.iter().zip(&a.negative).enumerate() {
            *positive_out.add(i) = p as u64;
            *negative_out.add(i) = q as u64;
        }
        Ok(())
    })
}

/// Writes a score file; labels are taken from `dataset` when it is non-NULL and labeled.
///
/// # Safety
/// `scores` must be live, `dataset` NULL or live, `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn freegad_scores_save(
    scores: *const FreegadScores,
    dataset: *const FreegadDataset,
    path: *const c_char,
) -> FreegadStatus {
    guard(|| {
        non_null(scores, "scores")?;
        let path = path_arg(path)?;
        let labels = dataset.as_ref().and_then(|d| d.inner.labels.as_deref());
        io::save_scores(&(*scores).inner.scores, labels, &path).or_status()
    })
}

/// # Safety
/// `scores` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn freegad_scores_free(scores: *mut FreegadScores) {
    if !scores.is_null() {
        drop(Box::from_raw(scores));
    }
}

/// AUROC and AUPRC (fractions in [0, 1]) of `n` scores against 0/1 labels.
///
/// # Safety
/// `scores` and `labels` must hold `n` values; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn freegad_evaluate(
    scores: *const f64,
    labels: *const u8,
    n: usize,
    auroc_out: *mut f64,
    auprc_out: *mut f64,
) -> FreegadStatus {
    guard(|| {
        non_null(scores, "scores")?;
        non_null(labels, "labels")?;
        non_null(auroc_out, "auroc_out")?;
        non_null(auprc_out, "auprc_out")?;
        let ls = LabeledScores::new(
            std::slice::from_raw_parts(scores, n).to_vec(),
            std::slice::from_raw_parts(labels, n).to_vec(),
        )
        .or_status()?;
        *auroc_out = freegad::auroc(&ls).or_status()?;
        *auprc_out = freegad::auprc(&ls).or_status()?;
        Ok(())
    })
}
