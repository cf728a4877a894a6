//! Sparse graph storage and dense node features.
//!
//! [`SparseGraph`] holds the self-looped, symmetrically normalized adjacency
//! `D^{-1/2} (A + I) D^{-1/2}` in canonical CSR form. The raw adjacency is
//! never kept: edges are binarized, symmetrized and deduplicated on the way in.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Dense row-major `n x m` matrix of finite `f64` node features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    n: usize,
    m: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(n: usize, m: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * m {
            return Err(Error::shape("feature matrix entries", n * m, data.len()));
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "feature matrix".into(),
                index,
            });
        }
        Ok(Self { n, m, data })
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        Self {
            n,
            m,
            data: vec![0.0; n * m],
        }
    }

    /// Builds a matrix from equally sized rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let m = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * m);
        for r in rows {
            let r = r.as_ref();
            if r.len() != m {
                return Err(Error::shape("feature row length", m, r.len()));
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), m, data)
    }

    /// Wraps data produced internally from finite inputs.
    pub(crate) fn from_raw(n: usize, m: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * m);
        Self { n, m, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.m + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact(0) panics, and a zero-width matrix still has n (empty) rows
        (0..self.n).map(move |i| self.row(i))
    }

    pub(crate) fn ensure_same_shape(&self, other: &FeatureMatrix, what: &str) -> Result<()> {
        if self.n != other.n {
            return Err(Error::shape(format!("{what} rows"), self.n, other.n));
        }
        if self.m != other.m {
            return Err(Error::shape(format!("{what} columns"), self.m, other.m));
        }
        Ok(())
    }
}

/// Normalized symmetric adjacency with self-loops, in CSR form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseGraph {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseGraph {
    /// Builds `D^{-1/2} (A + I) D^{-1/2}` from an undirected edge list.
    ///
    /// Edge direction, duplicates and explicit self-loops are all collapsed,
    /// so every diagonal entry of `A + I` is exactly one.
    pub fn build_normalized(edges: &[(usize, usize)], n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut undirected = Vec::with_capacity(edges.len());
        for &(i, j) in edges {
            for index in [i, j] {
                if index >= n {
                    return Err(Error::IndexOutOfRange { index, n });
                }
            }
            if i != j {
                undirected.push((i.min(j), i.max(j)));
            }
        }
        undirected.sort_unstable();
        undirected.dedup();

        let mut degree = vec![1usize; n];
        for &(i, j) in &undirected {
            degree[i] += 1;
            degree[j] += 1;
        }
        let mut row_offsets = Vec::with_capacity(n + 1);
        row_offsets.push(0);
        for &d in &degree {
            row_offsets.push(row_offsets.last().unwrap() + d);
        }
        let nnz = row_offsets[n];

        let mut col_indices = vec![0usize; nnz];
        let mut cursor = row_offsets[..n].to_vec();
        for i in 0..n {
            col_indices[cursor[i]] = i;
            cursor[i] += 1;
        }
        for &(i, j) in &undirected {
            col_indices[cursor[i]] = j;
            cursor[i] += 1;
            col_indices[cursor[j]] = i;
            cursor[j] += 1;
        }
        for i in 0..n {
            col_indices[row_offsets[i]..row_offsets[i + 1]].sort_unstable();
        }

        let mut values = vec![0.0; nnz];
        for i in 0..n {
            let di = degree[i] as f64;
            for k in row_offsets[i]..row_offsets[i + 1] {
                // degree products are exact integers in f64, so (i,j) and (j,i) agree bitwise
                values[k] = 1.0 / (di * degree[col_indices[k]] as f64).sqrt();
            }
        }

        Ok(Self {
            n,
            row_offsets,
            col_indices,
            values,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Stored entries, including the diagonal.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Distinct undirected edges, excluding self-loops.
    pub fn num_edges(&self) -> usize {
        (self.nnz() - self.n) / 2
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[range.clone()], &self.values[range])
    }

    /// Entry `(i, j)`, zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    /// Undirected edges `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, _) = self.row(i);
            cols.iter().filter(move |&&j| j > i).map(move |&j| (i, j))
        })
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.n]; self.n];
        for (i, row) in dense.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                row[j] = v;
            }
        }
        dense
    }

    /// Sparse-dense product `Â · X`.
    ///
    /// Rows are computed in parallel; each output row accumulates its
    /// neighbors in stored column order, so the result does not depend on
    /// the number of worker threads.
    pub fn spmv(&self, x: &FeatureMatrix) -> Result<FeatureMatrix> {
        if x.n() != self.n {
            return Err(Error::shape("spmv operand rows", self.n, x.n()));
        }
        let m = x.m();
        let mut out = vec![0.0; self.n * m];
        if m > 0 {
            out.par_chunks_mut(m).enumerate().for_each(|(i, acc)| {
                let (cols, vals) = self.row(i);
                for (&j, &v) in cols.iter().zip(vals) {
                    for (a, &xj) in acc.iter_mut().zip(x.row(j)) {
                        *a += v * xj;
                    }
                }
            });
        }
        Ok(FeatureMatrix::from_raw(self.n, m, out))
    }
}
