//! Dense matrices over GF(2^m) and Gaussian elimination.

use rayon::prelude::*;

use crate::galois::Field;

/// Row-major dense matrix of field elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Matrix {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix { rows: rows.len(), cols, data: rows.concat() }
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<u32>) -> Matrix {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [u32] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn as_flat(&self) -> &[u32] {
        &self.data
    }

    pub fn as_flat_mut(&mut self) -> &mut [u32] {
        &mut self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[u32]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    /// The first `k` rows.
    pub fn top_rows(&self, k: usize) -> Matrix {
        let k = k.min(self.rows);
        Matrix { rows: k, cols: self.cols, data: self.data[..k * self.cols].to_vec() }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix { rows: idx.len(), cols: self.cols, data }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for r in 0..self.rows {
            let row = self.row(r);
            data.extend(idx.iter().map(|&c| row[c]));
        }
        Matrix { rows: self.rows, cols: idx.len(), data }
    }

    /// `v * self` for a row vector `v` of length `rows`.
    pub fn left_mul(&self, field: &Field, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![0u32; self.cols];
        for (r, &c) in v.iter().enumerate() {
            field.mul_add_assign(&mut out, self.row(r), c);
        }
        out
    }
}

/// Rank by Gaussian elimination, pivoting on the first nonzero entry of each
/// column. Rows below the pivot are eliminated in parallel; the result does
/// not depend on scheduling.
pub fn rank(field: &Field, m: &Matrix) -> usize {
    let mut work = m.clone();
    let cols = work.cols;
    let mut r = 0;
    for c in 0..cols {
        if r == work.rows {
            break;
        }
        let Some(p) = (r..work.rows).find(|&i| work.get(i, c) != 0) else { continue };
        if p != r {
            for j in 0..cols {
                work.data.swap(r * cols + j, p * cols + j);
            }
        }
        let inv = field.inv(work.get(r, c)).expect("pivot is nonzero");
        field.scale_assign(work.row_mut(r), inv);
        let (head, tail) = work.data.split_at_mut((r + 1) * cols);
        let pivot = &head[r * cols..];
        tail.par_chunks_mut(cols).for_each(|row| {
            let f = row[c];
            if f != 0 {
                field.mul_add_assign(row, pivot, f);
            }
        });
        r += 1;
    }
    r
}

/// Incrementally built echelon basis of a row space. Inserting rows in order
/// identifies the greedy (first-fit) set of independent rows.
#[derive(Debug, Clone)]
pub struct EchelonBasis<'f> {
    field: &'f Field,
    cols: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl<'f> EchelonBasis<'f> {
    pub fn new(field: &'f Field, cols: usize) -> Self {
        EchelonBasis { field, cols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis in place.
    pub fn reduce(&self, v: &mut [u32]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let f = v[p];
            if f != 0 {
                self.field.mul_add_assign(v, row, f);
            }
        }
    }

    /// Adds `v` if it is independent of the current basis.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.cols);
        let mut w = v.to_vec();
        self.reduce(&mut w);
        let Some(p) = w.iter().position(|&x| x != 0) else { return false };
        let inv = self.field.inv(w[p]).expect("nonzero");
        self.field.scale_assign(&mut w, inv);
        self.rows.push(w);
        self.pivots.push(p);
        true
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }
}

/// Outcome of a greedy pass over the rows of a matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowBasis {
    /// Indices of the rows kept, in order.
    pub independent: Vec<usize>,
    /// `prefix_ranks[i]` is the rank of the first `i + 1` rows.
    pub prefix_ranks: Vec<usize>,
}

impl RowBasis {
    pub fn rank(&self) -> usize {
        self.independent.len()
    }

    /// Rank of the first `k` rows.
    pub fn rank_of_prefix(&self, k: usize) -> usize {
        if k == 0 {
            0
        } else {
            self.prefix_ranks[k - 1]
        }
    }
}

pub fn greedy_row_basis(field: &Field, m: &Matrix) -> RowBasis {
    let mut basis = EchelonBasis::new(field, m.cols);
    let mut independent = Vec::new();
    let mut prefix_ranks = Vec::with_capacity(m.rows);
    for (i, row) in m.iter_rows().enumerate() {
        if basis.insert(row) {
            independent.push(i);
        }
        prefix_ranks.push(basis.rank());
    }
    RowBasis { independent, prefix_ranks }
}

/// A nonzero `v` with `v * m = 0`, if the rows of `m` are dependent.
pub fn left_kernel_vector(field: &Field, m: &Matrix) -> Option<Vec<u32>> {
    // Track row combinations alongside the reduction.
    let k = m.rows;
    let width = m.cols + k;
    let mut aug: Vec<Vec<u32>> = (0..k)
        .map(|i| {
            let mut row = m.row(i).to_vec();
            row.extend((0..k).map(|j| u32::from(i == j)));
            row
        })
        .collect();
    let mut r = 0;
    for c in 0..m.cols {
        let Some(p) = (r..k).find(|&i| aug[i][c] != 0) else { continue };
        aug.swap(r, p);
        let inv = field.inv(aug[r][c]).expect("nonzero");
        field.scale_assign(&mut aug[r], inv);
        let pivot = aug[r].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                field.mul_add_assign(row, &pivot, f);
            }
        }
        r += 1;
        if r == k {
            break;
        }
    }
    aug.into_iter().skip(r).map(|row| row[m.cols..width].to_vec()).find(|v| v.iter().any(|&x| x != 0))
}
