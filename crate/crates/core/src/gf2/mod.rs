//! Sparse linear algebra over GF(2).

mod alist;
mod bitvec;
mod echelon;

pub use alist::{read_alist, write_alist};
pub use bitvec::BitVector;
pub use echelon::RowSpace;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary matrix with both row and column adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseBinaryMatrix {
    rows: usize,
    cols: usize,
    row_support: Vec<Vec<usize>>,
    col_support: Vec<Vec<usize>>,
}

impl SparseBinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            row_support: vec![Vec::new(); rows],
            col_support: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_rows_unchecked(n, n, (0..n).map(|i| vec![i]).collect())
    }

    /// Builds a matrix from per-row column lists. Rows need not be sorted, but
    /// a repeated column within a row is an error.
    pub fn from_rows(rows: usize, cols: usize, row_support: Vec<Vec<usize>>) -> Result<Self> {
        if row_support.len() != rows {
            return Err(Error::DimensionMismatch {
                expected: rows,
                actual: row_support.len(),
                context: "row count",
            });
        }
        let mut checked = Vec::with_capacity(rows);
        for row in row_support {
            checked.push(BitVector::from_support(cols, row)?.support().to_vec());
        }
        Ok(Self::from_rows_unchecked(rows, cols, checked))
    }

    pub fn from_dense(dense: &[Vec<u8>]) -> Result<Self> {
        let rows = dense.len();
        let cols = dense.first().map_or(0, Vec::len);
        let mut support = Vec::with_capacity(rows);
        for row in dense {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    actual: row.len(),
                    context: "dense row width",
                });
            }
            support.push(
                row.iter()
                    .enumerate()
                    .filter_map(|(j, &x)| (x & 1 == 1).then_some(j))
                    .collect(),
            );
        }
        Ok(Self::from_rows_unchecked(rows, cols, support))
    }

    pub(crate) fn from_rows_unchecked(rows: usize, cols: usize, row_support: Vec<Vec<usize>>) -> Self {
        let mut col_support = vec![Vec::new(); cols];
        for (i, row) in row_support.iter().enumerate() {
            for &j in row {
                col_support[j].push(i);
            }
        }
        Self {
            rows,
            cols,
            row_support,
            col_support,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.row_support[i]
    }

    pub fn col(&self, j: usize) -> &[usize] {
        &self.col_support[j]
    }

    pub fn row_supports(&self) -> &[Vec<usize>] {
        &self.row_support
    }

    pub fn col_supports(&self) -> &[Vec<usize>] {
        &self.col_support
    }

    pub fn nnz(&self) -> usize {
        self.row_support.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.row_support[i].binary_search(&j).is_ok()
    }

    pub fn row_vector(&self, i: usize) -> BitVector {
        BitVector::from_sorted_unchecked(self.cols, self.row_support[i].clone())
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut out = vec![vec![0u8; self.cols]; self.rows];
        for (i, row) in self.row_support.iter().enumerate() {
            for &j in row {
                out[i][j] = 1;
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self {
            rows: self.cols,
            cols: self.rows,
            row_support: self.col_support.clone(),
            col_support: self.row_support.clone(),
        }
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                actual: other.rows,
                context: "hstack row count",
            });
        }
        let row_support = self
            .row_support
            .iter()
            .zip(&other.row_support)
            .map(|(a, b)| a.iter().copied().chain(b.iter().map(|&j| j + self.cols)).collect())
            .collect();
        Ok(Self::from_rows_unchecked(self.rows, self.cols + other.cols, row_support))
    }

    /// Column-wise parity of the rows selected by `e`: `s = H e^T`.
    pub fn syndrome(&self, e: &BitVector) -> Result<BitVector> {
        if e.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: e.len(),
                context: "error length vs matrix columns",
            });
        }
        let mut parity = vec![false; self.rows];
        for &j in e.support() {
            for &i in &self.col_support[j] {
                parity[i] ^= true;
            }
        }
        Ok(BitVector::from_bools(&parity))
    }

    /// `self * other^T` over GF(2), as a sparse matrix.
    pub fn mul_transpose(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: other.cols,
                context: "product inner dimension",
            });
        }
        let mut out = Vec::with_capacity(self.rows);
        let mut acc = vec![false; other.rows];
        for row in &self.row_support {
            for &j in row {
                for &k in &other.col_support[j] {
                    acc[k] ^= true;
                }
            }
            let mut entries = Vec::new();
            for (k, bit) in acc.iter_mut().enumerate() {
                if *bit {
                    entries.push(k);
                    *bit = false;
                }
            }
            out.push(entries);
        }
        Ok(Self::from_rows_unchecked(self.rows, other.rows, out))
    }

    pub fn row_space(&self) -> RowSpace {
        let mut rs = RowSpace::new(self.cols);
        for i in 0..self.rows {
            let mut words = self.row_vector(i).to_words();
            rs.insert_words(&mut words);
        }
        rs
    }

    pub fn rank(&self) -> usize {
        self.row_space().rank()
    }

    /// Whether `v` is a GF(2) combination of the rows.
    pub fn in_rowspace(&self, v: &BitVector) -> Result<bool> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: v.len(),
                context: "vector length vs matrix columns",
            });
        }
        Ok(self.row_space().contains(v))
    }

    /// Basis of `{x : H x^T = 0}`.
    pub fn nullspace_basis(&self) -> Vec<BitVector> {
        let mut dense: Vec<Vec<u64>> = (0..self.rows).map(|i| self.row_vector(i).to_words()).collect();
        let pivots = echelon::rref(&mut dense, self.cols);
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::with_capacity(self.cols - pivots.len());
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let (w, b) = (free / 64, 1u64 << (free % 64));
            let mut support: Vec<usize> = pivots
                .iter()
                .zip(&dense)
                .filter(|(_, row)| row[w] & b != 0)
                .map(|(&p, _)| p)
                .collect();
            support.push(free);
            support.sort_unstable();
            basis.push(BitVector::from_sorted_unchecked(self.cols, support));
        }
        basis
    }

    /// Removes the given rows. The returned map sends old row indices to
    /// their position in the reduced matrix.
    pub fn delete_rows(&self, rows: &[usize]) -> Result<(Self, RowMap)> {
        let mut removed = vec![false; self.rows];
        for &r in rows {
            if r >= self.rows {
                return Err(Error::IndexOutOfRange {
                    index: r,
                    bound: self.rows,
                });
            }
            removed[r] = true;
        }
        let mut old_to_new = vec![None; self.rows];
        let mut kept = Vec::with_capacity(self.rows);
        for (i, row) in self.row_support.iter().enumerate() {
            if !removed[i] {
                old_to_new[i] = Some(kept.len());
                kept.push(row.clone());
            }
        }
        let reduced = Self::from_rows_unchecked(kept.len(), self.cols, kept);
        Ok((reduced, RowMap { old_to_new }))
    }
}

/// Old-to-new row index map produced by [`SparseBinaryMatrix::delete_rows`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowMap {
    old_to_new: Vec<Option<usize>>,
}

impl RowMap {
    pub fn identity(rows: usize) -> Self {
        Self {
            old_to_new: (0..rows).map(Some).collect(),
        }
    }

    pub fn get(&self, old: usize) -> Option<usize> {
        self.old_to_new.get(old).copied().flatten()
    }

    pub fn old_len(&self) -> usize {
        self.old_to_new.len()
    }

    pub fn new_len(&self) -> usize {
        self.old_to_new.iter().flatten().count()
    }

    /// Drops the removed positions of a syndrome indexed by the old rows.
    pub fn restrict(&self, s: &BitVector) -> Result<BitVector> {
        if s.len() != self.old_len() {
            return Err(Error::DimensionMismatch {
                expected: self.old_len(),
                actual: s.len(),
                context: "syndrome length vs row map",
            });
        }
        let support = s.support().iter().filter_map(|&i| self.old_to_new[i]).collect();
        Ok(BitVector::from_sorted_unchecked(self.new_len(), support))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(len: usize, s: &[usize]) -> BitVector {
        BitVector::from_support(len, s.to_vec()).unwrap()
    }

    fn h23() -> SparseBinaryMatrix {
        SparseBinaryMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap()
    }

    #[test]
    fn syndrome_examples() {
        let h = h23();
        assert_eq!(h.syndrome(&bv(3, &[0])).unwrap(), bv(2, &[0]));
        assert!(h.syndrome(&BitVector::zeros(3)).unwrap().is_zero());
        assert!(h.syndrome(&BitVector::zeros(4)).is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(SparseBinaryMatrix::identity(4).rank(), 4);
        assert_eq!(SparseBinaryMatrix::zeros(3, 5).rank(), 0);
        assert_eq!(h23().rank(), 2);
    }

    #[test]
    fn in_rowspace_examples() {
        let h = SparseBinaryMatrix::from_dense(&[vec![1, 1]]).unwrap();
        assert!(h.in_rowspace(&BitVector::zeros(2)).unwrap());
        assert!(h.in_rowspace(&bv(2, &[0, 1])).unwrap());
        assert!(!h.in_rowspace(&bv(2, &[0])).unwrap());
        assert!(h.in_rowspace(&bv(3, &[0])).is_err());
    }

    #[test]
    fn delete_rows_examples() {
        let id = SparseBinaryMatrix::identity(3);
        let (same, map) = id.delete_rows(&[]).unwrap();
        assert_eq!(same, id);
        assert_eq!(map, RowMap::identity(3));

        let (empty, _) = id.delete_rows(&[0, 1, 2]).unwrap();
        assert_eq!((empty.rows(), empty.cols()), (0, 3));

        let (two, map) = id.delete_rows(&[0]).unwrap();
        assert_eq!(two.row_supports(), &[vec![1], vec![2]]);
        assert_eq!(map.get(0), None);
        assert_eq!(map.get(2), Some(1));

        assert!(id.delete_rows(&[3]).is_err());
    }

    #[test]
    fn nullspace_examples() {
        assert!(SparseBinaryMatrix::identity(4).nullspace_basis().is_empty());
        assert_eq!(SparseBinaryMatrix::zeros(1, 5).nullspace_basis().len(), 5);
        let h = SparseBinaryMatrix::from_dense(&[vec![1, 1]]).unwrap();
        assert_eq!(h.nullspace_basis(), vec![bv(2, &[0, 1])]);
    }

    #[test]
    fn transpose_and_stack() {
        let h = h23();
        let t = h.transpose();
        assert_eq!(t.to_dense(), vec![vec![1, 0], vec![1, 1], vec![0, 1]]);
        let s = h.hstack(&SparseBinaryMatrix::identity(2)).unwrap();
        assert_eq!(s.to_dense(), vec![vec![1, 1, 0, 1, 0], vec![0, 1, 1, 0, 1]]);
        assert!(h.hstack(&SparseBinaryMatrix::identity(3)).is_err());
    }

    #[test]
    fn mul_transpose_matches_dense() {
        let h = h23();
        let p = h.mul_transpose(&h).unwrap();
        // rows (110),(011): self products 0, cross product 1
        assert_eq!(p.to_dense(), vec![vec![0, 1], vec![1, 0]]);
    }
}
