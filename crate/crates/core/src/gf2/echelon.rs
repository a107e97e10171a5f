//! Bit-packed elimination over GF(2).
//!
//! Matrices handled here are at most a few thousand columns wide, so rows are
//! densified into `u64` words and eliminated directly.

use super::BitVector;

#[inline]
fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

#[inline]
fn lowest_set_bit(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
}

/// Incrementally built basis of a row space, indexed by pivot column.
///
/// Every stored row has its lowest set bit at its pivot, so reducing a vector
/// by repeatedly cancelling its lowest set bit only touches higher columns and
/// always terminates.
#[derive(Clone, Debug)]
pub struct RowSpace {
    cols: usize,
    by_pivot: Vec<Option<Box<[u64]>>>,
    rank: usize,
}

impl RowSpace {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            by_pivot: vec![None; cols],
            rank: 0,
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Cancels leading pivots until the lowest set bit is a free column (or
    /// the vector vanishes). The result stays in the same coset of the span.
    pub(crate) fn reduce_words(&self, words: &mut [u64]) {
        while let Some(p) = lowest_set_bit(words) {
            match &self.by_pivot[p] {
                Some(row) => xor_into(words, row),
                None => return,
            }
        }
    }

    /// Reduces `v` against the basis. The remainder is zero iff `v` lies in
    /// the span, and `v + remainder` always does.
    pub fn reduce(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.len(), self.cols, "vector length must match basis width");
        let mut words = v.to_words();
        self.reduce_words(&mut words);
        BitVector::from_words(self.cols, &words)
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        assert_eq!(v.len(), self.cols, "vector length must match basis width");
        let mut words = v.to_words();
        self.reduce_words(&mut words);
        words.iter().all(|&w| w == 0)
    }

    /// Adds `v` to the basis; returns `false` if it was already in the span.
    pub fn insert(&mut self, v: &BitVector) -> bool {
        let mut words = v.to_words();
        self.insert_words(&mut words)
    }

    pub(crate) fn insert_words(&mut self, words: &mut [u64]) -> bool {
        while let Some(p) = lowest_set_bit(words) {
            match &self.by_pivot[p] {
                Some(row) => xor_into(words, row),
                None => {
                    self.by_pivot[p] = Some(words.to_vec().into_boxed_slice());
                    self.rank += 1;
                    return true;
                }
            }
        }
        false
    }
}

/// Reduced row echelon form of a dense row set. Returns the pivot column of
/// each nonzero row, in order; `rows` is rewritten in place and truncated to
/// the nonzero rows.
pub(crate) fn rref(rows: &mut Vec<Vec<u64>>, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let (w, b) = (c / 64, 1u64 << (c % 64));
        let Some(found) = (r..rows.len()).find(|&i| rows[i][w] & b != 0) else {
            continue;
        };
        rows.swap(r, found);
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[w] & b != 0 {
                xor_into(row, &pivot_row);
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}
