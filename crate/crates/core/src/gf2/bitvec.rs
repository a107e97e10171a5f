use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse GF(2) vector stored as the sorted list of indices holding a one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitVector {
    len: usize,
    support: Vec<usize>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            support: Vec::new(),
        }
    }

    pub fn ones(len: usize) -> Self {
        Self {
            len,
            support: (0..len).collect(),
        }
    }

    /// Builds a vector from an arbitrary list of indices. The indices are
    /// sorted; repeated indices are rejected.
    pub fn from_support(len: usize, mut support: Vec<usize>) -> Result<Self> {
        support.sort_unstable();
        for w in support.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateIndex(w[0]));
            }
        }
        if let Some(&last) = support.last() {
            if last >= len {
                return Err(Error::IndexOutOfRange {
                    index: last,
                    bound: len,
                });
            }
        }
        Ok(Self { len, support })
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self {
            len: bits.len(),
            support: bits
                .iter()
                .enumerate()
                .filter_map(|(i, &b)| b.then_some(i))
                .collect(),
        }
    }

    pub(crate) fn from_sorted_unchecked(len: usize, support: Vec<usize>) -> Self {
        debug_assert!(support.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(support.last().is_none_or(|&i| i < len));
        Self { len, support }
    }

    /// Parses a string of `0`/`1` characters. Whitespace is ignored.
    pub fn parse_bits(text: &str) -> Result<Self> {
        let mut bits = Vec::new();
        for ch in text.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                c if c.is_whitespace() => {}
                c => return Err(Error::Parse(format!("unexpected character {c:?} in bit string"))),
            }
        }
        Ok(Self::from_bools(&bits))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn get(&self, index: usize) -> bool {
        self.support.binary_search(&index).is_ok()
    }

    pub fn to_bools(&self) -> Vec<bool> {
        let mut bits = vec![false; self.len];
        for &i in &self.support {
            bits[i] = true;
        }
        bits
    }

    /// Component-wise sum over GF(2), i.e. symmetric difference of supports.
    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                actual: other.len,
                context: "xor operand length",
            });
        }
        let (a, b) = (&self.support, &other.support);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Ok(BitVector {
            len: self.len,
            support: out,
        })
    }

    pub fn xor_assign(&mut self, other: &BitVector) -> Result<()> {
        *self = self.xor(other)?;
        Ok(())
    }

    pub(crate) fn to_words(&self) -> Vec<u64> {
        let mut words = vec![0u64; self.len.div_ceil(64)];
        for &i in &self.support {
            words[i / 64] |= 1 << (i % 64);
        }
        words
    }

    pub(crate) fn from_words(len: usize, words: &[u64]) -> Self {
        let mut support = Vec::new();
        for (w, &word) in words.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                let idx = w * 64 + b;
                if idx < len {
                    support.push(idx);
                }
                bits &= bits - 1;
            }
        }
        Self { len, support }
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.to_bools() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_support_sorts_and_validates() {
        let v = BitVector::from_support(5, vec![3, 0]).unwrap();
        assert_eq!(v.support(), &[0, 3]);
        assert!(BitVector::from_support(5, vec![5]).is_err());
        assert!(BitVector::from_support(5, vec![1, 1]).is_err());
    }

    #[test]
    fn xor_is_symmetric_difference() {
        let a = BitVector::from_support(8, vec![0, 1, 5]).unwrap();
        let b = BitVector::from_support(8, vec![1, 6]).unwrap();
        assert_eq!(a.xor(&b).unwrap().support(), &[0, 5, 6]);
        assert!(a.xor(&BitVector::zeros(7)).is_err());
    }

    #[test]
    fn bit_string_round_trip() {
        let v = BitVector::parse_bits("0110 01").unwrap();
        assert_eq!(v.len(), 6);
        assert_eq!(v.support(), &[1, 2, 5]);
        assert_eq!(v.to_string(), "011001");
        assert!(BitVector::parse_bits("01x").is_err());
    }

    #[test]
    fn words_round_trip() {
        let v = BitVector::from_support(130, vec![0, 63, 64, 129]).unwrap();
        assert_eq!(BitVector::from_words(130, &v.to_words()), v);
    }
}
