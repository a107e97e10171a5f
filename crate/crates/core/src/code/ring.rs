use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::SparseBinaryMatrix;

/// Polynomial over GF(2) modulo `x^L - 1`; equivalently a sum of `L x L`
/// circulant permutation matrices. An empty exponent set is the zero element,
/// `{0}` is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingElement {
    lift: usize,
    exponents: BTreeSet<usize>,
}

impl RingElement {
    /// Collects the given monomials, reducing mod `lift`. Repeated monomials
    /// cancel in pairs, as GF(2) coefficients do.
    pub fn new(lift: usize, exponents: impl IntoIterator<Item = usize>) -> Result<Self> {
        if lift == 0 {
            return Err(Error::InvalidCode("lift must be positive".into()));
        }
        let mut set = BTreeSet::new();
        for e in exponents {
            let e = e % lift;
            if !set.remove(&e) {
                set.insert(e);
            }
        }
        Ok(Self { lift, exponents: set })
    }

    pub fn zero(lift: usize) -> Self {
        Self {
            lift,
            exponents: BTreeSet::new(),
        }
    }

    pub fn one(lift: usize) -> Self {
        Self::monomial(lift, 0)
    }

    pub fn monomial(lift: usize, power: usize) -> Self {
        Self {
            lift,
            exponents: BTreeSet::from([power % lift]),
        }
    }

    pub fn lift(&self) -> usize {
        self.lift
    }

    pub fn exponents(&self) -> impl Iterator<Item = usize> + '_ {
        self.exponents.iter().copied()
    }

    pub fn weight(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_zero(&self) -> bool {
        self.exponents.is_empty()
    }

    fn check_lift(&self, other: &Self) -> Result<()> {
        if self.lift != other.lift {
            return Err(Error::LiftMismatch(self.lift, other.lift));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_lift(other)?;
        Ok(Self {
            lift: self.lift,
            exponents: self.exponents.symmetric_difference(&other.exponents).copied().collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_lift(other)?;
        let mut acc = BTreeSet::new();
        for a in &self.exponents {
            for b in &other.exponents {
                let e = (a + b) % self.lift;
                if !acc.remove(&e) {
                    acc.insert(e);
                }
            }
        }
        Ok(Self {
            lift: self.lift,
            exponents: acc,
        })
    }

    /// Transpose of the circulant: `x^i -> x^(L-i)`.
    pub fn transpose(&self) -> Self {
        Self {
            lift: self.lift,
            exponents: self.exponents.iter().map(|&i| (self.lift - i) % self.lift).collect(),
        }
    }

    /// Expands to the `L x L` binary circulant. Row `r` of `x^i` has its one in
    /// column `(r + i) mod L`.
    pub fn to_binary(&self) -> SparseBinaryMatrix {
        let rows = (0..self.lift)
            .map(|r| {
                let mut row: Vec<usize> = self.exponents.iter().map(|&e| (r + e) % self.lift).collect();
                row.sort_unstable();
                row
            })
            .collect();
        SparseBinaryMatrix::from_rows_unchecked(self.lift, self.lift, rows)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .exponents
            .iter()
            .map(|&e| match e {
                0 => "1".to_string(),
                1 => "x".to_string(),
                e => format!("x^{e}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

/// Dense matrix of ring elements sharing one lift.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Protograph {
    rows: usize,
    cols: usize,
    lift: usize,
    entries: Vec<RingElement>,
}

impl Protograph {
    pub fn new(rows: usize, cols: usize, entries: Vec<RingElement>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: entries.len(),
                context: "protograph entry count",
            });
        }
        let lift = entries
            .first()
            .map(RingElement::lift)
            .ok_or_else(|| Error::InvalidCode("protograph must have at least one entry".into()))?;
        if let Some(bad) = entries.iter().find(|e| e.lift() != lift) {
            return Err(Error::LiftMismatch(lift, bad.lift()));
        }
        Ok(Self {
            rows,
            cols,
            lift,
            entries,
        })
    }

    /// Builds a protograph from per-cell exponent lists.
    pub fn from_exponents(lift: usize, cells: &[Vec<Vec<usize>>]) -> Result<Self> {
        let rows = cells.len();
        let cols = cells.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows * cols);
        for row in cells {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    actual: row.len(),
                    context: "protograph row width",
                });
            }
            for cell in row {
                entries.push(RingElement::new(lift, cell.iter().copied())?);
            }
        }
        Self::new(rows, cols, entries)
    }

    pub fn scalar(element: RingElement) -> Self {
        Self {
            rows: 1,
            cols: 1,
            lift: element.lift(),
            entries: vec![element],
        }
    }

    /// `element` on the diagonal of an `n x n` protograph.
    pub fn diagonal(element: &RingElement, n: usize) -> Self {
        let entries = (0..n * n)
            .map(|k| {
                if k / n == k % n {
                    element.clone()
                } else {
                    RingElement::zero(element.lift())
                }
            })
            .collect();
        Self {
            rows: n,
            cols: n,
            lift: element.lift(),
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn lift(&self) -> usize {
        self.lift
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElement {
        &self.entries[i * self.cols + j]
    }

    /// Matrix transpose with every entry transposed as a circulant.
    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).transpose());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            lift: self.lift,
            entries,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.lift != other.lift {
            return Err(Error::LiftMismatch(self.lift, other.lift));
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: other.rows,
                context: "protograph product inner dimension",
            });
        }
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = RingElement::zero(self.lift);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j))?)?;
                }
                entries.push(acc);
            }
        }
        Self::new(self.rows, other.cols, entries)
    }

    /// Binary matrix of size `(rows*L) x (cols*L)`.
    pub fn lift_to_binary(&self) -> SparseBinaryMatrix {
        let l = self.lift;
        let mut rows = vec![Vec::new(); self.rows * l];
        for i in 0..self.rows {
            for j in 0..self.cols {
                for e in self.get(i, j).exponents() {
                    for r in 0..l {
                        rows[i * l + r].push(j * l + (r + e) % l);
                    }
                }
            }
        }
        for row in &mut rows {
            row.sort_unstable();
        }
        SparseBinaryMatrix::from_rows_unchecked(self.rows * l, self.cols * l, rows)
    }

    /// Exponent lists per cell, the inverse of [`Protograph::from_exponents`].
    pub fn to_exponents(&self) -> Vec<Vec<Vec<usize>>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).exponents().collect()).collect())
            .collect()
    }
}
