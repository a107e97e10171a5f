//! MacKay "alist" sparse matrix format.
//!
//! ```text
//! N M                 columns, rows
//! dv_max dc_max
//! <N column weights>
//! <M row weights>
//! <N lines: 1-based row indices of each column>
//! <M lines: 1-based column indices of each row>
//! ```
//! Zero entries used as padding by some writers are skipped on read.

use std::fmt::Write as _;

use super::SparseBinaryMatrix;
use crate::error::{Error, Result};

pub fn write_alist(h: &SparseBinaryMatrix) -> String {
    let mut out = String::new();
    let max_col = h.col_supports().iter().map(Vec::len).max().unwrap_or(0);
    let max_row = h.row_supports().iter().map(Vec::len).max().unwrap_or(0);
    let join = |v: &mut dyn Iterator<Item = usize>| {
        v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    };
    let _ = writeln!(out, "{} {}", h.cols(), h.rows());
    let _ = writeln!(out, "{max_col} {max_row}");
    let _ = writeln!(out, "{}", join(&mut h.col_supports().iter().map(Vec::len)));
    let _ = writeln!(out, "{}", join(&mut h.row_supports().iter().map(Vec::len)));
    for col in h.col_supports() {
        let _ = writeln!(out, "{}", join(&mut col.iter().map(|&i| i + 1)));
    }
    for row in h.row_supports() {
        let _ = writeln!(out, "{}", join(&mut row.iter().map(|&j| j + 1)));
    }
    out
}

pub fn read_alist(text: &str) -> Result<SparseBinaryMatrix> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let mut next_numbers = |what: &str| -> Result<Vec<usize>> {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("alist: missing {what}")))?;
        line.split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("alist: bad number {t:?} in {what}: {e}")))
            })
            .collect()
    };

    let dims = next_numbers("dimensions")?;
    let [cols, rows] = dims[..] else {
        return Err(Error::Parse("alist: first line must hold `N M`".into()));
    };
    let _max_degrees = next_numbers("max degrees")?;
    let col_weights = next_numbers("column weights")?;
    let row_weights = next_numbers("row weights")?;
    if col_weights.len() != cols || row_weights.len() != rows {
        return Err(Error::Parse("alist: weight list length disagrees with dimensions".into()));
    }

    let mut from_cols = vec![Vec::new(); rows];
    for (j, &w) in col_weights.iter().enumerate() {
        let entries: Vec<usize> = if w == 0 {
            Vec::new()
        } else {
            next_numbers("column adjacency")?
        };
        let entries: Vec<usize> = entries.into_iter().filter(|&x| x != 0).collect();
        if entries.len() != w {
            return Err(Error::Parse(format!("alist: column {j} lists {} entries, expected {w}", entries.len())));
        }
        for i in entries {
            if i > rows {
                return Err(Error::IndexOutOfRange { index: i - 1, bound: rows });
            }
            from_cols[i - 1].push(j);
        }
    }

    let mut from_rows = Vec::with_capacity(rows);
    for (i, &w) in row_weights.iter().enumerate() {
        let entries: Vec<usize> = if w == 0 {
            Vec::new()
        } else {
            next_numbers("row adjacency")?
        };
        let mut entries: Vec<usize> = entries.into_iter().filter(|&x| x != 0).map(|x| x - 1).collect();
        if entries.len() != w {
            return Err(Error::Parse(format!("alist: row {i} lists {} entries, expected {w}", entries.len())));
        }
        entries.sort_unstable();
        from_rows.push(entries);
    }

    let h = SparseBinaryMatrix::from_rows(rows, cols, from_rows)?;
    for (i, row) in from_cols.iter().enumerate() {
        if h.row(i) != row.as_slice() {
            return Err(Error::Parse(format!("alist: row {i} disagrees with column lists")));
        }
    }
    Ok(h)
}
