//! CSS codes from rings of circulants: generalized hypergraph product (GHP)
//! and generalized bicycle (GB) templates.

mod config;
mod ring;

pub use config::{CodeDefinition, CodeTemplate, PolyOrMatrix};
pub use ring::{Protograph, RingElement};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitVector, SparseBinaryMatrix};

/// Which Pauli component an error or check refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// X-type errors, detected by `h_z`.
    X,
    /// Z-type errors, detected by `h_x`.
    Z,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CssCode {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub h_x: SparseBinaryMatrix,
    pub h_z: SparseBinaryMatrix,
    pub logical_x: Vec<BitVector>,
    pub logical_z: Vec<BitVector>,
}

impl CssCode {
    /// Validates commutation, computes `k` and extracts logical operators.
    pub fn new(name: impl Into<String>, h_x: SparseBinaryMatrix, h_z: SparseBinaryMatrix) -> Result<Self> {
        if h_x.cols() != h_z.cols() {
            return Err(Error::InvalidCode(format!(
                "H_X has {} columns but H_Z has {}",
                h_x.cols(),
                h_z.cols()
            )));
        }
        let product = h_x.mul_transpose(&h_z)?;
        if product.nnz() != 0 {
            return Err(Error::CssViolation(product.nnz()));
        }
        let n = h_x.cols();
        let k = n - h_x.rank() - h_z.rank();
        let (logical_x, logical_z) = logical_operators(&h_x, &h_z);
        debug_assert_eq!(logical_x.len(), k);
        Ok(Self {
            name: name.into(),
            n,
            k,
            h_x,
            h_z,
            logical_x,
            logical_z,
        })
    }

    /// Check matrix that detects errors of the given side.
    pub fn check_matrix(&self, side: Side) -> &SparseBinaryMatrix {
        match side {
            Side::X => &self.h_z,
            Side::Z => &self.h_x,
        }
    }

    /// Stabilizers of the same Pauli type as errors of the given side.
    pub fn stabilizer_matrix(&self, side: Side) -> &SparseBinaryMatrix {
        match side {
            Side::X => &self.h_x,
            Side::Z => &self.h_z,
        }
    }

    pub fn logicals(&self, side: Side) -> &[BitVector] {
        match side {
            Side::X => &self.logical_x,
            Side::Z => &self.logical_z,
        }
    }
}

/// `H_X = [A | b I_m]`, `H_Z = [b^T I_n | A^T]` for square `A`.
pub fn build_ghp(name: impl Into<String>, a: &Protograph, b: &RingElement) -> Result<CssCode> {
    if a.rows() != a.cols() {
        return Err(Error::InvalidCode(format!(
            "GHP protograph must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if a.lift() != b.lift() {
        return Err(Error::LiftMismatch(a.lift(), b.lift()));
    }
    let m = a.rows();
    let b_diag = Protograph::diagonal(b, m).lift_to_binary();
    let bt_diag = Protograph::diagonal(&b.transpose(), m).lift_to_binary();
    let h_x = a.lift_to_binary().hstack(&b_diag)?;
    let h_z = bt_diag.hstack(&a.transpose().lift_to_binary())?;
    CssCode::new(name, h_x, h_z)
}

/// `H_X = [A | B]`, `H_Z = [B^T | A^T]`.
pub fn build_gb(name: impl Into<String>, a: &Protograph, b: &Protograph) -> Result<CssCode> {
    if a.lift() != b.lift() {
        return Err(Error::LiftMismatch(a.lift(), b.lift()));
    }
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) || a.rows() != a.cols() {
        return Err(Error::InvalidCode(format!(
            "GB protographs must be square and of equal shape, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let h_x = a.lift_to_binary().hstack(&b.lift_to_binary())?;
    let h_z = b.transpose().lift_to_binary().hstack(&a.transpose().lift_to_binary())?;
    CssCode::new(name, h_x, h_z)
}

/// Bases of `ker(h_z) / rowspace(h_x)` and `ker(h_x) / rowspace(h_z)`.
///
/// Each returned X-logical has zero `h_z` syndrome and the set is independent
/// modulo the X stabilizers; likewise for Z.
pub fn logical_operators(h_x: &SparseBinaryMatrix, h_z: &SparseBinaryMatrix) -> (Vec<BitVector>, Vec<BitVector>) {
    (quotient_basis(h_z, h_x), quotient_basis(h_x, h_z))
}

fn quotient_basis(kernel_of: &SparseBinaryMatrix, modulo: &SparseBinaryMatrix) -> Vec<BitVector> {
    let mut span = modulo.row_space();
    let mut out = Vec::new();
    for v in kernel_of.nullspace_basis() {
        let rem = span.reduce(&v);
        if !rem.is_zero() {
            span.insert(&rem);
            out.push(rem);
        }
    }
    out
}

/// Protograph `A` of the built-in `[[882,24]]` GHP code (lift 63).
pub fn ghp_882_protograph() -> Protograph {
    const L: usize = 63;
    let mut cells = vec![vec![Vec::new(); 7]; 7];
    for (i, row) in cells.iter_mut().enumerate() {
        row[i] = vec![27];
        row[(i + 6) % 7] = vec![54];
        row[(i + 5) % 7] = vec![0];
    }
    Protograph::from_exponents(L, &cells).expect("static protograph is well formed")
}

/// `1 + x + x^6` over lift 63.
pub fn ghp_882_b() -> RingElement {
    RingElement::new(63, [0, 1, 6]).expect("lift is positive")
}

pub fn ghp_882_24() -> CssCode {
    build_ghp(GHP_882_NAME, &ghp_882_protograph(), &ghp_882_b()).expect("built-in code is a valid CSS code")
}

pub const GHP_882_NAME: &str = "ghp-882-24";

/// Looks up a built-in code by name.
pub fn builtin(name: &str) -> Option<CssCode> {
    match name {
        GHP_882_NAME => Some(ghp_882_24()),
        _ => None,
    }
}
