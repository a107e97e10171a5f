//! TOML code definition files.
//!
//! ```toml
//! name = "ghp-882-24"
//! template = "ghp"
//! lift = 63
//! rows = 7
//! cols = 7
//! a = [[[27], [], [], [], [], [0], [54]], ...]   # exponent list per cell
//! b = [0, 1, 6]                                  # ghp: one ring element
//! ```
//! For `template = "gb"`, `b` is a protograph of the same shape as `a`
//! (a bare exponent list is accepted as a 1x1 protograph).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{build_gb, build_ghp, CssCode, Protograph, RingElement};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeTemplate {
    Ghp,
    Gb,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolyOrMatrix {
    Poly(Vec<usize>),
    Matrix(Vec<Vec<Vec<usize>>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeDefinition {
    pub name: String,
    pub template: CodeTemplate,
    pub lift: usize,
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<Vec<Vec<usize>>>,
    pub b: PolyOrMatrix,
}

impl CodeDefinition {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("code definition serializes")
    }

    fn protograph(&self, cells: &[Vec<Vec<usize>>], what: &str) -> Result<Protograph> {
        if cells.len() != self.rows || cells.iter().any(|r| r.len() != self.cols) {
            return Err(Error::Config(format!(
                "{what}: expected {}x{} cells",
                self.rows, self.cols
            )));
        }
        check_exponents(cells.iter().flatten().flatten(), self.lift, what)?;
        Protograph::from_exponents(self.lift, cells)
    }

    pub fn build(&self) -> Result<CssCode> {
        let a = self.protograph(&self.a, "a")?;
        match (self.template, &self.b) {
            (CodeTemplate::Ghp, PolyOrMatrix::Poly(b)) => {
                check_exponents(b.iter(), self.lift, "b")?;
                build_ghp(&self.name, &a, &RingElement::new(self.lift, b.iter().copied())?)
            }
            (CodeTemplate::Ghp, PolyOrMatrix::Matrix(_)) => {
                Err(Error::Config("ghp template takes a single polynomial for b".into()))
            }
            (CodeTemplate::Gb, PolyOrMatrix::Poly(b)) => {
                check_exponents(b.iter(), self.lift, "b")?;
                let b = Protograph::scalar(RingElement::new(self.lift, b.iter().copied())?);
                build_gb(&self.name, &a, &b)
            }
            (CodeTemplate::Gb, PolyOrMatrix::Matrix(cells)) => {
                let b = self.protograph(cells, "b")?;
                build_gb(&self.name, &a, &b)
            }
        }
    }

    /// Definition of the built-in `[[882,24]]` code.
    pub fn ghp_882_24() -> Self {
        Self {
            name: super::GHP_882_NAME.into(),
            template: CodeTemplate::Ghp,
            lift: 63,
            rows: 7,
            cols: 7,
            a: super::ghp_882_protograph().to_exponents(),
            b: PolyOrMatrix::Poly(vec![0, 1, 6]),
        }
    }
}

/// Exponents at or above the lift signal a config mixing rings of different lifts.
fn check_exponents<'a>(exps: impl Iterator<Item = &'a usize>, lift: usize, what: &str) -> Result<()> {
    for &e in exps {
        if e >= lift {
            return Err(Error::Config(format!("{what}: exponent {e} not below lift {lift}")));
        }
    }
    Ok(())
}
