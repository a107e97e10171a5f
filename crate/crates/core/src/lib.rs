//! Quantum LDPC decoding toolkit: circulant GHP/GB code construction, scaled
//! min-sum belief propagation, Tanner-graph trapping-set analysis and the
//! collaborative check-node-removal (QCCNR) decoder, with a Monte Carlo
//! memory-experiment harness.

pub mod code;
pub mod error;
pub mod gf2;
pub mod minsum;
pub mod qccnr;
pub mod removal;
pub mod seed;
pub mod sim;
pub mod tanner;

pub use error::{Error, Result};
