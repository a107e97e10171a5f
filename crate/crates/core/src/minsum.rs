//! Syndrome-based scaled min-sum belief propagation (flooding schedule).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitVector, SparseBinaryMatrix};

/// Cap on message magnitudes; only reached through degree-one checks, whose
/// min over an empty neighbour set is otherwise unbounded.
const MAX_MESSAGE: f64 = 1.0e4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub max_iterations: usize,
    pub scaling_factor: f64,
    pub channel_error_prob: f64,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            scaling_factor: 0.625,
            channel_error_prob: 0.05,
        }
    }
}

impl DecoderConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.scaling_factor > 0.0 && self.scaling_factor <= 1.0) {
            return Err(Error::Config(format!(
                "scaling factor must lie in (0, 1], got {}",
                self.scaling_factor
            )));
        }
        if !(self.channel_error_prob > 0.0 && self.channel_error_prob < 1.0) {
            return Err(Error::Config(format!(
                "channel error probability must lie in (0, 1), got {}",
                self.channel_error_prob
            )));
        }
        Ok(())
    }

    /// Channel log-likelihood ratio `log((1 - p) / p)`.
    pub fn channel_llr(&self) -> f64 {
        ((1.0 - self.channel_error_prob) / self.channel_error_prob).ln()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeOutcome {
    pub hard_decision: BitVector,
    pub soft_outputs: Vec<f64>,
    pub converged: bool,
    pub iterations_used: usize,
    /// Predicted syndrome `H ê^T` after each iteration, when tracing.
    pub per_iteration_syndrome: Option<Vec<BitVector>>,
    /// Hard decision after each iteration, when tracing.
    pub per_iteration_estimate: Option<Vec<BitVector>>,
}

/// Min-sum decoder bound to one parity-check matrix. Holds only the edge
/// layout; every decode call allocates its own message buffers, so one
/// decoder can be shared across threads.
#[derive(Clone, Debug)]
pub struct MinSumDecoder {
    checks: usize,
    qubits: usize,
    // edges grouped by check: check j owns edges check_ptr[j]..check_ptr[j+1]
    check_ptr: Vec<usize>,
    edge_qubit: Vec<usize>,
    // edge ids grouped by qubit
    qubit_ptr: Vec<usize>,
    qubit_edges: Vec<usize>,
}

/// Per-iteration view handed to observers.
struct IterationState<'a> {
    iteration: usize,
    predicted: &'a [bool],
}

impl MinSumDecoder {
    pub fn new(h: &SparseBinaryMatrix) -> Self {
        let mut check_ptr = Vec::with_capacity(h.rows() + 1);
        let mut edge_qubit = Vec::with_capacity(h.nnz());
        check_ptr.push(0);
        for j in 0..h.rows() {
            edge_qubit.extend_from_slice(h.row(j));
            check_ptr.push(edge_qubit.len());
        }
        let mut per_qubit = vec![Vec::new(); h.cols()];
        for (e, &q) in edge_qubit.iter().enumerate() {
            per_qubit[q].push(e);
        }
        let mut qubit_ptr = Vec::with_capacity(h.cols() + 1);
        let mut qubit_edges = Vec::with_capacity(edge_qubit.len());
        qubit_ptr.push(0);
        for edges in per_qubit {
            qubit_edges.extend(edges);
            qubit_ptr.push(qubit_edges.len());
        }
        Self {
            checks: h.rows(),
            qubits: h.cols(),
            check_ptr,
            edge_qubit,
            qubit_ptr,
            qubit_edges,
        }
    }

    pub fn checks(&self) -> usize {
        self.checks
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn decode(&self, syndrome: &BitVector, cfg: &DecoderConfig) -> Result<DecodeOutcome> {
        self.run(syndrome, cfg, false, |_| false)
    }

    /// Like [`decode`](Self::decode) but records the predicted syndrome and
    /// hard decision of every iteration.
    pub fn decode_traced(&self, syndrome: &BitVector, cfg: &DecoderConfig) -> Result<DecodeOutcome> {
        self.run(syndrome, cfg, true, |_| false)
    }

    /// Decodes while watching the predicted syndrome. A counter increments
    /// whenever the prediction equals the one from the previous iteration or
    /// the one before it (catching fixed points and period-2 oscillation) and
    /// resets otherwise; decoding stops as stalled when it reaches `tol`.
    pub fn decode_with_stall(
        &self,
        syndrome: &BitVector,
        cfg: &DecoderConfig,
        tol: usize,
        trace: bool,
    ) -> Result<(DecodeOutcome, bool)> {
        if tol == 0 {
            return Err(Error::Config("stall tolerance must be at least 1".into()));
        }
        let mut prev1: Option<Vec<bool>> = None;
        let mut prev2: Option<Vec<bool>> = None;
        let mut unchanged = 0;
        let mut stalled = false;
        let outcome = self.run(syndrome, cfg, trace, |state| {
            let same = prev1.as_deref() == Some(state.predicted) || prev2.as_deref() == Some(state.predicted);
            if same {
                unchanged += 1;
            } else {
                unchanged = 0;
            }
            prev2 = prev1.take();
            prev1 = Some(state.predicted.to_vec());
            debug_assert!(state.iteration >= 1);
            stalled = unchanged >= tol;
            stalled
        })?;
        let stalled = stalled && !outcome.converged;
        Ok((outcome, stalled))
    }

    /// Core loop. `stop` is consulted after each non-converged iteration.
    fn run(
        &self,
        syndrome: &BitVector,
        cfg: &DecoderConfig,
        trace: bool,
        mut stop: impl FnMut(&IterationState<'_>) -> bool,
    ) -> Result<DecodeOutcome> {
        if syndrome.len() != self.checks {
            return Err(Error::DimensionMismatch {
                expected: self.checks,
                actual: syndrome.len(),
                context: "syndrome length vs check count",
            });
        }
        cfg.validate()?;
        let target = syndrome.to_bools();
        let llr = cfg.channel_llr();
        let alpha = cfg.scaling_factor;
        let edges = self.edge_qubit.len();

        let mut v2c = vec![llr; edges];
        let mut c2v = vec![0.0f64; edges];
        let mut gamma = vec![llr; self.qubits];
        let mut hard = vec![false; self.qubits];
        let mut predicted = vec![false; self.checks];
        let mut syndrome_trace = trace.then(Vec::new);
        let mut estimate_trace = trace.then(Vec::new);
        let mut converged = false;
        let mut iterations = 0;

        for iteration in 1..=cfg.max_iterations {
            iterations = iteration;

            for j in 0..self.checks {
                let range = self.check_ptr[j]..self.check_ptr[j + 1];
                let mut min1 = f64::INFINITY;
                let mut min2 = f64::INFINITY;
                let mut argmin = usize::MAX;
                let mut negative = target[j];
                for e in range.clone() {
                    let m = v2c[e];
                    let a = m.abs();
                    if m < 0.0 {
                        negative = !negative;
                    }
                    if a < min1 {
                        min2 = min1;
                        min1 = a;
                        argmin = e;
                    } else if a < min2 {
                        min2 = a;
                    }
                }
                for e in range {
                    // remove this edge's own sign from the product
                    let neg = negative ^ (v2c[e] < 0.0);
                    let min_other = if e == argmin { min2 } else { min1 };
                    let mag = alpha * min_other.min(MAX_MESSAGE);
                    c2v[e] = if neg { -mag } else { mag };
                }
            }

            for q in 0..self.qubits {
                let incident = &self.qubit_edges[self.qubit_ptr[q]..self.qubit_ptr[q + 1]];
                let total: f64 = llr + incident.iter().map(|&e| c2v[e]).sum::<f64>();
                gamma[q] = total;
                hard[q] = total < 0.0;
                for &e in incident {
                    let others: f64 = incident.iter().filter(|&&o| o != e).map(|&o| c2v[o]).sum();
                    v2c[e] = llr + others;
                }
            }

            let mut matches = true;
            for j in 0..self.checks {
                let mut parity = false;
                for e in self.check_ptr[j]..self.check_ptr[j + 1] {
                    parity ^= hard[self.edge_qubit[e]];
                }
                predicted[j] = parity;
                matches &= parity == target[j];
            }

            if let Some(t) = syndrome_trace.as_mut() {
                t.push(BitVector::from_bools(&predicted));
            }
            if let Some(t) = estimate_trace.as_mut() {
                t.push(BitVector::from_bools(&hard));
            }
            if matches {
                converged = true;
                break;
            }
            let state = IterationState {
                iteration,
                predicted: &predicted,
            };
            if stop(&state) {
                break;
            }
        }

        Ok(DecodeOutcome {
            hard_decision: BitVector::from_bools(&hard),
            soft_outputs: gamma,
            converged,
            iterations_used: iterations,
            per_iteration_syndrome: syndrome_trace,
            per_iteration_estimate: estimate_trace,
        })
    }
}

pub fn decode(h: &SparseBinaryMatrix, syndrome: &BitVector, cfg: &DecoderConfig) -> Result<DecodeOutcome> {
    MinSumDecoder::new(h).decode(syndrome, cfg)
}

pub fn decode_traced_stall(
    h: &SparseBinaryMatrix,
    syndrome: &BitVector,
    cfg: &DecoderConfig,
    tol: usize,
) -> Result<(DecodeOutcome, bool)> {
    MinSumDecoder::new(h).decode_with_stall(syndrome, cfg, tol, true)
}
