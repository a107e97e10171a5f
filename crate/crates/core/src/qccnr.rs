//! Collaborative decoder: stall-detecting min-sum in main mode, then repeated
//! rounds of QCNR-pruned sub-decoding folded into a cumulative estimate.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitVector, SparseBinaryMatrix};
use crate::minsum::{DecoderConfig, MinSumDecoder};
use crate::removal::{qcnr_on_graph, RemovalConfig};
use crate::seed;
use crate::tanner::TannerGraph;

/// Deselection degree applied to an inclusive range of sub-rounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfPhase {
    pub first_round: usize,
    pub last_round: usize,
    pub df: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QccnrConfig {
    pub max_iter: usize,
    pub max_sub: usize,
    /// Maximum number of sub-decoding rounds.
    pub fr: usize,
    /// Stall tolerance of the main decoder.
    pub tol: usize,
    pub df_schedule: Vec<DfPhase>,
    pub scaling_factor: f64,
    pub channel_error_prob: f64,
    pub rng_seed: u64,
}

impl Default for QccnrConfig {
    fn default() -> Self {
        Self {
            max_iter: 100,
            max_sub: 100,
            fr: 200,
            tol: 11,
            df_schedule: vec![
                DfPhase {
                    first_round: 1,
                    last_round: 100,
                    df: 6,
                },
                DfPhase {
                    first_round: 101,
                    last_round: 200,
                    df: 1,
                },
            ],
            scaling_factor: 0.625,
            channel_error_prob: 0.05,
            rng_seed: 0,
        }
    }
}

impl QccnrConfig {
    /// Phases must be contiguous from round 1 and reach at least `fr`.
    pub fn validate(&self) -> Result<()> {
        if self.tol == 0 {
            return Err(Error::Config("stall tolerance must be at least 1".into()));
        }
        let mut next = 1;
        for phase in &self.df_schedule {
            if phase.first_round != next || phase.last_round < phase.first_round {
                return Err(Error::Config(format!(
                    "df schedule phase {}..={} does not continue from round {next}",
                    phase.first_round, phase.last_round
                )));
            }
            next = phase.last_round + 1;
        }
        if next <= self.fr {
            return Err(Error::Config(format!("df schedule ends before round {}", self.fr)));
        }
        self.main_config().validate()
    }

    pub fn df_for_round(&self, round: usize) -> Option<usize> {
        self.df_schedule
            .iter()
            .find(|p| (p.first_round..=p.last_round).contains(&round))
            .map(|p| p.df)
    }

    /// Replaces the schedule with `df_first` for the first half of `fr` and
    /// `df_second` for the rest.
    pub fn with_split_schedule(mut self, df_first: usize, df_second: usize) -> Self {
        let half = self.fr.div_ceil(2).max(1);
        self.df_schedule = vec![DfPhase {
            first_round: 1,
            last_round: half,
            df: df_first,
        }];
        if self.fr > half {
            self.df_schedule.push(DfPhase {
                first_round: half + 1,
                last_round: self.fr,
                df: df_second,
            });
        }
        self
    }

    fn main_config(&self) -> DecoderConfig {
        DecoderConfig {
            max_iterations: self.max_iter,
            scaling_factor: self.scaling_factor,
            channel_error_prob: self.channel_error_prob,
        }
    }

    fn sub_config(&self) -> DecoderConfig {
        DecoderConfig {
            max_iterations: self.max_sub,
            ..self.main_config()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub deselection_degree: usize,
    pub removed_checks: Vec<usize>,
    pub unsatisfied_before: usize,
    pub unsatisfied_after: usize,
    /// Checks unsatisfied before the round and satisfied after it.
    pub newly_satisfied: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QccnrResult {
    pub estimate: BitVector,
    pub residual_syndrome: BitVector,
    pub success: bool,
    pub main_converged: bool,
    pub main_stalled: bool,
    pub sub_rounds_used: usize,
    /// Min-sum iterations spent across every decoder invocation.
    pub total_iterations: usize,
    pub trace: Vec<RoundRecord>,
}

/// `s + H e`.
pub fn residual(h: &SparseBinaryMatrix, s: &BitVector, estimate: &BitVector) -> Result<BitVector> {
    s.xor(&h.syndrome(estimate)?)
}

/// Reusable decoder for one parity-check matrix.
#[derive(Clone, Debug)]
pub struct QccnrDecoder {
    h: SparseBinaryMatrix,
    graph: TannerGraph,
    main: MinSumDecoder,
}

impl QccnrDecoder {
    pub fn new(h: &SparseBinaryMatrix) -> Self {
        Self {
            h: h.clone(),
            graph: TannerGraph::new(h),
            main: MinSumDecoder::new(h),
        }
    }

    pub fn decode(&self, s: &BitVector, cfg: &QccnrConfig) -> Result<QccnrResult> {
        cfg.validate()?;
        if s.len() != self.h.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.h.rows(),
                actual: s.len(),
                context: "syndrome length vs check count",
            });
        }
        let main_cfg = cfg.main_config();
        let sub_cfg = cfg.sub_config();

        // Without sub rounds there is nothing to hand a stall over to.
        let (main, stalled) = if cfg.fr == 0 {
            (self.main.decode(s, &main_cfg)?, false)
        } else {
            self.main.decode_with_stall(s, &main_cfg, cfg.tol, false)?
        };
        let mut total_iterations = main.iterations_used;
        let mut estimate = main.hard_decision;
        let mut r = residual(&self.h, s, &estimate)?;
        let mut result = QccnrResult {
            estimate: BitVector::zeros(self.h.cols()),
            residual_syndrome: BitVector::zeros(self.h.rows()),
            success: false,
            main_converged: main.converged,
            main_stalled: stalled,
            sub_rounds_used: 0,
            total_iterations: 0,
            trace: Vec::new(),
        };

        for round in 1..=cfg.fr {
            if r.is_zero() {
                break;
            }
            let unsat = r.support().to_vec();
            let df = cfg.df_for_round(round).expect("validated schedule covers every round");
            let removal = qcnr_on_graph(
                &self.h,
                &self.graph,
                &unsat,
                &RemovalConfig::new(df, seed::derive(cfg.rng_seed, round as u64)),
            )?;
            let sub_syndrome = removal.row_map.restrict(&r)?;
            let sub = MinSumDecoder::new(&removal.modified_matrix).decode(&sub_syndrome, &sub_cfg)?;
            total_iterations += sub.iterations_used;
            estimate.xor_assign(&sub.hard_decision)?;
            r = residual(&self.h, s, &estimate)?;

            if !r.is_zero() {
                let (pass, _) = self.main.decode_with_stall(&r, &main_cfg, cfg.tol, false)?;
                total_iterations += pass.iterations_used;
                estimate.xor_assign(&pass.hard_decision)?;
                r = residual(&self.h, s, &estimate)?;
            }

            let before: BTreeSet<usize> = unsat.iter().copied().collect();
            let newly_satisfied = before.iter().filter(|&&c| !r.get(c)).count();
            result.trace.push(RoundRecord {
                round,
                deselection_degree: df,
                removed_checks: removal.removed_checks,
                unsatisfied_before: unsat.len(),
                unsatisfied_after: r.weight(),
                newly_satisfied,
            });
            result.sub_rounds_used = round;
        }

        result.success = r.is_zero();
        result.estimate = estimate;
        result.residual_syndrome = r;
        result.total_iterations = total_iterations;
        Ok(result)
    }
}

pub fn qccnr_decode(h: &SparseBinaryMatrix, s: &BitVector, cfg: &QccnrConfig) -> Result<QccnrResult> {
    QccnrDecoder::new(h).decode(s, cfg)
}
