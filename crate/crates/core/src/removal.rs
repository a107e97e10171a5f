//! Probabilistic stabilizer-check deselection (CNR and the IM-filtered QCNR).

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{RowMap, SparseBinaryMatrix};
use crate::tanner::{find_ims, leaf_checks, TannerGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalConfig {
    /// `df`: how many candidate checks to delete.
    pub deselection_degree: usize,
    /// Computation-tree level the candidates come from. Only level 1 is supported.
    pub tree_level: usize,
    pub rng_seed: u64,
}

impl RemovalConfig {
    pub fn new(deselection_degree: usize, rng_seed: u64) -> Self {
        Self {
            deselection_degree,
            tree_level: 1,
            rng_seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.tree_level != 1 {
            return Err(Error::Config(format!(
                "check removal only supports tree level 1, got {}",
                self.tree_level
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalOutcome {
    pub modified_matrix: SparseBinaryMatrix,
    /// Original row indices, sorted.
    pub removed_checks: Vec<usize>,
    pub row_map: RowMap,
    /// Candidate set the removal was sampled from, sorted.
    pub sample_space: Vec<usize>,
}

/// Samples `df` of the leaf checks under every unsatisfied root and deletes them.
pub fn cnr(h: &SparseBinaryMatrix, unsat: &[usize], cfg: &RemovalConfig) -> Result<RemovalOutcome> {
    cnr_on_graph(h, &TannerGraph::new(h), unsat, cfg)
}

/// As [`cnr`], keeping only each root's maximum-IM leaves (all ties).
pub fn qcnr(h: &SparseBinaryMatrix, unsat: &[usize], cfg: &RemovalConfig) -> Result<RemovalOutcome> {
    qcnr_on_graph(h, &TannerGraph::new(h), unsat, cfg)
}

/// [`cnr`] with a prebuilt Tanner graph of `h`.
pub fn cnr_on_graph(
    h: &SparseBinaryMatrix,
    g: &TannerGraph,
    unsat: &[usize],
    cfg: &RemovalConfig,
) -> Result<RemovalOutcome> {
    cfg.validate()?;
    let mut rem = BTreeSet::new();
    for &root in unsat {
        rem.extend(leaf_checks(g, root)?);
    }
    remove_sampled(h, rem.into_iter().collect(), cfg)
}

/// [`qcnr`] with a prebuilt Tanner graph of `h`.
pub fn qcnr_on_graph(
    h: &SparseBinaryMatrix,
    g: &TannerGraph,
    unsat: &[usize],
    cfg: &RemovalConfig,
) -> Result<RemovalOutcome> {
    cfg.validate()?;
    let mut rem = BTreeSet::new();
    for &root in unsat {
        let leaves = leaf_checks(g, root)?;
        rem.extend(find_ims(g, unsat, &leaves)?.argmax());
    }
    remove_sampled(h, rem.into_iter().collect(), cfg)
}

fn remove_sampled(h: &SparseBinaryMatrix, rem: Vec<usize>, cfg: &RemovalConfig) -> Result<RemovalOutcome> {
    let amount = cfg.deselection_degree.min(rem.len());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut removed: Vec<usize> = sample(&mut rng, rem.len(), amount).into_iter().map(|i| rem[i]).collect();
    removed.sort_unstable();
    let (modified_matrix, row_map) = h.delete_rows(&removed)?;
    Ok(RemovalOutcome {
        modified_matrix,
        removed_checks: removed,
        row_map,
        sample_space: rem,
    })
}
