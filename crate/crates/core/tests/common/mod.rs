//! Exhaustive reference implementations shared by the oracle and acceptance tests.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use qldpc_core::gf2::{BitVector, SparseBinaryMatrix};
use qldpc_core::minsum::{decode, DecoderConfig};
use qldpc_core::tanner::{find_ims, TannerGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random Tanner forest: every new node hangs off one existing node of the
/// other kind, so no cycles can form.
pub fn random_forest(rng: &mut ChaCha8Rng, max_qubits: usize) -> SparseBinaryMatrix {
    let n = rng.gen_range(2..=max_qubits);
    let mut check_rows: Vec<Vec<usize>> = Vec::new();
    let mut qubits = 1;
    while qubits < n {
        if !check_rows.is_empty() && rng.gen_bool(0.5) {
            let c = rng.gen_range(0..check_rows.len());
            check_rows[c].push(qubits);
            qubits += 1;
        } else {
            let q = rng.gen_range(0..qubits);
            check_rows.push(vec![q]);
        }
    }
    if rng.gen_bool(0.3) {
        check_rows.push(vec![rng.gen_range(0..n)]);
    }
    for r in &mut check_rows {
        r.sort_unstable();
    }
    SparseBinaryMatrix::from_rows(check_rows.len(), n, check_rows).unwrap()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64) -> SparseBinaryMatrix {
    let dense: Vec<Vec<u8>> = (0..rows)
        .map(|_| (0..cols).map(|_| u8::from(rng.gen_bool(density))).collect())
        .collect();
    SparseBinaryMatrix::from_dense(&dense).unwrap()
}

pub fn all_vectors(n: usize) -> impl Iterator<Item = BitVector> {
    (0u32..1 << n).map(move |bits| BitVector::from_support(n, (0..n).filter(|i| bits >> i & 1 == 1).collect()).unwrap())
}

/// Minimum-weight preimage of every attainable syndrome, when it is unique.
pub fn unique_ml_table(h: &SparseBinaryMatrix) -> Vec<(BitVector, BitVector)> {
    let mut best: HashMap<Vec<usize>, (usize, usize, BitVector)> = HashMap::new();
    for e in all_vectors(h.cols()) {
        let s = h.syndrome(&e).unwrap().support().to_vec();
        let w = e.weight();
        best.entry(s)
            .and_modify(|entry| {
                if w < entry.0 {
                    *entry = (w, 1, e.clone());
                } else if w == entry.0 {
                    entry.1 += 1;
                }
            })
            .or_insert((w, 1, e.clone()));
    }
    let mut out: Vec<(BitVector, BitVector)> = best
        .into_iter()
        .filter(|(_, (_, count, _))| *count == 1)
        .map(|(s, (_, _, e))| (BitVector::from_support(h.rows(), s).unwrap(), e))
        .collect();
    out.sort_by(|a, b| a.0.support().cmp(b.0.support()));
    out
}

pub fn naive_ims(h: &SparseBinaryMatrix, unsat: &[usize], checks: &[usize]) -> Vec<u32> {
    let dense = h.to_dense();
    checks
        .iter()
        .map(|&c| {
            (0..h.cols())
                .filter(|&q| dense[c][q] == 1)
                .map(|q| unsat.iter().filter(|&&u| dense[u][q] == 1).count() as u32)
                .sum()
        })
        .collect()
}

pub fn naive_span(h: &SparseBinaryMatrix) -> HashSet<Vec<usize>> {
    (0u32..1 << h.rows())
        .map(|mask| {
            let mut acc = BitVector::zeros(h.cols());
            for r in 0..h.rows() {
                if mask >> r & 1 == 1 {
                    acc.xor_assign(&h.row_vector(r)).unwrap();
                }
            }
            acc.support().to_vec()
        })
        .collect()
}

/// Longest shortest path, in edges, of the Tanner graph of `h`.
pub fn tanner_diameter(h: &SparseBinaryMatrix) -> usize {
    let (n, m) = (h.cols(), h.rows());
    let neighbours = |node: usize| -> Vec<usize> {
        if node < n {
            h.col(node).iter().map(|&c| n + c).collect()
        } else {
            h.row(node - n).to_vec()
        }
    };
    let mut best = 0;
    for start in 0..n + m {
        let mut dist = vec![usize::MAX; n + m];
        dist[start] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for v in neighbours(u) {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    best = best.max(dist[v]);
                    queue.push_back(v);
                }
            }
        }
    }
    best
}

/// Min-sum against unique ML over random forests.
#[derive(Debug, Default)]
pub struct MlComparison {
    pub checked: usize,
    pub mismatches: usize,
    /// Mismatches that are heavier syndrome-satisfying estimates returned
    /// before messages could cross the forest.
    pub early_valid_mismatches: usize,
}

pub fn compare_min_sum_with_ml(seed: u64, graphs: usize) -> MlComparison {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = DecoderConfig {
        max_iterations: 50,
        scaling_factor: 1.0,
        channel_error_prob: 0.1,
    };
    let mut out = MlComparison::default();
    for _ in 0..graphs {
        let h = random_forest(&mut rng, 12);
        let crossing = tanner_diameter(&h).div_ceil(2);
        for (s, ml) in unique_ml_table(&h) {
            let got = decode(&h, &s, &cfg).unwrap();
            out.checked += 1;
            if got.converged && got.hard_decision == ml {
                continue;
            }
            out.mismatches += 1;
            if got.converged && got.iterations_used < crossing && got.hard_decision.weight() > ml.weight() {
                out.early_valid_mismatches += 1;
            }
        }
    }
    out
}

/// Counts `(checked, mismatches)` of min-sum against unique ML over random forests.
pub fn min_sum_vs_ml(seed: u64, graphs: usize) -> (usize, usize) {
    let c = compare_min_sum_with_ml(seed, graphs);
    (c.checked, c.mismatches)
}

/// Counts `(checked, mismatches)` of `find_ims` against [`naive_ims`].
pub fn find_ims_vs_naive(seed: u64, instances: usize) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    for _ in 0..instances {
        let rows = rng.gen_range(1..10);
        let cols = rng.gen_range(1..12);
        let h = random_matrix(&mut rng, rows, cols, 0.35);
        let g = TannerGraph::new(&h);
        let unsat: Vec<usize> = (0..rows).filter(|_| rng.gen_bool(0.4)).collect();
        let checks: Vec<usize> = (0..rows).filter(|_| rng.gen_bool(0.6)).collect();
        let table = find_ims(&g, &unsat, &checks).unwrap();
        let got: Vec<u32> = checks.iter().map(|&c| table.check(c).unwrap()).collect();
        if got != naive_ims(&h, &unsat, &checks) {
            bad += 1;
        }
    }
    (instances, bad)
}

/// Counts `(checked, mismatches)` of `in_rowspace` against [`naive_span`].
pub fn in_rowspace_vs_naive(seed: u64, instances: usize) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    for _ in 0..instances {
        let rows = rng.gen_range(1..=8);
        let cols = rng.gen_range(1..=10);
        let h = random_matrix(&mut rng, rows, cols, 0.4);
        let span = naive_span(&h);
        let v = BitVector::from_support(cols, (0..cols).filter(|_| rng.gen_bool(0.5)).collect()).unwrap();
        let member = BitVector::from_support(cols, span.iter().next().unwrap().clone()).unwrap();
        let ok = h.in_rowspace(&v).unwrap() == span.contains(v.support())
            && h.in_rowspace(&member).unwrap()
            && 1usize << h.rank() == span.len();
        if !ok {
            bad += 1;
        }
    }
    (instances, bad)
}
