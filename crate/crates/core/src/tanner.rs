//! Tanner-graph analysis: computation trees, trapping-set fixtures, qubit
//! separation, separation-limiting checks and information measurement (IM).

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::SparseBinaryMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TannerGraph {
    qubit_neighbors: Vec<Vec<usize>>,
    check_neighbors: Vec<Vec<usize>>,
    max_qubit_degree: usize,
    max_check_degree: usize,
}

impl TannerGraph {
    pub fn new(h: &SparseBinaryMatrix) -> Self {
        let qubit_neighbors = h.col_supports().to_vec();
        let check_neighbors = h.row_supports().to_vec();
        Self {
            max_qubit_degree: qubit_neighbors.iter().map(Vec::len).max().unwrap_or(0),
            max_check_degree: check_neighbors.iter().map(Vec::len).max().unwrap_or(0),
            qubit_neighbors,
            check_neighbors,
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_neighbors.len()
    }

    pub fn check_count(&self) -> usize {
        self.check_neighbors.len()
    }

    /// `N(v)`, sorted.
    pub fn qubit_neighbors(&self, q: usize) -> &[usize] {
        &self.qubit_neighbors[q]
    }

    /// `N(c)`, sorted.
    pub fn check_neighbors(&self, c: usize) -> &[usize] {
        &self.check_neighbors[c]
    }

    pub fn d_v(&self) -> usize {
        self.max_qubit_degree
    }

    pub fn d_c(&self) -> usize {
        self.max_check_degree
    }

    fn neighbors(&self, node: Node) -> &[usize] {
        match node.kind {
            NodeKind::Qubit => &self.qubit_neighbors[node.id],
            NodeKind::Check => &self.check_neighbors[node.id],
        }
    }

    fn check_node(&self, node: Node) -> Result<()> {
        let bound = match node.kind {
            NodeKind::Qubit => self.qubit_count(),
            NodeKind::Check => self.check_count(),
        };
        if node.id >= bound {
            return Err(Error::IndexOutOfRange { index: node.id, bound });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Qubit,
    Check,
}

impl NodeKind {
    fn other(self) -> Self {
        match self {
            NodeKind::Qubit => NodeKind::Check,
            NodeKind::Check => NodeKind::Qubit,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Node {
    pub kind: NodeKind,
    pub id: usize,
}

impl Node {
    pub fn qubit(id: usize) -> Self {
        Self {
            kind: NodeKind::Qubit,
            id,
        }
    }

    pub fn check(id: usize) -> Self {
        Self {
            kind: NodeKind::Check,
            id,
        }
    }
}

/// One position in a computation tree. The same graph node may occupy many
/// positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub node: Node,
    pub parent: Option<usize>,
    /// Edge distance from the root.
    pub depth: usize,
}

/// Unrolled message-passing tree. Level `t` holds the nodes at edge depth
/// `2t - 1` and `2t`, i.e. what one more complete iteration adds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComputationTree {
    pub root: Node,
    pub depth: usize,
    pub nodes: Vec<TreeNode>,
    /// Indices into `nodes`, one list per level (index 0 is the root).
    pub levels: Vec<Vec<usize>>,
}

impl ComputationTree {
    pub fn children(&self, index: usize) -> impl Iterator<Item = usize> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(move |(_, n)| n.parent == Some(index))
            .map(|(i, _)| i)
    }

    /// Graph nodes at the given level, in tree order.
    pub fn level_nodes(&self, level: usize) -> Vec<Node> {
        self.levels
            .get(level)
            .map(|l| l.iter().map(|&i| self.nodes[i].node).collect())
            .unwrap_or_default()
    }
}

/// Builds `T_K(root)`: each child list excludes the edge back to the parent.
pub fn build_ct(g: &TannerGraph, root: Node, levels: usize) -> Result<ComputationTree> {
    if levels == 0 {
        return Err(Error::Config("computation tree needs at least one level".into()));
    }
    g.check_node(root)?;
    let mut nodes = vec![TreeNode {
        node: root,
        parent: None,
        depth: 0,
    }];
    let mut level_index = vec![vec![0]];
    let mut frontier = vec![0usize];
    for depth in 1..=2 * levels {
        let mut next = Vec::new();
        for &idx in &frontier {
            let here = nodes[idx].node;
            let parent_node = nodes[idx].parent.map(|p| nodes[p].node);
            for &nb in g.neighbors(here) {
                let child = Node {
                    kind: here.kind.other(),
                    id: nb,
                };
                if Some(child) == parent_node {
                    continue;
                }
                next.push(nodes.len());
                nodes.push(TreeNode {
                    node: child,
                    parent: Some(idx),
                    depth,
                });
            }
        }
        let level = depth.div_ceil(2);
        if level_index.len() <= level {
            level_index.push(Vec::new());
        }
        level_index[level].extend_from_slice(&next);
        frontier = next;
    }
    Ok(ComputationTree {
        root,
        depth: levels,
        nodes,
        levels: level_index,
    })
}

/// Distinct leaf checks of `T_1(root_check)`: every `c' in N(q) \ {root}` for
/// `q in N(root)`, sorted, root excluded.
pub fn leaf_checks(g: &TannerGraph, root_check: usize) -> Result<Vec<usize>> {
    g.check_node(Node::check(root_check))?;
    let mut out = BTreeSet::new();
    for &q in g.check_neighbors(root_check) {
        for &c in g.qubit_neighbors(q) {
            if c != root_check {
                out.insert(c);
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Information-measurement values for a set of checks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImTable {
    pub checks: BTreeMap<usize, u32>,
    pub qubits: BTreeMap<usize, u32>,
}

impl ImTable {
    pub fn check(&self, c: usize) -> Option<u32> {
        self.checks.get(&c).copied()
    }

    /// Checks attaining the maximum IM value (all ties), sorted.
    pub fn argmax(&self) -> Vec<usize> {
        let Some(&best) = self.checks.values().max() else {
            return Vec::new();
        };
        self.checks.iter().filter(|(_, &v)| v == best).map(|(&c, _)| c).collect()
    }
}

/// Qubit IM is the number of unsatisfied neighbouring checks; check IM is the
/// sum of its qubits' IM values. Qubit values are computed once and reused.
pub fn find_ims(g: &TannerGraph, unsat: &[usize], checks: &[usize]) -> Result<ImTable> {
    let mut unsat_mask = vec![false; g.check_count()];
    for &c in unsat {
        g.check_node(Node::check(c))?;
        unsat_mask[c] = true;
    }
    let mut table = ImTable::default();
    for &c in checks {
        g.check_node(Node::check(c))?;
        if table.checks.contains_key(&c) {
            return Err(Error::Config(format!("check {c} listed twice")));
        }
        let mut sum = 0u32;
        for &q in g.check_neighbors(c) {
            let im = *table
                .qubits
                .entry(q)
                .or_insert_with(|| g.qubit_neighbors(q).iter().filter(|&&x| unsat_mask[x]).count() as u32);
            sum += im;
        }
        table.checks.insert(c, sum);
    }
    Ok(table)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TrappingSetKind {
    Cts,
    Qts,
}

/// A trapping set on a specific code, by graph indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrappingSetSpec {
    pub kind: TrappingSetKind,
    /// `(a, b)`: trapped qubit count and odd-degree check count.
    pub label: (usize, usize),
    /// All trapped qubits. For a CTS these are the odd-degree members used for
    /// separation; for a QTS the union of both halves.
    pub qubits: Vec<usize>,
    pub odd_checks: Vec<usize>,
    /// The two isomorphic halves of a QTS.
    pub partition: Option<(Vec<usize>, Vec<usize>)>,
}

impl TrappingSetSpec {
    /// `(3,3)` classical-type set `{v0, v1, v6}` of the `[[882,24]]` code's `H_Z`.
    pub fn cts_3_3() -> Self {
        Self {
            kind: TrappingSetKind::Cts,
            label: (3, 3),
            qubits: vec![0, 1, 6],
            odd_checks: vec![0, 2, 12],
            partition: None,
        }
    }

    /// `(6,0)` quantum trapping set of the `[[882,24]]` code's `H_Z`.
    pub fn qts_6_0() -> Self {
        Self {
            kind: TrappingSetKind::Qts,
            label: (6, 0),
            qubits: vec![0, 351, 405, 477, 478, 483],
            odd_checks: Vec::new(),
            partition: Some((vec![0, 351, 405], vec![477, 478, 483])),
        }
    }

    /// The subset a member qubit is separated from: `V_1` for a CTS, the
    /// qubit's own half for a QTS.
    pub fn relevant_subset(&self, v: usize) -> Result<&[usize]> {
        match (&self.kind, &self.partition) {
            (TrappingSetKind::Cts, _) => {
                if self.qubits.contains(&v) {
                    Ok(&self.qubits)
                } else {
                    Err(Error::Config(format!("qubit {v} is not in the trapping set")))
                }
            }
            (TrappingSetKind::Qts, Some((a, b))) => {
                if a.contains(&v) {
                    Ok(a)
                } else if b.contains(&v) {
                    Ok(b)
                } else {
                    Err(Error::Config(format!("qubit {v} is not in the trapping set")))
                }
            }
            (TrappingSetKind::Qts, None) => Err(Error::Config("QTS spec has no partition".into())),
        }
    }

    fn opposite_half(&self, v: usize) -> Result<&[usize]> {
        match &self.partition {
            Some((a, b)) if a.contains(&v) => Ok(b),
            Some((a, b)) if b.contains(&v) => Ok(a),
            Some(_) => Err(Error::Config(format!("qubit {v} is not in the trapping set"))),
            None => Err(Error::Config("limiting checks need a QTS partition".into())),
        }
    }

    /// Checks the structural claims a stored spec makes against a graph:
    /// odd checks match the induced subgraph, and for a QTS the halves have
    /// equal size and identical check neighbourhoods.
    pub fn validate(&self, g: &TannerGraph) -> Result<()> {
        let mut degree: BTreeMap<usize, usize> = BTreeMap::new();
        for &q in &self.qubits {
            g.check_node(Node::qubit(q))?;
            for &c in g.qubit_neighbors(q) {
                *degree.entry(c).or_default() += 1;
            }
        }
        let odd: Vec<usize> = degree.iter().filter(|(_, &d)| d % 2 == 1).map(|(&c, _)| c).collect();
        let mut expected = self.odd_checks.clone();
        expected.sort_unstable();
        if odd != expected {
            return Err(Error::Config(format!("odd-degree checks {odd:?} differ from spec {expected:?}")));
        }
        if self.label != (self.qubits.len(), odd.len()) {
            return Err(Error::Config(format!("label {:?} disagrees with the subgraph", self.label)));
        }
        if self.kind == TrappingSetKind::Qts {
            let (a, b) = self
                .partition
                .as_ref()
                .ok_or_else(|| Error::Config("QTS spec has no partition".into()))?;
            if a.len() != b.len() || !self.qubits.len().is_multiple_of(2) {
                return Err(Error::Config("QTS halves must have equal size".into()));
            }
            if neighborhood(g, a) != neighborhood(g, b) {
                return Err(Error::Config("QTS halves have different check neighbourhoods".into()));
            }
        }
        Ok(())
    }
}

/// `N(V)` for a qubit set.
pub fn neighborhood(g: &TannerGraph, qubits: &[usize]) -> BTreeSet<usize> {
    qubits.iter().flat_map(|&q| g.qubit_neighbors(q).iter().copied()).collect()
}

/// Largest `K <= k_max` such that some check adjacent to `v`, with exactly one
/// neighbour in `v`'s relevant subset, has no subset qubit among its
/// descendants in the first `K` levels of `v`'s computation tree. Returns 0
/// when no such check exists.
pub fn qubit_separation(g: &TannerGraph, v: usize, trapped: &TrappingSetSpec, k_max: usize) -> Result<usize> {
    g.check_node(Node::qubit(v))?;
    let subset = trapped.relevant_subset(v)?;
    let in_subset: HashSet<usize> = subset.iter().copied().collect();
    let mut best = 0;
    for &c in g.qubit_neighbors(v) {
        let trapped_neighbors = g.check_neighbors(c).iter().filter(|q| in_subset.contains(q)).count();
        if trapped_neighbors != 1 {
            continue;
        }
        let sep = first_trapped_level(g, v, c, &in_subset, k_max).map_or(k_max, |t| t - 1);
        best = best.max(sep);
    }
    Ok(best)
}

/// Walks the subtree under `(v -> c)` level by level and returns the first
/// level (1-based) holding a subset qubit. Tree positions are tracked as
/// directed edges, which is all the parent-exclusion rule depends on.
fn first_trapped_level(
    g: &TannerGraph,
    v: usize,
    c: usize,
    subset: &HashSet<usize>,
    k_max: usize,
) -> Option<usize> {
    // frontier of (check, qubit it was entered from)
    let mut checks: HashSet<(usize, usize)> = HashSet::from([(c, v)]);
    for level in 1..=k_max {
        let mut qubits: HashSet<(usize, usize)> = HashSet::new();
        for &(check, from) in &checks {
            for &q in g.check_neighbors(check) {
                if q != from {
                    qubits.insert((q, check));
                }
            }
        }
        if qubits.iter().any(|(q, _)| subset.contains(q)) {
            return Some(level);
        }
        checks.clear();
        for &(q, from) in &qubits {
            for &ch in g.qubit_neighbors(q) {
                if ch != from {
                    checks.insert((ch, q));
                }
            }
        }
        if checks.is_empty() {
            return None;
        }
    }
    None
}

/// Checks at level 2 of `T(v)` that hang off opposite-half qubits at level 1
/// and lead back into `v`'s own half; for a `d_v`-regular QTS there are
/// `d_v (d_v - 1)` of them.
pub fn limiting_checks(g: &TannerGraph, v: usize, trapped: &TrappingSetSpec) -> Result<Vec<usize>> {
    if trapped.kind != TrappingSetKind::Qts {
        return Err(Error::Config("limiting checks are defined for quantum trapping sets".into()));
    }
    g.check_node(Node::qubit(v))?;
    let own: HashSet<usize> = trapped.relevant_subset(v)?.iter().copied().collect();
    let opposite: HashSet<usize> = trapped.opposite_half(v)?.iter().copied().collect();
    let mut out = BTreeSet::new();
    for &c1 in g.qubit_neighbors(v) {
        for &u in g.check_neighbors(c1) {
            if u == v || !opposite.contains(&u) {
                continue;
            }
            for &c2 in g.qubit_neighbors(u) {
                if c2 != c1 && g.check_neighbors(c2).iter().any(|q| own.contains(q)) {
                    out.insert(c2);
                }
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Graphviz rendering of a trapping set's induced subgraph. Odd-degree checks
/// are filled red; QTS halves get distinct colours.
pub fn trapping_set_dot(g: &TannerGraph, trapped: &TrappingSetSpec) -> String {
    let mut out = String::from("graph trapping_set {\n");
    let odd: BTreeSet<usize> = trapped.odd_checks.iter().copied().collect();
    let second_half: BTreeSet<usize> = trapped
        .partition
        .as_ref()
        .map(|(_, b)| b.iter().copied().collect())
        .unwrap_or_default();
    for &q in &trapped.qubits {
        let colour = if second_half.contains(&q) { "violet" } else { "lightblue" };
        let _ = writeln!(out, "  v{q} [shape=circle, style=filled, fillcolor={colour}];");
    }
    for c in neighborhood(g, &trapped.qubits) {
        let colour = if odd.contains(&c) { "red" } else { "lightgrey" };
        let _ = writeln!(out, "  c{c} [shape=box, style=filled, fillcolor={colour}];");
    }
    for &q in &trapped.qubits {
        for &c in g.qubit_neighbors(q) {
            let _ = writeln!(out, "  v{q} -- c{c};");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph() -> TannerGraph {
        // q0 - c0 - q1 - c1 - q2
        TannerGraph::new(&SparseBinaryMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap())
    }

    #[test]
    fn ct_excludes_parent_edge() {
        let g = path_graph();
        let t = build_ct(&g, Node::check(0), 1).unwrap();
        assert_eq!(t.level_nodes(1), vec![Node::qubit(0), Node::qubit(1), Node::check(1)]);
        assert!(build_ct(&g, Node::check(0), 0).is_err());
        assert!(build_ct(&g, Node::check(5), 1).is_err());
    }

    #[test]
    fn leaf_checks_of_degree_one_chain_is_empty() {
        let g = TannerGraph::new(&SparseBinaryMatrix::from_dense(&[vec![1]]).unwrap());
        assert!(leaf_checks(&g, 0).unwrap().is_empty());
        assert_eq!(leaf_checks(&path_graph(), 0).unwrap(), vec![1]);
    }

    #[test]
    fn im_examples() {
        let g = TannerGraph::new(&SparseBinaryMatrix::from_dense(&[vec![1]]).unwrap());
        let t = find_ims(&g, &[], &[0]).unwrap();
        assert_eq!(t.check(0), Some(0));
        let t = find_ims(&g, &[0], &[0]).unwrap();
        assert_eq!(t.check(0), Some(1));
        assert!(find_ims(&g, &[0], &[0, 0]).is_err());
    }

    #[test]
    fn im_argmax_keeps_ties() {
        let g = path_graph();
        let t = find_ims(&g, &[0, 1], &[0, 1]).unwrap();
        // q1 touches both unsatisfied checks
        assert_eq!(t.check(0), Some(3));
        assert_eq!(t.check(1), Some(3));
        assert_eq!(t.argmax(), vec![0, 1]);
    }

    #[test]
    fn private_check_separation_is_capped() {
        // q0 has a private check c0 and shares c1 with q1
        let h = SparseBinaryMatrix::from_dense(&[vec![1, 0], vec![1, 1]]).unwrap();
        let g = TannerGraph::new(&h);
        let spec = TrappingSetSpec {
            kind: TrappingSetKind::Cts,
            label: (2, 1),
            qubits: vec![0, 1],
            odd_checks: vec![0],
            partition: None,
        };
        assert_eq!(qubit_separation(&g, 0, &spec, 5).unwrap(), 5);
        assert!(qubit_separation(&g, 3, &spec, 5).is_err());
    }

    #[test]
    fn limiting_checks_need_qts() {
        let g = path_graph();
        assert!(limiting_checks(&g, 0, &TrappingSetSpec::cts_3_3()).is_err());
    }
}
