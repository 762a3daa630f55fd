// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Linear sum assignment with forbidden entries.
//!
//! [`solve_lsap`] is the O(n³) shortest-augmenting-path form of the Hungarian
//! algorithm. Forbidden entries are never scanned, so no big-M constant is
//! involved and the result does not depend on cost magnitudes.
//!
//! The ε-matrices used for graph edit distance have side `n + m`:
//!
//! ```text
//!              V2 (m cols)     ε (n cols)
//! V1 (n rows)  substitution    removal (diagonal only)
//! ε  (m rows)  insertion       zeros
//!              (diagonal only)
//! ```

use thiserror::Error;

use crate::cost::CostModel;
use crate::graph::{Graph, Label};

/// Largest side accepted by [`brute_force_lsap`].
pub const BRUTE_FORCE_MAX: usize = 9;

#[derive(Debug, Error, PartialEq)]
pub enum LsapError {
    #[error("no complete assignment avoids the forbidden entries")]
    Infeasible,
    #[error("matrix side {n} exceeds the brute-force limit {max}")]
    TooLarge { n: usize, max: usize },
    #[error("cost at ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
}

/// Square cost matrix where some entries may be forbidden.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedCostMatrix {
    n: usize,
    cost: Vec<f64>,
    forbidden: Vec<bool>,
}

impl MaskedCostMatrix {
    /// All-zero matrix with nothing forbidden.
    pub fn new(n: usize) -> Self {
        MaskedCostMatrix {
            n,
            cost: vec![0.0; n * n],
            forbidden: vec![false; n * n],
        }
    }

    /// `None` marks a forbidden entry. Panics if `rows` is not square.
    pub fn from_rows(rows: &[Vec<Option<f64>>]) -> Self {
        let n = rows.len();
        let mut m = Self::new(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            for (j, c) in row.iter().enumerate() {
                match c {
                    Some(c) => m.set(i, j, *c),
                    None => m.forbid(i, j),
                }
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, row: usize, col: usize, cost: f64) {
        let k = row * self.n + col;
        self.cost[k] = cost;
        self.forbidden[k] = false;
    }

    pub fn forbid(&mut self, row: usize, col: usize) {
        let k = row * self.n + col;
        self.cost[k] = 0.0;
        self.forbidden[k] = true;
    }

    pub fn is_forbidden(&self, row: usize, col: usize) -> bool {
        self.forbidden[row * self.n + col]
    }

    /// Cost of an allowed entry, `None` if forbidden.
    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        let k = row * self.n + col;
        (!self.forbidden[k]).then_some(self.cost[k])
    }

    /// Raw row-major costs; forbidden entries hold 0.
    pub fn costs(&self) -> &[f64] {
        &self.cost
    }

    pub(crate) fn costs_mut(&mut self) -> &mut [f64] {
        &mut self.cost
    }

    /// Sum of the costs picked by `perm`, or `None` if it hits a forbidden entry.
    pub fn evaluate(&self, perm: &[usize]) -> Option<f64> {
        perm.iter()
            .enumerate()
            .map(|(i, &j)| self.get(i, j))
            .sum::<Option<f64>>()
    }

    fn check_finite(&self) -> Result<(), LsapError> {
        match self.cost.iter().position(|c| !c.is_finite()) {
            Some(k) => Err(LsapError::NonFinite {
                row: k / self.n,
                col: k % self.n,
            }),
            None => Ok(()),
        }
    }
}

/// A permutation `row -> perm[row]` and its total cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub perm: Vec<usize>,
    pub total_cost: f64,
}

/// Minimum-cost perfect assignment avoiding forbidden entries.
///
/// Rows are inserted one at a time and each is routed along a shortest
/// augmenting path in reduced costs. Ties resolve to the lowest row index,
/// then the lowest column index, so the output is deterministic.
pub fn solve_lsap(c: &MaskedCostMatrix) -> Result<Assignment, LsapError> {
    c.check_finite()?;
    let n = c.n;
    if n == 0 {
        return Ok(Assignment {
            perm: Vec::new(),
            total_cost: 0.0,
        });
    }
    // 1-based with column 0 as the virtual source of each augmentation.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut min_slack = vec![f64::INFINITY; n + 1];
    let mut used = vec![false; n + 1];

    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0usize;
        min_slack.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let base = (i0 - 1) * n;
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                if !c.forbidden[base + j - 1] {
                    let reduced = c.cost[base + j - 1] - u[i0] - v[j];
                    if reduced < min_slack[j] {
                        min_slack[j] = reduced;
                        way[j] = j0;
                    }
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            if j1 == 0 {
                return Err(LsapError::Infeasible);
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut perm = vec![0usize; n];
    for j in 1..=n {
        perm[row_of[j] - 1] = j - 1;
    }
    let total_cost = c.evaluate(&perm).expect("augmenting paths only use allowed entries");
    Ok(Assignment { perm, total_cost })
}

/// Exhaustive search over all permutations. Test oracle for small sides.
pub fn brute_force_lsap(c: &MaskedCostMatrix) -> Result<Assignment, LsapError> {
    if c.n > BRUTE_FORCE_MAX {
        return Err(LsapError::TooLarge {
            n: c.n,
            max: BRUTE_FORCE_MAX,
        });
    }
    c.check_finite()?;

    fn recurse(
        c: &MaskedCostMatrix,
        row: usize,
        taken: &mut [bool],
        current: &mut Vec<usize>,
        acc: f64,
        best: &mut Option<Assignment>,
    ) {
        if row == c.n {
            if best.as_ref().is_none_or(|b| acc < b.total_cost) {
                *best = Some(Assignment {
                    perm: current.clone(),
                    total_cost: acc,
                });
            }
            return;
        }
        for col in 0..c.n {
            if taken[col] {
                continue;
            }
            if let Some(cost) = c.get(row, col) {
                taken[col] = true;
                current.push(col);
                recurse(c, row + 1, taken, current, acc + cost, best);
                current.pop();
                taken[col] = false;
            }
        }
    }

    let mut best = None;
    recurse(
        c,
        0,
        &mut vec![false; c.n],
        &mut Vec::with_capacity(c.n),
        0.0,
        &mut best,
    );
    best.ok_or(LsapError::Infeasible)
}

/// Builds the `(n + m)`-sided ε-matrix from substitution, removal and
/// insertion costs. Off-diagonal removal/insertion entries are forbidden and
/// the ε-to-ε block is zero.
pub fn eps_cost_matrix(
    n: usize,
    m: usize,
    sub: impl Fn(usize, usize) -> f64,
    del: impl Fn(usize) -> f64,
    ins: impl Fn(usize) -> f64,
) -> MaskedCostMatrix {
    let size = n + m;
    let mut c = MaskedCostMatrix::new(size);
    for i in 0..n {
        for k in 0..m {
            c.set(i, k, sub(i, k));
        }
        for e in 0..n {
            if e == i {
                c.set(i, m + e, del(i));
            } else {
                c.forbid(i, m + e);
            }
        }
    }
    for e in 0..m {
        for k in 0..m {
            if k == e {
                c.set(n + e, k, ins(k));
            } else {
                c.forbid(n + e, k);
            }
        }
    }
    c
}

/// How the cost of mapping one node onto another is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BagStrategy {
    /// Node labels only.
    NodeOnly,
    /// Node label plus an optimal ε-assignment between incident edges.
    IncidentEdges,
}

/// Optimal ε-assignment cost between two bags of edge labels.
fn edge_bag_cost<M: CostModel>(a: &[&Label], b: &[&Label], model: &M) -> f64 {
    if a.is_empty() {
        return b.iter().map(|l| model.edge_ins(l)).sum();
    }
    if b.is_empty() {
        return a.iter().map(|l| model.edge_del(l)).sum();
    }
    let c = eps_cost_matrix(
        a.len(),
        b.len(),
        |i, k| model.edge_sub(a[i], b[k]),
        |i| model.edge_del(a[i]),
        |k| model.edge_ins(b[k]),
    );
    solve_lsap(&c)
        .expect("ε-matrices always admit the remove-all/insert-all assignment")
        .total_cost
}

/// Labels on incident edges, split in (outgoing, incoming). Undirected
/// graphs report every edge as outgoing.
fn incident_labels(g: &Graph, node: usize, directed: bool) -> (Vec<&Label>, Vec<&Label>) {
    let out = g
        .out_neighbors(node)
        .iter()
        .map(|&j| g.edge(node, j).expect("adjacency"))
        .collect();
    let inc = if directed {
        g.in_neighbors(node)
            .iter()
            .map(|&j| g.edge(j, node).expect("adjacency"))
            .collect()
    } else {
        Vec::new()
    };
    (out, inc)
}

/// Node-level ε cost matrix of side `|V1| + |V2|`.
///
/// With [`BagStrategy::IncidentEdges`], a substitution also pays for an
/// optimal assignment between the incident edges of both nodes (in- and
/// out-edges matched separately on directed graphs), a removal pays for
/// removing every incident edge and an insertion for inserting them.
pub fn build_eps_cost_matrix<M: CostModel>(
    g1: &Graph,
    g2: &Graph,
    model: &M,
    strategy: BagStrategy,
) -> MaskedCostMatrix {
    let (n, m) = (g1.order(), g2.order());
    match strategy {
        BagStrategy::NodeOnly => eps_cost_matrix(
            n,
            m,
            |i, k| model.node_sub(g1.label(i), g2.label(k)),
            |i| model.node_del(g1.label(i)),
            |k| model.node_ins(g2.label(k)),
        ),
        BagStrategy::IncidentEdges => {
            let directed = g1.is_directed() || g2.is_directed();
            let bags1: Vec<_> = (0..n).map(|i| incident_labels(g1, i, directed)).collect();
            let bags2: Vec<_> = (0..m).map(|k| incident_labels(g2, k, directed)).collect();
            let del_all = |labels: &[&Label]| labels.iter().map(|l| model.edge_del(l)).sum::<f64>();
            let ins_all = |labels: &[&Label]| labels.iter().map(|l| model.edge_ins(l)).sum::<f64>();
            eps_cost_matrix(
                n,
                m,
                |i, k| {
                    model.node_sub(g1.label(i), g2.label(k))
                        + edge_bag_cost(&bags1[i].0, &bags2[k].0, model)
                        + edge_bag_cost(&bags1[i].1, &bags2[k].1, model)
                },
                |i| model.node_del(g1.label(i)) + del_all(&bags1[i].0) + del_all(&bags1[i].1),
                |k| model.node_ins(g2.label(k)) + ins_all(&bags2[k].0) + ins_all(&bags2[k].1),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::ConstantCostModel;
    use crate::graph::graph_from;

    fn dense(rows: &[&[f64]]) -> MaskedCostMatrix {
        MaskedCostMatrix::from_rows(
            &rows
                .iter()
                .map(|r| r.iter().map(|&c| Some(c)).collect())
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn two_by_two() {
        let a = solve_lsap(&dense(&[&[1.0, 2.0], &[2.0, 1.0]])).unwrap();
        assert_eq!(a.perm, vec![0, 1]);
        assert_eq!(a.total_cost, 2.0);
    }

    #[test]
    fn zero_matrix() {
        let a = solve_lsap(&MaskedCostMatrix::new(3)).unwrap();
        assert_eq!(a.total_cost, 0.0);
        let mut seen = a.perm.clone();
        seen.sort();
        assert_eq!(seen, vec![0, 1, 2]);
    }

    #[test]
    fn forbidden_forces_the_other_permutation() {
        let c = MaskedCostMatrix::from_rows(&[vec![None, Some(5.0)], vec![Some(5.0), Some(0.0)]]);
        let a = solve_lsap(&c).unwrap();
        assert_eq!(a.perm, vec![1, 0]);
        assert_eq!(a.total_cost, 10.0);
    }

    #[test]
    fn infeasible_row() {
        let c = MaskedCostMatrix::from_rows(&[vec![None, None], vec![Some(1.0), Some(1.0)]]);
        assert_eq!(solve_lsap(&c), Err(LsapError::Infeasible));
        assert_eq!(brute_force_lsap(&c), Err(LsapError::Infeasible));
        // Every row has an entry but both need column 0.
        let c = MaskedCostMatrix::from_rows(&[vec![Some(1.0), None], vec![Some(1.0), None]]);
        assert_eq!(solve_lsap(&c), Err(LsapError::Infeasible));
    }

    #[test]
    fn brute_force_limits() {
        assert!(matches!(
            brute_force_lsap(&MaskedCostMatrix::new(10)),
            Err(LsapError::TooLarge { n: 10, .. })
        ));
        let a = brute_force_lsap(&dense(&[&[1.0, 2.0], &[2.0, 1.0]])).unwrap();
        assert_eq!(a.total_cost, 2.0);
    }

    #[test]
    fn non_finite_is_rejected() {
        let c = dense(&[&[1.0, f64::INFINITY], &[2.0, 1.0]]);
        assert_eq!(solve_lsap(&c), Err(LsapError::NonFinite { row: 0, col: 1 }));
    }

    #[test]
    fn negative_costs_are_fine() {
        let a = solve_lsap(&dense(&[&[-1.0, 0.0], &[0.0, -3.0]])).unwrap();
        assert_eq!(a.total_cost, -4.0);
    }

    #[test]
    fn empty_matrix() {
        assert_eq!(solve_lsap(&MaskedCostMatrix::new(0)).unwrap().total_cost, 0.0);
    }

    #[test]
    fn single_node_eps_matrix() {
        let g = graph_from(false, &["A"], &[]);
        let m = ConstantCostModel::new(1.0, 2.0, 3.0, 1.0, 1.0, 1.0).unwrap();
        let c = build_eps_cost_matrix(&g, &g, &m, BagStrategy::NodeOnly);
        assert_eq!(c.get(0, 0), Some(0.0));
        assert_eq!(c.get(0, 1), Some(2.0));
        assert_eq!(c.get(1, 0), Some(3.0));
        assert_eq!(c.get(1, 1), Some(0.0));
    }

    #[test]
    fn removal_and_insertion_blocks_are_diagonal() {
        let g1 = graph_from(false, &["A", "B", "C"], &[(0, 1, "x")]);
        let g2 = graph_from(false, &["A", "D"], &[]);
        let c = build_eps_cost_matrix(&g1, &g2, &ConstantCostModel::unit(), BagStrategy::IncidentEdges);
        let (n, m) = (3, 2);
        for i in 0..n {
            for e in 0..n {
                assert_eq!(c.is_forbidden(i, m + e), i != e);
            }
        }
        for e in 0..m {
            for k in 0..m {
                assert_eq!(c.is_forbidden(n + e, k), e != k);
            }
            for e2 in 0..n {
                assert_eq!(c.get(n + e, m + e2), Some(0.0));
            }
        }
        // removing node 0 also removes its edge
        assert_eq!(c.get(0, m), Some(2.0));
        assert_eq!(c.get(2, m + 2), Some(1.0));
    }

    #[test]
    fn incident_edge_bags() {
        let g1 = graph_from(false, &["A", "B"], &[(0, 1, "x")]);
        let g2 = graph_from(false, &["A", "B"], &[(0, 1, "y")]);
        let m = ConstantCostModel::new(1.0, 1.0, 1.0, 0.5, 1.0, 1.0).unwrap();
        let c = build_eps_cost_matrix(&g1, &g2, &m, BagStrategy::IncidentEdges);
        // A->A: 0 for the node, one edge x->y substituted at 0.5 (cheaper than 2)
        assert_eq!(c.get(0, 0), Some(0.5));
        assert_eq!(c.get(0, 1), Some(1.5));
        let node_only = build_eps_cost_matrix(&g1, &g2, &m, BagStrategy::NodeOnly);
        assert_eq!(node_only.get(0, 0), Some(0.0));
    }

    #[test]
    fn directed_bags_split_in_and_out() {
        let g1 = graph_from(true, &["A", "B"], &[(0, 1, "x")]);
        let g2 = graph_from(true, &["A", "B"], &[(1, 0, "x")]);
        let c = build_eps_cost_matrix(&g1, &g2, &ConstantCostModel::unit(), BagStrategy::IncidentEdges);
        // node 0 has one out-edge in g1 and one in-edge in g2: delete + insert
        assert_eq!(c.get(0, 0), Some(2.0));
        // node 0 of g1 vs node 1 of g2: both have one out-edge labelled x
        assert_eq!(c.get(0, 1), Some(1.0));
    }
}
