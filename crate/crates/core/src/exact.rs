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

//! Exact edit distance.
//!
//! [`astar_ged`] is a best-first search over partial node maps with an
//! assignment-based lower bound. [`brute_force_ged`] enumerates every
//! ε-assignment and serves as a reference on tiny graphs.
//!
//! Both minimize over restricted edit paths. The result is the edit
//! distance whenever substitutions are no dearer than a removal plus an
//! insertion (see [`crate::cost::clamp_substitutions`]).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::bipartite::bipartite_ged;
use crate::cost::CostModel;
use crate::graph::Graph;
use crate::lsap::{eps_cost_matrix, solve_lsap, BagStrategy};
use crate::path::{assignment_cost, assignment_to_path, pair_is_directed, EpsAssignment, RestrictedEditPath};

/// Largest order accepted by [`brute_force_ged`] on either side.
pub const BRUTE_FORCE_GED_MAX: usize = 8;

/// Default number of expansions allowed to [`astar_ged`].
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("graphs of order {n} and {m} exceed the enumeration limit {max}")]
    TooLarge { n: usize, m: usize, max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    /// Assignment bound on the remaining node operations.
    NodeAssignment,
    /// No bound: plain best-first branch and bound.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AstarOptions {
    pub budget: u64,
    pub heuristic: Heuristic,
}

impl Default for AstarOptions {
    fn default() -> Self {
        AstarOptions {
            budget: DEFAULT_BUDGET,
            heuristic: Heuristic::NodeAssignment,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExactResult {
    pub value: f64,
    pub assignment: EpsAssignment,
    pub path: RestrictedEditPath,
    /// False when the budget ran out before optimality was proven.
    pub optimal: bool,
    pub expanded: u64,
}

struct SearchNode {
    f: f64,
    g: f64,
    /// Image of `order[d]` for each decided depth `d`; `None` is ε.
    prefix: Vec<Option<usize>>,
}

impl PartialEq for SearchNode {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for SearchNode {}

impl PartialOrd for SearchNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SearchNode {
    // max-heap: smallest f first, deeper first on ties
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| self.prefix.len().cmp(&other.prefix.len()))
    }
}

struct Search<'a, M: CostModel> {
    g1: &'a Graph,
    g2: &'a Graph,
    model: &'a M,
    directed: bool,
    order: Vec<usize>,
    heuristic: Heuristic,
}

impl<M: CostModel> Search<'_, M> {
    fn edge_cost(&self, i: usize, j: usize, k: Option<usize>, l: Option<usize>) -> f64 {
        let e2 = match (k, l) {
            (Some(k), Some(l)) => self.g2.edge(k, l),
            _ => None,
        };
        match (self.g1.edge(i, j), e2) {
            (Some(a), Some(b)) => self.model.edge_sub(a, b),
            (Some(a), None) => self.model.edge_del(a),
            (None, Some(b)) => self.model.edge_ins(b),
            (None, None) => 0.0,
        }
    }

    /// Cost added by deciding the image of `order[prefix.len()]`.
    fn step_cost(&self, prefix: &[Option<usize>], k: Option<usize>) -> f64 {
        let i = self.order[prefix.len()];
        let mut cost = match k {
            Some(k) => self.model.node_sub(self.g1.label(i), self.g2.label(k)),
            None => self.model.node_del(self.g1.label(i)),
        };
        for (d, &l) in prefix.iter().enumerate() {
            let j = self.order[d];
            cost += self.edge_cost(i, j, k, l);
            if self.directed {
                cost += self.edge_cost(j, i, l, k);
            }
        }
        cost
    }

    /// Insertions left once every node of G1 is decided.
    fn completion_cost(&self, used: &[bool]) -> f64 {
        let mut cost = 0.0;
        for (k, &u) in used.iter().enumerate() {
            if !u {
                cost += self.model.node_ins(self.g2.label(k));
            }
        }
        for e in self.g2.edges_as(self.directed) {
            if !used[e.src] || !used[e.dst] {
                cost += self.model.edge_ins(&e.label);
            }
        }
        cost
    }

    fn lower_bound(&self, depth: usize, used: &[bool]) -> f64 {
        if self.heuristic == Heuristic::None {
            return 0.0;
        }
        let rest1 = &self.order[depth..];
        let rest2: Vec<usize> = (0..used.len()).filter(|&k| !used[k]).collect();
        if rest1.is_empty() && rest2.is_empty() {
            return 0.0;
        }
        let c = eps_cost_matrix(
            rest1.len(),
            rest2.len(),
            |a, b| self.model.node_sub(self.g1.label(rest1[a]), self.g2.label(rest2[b])),
            |a| self.model.node_del(self.g1.label(rest1[a])),
            |b| self.model.node_ins(self.g2.label(rest2[b])),
        );
        solve_lsap(&c).expect("ε-matrices are always feasible").total_cost
    }

    fn used(&self, prefix: &[Option<usize>]) -> Vec<bool> {
        let mut used = vec![false; self.g2.order()];
        for k in prefix.iter().flatten() {
            used[*k] = true;
        }
        used
    }

    fn to_assignment(&self, prefix: &[Option<usize>]) -> EpsAssignment {
        let mut sub = vec![None; self.g1.order()];
        for (d, &k) in prefix.iter().enumerate() {
            sub[self.order[d]] = k;
        }
        EpsAssignment::from_mapping(self.g2.order(), sub).expect("search keeps maps injective")
    }
}

/// Best-first search for a minimum-cost restricted edit path.
///
/// The incumbent starts as the node-only bipartite solution. When more
/// than `budget` nodes have been expanded, the incumbent is returned with
/// `optimal == false`.
pub fn astar_ged<M: CostModel>(g1: &Graph, g2: &Graph, model: &M, opts: &AstarOptions) -> ExactResult {
    let mut order: Vec<usize> = (0..g1.order()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(g1.degree(i)), i));
    let search = Search {
        g1,
        g2,
        model,
        directed: pair_is_directed(g1, g2),
        order,
        heuristic: opts.heuristic,
    };
    let n = g1.order();
    let m = g2.order();

    let start = bipartite_ged(g1, g2, model, BagStrategy::NodeOnly);
    let mut best = (start.value, start.assignment);

    let mut heap = BinaryHeap::new();
    // with n = 0 the only assignment inserts everything: the incumbent
    if n > 0 {
        heap.push(SearchNode {
            f: search.lower_bound(0, &vec![false; m]),
            g: 0.0,
            prefix: Vec::new(),
        });
    }
    let mut expanded = 0;
    let mut optimal = true;
    while let Some(node) = heap.pop() {
        if node.f >= best.0 {
            break;
        }
        if expanded >= opts.budget {
            optimal = false;
            break;
        }
        expanded += 1;
        let mut used = search.used(&node.prefix);
        let children = (0..m).filter(|&k| !used[k]).map(Some).chain([None]).collect::<Vec<_>>();
        for k in children {
            let g = node.g + search.step_cost(&node.prefix, k);
            let mut prefix = node.prefix.clone();
            prefix.push(k);
            if let Some(k) = k {
                used[k] = true;
            }
            if prefix.len() == n {
                let total = g + search.completion_cost(&used);
                if total < best.0 {
                    best = (total, search.to_assignment(&prefix));
                }
            } else {
                let f = g + search.lower_bound(prefix.len(), &used);
                if f < best.0 {
                    heap.push(SearchNode { f, g, prefix });
                }
            }
            if let Some(k) = k {
                used[k] = false;
            }
        }
    }

    let assignment = best.1;
    let path = assignment_to_path(&assignment, g1, g2);
    ExactResult {
        value: crate::path::path_cost(&path, model, g1, g2),
        assignment,
        path,
        optimal,
        expanded,
    }
}

/// Minimum path cost over every ε-assignment, each evaluated through its
/// induced edit path.
pub fn brute_force_ged<M: CostModel>(g1: &Graph, g2: &Graph, model: &M) -> Result<ExactResult, ExactError> {
    let (n, m) = (g1.order(), g2.order());
    if n > BRUTE_FORCE_GED_MAX || m > BRUTE_FORCE_GED_MAX {
        return Err(ExactError::TooLarge {
            n,
            m,
            max: BRUTE_FORCE_GED_MAX,
        });
    }
    let mut best: Option<(f64, EpsAssignment)> = None;
    let mut sub = Vec::with_capacity(n);
    let mut used = vec![false; m];
    enumerate(n, m, &mut sub, &mut used, &mut |sub| {
        let a = EpsAssignment::from_mapping(m, sub.to_vec()).expect("enumeration is injective");
        let cost = assignment_cost(&a, model, g1, g2);
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, a));
        }
    });
    let (value, assignment) = best.expect("at least the empty assignment");
    Ok(ExactResult {
        value,
        path: assignment_to_path(&assignment, g1, g2),
        assignment,
        optimal: true,
        expanded: 0,
    })
}

/// Calls `visit` on every injective partial map from `0..n` into `0..m`.
pub fn enumerate(
    n: usize,
    m: usize,
    sub: &mut Vec<Option<usize>>,
    used: &mut [bool],
    visit: &mut dyn FnMut(&[Option<usize>]),
) {
    if sub.len() == n {
        visit(sub);
        return;
    }
    sub.push(None);
    enumerate(n, m, sub, used, visit);
    sub.pop();
    for k in 0..m {
        if !used[k] {
            used[k] = true;
            sub.push(Some(k));
            enumerate(n, m, sub, used, visit);
            sub.pop();
            used[k] = false;
        }
    }
}
