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

//! Bipartite upper bound: one linear sum assignment over nodes.
//!
//! The assignment is computed on node-level costs only, optionally enriched
//! with an estimate of the incident edge work. The returned value is the
//! exact cost of the edit path induced by that assignment, so it is always
//! an upper bound on the edit distance.

use crate::cost::CostModel;
use crate::graph::Graph;
use crate::lsap::{build_eps_cost_matrix, solve_lsap, BagStrategy};
use crate::path::{assignment_to_path, path_cost, EpsAssignment, RestrictedEditPath};

#[derive(Debug, Clone)]
pub struct BipartiteResult {
    /// Cost of the induced edit path.
    pub value: f64,
    /// Optimal value of the node-level assignment problem.
    pub lsap_value: f64,
    pub assignment: EpsAssignment,
    pub path: RestrictedEditPath,
}

pub fn bipartite_ged<M: CostModel>(g1: &Graph, g2: &Graph, model: &M, strategy: BagStrategy) -> BipartiteResult {
    let (n, m) = (g1.order(), g2.order());
    let c = build_eps_cost_matrix(g1, g2, model, strategy);
    let sol = solve_lsap(&c).expect("ε-matrices always admit a feasible assignment");
    let assignment = EpsAssignment::from_permutation(n, m, &sol.perm).expect("the solver only uses allowed entries");
    let path = assignment_to_path(&assignment, g1, g2);
    BipartiteResult {
        value: path_cost(&path, model, g1, g2),
        lsap_value: sol.total_cost,
        assignment,
        path,
    }
}
