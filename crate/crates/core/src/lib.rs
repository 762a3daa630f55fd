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

//! Graph edit distance between labeled simple graphs.
//!
//! Upper bounds come from a linear sum assignment over nodes
//! ([`bipartite`]) or from a quadratic assignment relaxation refined by an
//! integer projected fixed point method ([`qap`]). [`exact`] provides an A*
//! search and a brute-force enumerator for small graphs.

pub mod bench;
pub mod bipartite;
pub mod cost;
pub mod exact;
pub mod graph;
pub mod lsap;
pub mod path;
pub mod qap;

pub use bipartite::{bipartite_ged, BipartiteResult};
pub use cost::{clamp_substitutions, ConstantCostModel, CostModel, TableCostModel};
pub use exact::{astar_ged, brute_force_ged, AstarOptions, ExactResult, Heuristic};
pub use graph::{parse_graph, serialize_graph, Graph, GraphBuilder, Label};
pub use lsap::{solve_lsap, BagStrategy, MaskedCostMatrix};
pub use path::{assignment_to_path, path_cost, path_to_assignment, EpsAssignment, RestrictedEditPath};
pub use qap::{ipfp_min, qap_ged, QapInit, QapInstance, QapOptions, QapResult};
