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

//! Random instances shared by the integration tests.

#![allow(dead_code)]

use ged_core::cost::{ConstantCostModel, TableCostModel};
use ged_core::graph::{Graph, GraphBuilder, Label};
use ged_core::path::EpsAssignment;
use rand::seq::SliceRandom;
use rand::Rng;

pub const NODE_LABELS: [&str; 3] = ["A", "B", "C"];
pub const EDGE_LABELS: [&str; 2] = ["x", "y"];

pub fn label(s: &str) -> Label {
    Label::new(s).unwrap()
}

/// Graph with `n` nodes, each possible edge present with probability `p`.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, directed: bool, p: f64) -> Graph {
    let mut b = GraphBuilder::new(directed);
    for _ in 0..n {
        b.node(label(NODE_LABELS.choose(rng).unwrap()));
    }
    for s in 0..n {
        for d in 0..n {
            if s == d || (!directed && d < s) {
                continue;
            }
            if rng.gen_bool(p) {
                b.edge(s, d, label(EDGE_LABELS.choose(rng).unwrap()));
            }
        }
    }
    b.build().unwrap()
}

pub fn random_pair<R: Rng>(rng: &mut R, max_n: usize, directed: bool) -> (Graph, Graph) {
    let n = rng.gen_range(0..=max_n);
    let m = rng.gen_range(0..=max_n);
    let p = rng.gen_range(0.1..0.7);
    (random_graph(rng, n, directed, p), random_graph(rng, m, directed, p))
}

pub fn random_assignment<R: Rng>(rng: &mut R, n: usize, m: usize) -> EpsAssignment {
    let mut targets: Vec<usize> = (0..m).collect();
    targets.shuffle(rng);
    let sub = (0..n)
        .map(|_| if rng.gen_bool(0.3) { None } else { targets.pop() })
        .collect();
    EpsAssignment::from_mapping(m, sub).unwrap()
}

/// Constant model with costs from a small grid, optionally real-valued.
pub fn random_constant<R: Rng>(rng: &mut R, real: bool) -> ConstantCostModel {
    let mut draw = || {
        if real {
            rng.gen_range(0.0..3.0)
        } else {
            rng.gen_range(0..4) as f64
        }
    };
    ConstantCostModel::new(draw(), draw(), draw(), draw(), draw(), draw()).unwrap()
}

/// Label-dependent model on top of a random constant one.
pub fn random_table<R: Rng>(rng: &mut R) -> TableCostModel {
    let mut t = TableCostModel::new(random_constant(rng, true));
    for a in NODE_LABELS {
        t = t.with_node_del(label(a), rng.gen_range(0.0..3.0)).unwrap();
        t = t.with_node_ins(label(a), rng.gen_range(0.0..3.0)).unwrap();
        for b in NODE_LABELS {
            if a != b {
                t = t.with_node_sub(label(a), label(b), rng.gen_range(0.0..3.0)).unwrap();
            }
        }
    }
    for a in EDGE_LABELS {
        t = t.with_edge_del(label(a), rng.gen_range(0.0..3.0)).unwrap();
        t = t.with_edge_ins(label(a), rng.gen_range(0.0..3.0)).unwrap();
        for b in EDGE_LABELS {
            if a != b {
                t = t.with_edge_sub(label(a), label(b), rng.gen_range(0.0..3.0)).unwrap();
            }
        }
    }
    t
}
