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

//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes and returns strings: GEDG text in, JSON out. The
//! plain functions are usable from Rust; the `#[wasm_bindgen]` wrappers
//! turn errors into JS exceptions.

use ged_core::bench::{gen_synth_pair, SynthSpec};
use ged_core::bipartite::bipartite_ged;
use ged_core::cost::{clamp_substitutions, ConstantCostModel, CostModel};
use ged_core::exact::{astar_ged, AstarOptions};
use ged_core::graph::{parse_graph, serialize_graph, Graph};
use ged_core::lsap::BagStrategy;
use ged_core::path::EpsAssignment;
use ged_core::qap::{qap_ged, QapInit, QapOptions};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Search budget of the exact method; keeps the page responsive.
const EXACT_BUDGET: u64 = 200_000;

#[derive(Debug, Serialize)]
pub struct Outcome {
    pub method: String,
    pub value: f64,
    /// Image in G2 of every node of G1, `null` for removals.
    pub mapping: Vec<Option<usize>>,
    pub path: Vec<String>,
    /// Objective after each IPFP iteration, one list per run.
    pub traces: Vec<Vec<f64>>,
    /// False only when the exact search ran out of budget.
    pub optimal: Option<bool>,
}

#[derive(Debug, Serialize)]
pub struct PairText {
    pub source: String,
    pub target: String,
}

fn parse(name: &str, text: &str) -> Result<Graph, String> {
    parse_graph(text).map_err(|e| format!("{name}: {e}"))
}

fn outcome(method: &str, value: f64, a: &EpsAssignment, ops: String) -> Outcome {
    Outcome {
        method: method.to_string(),
        value,
        mapping: a.mapping().to_vec(),
        path: ops.lines().map(str::to_string).collect(),
        traces: Vec::new(),
        optimal: None,
    }
}

fn run<M: CostModel>(
    g1: &Graph,
    g2: &Graph,
    model: &M,
    method: &str,
    restarts: usize,
    seed: u64,
) -> Result<Outcome, String> {
    Ok(match method {
        "bipartite-node" | "bipartite-edges" => {
            let strategy = if method == "bipartite-node" {
                BagStrategy::NodeOnly
            } else {
                BagStrategy::IncidentEdges
            };
            let r = bipartite_ged(g1, g2, model, strategy);
            outcome(method, r.value, &r.assignment, r.path.to_text())
        }
        "qap" | "qap-random" => {
            let opts = QapOptions {
                init: if method == "qap" {
                    QapInit::BipartiteEdges
                } else {
                    QapInit::Random
                },
                restarts: restarts.max(1),
                seed,
                ..Default::default()
            };
            let r = qap_ged(g1, g2, model, &opts);
            let mut o = outcome(method, r.value, &r.assignment, r.path.to_text());
            o.traces = r.runs.into_iter().map(|run| run.trace).collect();
            o
        }
        "exact" => {
            let opts = AstarOptions {
                budget: EXACT_BUDGET,
                ..Default::default()
            };
            let r = astar_ged(g1, g2, model, &opts);
            let mut o = outcome(method, r.value, &r.assignment, r.path.to_text());
            o.optimal = Some(r.optimal);
            o
        }
        other => return Err(format!("unknown method {other:?}")),
    })
}

/// Edit distance between two GEDG graphs. `costs` holds
/// `[cvs, cvd, cvi, ces, ced, cei]`.
pub fn compute(
    g1: &str,
    g2: &str,
    method: &str,
    costs: &[f64],
    clamp: bool,
    restarts: usize,
    seed: u64,
) -> Result<Outcome, String> {
    let g1 = parse("G1", g1)?;
    let g2 = parse("G2", g2)?;
    let &[cvs, cvd, cvi, ces, ced, cei] = costs else {
        return Err(format!("expected 6 costs, got {}", costs.len()));
    };
    let model = ConstantCostModel::new(cvs, cvd, cvi, ces, ced, cei).map_err(|e| e.to_string())?;
    if clamp {
        run(&g1, &g2, &clamp_substitutions(model), method, restarts, seed)
    } else {
        run(&g1, &g2, &model, method, restarts, seed)
    }
}

/// Synthetic source graph and its perturbed target, as GEDG text.
pub fn synth_pair(n: usize, seed: u64) -> Result<PairText, String> {
    let spec = SynthSpec {
        n,
        seed,
        ..Default::default()
    };
    let (s, t) = gen_synth_pair(&spec).map_err(|e| e.to_string())?;
    Ok(PairText {
        source: serialize_graph(&s),
        target: serialize_graph(&t),
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = compute)]
pub fn compute_js(
    g1: &str,
    g2: &str,
    method: &str,
    costs: Vec<f64>,
    clamp: bool,
    restarts: usize,
    seed: u64,
) -> Result<String, JsError> {
    to_js(compute(g1, g2, method, &costs, clamp, restarts, seed))
}

#[wasm_bindgen(js_name = synthPair)]
pub fn synth_pair_js(n: usize, seed: u64) -> Result<String, JsError> {
    to_js(synth_pair(n, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    const AB: &str = "graph undirected\nv 0 A\nv 1 B\ne 0 1 x\n";
    const AC: &str = "graph undirected\nv 0 A\nv 1 C\ne 0 1 x\n";
    const UNIT: [f64; 6] = [1.0; 6];

    #[test]
    fn every_method_finds_the_relabel() {
        for method in ["bipartite-node", "bipartite-edges", "qap", "exact"] {
            let o = compute(AB, AC, method, &UNIT, false, 2, 1).unwrap();
            assert_eq!(o.value, 1.0, "{method}");
            assert_eq!(o.mapping, vec![Some(0), Some(1)]);
        }
        let o = compute(AB, AC, "qap", &UNIT, false, 3, 1).unwrap();
        assert_eq!(o.traces.len(), 3);
        // random starts may stall on the swapped map
        let o = compute(AB, AC, "qap-random", &UNIT, false, 2, 1).unwrap();
        assert!([1.0, 2.0].contains(&o.value));
        assert_eq!(compute(AB, AC, "exact", &UNIT, true, 1, 0).unwrap().optimal, Some(true));
    }

    #[test]
    fn errors_are_messages() {
        assert!(compute("graph x", AC, "qap", &UNIT, false, 1, 0)
            .unwrap_err()
            .starts_with("G1"));
        assert!(compute(AB, AC, "nope", &UNIT, false, 1, 0).is_err());
        assert!(compute(AB, AC, "qap", &[1.0], false, 1, 0).is_err());
        assert!(synth_pair(2, 0).is_err());
    }

    #[test]
    fn synthetic_pairs_parse_back() {
        let p = synth_pair(6, 3).unwrap();
        assert_eq!(parse_graph(&p.source).unwrap().order(), 6);
        assert_eq!(parse_graph(&p.target).unwrap().order(), 5);
        let json = serde_json::to_string(&compute(&p.source, &p.target, "qap", &UNIT, false, 1, 0).unwrap()).unwrap();
        assert!(json.contains("\"traces\":[["));
    }
}
