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

//! Synthetic pairs, datasets on disk and batch benchmarks.
//!
//! A dataset directory holds pairs of GEDG files named
//! `<id>.source.gedg` and `<id>.target.gedg`. Benchmarks emit one record
//! per (pair, method) with CSV header `pair,method,d,e,t,iters,exact_hit`.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bipartite::bipartite_ged;
use crate::cost::CostModel;
use crate::exact::{astar_ged, AstarOptions};
use crate::graph::{parse_graph, serialize_graph, Graph, GraphBuilder, Label, ParseError};
use crate::lsap::BagStrategy;
use crate::qap::{qap_ged, QapOptions};

/// Two values closer than this count as equal when scoring exact hits.
pub const HIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("synthetic pairs need at least 3 nodes, got {0}")]
    TooSmall(usize),
    #[error("relabeling needs at least 2 node labels, got {0}")]
    AlphabetTooSmall(usize),
    #[error("edge ratio must be finite and non-negative, got {0}")]
    InvalidRatio(f64),
    #[error("unknown method {0:?}")]
    UnknownMethod(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: no matching {missing} file")]
    Unpaired { path: PathBuf, missing: &'static str },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Parameters of random source graphs.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n: usize,
    /// Number of node labels; the first three are `C`, `N`, `O`.
    pub node_alphabet: usize,
    /// Number of edge labels `1`, `2`, ...
    pub edge_alphabet: usize,
    /// Edges per node; the source gets `round(rho·n)` edges, capped at the
    /// complete graph.
    pub rho: f64,
    /// Shuffle the node ids of the target.
    pub permute: bool,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n: 10,
            node_alphabet: 3,
            edge_alphabet: 2,
            rho: 1.05,
            permute: true,
            seed: 0,
        }
    }
}

fn node_label(idx: usize) -> Label {
    const BASE: [&str; 3] = ["C", "N", "O"];
    let s = BASE.get(idx).map_or_else(|| format!("L{idx}"), |s| s.to_string());
    Label::new(s).expect("generated labels are valid")
}

fn edge_label(idx: usize) -> Label {
    Label::new((idx + 1).to_string()).expect("generated labels are valid")
}

fn check_spec(spec: &SynthSpec) -> Result<(), BenchError> {
    if spec.n < 3 {
        return Err(BenchError::TooSmall(spec.n));
    }
    if spec.node_alphabet < 2 {
        return Err(BenchError::AlphabetTooSmall(spec.node_alphabet));
    }
    if !spec.rho.is_finite() || spec.rho < 0.0 {
        return Err(BenchError::InvalidRatio(spec.rho));
    }
    Ok(())
}

/// Uniform simple undirected graph with `spec.n` nodes and
/// `round(rho·n)` edges, uniform labels.
pub fn random_graph<R: Rng>(spec: &SynthSpec, rng: &mut R) -> Graph {
    let n = spec.n;
    let pairs = n * (n - 1) / 2;
    let edges = ((spec.rho * n as f64).round() as usize).min(pairs);
    let mut b = GraphBuilder::new(false);
    for _ in 0..n {
        b.node(node_label(rng.gen_range(0..spec.node_alphabet)));
    }
    let mut chosen = index::sample(rng, pairs, edges).into_vec();
    chosen.sort_unstable();
    for p in chosen {
        let (s, d) = unrank_pair(p, n);
        b.edge(s, d, edge_label(rng.gen_range(0..spec.edge_alphabet.max(1))));
    }
    b.build().expect("sampled pairs are distinct and loop-free")
}

// p-th pair (s, d) with s < d in lexicographic order
fn unrank_pair(mut p: usize, n: usize) -> (usize, usize) {
    for s in 0..n {
        let row = n - 1 - s;
        if p < row {
            return (s, s + 1 + p);
        }
        p -= row;
    }
    unreachable!("pair index out of range")
}

fn make_target<R: Rng>(source: &Graph, spec: &SynthSpec, rng: &mut R) -> Graph {
    let n = source.order();
    let removed = rng.gen_range(0..n);
    let keep: Vec<usize> = (0..n).filter(|&i| i != removed).collect();
    let mut target = source.induced(&keep);
    let node = rng.gen_range(0..target.order());
    let current = target.label(node).clone();
    let others: Vec<Label> = (0..spec.node_alphabet)
        .map(node_label)
        .filter(|l| *l != current)
        .collect();
    let label = others.choose(rng).expect("alphabet has another label").clone();
    target = target.relabeled(node, label);
    if spec.permute {
        let mut perm: Vec<usize> = (0..target.order()).collect();
        perm.shuffle(rng);
        target = target.permuted(&perm);
    }
    target
}

/// Source graph and a target obtained by removing one node and relabeling
/// another. Deterministic in `spec.seed`.
pub fn gen_synth_pair(spec: &SynthSpec) -> Result<(Graph, Graph), BenchError> {
    check_spec(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let source = random_graph(spec, &mut rng);
    let target = make_target(&source, spec, &mut rng);
    Ok((source, target))
}

/// `count` pairs; pair `p` uses seed `spec.seed + p`.
pub fn gen_synth_pairs(spec: &SynthSpec, count: usize) -> Result<Vec<(Graph, Graph)>, BenchError> {
    (0..count)
        .map(|p| {
            gen_synth_pair(&SynthSpec {
                seed: spec.seed.wrapping_add(p as u64),
                ..spec.clone()
            })
        })
        .collect()
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> BenchError + '_ {
    move |source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `NNNN.source.gedg` / `NNNN.target.gedg` for every pair and
/// returns the pair ids.
pub fn write_dataset(dir: &Path, pairs: &[(Graph, Graph)]) -> Result<Vec<String>, BenchError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let width = pairs.len().saturating_sub(1).to_string().len().max(4);
    let mut ids = Vec::with_capacity(pairs.len());
    for (p, (g1, g2)) in pairs.iter().enumerate() {
        let id = format!("{p:0width$}");
        for (suffix, g) in [("source", g1), ("target", g2)] {
            let path = dir.join(format!("{id}.{suffix}.gedg"));
            fs::write(&path, serialize_graph(g)).map_err(io_err(&path))?;
        }
        ids.push(id);
    }
    Ok(ids)
}

/// One input pair of a benchmark.
#[derive(Debug, Clone)]
pub struct BenchPair {
    pub id: String,
    pub source: Graph,
    pub target: Graph,
}

/// Loads every complete pair of `dir`, sorted by id. Unreadable,
/// malformed or unpaired files are returned separately.
pub fn read_dataset(dir: &Path) -> Result<(Vec<BenchPair>, Vec<BenchError>), BenchError> {
    let mut files: BTreeMap<String, [Option<PathBuf>; 2]> = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()).map(str::to_owned) else {
            continue;
        };
        let (id, slot) = if let Some(id) = name.strip_suffix(".source.gedg") {
            (id, 0)
        } else if let Some(id) = name.strip_suffix(".target.gedg") {
            (id, 1)
        } else {
            continue;
        };
        files.entry(id.to_string()).or_default()[slot] = Some(path);
    }
    let load = |path: &Path| -> Result<Graph, BenchError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        parse_graph(&text).map_err(|source| BenchError::Parse {
            path: path.to_path_buf(),
            source,
        })
    };
    let mut pairs = Vec::new();
    let mut errors = Vec::new();
    for (id, [src, dst]) in files {
        match (src, dst) {
            (Some(s), Some(t)) => match (load(&s), load(&t)) {
                (Ok(source), Ok(target)) => pairs.push(BenchPair { id, source, target }),
                (a, b) => errors.extend([a.err(), b.err()].into_iter().flatten()),
            },
            (Some(path), None) => errors.push(BenchError::Unpaired {
                path,
                missing: "target",
            }),
            (None, Some(path)) => errors.push(BenchError::Unpaired {
                path,
                missing: "source",
            }),
            (None, None) => {}
        }
    }
    Ok((pairs, errors))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Exact,
    BipartiteNode,
    BipartiteEdges,
    Qap,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Exact,
        Method::BipartiteNode,
        Method::BipartiteEdges,
        Method::Qap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::BipartiteNode => "bipartite-node",
            Method::BipartiteEdges => "bipartite-edges",
            Method::Qap => "qap",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| BenchError::UnknownMethod(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BenchConfig {
    pub qap: QapOptions,
    pub astar: AstarOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub pair: String,
    pub method: Method,
    /// Cost of the path returned by the method.
    pub d: f64,
    /// `d` minus the proven exact value of the pair.
    pub e: Option<f64>,
    /// Solver wall time in seconds.
    pub t: f64,
    /// IPFP iterations summed over restarts.
    pub iters: Option<usize>,
    pub exact_hit: Option<bool>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    pair: &'a str,
    method: &'a str,
    d: f64,
    e: Option<f64>,
    t: String,
    iters: Option<usize>,
    exact_hit: Option<u8>,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

/// Runs every method on one pair. The exact value is only used for `e`
/// and `exact_hit` when the search proved optimality.
pub fn run_pair<M: CostModel>(pair: &BenchPair, methods: &[Method], model: &M, cfg: &BenchConfig) -> Vec<BenchRecord> {
    let (g1, g2) = (&pair.source, &pair.target);
    let mut records: Vec<BenchRecord> = Vec::with_capacity(methods.len());
    let mut exact = None;
    let mut ordered = methods.to_vec();
    ordered.sort_unstable();
    ordered.dedup();
    for method in ordered {
        let ((d, iters, optimal), t) = timed(|| match method {
            Method::Exact => {
                let r = astar_ged(g1, g2, model, &cfg.astar);
                (r.value, None, r.optimal)
            }
            Method::BipartiteNode => (bipartite_ged(g1, g2, model, BagStrategy::NodeOnly).value, None, false),
            Method::BipartiteEdges => (
                bipartite_ged(g1, g2, model, BagStrategy::IncidentEdges).value,
                None,
                false,
            ),
            Method::Qap => {
                let r = qap_ged(g1, g2, model, &cfg.qap);
                (r.value, Some(r.iterations()), false)
            }
        });
        if method == Method::Exact && optimal {
            exact = Some(d);
        }
        records.push(BenchRecord {
            pair: pair.id.clone(),
            method,
            d,
            e: exact.map(|x| d - x),
            t,
            iters,
            exact_hit: exact.map(|x| (d - x).abs() <= HIT_TOLERANCE),
        });
    }
    records
}

/// Runs every method on every pair; records are sorted by pair, then method.
pub fn run_benchmark<M: CostModel>(
    pairs: &[BenchPair],
    methods: &[Method],
    model: &M,
    cfg: &BenchConfig,
) -> Vec<BenchRecord> {
    #[cfg(feature = "parallel")]
    let nested: Vec<Vec<BenchRecord>> = {
        use rayon::prelude::*;
        pairs.par_iter().map(|p| run_pair(p, methods, model, cfg)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let nested: Vec<Vec<BenchRecord>> = pairs.iter().map(|p| run_pair(p, methods, model, cfg)).collect();
    let mut records: Vec<BenchRecord> = nested.into_iter().flatten().collect();
    records.sort_by(|a, b| a.pair.cmp(&b.pair).then(a.method.cmp(&b.method)));
    records
}

/// CSV text with a header, even when there are no records.
pub fn records_to_csv(records: &[BenchRecord]) -> Result<String, BenchError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(["pair", "method", "d", "e", "t", "iters", "exact_hit"])?;
    for r in records {
        w.serialize(CsvRow {
            pair: &r.pair,
            method: r.method.name(),
            d: r.d,
            e: r.e,
            t: format!("{:.6}", r.t),
            iters: r.iters,
            exact_hit: r.exact_hit.map(u8::from),
        })?;
    }
    let bytes = w.into_inner().map_err(|e| BenchError::Io {
        path: PathBuf::from("<csv>"),
        source: e.into_error(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Per-method averages.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    pub pairs: usize,
    pub avg_d: f64,
    /// Over pairs with a proven exact value.
    pub avg_e: Option<f64>,
    pub avg_t: f64,
    /// Fraction of pairs matching the exact value.
    pub hit_rate: Option<f64>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

pub fn summarize(records: &[BenchRecord]) -> Vec<MethodSummary> {
    let mut by_method: BTreeMap<Method, Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        by_method.entry(r.method).or_default().push(r);
    }
    by_method
        .into_iter()
        .map(|(method, rows)| MethodSummary {
            method,
            pairs: rows.len(),
            avg_d: mean(rows.iter().map(|r| r.d)).unwrap_or(0.0),
            avg_e: mean(rows.iter().filter_map(|r| r.e)),
            avg_t: mean(rows.iter().map(|r| r.t)).unwrap_or(0.0),
            hit_rate: mean(
                rows.iter()
                    .filter_map(|r| r.exact_hit)
                    .map(|h| if h { 1.0 } else { 0.0 }),
            ),
        })
        .collect()
}

/// Fixed-width summary table.
pub fn format_summary(summary: &[MethodSummary]) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
    let mut out = format!(
        "{:<16} {:>6} {:>10} {:>10} {:>12} {:>8}\n",
        "method", "pairs", "avg d", "avg e", "avg t (s)", "exact %"
    );
    for s in summary {
        out.push_str(&format!(
            "{:<16} {:>6} {:>10.4} {:>10} {:>12.6} {:>8}\n",
            s.method.name(),
            s.pairs,
            s.avg_d,
            opt(s.avg_e),
            s.avg_t,
            s.hit_rate
                .map_or_else(|| "-".to_string(), |h| format!("{:.1}", 100.0 * h)),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::ConstantCostModel;

    #[test]
    fn unrank_covers_all_pairs() {
        let n = 5;
        let all: Vec<_> = (0..n * (n - 1) / 2).map(|p| unrank_pair(p, n)).collect();
        let mut want = Vec::new();
        for s in 0..n {
            for d in s + 1..n {
                want.push((s, d));
            }
        }
        assert_eq!(all, want);
    }

    #[test]
    fn synth_pair_shape() {
        let spec = SynthSpec {
            n: 3,
            seed: 11,
            ..Default::default()
        };
        let (s, t) = gen_synth_pair(&spec).unwrap();
        assert_eq!(s.order(), 3);
        assert_eq!(t.order(), 2);
        assert_eq!(s.size(), 3);
        assert!(!s.is_directed());
        assert!(s.validate().is_empty() && t.validate().is_empty());
        assert_eq!(gen_synth_pair(&spec).unwrap(), (s, t));
    }

    #[test]
    fn synth_rejects_bad_specs() {
        let small = SynthSpec {
            n: 2,
            ..Default::default()
        };
        assert!(matches!(gen_synth_pair(&small), Err(BenchError::TooSmall(2))));
        let mono = SynthSpec {
            node_alphabet: 1,
            ..Default::default()
        };
        assert!(matches!(gen_synth_pair(&mono), Err(BenchError::AlphabetTooSmall(1))));
    }

    #[test]
    fn edge_count_follows_ratio() {
        let spec = SynthSpec {
            n: 20,
            rho: 1.05,
            ..Default::default()
        };
        let (s, _) = gen_synth_pair(&spec).unwrap();
        assert_eq!(s.size(), 21);
    }

    #[test]
    fn method_names_roundtrip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("astar".parse::<Method>().is_err());
    }

    #[test]
    fn empty_benchmark_has_header_only() {
        let csv = records_to_csv(&[]).unwrap();
        assert_eq!(csv, "pair,method,d,e,t,iters,exact_hit\n");
        assert!(summarize(&[]).is_empty());
    }

    #[test]
    fn records_and_summary() {
        let pairs: Vec<BenchPair> = gen_synth_pairs(
            &SynthSpec {
                n: 5,
                ..Default::default()
            },
            4,
        )
        .unwrap()
        .into_iter()
        .enumerate()
        .map(|(p, (source, target))| BenchPair {
            id: format!("{p:04}"),
            source,
            target,
        })
        .collect();
        let model = ConstantCostModel::unit();
        let records = run_benchmark(&pairs, &Method::ALL, &model, &BenchConfig::default());
        assert_eq!(records.len(), 16);
        for r in &records {
            let e = r.e.expect("exact is proven on tiny pairs");
            assert!(e >= -1e-9);
            assert_eq!(r.iters.is_some(), r.method == Method::Qap);
        }
        let summary = summarize(&records);
        assert_eq!(summary.len(), 4);
        assert_eq!(summary[0].avg_e, Some(0.0));
        assert_eq!(summary[0].hit_rate, Some(1.0));
        let csv = records_to_csv(&records).unwrap();
        assert_eq!(csv.lines().count(), 17);
        assert!(csv.lines().nth(1).unwrap().starts_with("0000,exact,"));
        assert!(format_summary(&summary).contains("bipartite-edges"));
    }
}
