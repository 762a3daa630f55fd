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

//! `ged`: graph edit distance from the command line.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ged_core::bench::{
    format_summary, gen_synth_pairs, read_dataset, records_to_csv, run_benchmark, summarize, write_dataset,
    BenchConfig, Method, SynthSpec,
};
use ged_core::bipartite::bipartite_ged;
use ged_core::cost::{clamp_substitutions, ConstantCostModel, CostModel};
use ged_core::exact::{astar_ged, AstarOptions, Heuristic, DEFAULT_BUDGET};
use ged_core::graph::{parse_graph_with_ids, Graph};
use ged_core::lsap::BagStrategy;
use ged_core::path::RestrictedEditPath;
use ged_core::qap::{qap_ged, QapInit, QapOptions};

#[derive(Parser)]
#[command(name = "ged", version, about = "Exact and approximate graph edit distance")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Upper bound from one node assignment.
    Bipartite {
        #[arg(long, value_enum, default_value = "edges")]
        strategy: Strategy,
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        costs: CostArgs,
    },
    /// Upper bound from IPFP descents on the quadratic formulation.
    Qap {
        #[command(flatten)]
        qap: QapArgs,
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        costs: CostArgs,
    },
    /// Exact distance by best-first search.
    Exact {
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        costs: CostArgs,
    },
    /// Writes synthetic source/target pairs.
    Gen {
        /// Nodes of each source graph.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Edges per node.
        #[arg(long, default_value_t = 1.05)]
        rho: f64,
        #[arg(long, default_value_t = 3)]
        node_labels: usize,
        #[arg(long, default_value_t = 2)]
        edge_labels: usize,
        /// Keep target node ids aligned with the source.
        #[arg(long)]
        no_permute: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Runs several methods on every pair of a dataset directory.
    Bench {
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "exact,bipartite-node,bipartite-edges,qap"
        )]
        methods: Vec<String>,
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        qap: QapArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        costs: CostArgs,
    },
}

#[derive(Args)]
struct PairArgs {
    g1: PathBuf,
    g2: PathBuf,
    /// Print the edit path, one operation per line.
    #[arg(long)]
    emit_path: bool,
}

#[derive(Args)]
struct CostArgs {
    #[arg(long, default_value_t = 1.0)]
    cvs: f64,
    #[arg(long, default_value_t = 1.0)]
    cvd: f64,
    #[arg(long, default_value_t = 1.0)]
    cvi: f64,
    #[arg(long, default_value_t = 1.0)]
    ces: f64,
    #[arg(long, default_value_t = 1.0)]
    ced: f64,
    #[arg(long, default_value_t = 1.0)]
    cei: f64,
    /// Cap substitutions at removal plus insertion.
    #[arg(long)]
    clamp_sub: bool,
}

impl CostArgs {
    fn model(&self) -> Result<Box<dyn CostModel>> {
        let m = ConstantCostModel::new(self.cvs, self.cvd, self.cvi, self.ces, self.ced, self.cei)?;
        Ok(if self.clamp_sub {
            Box::new(clamp_substitutions(m))
        } else {
            Box::new(m)
        })
    }
}

#[derive(Args)]
struct QapArgs {
    #[arg(long, value_enum, default_value = "bedges")]
    init: Init,
    /// Total runs; all but the first start from random assignments.
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    #[arg(long, default_value_t = 40)]
    kmax: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl QapArgs {
    fn options(&self) -> Result<QapOptions> {
        if self.restarts < 1 {
            bail!("--restarts must be at least 1");
        }
        if self.kmax < 1 {
            bail!("--kmax must be at least 1");
        }
        Ok(QapOptions {
            init: match self.init {
                Init::Random => QapInit::Random,
                Init::Bnode => QapInit::BipartiteNode,
                Init::Bedges => QapInit::BipartiteEdges,
            },
            restarts: self.restarts,
            k_max: self.kmax,
            tol: self.tol,
            seed: self.seed,
        })
    }
}

#[derive(Args)]
struct SearchArgs {
    /// Maximum number of expanded search nodes.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Lower bound used to order the search.
    #[arg(long = "h", value_enum, default_value = "lsap")]
    heuristic: HeuristicArg,
}

impl SearchArgs {
    fn options(&self) -> AstarOptions {
        AstarOptions {
            budget: self.budget,
            heuristic: match self.heuristic {
                HeuristicArg::Lsap => Heuristic::NodeAssignment,
                HeuristicArg::None => Heuristic::None,
            },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Node,
    Edges,
}

#[derive(Clone, Copy, ValueEnum)]
enum Init {
    Random,
    Bnode,
    Bedges,
}

#[derive(Clone, Copy, ValueEnum)]
enum HeuristicArg {
    Lsap,
    None,
}

struct LoadedPair {
    g1: Graph,
    g2: Graph,
    ids1: Vec<i64>,
    ids2: Vec<i64>,
}

fn load(path: &Path) -> Result<(Graph, Vec<i64>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_graph_with_ids(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_pair(p: &PairArgs) -> Result<LoadedPair> {
    let (g1, ids1) = load(&p.g1)?;
    let (g2, ids2) = load(&p.g2)?;
    Ok(LoadedPair { g1, g2, ids1, ids2 })
}

fn id_map(ids: &[i64]) -> String {
    ids.iter()
        .enumerate()
        .map(|(i, id)| format!("{i}={id}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn report(lines: &[(&str, String)], pair: &LoadedPair, path: &RestrictedEditPath, emit: bool) -> String {
    let mut out = String::new();
    for (key, value) in lines {
        let _ = writeln!(out, "{key} {value}");
    }
    if emit {
        let _ = writeln!(out, "# g1 ids: {}", id_map(&pair.ids1));
        let _ = writeln!(out, "# g2 ids: {}", id_map(&pair.ids2));
        out.push_str(&path.to_text());
    }
    out
}

fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Bipartite { strategy, pair, costs } => {
            let model = costs.model()?;
            let p = load_pair(&pair)?;
            let strategy = match strategy {
                Strategy::Node => BagStrategy::NodeOnly,
                Strategy::Edges => BagStrategy::IncidentEdges,
            };
            let r = bipartite_ged(&p.g1, &p.g2, &model.as_ref(), strategy);
            let lines = [("value", r.value.to_string()), ("lsap", r.lsap_value.to_string())];
            Ok(report(&lines, &p, &r.path, pair.emit_path))
        }
        Command::Qap { qap, pair, costs } => {
            let model = costs.model()?;
            let opts = qap.options()?;
            let p = load_pair(&pair)?;
            let r = qap_ged(&p.g1, &p.g2, &model.as_ref(), &opts);
            let relaxed = r.runs.iter().map(|run| run.relaxed_value).fold(f64::INFINITY, f64::min);
            let lines = [
                ("value", r.value.to_string()),
                ("relaxed", relaxed.to_string()),
                ("iterations", r.iterations().to_string()),
                ("runs", r.runs.len().to_string()),
            ];
            Ok(report(&lines, &p, &r.path, pair.emit_path))
        }
        Command::Exact { search, pair, costs } => {
            let model = costs.model()?;
            let p = load_pair(&pair)?;
            let r = astar_ged(&p.g1, &p.g2, &model.as_ref(), &search.options());
            let lines = [
                ("value", r.value.to_string()),
                ("optimal", r.optimal.to_string()),
                ("expanded", r.expanded.to_string()),
            ];
            Ok(report(&lines, &p, &r.path, pair.emit_path))
        }
        Command::Gen {
            n,
            count,
            seed,
            rho,
            node_labels,
            edge_labels,
            no_permute,
            out,
        } => {
            let spec = SynthSpec {
                n,
                node_alphabet: node_labels,
                edge_alphabet: edge_labels,
                rho,
                permute: !no_permute,
                seed,
            };
            let ids = write_dataset(&out, &gen_synth_pairs(&spec, count)?)?;
            Ok(format!("wrote {} pairs to {}\n", ids.len(), out.display()))
        }
        Command::Bench {
            methods,
            dir,
            out,
            qap,
            search,
            costs,
        } => {
            let methods = methods
                .iter()
                .map(|m| m.trim().parse::<Method>())
                .collect::<Result<Vec<_>, _>>()?;
            let model = costs.model()?;
            let cfg = BenchConfig {
                qap: qap.options()?,
                astar: search.options(),
            };
            let (pairs, errors) = read_dataset(&dir)?;
            for e in &errors {
                eprintln!("skipped: {e}");
            }
            let records = run_benchmark(&pairs, &methods, &model.as_ref(), &cfg);
            fs::write(&out, records_to_csv(&records)?).with_context(|| format!("writing {}", out.display()))?;
            Ok(format_summary(&summarize(&records)))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
