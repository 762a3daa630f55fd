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

//! Simple labeled graphs and the line-oriented GEDG text format.
//!
//! A [`Graph`] has dense node ids `0..n`, no self-loops and at most one arc
//! per ordered pair. Undirected graphs store every edge as two arcs carrying
//! the same label, so edge costs can always be looked up on ordered pairs.
//!
//! ```text
//! # comment
//! graph undirected
//! v 0 C
//! v 1 O
//! e 0 1 s
//! ```

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

/// Opaque, whitespace-free label token.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(String);

impl Label {
    pub fn new(value: impl Into<String>) -> Result<Self, GraphError> {
        let value = value.into();
        if value.is_empty() || value.chars().any(char::is_whitespace) {
            return Err(GraphError::InvalidLabel(value));
        }
        Ok(Label(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arc {
    pub src: usize,
    pub dst: usize,
    pub label: Label,
}

/// A structural problem found by [`Graph::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    SelfLoop {
        node: usize,
    },
    DuplicateArc {
        src: usize,
        dst: usize,
    },
    UnknownNode {
        src: usize,
        dst: usize,
    },
    /// Undirected graph without the reverse arc.
    MissingReverse {
        src: usize,
        dst: usize,
    },
    /// Undirected graph whose two arcs carry different labels.
    AsymmetricLabel {
        src: usize,
        dst: usize,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid label {0:?}")]
    InvalidLabel(String),
    #[error("invalid graph: {0:?}")]
    Invalid(Vec<Violation>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate node id {id}")]
    DuplicateNode { line: usize, id: i64 },
    #[error("line {line}: edge references unknown node {id}")]
    UnknownNode { line: usize, id: i64 },
    #[error("line {line}: self-loop on node {id}")]
    SelfLoop { line: usize, id: i64 },
    #[error("line {line}: duplicate edge {src} -> {dst}")]
    DuplicateEdge { line: usize, src: i64, dst: i64 },
    #[error("line {line}: undirected edge {src} - {dst} already has a different label")]
    LabelConflict { line: usize, src: i64, dst: i64 },
}

/// Immutable simple labeled graph.
#[derive(Clone)]
pub struct Graph {
    directed: bool,
    nodes: Vec<Label>,
    /// Sorted by `(src, dst)`.
    arcs: Vec<Arc>,
    lookup: HashMap<(usize, usize), usize>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.directed == other.directed && self.nodes == other.nodes && self.arcs == other.arcs
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("directed", &self.directed)
            .field("nodes", &self.nodes)
            .field("arcs", &self.arcs)
            .finish()
    }
}

impl Graph {
    /// Builds a validated graph. For undirected graphs `arcs` must already
    /// contain both directions; see [`GraphBuilder`] for a friendlier entry.
    pub fn new(directed: bool, nodes: Vec<Label>, arcs: Vec<Arc>) -> Result<Self, GraphError> {
        let g = Self::new_unchecked(directed, nodes, arcs);
        let violations = g.validate();
        if violations.is_empty() {
            Ok(g)
        } else {
            Err(GraphError::Invalid(violations))
        }
    }

    /// Builds a graph without checking invariants. Only useful to feed
    /// [`Graph::validate`]; every other operation assumes a valid graph.
    pub fn new_unchecked(directed: bool, nodes: Vec<Label>, mut arcs: Vec<Arc>) -> Self {
        arcs.sort();
        let n = nodes.len();
        let mut lookup = HashMap::with_capacity(arcs.len());
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for (idx, a) in arcs.iter().enumerate() {
            lookup.entry((a.src, a.dst)).or_insert(idx);
            if a.src < n && a.dst < n && a.src != a.dst {
                out_adj[a.src].push(a.dst);
                in_adj[a.dst].push(a.src);
            }
        }
        for adj in in_adj.iter_mut() {
            adj.sort_unstable();
            adj.dedup();
        }
        for adj in out_adj.iter_mut() {
            adj.dedup();
        }
        Graph {
            directed,
            nodes,
            arcs,
            lookup,
            out_adj,
            in_adj,
        }
    }

    /// Empty list iff every invariant holds.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.nodes.len();
        let mut out = Vec::new();
        for (idx, a) in self.arcs.iter().enumerate() {
            if a.src >= n || a.dst >= n {
                out.push(Violation::UnknownNode { src: a.src, dst: a.dst });
                continue;
            }
            if a.src == a.dst {
                out.push(Violation::SelfLoop { node: a.src });
            }
            if idx > 0 && self.arcs[idx - 1].src == a.src && self.arcs[idx - 1].dst == a.dst {
                out.push(Violation::DuplicateArc { src: a.src, dst: a.dst });
            }
            if !self.directed && a.src != a.dst {
                match self.edge(a.dst, a.src) {
                    None => out.push(Violation::MissingReverse { src: a.src, dst: a.dst }),
                    Some(l) if *l != a.label => out.push(Violation::AsymmetricLabel { src: a.src, dst: a.dst }),
                    Some(_) => {}
                }
            }
        }
        out
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Number of nodes.
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn label(&self, node: usize) -> &Label {
        &self.nodes[node]
    }

    pub fn labels(&self) -> &[Label] {
        &self.nodes
    }

    /// Label of arc `(src, dst)`, if present.
    pub fn edge(&self, src: usize, dst: usize) -> Option<&Label> {
        self.lookup.get(&(src, dst)).map(|&idx| &self.arcs[idx].label)
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.lookup.contains_key(&(src, dst))
    }

    /// All stored arcs; an undirected edge appears twice.
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Edges as seen by edit operations: every arc when `directed`,
    /// otherwise one `(src, dst)` per edge with `src < dst`.
    pub fn edges_as(&self, directed: bool) -> impl Iterator<Item = &Arc> + '_ {
        self.arcs.iter().filter(move |a| directed || a.src < a.dst)
    }

    /// Edges in this graph's own orientation convention.
    pub fn edges(&self) -> impl Iterator<Item = &Arc> + '_ {
        self.edges_as(self.directed)
    }

    /// Number of edges (undirected edges counted once).
    pub fn size(&self) -> usize {
        if self.directed {
            self.arcs.len()
        } else {
            self.arcs.len() / 2
        }
    }

    /// Successors, sorted.
    pub fn out_neighbors(&self, node: usize) -> &[usize] {
        &self.out_adj[node]
    }

    /// Predecessors, sorted.
    pub fn in_neighbors(&self, node: usize) -> &[usize] {
        &self.in_adj[node]
    }

    /// Number of incident edges (in + out for directed graphs).
    pub fn degree(&self, node: usize) -> usize {
        if self.directed {
            self.out_adj[node].len() + self.in_adj[node].len()
        } else {
            self.out_adj[node].len()
        }
    }

    /// Returns the graph with node `old` renamed to `perm[old]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.order());
        let mut inverse = vec![0; perm.len()];
        for (old, &new) in perm.iter().enumerate() {
            inverse[new] = old;
        }
        let nodes = inverse.iter().map(|&old| self.nodes[old].clone()).collect();
        let arcs = self
            .arcs
            .iter()
            .map(|a| Arc {
                src: perm[a.src],
                dst: perm[a.dst],
                label: a.label.clone(),
            })
            .collect();
        Graph::new_unchecked(self.directed, nodes, arcs)
    }

    /// Induced subgraph on `keep` (in the given order, renumbered densely).
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut remap = vec![usize::MAX; self.order()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let nodes = keep.iter().map(|&i| self.nodes[i].clone()).collect();
        let arcs = self
            .arcs
            .iter()
            .filter(|a| remap[a.src] != usize::MAX && remap[a.dst] != usize::MAX)
            .map(|a| Arc {
                src: remap[a.src],
                dst: remap[a.dst],
                label: a.label.clone(),
            })
            .collect();
        Graph::new_unchecked(self.directed, nodes, arcs)
    }

    /// Same graph with one node relabeled.
    pub fn relabeled(&self, node: usize, label: Label) -> Graph {
        let mut nodes = self.nodes.clone();
        nodes[node] = label;
        Graph::new_unchecked(self.directed, nodes, self.arcs.clone())
    }
}

/// Incremental construction with validation at [`GraphBuilder::build`].
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    directed: bool,
    nodes: Vec<Label>,
    arcs: Vec<Arc>,
}

impl GraphBuilder {
    pub fn new(directed: bool) -> Self {
        GraphBuilder {
            directed,
            nodes: Vec::new(),
            arcs: Vec::new(),
        }
    }

    /// Adds a node and returns its id.
    pub fn node(&mut self, label: Label) -> usize {
        self.nodes.push(label);
        self.nodes.len() - 1
    }

    /// Adds an edge; for undirected graphs both arcs are stored.
    pub fn edge(&mut self, src: usize, dst: usize, label: Label) -> &mut Self {
        if !self.directed {
            self.arcs.push(Arc {
                src: dst,
                dst: src,
                label: label.clone(),
            });
        }
        self.arcs.push(Arc { src, dst, label });
        self
    }

    pub fn build(self) -> Result<Graph, GraphError> {
        Graph::new(self.directed, self.nodes, self.arcs)
    }
}

/// Small helper for tests and examples: panics on invalid labels or graphs.
pub fn graph_from(directed: bool, nodes: &[&str], edges: &[(usize, usize, &str)]) -> Graph {
    let mut b = GraphBuilder::new(directed);
    for l in nodes {
        b.node(Label::new(*l).expect("label"));
    }
    for &(s, d, l) in edges {
        b.edge(s, d, Label::new(l).expect("label"));
    }
    b.build().expect("valid graph")
}

/// Parses GEDG text. Node ids are densified in order of appearance.
pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    parse_graph_with_ids(text).map(|(g, _)| g)
}

/// Like [`parse_graph`], also returning the original id of every dense node.
pub fn parse_graph_with_ids(text: &str) -> Result<(Graph, Vec<i64>), ParseError> {
    let mut directed = None;
    let mut nodes: Vec<Label> = Vec::new();
    let mut original: Vec<i64> = Vec::new();
    let mut ids: HashMap<i64, usize> = HashMap::new();
    let mut arcs: HashMap<(usize, usize), Label> = HashMap::new();

    let syntax = |line: usize, message: &str| ParseError::Syntax {
        line,
        message: message.to_string(),
    };

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let Some(is_directed) = directed else {
            directed = match fields.as_slice() {
                ["graph", "directed"] => Some(true),
                ["graph", "undirected"] => Some(false),
                _ => return Err(syntax(line, "expected `graph directed` or `graph undirected`")),
            };
            continue;
        };
        let parse_id = |s: &str| {
            s.parse::<i64>()
                .map_err(|_| syntax(line, &format!("invalid node id {s:?}")))
        };
        let parse_label = |s: &str| Label::new(s).map_err(|_| syntax(line, &format!("invalid label {s:?}")));
        match fields.as_slice() {
            ["v", id, label] => {
                let id = parse_id(id)?;
                if ids.contains_key(&id) {
                    return Err(ParseError::DuplicateNode { line, id });
                }
                ids.insert(id, nodes.len());
                original.push(id);
                nodes.push(parse_label(label)?);
            }
            ["e", src, dst, label] => {
                let (src, dst) = (parse_id(src)?, parse_id(dst)?);
                let label = parse_label(label)?;
                let s = *ids.get(&src).ok_or(ParseError::UnknownNode { line, id: src })?;
                let d = *ids.get(&dst).ok_or(ParseError::UnknownNode { line, id: dst })?;
                if s == d {
                    return Err(ParseError::SelfLoop { line, id: src });
                }
                if let Some(existing) = arcs.get(&(s, d)) {
                    return Err(if !is_directed && *existing != label {
                        ParseError::LabelConflict { line, src, dst }
                    } else {
                        ParseError::DuplicateEdge { line, src, dst }
                    });
                }
                if !is_directed {
                    arcs.insert((d, s), label.clone());
                }
                arcs.insert((s, d), label);
            }
            ["graph", ..] => return Err(syntax(line, "repeated graph header")),
            _ => return Err(syntax(line, "expected `v <id> <label>` or `e <src> <dst> <label>`")),
        }
    }
    let directed = directed.ok_or_else(|| syntax(text.lines().count().max(1), "missing graph header"))?;
    let arcs = arcs
        .into_iter()
        .map(|((src, dst), label)| Arc { src, dst, label })
        .collect();
    // Every invariant was enforced line by line above.
    Ok((Graph::new_unchecked(directed, nodes, arcs), original))
}

/// Canonical GEDG text; undirected edges are written once with `src < dst`.
pub fn serialize_graph(g: &Graph) -> String {
    let mut out = String::new();
    let kind = if g.is_directed() { "directed" } else { "undirected" };
    let _ = writeln!(out, "graph {kind}");
    for (i, l) in g.labels().iter().enumerate() {
        let _ = writeln!(out, "v {i} {l}");
    }
    for a in g.edges() {
        let _ = writeln!(out, "e {} {} {}", a.src, a.dst, a.label);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> Label {
        Label::new(s).unwrap()
    }

    #[test]
    fn parse_undirected_stores_both_arcs() {
        let g = parse_graph("graph undirected\nv 0 C\nv 1 O\ne 0 1 s").unwrap();
        assert_eq!(g.order(), 2);
        assert!(!g.is_directed());
        assert_eq!(g.edge(0, 1), Some(&l("s")));
        assert_eq!(g.edge(1, 0), Some(&l("s")));
        assert_eq!(g.arcs().len(), 2);
        assert_eq!(g.size(), 1);
    }

    #[test]
    fn parse_directed_without_edges() {
        let g = parse_graph("graph directed\nv 0 A").unwrap();
        assert_eq!(g.order(), 1);
        assert!(g.arcs().is_empty());
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            parse_graph("graph directed\nv 0 A\ne 0 0 x"),
            Err(ParseError::SelfLoop { line: 3, id: 0 })
        );
        assert_eq!(
            parse_graph("graph directed\nv 0 A\nv 0 B"),
            Err(ParseError::DuplicateNode { line: 3, id: 0 })
        );
        assert_eq!(
            parse_graph("graph directed\nv 0 A\ne 0 1 x"),
            Err(ParseError::UnknownNode { line: 3, id: 1 })
        );
        assert_eq!(
            parse_graph("graph directed\nv 0 A\nv 1 A\ne 0 1 x\ne 0 1 x"),
            Err(ParseError::DuplicateEdge {
                line: 5,
                src: 0,
                dst: 1
            })
        );
        assert_eq!(
            parse_graph("graph undirected\nv 0 A\nv 1 A\ne 0 1 x\ne 1 0 y"),
            Err(ParseError::LabelConflict {
                line: 5,
                src: 1,
                dst: 0
            })
        );
        assert!(matches!(parse_graph("v 0 A"), Err(ParseError::Syntax { line: 1, .. })));
        assert!(matches!(
            parse_graph("graph directed\nv zero A"),
            Err(ParseError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_graph("# only a comment\n"),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn directed_reverse_edge_is_distinct() {
        let g = parse_graph("graph directed\nv 0 A\nv 1 A\ne 0 1 x\ne 1 0 y").unwrap();
        assert_eq!(g.edge(0, 1), Some(&l("x")));
        assert_eq!(g.edge(1, 0), Some(&l("y")));
        assert_eq!(g.degree(0), 2);
    }

    #[test]
    fn sparse_ids_are_densified() {
        let text = "graph undirected\n# ids need not be dense\nv 10 A\n\nv 3 B\ne 3 10 x\n";
        let (g, ids) = parse_graph_with_ids(text).unwrap();
        assert_eq!(ids, vec![10, 3]);
        assert_eq!(g.label(0), &l("A"));
        assert_eq!(g.edge(0, 1), Some(&l("x")));
    }

    #[test]
    fn serialize_canonical_form() {
        let g = parse_graph("graph directed\nv 0 A").unwrap();
        assert_eq!(serialize_graph(&g), "graph directed\nv 0 A\n");
        let g = parse_graph("graph undirected\nv 0 C\nv 1 O\ne 1 0 s").unwrap();
        assert_eq!(serialize_graph(&g), "graph undirected\nv 0 C\nv 1 O\ne 0 1 s\n");
    }

    #[test]
    fn validate_reports_violations() {
        let ok = graph_from(false, &["A", "B"], &[(0, 1, "x")]);
        assert!(ok.validate().is_empty());

        let looped = Graph::new_unchecked(
            true,
            vec![l("A"), l("B"), l("C")],
            vec![Arc {
                src: 2,
                dst: 2,
                label: l("x"),
            }],
        );
        assert_eq!(looped.validate(), vec![Violation::SelfLoop { node: 2 }]);

        let one_way = Graph::new_unchecked(
            false,
            vec![l("A"), l("B")],
            vec![Arc {
                src: 0,
                dst: 1,
                label: l("x"),
            }],
        );
        assert_eq!(one_way.validate(), vec![Violation::MissingReverse { src: 0, dst: 1 }]);

        let dup = Graph::new_unchecked(
            true,
            vec![l("A"), l("B")],
            vec![
                Arc {
                    src: 0,
                    dst: 1,
                    label: l("x"),
                },
                Arc {
                    src: 0,
                    dst: 1,
                    label: l("y"),
                },
            ],
        );
        assert!(dup.validate().contains(&Violation::DuplicateArc { src: 0, dst: 1 }));

        let dangling = Graph::new_unchecked(
            true,
            vec![l("A")],
            vec![Arc {
                src: 0,
                dst: 4,
                label: l("y"),
            }],
        );
        assert_eq!(dangling.validate(), vec![Violation::UnknownNode { src: 0, dst: 4 }]);
    }

    #[test]
    fn labels_reject_whitespace() {
        assert!(Label::new("").is_err());
        assert!(Label::new("a b").is_err());
        assert!(Label::new("ab").is_ok());
    }

    #[test]
    fn permute_and_induce() {
        let g = graph_from(false, &["A", "B", "C"], &[(0, 1, "x"), (1, 2, "y")]);
        let p = g.permuted(&[2, 0, 1]);
        assert_eq!(p.label(2), &l("A"));
        assert_eq!(p.edge(2, 0), Some(&l("x")));
        assert!(p.validate().is_empty());
        let sub = g.induced(&[2, 1]);
        assert_eq!(sub.order(), 2);
        assert_eq!(sub.edge(0, 1), Some(&l("y")));
        assert!(sub.validate().is_empty());
    }
}
