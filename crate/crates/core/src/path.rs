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

//! ε-assignments and the restricted edit paths they induce.
//!
//! An [`EpsAssignment`] is an injective partial map from the nodes of `G1`
//! to the nodes of `G2`; unmapped nodes of `G1` are removed and nodes of
//! `G2` outside the image are inserted. Edge operations follow from the node
//! map, which gives a one-to-one correspondence with restricted edit paths
//! (no element edited twice, nothing removed and re-inserted).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::cost::{CostModel, PathCardinals};
use crate::graph::{Graph, Label};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PathError {
    #[error("node {node} of G1 mapped to {target}, but G2 has only {m} nodes")]
    OutOfRange { node: usize, target: usize, m: usize },
    #[error("nodes {first} and {second} of G1 both mapped to {target}")]
    NotInjective { first: usize, second: usize, target: usize },
    #[error("row {row} is mapped to forbidden column {col}")]
    ForbiddenEntry { row: usize, col: usize },
    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("invalid edit path: {0}")]
    InvalidPath(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// Representative of an ε-assignment class.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EpsAssignment {
    m: usize,
    sub: Vec<Option<usize>>,
    inv: Vec<Option<usize>>,
}

impl EpsAssignment {
    /// `sub[i] = Some(k)` substitutes node `i` of G1 by node `k` of G2,
    /// `None` removes it. `m` is the order of G2.
    pub fn from_mapping(m: usize, sub: Vec<Option<usize>>) -> Result<Self, PathError> {
        let mut inv = vec![None; m];
        for (i, s) in sub.iter().enumerate() {
            if let Some(k) = *s {
                if k >= m {
                    return Err(PathError::OutOfRange { node: i, target: k, m });
                }
                if let Some(first) = inv[k] {
                    return Err(PathError::NotInjective {
                        first,
                        second: i,
                        target: k,
                    });
                }
                inv[k] = Some(i);
            }
        }
        Ok(EpsAssignment { m, sub, inv })
    }

    /// Remove everything, insert everything.
    pub fn empty(n: usize, m: usize) -> Self {
        EpsAssignment {
            m,
            sub: vec![None; n],
            inv: vec![None; m],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_mapping(n, (0..n).map(Some).collect()).expect("identity is injective")
    }

    /// Reads a full permutation of the `(n + m)` ε-matrix layout. Only the
    /// first `n` rows matter; the remaining rows are checked for legality.
    pub fn from_permutation(n: usize, m: usize, perm: &[usize]) -> Result<Self, PathError> {
        let size = n + m;
        if perm.len() != size {
            return Err(PathError::NotAPermutation(size));
        }
        let mut seen = vec![false; size];
        for &c in perm {
            if c >= size || std::mem::replace(&mut seen[c], true) {
                return Err(PathError::NotAPermutation(size));
            }
        }
        for (row, &col) in perm.iter().enumerate() {
            if !is_allowed(n, m, row, col) {
                return Err(PathError::ForbiddenEntry { row, col });
            }
        }
        let sub = perm[..n].iter().map(|&col| (col < m).then_some(col)).collect();
        Self::from_mapping(m, sub)
    }

    /// Canonical permutation of the class: ε-rows of substituted targets
    /// are sent to the ε-column of their preimage.
    pub fn to_permutation(&self) -> Vec<usize> {
        let (n, m) = (self.n(), self.m);
        let mut perm = Vec::with_capacity(n + m);
        for (i, s) in self.sub.iter().enumerate() {
            perm.push(s.unwrap_or(m + i));
        }
        for (k, pre) in self.inv.iter().enumerate() {
            perm.push(match pre {
                None => k,
                Some(i) => m + i,
            });
        }
        perm
    }

    /// Order of G1.
    pub fn n(&self) -> usize {
        self.sub.len()
    }

    /// Order of G2.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn image(&self, i: usize) -> Option<usize> {
        self.sub[i]
    }

    pub fn preimage(&self, k: usize) -> Option<usize> {
        self.inv[k]
    }

    pub fn mapping(&self) -> &[Option<usize>] {
        &self.sub
    }

    pub fn substituted(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.sub.iter().enumerate().filter_map(|(i, s)| s.map(|k| (i, k)))
    }

    pub fn removed(&self) -> impl Iterator<Item = usize> + '_ {
        self.sub
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.is_none().then_some(i))
    }

    pub fn inserted(&self) -> impl Iterator<Item = usize> + '_ {
        self.inv
            .iter()
            .enumerate()
            .filter_map(|(k, p)| p.is_none().then_some(k))
    }

    /// Row-major 0/1 matrix of the canonical permutation.
    pub fn to_matrix(&self) -> Vec<f64> {
        let size = self.n() + self.m;
        let mut x = vec![0.0; size * size];
        for (row, col) in self.to_permutation().into_iter().enumerate() {
            x[row * size + col] = 1.0;
        }
        x
    }
}

/// Whether augmented row `row` may map to augmented column `col`.
pub fn is_allowed(n: usize, m: usize, row: usize, col: usize) -> bool {
    match (row < n, col < m) {
        (true, true) | (false, false) => true,
        (true, false) => col - m == row,
        (false, true) => row - n == col,
    }
}

/// One elementary edit operation. Node ids of removals and substitution
/// sources refer to G1, those of insertions and substitution targets to G2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EditOp {
    RemoveNode(usize),
    RemoveEdge(usize, usize),
    SubNode(usize, usize),
    SubEdge((usize, usize), (usize, usize)),
    InsertNode(usize),
    InsertEdge(usize, usize),
}

impl fmt::Display for EditOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            EditOp::RemoveNode(i) => write!(f, "rn {i}"),
            EditOp::RemoveEdge(i, j) => write!(f, "re {i} {j}"),
            EditOp::SubNode(i, k) => write!(f, "sn {i} {k}"),
            EditOp::SubEdge((i, j), (k, l)) => write!(f, "se {i} {j} {k} {l}"),
            EditOp::InsertNode(k) => write!(f, "in {k}"),
            EditOp::InsertEdge(k, l) => write!(f, "ie {k} {l}"),
        }
    }
}

impl FromStr for EditOp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fields: Vec<&str> = s.split_whitespace().collect();
        let nums = fields
            .iter()
            .skip(1)
            .map(|f| f.parse::<usize>().map_err(|_| format!("invalid index {f:?}")))
            .collect::<Result<Vec<_>, _>>()?;
        match (fields.first().copied(), nums.as_slice()) {
            (Some("rn"), &[i]) => Ok(EditOp::RemoveNode(i)),
            (Some("re"), &[i, j]) => Ok(EditOp::RemoveEdge(i, j)),
            (Some("sn"), &[i, k]) => Ok(EditOp::SubNode(i, k)),
            (Some("se"), &[i, j, k, l]) => Ok(EditOp::SubEdge((i, j), (k, l))),
            (Some("in"), &[k]) => Ok(EditOp::InsertNode(k)),
            (Some("ie"), &[k, l]) => Ok(EditOp::InsertEdge(k, l)),
            _ => Err(format!("unrecognized operation {s:?}")),
        }
    }
}

/// Parses one operation per line; blank lines and `#` comments are skipped.
pub fn parse_ops(text: &str) -> Result<Vec<EditOp>, PathError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(idx, l)| {
            l.parse()
                .map_err(|message| PathError::Syntax { line: idx + 1, message })
        })
        .collect()
}

/// A restricted edit path in canonical order: removals (edges before
/// nodes), substitutions (nodes before edges), insertions (nodes before
/// edges). Identity substitutions are stored explicitly. On undirected
/// pairs each edge operation appears once, with `src < dst` on the G1 side
/// for removals and substitutions and on the G2 side for insertions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RestrictedEditPath {
    pub n1: usize,
    pub n2: usize,
    pub directed: bool,
    pub edge_removals: Vec<(usize, usize)>,
    pub node_removals: Vec<usize>,
    pub node_subs: Vec<(usize, usize)>,
    pub edge_subs: Vec<((usize, usize), (usize, usize))>,
    pub node_inserts: Vec<usize>,
    pub edge_inserts: Vec<(usize, usize)>,
}

impl RestrictedEditPath {
    pub fn ops(&self) -> Vec<EditOp> {
        let mut ops = Vec::with_capacity(self.len());
        ops.extend(self.edge_removals.iter().map(|&(i, j)| EditOp::RemoveEdge(i, j)));
        ops.extend(self.node_removals.iter().map(|&i| EditOp::RemoveNode(i)));
        ops.extend(self.node_subs.iter().map(|&(i, k)| EditOp::SubNode(i, k)));
        ops.extend(self.edge_subs.iter().map(|&(a, b)| EditOp::SubEdge(a, b)));
        ops.extend(self.node_inserts.iter().map(|&k| EditOp::InsertNode(k)));
        ops.extend(self.edge_inserts.iter().map(|&(k, l)| EditOp::InsertEdge(k, l)));
        ops
    }

    pub fn len(&self) -> usize {
        self.edge_removals.len()
            + self.node_removals.len()
            + self.node_subs.len()
            + self.edge_subs.len()
            + self.node_inserts.len()
            + self.edge_inserts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Canonical path from an arbitrary ordering of restricted-path operations.
    pub fn from_ops(n1: usize, n2: usize, directed: bool, ops: &[EditOp]) -> Self {
        let mut p = RestrictedEditPath {
            n1,
            n2,
            directed,
            ..Default::default()
        };
        for op in ops {
            match *op {
                EditOp::RemoveEdge(i, j) => p.edge_removals.push(normalize(directed, (i, j))),
                EditOp::RemoveNode(i) => p.node_removals.push(i),
                EditOp::SubNode(i, k) => p.node_subs.push((i, k)),
                EditOp::SubEdge((i, j), (k, l)) => p.edge_subs.push(if directed || i < j {
                    ((i, j), (k, l))
                } else {
                    ((j, i), (l, k))
                }),
                EditOp::InsertNode(k) => p.node_inserts.push(k),
                EditOp::InsertEdge(k, l) => p.edge_inserts.push(normalize(directed, (k, l))),
            }
        }
        p.edge_removals.sort_unstable();
        p.node_removals.sort_unstable();
        p.node_subs.sort_unstable();
        p.edge_subs.sort_unstable();
        p.node_inserts.sort_unstable();
        p.edge_inserts.sort_unstable();
        p
    }

    /// One operation per line in canonical order.
    pub fn to_text(&self) -> String {
        self.ops().iter().map(|op| format!("{op}\n")).collect()
    }

    /// Cardinals of this path (edges counted per edit operation).
    pub fn cardinals<M: CostModel>(&self, g1: &Graph, g2: &Graph, model: &M) -> PathCardinals {
        PathCardinals {
            nodes1: g1.order(),
            edges1: g1.edges_as(self.directed).count(),
            kept_nodes1: self.node_subs.len(),
            kept_edges1: self.edge_subs.len(),
            nodes2: g2.order(),
            edges2: g2.edges_as(self.directed).count(),
            kept_nodes2: self.node_subs.len(),
            kept_edges2: self.edge_subs.len(),
            relabeled_nodes: self
                .node_subs
                .iter()
                .filter(|&&(i, k)| model.node_sub(g1.label(i), g2.label(k)) != 0.0)
                .count(),
            relabeled_edges: self
                .edge_subs
                .iter()
                .filter(|&&((i, j), (k, l))| model.edge_sub(edge_label(g1, i, j), edge_label(g2, k, l)) != 0.0)
                .count(),
        }
    }
}

fn normalize(directed: bool, (a, b): (usize, usize)) -> (usize, usize) {
    if directed || a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn edge_label(g: &Graph, i: usize, j: usize) -> &Label {
    g.edge(i, j).expect("edit path refers to an existing edge")
}

/// Whether a pair of graphs is handled arc by arc. Mixed pairs are
/// treated as directed.
pub fn pair_is_directed(g1: &Graph, g2: &Graph) -> bool {
    g1.is_directed() || g2.is_directed()
}

/// The restricted edit path induced by an ε-assignment.
pub fn assignment_to_path(a: &EpsAssignment, g1: &Graph, g2: &Graph) -> RestrictedEditPath {
    assert_eq!(a.n(), g1.order(), "assignment does not match G1");
    assert_eq!(a.m(), g2.order(), "assignment does not match G2");
    let directed = pair_is_directed(g1, g2);
    let mut p = RestrictedEditPath {
        n1: g1.order(),
        n2: g2.order(),
        directed,
        ..Default::default()
    };
    p.node_subs = a.substituted().collect();
    p.node_removals = a.removed().collect();
    p.node_inserts = a.inserted().collect();
    for e in g1.edges_as(directed) {
        match (a.image(e.src), a.image(e.dst)) {
            (Some(k), Some(l)) if g2.has_edge(k, l) => p.edge_subs.push(((e.src, e.dst), (k, l))),
            _ => p.edge_removals.push((e.src, e.dst)),
        }
    }
    for e in g2.edges_as(directed) {
        let kept = match (a.preimage(e.src), a.preimage(e.dst)) {
            (Some(i), Some(j)) => g1.has_edge(i, j),
            _ => false,
        };
        if !kept {
            p.edge_inserts.push((e.src, e.dst));
        }
    }
    p
}

/// The node map encoded by a restricted edit path.
pub fn path_to_assignment(p: &RestrictedEditPath) -> Result<EpsAssignment, PathError> {
    let mut sub = vec![None; p.n1];
    let mut decided = vec![false; p.n1];
    let invalid = |msg: String| Err(PathError::InvalidPath(msg));
    for &(i, k) in &p.node_subs {
        if i >= p.n1 || std::mem::replace(&mut decided[i], true) {
            return invalid(format!("node {i} of G1 substituted twice or out of range"));
        }
        sub[i] = Some(k);
    }
    for &i in &p.node_removals {
        if i >= p.n1 || std::mem::replace(&mut decided[i], true) {
            return invalid(format!("node {i} of G1 both removed and substituted, or out of range"));
        }
    }
    if let Some(i) = decided.iter().position(|d| !d) {
        return invalid(format!("node {i} of G1 is neither removed nor substituted"));
    }
    let a = EpsAssignment::from_mapping(p.n2, sub)?;
    let mut inserted: Vec<usize> = p.node_inserts.clone();
    inserted.sort_unstable();
    if inserted != a.inserted().collect::<Vec<_>>() {
        return invalid("inserted nodes are not the complement of the substitution image".into());
    }
    Ok(a)
}

/// Total cost of a path. Undirected edges are recorded once per edit
/// operation, so no halving is needed here.
pub fn path_cost<M: CostModel>(p: &RestrictedEditPath, model: &M, g1: &Graph, g2: &Graph) -> f64 {
    let mut cost = 0.0;
    for &i in &p.node_removals {
        cost += model.node_del(g1.label(i));
    }
    for &(i, j) in &p.edge_removals {
        cost += model.edge_del(edge_label(g1, i, j));
    }
    for &(i, k) in &p.node_subs {
        cost += model.node_sub(g1.label(i), g2.label(k));
    }
    for &((i, j), (k, l)) in &p.edge_subs {
        cost += model.edge_sub(edge_label(g1, i, j), edge_label(g2, k, l));
    }
    for &k in &p.node_inserts {
        cost += model.node_ins(g2.label(k));
    }
    for &(k, l) in &p.edge_inserts {
        cost += model.edge_ins(edge_label(g2, k, l));
    }
    cost
}

/// Cost of the path induced by `a`, without materializing it.
pub fn assignment_cost<M: CostModel>(a: &EpsAssignment, model: &M, g1: &Graph, g2: &Graph) -> f64 {
    path_cost(&assignment_to_path(a, g1, g2), model, g1, g2)
}

/// Problems reported by [`validate_path`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathViolation {
    /// Operation at `index` refers to a node or edge that does not exist.
    Missing { index: usize, op: EditOp },
    /// Node removed while some incident edge is still present.
    IncidentEdgesLeft { index: usize, node: usize },
    /// Edge inserted where an edge already exists, or as a self-loop.
    NotSimple { index: usize, op: EditOp },
    /// Element edited twice (substituted and removed, substituted twice,
    /// inserted then substituted or removed).
    NotIndependent { index: usize, op: EditOp },
    /// Edge removed and later re-inserted between the same nodes.
    NotRestricted { index: usize, op: EditOp },
    /// Edge substitution disagrees with the node substitutions.
    InconsistentEdgeSub { op: EditOp },
    /// Node of G1 neither removed nor substituted.
    Unmapped { node: usize },
    /// Result of the path differs from G2.
    WrongResult(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum NodeRef {
    Old(usize),
    New(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EdgeState {
    Original,
    Substituted,
    Inserted,
}

/// Replays `ops` on G1 and reports every violated edit-path condition.
/// Operations may come in any order. Empty result iff the sequence is a
/// valid restricted edit path from `g1` to `g2`.
pub fn validate_path(ops: &[EditOp], g1: &Graph, g2: &Graph) -> Vec<PathViolation> {
    use PathViolation as V;
    let directed = pair_is_directed(g1, g2);
    let (n1, n2) = (g1.order(), g2.order());
    let key = |a: NodeRef, b: NodeRef| if directed || a < b { (a, b) } else { (b, a) };

    let mut out = Vec::new();
    let mut alive = vec![true; n1];
    let mut sub_of: Vec<Option<usize>> = vec![None; n1];
    let mut owner: Vec<Option<NodeRef>> = vec![None; n2];
    let mut edges: HashMap<(NodeRef, NodeRef), (Label, EdgeState)> = HashMap::new();
    let mut removed_edges: HashSet<(NodeRef, NodeRef)> = HashSet::new();
    let mut edge_subs = Vec::new();

    for e in g1.edges_as(directed) {
        edges.insert(
            key(NodeRef::Old(e.src), NodeRef::Old(e.dst)),
            (e.label.clone(), EdgeState::Original),
        );
    }

    for (index, &op) in ops.iter().enumerate() {
        match op {
            EditOp::RemoveEdge(i, j) => {
                let k = key(NodeRef::Old(i), NodeRef::Old(j));
                match edges.get(&k) {
                    None => out.push(V::Missing { index, op }),
                    Some((_, EdgeState::Original)) => {
                        edges.remove(&k);
                        removed_edges.insert(k);
                    }
                    Some(_) => {
                        out.push(V::NotIndependent { index, op });
                        edges.remove(&k);
                        removed_edges.insert(k);
                    }
                }
            }
            EditOp::RemoveNode(i) => {
                if i >= n1 || !alive[i] {
                    out.push(V::Missing { index, op });
                    continue;
                }
                if sub_of[i].is_some() {
                    out.push(V::NotIndependent { index, op });
                }
                let me = NodeRef::Old(i);
                if edges.keys().any(|&(a, b)| a == me || b == me) {
                    out.push(V::IncidentEdgesLeft { index, node: i });
                }
                alive[i] = false;
            }
            EditOp::SubNode(i, k) => {
                if i >= n1 || !alive[i] || k >= n2 {
                    out.push(V::Missing { index, op });
                    continue;
                }
                if sub_of[i].is_some() || owner[k].is_some() {
                    out.push(V::NotIndependent { index, op });
                    continue;
                }
                sub_of[i] = Some(k);
                owner[k] = Some(NodeRef::Old(i));
            }
            EditOp::SubEdge((i, j), (k, l)) => {
                let Some(label) = g2.edge(k, l) else {
                    out.push(V::Missing { index, op });
                    continue;
                };
                match edges.get_mut(&key(NodeRef::Old(i), NodeRef::Old(j))) {
                    None => out.push(V::Missing { index, op }),
                    Some((current, state)) => {
                        if *state != EdgeState::Original {
                            out.push(V::NotIndependent { index, op });
                        }
                        *current = label.clone();
                        *state = EdgeState::Substituted;
                        edge_subs.push(op);
                    }
                }
            }
            EditOp::InsertNode(k) => {
                if k >= n2 {
                    out.push(V::Missing { index, op });
                } else if owner[k].is_some() {
                    out.push(V::NotIndependent { index, op });
                } else {
                    owner[k] = Some(NodeRef::New(k));
                }
            }
            EditOp::InsertEdge(k, l) => {
                let resolve = |x: usize| {
                    owner.get(x).copied().flatten().filter(|r| match r {
                        NodeRef::Old(i) => alive[*i],
                        NodeRef::New(_) => true,
                    })
                };
                let (Some(a), Some(b), Some(label)) = (resolve(k), resolve(l), g2.edge(k, l)) else {
                    out.push(V::Missing { index, op });
                    continue;
                };
                if a == b {
                    out.push(V::NotSimple { index, op });
                    continue;
                }
                let ek = key(a, b);
                if edges.contains_key(&ek) {
                    out.push(V::NotSimple { index, op });
                    continue;
                }
                if removed_edges.contains(&ek) {
                    out.push(V::NotRestricted { index, op });
                }
                edges.insert(ek, (label.clone(), EdgeState::Inserted));
            }
        }
    }

    for op in edge_subs {
        if let EditOp::SubEdge((i, j), (k, l)) = op {
            if sub_of.get(i).copied().flatten() != Some(k) || sub_of.get(j).copied().flatten() != Some(l) {
                out.push(V::InconsistentEdgeSub { op });
            }
        }
    }
    for i in 0..n1 {
        if alive[i] && sub_of[i].is_none() {
            out.push(V::Unmapped { node: i });
        }
    }

    // Compare the result with G2 under the node correspondence.
    let target_of = |r: NodeRef| match r {
        NodeRef::Old(i) => sub_of[i],
        NodeRef::New(k) => Some(k),
    };
    if let Some(k) = owner.iter().position(|o| o.is_none()) {
        out.push(V::WrongResult(format!("node {k} of G2 is never produced")));
    }
    let mut produced = BTreeMap::new();
    for (&(a, b), (label, _)) in &edges {
        match (target_of(a), target_of(b)) {
            (Some(k), Some(l)) => {
                produced.insert(normalize(directed, (k, l)), label.clone());
            }
            _ => out.push(V::WrongResult("edge left on an unmapped node".into())),
        }
    }
    let expected: BTreeMap<_, _> = g2
        .edges_as(directed)
        .map(|e| ((e.src, e.dst), e.label.clone()))
        .collect();
    if produced != expected {
        out.push(V::WrongResult("edge set or edge labels differ from G2".into()));
    }
    out
}
