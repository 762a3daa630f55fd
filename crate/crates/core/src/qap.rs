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

//! Quadratic assignment formulation and the IPFP descent.
//!
//! Over the `(n + m)`-sided ε-layout, the cost of the edit path induced by a
//! binary assignment `x` is `S(x) = ½ xᵀΔx + cᵀx`, where `c` holds the node
//! costs and `Δ` the edge costs. `Δ = D` on undirected pairs and `D + Dᵀ`
//! otherwise, with
//!
//! ```text
//! D[(i,k),(j,l)] = ω            if i ↛ k or j ↛ l
//!                  c_es         if (i,j) ∈ E1 and (k,l) ∈ E2
//!                  c_ed         if (i,j) ∈ E1 only
//!                  c_ei         if (k,l) ∈ E2 only
//!                  0            otherwise
//! ```
//!
//! [`ipfp_min`] minimizes `S` over the assignment polytope by alternating a
//! linear assignment step and an exact line search, then projects back onto
//! an assignment. Gradients of binary points are computed from adjacency
//! lists; the relaxed gradient is updated by linearity.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bipartite::bipartite_ged;
use crate::cost::CostModel;
use crate::graph::{Graph, Label};
use crate::lsap::{eps_cost_matrix, solve_lsap, BagStrategy, MaskedCostMatrix};
use crate::path::{assignment_to_path, is_allowed, pair_is_directed, EpsAssignment, RestrictedEditPath};

#[derive(Debug, Error, PartialEq)]
pub enum QapError {
    #[error("point has mass {value} on forbidden entry ({row}, {col})")]
    ForbiddenSupport { row: usize, col: usize, value: f64 },
    #[error("expected a vector of length {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("index {index} outside the augmented range 0..{size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("k_max must be at least 1")]
    NoIterations,
    #[error("point is not in the assignment polytope: {0}")]
    NotFeasible(String),
    #[error("assignment is {got_n}x{got_m}, instance is {n}x{m}")]
    Mismatch {
        n: usize,
        m: usize,
        got_n: usize,
        got_m: usize,
    },
}

/// A graph pair together with its cost model, seen as a QAP instance.
pub struct QapInstance<'a, M: CostModel> {
    g1: &'a Graph,
    g2: &'a Graph,
    model: &'a M,
    directed: bool,
    linear: MaskedCostMatrix,
}

impl<'a, M: CostModel> QapInstance<'a, M> {
    pub fn new(g1: &'a Graph, g2: &'a Graph, model: &'a M) -> Self {
        let linear = eps_cost_matrix(
            g1.order(),
            g2.order(),
            |i, k| model.node_sub(g1.label(i), g2.label(k)),
            |i| model.node_del(g1.label(i)),
            |k| model.node_ins(g2.label(k)),
        );
        QapInstance {
            g1,
            g2,
            model,
            directed: pair_is_directed(g1, g2),
            linear,
        }
    }

    pub fn n(&self) -> usize {
        self.g1.order()
    }

    pub fn m(&self) -> usize {
        self.g2.order()
    }

    /// Side of the assignment matrices.
    pub fn size(&self) -> usize {
        self.n() + self.m()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Node costs `c`, with forbidden entries masked.
    pub fn linear(&self) -> &MaskedCostMatrix {
        &self.linear
    }

    fn e1(&self, i: usize, j: usize) -> Option<&Label> {
        if i < self.n() && j < self.n() {
            self.g1.edge(i, j)
        } else {
            None
        }
    }

    fn e2(&self, k: usize, l: usize) -> Option<&Label> {
        if k < self.m() && l < self.m() {
            self.g2.edge(k, l)
        } else {
            None
        }
    }

    fn check_index(&self, idx: [usize; 4]) -> Result<(), QapError> {
        let size = self.size();
        match idx.into_iter().find(|&v| v >= size) {
            Some(index) => Err(QapError::IndexOutOfRange { index, size }),
            None => Ok(()),
        }
    }

    /// `D[(i,k),(j,l)]` over augmented indices; `None` stands for ω.
    pub fn quad_cost(&self, i: usize, k: usize, j: usize, l: usize) -> Result<Option<f64>, QapError> {
        self.check_index([i, k, j, l])?;
        let (n, m) = (self.n(), self.m());
        if !is_allowed(n, m, i, k) || !is_allowed(n, m, j, l) {
            return Ok(None);
        }
        Ok(Some(match (self.e1(i, j), self.e2(k, l)) {
            (Some(a), Some(b)) => self.model.edge_sub(a, b),
            (Some(a), None) => self.model.edge_del(a),
            (None, Some(b)) => self.model.edge_ins(b),
            (None, None) => 0.0,
        }))
    }

    /// `Δ[(i,k),(j,l)]`; `None` stands for ω.
    pub fn delta(&self, i: usize, k: usize, j: usize, l: usize) -> Result<Option<f64>, QapError> {
        let Some(d) = self.quad_cost(i, k, j, l)? else {
            return Ok(None);
        };
        if !self.directed {
            return Ok(Some(d));
        }
        Ok(self.quad_cost(j, l, i, k)?.map(|t| d + t))
    }

    /// Adds `w·Δ[(i,k),(·,·)]` to `q`. Only edges at `i` and `k` contribute.
    fn accumulate(&self, i: usize, k: usize, w: f64, q: &mut [f64]) {
        self.accumulate_part(i, k, w, false, q);
        if self.directed {
            self.accumulate_part(i, k, w, true, q);
        }
    }

    // D[(i,k),(j,l)] looks at arcs (i,j), (k,l); the transposed part at
    // arcs (j,i), (l,k).
    fn accumulate_part(&self, i: usize, k: usize, w: f64, reverse: bool, q: &mut [f64]) {
        let (g1, g2, model) = (self.g1, self.g2, self.model);
        let (n, m, size) = (self.n(), self.m(), self.size());
        let arc = |a: usize, b: usize| if reverse { (b, a) } else { (a, b) };
        let nb1: &[usize] = match (i < n, reverse) {
            (false, _) => &[],
            (true, false) => g1.out_neighbors(i),
            (true, true) => g1.in_neighbors(i),
        };
        for &j in nb1 {
            let (s, t) = arc(i, j);
            let lab1 = g1.edge(s, t).expect("adjacency");
            let del = model.edge_del(lab1);
            let row = &mut q[j * size..(j + 1) * size];
            for (l, cell) in row.iter_mut().enumerate() {
                let lab2 = if k < m && l < m {
                    let (u, v) = arc(k, l);
                    g2.edge(u, v)
                } else {
                    None
                };
                *cell += w * lab2.map_or(del, |lab2| model.edge_sub(lab1, lab2));
            }
        }
        if k >= m {
            return;
        }
        let nb2 = if reverse {
            g2.in_neighbors(k)
        } else {
            g2.out_neighbors(k)
        };
        for &l in nb2 {
            let (u, v) = arc(k, l);
            let ins = w * model.edge_ins(g2.edge(u, v).expect("adjacency"));
            for j in 0..size {
                q[j * size + l] += ins;
            }
            // these pairs were charged a substitution or removal above
            for &j in nb1 {
                q[j * size + l] -= ins;
            }
        }
    }

    /// `Δx` for the binary point of `a`, row-major. Entries on forbidden
    /// positions are meaningless.
    pub fn binary_gradient(&self, a: &EpsAssignment) -> Vec<f64> {
        let size = self.size();
        let mut q = vec![0.0; size * size];
        for (i, k) in a.to_permutation().into_iter().enumerate() {
            self.accumulate(i, k, 1.0, &mut q);
        }
        q
    }

    fn sparse_gradient(&self, x: &[f64]) -> Vec<f64> {
        let size = self.size();
        let mut q = vec![0.0; size * size];
        for (idx, &w) in x.iter().enumerate() {
            if w != 0.0 {
                self.accumulate(idx / size, idx % size, w, &mut q);
            }
        }
        q
    }

    /// `Δx + c` as a masked cost matrix, iterating over the support of `x`
    /// and the adjacency lists only.
    pub fn linearize(&self, x: &[f64]) -> Result<MaskedCostMatrix, QapError> {
        self.check_point(x)?;
        let q = self.sparse_gradient(x);
        let mut out = self.linear.clone();
        for (dst, qv) in out.costs_mut().iter_mut().zip(q) {
            *dst += qv;
        }
        Ok(out)
    }

    /// `S(b)` for a binary point.
    pub fn objective(&self, a: &EpsAssignment) -> f64 {
        let q = self.binary_gradient(a);
        let size = self.size();
        a.to_permutation()
            .iter()
            .enumerate()
            .map(|(r, &c)| 0.5 * q[r * size + c] + self.linear.get(r, c).expect("allowed entry"))
            .sum()
    }

    fn check_point(&self, x: &[f64]) -> Result<(), QapError> {
        let size = self.size();
        if x.len() != size * size {
            return Err(QapError::Dimension {
                expected: size * size,
                got: x.len(),
            });
        }
        for r in 0..size {
            for c in 0..size {
                let value = x[r * size + c];
                if value != 0.0 && self.linear.is_forbidden(r, c) {
                    return Err(QapError::ForbiddenSupport { row: r, col: c, value });
                }
            }
        }
        Ok(())
    }

    /// `Δx` computed entry by entry. Quartic in the side; meant for checks.
    pub fn gradient_dense(&self, x: &[f64]) -> Result<Vec<f64>, QapError> {
        self.check_point(x)?;
        let size = self.size();
        let mut q = vec![0.0; size * size];
        for j in 0..size {
            for l in 0..size {
                if self.linear.is_forbidden(j, l) {
                    continue;
                }
                let mut acc = 0.0;
                for i in 0..size {
                    for k in 0..size {
                        let w = x[i * size + k];
                        if w != 0.0 {
                            acc += w * self.delta(j, l, i, k)?.expect("support is allowed");
                        }
                    }
                }
                q[j * size + l] = acc;
            }
        }
        Ok(q)
    }

    /// `S(x)` for any point supported on allowed entries.
    pub fn objective_dense(&self, x: &[f64]) -> Result<f64, QapError> {
        let q = self.gradient_dense(x)?;
        Ok(x.iter()
            .zip(&q)
            .zip(self.linear.costs())
            .map(|((&xv, &qv), &cv)| if xv == 0.0 { 0.0 } else { xv * (0.5 * qv + cv) })
            .sum())
    }

    fn check_assignment(&self, a: &EpsAssignment) -> Result<(), QapError> {
        if a.n() != self.n() || a.m() != self.m() {
            return Err(QapError::Mismatch {
                n: self.n(),
                m: self.m(),
                got_n: a.n(),
                got_m: a.m(),
            });
        }
        Ok(())
    }
}

/// Result of one IPFP run.
#[derive(Debug, Clone)]
pub struct IpfpOutcome {
    /// Best binary point met: start, linear steps or final projection.
    pub assignment: EpsAssignment,
    /// `S` of [`IpfpOutcome::assignment`].
    pub value: f64,
    /// Projection of the last iterate.
    pub projected: EpsAssignment,
    /// `S` of the last (possibly fractional) iterate.
    pub relaxed_value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `S` of every iterate, starting with the initial point.
    pub trace: Vec<f64>,
}

/// Integer projected fixed point descent from the assignment `x0`.
///
/// Stops when an iteration moves no entry by more than `tol` or after
/// `k_max` iterations. The last iterate is projected onto the assignment
/// maximizing its overlap.
pub fn ipfp_min<M: CostModel>(
    inst: &QapInstance<'_, M>,
    x0: &EpsAssignment,
    k_max: usize,
    tol: f64,
) -> Result<IpfpOutcome, QapError> {
    inst.check_assignment(x0)?;
    let q0 = inst.binary_gradient(x0);
    descend(inst, x0.to_matrix(), q0, Some(x0.clone()), k_max, tol)
}

/// [`ipfp_min`] from a point of the assignment polytope, given row-major.
pub fn ipfp_min_relaxed<M: CostModel>(
    inst: &QapInstance<'_, M>,
    x0: &[f64],
    k_max: usize,
    tol: f64,
) -> Result<IpfpOutcome, QapError> {
    inst.check_point(x0)?;
    let size = inst.size();
    if let Some(v) = x0.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(QapError::NotFeasible(format!("entry {v}")));
    }
    for r in 0..size {
        let row: f64 = x0[r * size..(r + 1) * size].iter().sum();
        let col: f64 = (0..size).map(|c| x0[c * size + r]).sum();
        if (row - 1.0).abs() > 1e-9 || (col - 1.0).abs() > 1e-9 {
            return Err(QapError::NotFeasible(format!("line {r} sums to {row} / {col}")));
        }
    }
    let q0 = inst.sparse_gradient(x0);
    descend(inst, x0.to_vec(), q0, None, k_max, tol)
}

fn descend<M: CostModel>(
    inst: &QapInstance<'_, M>,
    mut x: Vec<f64>,
    mut q: Vec<f64>,
    start: Option<EpsAssignment>,
    k_max: usize,
    tol: f64,
) -> Result<IpfpOutcome, QapError> {
    if k_max < 1 {
        return Err(QapError::NoIterations);
    }
    let (n, m, size) = (inst.n(), inst.m(), inst.size());
    let c = inst.linear();

    let mut l_cur = dot(c.costs(), &x);
    let mut s = 0.5 * dot(&q, &x) + l_cur;
    let mut best = start.map(|a| (a, s));
    let mut trace = vec![s];
    let mut lsap = c.clone();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < k_max {
        iterations += 1;
        for (dst, (&qv, &cv)) in lsap.costs_mut().iter_mut().zip(q.iter().zip(c.costs())) {
            *dst = qv + cv;
        }
        let sol = solve_lsap(&lsap).expect("ε-matrices always admit a feasible assignment");
        let b = EpsAssignment::from_permutation(n, m, &sol.perm).expect("solver respects the mask");
        let bm = b.to_matrix();
        let qb = inst.binary_gradient(&b);
        let l_b = dot(c.costs(), &bm);
        let s_b = 0.5 * dot(&qb, &bm) + l_b;
        if best.as_ref().is_none_or(|(_, v)| s_b < *v) {
            best = Some((b.clone(), s_b));
        }
        let r = lsap.evaluate(&b.to_permutation()).expect("allowed entries");
        // b minimizes the linearization, so the slope is never positive
        let alpha = (r - 2.0 * s + l_cur).min(0.0);
        let beta = s_b + s - r - l_cur;
        let t = if beta <= 0.0 || -alpha >= 2.0 * beta {
            1.0
        } else {
            -alpha / (2.0 * beta)
        };
        let mut moved: f64 = 0.0;
        if t == 1.0 {
            for (xv, bv) in x.iter().zip(&bm) {
                moved = moved.max((bv - xv).abs());
            }
            x = bm;
            q = qb;
            s = s_b;
            l_cur = l_b;
        } else {
            for idx in 0..size * size {
                let step = t * (bm[idx] - x[idx]);
                moved = moved.max(step.abs());
                x[idx] += step;
                q[idx] += t * (qb[idx] - q[idx]);
            }
            s -= alpha * alpha / (4.0 * beta);
            l_cur += t * (l_b - l_cur);
        }
        trace.push(s);
        if moved <= tol {
            converged = true;
            break;
        }
    }

    // maximizing ⟨x, b⟩ is minimizing ⟨1 - x, b⟩, which keeps costs >= 0
    let mut proj = c.clone();
    for (dst, &xv) in proj.costs_mut().iter_mut().zip(&x) {
        *dst = 1.0 - xv;
    }
    let sol = solve_lsap(&proj).expect("ε-matrices always admit a feasible assignment");
    let projected = EpsAssignment::from_permutation(n, m, &sol.perm).expect("solver respects the mask");
    let s_proj = inst.objective(&projected);
    let (assignment, value) = match best {
        Some((a, v)) if v <= s_proj => (a, v),
        _ => (projected.clone(), s_proj),
    };
    Ok(IpfpOutcome {
        assignment,
        value,
        projected,
        relaxed_value: s,
        iterations,
        converged,
        trace,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Starting point of the first run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QapInit {
    Random,
    BipartiteNode,
    BipartiteEdges,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QapOptions {
    pub init: QapInit,
    /// Total number of runs. The first starts from `init`, the others from
    /// random assignments.
    pub restarts: usize,
    pub k_max: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for QapOptions {
    fn default() -> Self {
        QapOptions {
            init: QapInit::BipartiteEdges,
            restarts: 1,
            k_max: 40,
            tol: 1e-9,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QapResult {
    pub value: f64,
    pub assignment: EpsAssignment,
    pub path: RestrictedEditPath,
    pub runs: Vec<IpfpOutcome>,
}

impl QapResult {
    /// Iterations summed over all runs.
    pub fn iterations(&self) -> usize {
        self.runs.iter().map(|r| r.iterations).sum()
    }
}

/// Uniform random ε-assignment: a random permutation of the ε-layout,
/// restricted to the rows of G1.
pub fn random_assignment<R: rand::Rng>(n: usize, m: usize, rng: &mut R) -> EpsAssignment {
    let mut perm: Vec<usize> = (0..n + m).collect();
    perm.shuffle(rng);
    let sub = perm[..n].iter().map(|&c| (c < m).then_some(c)).collect();
    EpsAssignment::from_mapping(m, sub).expect("a permutation is injective")
}

/// Upper bound from IPFP descents; the best run wins.
pub fn qap_ged<M: CostModel>(g1: &Graph, g2: &Graph, model: &M, opts: &QapOptions) -> QapResult {
    let inst = QapInstance::new(g1, g2, model);
    let (n, m) = (g1.order(), g2.order());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut runs = Vec::with_capacity(opts.restarts.max(1));
    for run in 0..opts.restarts.max(1) {
        let x0 = match (run, opts.init) {
            (0, QapInit::BipartiteNode) => bipartite_ged(g1, g2, model, BagStrategy::NodeOnly).assignment,
            (0, QapInit::BipartiteEdges) => bipartite_ged(g1, g2, model, BagStrategy::IncidentEdges).assignment,
            _ => random_assignment(n, m, &mut rng),
        };
        runs.push(ipfp_min(&inst, &x0, opts.k_max, opts.tol).expect("start point matches the instance"));
    }
    let best = runs
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one run");
    let assignment = best.assignment.clone();
    QapResult {
        value: best.value,
        path: assignment_to_path(&assignment, g1, g2),
        assignment,
        runs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::ConstantCostModel;
    use crate::graph::graph_from;
    use crate::path::assignment_cost;

    fn pair(directed: bool) -> (Graph, Graph) {
        (
            graph_from(directed, &["A", "B", "A"], &[(0, 1, "x"), (1, 2, "y"), (2, 0, "x")]),
            graph_from(directed, &["B", "A"], &[(1, 0, "x")]),
        )
    }

    fn model() -> ConstantCostModel {
        ConstantCostModel::new(1.0, 2.0, 3.0, 0.5, 1.5, 2.5).unwrap()
    }

    #[test]
    fn quad_cost_cases() {
        let (g1, g2) = pair(true);
        let cm = model();
        let inst = QapInstance::new(&g1, &g2, &cm);
        // (0,1) ∈ E1 maps onto (1,0) ∈ E2 with the same label
        assert_eq!(inst.quad_cost(0, 1, 1, 0).unwrap(), Some(0.0));
        assert_eq!(inst.quad_cost(0, 0, 1, 1).unwrap(), Some(1.5));
        assert_eq!(inst.quad_cost(4, 1, 3, 0).unwrap(), Some(2.5));
        assert_eq!(inst.quad_cost(3, 0, 4, 1).unwrap(), Some(0.0));
        assert_eq!(inst.quad_cost(4, 1, 3, 1).unwrap(), None);
        // row 3 is ε of node 0 of G2; column 0 of G2 only
        assert_eq!(inst.quad_cost(3, 1, 0, 0).unwrap(), None);
        assert_eq!(inst.quad_cost(0, 3, 1, 1).unwrap(), None);
        assert_eq!(inst.delta(0, 1, 1, 0).unwrap(), Some(0.0));
        // (1,2) is removed and (1,0) of G2 is inserted
        assert_eq!(inst.delta(1, 0, 2, 1).unwrap(), Some(1.5 + 2.5));
        assert_eq!(inst.delta(2, 1, 1, 0).unwrap(), Some(1.5 + 2.5));
        assert_eq!(
            inst.quad_cost(5, 0, 0, 0),
            Err(QapError::IndexOutOfRange { index: 5, size: 5 })
        );
        for i in 0..5 {
            for k in 0..5 {
                assert!(matches!(inst.quad_cost(i, k, i, k).unwrap(), None | Some(0.0)));
            }
        }
    }

    #[test]
    fn linearize_matches_dense_on_fractional_points() {
        for directed in [false, true] {
            let (g1, g2) = pair(directed);
            let cm = model();
            let inst = QapInstance::new(&g1, &g2, &cm);
            let a = EpsAssignment::from_mapping(2, vec![Some(1), Some(0), None]).unwrap();
            let b = EpsAssignment::from_mapping(2, vec![None, Some(1), Some(0)]).unwrap();
            let x: Vec<f64> = a
                .to_matrix()
                .iter()
                .zip(b.to_matrix())
                .map(|(u, v)| 0.25 * u + 0.75 * v)
                .collect();
            let lin = inst.linearize(&x).unwrap();
            let dense = inst.gradient_dense(&x).unwrap();
            for r in 0..5 {
                for c in 0..5 {
                    if let Some(v) = lin.get(r, c) {
                        let want = dense[r * 5 + c] + inst.linear().get(r, c).unwrap();
                        assert!((v - want).abs() < 1e-12);
                    }
                }
            }
            let zero = inst.linearize(&[0.0; 25]).unwrap();
            assert_eq!(zero.costs(), inst.linear().costs());
        }
    }

    #[test]
    fn relaxed_start() {
        let (g1, g2) = pair(false);
        let cm = ConstantCostModel::unit();
        let inst = QapInstance::new(&g1, &g2, &cm);
        let uniform = vec![0.2; 25];
        // uniform point has mass on forbidden entries
        assert!(matches!(
            ipfp_min_relaxed(&inst, &uniform, 10, 1e-9),
            Err(QapError::ForbiddenSupport { .. })
        ));
        let a = EpsAssignment::from_mapping(2, vec![Some(1), Some(0), None]).unwrap();
        let b = EpsAssignment::empty(3, 2);
        let x: Vec<f64> = a
            .to_matrix()
            .iter()
            .zip(b.to_matrix())
            .map(|(u, v)| 0.5 * (u + v))
            .collect();
        let out = ipfp_min_relaxed(&inst, &x, 40, 1e-9).unwrap();
        assert!((out.trace[0] - inst.objective_dense(&x).unwrap()).abs() < 1e-12);
        assert!(out.trace.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        let mut bad = x.clone();
        bad[0] += 0.5;
        assert!(matches!(
            ipfp_min_relaxed(&inst, &bad, 10, 1e-9),
            Err(QapError::NotFeasible(_))
        ));
        assert_eq!(ipfp_min(&inst, &a, 0, 1e-9).unwrap_err(), QapError::NoIterations);
    }

    #[test]
    fn single_edge_relabel_from_empty_start() {
        let g1 = graph_from(false, &["A", "B"], &[(0, 1, "x")]);
        let g2 = graph_from(false, &["A", "C"], &[(0, 1, "x")]);
        let cm = ConstantCostModel::unit();
        let inst = QapInstance::new(&g1, &g2, &cm);
        let out = ipfp_min(&inst, &EpsAssignment::empty(2, 2), 40, 1e-9).unwrap();
        assert_eq!(out.value, 1.0);
        let e = graph_from(false, &[], &[]);
        let inst = QapInstance::new(&g1, &e, &cm);
        assert_eq!(inst.objective(&EpsAssignment::empty(2, 0)), 3.0);
    }

    #[test]
    fn objective_matches_path_cost() {
        for directed in [false, true] {
            let (g1, g2) = pair(directed);
            let cm = model();
            let inst = QapInstance::new(&g1, &g2, &cm);
            for sub in [
                vec![Some(1), Some(0), None],
                vec![None, None, None],
                vec![Some(0), None, Some(1)],
                vec![None, Some(1), Some(0)],
            ] {
                let a = EpsAssignment::from_mapping(2, sub).unwrap();
                let want = assignment_cost(&a, &cm, &g1, &g2);
                assert!((inst.objective(&a) - want).abs() < 1e-12);
                let dense = inst.objective_dense(&a.to_matrix()).unwrap();
                assert!((dense - want).abs() < 1e-12);
                let q = inst.binary_gradient(&a);
                let qd = inst.gradient_dense(&a.to_matrix()).unwrap();
                for r in 0..5 {
                    for c in 0..5 {
                        if !inst.linear().is_forbidden(r, c) {
                            assert!((q[r * 5 + c] - qd[r * 5 + c]).abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn dense_objective_rejects_forbidden_support() {
        let (g1, g2) = pair(false);
        let cm = model();
        let inst = QapInstance::new(&g1, &g2, &cm);
        let mut x = vec![0.0; 25];
        x[2 + 1] = 1.0; // row 0, column ε of node 1
        assert!(matches!(
            inst.objective_dense(&x),
            Err(QapError::ForbiddenSupport { row: 0, col: 3, .. })
        ));
        assert!(matches!(
            inst.objective_dense(&[0.0; 3]),
            Err(QapError::Dimension { .. })
        ));
    }

    #[test]
    fn ipfp_descends_and_never_worsens_start() {
        let (g1, g2) = pair(false);
        let cm = ConstantCostModel::unit();
        let inst = QapInstance::new(&g1, &g2, &cm);
        let x0 = EpsAssignment::empty(3, 2);
        let out = ipfp_min(&inst, &x0, 40, 1e-9).unwrap();
        assert!(out.value <= inst.objective(&x0));
        assert!(out.trace.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!((assignment_cost(&out.assignment, &cm, &g1, &g2) - out.value).abs() < 1e-12);
    }

    #[test]
    fn ipfp_fixed_point_on_identical_graphs() {
        let g = graph_from(false, &["A", "B", "C"], &[(0, 1, "x"), (1, 2, "y")]);
        let cm = ConstantCostModel::unit();
        let inst = QapInstance::new(&g, &g, &cm);
        let out = ipfp_min(&inst, &EpsAssignment::identity(3), 40, 1e-9).unwrap();
        assert_eq!(out.value, 0.0);
        assert!(out.converged);
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn mismatched_start_is_rejected() {
        let (g1, g2) = pair(false);
        let cm = model();
        let inst = QapInstance::new(&g1, &g2, &cm);
        assert!(matches!(
            ipfp_min(&inst, &EpsAssignment::empty(2, 2), 10, 1e-9),
            Err(QapError::Mismatch { .. })
        ));
    }

    #[test]
    fn qap_is_deterministic_and_bounded_by_its_start() {
        let g1 = graph_from(
            false,
            &["C", "N", "O", "C"],
            &[(0, 1, "1"), (1, 2, "2"), (2, 3, "1"), (3, 0, "1")],
        );
        let g2 = graph_from(false, &["N", "C", "C"], &[(0, 1, "1"), (1, 2, "1")]);
        let cm = ConstantCostModel::unit();
        let opts = QapOptions {
            restarts: 4,
            seed: 7,
            ..Default::default()
        };
        let a = qap_ged(&g1, &g2, &cm, &opts);
        let b = qap_ged(&g1, &g2, &cm, &opts);
        assert_eq!(a.value, b.value);
        assert_eq!(a.assignment, b.assignment);
        assert_eq!(a.runs.len(), 4);
        let bip = bipartite_ged(&g1, &g2, &cm, BagStrategy::IncidentEdges);
        assert!(a.value <= bip.value);
    }
}
