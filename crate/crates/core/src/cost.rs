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

//! Elementary edit costs.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::Label;

#[derive(Debug, Error, PartialEq)]
pub enum CostError {
    #[error("cost {name} must be finite and non-negative, got {value}")]
    InvalidCost { name: &'static str, value: f64 },
    #[error("inconsistent path cardinals: {0}")]
    InconsistentCardinals(&'static str),
}

/// The six elementary edit-cost functions.
///
/// Implementations must return finite non-negative values, and substituting
/// a label by itself must cost nothing.
pub trait CostModel: Send + Sync {
    fn node_sub(&self, from: &Label, to: &Label) -> f64;
    fn node_del(&self, label: &Label) -> f64;
    fn node_ins(&self, label: &Label) -> f64;
    fn edge_sub(&self, from: &Label, to: &Label) -> f64;
    fn edge_del(&self, label: &Label) -> f64;
    fn edge_ins(&self, label: &Label) -> f64;
}

impl<M: CostModel + ?Sized> CostModel for &M {
    fn node_sub(&self, from: &Label, to: &Label) -> f64 {
        (**self).node_sub(from, to)
    }
    fn node_del(&self, label: &Label) -> f64 {
        (**self).node_del(label)
    }
    fn node_ins(&self, label: &Label) -> f64 {
        (**self).node_ins(label)
    }
    fn edge_sub(&self, from: &Label, to: &Label) -> f64 {
        (**self).edge_sub(from, to)
    }
    fn edge_del(&self, label: &Label) -> f64 {
        (**self).edge_del(label)
    }
    fn edge_ins(&self, label: &Label) -> f64 {
        (**self).edge_ins(label)
    }
}

fn check(name: &'static str, value: f64) -> Result<f64, CostError> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(CostError::InvalidCost { name, value })
    }
}

/// Label-independent costs. Substitutions cost `cvs`/`ces` only when the
/// labels differ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantCostModel {
    pub cvs: f64,
    pub cvd: f64,
    pub cvi: f64,
    pub ces: f64,
    pub ced: f64,
    pub cei: f64,
}

impl ConstantCostModel {
    pub fn new(cvs: f64, cvd: f64, cvi: f64, ces: f64, ced: f64, cei: f64) -> Result<Self, CostError> {
        Ok(ConstantCostModel {
            cvs: check("cvs", cvs)?,
            cvd: check("cvd", cvd)?,
            cvi: check("cvi", cvi)?,
            ces: check("ces", ces)?,
            ced: check("ced", ced)?,
            cei: check("cei", cei)?,
        })
    }

    /// Every operation on differing labels costs 1.
    pub fn unit() -> Self {
        ConstantCostModel {
            cvs: 1.0,
            cvd: 1.0,
            cvi: 1.0,
            ces: 1.0,
            ced: 1.0,
            cei: 1.0,
        }
    }
}

impl Default for ConstantCostModel {
    fn default() -> Self {
        Self::unit()
    }
}

impl CostModel for ConstantCostModel {
    fn node_sub(&self, from: &Label, to: &Label) -> f64 {
        if from == to {
            0.0
        } else {
            self.cvs
        }
    }
    fn node_del(&self, _: &Label) -> f64 {
        self.cvd
    }
    fn node_ins(&self, _: &Label) -> f64 {
        self.cvi
    }
    fn edge_sub(&self, from: &Label, to: &Label) -> f64 {
        if from == to {
            0.0
        } else {
            self.ces
        }
    }
    fn edge_del(&self, _: &Label) -> f64 {
        self.ced
    }
    fn edge_ins(&self, _: &Label) -> f64 {
        self.cei
    }
}

/// Per-label overrides on top of a constant fallback.
#[derive(Debug, Clone, Default)]
pub struct TableCostModel {
    fallback: ConstantCostModel,
    node_sub: HashMap<(Label, Label), f64>,
    node_del: HashMap<Label, f64>,
    node_ins: HashMap<Label, f64>,
    edge_sub: HashMap<(Label, Label), f64>,
    edge_del: HashMap<Label, f64>,
    edge_ins: HashMap<Label, f64>,
}

impl TableCostModel {
    pub fn new(fallback: ConstantCostModel) -> Self {
        TableCostModel {
            fallback,
            ..Default::default()
        }
    }

    /// Identity substitutions are always free and cannot be overridden.
    pub fn with_node_sub(mut self, from: Label, to: Label, cost: f64) -> Result<Self, CostError> {
        if from != to {
            self.node_sub.insert((from, to), check("node_sub", cost)?);
        }
        Ok(self)
    }

    pub fn with_node_del(mut self, label: Label, cost: f64) -> Result<Self, CostError> {
        self.node_del.insert(label, check("node_del", cost)?);
        Ok(self)
    }

    pub fn with_node_ins(mut self, label: Label, cost: f64) -> Result<Self, CostError> {
        self.node_ins.insert(label, check("node_ins", cost)?);
        Ok(self)
    }

    pub fn with_edge_sub(mut self, from: Label, to: Label, cost: f64) -> Result<Self, CostError> {
        if from != to {
            self.edge_sub.insert((from, to), check("edge_sub", cost)?);
        }
        Ok(self)
    }

    pub fn with_edge_del(mut self, label: Label, cost: f64) -> Result<Self, CostError> {
        self.edge_del.insert(label, check("edge_del", cost)?);
        Ok(self)
    }

    pub fn with_edge_ins(mut self, label: Label, cost: f64) -> Result<Self, CostError> {
        self.edge_ins.insert(label, check("edge_ins", cost)?);
        Ok(self)
    }
}

impl CostModel for TableCostModel {
    fn node_sub(&self, from: &Label, to: &Label) -> f64 {
        match self.node_sub.get(&(from.clone(), to.clone())) {
            Some(&c) => c,
            None => self.fallback.node_sub(from, to),
        }
    }
    fn node_del(&self, label: &Label) -> f64 {
        *self.node_del.get(label).unwrap_or(&self.fallback.cvd)
    }
    fn node_ins(&self, label: &Label) -> f64 {
        *self.node_ins.get(label).unwrap_or(&self.fallback.cvi)
    }
    fn edge_sub(&self, from: &Label, to: &Label) -> f64 {
        match self.edge_sub.get(&(from.clone(), to.clone())) {
            Some(&c) => c,
            None => self.fallback.edge_sub(from, to),
        }
    }
    fn edge_del(&self, label: &Label) -> f64 {
        *self.edge_del.get(label).unwrap_or(&self.fallback.ced)
    }
    fn edge_ins(&self, label: &Label) -> f64 {
        *self.edge_ins.get(label).unwrap_or(&self.fallback.cei)
    }
}

/// A model whose substitutions never cost more than removing and
/// re-inserting. See [`clamp_substitutions`].
#[derive(Debug, Clone, Copy)]
pub struct Clamped<M>(pub M);

/// Replaces every substitution cost by `min(sub(a, b), del(a) + ins(b))`.
///
/// Under a clamped model the cheapest restricted edit path is also the
/// cheapest edit path overall.
pub fn clamp_substitutions<M: CostModel>(model: M) -> Clamped<M> {
    Clamped(model)
}

impl<M: CostModel> CostModel for Clamped<M> {
    fn node_sub(&self, from: &Label, to: &Label) -> f64 {
        if from == to {
            return 0.0;
        }
        self.0
            .node_sub(from, to)
            .min(self.0.node_del(from) + self.0.node_ins(to))
    }
    fn node_del(&self, label: &Label) -> f64 {
        self.0.node_del(label)
    }
    fn node_ins(&self, label: &Label) -> f64 {
        self.0.node_ins(label)
    }
    fn edge_sub(&self, from: &Label, to: &Label) -> f64 {
        if from == to {
            return 0.0;
        }
        self.0
            .edge_sub(from, to)
            .min(self.0.edge_del(from) + self.0.edge_ins(to))
    }
    fn edge_del(&self, label: &Label) -> f64 {
        self.0.edge_del(label)
    }
    fn edge_ins(&self, label: &Label) -> f64 {
        self.0.edge_ins(label)
    }
}

/// Cardinals of a restricted edit path: sizes of both graphs, of the common
/// substructure kept by the path, and the number of substitutions that
/// actually change a label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PathCardinals {
    pub nodes1: usize,
    pub edges1: usize,
    pub kept_nodes1: usize,
    pub kept_edges1: usize,
    pub nodes2: usize,
    pub edges2: usize,
    pub kept_nodes2: usize,
    pub kept_edges2: usize,
    /// Node substitutions with non-zero cost.
    pub relabeled_nodes: usize,
    /// Edge substitutions with non-zero cost.
    pub relabeled_edges: usize,
}

impl PathCardinals {
    fn check(&self) -> Result<(), CostError> {
        use CostError::InconsistentCardinals as E;
        if self.kept_nodes1 > self.nodes1 || self.kept_nodes2 > self.nodes2 {
            return Err(E("kept nodes exceed graph order"));
        }
        if self.kept_edges1 > self.edges1 || self.kept_edges2 > self.edges2 {
            return Err(E("kept edges exceed graph size"));
        }
        if self.relabeled_nodes > self.kept_nodes1 || self.relabeled_edges > self.kept_edges1 {
            return Err(E("more relabelings than substitutions"));
        }
        if self.kept_nodes1 != self.kept_nodes2 || self.kept_edges1 != self.kept_edges2 {
            return Err(E("common substructure differs between the two sides"));
        }
        Ok(())
    }
}

/// Cost of a restricted edit path under a constant model, from cardinals only.
pub fn path_cost_constant(c: &PathCardinals, m: &ConstantCostModel) -> Result<f64, CostError> {
    c.check()?;
    Ok((c.nodes1 - c.kept_nodes1) as f64 * m.cvd
        + (c.edges1 - c.kept_edges1) as f64 * m.ced
        + c.relabeled_nodes as f64 * m.cvs
        + c.relabeled_edges as f64 * m.ces
        + (c.nodes2 - c.kept_nodes2) as f64 * m.cvi
        + (c.edges2 - c.kept_edges2) as f64 * m.cei)
}

/// The part of the constant-model path cost that depends on the path, with
/// the sign flipped: minimizing the cost is maximizing this merit.
pub fn path_merit_constant(c: &PathCardinals, m: &ConstantCostModel) -> Result<f64, CostError> {
    c.check()?;
    Ok(
        c.kept_nodes1 as f64 * (m.cvd + m.cvi) + c.kept_edges1 as f64 * (m.ced + m.cei)
            - c.relabeled_nodes as f64 * m.cvs
            - c.relabeled_edges as f64 * m.ces,
    )
}
