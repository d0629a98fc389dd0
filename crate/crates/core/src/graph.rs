//! Metric graph data model.
//!
//! Each edge carries a local coordinate running from its `from` vertex
//! (`x = 0`) to its `to` vertex (`x = length`); potentials are expressed in
//! that coordinate.

use std::collections::{HashMap, HashSet, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{Potential, PotentialSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: String,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub from: usize,
    pub to: usize,
    pub length: f64,
    pub potential: Potential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphClass {
    LineGraph,
    LoopGraph,
    General,
}

/// Validated, immutable metric graph. Vertices and edges are addressed by index.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    degrees: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexSpec {
    pub id: String,
    #[serde(default)]
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub id: String,
    pub from: String,
    pub to: String,
    pub length: f64,
    #[serde(default = "zero_potential")]
    pub potential: PotentialSpec,
}

fn zero_potential() -> PotentialSpec {
    PotentialSpec::Constant { value: 0.0 }
}

/// Graph description file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<EdgeSpec>,
}

impl GraphSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("graph JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        // serialization of plain data structs cannot fail
        serde_json::to_string_pretty(self).unwrap_or_default()
    }
}

impl MetricGraph {
    pub fn build(spec: &GraphSpec) -> Result<Self> {
        let mut index = HashMap::new();
        let mut vertices = Vec::with_capacity(spec.vertices.len());
        for v in &spec.vertices {
            if index.insert(v.id.clone(), vertices.len()).is_some() {
                return Err(Error::DuplicateId(v.id.clone()));
            }
            if !v.sigma.is_finite() {
                return Err(Error::InvalidCoupling { vertex: v.id.clone(), sigma: v.sigma });
            }
            vertices.push(Vertex { id: v.id.clone(), sigma: v.sigma });
        }
        let mut edge_ids = HashSet::new();
        let mut edges = Vec::with_capacity(spec.edges.len());
        for e in &spec.edges {
            if !edge_ids.insert(e.id.as_str()) || index.contains_key(&e.id) {
                return Err(Error::DuplicateId(e.id.clone()));
            }
            let lookup = |id: &String| {
                index.get(id).copied().ok_or_else(|| Error::DanglingEndpoint {
                    edge: e.id.clone(),
                    vertex: id.clone(),
                })
            };
            let (from, to) = (lookup(&e.from)?, lookup(&e.to)?);
            if from == to {
                return Err(Error::SelfLoopEdge { edge: e.id.clone(), vertex: e.from.clone() });
            }
            if !(e.length > 0.0 && e.length.is_finite()) {
                return Err(Error::NonPositiveLength { edge: e.id.clone(), length: e.length });
            }
            let potential = Potential::try_from(e.potential.clone())?;
            edges.push(Edge { id: e.id.clone(), from, to, length: e.length, potential });
        }
        Self::from_parts(vertices, edges)
    }

    pub fn from_parts(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::NoEdges);
        }
        let mut degrees = vec![0; vertices.len()];
        for e in &edges {
            degrees[e.from] += 1;
            degrees[e.to] += 1;
        }
        let g = MetricGraph { vertices, edges, degrees };
        let components = g.component_count();
        if components != 1 {
            return Err(Error::DisconnectedGraph { components });
        }
        Ok(g)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::build(&GraphSpec::from_json(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexSpec { id: v.id.clone(), sigma: v.sigma })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeSpec {
                    id: e.id.clone(),
                    from: self.vertices[e.from].id.clone(),
                    to: self.vertices[e.to].id.clone(),
                    length: e.length,
                    potential: PotentialSpec::from(&e.potential),
                })
                .collect(),
        }
    }

    /// Breadth-first count of connected components (isolated vertices count).
    fn component_count(&self) -> usize {
        let n = self.vertices.len();
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.from].push(e.to);
            adj[e.to].push(e.from);
        }
        let mut seen = vec![false; n];
        let mut components = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        components
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v.id == id)
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn min_edge_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).fold(f64::INFINITY, f64::min)
    }

    pub fn degree(&self, id: &str) -> Result<usize> {
        Ok(self.degrees[self.vertex_index(id)?])
    }

    pub fn degree_of(&self, v: usize) -> usize {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn min_degree(&self) -> usize {
        self.degrees.iter().copied().min().unwrap_or(0)
    }

    pub fn classify(&self) -> GraphClass {
        if self.degrees.iter().all(|&d| d == 2) {
            GraphClass::LoopGraph
        } else if self.degrees.iter().all(|&d| d == 1 || d == 2) {
            GraphClass::LineGraph
        } else {
            GraphClass::General
        }
    }

    /// Whether the underlying multigraph has a cycle (parallel edges count).
    pub fn has_cycle(&self) -> bool {
        self.edges.len() >= self.vertices.len()
    }

    pub fn couplings(&self) -> impl Iterator<Item = f64> + '_ {
        self.vertices.iter().map(|v| v.sigma)
    }

    /// `∫_G q dx`, each edge integrated to `tol / |E|`.
    pub fn potential_integral(&self, tol: f64) -> Result<f64> {
        let per_edge = tol / self.edges.len() as f64;
        self.edges.iter().map(|e| e.potential.integrate_edge(e.length, per_edge)).sum()
    }

    /// Largest sup-norm estimate over the edges.
    pub fn potential_sup_norm(&self) -> Result<f64> {
        self.edges
            .iter()
            .map(|e| e.potential.sup_norm_estimate(e.length))
            .try_fold(0.0f64, |m, s| s.map(|s| m.max(s)))
    }

    /// Same graph with potentials `τ·q` and couplings `τ·σ`.
    pub fn scaled(&self, tau: f64) -> MetricGraph {
        let mut g = self.clone();
        for v in &mut g.vertices {
            v.sigma *= tau;
        }
        for e in &mut g.edges {
            e.potential = e.potential.scaled(tau);
        }
        g
    }

    /// Same graph with `q + c` on every edge.
    pub fn shifted(&self, c: f64) -> MetricGraph {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.potential = e.potential.shifted(c);
        }
        g
    }

    /// Same topology and lengths with `q = 0` and `σ = 0`.
    pub fn free(&self) -> MetricGraph {
        let mut g = self.clone();
        for v in &mut g.vertices {
            v.sigma = 0.0;
        }
        for e in &mut g.edges {
            e.potential = Potential::Constant(0.0);
        }
        g
    }

    /// Reverses edge `i`, reflecting its potential so the operator is unchanged.
    pub fn with_reversed_edge(&self, i: usize) -> MetricGraph {
        let mut g = self.clone();
        let e = &mut g.edges[i];
        std::mem::swap(&mut e.from, &mut e.to);
        e.potential = e.potential.reflected(e.length);
        g
    }

    /// Reorders vertices by `perm` (new position `k` holds old vertex `perm[k]`).
    pub fn with_vertex_order(&self, perm: &[usize]) -> MetricGraph {
        let mut inverse = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let vertices = perm.iter().map(|&old| self.vertices[old].clone()).collect();
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { from: inverse[e.from], to: inverse[e.to], ..e.clone() })
            .collect();
        let degrees = perm.iter().map(|&old| self.degrees[old]).collect();
        MetricGraph { vertices, edges, degrees }
    }

    pub fn is_free(&self) -> bool {
        self.vertices.iter().all(|v| v.sigma == 0.0)
            && self.edges.iter().all(|e| e.potential.as_constant() == Some(0.0))
    }
}
