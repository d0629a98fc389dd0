//! Piecewise-linear finite elements for the quadratic form
//! `h(f) = ∫|f'|² + ∫ q|f|² + Σ_v σ_v |f(v)|²` on `H¹(G)`.
//!
//! All edge ends meeting at a vertex share the vertex's degree of freedom,
//! which is how continuity across vertices enters the discretization.
//! Vertex DOFs come first (`0..|V|`), followed by each edge's interior nodes.

use std::collections::BTreeMap;

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::MetricGraph;

/// Largest system accepted by the dense eigensolver.
pub const DENSE_DOF_LIMIT: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMesh {
    pub elements: usize,
    pub spacing: f64,
    /// First interior DOF; interior nodes are `first_interior .. first_interior + elements - 1`.
    pub first_interior: usize,
    pub from: usize,
    pub to: usize,
}

impl EdgeMesh {
    /// DOF of node `j` (`0 ..= elements`) along the edge.
    pub fn dof(&self, j: usize) -> usize {
        if j == 0 {
            self.from
        } else if j == self.elements {
            self.to
        } else {
            self.first_interior + j - 1
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertex_dofs: usize,
    pub edges: Vec<EdgeMesh>,
    pub dofs: usize,
}

impl Mesh {
    pub fn new(g: &MetricGraph, h: f64) -> Result<Mesh> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("mesh size {h}")));
        }
        let mut next = g.vertices().len();
        let edges = g
            .edges()
            .iter()
            .map(|e| {
                let elements = ((e.length / h).ceil() as usize).max(1);
                let m = EdgeMesh {
                    elements,
                    spacing: e.length / elements as f64,
                    first_interior: next,
                    from: e.from,
                    to: e.to,
                };
                next += elements - 1;
                m
            })
            .collect();
        Ok(Mesh { vertex_dofs: g.vertices().len(), edges, dofs: next })
    }
}

/// Symmetric sparse matrix holding the upper triangle.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SymmetricSparse {
    pub n: usize,
    upper: BTreeMap<(usize, usize), f64>,
}

impl SymmetricSparse {
    fn new(n: usize) -> Self {
        SymmetricSparse { n, upper: BTreeMap::new() }
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        let key = if i <= j { (i, j) } else { (j, i) };
        *self.upper.entry(key).or_insert(0.0) += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.upper.get(&key).copied().unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (&(i, j), &v) in &self.upper {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m
    }
}

#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub mesh: Mesh,
    pub stiffness: SymmetricSparse,
    pub mass: SymmetricSparse,
}

/// 3-point Gauss rule on [0, 1].
const GAUSS3: [(f64, f64); 3] = [
    (0.112_701_665_379_258_31, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.887_298_334_620_741_7, 5.0 / 18.0),
];

pub fn assemble(g: &MetricGraph, h: f64) -> Result<AssembledSystem> {
    let mesh = Mesh::new(g, h)?;
    let mut a = SymmetricSparse::new(mesh.dofs);
    let mut m = SymmetricSparse::new(mesh.dofs);
    for (edge, em) in g.edges().iter().zip(&mesh.edges) {
        let hs = em.spacing;
        for j in 0..em.elements {
            let (p, r) = (em.dof(j), em.dof(j + 1));
            let x0 = j as f64 * hs;
            let (mut qpp, mut qpr, mut qrr) = (0.0, 0.0, 0.0);
            for (t, w) in GAUSS3 {
                let q = edge.potential.value_at(x0 + t * hs, edge.length)?;
                let (phi_p, phi_r) = (1.0 - t, t);
                qpp += w * q * phi_p * phi_p;
                qpr += w * q * phi_p * phi_r;
                qrr += w * q * phi_r * phi_r;
            }
            a.add(p, p, 1.0 / hs + hs * qpp);
            a.add(r, r, 1.0 / hs + hs * qrr);
            a.add(p, r, -1.0 / hs + hs * qpr);
            m.add(p, p, hs / 3.0);
            m.add(r, r, hs / 3.0);
            m.add(p, r, hs / 6.0);
        }
    }
    for (v, vertex) in g.vertices().iter().enumerate() {
        if vertex.sigma != 0.0 {
            a.add(v, v, vertex.sigma);
        }
    }
    Ok(AssembledSystem { mesh, stiffness: a, mass: m })
}

/// Smallest `n` eigenvalues of `A x = λ M x` by Cholesky reduction and a dense
/// symmetric eigensolver (Householder tridiagonalization + implicit QR).
pub fn solve_eigen(sys: &AssembledSystem, n: usize) -> Result<Vec<f64>> {
    let dofs = sys.mesh.dofs;
    if n == 0 || n > dofs {
        return Err(Error::InvalidArgument(format!("requested {n} of {dofs} eigenvalues")));
    }
    if dofs > DENSE_DOF_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "{dofs} DOFs exceed the dense limit of {DENSE_DOF_LIMIT}"
        )));
    }
    let a = sys.stiffness.to_dense();
    let m = sys.mass.to_dense();
    let chol = Cholesky::new(m).ok_or(Error::MassNotPositiveDefinite)?;
    let l = chol.l();
    // C = L^{-1} A L^{-T}
    let y = l
        .solve_lower_triangular(&a)
        .ok_or(Error::MassNotPositiveDefinite)?;
    let c = l
        .solve_lower_triangular(&y.transpose())
        .ok_or(Error::MassNotPositiveDefinite)?;
    let c = (&c + c.transpose()) * 0.5;
    let mut values: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values.truncate(n);
    Ok(values)
}

/// One edge's interior chain, in the order `from, i_1, …, i_m, to`.
#[derive(Debug, Clone)]
struct Chain {
    from: usize,
    to: usize,
    a_diag: Vec<f64>,
    m_diag: Vec<f64>,
    /// `m + 1` couplings between consecutive chain nodes, vertex ends included.
    a_off: Vec<f64>,
    m_off: Vec<f64>,
}

/// Counts eigenvalues of `A x = λ M x` below a shift from the inertia of
/// `A - λM` (Sylvester), eliminating each edge's tridiagonal interior chain
/// and then the dense vertex Schur complement.
#[derive(Debug, Clone)]
pub struct InertiaCounter {
    chains: Vec<Chain>,
    a_vertex: DMatrix<f64>,
    m_vertex: DMatrix<f64>,
}

impl InertiaCounter {
    pub fn new(sys: &AssembledSystem) -> Self {
        let nv = sys.mesh.vertex_dofs;
        let chains = sys
            .mesh
            .edges
            .iter()
            .filter(|em| em.elements > 1)
            .map(|em| {
                let interior: Vec<usize> = (1..em.elements).map(|j| em.dof(j)).collect();
                let nodes: Vec<usize> = (0..=em.elements).map(|j| em.dof(j)).collect();
                Chain {
                    from: em.from,
                    to: em.to,
                    a_diag: interior.iter().map(|&i| sys.stiffness.get(i, i)).collect(),
                    m_diag: interior.iter().map(|&i| sys.mass.get(i, i)).collect(),
                    a_off: nodes.windows(2).map(|w| sys.stiffness.get(w[0], w[1])).collect(),
                    m_off: nodes.windows(2).map(|w| sys.mass.get(w[0], w[1])).collect(),
                }
            })
            .collect();
        let a_vertex = DMatrix::from_fn(nv, nv, |i, j| sys.stiffness.get(i, j));
        let m_vertex = DMatrix::from_fn(nv, nv, |i, j| sys.mass.get(i, j));
        InertiaCounter { chains, a_vertex, m_vertex }
    }

    /// Number of eigenvalues strictly below `shift` (generic shifts).
    pub fn count_below(&self, shift: f64) -> usize {
        let mut schur = &self.a_vertex - &self.m_vertex * shift;
        let mut negatives = 0;
        for ch in &self.chains {
            let m = ch.a_diag.len();
            let t: Vec<f64> = (0..m).map(|i| ch.a_diag[i] - shift * ch.m_diag[i]).collect();
            let e: Vec<f64> = (0..=m).map(|i| ch.a_off[i] - shift * ch.m_off[i]).collect();
            // LDLᵀ of the interior tridiagonal block; e[i] couples chain nodes i and i+1,
            // so interior entries are t[0..m] with off-diagonals e[1..m].
            let mut d = vec![0.0; m];
            for i in 0..m {
                let mut p = t[i];
                if i > 0 {
                    p -= e[i] * e[i] / d[i - 1];
                }
                if p == 0.0 {
                    p = f64::EPSILON * (t[i].abs() + e[i].abs() + e[i + 1].abs()).max(f64::MIN_POSITIVE);
                }
                if p < 0.0 {
                    negatives += 1;
                }
                d[i] = p;
            }
            let solve = |rhs_index: usize| -> Vec<f64> {
                // L z = e_k, then D w = z, then Lᵀ x = w
                let mut z = vec![0.0; m];
                z[rhs_index] = 1.0;
                for i in rhs_index + 1..m {
                    z[i] = -e[i] / d[i - 1] * z[i - 1];
                }
                let mut x: Vec<f64> = (0..m).map(|i| z[i] / d[i]).collect();
                for i in (0..m - 1).rev() {
                    x[i] -= e[i + 1] / d[i] * x[i + 1];
                }
                x
            };
            let first = solve(0);
            let last = solve(m - 1);
            let (bu, bv) = (e[0], e[m]);
            let (x11, x1m, xmm) = (first[0], first[m - 1], last[m - 1]);
            let (u, v) = (ch.from, ch.to);
            schur[(u, u)] -= bu * bu * x11;
            schur[(v, v)] -= bv * bv * xmm;
            schur[(u, v)] -= bu * bv * x1m;
            schur[(v, u)] -= bu * bv * x1m;
        }
        let eig = SymmetricEigen::new(schur).eigenvalues;
        negatives + eig.iter().filter(|&&x| x < 0.0).count()
    }

    /// Smallest `n` eigenvalues by bisection on the inertia count.
    pub fn lowest(&self, n: usize, rel_tol: f64) -> Vec<f64> {
        let mut lo = -1.0;
        while self.count_below(lo) > 0 {
            lo *= 2.0;
        }
        let mut hi = 1.0;
        while self.count_below(hi) < n {
            hi *= 2.0;
        }
        (0..n)
            .map(|k| {
                let (mut a, mut b) = (lo, hi);
                loop {
                    let mid = 0.5 * (a + b);
                    if b - a <= rel_tol * mid.abs().max(1.0) || mid == a || mid == b {
                        return mid;
                    }
                    if self.count_below(mid) > k {
                        b = mid;
                    } else {
                        a = mid;
                    }
                }
            })
            .collect()
    }
}

/// Smallest `n` eigenvalues of the discretized operator at mesh size `h`,
/// without forming dense matrices.
pub fn lowest_eigenvalues(g: &MetricGraph, h: f64, n: usize) -> Result<Vec<f64>> {
    let sys = assemble(g, h)?;
    if n == 0 || n > sys.mesh.dofs {
        return Err(Error::InvalidArgument(format!(
            "requested {n} of {} eigenvalues",
            sys.mesh.dofs
        )));
    }
    Ok(InertiaCounter::new(&sys).lowest(n, 1e-13))
}

/// Discrete eigenvalues not exceeding `lambda_max` at mesh size `h`.
pub fn eigenvalues_below(g: &MetricGraph, h: f64, lambda_max: f64) -> Result<Vec<f64>> {
    if !lambda_max.is_finite() {
        return Err(Error::InvalidArgument(format!("lambda_max {lambda_max}")));
    }
    let sys = assemble(g, h)?;
    let counter = InertiaCounter::new(&sys);
    let n = counter.count_below(lambda_max);
    if n == 0 {
        return Ok(Vec::new());
    }
    Ok(counter.lowest(n, 1e-13))
}
