//! Standard graphs used by the demos and tests.

use crate::graph::{Edge, MetricGraph, Vertex};
use crate::potential::Potential;

fn vertex(id: &str, sigma: f64) -> Vertex {
    Vertex { id: id.to_string(), sigma }
}

fn edge(id: &str, from: usize, to: usize, length: f64, potential: Potential) -> Edge {
    Edge { id: id.to_string(), from, to, length, potential }
}

fn assemble(vertices: Vec<Vertex>, edges: Vec<Edge>) -> MetricGraph {
    // fixtures are valid by construction
    MetricGraph::from_parts(vertices, edges).expect("fixture graph is valid")
}

/// Interval `[0, length]` with standard conditions at both ends and `q = 0`.
pub fn interval(length: f64) -> MetricGraph {
    interval_with(length, Potential::Constant(0.0), 0.0, 0.0)
}

pub fn interval_with(length: f64, potential: Potential, sigma0: f64, sigma1: f64) -> MetricGraph {
    assemble(
        vec![vertex("v0", sigma0), vertex("v1", sigma1)],
        vec![edge("e0", 0, 1, length, potential)],
    )
}

/// Equilateral 3-star with unit edges: centre `vc` with coupling `sigma_center`,
/// leaves `v1..v3` with standard conditions.
pub fn star3(sigma_center: f64) -> MetricGraph {
    star(&[1.0, 1.0, 1.0], sigma_center)
}

pub fn star(lengths: &[f64], sigma_center: f64) -> MetricGraph {
    let mut vertices = vec![vertex("vc", sigma_center)];
    let mut edges = Vec::new();
    for (i, &len) in lengths.iter().enumerate() {
        vertices.push(vertex(&format!("v{}", i + 1), 0.0));
        edges.push(edge(&format!("e{}", i + 1), 0, i + 1, len, Potential::Constant(0.0)));
    }
    assemble(vertices, edges)
}

/// `[0, 1/2]` with `q(x) = 2/(1+x)^2`, `σ = -1` at `x = 0` and `σ = 2/3` at `x = 1/2`;
/// isospectral to the free operator on that interval.
pub fn counterexample() -> MetricGraph {
    let q = Potential::expression("2/(1+x)^2").expect("fixture expression parses");
    interval_with(0.5, q, -1.0, 2.0 / 3.0)
}

/// Cycle of `n ≥ 2` equal edges.
pub fn cycle(n: usize, length: f64) -> MetricGraph {
    let vertices = (0..n).map(|i| vertex(&format!("v{i}"), 0.0)).collect();
    let edges = (0..n)
        .map(|i| edge(&format!("e{i}"), i, (i + 1) % n, length, Potential::Constant(0.0)))
        .collect();
    assemble(vertices, edges)
}

/// Path graph with the given edge lengths.
pub fn path(lengths: &[f64]) -> MetricGraph {
    let vertices = (0..=lengths.len()).map(|i| vertex(&format!("v{i}"), 0.0)).collect();
    let edges = lengths
        .iter()
        .enumerate()
        .map(|(i, &l)| edge(&format!("e{i}"), i, i + 1, l, Potential::Constant(0.0)))
        .collect();
    assemble(vertices, edges)
}

/// Random connected graph with 3–5 edges, lengths in `[0.5, 2]`, potentials
/// `a + b sin(c x + d)` with `|a| + |b| ≤ 3` and couplings in `[-2, 2]`.
/// `uniform` yields independent samples from `[0, 1)`.
pub fn random_graph(uniform: &mut dyn FnMut() -> f64) -> MetricGraph {
    let mut pick = |n: usize| ((uniform() * n as f64) as usize).min(n - 1);
    let m = 3 + pick(3);
    let n = 2 + pick(m);
    let mut ends: Vec<(usize, usize)> = (1..n).map(|i| (pick(i), i)).collect();
    while ends.len() < m {
        let u = pick(n);
        let v = (u + 1 + pick(n - 1)) % n;
        ends.push((u, v));
    }
    let vertices = (0..n).map(|i| vertex(&format!("v{i}"), 4.0 * uniform() - 2.0)).collect();
    let edges = ends
        .into_iter()
        .enumerate()
        .map(|(i, (u, v))| {
            let length = 0.5 + 1.5 * uniform();
            let a = 3.0 * uniform() - 1.5;
            let b = 3.0 * uniform() - 1.5;
            let c = 0.5 + 3.5 * uniform();
            let d = 2.0 * std::f64::consts::PI * uniform();
            let q = Potential::expression(&format!("{a} + ({b})*sin({c}*x + {d})"))
                .expect("generated expression parses");
            edge(&format!("e{i}"), u, v, length, q)
        })
        .collect();
    assemble(vertices, edges)
}
