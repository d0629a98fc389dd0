//! Averaged eigenvalue shifts against the free operator on the same graph.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::secular::{compute_spectrum, EigenvalueList, SpectrumRequest};

const INTEGRAL_TOL: f64 = 1e-12;
const AITKEN_FLOOR: f64 = 1e-14;
pub const MIN_TERMS: usize = 10;

/// `(1/L) ∫ q + (2/L) Σ_v σ_v / deg(v)`.
pub fn rhs_functional(g: &MetricGraph) -> Result<f64> {
    let vertex_sum: f64 = g
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| v.sigma / g.degree_of(i) as f64)
        .sum();
    let l = g.total_length();
    Ok(g.potential_integral(INTEGRAL_TOL)? / l + 2.0 * vertex_sum / l)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceAverageReport {
    pub n_used: usize,
    /// `λ_1 … λ_N` of the operator.
    pub perturbed: Vec<f64>,
    /// `λ_1 … λ_N` of the free operator.
    pub free: Vec<f64>,
    /// `λ_n^{q,σ} - λ_n^0`.
    pub closeness: Vec<f64>,
    /// `S_N`, the running mean of the differences.
    pub partial_averages: Vec<f64>,
    /// Running mean of `S_N`.
    pub cesaro: Vec<f64>,
    pub extrapolated: f64,
    pub rhs: f64,
    pub residual: f64,
}

impl TraceAverageReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,lambda_pert,lambda_free,diff,S_N,cesaro\n");
        for i in 0..self.n_used {
            let _ = writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                i + 1,
                self.perturbed[i],
                self.free[i],
                self.closeness[i],
                self.partial_averages[i],
                self.cesaro[i]
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn running_mean(xs: &[f64]) -> Vec<f64> {
    let mut sum = 0.0;
    xs.iter()
        .enumerate()
        .map(|(i, x)| {
            sum += x;
            sum / (i + 1) as f64
        })
        .collect()
}

/// Aitken Δ² on the sequence sampled at `N/4`, `N/2`, `N` (1-based).
fn extrapolate(c: &[f64]) -> f64 {
    let n = c.len();
    let (x0, x1, x2) = (c[n / 4 - 1], c[n / 2 - 1], c[n - 1]);
    let denom = x2 - 2.0 * x1 + x0;
    if denom.abs() < AITKEN_FLOOR {
        x2
    } else {
        x2 - (x2 - x1).powi(2) / denom
    }
}

fn excited(list: &EigenvalueList, n: usize) -> Result<Vec<f64>> {
    if !list.certified {
        return Err(Error::UncertifiedSpectrum { found: list.total(), expected: list.weyl_expected });
    }
    Ok(list.expanded().into_iter().skip(1).take(n).collect())
}

/// Compares `λ_1 … λ_N` of the graph against the free operator on the same
/// metric graph, paired by index with multiplicity.
pub fn trace_average(g: &MetricGraph, n: usize, tol: f64) -> Result<TraceAverageReport> {
    if n < MIN_TERMS {
        return Err(Error::InvalidArgument(format!("need at least {MIN_TERMS} terms, got {n}")));
    }
    let req = SpectrumRequest::count(n + 1).with_tol(tol);
    let free_graph = g.free();
    let (pert, free) = rayon::join(|| compute_spectrum(g, &req), || compute_spectrum(&free_graph, &req));
    let perturbed = excited(&pert?, n)?;
    let free = excited(&free?, n)?;
    let closeness: Vec<f64> = perturbed.iter().zip(&free).map(|(a, b)| a - b).collect();
    let partial_averages = running_mean(&closeness);
    let cesaro = running_mean(&partial_averages);
    let extrapolated = extrapolate(&cesaro);
    let rhs = rhs_functional(g)?;
    Ok(TraceAverageReport {
        n_used: n,
        perturbed,
        free,
        closeness,
        partial_averages,
        cesaro,
        extrapolated,
        rhs,
        residual: (extrapolated - rhs).abs(),
    })
}

/// Whether `|λ_n^{q,σ} - λ_n^0| < eps` over the last `window` indices.
pub fn closeness_test(report: &TraceAverageReport, window: usize, eps: f64) -> bool {
    let start = report.closeness.len().saturating_sub(window);
    report.closeness[start..].iter().all(|d| d.abs() < eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::potential::Potential;
    use std::f64::consts::PI;

    #[test]
    fn rhs_examples() {
        assert!(rhs_functional(&fixtures::counterexample()).unwrap().abs() < 1e-12);
        assert!((rhs_functional(&fixtures::star3(-1.0)).unwrap() + 2.0 / 9.0).abs() < 1e-15);
        let g = fixtures::interval_with(2.0, Potential::Constant(0.7), 0.0, 0.0);
        assert!((rhs_functional(&g).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn aitken_recovers_harmonic_tail() {
        let c: Vec<f64> = (1..=64).map(|n| 0.3 + 2.0 / n as f64).collect();
        assert!((extrapolate(&c) - 0.3).abs() < 1e-12);
        let flat = vec![1.5; 40];
        assert_eq!(extrapolate(&flat), 1.5);
    }

    #[test]
    fn constant_shift_is_exact() {
        let g = fixtures::interval_with(PI, Potential::Constant(1.0), 0.0, 0.0);
        let r = trace_average(&g, 30, 1e-10).unwrap();
        assert!(r.closeness.iter().all(|d| (d - 1.0).abs() < 1e-8));
        assert!(r.partial_averages.iter().all(|s| (s - 1.0).abs() < 1e-8));
        assert!(r.residual < 1e-8);
        assert!(!closeness_test(&r, 10, 0.5));
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 31);
        assert!(csv.starts_with("n,lambda_pert,lambda_free,diff,S_N,cesaro\n1,"));
    }

    #[test]
    fn free_against_itself() {
        let r = trace_average(&fixtures::star3(0.0), 12, 1e-10).unwrap();
        assert!(closeness_test(&r, 12, 1e-300));
        assert_eq!(r.extrapolated, 0.0);
    }

    #[test]
    fn too_few_terms() {
        assert!(trace_average(&fixtures::interval(1.0), 9, 1e-8).is_err());
    }

    #[test]
    fn json_round_trip() {
        let r = trace_average(&fixtures::counterexample(), 10, 1e-10).unwrap();
        let back: TraceAverageReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
