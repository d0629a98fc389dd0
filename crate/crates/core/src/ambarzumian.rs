//! Rigidity functionals and sufficient conditions for a spectrum equal to the
//! free one to force `q = 0` and `σ = 0`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{GraphClass, MetricGraph};

/// Absolute tolerance band on the inequalities.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LineLoopCase {
    NotLineGraph,
    /// All degrees equal two; rigid for every coupling.
    LoopGraph,
    /// Degrees in {1, 2} with `σ ≥ 0`; rigid.
    LineGraphNonNegativeCoupling,
    /// Degrees in {1, 2} with some `σ_v < 0`; no conclusion.
    LineGraphNegativeCoupling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conclusion {
    /// A spectrum equal to the free one would force `q = 0` and `σ = 0`.
    RigidityImplied,
    /// `Φ₁ ≠ 0`, so the spectrum cannot equal the free one.
    SpectrumMustDiffer,
    Inconclusive,
}

/// Verdict for one instance. `theorem_hypothesis` is the implication
/// `Φ₁ = 0 ⇒ Φ₂ ≤ 0` evaluated at this `(q, σ)` only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbarzumianVerdict {
    pub phi1: f64,
    pub phi2: f64,
    pub cond_i: bool,
    pub cond_ii: bool,
    pub cond_iii: bool,
    pub line_loop_case: LineLoopCase,
    pub theorem_hypothesis: bool,
    pub conclusion: Conclusion,
    pub tol: f64,
}

impl AmbarzumianVerdict {
    pub fn summary(&self) -> String {
        let mark = |b: bool| if b { "holds" } else { "fails" };
        format!(
            "Phi1 = {:.12}\nPhi2 = {:.12}\ncondition (i): {}\ncondition (ii): {}\ncondition (iii): {}\n\
             line/loop case: {:?}\ninstance hypothesis (Phi1 = 0 => Phi2 <= 0): {}\nconclusion: {:?}\n",
            self.phi1,
            self.phi2,
            mark(self.cond_i),
            mark(self.cond_ii),
            mark(self.cond_iii),
            self.line_loop_case,
            mark(self.theorem_hypothesis),
            self.conclusion
        )
    }
}

fn quadrature_tol(tol: f64) -> f64 {
    (1e-3 * tol).clamp(1e-14, 1e-10)
}

/// `Φ₁ = ∫q + 2 Σ σ_v/deg(v)` and `Φ₂ = ∫q + Σ σ_v`.
pub fn functionals(g: &MetricGraph, tol: f64) -> Result<(f64, f64)> {
    let integral = g.potential_integral(quadrature_tol(tol))?;
    let weighted: f64 = g
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| v.sigma / g.degree_of(i) as f64)
        .sum();
    let plain: f64 = g.couplings().sum();
    Ok((integral + 2.0 * weighted, integral + plain))
}

pub fn check_conditions(g: &MetricGraph, tol: f64) -> Result<AmbarzumianVerdict> {
    let integral = g.potential_integral(quadrature_tol(tol))?;
    let (phi1, phi2) = functionals(g, tol)?;
    let sigmas: Vec<f64> = g.couplings().collect();
    let cond_i_sum: f64 = sigmas
        .iter()
        .enumerate()
        .map(|(i, s)| s * (1.0 - 2.0 / g.degree_of(i) as f64))
        .sum();
    let cond_i = cond_i_sum <= tol;
    let cond_ii = integral >= -tol && sigmas.iter().all(|&s| s >= -tol);
    let delta_min = g.min_degree() as f64;
    let cond_iii = (delta_min / 2.0 - 1.0) * integral >= -tol && sigmas.iter().all(|&s| s <= tol);
    let line_loop_case = match g.classify() {
        GraphClass::LoopGraph => LineLoopCase::LoopGraph,
        GraphClass::LineGraph if sigmas.iter().all(|&s| s >= -tol) => {
            LineLoopCase::LineGraphNonNegativeCoupling
        }
        GraphClass::LineGraph => LineLoopCase::LineGraphNegativeCoupling,
        GraphClass::General => LineLoopCase::NotLineGraph,
    };
    let phi1_vanishes = phi1.abs() <= tol;
    let theorem_hypothesis = !phi1_vanishes || phi2 <= tol;
    let conclusion = if !phi1_vanishes {
        Conclusion::SpectrumMustDiffer
    } else if cond_i || cond_ii || cond_iii || theorem_hypothesis {
        Conclusion::RigidityImplied
    } else {
        Conclusion::Inconclusive
    };
    Ok(AmbarzumianVerdict {
        phi1,
        phi2,
        cond_i,
        cond_ii,
        cond_iii,
        line_loop_case,
        theorem_hypothesis,
        conclusion,
        tol,
    })
}

/// Checks that `λ₀ ≥ 0` together with `Φ₂ ≤ 0` only occurs for `q = 0, σ = 0`;
/// vacuously true when that hypothesis fails.
pub fn davies_consistency(g: &MetricGraph, lambda0: f64, tol: f64) -> Result<bool> {
    let (_, phi2) = functionals(g, tol)?;
    if lambda0 < -tol || phi2 > tol {
        return Ok(true);
    }
    let max_sigma = g.couplings().fold(0.0f64, |m, s| m.max(s.abs()));
    Ok(g.potential_sup_norm()? <= tol && max_sigma <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn counterexample_instance() {
        let g = fixtures::counterexample();
        let (phi1, phi2) = functionals(&g, DEFAULT_TOL).unwrap();
        assert!(phi1.abs() < 1e-12);
        assert!((phi2 - 1.0 / 3.0).abs() < 1e-12);
        let v = check_conditions(&g, DEFAULT_TOL).unwrap();
        assert!(!v.cond_i && !v.cond_ii && !v.cond_iii && !v.theorem_hypothesis);
        assert_eq!(v.line_loop_case, LineLoopCase::LineGraphNegativeCoupling);
        assert_eq!(v.conclusion, Conclusion::Inconclusive);
        assert!(davies_consistency(&g, 0.0, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn attractive_star() {
        let g = fixtures::star3(-1.0);
        let (phi1, phi2) = functionals(&g, DEFAULT_TOL).unwrap();
        assert!((phi1 + 2.0 / 3.0).abs() < 1e-15);
        assert!((phi2 + 1.0).abs() < 1e-15);
        let v = check_conditions(&g, DEFAULT_TOL).unwrap();
        assert_eq!(v.conclusion, Conclusion::SpectrumMustDiffer);
        assert_eq!(v.line_loop_case, LineLoopCase::NotLineGraph);
        assert!(davies_consistency(&g, -0.5, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn free_graphs_are_rigid() {
        for g in [fixtures::star3(0.0), fixtures::cycle(4, 0.5), fixtures::interval(2.0)] {
            assert_eq!(functionals(&g, DEFAULT_TOL).unwrap(), (0.0, 0.0));
            let v = check_conditions(&g, DEFAULT_TOL).unwrap();
            assert!(v.cond_i && v.cond_ii && v.cond_iii && v.theorem_hypothesis);
            assert_eq!(v.conclusion, Conclusion::RigidityImplied);
            assert!(davies_consistency(&g, 0.0, DEFAULT_TOL).unwrap());
        }
        assert_eq!(
            check_conditions(&fixtures::cycle(3, 1.0), DEFAULT_TOL).unwrap().line_loop_case,
            LineLoopCase::LoopGraph
        );
    }

    #[test]
    fn davies_flags_nontrivial_instance() {
        // a repulsive coupling balanced by a negative constant potential
        let g = fixtures::interval_with(1.0, crate::Potential::Constant(-1.0), 0.5, 0.5);
        assert!(!davies_consistency(&g, 0.0, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn verdict_serializes_every_field() {
        let v = check_conditions(&fixtures::counterexample(), DEFAULT_TOL).unwrap();
        let json = serde_json::to_value(v).unwrap();
        for key in ["phi1", "phi2", "cond_i", "cond_ii", "cond_iii", "line_loop_case",
            "theorem_hypothesis", "conclusion"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        assert_eq!(json["conclusion"], "Inconclusive");
        assert!(v.summary().contains("conclusion: Inconclusive"));
    }
}
