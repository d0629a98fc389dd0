//! Adaptive composite Gauss–Legendre quadrature.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Points per panel; exact for polynomials of degree `2 * PANEL_ORDER - 1`.
pub const PANEL_ORDER: usize = 10;
const MAX_PANELS: usize = 1 << 15;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights on [-1, 1] by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn apply<F>(&self, f: &mut F, a: f64, b: f64) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x)?;
        }
        Ok(acc * half)
    }
}

/// P_n(z) and P_n'(z) by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (z * p - p0) / (z * z - 1.0);
    (p, d)
}

pub fn panel_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(PANEL_ORDER))
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol` by interval halving.
///
/// Each panel's error is estimated by comparing the panel rule against the
/// sum over its two halves; a panel is accepted when that estimate is within
/// its length-proportional share of `tol`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("quadrature tolerance {tol}")));
    }
    if a == b {
        return Ok(0.0);
    }
    let rule = panel_rule();
    let total = (b - a).abs();
    let whole = rule.apply(&mut f, a, b)?;
    let mut stack = vec![(a, b, whole)];
    let mut value = 0.0;
    let mut err_sum = 0.0;
    let mut panels = 0usize;
    while let Some((lo, hi, coarse)) = stack.pop() {
        panels += 1;
        let mid = 0.5 * (lo + hi);
        let left = rule.apply(&mut f, lo, mid)?;
        let right = rule.apply(&mut f, mid, hi)?;
        let fine = left + right;
        let err = (fine - coarse).abs();
        let share = tol * (hi - lo).abs() / total;
        let unsplittable = mid == lo || mid == hi;
        if err <= share || unsplittable {
            value += fine;
            err_sum += err;
            continue;
        }
        if panels + stack.len() >= MAX_PANELS {
            return Err(Error::NonConvergent { estimate: err_sum + err, tol });
        }
        stack.push((mid, hi, right));
        stack.push((lo, mid, left));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_to_two() {
        for n in 1..=20 {
            let r = GaussLegendre::new(n);
            let s: f64 = r.weights.iter().sum();
            assert_relative_eq!(s, 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn single_panel_exact_to_degree_13() {
        let rule = panel_rule();
        for deg in 0..=13i32 {
            let mut f = |x: f64| Ok(x.powi(deg) + 0.5 * x.powi(deg / 2));
            let got = rule.apply(&mut f, 0.0, 1.5).unwrap();
            let want = 1.5f64.powi(deg + 1) / (deg + 1) as f64
                + 0.5 * 1.5f64.powi(deg / 2 + 1) / (deg / 2 + 1) as f64;
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn adaptive_integrals() {
        let v = integrate(|x| Ok(2.0 / (1.0 + x).powi(2)), 0.0, 0.5, 1e-13).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-13);
        let v = integrate(|x| Ok(x.abs().sqrt()), -1.0, 1.0, 1e-10).unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-10);
        let v = integrate(|x: f64| Ok((40.0 * x).sin()), 0.0, 3.0, 1e-12).unwrap();
        assert!((v - (1.0 - 120f64.cos()) / 40.0).abs() < 1e-12);
    }

    #[test]
    fn errors_propagate() {
        let r = integrate(|x| if x > 0.3 { Err(Error::Domain("x".into())) } else { Ok(x) }, 0.0, 1.0, 1e-8);
        assert!(matches!(r, Err(Error::Domain(_))));
        assert!(integrate(|x| Ok(x), 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn panel_budget_exhaustion() {
        let r = integrate(|x: f64| Ok((1e6 * x).sin()), 0.0, 1.0, 1e-14);
        assert!(matches!(r, Err(Error::NonConvergent { .. })));
    }
}
