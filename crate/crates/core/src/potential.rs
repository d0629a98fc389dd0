//! Edge potentials: constants, parsed expressions in the edge coordinate, or uniform samples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::quadrature;

/// Number of uniform points used by [`Potential::sup_norm_estimate`].
pub const SUP_SAMPLES: usize = 1024;
/// Safety factor applied to sampled sup-norm estimates.
pub const SUP_SAFETY: f64 = 1.1;

#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Constant(f64),
    Expression { expr: Expr, source: String },
    /// Values on a uniform grid over `[0, length]`, both endpoints included.
    Samples(SampleGrid),
}

/// Wire form used in graph description files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PotentialSpec {
    Constant { value: f64 },
    Expr { expr: String },
    Samples { values: Vec<f64> },
}

impl Default for Potential {
    fn default() -> Self {
        Potential::Constant(0.0)
    }
}

impl TryFrom<PotentialSpec> for Potential {
    type Error = Error;

    fn try_from(spec: PotentialSpec) -> Result<Self> {
        match spec {
            PotentialSpec::Constant { value } => Potential::constant(value),
            PotentialSpec::Expr { expr } => Potential::expression(&expr),
            PotentialSpec::Samples { values } => Potential::samples(values),
        }
    }
}

impl From<&Potential> for PotentialSpec {
    fn from(p: &Potential) -> Self {
        match p {
            Potential::Constant(value) => PotentialSpec::Constant { value: *value },
            Potential::Expression { source, .. } => PotentialSpec::Expr { expr: source.clone() },
            Potential::Samples(grid) => PotentialSpec::Samples { values: grid.values.clone() },
        }
    }
}

impl Potential {
    pub fn constant(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidPotential(format!("constant {value} is not finite")));
        }
        Ok(Potential::Constant(value))
    }

    pub fn expression(text: &str) -> Result<Self> {
        let expr = Expr::parse(text)?;
        Ok(Potential::Expression { expr, source: text.to_string() })
    }

    pub fn samples(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidPotential("samples need at least two values".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPotential("samples must be finite".into()));
        }
        Ok(Potential::Samples(SampleGrid::new(values)))
    }

    fn from_expr(expr: Expr) -> Self {
        let source = expr.to_string();
        Potential::Expression { expr, source }
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Potential::Constant(c) => Some(*c),
            _ => None,
        }
    }

    /// Evaluates `q(x)` on an edge of the given length.
    pub fn evaluate(&self, x: f64, edge_length: f64) -> Result<f64> {
        let slack = 1e-12 * edge_length.max(1.0);
        if !(x >= -slack && x <= edge_length + slack) {
            return Err(Error::InvalidArgument(format!(
                "x = {x} outside edge [0, {edge_length}]"
            )));
        }
        self.value_at(x.clamp(0.0, edge_length), edge_length)
    }

    /// Unchecked evaluation; `x` is assumed to lie on the edge.
    pub(crate) fn value_at(&self, x: f64, edge_length: f64) -> Result<f64> {
        match self {
            Potential::Constant(c) => Ok(*c),
            Potential::Expression { expr, .. } => expr.eval(x),
            Potential::Samples(grid) => Ok(grid.value(x, edge_length)),
        }
    }

    /// `∫_0^ℓ q(x) dx` to absolute tolerance `tol`.
    pub fn integrate_edge(&self, edge_length: f64, tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!("quadrature tolerance {tol}")));
        }
        match self {
            Potential::Constant(c) => Ok(c * edge_length),
            Potential::Expression { expr, .. } => {
                quadrature::integrate(|x| expr.eval(x), 0.0, edge_length, tol)
            }
            Potential::Samples(grid) => Ok(grid.integral(edge_length)),
        }
    }

    /// Upper estimate of `max |q|` on the edge.
    pub fn sup_norm_estimate(&self, edge_length: f64) -> Result<f64> {
        match self {
            Potential::Constant(c) => Ok(c.abs()),
            Potential::Expression { expr, .. } => {
                let mut m: f64 = 0.0;
                for i in 0..SUP_SAMPLES {
                    let x = edge_length * i as f64 / (SUP_SAMPLES - 1) as f64;
                    m = m.max(expr.eval(x)?.abs());
                }
                Ok(SUP_SAFETY * m)
            }
            Potential::Samples(grid) => {
                let mut m = grid.values.iter().fold(0.0f64, |m, q| m.max(q.abs()));
                for i in 0..SUP_SAMPLES {
                    let x = edge_length * i as f64 / (SUP_SAMPLES - 1) as f64;
                    m = m.max(grid.value(x, edge_length).abs());
                }
                Ok(SUP_SAFETY * m)
            }
        }
    }

    /// `τ·q`.
    pub fn scaled(&self, tau: f64) -> Potential {
        match self {
            Potential::Constant(c) => Potential::Constant(tau * c),
            Potential::Expression { expr, .. } => {
                Potential::from_expr(Expr::Mul(Box::new(Expr::Number(tau)), Box::new(expr.clone())))
            }
            Potential::Samples(g) => Potential::Samples(SampleGrid::new(g.values.iter().map(|q| tau * q).collect())),
        }
    }

    /// `q + c`.
    pub fn shifted(&self, c: f64) -> Potential {
        match self {
            Potential::Constant(q) => Potential::Constant(q + c),
            Potential::Expression { expr, .. } => {
                Potential::from_expr(Expr::Add(Box::new(expr.clone()), Box::new(Expr::Number(c))))
            }
            Potential::Samples(g) => Potential::Samples(SampleGrid::new(g.values.iter().map(|q| q + c).collect())),
        }
    }

    /// The same field in the reversed coordinate `x ↦ ℓ - x`.
    pub fn reflected(&self, edge_length: f64) -> Potential {
        match self {
            Potential::Constant(_) => self.clone(),
            Potential::Expression { expr, .. } => Potential::from_expr(expr.reflected(edge_length)),
            Potential::Samples(g) => Potential::Samples(SampleGrid::new(g.values.iter().rev().copied().collect())),
        }
    }
}

/// C¹ piecewise-cubic Hermite interpolant of uniform samples.
///
/// Node slopes are fourth-order finite differences (second-order on grids
/// with fewer than five nodes), limited so that monotone data gives a
/// monotone interpolant: slopes next to a flat segment are zero and slopes
/// inside monotone runs are clipped to three times the smaller adjacent
/// secant. Nodes within two cells of a sign change of the secants (a resolved
/// extremum) keep the unlimited slope, which preserves accuracy on smooth data.
///
/// Slopes are stored per unit cell, so the same grid serves any edge length.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    values: Vec<f64>,
    /// `h · f'(x_i)` at each node.
    cell_slopes: Vec<f64>,
}

impl SampleGrid {
    pub fn new(values: Vec<f64>) -> Self {
        assert!(values.len() >= 2, "sample grid needs two nodes");
        let m = values.len() - 1;
        let f = &values;
        let d: Vec<f64> = f.windows(2).map(|w| w[1] - w[0]).collect();
        let mut raw = vec![0.0; m + 1];
        if m == 1 {
            raw[0] = d[0];
            raw[1] = d[0];
        } else if m < 4 {
            raw[0] = 0.5 * (-3.0 * f[0] + 4.0 * f[1] - f[2]);
            raw[m] = 0.5 * (3.0 * f[m] - 4.0 * f[m - 1] + f[m - 2]);
            for i in 1..m {
                raw[i] = 0.5 * (f[i + 1] - f[i - 1]);
            }
        } else {
            raw[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / 12.0;
            raw[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / 12.0;
            raw[m - 1] =
                (3.0 * f[m] + 10.0 * f[m - 1] - 18.0 * f[m - 2] + 6.0 * f[m - 3] - f[m - 4]) / 12.0;
            raw[m] = (25.0 * f[m] - 48.0 * f[m - 1] + 36.0 * f[m - 2] - 16.0 * f[m - 3]
                + 3.0 * f[m - 4])
                / 12.0;
            for i in 2..m - 1 {
                raw[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / 12.0;
            }
        }
        if m == 1 {
            return SampleGrid { values, cell_slopes: raw };
        }
        let clip = |s: f64, cap: f64| s.signum() * s.abs().min(cap);
        let mut slopes = raw.clone();
        for i in 1..m {
            let (dl, dr) = (d[i - 1], d[i]);
            if dl * dr < 0.0 {
                continue;
            }
            if dl == 0.0 || dr == 0.0 {
                slopes[i] = 0.0;
                continue;
            }
            let near_extremum =
                (i >= 2 && d[i - 2] * dl < 0.0) || (i + 1 < m && dr * d[i + 1] < 0.0);
            if !near_extremum {
                slopes[i] = clip(raw[i], 3.0 * dl.abs().min(dr.abs()));
            }
        }
        let end_slope = |s: f64, secant: f64| {
            if s * secant < 0.0 || secant == 0.0 {
                0.0
            } else {
                clip(s, 3.0 * secant.abs())
            }
        };
        slopes[0] = end_slope(raw[0], d[0]);
        slopes[m] = end_slope(raw[m], d[m - 1]);
        SampleGrid { values, cell_slopes: slopes }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cells(&self) -> usize {
        self.values.len() - 1
    }

    fn locate(&self, x: f64, length: f64) -> (usize, f64) {
        let m = self.cells();
        let t = (x / length * m as f64).max(0.0);
        let i = (t.floor() as usize).min(m - 1);
        (i, t - i as f64)
    }

    pub fn value(&self, x: f64, length: f64) -> f64 {
        let (i, t) = self.locate(x, length);
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t),
            t * (1.0 - t) * (1.0 - t),
            t * t * (3.0 - 2.0 * t),
            t * t * (t - 1.0),
        );
        h00 * self.values[i]
            + h10 * self.cell_slopes[i]
            + h01 * self.values[i + 1]
            + h11 * self.cell_slopes[i + 1]
    }

    pub fn derivative(&self, x: f64, length: f64) -> f64 {
        let (i, t) = self.locate(x, length);
        let (d00, d10, d01, d11) = (
            6.0 * t * (t - 1.0),
            (1.0 - t) * (1.0 - 3.0 * t),
            6.0 * t * (1.0 - t),
            t * (3.0 * t - 2.0),
        );
        let h = length / self.cells() as f64;
        (d00 * self.values[i]
            + d10 * self.cell_slopes[i]
            + d01 * self.values[i + 1]
            + d11 * self.cell_slopes[i + 1])
            / h
    }

    /// Exact integral of the interpolant over `[0, length]`.
    pub fn integral(&self, length: f64) -> f64 {
        let h = length / self.cells() as f64;
        (0..self.cells())
            .map(|i| {
                h * (0.5 * (self.values[i] + self.values[i + 1])
                    + (self.cell_slopes[i] - self.cell_slopes[i + 1]) / 12.0)
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn evaluate_examples() {
        let p = Potential::expression("2/(1+x)^2").unwrap();
        assert_eq!(p.evaluate(0.0, 0.5).unwrap(), 2.0);
        assert!((p.evaluate(0.5, 0.5).unwrap() - 0.888_888_888_888_889).abs() < 1e-15);
        let c = Potential::constant(3.5).unwrap();
        assert_eq!(c.evaluate(0.123, 1.0).unwrap(), 3.5);
        assert!(p.evaluate(0.7, 0.5).is_err());
        assert!(matches!(
            Potential::expression("sqrt(x-1)").unwrap().evaluate(0.0, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn integrate_examples() {
        let p = Potential::expression("2/(1+x)^2").unwrap();
        assert!((p.integrate_edge(0.5, 1e-13).unwrap() - 2.0 / 3.0).abs() < 1e-13);
        assert_eq!(Potential::constant(-1.5).unwrap().integrate_edge(2.0, 1e-9).unwrap(), -3.0);
        let x = Potential::expression("x").unwrap();
        assert!((x.integrate_edge(1.0, 1e-12).unwrap() - 0.5).abs() < 1e-14);
        let bad = Potential::expression("sqrt(x-0.25)").unwrap();
        assert!(bad.integrate_edge(1.0, 1e-8).is_err());
    }

    #[test]
    fn sup_norm_examples() {
        assert_eq!(Potential::constant(-4.0).unwrap().sup_norm_estimate(1.0).unwrap(), 4.0);
        let p = Potential::expression("2/(1+x)^2").unwrap();
        assert!((p.sup_norm_estimate(0.5).unwrap() - 2.2).abs() < 1e-12);
        let s = Potential::samples(vec![0.0, 1.0, 0.0]).unwrap();
        assert!((s.sup_norm_estimate(1.0).unwrap() - 1.1).abs() < 1e-12);
    }

    #[test]
    fn invalid_samples() {
        assert!(Potential::samples(vec![1.0]).is_err());
        assert!(Potential::samples(vec![1.0, f64::NAN]).is_err());
        assert!(Potential::constant(f64::INFINITY).is_err());
    }

    #[test]
    fn hermite_reproduces_quadratics() {
        let vals: Vec<f64> = (0..=8).map(|i| (i as f64 / 8.0).powi(2)).collect();
        let h = SampleGrid::new(vals);
        for k in 0..=50 {
            let x = k as f64 / 50.0;
            assert!((h.value(x, 1.0) - x * x).abs() < 1e-14);
            assert!((h.derivative(x, 1.0) - 2.0 * x).abs() < 1e-12);
        }
        assert!((h.integral(1.0) - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn monotone_data_stays_monotone() {
        let h = SampleGrid::new(vec![0.0, 0.0, 0.01, 1.0, 1.0, 1.0, 3.0, 3.5]);
        let mut prev = h.value(0.0, 7.0);
        for k in 1..=700 {
            let v = h.value(7.0 * k as f64 / 700.0, 7.0);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn sampled_expression_converges_at_third_order() {
        for text in ["sin(3*x) + x^2", "2/(1+x)^2", "exp(-x)*cos(2*x)"] {
            let p = Potential::expression(text).unwrap();
            let len = 1.3;
            let err = |m: usize| {
                let vals: Vec<f64> = (0..=m)
                    .map(|i| p.evaluate(len * i as f64 / m as f64, len).unwrap())
                    .collect();
                let s = Potential::samples(vals).unwrap();
                (0..=997)
                    .map(|k| {
                        let x = len * k as f64 / 997.0;
                        (s.evaluate(x, len).unwrap() - p.evaluate(x, len).unwrap()).abs()
                    })
                    .fold(0.0, f64::max)
            };
            let (e1, e2, e3) = (err(20), err(40), err(80));
            let order = ((e1 / e2).log2() + (e2 / e3).log2()) / 2.0;
            assert!(order >= 3.0, "{text}: observed order {order} ({e1:e}, {e2:e}, {e3:e})");
        }
    }

    #[test]
    fn reflection_and_scaling() {
        let p = Potential::expression("x^2 + 1").unwrap();
        let r = p.reflected(2.0);
        assert!((r.evaluate(0.5, 2.0).unwrap() - p.evaluate(1.5, 2.0).unwrap()).abs() < 1e-14);
        let s = Potential::samples(vec![1.0, 2.0, 4.0]).unwrap().reflected(1.0);
        assert_eq!(s, Potential::samples(vec![4.0, 2.0, 1.0]).unwrap());
        let t = p.scaled(-2.0);
        assert!((t.evaluate(1.0, 2.0).unwrap() + 4.0).abs() < 1e-14);
        assert!((p.shifted(0.5).evaluate(1.0, 2.0).unwrap() - 2.5).abs() < 1e-14);
    }

    #[test]
    fn spec_serde_round_trip() {
        let json = r#"{"kind":"expr","expr":"2/(1+x)^2"}"#;
        let spec: PotentialSpec = serde_json::from_str(json).unwrap();
        let p = Potential::try_from(spec.clone()).unwrap();
        assert_eq!(PotentialSpec::from(&p), spec);
        let c: PotentialSpec = serde_json::from_str(r#"{"kind":"constant","value":2.5}"#).unwrap();
        assert_eq!(Potential::try_from(c).unwrap(), Potential::Constant(2.5));
    }

    fn arb_poly() -> impl Strategy<Value = (Vec<f64>, Potential)> {
        prop::collection::vec(-3.0f64..3.0, 1..6).prop_map(|coef| {
            let text = coef
                .iter()
                .enumerate()
                .map(|(k, c)| format!("({c})*x^{k}"))
                .collect::<Vec<_>>()
                .join(" + ");
            let p = Potential::expression(&text).unwrap();
            (coef, p)
        })
    }

    proptest! {
        #[test]
        fn integration_is_linear(
            (_, p) in arb_poly(),
            (_, r) in arb_poly(),
            a in -4.0f64..4.0,
            b in -4.0f64..4.0,
            len in 0.2f64..3.0,
        ) {
            let tol = 1e-10;
            let combo = p.scaled(a);
            let Potential::Expression { expr: pe, .. } = combo else { unreachable!() };
            let Potential::Expression { expr: re, .. } = r.scaled(b) else { unreachable!() };
            let sum = Potential::from_expr(Expr::Add(Box::new(pe), Box::new(re)));
            let lhs = sum.integrate_edge(len, tol).unwrap();
            let rhs = a * p.integrate_edge(len, tol).unwrap() + b * r.integrate_edge(len, tol).unwrap();
            prop_assert!((lhs - rhs).abs() <= (1.0 + a.abs() + b.abs()) * tol);
        }

        #[test]
        fn polynomial_integrals_match_antiderivative((coef, p) in arb_poly(), len in 0.2f64..3.0) {
            let exact: f64 = coef
                .iter()
                .enumerate()
                .map(|(k, c)| c * len.powi(k as i32 + 1) / (k + 1) as f64)
                .sum();
            let got = p.integrate_edge(len, 1e-11).unwrap();
            prop_assert!((got - exact).abs() <= 1e-11 * (1.0 + exact.abs()));
        }
    }
}
