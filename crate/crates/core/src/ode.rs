//! Fundamental solutions of `-u'' + q(x) u = λ u` on a single edge.
//!
//! `c` and `s` are the solutions with `c(0) = 1, c'(0) = 0` and
//! `s(0) = 0, s'(0) = 1`. Alongside them we track the number of zeros of `s`
//! inside the interval, which by Sturm oscillation equals the number of
//! Dirichlet eigenvalues of the edge strictly below `λ`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::potential::Potential;

/// Default per-edge integration tolerance.
pub const DEFAULT_ODE_TOL: f64 = 1e-10;
/// `|λ| x²` below which the free solution uses its power series.
pub const SERIES_THRESHOLD: f64 = 1e-4;
const SERIES_TERMS: usize = 6;
/// Accepted outputs satisfy `|det T - 1| <= WRONSKIAN_FACTOR * tol * max(1, |c s'| + |s c'|)`.
pub const WRONSKIAN_FACTOR: f64 = 100.0;
/// Local error target relative to the requested tolerance; global error grows
/// with the number of oscillations crossed.
const INNER_TOL_FACTOR: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub lambda: f64,
    pub x: f64,
    /// `[[c, s], [c', s']]` evaluated at `x`.
    pub entries: [[f64; 2]; 2],
    pub wronskian_drift: f64,
    /// Zeros of `s` in `(0, x)`.
    pub dirichlet_count: usize,
}

impl TransferMatrix {
    pub fn c(&self) -> f64 {
        self.entries[0][0]
    }
    pub fn s(&self) -> f64 {
        self.entries[0][1]
    }
    pub fn dc(&self) -> f64 {
        self.entries[1][0]
    }
    pub fn ds(&self) -> f64 {
        self.entries[1][1]
    }

    pub fn det(&self) -> f64 {
        self.c() * self.ds() - self.s() * self.dc()
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &TransferMatrix) -> [[f64; 2]; 2] {
        let (a, b) = (&self.entries, &rhs.entries);
        [
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ]
    }
}

/// Zeros of `s` in `(0, x)` from its modified Prüfer phase and end sign.
///
/// The phase crosses multiples of π only upwards; near a multiple the sign of
/// `s` decides which side we are on, so the count agrees with the sign of `s`
/// even when the phase carries integration error.
fn zeros_from_phase(phase: f64, s: f64) -> usize {
    let j = (phase / PI).round();
    let count = if (phase - j * PI).abs() < 0.25 * PI {
        let above_sign = if (j as i64) % 2 == 0 { 1.0 } else { -1.0 };
        if s * above_sign > 0.0 {
            j
        } else {
            j - 1.0
        }
    } else {
        (phase / PI).floor()
    };
    count.max(0.0) as usize
}

/// Closed-form transfer matrix for `q = 0`.
pub fn free_transfer(lambda: f64, x: f64) -> TransferMatrix {
    let z = lambda * x * x;
    let (c, s, dc, ds, count);
    if z.abs() < SERIES_THRESHOLD {
        // c = Σ (-z)^n/(2n)!, s = x Σ (-z)^n/(2n+1)!
        let (mut term_c, mut term_s) = (1.0, 1.0);
        let (mut sum_c, mut sum_s) = (1.0, 1.0);
        for n in 1..SERIES_TERMS {
            let nf = n as f64;
            term_c *= -z / ((2.0 * nf - 1.0) * (2.0 * nf));
            term_s *= -z / ((2.0 * nf) * (2.0 * nf + 1.0));
            sum_c += term_c;
            sum_s += term_s;
        }
        c = sum_c;
        s = x * sum_s;
        dc = -lambda * s;
        ds = c;
        count = 0;
    } else if lambda > 0.0 {
        let k = lambda.sqrt();
        let (sn, cs) = (k * x).sin_cos();
        c = cs;
        s = sn / k;
        dc = -k * sn;
        ds = cs;
        count = zeros_from_phase(k * x, s);
    } else {
        let k = (-lambda).sqrt();
        let (sh, ch) = ((k * x).sinh(), (k * x).cosh());
        c = ch;
        s = sh / k;
        dc = k * sh;
        ds = ch;
        count = 0;
    }
    TransferMatrix {
        lambda,
        x,
        entries: [[c, s], [dc, ds]],
        wronskian_drift: 0.0,
        dirichlet_count: count,
    }
}

/// Transfer matrix from `0` to `x` on an edge of length `edge_length`.
pub fn transfer(
    potential: &Potential,
    edge_length: f64,
    lambda: f64,
    x: f64,
    tol: f64,
) -> Result<TransferMatrix> {
    transfer_between(potential, edge_length, lambda, 0.0, x, tol)
}

/// Transfer matrix across `[a, b]` (identity initial data at `a`).
pub fn transfer_between(
    potential: &Potential,
    edge_length: f64,
    lambda: f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<TransferMatrix> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("ODE tolerance {tol}")));
    }
    if !(a >= 0.0 && b >= a && b <= edge_length * (1.0 + 1e-12)) {
        return Err(Error::InvalidArgument(format!(
            "interval [{a}, {b}] not inside edge [0, {edge_length}]"
        )));
    }
    if let Some(q) = potential.as_constant() {
        let mut t = free_transfer(lambda - q, b - a);
        t.lambda = lambda;
        return Ok(t);
    }

    // Scaled variables keep oscillatory components O(1):
    // y = [c, c'/k, k s, s', prüfer phase of s with scale k].
    let k = lambda.abs().sqrt().max(1.0);
    let rhs = |x: f64, y: &[f64; 5]| -> Result<[f64; 5]> {
        let w = (potential.value_at(x.min(edge_length), edge_length)? - lambda) / k;
        let (sp, cp) = y[4].sin_cos();
        Ok([k * y[1], w * y[0], k * y[3], w * y[2], k * cp * cp - w * sp * sp])
    };
    let y0 = [1.0, 0.0, 0.0, 1.0, 0.0];
    let inner = tol * INNER_TOL_FACTOR;
    let y = dopri5(rhs, a, y0, b, inner, inner)?;
    let (c, dc, s, ds) = (y[0], y[1] * k, y[2] / k, y[3]);
    let t = TransferMatrix {
        lambda,
        x: b - a,
        entries: [[c, s], [dc, ds]],
        wronskian_drift: (y[0] * y[3] - y[1] * y[2] - 1.0).abs(),
        dirichlet_count: zeros_from_phase(y[4], s),
    };
    // in the exponential regime det T is a difference of large products
    let magnitude = (y[0] * y[3]).abs() + (y[1] * y[2]).abs();
    let limit = WRONSKIAN_FACTOR * tol * magnitude.max(1.0);
    if t.wronskian_drift > limit {
        return Err(Error::WronskianViolation { drift: t.wronskian_drift, limit });
    }
    Ok(t)
}

/// Adaptive Dormand–Prince 5(4) integration of `y' = f(x, y)` from `x0` to `x1`.
pub fn dopri5<const N: usize, F>(
    mut f: F,
    x0: f64,
    y0: [f64; N],
    x1: f64,
    rtol: f64,
    atol: f64,
) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    // fifth-order weights minus embedded fourth-order weights
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];

    let span = x1 - x0;
    if span == 0.0 {
        return Ok(y0);
    }
    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, &y)?;
    let scale0 = k1.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let mut h = (0.01 / scale0).min(span);
    let h_min = 1e-14 * span.abs().max(1.0);
    let mut ks = [[0.0; N]; 7];

    while x < x1 {
        if x + h > x1 {
            h = x1 - x;
        }
        ks[0] = k1;
        for stage in 1..7 {
            let mut yt = y;
            for (j, kj) in ks.iter().enumerate().take(stage) {
                let a = A[stage][j];
                if a != 0.0 {
                    for i in 0..N {
                        yt[i] += h * a * kj[i];
                    }
                }
            }
            ks[stage] = f(x + C[stage] * h, &yt)?;
        }
        let mut y_new = y;
        for (j, kj) in ks.iter().enumerate().take(6) {
            let b = A[6][j];
            for i in 0..N {
                y_new[i] += h * b * kj[i];
            }
        }
        let mut err: f64 = 0.0;
        for i in 0..N {
            let mut e = 0.0;
            for (j, kj) in ks.iter().enumerate() {
                e += E[j] * kj[i];
            }
            let sc = atol + rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((h * e).abs() / sc);
        }
        if !err.is_finite() {
            h *= 0.2;
            if h < h_min {
                return Err(Error::StepFailure { x });
            }
            continue;
        }
        if err <= 1.0 {
            x = if x + h >= x1 || x1 - (x + h) < h_min { x1 } else { x + h };
            y = y_new;
            k1 = ks[6];
            let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= grow;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            if h < h_min {
                return Err(Error::StepFailure { x });
            }
        }
    }
    Ok(y)
}
