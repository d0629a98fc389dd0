//! Vertex matching system, secular determinant and eigenvalue location.
//!
//! On edge `e` an eigenfunction is `u_e = a_e c_e + b_e s_e`. The matching
//! matrix collects continuity and flux conditions for the coefficients; its
//! determinant vanishes exactly on the spectrum.
//!
//! Eigenvalues are bracketed with the counting function
//! `N(λ) = Σ_e N_D,e(λ) + n₊(M(λ))`, where `N_D,e` counts the Dirichlet
//! eigenvalues of edge `e` below `λ` and `M(λ)` is the vertex
//! Dirichlet-to-Neumann matrix. `N(λ)` is the number of eigenvalues strictly
//! below `λ` with multiplicity, which resolves double eigenvalues that leave
//! the determinant's sign unchanged.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem;
use crate::graph::MetricGraph;
use crate::ode::{self, TransferMatrix};
use crate::potential::SampleGrid;
use crate::quadrature;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MULTIPLICITY_TOL: f64 = 1e-6;
/// The k-space scan step is `π / (4 L)`.
const SCAN_DIVISOR: f64 = 4.0;
const SCAN_CHUNK: usize = 32;
const MAX_SCAN_POINTS: usize = 2_000_000;
/// Relative agreement of vertex values required by the Rayleigh quotient.
const CONTINUITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowLabel {
    Continuity { vertex: usize },
    Flux { vertex: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnLabel {
    /// Coefficient of `c_e`.
    A { edge: usize },
    /// Coefficient of `s_e`.
    B { edge: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchingMatrix {
    pub lambda: f64,
    pub entries: DMatrix<f64>,
    pub rows: Vec<RowLabel>,
    pub columns: Vec<ColumnLabel>,
}

impl MatchingMatrix {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum End {
    From,
    To,
}

/// Edge ends at each vertex, ordered by edge index.
fn incident_ends(g: &MetricGraph) -> Vec<Vec<(usize, End)>> {
    let mut ends = vec![Vec::new(); g.vertices().len()];
    for (i, e) in g.edges().iter().enumerate() {
        ends[e.from].push((i, End::From));
        ends[e.to].push((i, End::To));
    }
    ends
}

/// Coefficients of `(a_e, b_e)` in the value and the inward derivative at an end.
fn end_functionals(t: &TransferMatrix, end: End) -> ([f64; 2], [f64; 2]) {
    match end {
        End::From => ([1.0, 0.0], [0.0, 1.0]),
        End::To => ([t.c(), t.s()], [-t.dc(), -t.ds()]),
    }
}

fn edge_transfers(g: &MetricGraph, lambda: f64, ode_tol: f64) -> Result<Vec<TransferMatrix>> {
    g.edges()
        .iter()
        .map(|e| ode::transfer(&e.potential, e.length, lambda, e.length, ode_tol))
        .collect()
}

fn build_matching(g: &MetricGraph, lambda: f64, ts: &[TransferMatrix]) -> MatchingMatrix {
    let n = 2 * g.edges().len();
    let mut entries = DMatrix::zeros(n, n);
    let mut rows = Vec::with_capacity(n);
    let mut row = 0;
    for (v, ends) in incident_ends(g).iter().enumerate() {
        for pair in ends.windows(2) {
            let (e0, end0) = pair[0];
            let (e1, end1) = pair[1];
            let (val0, _) = end_functionals(&ts[e0], end0);
            let (val1, _) = end_functionals(&ts[e1], end1);
            entries[(row, 2 * e0)] += val0[0];
            entries[(row, 2 * e0 + 1)] += val0[1];
            entries[(row, 2 * e1)] -= val1[0];
            entries[(row, 2 * e1 + 1)] -= val1[1];
            rows.push(RowLabel::Continuity { vertex: v });
            row += 1;
        }
        let sigma = g.vertices()[v].sigma;
        for (k, &(e, end)) in ends.iter().enumerate() {
            let (val, inward) = end_functionals(&ts[e], end);
            entries[(row, 2 * e)] += inward[0];
            entries[(row, 2 * e + 1)] += inward[1];
            if k == 0 {
                entries[(row, 2 * e)] -= sigma * val[0];
                entries[(row, 2 * e + 1)] -= sigma * val[1];
            }
        }
        rows.push(RowLabel::Flux { vertex: v });
        row += 1;
    }
    let columns = (0..g.edges().len())
        .flat_map(|edge| [ColumnLabel::A { edge }, ColumnLabel::B { edge }])
        .collect();
    MatchingMatrix { lambda, entries, rows, columns }
}

pub fn assemble_matching(g: &MetricGraph, lambda: f64, ode_tol: f64) -> Result<MatchingMatrix> {
    let ts = edge_transfers(g, lambda, ode_tol)?;
    Ok(build_matching(g, lambda, &ts))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecularValue {
    pub sign: i8,
    /// `-∞` when the matrix is numerically singular.
    pub log_abs_det: f64,
}

fn equilibrated(m: &DMatrix<f64>) -> (DMatrix<f64>, f64) {
    let mut a = m.clone();
    let mut log_scale = 0.0;
    for mut row in a.row_iter_mut() {
        let scale = row.amax();
        if scale > 0.0 {
            row /= scale;
            log_scale += scale.ln();
        }
    }
    (a, log_scale)
}

/// Sign and log-magnitude of `det m` by row equilibration and partially
/// pivoted LU.
pub fn determinant(m: &DMatrix<f64>) -> SecularValue {
    let singular = SecularValue { sign: 0, log_abs_det: f64::NEG_INFINITY };
    let n = m.nrows();
    let (mut a, mut log) = equilibrated(m);
    let mut sign: i8 = 1;
    for k in 0..n {
        let (p, pivot_abs) = (k..n)
            .map(|i| (i, a[(i, k)].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs == 0.0 || !pivot_abs.is_finite() {
            return singular;
        }
        if p != k {
            a.swap_rows(p, k);
            sign = -sign;
        }
        let pivot = a[(k, k)];
        if pivot < 0.0 {
            sign = -sign;
        }
        log += pivot_abs.ln();
        for i in k + 1..n {
            let f = a[(i, k)] / pivot;
            if f != 0.0 {
                for j in k + 1..n {
                    a[(i, j)] -= f * a[(k, j)];
                }
            }
        }
    }
    SecularValue { sign, log_abs_det: log }
}

pub fn secular_value(g: &MetricGraph, lambda: f64, ode_tol: f64) -> Result<SecularValue> {
    Ok(determinant(&assemble_matching(g, lambda, ode_tol)?.entries))
}

/// Number of singular values of the row-equilibrated matching matrix below
/// `rel_tol` times the largest one.
pub fn nullity(m: &MatchingMatrix, rel_tol: f64) -> usize {
    let (a, _) = equilibrated(&m.entries);
    let sv = a.singular_values();
    let top = sv.max();
    sv.iter().filter(|&&s| s < rel_tol * top).count()
}

/// Split points tried when `N(λ)` is ill-conditioned; a degree-two vertex with
/// `σ = 0` does not change the operator but moves the Dirichlet poles.
const SPLITS: [f64; 2] = [0.381_966_011_250_105_1, 0.276_393_202_250_021];
/// Pole proximity below which the split configurations are tried.
const POLE_CONDITION: f64 = 1e-3;

/// A piece of an edge between two (possibly virtual) vertices.
struct Piece {
    from: usize,
    to: usize,
    transfer: TransferMatrix,
}

/// `|sin θ|` of the Prüfer angle of `s` at the far end; zero on a Dirichlet pole.
fn pole_distance(t: &TransferMatrix) -> f64 {
    let k = t.lambda.abs().sqrt().max(1.0);
    let (a, b) = ((k * t.s()).abs(), t.ds().abs());
    if a == 0.0 {
        0.0
    } else {
        a / a.hypot(b)
    }
}

fn conditioning(pieces: &[Piece]) -> f64 {
    pieces.iter().map(|p| pole_distance(&p.transfer)).fold(1.0, f64::min)
}

/// `N(λ)` for a decomposition into pieces; `None` when some `s` vanishes.
fn count_pieces(sigmas: &[f64], pieces: &[Piece]) -> Option<usize> {
    let nv = sigmas.len();
    let mut m = DMatrix::<f64>::zeros(nv, nv);
    let mut count = 0;
    for p in pieces {
        let t = &p.transfer;
        let s = t.s();
        if s == 0.0 || !s.is_finite() {
            return None;
        }
        count += t.dirichlet_count;
        let (u, v) = (p.from, p.to);
        m[(u, u)] -= t.c() / s;
        m[(v, v)] -= t.ds() / s;
        m[(u, v)] += 1.0 / s;
        m[(v, u)] += 1.0 / s;
    }
    for (v, sigma) in sigmas.iter().enumerate() {
        m[(v, v)] -= sigma;
    }
    if m.iter().any(|x| !x.is_finite()) {
        return None;
    }
    let positive = SymmetricEigen::new(m).eigenvalues.iter().filter(|&&x| x > 0.0).count();
    Some(count + positive)
}

fn split_pieces(
    g: &MetricGraph,
    lambda: f64,
    ode_tol: f64,
    alpha: f64,
) -> Result<(Vec<f64>, Vec<Piece>)> {
    let nv = g.vertices().len();
    let mut sigmas: Vec<f64> = g.couplings().collect();
    sigmas.resize(nv + g.edges().len(), 0.0);
    let mut pieces = Vec::with_capacity(2 * g.edges().len());
    for (i, e) in g.edges().iter().enumerate() {
        let x = alpha * e.length;
        let mid = nv + i;
        let first = ode::transfer_between(&e.potential, e.length, lambda, 0.0, x, ode_tol)?;
        let second =
            ode::transfer_between(&e.potential, e.length, lambda, x, e.length, ode_tol)?;
        pieces.push(Piece { from: e.from, to: mid, transfer: first });
        pieces.push(Piece { from: mid, to: e.to, transfer: second });
    }
    Ok((sigmas, pieces))
}

/// `N(λ)` using whichever decomposition keeps every piece away from its
/// Dirichlet poles.
fn count_at(g: &MetricGraph, lambda: f64, ts: &[TransferMatrix], ode_tol: f64) -> Result<Option<usize>> {
    let sigmas: Vec<f64> = g.couplings().collect();
    let pieces: Vec<Piece> = g
        .edges()
        .iter()
        .zip(ts)
        .map(|(e, t)| Piece { from: e.from, to: e.to, transfer: *t })
        .collect();
    let mut best = (conditioning(&pieces), sigmas, pieces);
    if best.0 < POLE_CONDITION {
        for alpha in SPLITS {
            let (sigmas, pieces) = split_pieces(g, lambda, ode_tol, alpha)?;
            let cond = conditioning(&pieces);
            if cond > best.0 {
                best = (cond, sigmas, pieces);
            }
            if best.0 >= POLE_CONDITION {
                break;
            }
        }
    }
    Ok(count_pieces(&best.1, &best.2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Probe {
    lambda: f64,
    count: usize,
    sign: i8,
    log_abs_det: f64,
}

fn probe(g: &MetricGraph, lambda: f64, ode_tol: f64) -> Result<Probe> {
    let ts = edge_transfers(g, lambda, ode_tol)?;
    let SecularValue { sign, log_abs_det } = determinant(&build_matching(g, lambda, &ts).entries);
    if let Some(count) = count_at(g, lambda, &ts, ode_tol)? {
        return Ok(Probe { lambda, count, sign, log_abs_det });
    }
    // λ sits exactly on a Dirichlet pole; count just above it.
    let mut shifted = lambda;
    for _ in 0..16 {
        shifted += 4.0 * f64::EPSILON * shifted.abs().max(1.0);
        let ts = edge_transfers(g, shifted, ode_tol)?;
        if let Some(count) = count_at(g, shifted, &ts, ode_tol)? {
            return Ok(Probe { lambda, count, sign, log_abs_det });
        }
    }
    Err(Error::Domain(format!("counting function undefined near λ = {lambda}")))
}

/// Number of eigenvalues strictly below `lambda`, with multiplicity.
pub fn counting_function(g: &MetricGraph, lambda: f64, ode_tol: f64) -> Result<usize> {
    Ok(probe(g, lambda, ode_tol)?.count)
}

/// Analytic lower bound for the spectrum: `-max sup|q| - B(σ, ℓ_min)`.
pub fn lower_bound(g: &MetricGraph) -> Result<f64> {
    let s = g.couplings().fold(0.0f64, |m, x| m.max(-x));
    let b = s * (2.0 / g.min_edge_length()) + s * s * g.vertices().len() as f64;
    Ok(-g.potential_sup_norm()? - b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumTarget {
    Count(usize),
    LambdaMax(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRequest {
    pub target: SpectrumTarget,
    /// Absolute eigenvalue tolerance.
    pub tol: f64,
    /// Singular-value threshold relative to the largest singular value.
    pub multiplicity_tol: f64,
    pub ode_tol: f64,
}

impl SpectrumRequest {
    pub fn count(n: usize) -> Self {
        SpectrumRequest {
            target: SpectrumTarget::Count(n),
            tol: DEFAULT_TOL,
            multiplicity_tol: DEFAULT_MULTIPLICITY_TOL,
            ode_tol: ode::DEFAULT_ODE_TOL,
        }
    }

    pub fn lambda_max(lambda_max: f64) -> Self {
        SpectrumRequest { target: SpectrumTarget::LambdaMax(lambda_max), ..Self::count(1) }
    }

    pub fn with_tol(self, tol: f64) -> Self {
        SpectrumRequest { tol, ..self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidArgument(format!("tolerance {}", self.tol)));
        }
        if !(self.multiplicity_tol > 0.0 && self.multiplicity_tol < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "multiplicity tolerance {}",
                self.multiplicity_tol
            )));
        }
        if !(self.ode_tol > 0.0 && self.ode_tol.is_finite()) {
            return Err(Error::InvalidArgument(format!("ODE tolerance {}", self.ode_tol)));
        }
        if let SpectrumTarget::LambdaMax(x) = self.target {
            if !x.is_finite() {
                return Err(Error::InvalidArgument(format!("lambda_max {x}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueList {
    /// Distinct eigenvalues, ascending.
    pub values: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub lambda_max: f64,
    pub weyl_expected: usize,
    pub certified: bool,
    /// Nullity of the matching matrix at each value.
    pub matching_nullity: Vec<usize>,
}

impl EigenvalueList {
    /// Number of eigenvalues counted with multiplicity.
    pub fn total(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// Eigenvalues repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        self.values
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&v, &m)| std::iter::repeat(v).take(m))
            .collect()
    }

    /// Whether counting and the matching-matrix nullity agree everywhere.
    pub fn multiplicities_consistent(&self) -> bool {
        self.multiplicities == self.matching_nullity
    }
}

pub fn weyl_expected(g: &MetricGraph, lambda_max: f64) -> usize {
    (g.total_length() * lambda_max.max(0.0).sqrt() / std::f64::consts::PI).floor() as usize
}

struct Locator<'a> {
    g: &'a MetricGraph,
    tol: f64,
    ode_tol: f64,
}

impl Locator<'_> {
    fn resolution(&self, a: f64, b: f64) -> f64 {
        self.tol.max(8.0 * f64::EPSILON * a.abs().max(b.abs()))
    }

    /// Eigenvalues in `[a.λ, b.λ)` as `(value, multiplicity)`.
    fn isolate(&self, a: Probe, b: Probe) -> Result<Vec<(f64, usize)>> {
        let jump = b.count.saturating_sub(a.count);
        if jump == 0 {
            return Ok(Vec::new());
        }
        if jump == 1 && a.sign * b.sign < 0 {
            return Ok(vec![(self.refine(a, b)?, 1)]);
        }
        let mid = 0.5 * (a.lambda + b.lambda);
        if b.lambda - a.lambda <= self.resolution(a.lambda, b.lambda)
            || mid <= a.lambda
            || mid >= b.lambda
        {
            return Ok(vec![(mid, jump)]);
        }
        let mut m = probe(self.g, mid, self.ode_tol)?;
        m.count = m.count.clamp(a.count, b.count);
        let mut found = self.isolate(a, m)?;
        found.extend(self.isolate(m, b)?);
        Ok(found)
    }

    /// Root of the determinant in a sign-change bracket: Illinois regula falsi
    /// on `det`, with steps kept `tol / 4` inside the bracket and a bisection
    /// every fourth step.
    fn refine(&self, a: Probe, b: Probe) -> Result<f64> {
        let reference = a.log_abs_det.max(b.log_abs_det);
        let signed = |sign: i8, log: f64| sign as f64 * (log - reference).min(600.0).exp();
        let (mut lo, mut hi) = (a.lambda, b.lambda);
        let (mut f_lo, mut f_hi) = (signed(a.sign, a.log_abs_det), signed(b.sign, b.log_abs_det));
        let mut last_side = 0i8;
        for iteration in 1.. {
            let width = hi - lo;
            let mid = 0.5 * (lo + hi);
            if width <= 0.5 * self.tol || mid <= lo || mid >= hi {
                return Ok(mid);
            }
            let margin = 0.25 * self.tol.min(0.5 * width);
            let mut x = hi - f_hi * width / (f_hi - f_lo);
            if iteration % 4 == 0 || !x.is_finite() {
                x = mid;
            }
            x = x.clamp(lo + margin, hi - margin);
            let v = secular_value(self.g, x, self.ode_tol)?;
            if v.sign == 0 {
                return Ok(x);
            }
            let fx = signed(v.sign, v.log_abs_det);
            if v.sign == a.sign {
                lo = x;
                f_lo = fx;
                if last_side == -1 {
                    f_hi *= 0.5;
                }
                last_side = -1;
            } else {
                hi = x;
                f_hi = fx;
                if last_side == 1 {
                    f_lo *= 0.5;
                }
                last_side = 1;
            }
        }
        unreachable!()
    }
}

/// Merges roots closer than the resolvable gap into one eigenvalue.
fn merge(roots: Vec<(f64, usize)>, tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for (value, mult) in roots {
        if let Some(last) = out.last_mut() {
            let gap = tol.max(1e-9 * value.abs().max(1.0));
            if value - last.0 <= gap {
                let total = last.1 + mult;
                last.0 = (last.0 * last.1 as f64 + value * mult as f64) / total as f64;
                last.1 = total;
                continue;
            }
        }
        out.push((value, mult));
    }
    out
}

fn scan_start(g: &MetricGraph, ode_tol: f64) -> Result<f64> {
    let analytic = lower_bound(g)?;
    let h = (g.min_edge_length() / 4.0).min(g.total_length() / 200.0);
    let coarse = fem::lowest_eigenvalues(g, h, 1)?[0];
    let mut lo = analytic.min(coarse - 1.0 - 0.1 * coarse.abs()).min(-1.0);
    for _ in 0..64 {
        if probe(g, lo, ode_tol)?.count == 0 {
            return Ok(lo);
        }
        lo = 2.0 * lo - 1.0;
    }
    Err(Error::Domain("no spectral lower bound found".into()))
}

fn lambda_of_k(k: f64) -> f64 {
    k * k.abs()
}

pub fn compute_spectrum(g: &MetricGraph, req: &SpectrumRequest) -> Result<EigenvalueList> {
    req.validate()?;
    let lo = scan_start(g, req.ode_tol)?;
    if req.target == SpectrumTarget::Count(0) {
        return Ok(EigenvalueList {
            values: Vec::new(),
            multiplicities: Vec::new(),
            lambda_max: lo,
            weyl_expected: 0,
            certified: true,
            matching_nullity: Vec::new(),
        });
    }
    let k_lo = -(-lo).sqrt();
    let dk = std::f64::consts::PI / (SCAN_DIVISOR * g.total_length());
    let ceiling = match req.target {
        SpectrumTarget::LambdaMax(x) => Some(x + req.tol),
        SpectrumTarget::Count(_) => None,
    };

    let mut probes: Vec<Probe> = Vec::new();
    let mut next = 0usize;
    loop {
        let chunk: Vec<f64> = (next..next + SCAN_CHUNK)
            .map(|j| lambda_of_k(k_lo + j as f64 * dk))
            .collect();
        next += SCAN_CHUNK;
        let mut points: Vec<f64> = match ceiling {
            Some(c) => chunk.into_iter().filter(|&l| l < c).collect(),
            None => chunk,
        };
        let last_chunk = ceiling.is_some() && points.len() < SCAN_CHUNK;
        if let (true, Some(c)) = (last_chunk, ceiling) {
            points.push(c);
        }
        let evaluated: Vec<Probe> = points
            .par_iter()
            .map(|&l| probe(g, l, req.ode_tol))
            .collect::<Result<_>>()?;
        probes.extend(evaluated);
        let done = match req.target {
            SpectrumTarget::Count(n) => probes.last().is_some_and(|p| p.count >= n),
            SpectrumTarget::LambdaMax(_) => last_chunk,
        };
        if done {
            break;
        }
        if next > MAX_SCAN_POINTS {
            return Err(Error::InvalidArgument("spectral scan exceeded its point budget".into()));
        }
    }
    // counting is monotone; enforce it against round-off
    for i in 1..probes.len() {
        probes[i].count = probes[i].count.max(probes[i - 1].count);
    }

    let locator = Locator { g, tol: req.tol, ode_tol: req.ode_tol };
    let found: Vec<Vec<(f64, usize)>> = probes
        .par_windows(2)
        .map(|w| locator.isolate(w[0], w[1]))
        .collect::<Result<_>>()?;
    let mut clusters = merge(found.into_iter().flatten().collect(), req.tol);

    let lambda_max = match req.target {
        SpectrumTarget::Count(n) => {
            let mut total = 0;
            let keep = clusters
                .iter()
                .position(|&(_, m)| {
                    total += m;
                    total >= n
                })
                .map_or(clusters.len(), |i| i + 1);
            clusters.truncate(keep);
            clusters.last().map_or(lo, |c| c.0)
        }
        SpectrumTarget::LambdaMax(x) => {
            clusters.retain(|&(v, _)| v <= x + req.tol);
            x
        }
    };

    let matching_nullity: Vec<usize> = clusters
        .par_iter()
        .map(|&(v, _)| {
            assemble_matching(g, v, req.ode_tol).map(|m| nullity(&m, req.multiplicity_tol))
        })
        .collect::<Result<_>>()?;
    let (values, multiplicities): (Vec<f64>, Vec<usize>) = clusters.into_iter().unzip();
    let total: usize = multiplicities.iter().sum();
    let weyl = weyl_expected(g, lambda_max);
    let band = g.vertices().len() + g.edges().len();
    Ok(EigenvalueList {
        values,
        multiplicities,
        lambda_max,
        weyl_expected: weyl,
        certified: total.abs_diff(weyl) <= band,
        matching_nullity,
    })
}

/// Lowest eigenvalue and whether it is simple.
pub fn ground_state(g: &MetricGraph) -> Result<(f64, bool)> {
    let list = compute_spectrum(g, &SpectrumRequest::count(1))?;
    Ok((list.values[0], list.multiplicities[0] == 1))
}

/// `λ₀` of the graph with potentials `τq` and couplings `τσ`, for each `τ`.
pub fn ground_state_curve(g: &MetricGraph, taus: &[f64]) -> Result<Vec<f64>> {
    if let Some(t) = taus.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument(format!("τ = {t}")));
    }
    taus.par_iter().map(|&t| ground_state(&g.scaled(t)).map(|(l, _)| l)).collect()
}

/// Value of the quadratic form over the squared norm for a function given by
/// uniform samples on each edge (endpoints included, edge orientation).
pub fn rayleigh_quotient(g: &MetricGraph, f: &[Vec<f64>]) -> Result<f64> {
    if f.len() != g.edges().len() {
        return Err(Error::InvalidArgument(format!(
            "{} sampled edges for a graph with {}",
            f.len(),
            g.edges().len()
        )));
    }
    if let Some((i, _)) = f.iter().enumerate().find(|(_, s)| s.len() < 2) {
        return Err(Error::InvalidArgument(format!("edge {i} needs at least two samples")));
    }
    let scale = f.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Err(Error::DegenerateNorm);
    }
    let mut vertex_value: Vec<Option<f64>> = vec![None; g.vertices().len()];
    for (e, samples) in g.edges().iter().zip(f) {
        for (v, value) in [(e.from, samples[0]), (e.to, samples[samples.len() - 1])] {
            match vertex_value[v] {
                None => vertex_value[v] = Some(value),
                Some(prev) if (prev - value).abs() > CONTINUITY_TOL * scale => {
                    return Err(Error::DiscontinuousAtVertex(g.vertices()[v].id.clone()));
                }
                Some(_) => {}
            }
        }
    }

    let rule = quadrature::panel_rule();
    let (mut form, mut norm) = (0.0, 0.0);
    for (e, samples) in g.edges().iter().zip(f) {
        let grid = SampleGrid::new(samples.clone());
        let len = e.length;
        let h = len / grid.cells() as f64;
        for i in 0..grid.cells() {
            let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
            form += rule.apply(
                &mut |x: f64| {
                    let (u, du) = (grid.value(x, len), grid.derivative(x, len));
                    Ok(du * du + e.potential.value_at(x, len)? * u * u)
                },
                a,
                b,
            )?;
            norm += rule.apply(
                &mut |x: f64| {
                    let u = grid.value(x, len);
                    Ok(u * u)
                },
                a,
                b,
            )?;
        }
    }
    if norm <= 0.0 {
        return Err(Error::DegenerateNorm);
    }
    for (vertex, value) in g.vertices().iter().zip(&vertex_value) {
        if let Some(u) = value {
            form += vertex.sigma * u * u;
        }
    }
    Ok(form / norm)
}
