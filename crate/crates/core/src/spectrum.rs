//! Radial reductions of the linearized operator around a ground state,
//!
//! ```text
//! L_{+,k} v = -v'' - (d-1+2a)/r v' + mu_k/r^2 v + (omega - (p-1) u^{p-2}) v / r^{2a},
//! ```
//!
//! discretized in flux form against the measure `r^{d-1} dr` as a
//! symmetric tridiagonal pencil with diagonal mass.

use std::fmt::Write as _;

use thiserror::Error;

use crate::params::ProblemParams;
use crate::quadrature::simpson;
use crate::radial_ode::RadialProfile;
use crate::report::{fmt17, KvReport};
use crate::shooting::TailFit;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("profile is not a converged ground state: {0}")]
    ProfileNotConverged(&'static str),
    #[error("eigensolver breakdown: {0}")]
    SolverBreakdown(String),
    #[error("vector has no nonzero entry")]
    ZeroVector,
    #[error("a = {0} lies outside (0, 1/2), where the linear far-field rate is known")]
    WeightOutOfTailRange(f64),
    #[error("tail fit failed: {0}")]
    TailFit(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HarmonicIndex {
    pub k: u32,
}

impl HarmonicIndex {
    pub fn new(k: u32) -> Self {
        HarmonicIndex { k }
    }

    /// Eigenvalue `k(k+d-2)` of the Laplace–Beltrami operator on `S^{d-1}`.
    pub fn mu(&self, d: u32) -> f64 {
        let k = self.k as f64;
        k * (k + d as f64 - 2.0)
    }
}

/// Condition at the inner radius `r_start`; the outer end is always Dirichlet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerBoundary {
    NoFlux,
    Dirichlet,
}

impl InnerBoundary {
    /// No-flux for `k = 0` (bounded radial modes), Dirichlet otherwise.
    pub fn natural(k: HarmonicIndex) -> Self {
        if k.k == 0 {
            InnerBoundary::NoFlux
        } else {
            InnerBoundary::Dirichlet
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            InnerBoundary::NoFlux => "noflux_dirichlet",
            InnerBoundary::Dirichlet => "dirichlet_dirichlet",
        }
    }
}

/// `S v = lambda M v` with `S` symmetric tridiagonal and `M` diagonal, on
/// the unknowns `radii[first..first + len]` of the profile grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    /// Full profile grid; the Dirichlet ends carry no unknown.
    pub radii: Vec<f64>,
    pub first: usize,
    pub diag: Vec<f64>,
    /// `off[i]` couples unknowns `i` and `i + 1`.
    pub off: Vec<f64>,
    pub mass: Vec<f64>,
    /// Potential part of `diag` (everything but the flux couplings).
    pub potential: Vec<f64>,
    pub k: HarmonicIndex,
    pub boundary: InnerBoundary,
}

impl DiscreteOperator {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `S v` for `v` on the unknowns.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Dense stiffness matrix, row-major; for small operators and tests.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            m[i][i] = self.diag[i];
            if i + 1 < n {
                m[i][i + 1] = self.off[i];
                m[i + 1][i] = self.off[i];
            }
        }
        m
    }

    /// Restricts a vector on the full grid to the unknowns.
    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        full[self.first..self.first + self.len()].to_vec()
    }

    /// Extends a vector on the unknowns by zeros at the Dirichlet ends.
    pub fn extend(&self, v: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.radii.len()];
        full[self.first..self.first + v.len()].copy_from_slice(v);
        full
    }

    /// `v^T S v`.
    pub fn energy(&self, v: &[f64]) -> f64 {
        self.apply(v).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// `v^T M v`.
    pub fn mass_norm2(&self, v: &[f64]) -> f64 {
        v.iter().zip(&self.mass).map(|(a, m)| a * a * m).sum()
    }
}

pub fn assemble(profile: &RadialProfile, params: &ProblemParams, k: HarmonicIndex) -> Result<DiscreteOperator, SpectrumError> {
    assemble_with(profile, params, k, InnerBoundary::natural(k))
}

/// Finite-volume assembly: node `i` owns `[r_{i-1/2}, r_{i+1/2}]`, the flux
/// coefficient on the edge `(i, i+1)` is `r_mid^{d-1+2a} / h_i` and the
/// potential is sampled at the node with the half-widths as weight.
pub fn assemble_with(
    profile: &RadialProfile,
    params: &ProblemParams,
    k: HarmonicIndex,
    boundary: InnerBoundary,
) -> Result<DiscreteOperator, SpectrumError> {
    if profile.len() < 8 {
        return Err(SpectrumError::ProfileNotConverged("too few nodes"));
    }
    if !profile.is_positive() {
        return Err(SpectrumError::ProfileNotConverged("profile is not positive"));
    }
    if !profile.is_strictly_decreasing() {
        return Err(SpectrumError::ProfileNotConverged("profile is not decreasing"));
    }
    let r = profile.radii();
    let n_all = r.len();
    let (d, a, p, omega) = (params.dim(), params.a, params.p, params.omega);
    let fe = params.flux_exponent();
    let mu = k.mu(params.d);
    let h: Vec<f64> = r.windows(2).map(|w| w[1] - w[0]).collect();
    let edge: Vec<f64> = (0..n_all - 1)
        .map(|i| (0.5 * (r[i] + r[i + 1])).powf(fe) / h[i])
        .collect();
    let width = |i: usize| {
        let left = if i > 0 { h[i - 1] } else { 0.0 };
        let right = if i + 1 < n_all { h[i] } else { 0.0 };
        0.5 * (left + right)
    };

    let first = match boundary {
        InnerBoundary::NoFlux => 0,
        InnerBoundary::Dirichlet => 1,
    };
    let last = n_all - 2; // Dirichlet at r_max
    let len = last + 1 - first;
    let mut diag = Vec::with_capacity(len);
    let mut potential = Vec::with_capacity(len);
    let mut mass = Vec::with_capacity(len);
    for i in first..=last {
        let w = width(i);
        let q = mu * r[i].powf(d - 3.0 + 2.0 * a) + r[i].powf(d - 1.0) * (omega - (p - 1.0) * profile.u[i].powf(p - 2.0));
        let left = if i > 0 { edge[i - 1] } else { 0.0 };
        diag.push(left + edge[i] + q * w);
        potential.push(q * w);
        mass.push(r[i].powf(d - 1.0) * w);
    }
    let off: Vec<f64> = (first..last).map(|i| -edge[i]).collect();
    if mass.iter().any(|m| !(*m > 0.0)) {
        return Err(SpectrumError::ProfileNotConverged("nonpositive mass weight"));
    }
    Ok(DiscreteOperator {
        radii: r.to_vec(),
        first,
        diag,
        off,
        mass,
        potential,
        k,
        boundary,
    })
}

/// Number of eigenvalues of the pencil `(S, M)` below `x`, for symmetric
/// tridiagonal `S = (diag, off)` and positive diagonal `M`: the count of
/// negative pivots of `LDL^T = S - x M` (Sylvester's law of inertia).
pub fn sturm_count(diag: &[f64], off: &[f64], mass: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let coupling = if i > 0 { off[i - 1] * off[i - 1] / q } else { 0.0 };
        let a = diag[i] - x * mass[i];
        q = a - coupling;
        if q == 0.0 {
            q = -f64::EPSILON * (a.abs() + coupling.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Solves `(S - shift M) x = b` for symmetric tridiagonal `S` and diagonal
/// `M` by Gaussian elimination with partial pivoting (one extra
/// superdiagonal of fill).
fn tridiagonal_solve(diag: &[f64], off: &[f64], mass: &[f64], shift: f64, b: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    let mut d: Vec<f64> = diag.iter().zip(mass).map(|(v, m)| v - shift * m).collect();
    let mut du = off.to_vec();
    let dl = off;
    let mut du2 = vec![0.0; n];
    let mut x = b.to_vec();
    let tiny = f64::EPSILON * d.iter().map(|v| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let f = dl[i] / d[i];
            d[i + 1] -= f * du[i];
            x[i + 1] -= f * x[i];
        } else {
            // swap rows i and i + 1, then eliminate
            let f = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -f;
            }
            du[i] = tmp;
            x.swap(i, i + 1);
            x[i + 1] -= f * x[i];
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        if i + 1 < n {
            s -= du[i] * x[i + 1];
        }
        if i + 2 < n {
            s -= du2[i] * x[i + 2];
        }
        x[i] = s / d[i];
        if !x[i].is_finite() {
            return None;
        }
    }
    Some(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub k: HarmonicIndex,
    pub eigenvalues: Vec<f64>,
    /// Mass-normalized eigenvectors on the full grid (zeros at Dirichlet ends).
    pub eigenvectors: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    pub sign_changes: Vec<usize>,
    /// Eigenvalues below zero, from the Sturm count at `0`.
    pub negative_count: usize,
    /// `min |lambda_i|` over the returned eigenvalues.
    pub zero_gap: f64,
    pub boundary: InnerBoundary,
    /// `max_i |v^T S v / v^T M v - lambda| / |lambda|`.
    pub rayleigh_defect: f64,
}

impl SpectrumReport {
    /// Index of the eigenvalue closest to zero.
    pub fn nearest_zero(&self) -> usize {
        (0..self.eigenvalues.len())
            .min_by(|&a, &b| self.eigenvalues[a].abs().total_cmp(&self.eigenvalues[b].abs()))
            .unwrap_or(0)
    }

    pub fn report(&self) -> KvReport {
        let mut r = KvReport::new();
        r.push("k", self.k.k as usize)
            .push("boundary_condition", self.boundary.as_str())
            .push("negative_count", self.negative_count)
            .push("zero_gap", self.zero_gap)
            .push("rayleigh_defect", self.rayleigh_defect);
        for (i, (l, s)) in self.eigenvalues.iter().zip(&self.sign_changes).enumerate() {
            r.push(format!("lambda_{}", i + 1), *l);
            r.push(format!("sign_changes_{}", i + 1), *s);
        }
        r
    }

    /// CSV `r,v1,v2,...` on the full grid.
    pub fn eigenvectors_csv(&self) -> String {
        let mut out = String::from("r");
        for i in 0..self.eigenvectors.len() {
            let _ = write!(out, ",v{}", i + 1);
        }
        out.push('\n');
        for (j, r) in self.radii.iter().enumerate() {
            out.push_str(&fmt17(*r));
            for v in &self.eigenvectors {
                out.push(',');
                out.push_str(&fmt17(v[j]));
            }
            out.push('\n');
        }
        out
    }
}

/// Lowest `n` eigenpairs by Sturm bisection and inverse iteration.
///
/// Each eigenvalue is bisected until its bracket is below `tol * |lambda|`;
/// the negative count is certified by a Sturm count at zero. Fails if a
/// Rayleigh quotient misses its eigenvalue by more than `10 tol` relative.
pub fn eigen_lowest(op: &DiscreteOperator, n: usize, tol: f64) -> Result<SpectrumReport, SpectrumError> {
    let len = op.len();
    if n < 1 || n > len {
        return Err(SpectrumError::SolverBreakdown(format!("cannot extract {n} eigenpairs of a {len}x{len} pencil")));
    }
    let (diag, off, mass) = (&op.diag, &op.off, &op.mass);
    // Gershgorin discs of M^{-1} S
    let radius = |i: usize| {
        let mut s = 0.0;
        if i > 0 {
            s += off[i - 1].abs();
        }
        if i + 1 < len {
            s += off[i].abs();
        }
        s
    };
    let lower = (0..len).map(|i| (diag[i] - radius(i)) / mass[i]).fold(f64::INFINITY, f64::min);
    let upper = (0..len).map(|i| (diag[i] + radius(i)) / mass[i]).fold(f64::NEG_INFINITY, f64::max);
    let pad = 1e-9 * (upper - lower).abs().max(1.0);

    let mut eigenvalues = Vec::with_capacity(n);
    for j in 0..n {
        // j-th eigenvalue: smallest x with count(x) > j
        let (mut lo, mut hi) = (lower - pad, upper + pad);
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(diag, off, mass, mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= tol * 0.5 * (lo.abs() + hi.abs()) {
                break;
            }
        }
        eigenvalues.push(0.5 * (lo + hi));
    }

    let m_dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).zip(mass).map(|((x, y), m)| x * y * m).sum() };
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut sign_changes = Vec::with_capacity(n);
    let mut rayleigh_defect: f64 = 0.0;
    for (j, &lambda) in eigenvalues.iter().enumerate() {
        // nudge the shift off the eigenvalue so the factorization stays finite
        let shift = lambda + 1e-10 * lambda.abs().max(f64::MIN_POSITIVE);
        let mut v: Vec<f64> = (0..len).map(|i| 1.0 + 0.1 * ((i * 7 + j * 13) % 11) as f64).collect();
        for _ in 0..4 {
            let rhs: Vec<f64> = v.iter().zip(mass).map(|(x, m)| x * m).collect();
            v = tridiagonal_solve(diag, off, mass, shift, &rhs)
                .ok_or_else(|| SpectrumError::SolverBreakdown(format!("singular shift at eigenvalue {j}")))?;
            for prev in &vectors {
                let dot = m_dot(&v, prev);
                v.iter_mut().zip(prev).for_each(|(a, b)| *a -= dot * b);
            }
            let norm = m_dot(&v, &v).sqrt();
            if !(norm > 0.0) || !norm.is_finite() {
                return Err(SpectrumError::SolverBreakdown(format!("inverse iteration collapsed at eigenvalue {j}")));
            }
            v.iter_mut().for_each(|x| *x /= norm);
        }
        // fix the sign by the value at the inner end
        let pivot = v.iter().find(|x| x.abs() > 0.0).copied().unwrap_or(1.0);
        if pivot < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        let rq = op.energy(&v) / op.mass_norm2(&v);
        let defect = (rq - lambda).abs() / lambda.abs();
        if !(defect <= 10.0 * tol + 1e3 * f64::EPSILON) {
            return Err(SpectrumError::SolverBreakdown(format!(
                "Rayleigh quotient {rq} disagrees with eigenvalue {lambda}"
            )));
        }
        rayleigh_defect = rayleigh_defect.max(defect);
        sign_changes.push(count_sign_changes(&v)?);
        vectors.push(v);
    }

    let negative_count = sturm_count(diag, off, mass, 0.0);
    let zero_gap = eigenvalues.iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min);
    Ok(SpectrumReport {
        k: op.k,
        eigenvalues,
        eigenvectors: vectors.iter().map(|v| op.extend(v)).collect(),
        radii: op.radii.clone(),
        sign_changes,
        negative_count,
        zero_gap,
        boundary: op.boundary,
        rayleigh_defect,
    })
}

/// Strict sign alternations in node order, skipping entries below
/// `1e-12 * max |v|`.
pub fn count_sign_changes(v: &[f64]) -> Result<usize, SpectrumError> {
    let max = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if !(max > 0.0) {
        return Err(SpectrumError::ZeroVector);
    }
    let band = 1e-12 * max;
    let mut last = 0.0f64;
    let mut changes = 0;
    for &x in v.iter().filter(|x| x.abs() > band) {
        if last != 0.0 && x.signum() != last.signum() {
            changes += 1;
        }
        last = x;
    }
    Ok(changes)
}

/// `(int r^{d-1} u^{p-1} v dr, int r^{d-1} (omega u - u^{p-1}) v dr)` on the
/// profile grid; both vanish for a genuine kernel element.
pub fn moment_identities(profile: &RadialProfile, candidate: &[f64], params: &ProblemParams) -> (f64, f64) {
    let r = profile.radii();
    let d = params.dim();
    let f1: Vec<f64> = (0..r.len())
        .map(|i| r[i].powf(d - 1.0) * profile.u[i].powf(params.p - 1.0) * candidate[i])
        .collect();
    let f2: Vec<f64> = (0..r.len())
        .map(|i| r[i].powf(d - 1.0) * (params.omega * profile.u[i] - profile.u[i].powf(params.p - 1.0)) * candidate[i])
        .collect();
    (simpson(r, &f1), simpson(r, &f2))
}

/// `<L_+ u, u>` through the assembled matrices, with `u` restricted to the
/// unknowns.
pub fn morse_witness(op: &DiscreteOperator, profile: &RadialProfile) -> f64 {
    op.energy(&op.restrict(&profile.u))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearTailCheck {
    /// Eigenvalue nearest zero.
    pub eigenvalue: f64,
    /// Fixed-power fit of that eigenvector's tail.
    pub eigen_fit: TailFit,
    /// `sqrt(omega - lambda) / (1 - a)`, the rate of an eigenfunction at `lambda`.
    pub eigen_kappa: f64,
    /// Fixed-power fit of the decaying solution of `L_+ v = 0` away from the
    /// origin.
    pub zero_mode_fit: TailFit,
    pub kappa: f64,
    pub sigma: f64,
    /// `sqrt(omega) / (1 - a)`.
    pub expected_kappa: f64,
    /// `(d - 1) / 2`.
    pub expected_sigma: f64,
    /// `(d - 1 + a) / 2`, the prefactor power of the decaying WKB mode.
    pub wkb_sigma: f64,
}

/// Tail window of a vector: from the first node past the peak that follows
/// the last sign change where `|v|` drops below `1e-2` of that peak, up to
/// `r_end`. Returns the window and the sign of the tail.
fn vector_tail_window(v: &[f64], r: &[f64], r_end: f64) -> Result<((f64, f64), f64), SpectrumError> {
    let end = r.iter().position(|&x| x > r_end).unwrap_or(r.len());
    let max = v[..end].iter().map(|x| x.abs()).fold(0.0, f64::max);
    let sign = v[..end]
        .iter()
        .rev()
        .find(|x| x.abs() > 1e-12 * max)
        .map_or(1.0, |x| x.signum());
    let after_flip = (0..end).rev().find(|&i| v[i] * sign <= 0.0).map_or(0, |i| i + 1);
    let peak = (after_flip..end)
        .max_by(|&i, &j| v[i].abs().total_cmp(&v[j].abs()))
        .ok_or(SpectrumError::TailFit("no tail region".into()))?;
    let start = (peak..end)
        .find(|&i| v[i].abs() < 1e-2 * v[peak].abs())
        .ok_or(SpectrumError::TailFit("vector does not decay".into()))?;
    Ok(((r[start], r_end), sign))
}

fn fit_vector_tail(v: &[f64], profile: &RadialProfile, params: &ProblemParams) -> Result<TailFit, SpectrumError> {
    let r = profile.radii();
    let (window, sign) = vector_tail_window(v, r, 0.8 * profile.r_max())?;
    let u: Vec<f64> = v.iter().map(|x| x * sign).collect();
    let du: Vec<f64> = (0..u.len())
        .map(|i| {
            if i == 0 || i + 1 == u.len() {
                0.0
            } else {
                crate::quadrature::centered_derivative(r, &u, i)
            }
        })
        .collect();
    let pseudo = RadialProfile {
        grid: profile.grid.clone(),
        u,
        du,
        beta: 1.0,
        tail: None,
    };
    crate::shooting::fit_tail(&pseudo, params, window).map_err(|e| SpectrumError::TailFit(e.to_string()))
}

/// Far-field decay of the linearized problem.
///
/// Fits the eigenvector whose eigenvalue is nearest zero and the solution
/// of `S v = e_0` (a unit load at the inner end, so `L_+ v = 0` beyond the
/// first cell). The window runs from where `|v|` has fallen by `1e-2` past
/// its last sign change to `0.8 r_max`, clear of the Dirichlet layer.
pub fn linearized_tail_check(
    report: &SpectrumReport,
    params: &ProblemParams,
    profile: &RadialProfile,
) -> Result<LinearTailCheck, SpectrumError> {
    if !(params.a > 0.0 && params.a < 0.5) {
        return Err(SpectrumError::WeightOutOfTailRange(params.a));
    }
    let j = report.nearest_zero();
    let lambda = report.eigenvalues[j];
    let eigen_fit = fit_vector_tail(&report.eigenvectors[j], profile, params)?;

    let op = assemble_with(profile, params, report.k, InnerBoundary::NoFlux)?;
    let mut load = vec![0.0; op.len()];
    load[0] = 1.0;
    let zero_mode = tridiagonal_solve(&op.diag, &op.off, &op.mass, 0.0, &load)
        .ok_or_else(|| SpectrumError::SolverBreakdown("operator is singular".into()))?;
    let zero_mode_fit = fit_vector_tail(&op.extend(&zero_mode), profile, params)?;

    let d = params.dim();
    Ok(LinearTailCheck {
        eigenvalue: lambda,
        eigen_fit,
        eigen_kappa: (params.omega - lambda).max(0.0).sqrt() / (1.0 - params.a),
        zero_mode_fit,
        kappa: zero_mode_fit.stretched_exponent,
        sigma: zero_mode_fit.algebraic_power,
        expected_kappa: params.omega.sqrt() / (1.0 - params.a),
        expected_sigma: 0.5 * (d - 1.0),
        wkb_sigma: 0.5 * (d - 1.0 + params.a),
    })
}
