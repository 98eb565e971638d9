//! Bisection on the shooting height `beta = u(0)` for the decaying positive
//! solution, far-field tail matching, and the two-trajectory identities
//! (Wronskian and comparison quantity) that drive uniqueness.

use rayon::prelude::*;
use thiserror::Error;

use crate::integrator::ControllerConfig;
use crate::lstsq::solve_columns;
use crate::params::ProblemParams;
use crate::pohozaev::j_value;
use crate::quadrature::{centered_derivative, cumulative};
use crate::radial_ode::{integrate, EventKind, IntegrationEvent, OdeError, RadialGrid, RadialProfile};
use crate::report::KvReport;
use crate::variational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShootError {
    #[error("bracket ({low}, {high}) classifies as {low_class:?} / {high_class:?}; need TooLow / TooHigh")]
    BracketInvalid {
        low: f64,
        high: f64,
        low_class: Classification,
        high_class: Classification,
    },
    #[error("no convergence after {0} bisection steps")]
    NoConvergence(usize),
    #[error("tail window holds {0} nodes; at least 8 are needed")]
    WindowTooShort(usize),
    #[error("profiles are sampled on different grids")]
    GridMismatch,
    #[error("profiles must be strictly positive on the shared grid")]
    NotPositive,
    #[error(transparent)]
    Ode(#[from] OdeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    TooHigh,
    TooLow,
    Converged,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::TooHigh => "too_high",
            Classification::TooLow => "too_low",
            Classification::Converged => "converged",
        }
    }
}

/// Shooting dichotomy: a zero crossing means `beta` was too high, a turn
/// back upward (or blow-up) means too low.
pub fn classify(event: &IntegrationEvent, profile: &RadialProfile, smallness_rel: f64) -> Classification {
    match event.kind {
        EventKind::CrossedZero => Classification::TooHigh,
        EventKind::TurnedUpward | EventKind::ExceededBound => Classification::TooLow,
        EventKind::ReachedRmax => {
            let last_u = profile.u.last().copied().unwrap_or(f64::NAN);
            let last_du = profile.du.last().copied().unwrap_or(f64::NAN);
            if last_u.abs() < smallness_rel * profile.beta && last_du < 0.0 {
                Classification::Converged
            } else {
                Classification::TooLow
            }
        }
    }
}

/// Far-field model `u(r) ~ A exp(-kappa r^gamma) r^{-sigma}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit {
    pub amplitude: f64,
    /// `kappa`
    pub stretched_exponent: f64,
    /// `gamma`; fixed to `1 - a` by [`fit_tail`].
    pub radial_power: f64,
    /// `sigma`
    pub algebraic_power: f64,
    pub window: (f64, f64),
}

impl TailFit {
    fn log_value(&self, r: f64) -> f64 {
        self.amplitude.ln() - self.stretched_exponent * r.powf(self.radial_power)
            - self.algebraic_power * r.ln()
    }

    pub fn value(&self, r: f64) -> f64 {
        self.log_value(r).exp()
    }

    pub fn derivative(&self, r: f64) -> f64 {
        let g = self.radial_power;
        let dlog = -self.stretched_exponent * g * r.powf(g - 1.0) - self.algebraic_power / r;
        self.value(r) * dlog
    }
}

fn tail_samples(profile: &RadialProfile, window: (f64, f64)) -> (Vec<f64>, Vec<f64>) {
    profile
        .radii()
        .iter()
        .zip(&profile.u)
        .filter(|(&r, &u)| r >= window.0 && r <= window.1 && u > 0.0)
        .map(|(&r, &u)| (r, u.ln()))
        .unzip()
}

fn fit_with_power(r: &[f64], logu: &[f64], gamma: f64) -> Option<(Vec<f64>, f64)> {
    let cols = vec![
        vec![1.0; r.len()],
        r.iter().map(|x| -x.powf(gamma)).collect(),
        r.iter().map(|x| -x.ln()).collect(),
    ];
    solve_columns(&cols, logu)
}

/// Least-squares fit of `log u = log A - kappa r^{1-a} - sigma log r` over
/// nodes inside `window`.
pub fn fit_tail(profile: &RadialProfile, params: &ProblemParams, window: (f64, f64)) -> Result<TailFit, ShootError> {
    let (r, logu) = tail_samples(profile, window);
    if r.len() < 8 {
        return Err(ShootError::WindowTooShort(r.len()));
    }
    let gamma = 1.0 - params.a;
    let (x, _) = fit_with_power(&r, &logu, gamma).ok_or(ShootError::WindowTooShort(r.len()))?;
    Ok(TailFit {
        amplitude: x[0].exp(),
        stretched_exponent: x[1],
        radial_power: gamma,
        algebraic_power: x[2],
        window,
    })
}

/// Tail fit with the radial power `gamma` free.
///
/// Fitting `log u` with a free power is badly conditioned: `r^gamma`,
/// `log r` and the constant are nearly collinear over any practical window.
/// The logarithmic derivative separates them,
///
/// ```text
/// -u'/u = kappa gamma r^{gamma-1} + sigma / r + ...
/// ```
///
/// so `gamma` minimizes the least-squares residual of that two-term model
/// (coarse scan, then golden section), and the amplitude is matched to
/// `log u` afterwards.
pub fn fit_tail_free_power(profile: &RadialProfile, window: (f64, f64)) -> Result<TailFit, ShootError> {
    let samples: Vec<(f64, f64, f64)> = profile
        .radii()
        .iter()
        .zip(profile.u.iter().zip(&profile.du))
        .filter(|(&r, (&u, &du))| r >= window.0 && r <= window.1 && u > 0.0 && du < 0.0)
        .map(|(&r, (&u, &du))| (r, u, du))
        .collect();
    if samples.len() < 8 {
        return Err(ShootError::WindowTooShort(samples.len()));
    }
    let q: Vec<f64> = samples.iter().map(|&(_, u, du)| -du / u).collect();
    let inv_r: Vec<f64> = samples.iter().map(|&(r, _, _)| 1.0 / r).collect();
    let solve = |gamma: f64| {
        let lead: Vec<f64> = samples.iter().map(|&(r, _, _)| r.powf(gamma - 1.0)).collect();
        solve_columns(&[lead, inv_r.clone()], &q)
    };
    let cost = |g: f64| solve(g).map(|(_, res)| res).unwrap_or(f64::INFINITY);
    let (lo0, hi0, steps) = (0.02, 1.5, 148);
    let h = (hi0 - lo0) / steps as f64;
    let best = (0..=steps)
        .map(|i| lo0 + h * i as f64)
        .min_by(|a, b| cost(*a).total_cmp(&cost(*b)))
        .unwrap();
    let (mut a, mut b) = ((best - h).max(lo0), (best + h).min(hi0));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    while b - a > 1e-10 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if cost(c) < cost(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let gamma = 0.5 * (a + b);
    let (x, _) = solve(gamma).ok_or(ShootError::WindowTooShort(samples.len()))?;
    let (kappa, sigma) = (x[0] / gamma, x[1]);
    let log_amp = samples
        .iter()
        .map(|&(r, u, _)| u.ln() + kappa * r.powf(gamma) + sigma * r.ln())
        .sum::<f64>()
        / samples.len() as f64;
    Ok(TailFit {
        amplitude: log_amp.exp(),
        stretched_exponent: kappa,
        radial_power: gamma,
        algebraic_power: sigma,
        window,
    })
}

/// Far-field fit window: from the first node where `u < threshold_rel * beta`
/// to the last node.
pub fn default_tail_window(profile: &RadialProfile, threshold_rel: f64) -> (f64, f64) {
    let r = profile.radii();
    let start = profile
        .u
        .iter()
        .position(|&u| u < threshold_rel * profile.beta)
        .unwrap_or(r.len() - 1);
    (r[start], profile.r_max())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingConfig {
    pub grid: RadialGrid,
    pub controller: ControllerConfig,
    /// `ReachedRmax` with `u(r_max) < smallness_rel * beta` counts as converged.
    pub smallness_rel: f64,
    pub max_iterations: usize,
    /// Tail window starts where `u < tail_threshold_rel * beta`.
    pub tail_threshold_rel: f64,
}

impl ShootingConfig {
    pub fn new(grid: RadialGrid) -> Self {
        ShootingConfig {
            grid,
            controller: ControllerConfig::default(),
            smallness_rel: 1e-5,
            max_iterations: 200,
            tail_threshold_rel: 1e-3,
        }
    }

    /// Graded grid on `[r_start, r_max]` with `n` nodes.
    pub fn graded(r_start: f64, r_max: f64, n: usize) -> Result<Self, ShootError> {
        Ok(Self::new(RadialGrid::graded(r_start, r_max, n)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub beta: f64,
    pub event: IntegrationEvent,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingResult {
    pub beta_star: f64,
    pub profile: RadialProfile,
    pub event: IntegrationEvent,
    pub classification: Classification,
    pub bracket: (f64, f64),
    /// Bisection steps needed to reach the requested tolerance.
    pub iterations: usize,
    /// Further steps taken until the bracket ends are adjacent floats.
    pub polish_iterations: usize,
    pub classification_trace: Vec<TraceEntry>,
    pub tail: Option<TailFit>,
    pub nehari_residual: f64,
}

impl ShootingResult {
    pub fn report(&self) -> KvReport {
        let mut r = KvReport::new();
        r.push("beta_star", self.beta_star)
            .push("bracket_low", self.bracket.0)
            .push("bracket_high", self.bracket.1)
            .push("iterations", self.iterations)
            .push("polish_iterations", self.polish_iterations)
            .push("final_event", self.event.kind.as_str())
            .push("final_classification", self.classification.as_str())
            .push("tail_kappa", self.tail.map_or(f64::NAN, |t| t.stretched_exponent))
            .push("tail_sigma", self.tail.map_or(f64::NAN, |t| t.algebraic_power))
            .push("tail_amplitude", self.tail.map_or(f64::NAN, |t| t.amplitude))
            .push("nehari_residual", self.nehari_residual);
        r
    }
}

fn shoot(params: &ProblemParams, beta: f64, cfg: &ShootingConfig) -> Result<(RadialProfile, IntegrationEvent, Classification), ShootError> {
    let (profile, event) = integrate(params, beta, &cfg.grid, &cfg.controller)?;
    let class = classify(&event, &profile, cfg.smallness_rel);
    Ok((profile, event, class))
}

fn reaches_rmax_cleanly(profile: &RadialProfile, event: &IntegrationEvent) -> bool {
    event.kind == EventKind::ReachedRmax && profile.is_positive() && profile.is_strictly_decreasing()
}

/// `u' + (sqrt(omega) r^{-a} + (d-1+a)/(2r)) u` at the last node.
///
/// Far out the linearization has a growing and a decaying mode with
/// logarithmic derivatives `±sqrt(omega) r^{-a} - (d-1+a)/(2r)`; this
/// quantity annihilates the decaying one, so its sign is the sign of the
/// growing component. Positive means the trajectory will eventually turn
/// upward, negative that it will cross zero.
pub fn growing_mode_indicator(profile: &RadialProfile, params: &ProblemParams) -> f64 {
    let n = profile.len();
    let r = profile.radii()[n - 1];
    let rate = params.omega.sqrt() * r.powf(-params.a) + 0.5 * (params.dim() - 1.0 + params.a) / r;
    profile.du[n - 1] + rate * profile.u[n - 1]
}

/// Number of leading nodes on which both trajectories are positive and
/// decreasing and agree to `1e-6` relative.
fn trusted_prefix(a: &RadialProfile, b: &RadialProfile) -> usize {
    let n = a.len().min(b.len());
    (0..n)
        .position(|i| {
            let (u, v) = (a.u[i], b.u[i]);
            let decreasing = i == 0 || (a.du[i] < 0.0 && b.du[i] < 0.0);
            !(u > 0.0 && v > 0.0 && decreasing && (u - v).abs() <= 1e-6 * u)
        })
        .unwrap_or(n)
}

/// Which end of the bracket `beta` replaces: `true` for the high end.
fn is_high(profile: &RadialProfile, event: &IntegrationEvent, class: Classification, params: &ProblemParams) -> bool {
    match (event.kind, class) {
        (_, Classification::TooHigh) => true,
        (EventKind::ReachedRmax, _) => growing_mode_indicator(profile, params) < 0.0,
        _ => false,
    }
}

/// Finds a `(TooLow, TooHigh)` bracket: the low end just above the constant
/// equilibrium `omega^{1/(p-2)}`, the high end by doubling.
pub fn auto_bracket(params: &ProblemParams, cfg: &ShootingConfig) -> Result<(f64, f64), ShootError> {
    let eq = params.omega.powf(1.0 / (params.p - 2.0));
    let low = eq * (1.0 + 1e-6);
    let (_, _, low_class) = shoot(params, low, cfg)?;
    let mut high = 2.0 * eq;
    for _ in 0..60 {
        let (_, _, c) = shoot(params, high, cfg)?;
        if c == Classification::TooHigh {
            if low_class == Classification::TooHigh {
                break;
            }
            return Ok((low, high));
        }
        high *= 2.0;
    }
    Err(ShootError::BracketInvalid {
        low,
        high,
        low_class,
        high_class: Classification::TooLow,
    })
}

/// Bisection on `beta` until the bracket width is at most `tol * beta`.
///
/// Trajectories that reach `r_max` without an event are sorted by the sign
/// of [`growing_mode_indicator`]. Once the requested width is reached the
/// bisection continues until the bracket ends are adjacent floats, since
/// the growing mode amplifies any error in `beta` by `exp(2 kappa r^{1-a})`
/// at the far end. The returned profile is whichever bracket end has the
/// smaller far-field growing component, with a fitted tail attached. If
/// neither end stays positive and decreasing out to `r_max`, the profile is
/// cut back to the nodes where both ends agree and the tail model covers
/// the rest.
pub fn find_ground_state(
    params: &ProblemParams,
    bracket: (f64, f64),
    tol: f64,
    cfg: &ShootingConfig,
) -> Result<ShootingResult, ShootError> {
    let (mut lo, mut hi) = bracket;
    let mut trace = Vec::new();
    let (mut prof_lo, mut ev_lo, c_lo) = shoot(params, lo, cfg)?;
    let (mut prof_hi, mut ev_hi, c_hi) = shoot(params, hi, cfg)?;
    trace.push(TraceEntry { beta: lo, event: ev_lo, classification: c_lo });
    trace.push(TraceEntry { beta: hi, event: ev_hi, classification: c_hi });
    if is_high(&prof_lo, &ev_lo, c_lo, params) || !is_high(&prof_hi, &ev_hi, c_hi, params) {
        return Err(ShootError::BracketInvalid {
            low: lo,
            high: hi,
            low_class: c_lo,
            high_class: c_hi,
        });
    }

    let mut iterations = 0;
    let mut polish = 0;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if iterations + polish >= cfg.max_iterations {
            return Err(ShootError::NoConvergence(iterations + polish));
        }
        if hi - lo <= tol * mid {
            polish += 1;
        } else {
            iterations += 1;
        }
        let (profile, event, class) = shoot(params, mid, cfg)?;
        trace.push(TraceEntry { beta: mid, event, classification: class });
        if is_high(&profile, &event, class, params) {
            hi = mid;
            prof_hi = profile;
            ev_hi = event;
        } else {
            lo = mid;
            prof_lo = profile;
            ev_lo = event;
        }
    }

    let trusted = trusted_prefix(&prof_lo, &prof_hi);
    let candidates = [(prof_lo.clone(), ev_lo, lo), (prof_hi, ev_hi, hi)];
    let clean = candidates
        .into_iter()
        .filter(|(p, e, _)| reaches_rmax_cleanly(p, e))
        .min_by(|a, b| {
            let ga = (growing_mode_indicator(&a.0, params) / a.0.u[a.0.len() - 1]).abs();
            let gb = (growing_mode_indicator(&b.0, params) / b.0.u[b.0.len() - 1]).abs();
            ga.total_cmp(&gb)
        });
    let (mut profile, event, beta_star) = match clean {
        Some(c) => c,
        // Even adjacent floats leave a visible growing mode before r_max:
        // keep the stretch where both bracket ends still agree.
        None if trusted >= 16 => {
            let p = prof_lo.truncated(trusted);
            let radius = p.r_max();
            (p, IntegrationEvent { kind: EventKind::ReachedRmax, radius }, lo)
        }
        None => return Err(ShootError::NoConvergence(iterations + polish)),
    };
    let classification = classify(&event, &profile, cfg.smallness_rel);

    let window = default_tail_window(&profile, cfg.tail_threshold_rel);
    let tail = fit_tail(&profile, params, window).ok();
    profile.tail = tail;
    let nehari_residual = variational::functionals(&profile, params)
        .map(|f| f.nehari_residual)
        .unwrap_or(f64::NAN);

    Ok(ShootingResult {
        beta_star,
        profile,
        event,
        classification,
        bracket: (lo, hi),
        iterations,
        polish_iterations: polish,
        classification_trace: trace,
        tail,
        nehari_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanEntry {
    pub beta: f64,
    pub event: IntegrationEvent,
    pub classification: Classification,
}

/// Classifies every `beta`; runs in parallel, results in input order.
pub fn scan_beta(params: &ProblemParams, betas: &[f64], cfg: &ShootingConfig) -> Result<Vec<ScanEntry>, ShootError> {
    betas
        .par_iter()
        .map(|&beta| {
            let (_, event, classification) = shoot(params, beta, cfg)?;
            Ok(ScanEntry { beta, event, classification })
        })
        .collect()
}

/// `n` logarithmically spaced heights spanning `[low, high]`.
pub fn log_spaced(low: f64, high: f64, n: usize) -> Vec<f64> {
    let (l, h) = (low.ln(), high.ln());
    (0..n)
        .map(|i| (l + (h - l) * i as f64 / (n.max(2) - 1) as f64).exp())
        .collect()
}

/// Number of TooLow/TooHigh switches along a scan (converged entries count
/// as not-too-high).
pub fn classification_transitions(scan: &[ScanEntry]) -> usize {
    scan.windows(2)
        .filter(|w| (w[0].classification == Classification::TooHigh) != (w[1].classification == Classification::TooHigh))
        .count()
}

pub fn scan_to_csv(scan: &[ScanEntry]) -> String {
    use crate::report::fmt17;
    let mut out = String::from("beta,classification,event_radius\n");
    for e in scan {
        out.push_str(&format!("{},{},{}\n", fmt17(e.beta), e.classification.as_str(), fmt17(e.event.radius)));
    }
    out
}

fn check_pair(u: &RadialProfile, v: &RadialProfile) -> Result<(), ShootError> {
    if u.radii() != v.radii() || u.len() < 3 {
        return Err(ShootError::GridMismatch);
    }
    if !u.is_positive() || !v.is_positive() {
        return Err(ShootError::NotPositive);
    }
    Ok(())
}

/// Both sides of `(v/u)' = (1/(r^{d-1+2a} u^2)) int_0^r t^{d-1} (u^{p-2} - v^{p-2}) u v dt`
/// at interior nodes: the left by centered differences of `v/u`, the right by
/// cumulative quadrature with the segment `[0, r_start]` from the series.
pub fn wronskian_sides(u: &RadialProfile, v: &RadialProfile, params: &ProblemParams) -> Result<(Vec<f64>, Vec<f64>), ShootError> {
    check_pair(u, v)?;
    let r = u.radii();
    let n = r.len();
    let (d, p) = (params.dim(), params.p);
    let integrand: Vec<f64> = (0..n)
        .map(|i| r[i].powf(d - 1.0) * (u.u[i].powf(p - 2.0) - v.u[i].powf(p - 2.0)) * u.u[i] * v.u[i])
        .collect();
    // integrand is ~ const * t^{d-1} below the hand-off radius
    let origin = (u.beta.powf(p - 2.0) - v.beta.powf(p - 2.0)) * u.beta * v.beta * r[0].powf(d) / d;
    let cum = cumulative(r, &integrand);
    let w: Vec<f64> = (0..n).map(|i| v.u[i] / u.u[i]).collect();
    let fe = params.flux_exponent();
    let mut lhs = Vec::with_capacity(n - 2);
    let mut rhs = Vec::with_capacity(n - 2);
    for i in 1..n - 1 {
        lhs.push(centered_derivative(r, &w, i));
        rhs.push((origin + cum[i]) / (r[i].powf(fe) * u.u[i] * u.u[i]));
    }
    Ok((lhs, rhs))
}

/// Max over interior nodes of `|(v/u)' - RHS|`; see [`wronskian_sides`].
pub fn wronskian_identity_residual(u: &RadialProfile, v: &RadialProfile, params: &ProblemParams) -> Result<f64, ShootError> {
    let (lhs, rhs) = wronskian_sides(u, v, params)?;
    Ok(lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// `X = w^2 J(r,u) - J(r,v)` with `w = v/u`, and both sides of
/// `X' = 2 w w' J(r,u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonSamples {
    pub radii: Vec<f64>,
    pub x: Vec<f64>,
    /// Centered differences of `x` (interior nodes; zero at the ends).
    pub dx_numeric: Vec<f64>,
    /// `2 w w' J(r,u)` with `w' = (v' u - u' v) / u^2`.
    pub dx_identity: Vec<f64>,
}

impl ComparisonSamples {
    /// `max |dx_numeric - dx_identity| / max |dx_identity|` over interior nodes.
    pub fn consistency(&self) -> f64 {
        let n = self.radii.len();
        let mut num: f64 = 0.0;
        let mut den: f64 = 0.0;
        for i in 1..n - 1 {
            num = num.max((self.dx_numeric[i] - self.dx_identity[i]).abs());
            den = den.max(self.dx_identity[i].abs());
        }
        num / den.max(f64::MIN_POSITIVE)
    }
}

pub fn comparison_quantity(u: &RadialProfile, v: &RadialProfile, params: &ProblemParams) -> Result<ComparisonSamples, ShootError> {
    check_pair(u, v)?;
    let r = u.radii().to_vec();
    let n = r.len();
    let mut x = Vec::with_capacity(n);
    let mut dx_identity = Vec::with_capacity(n);
    for i in 0..n {
        let w = v.u[i] / u.u[i];
        let dw = (v.du[i] * u.u[i] - u.du[i] * v.u[i]) / (u.u[i] * u.u[i]);
        let ju = j_value(params, r[i], u.u[i], u.du[i]);
        let jv = j_value(params, r[i], v.u[i], v.du[i]);
        x.push(w * w * ju - jv);
        dx_identity.push(2.0 * w * dw * ju);
    }
    let dx_numeric = (0..n)
        .map(|i| if i == 0 || i + 1 == n { 0.0 } else { centered_derivative(&r, &x, i) })
        .collect();
    Ok(ComparisonSamples {
        radii: r,
        x,
        dx_numeric,
        dx_identity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_ode::{integrate_with, EventOptions};

    fn reference() -> ProblemParams {
        ProblemParams::new(2, 0.5, 1.0, 3.0)
    }

    fn dummy_profile(u_last: f64, du_last: f64) -> RadialProfile {
        RadialProfile {
            grid: RadialGrid::uniform(0.1, 30.0, 3).unwrap(),
            u: vec![1.0, 0.5, u_last],
            du: vec![-0.1, -0.1, du_last],
            beta: 1.0,
            tail: None,
        }
    }

    #[test]
    fn classify_examples() {
        let prof = dummy_profile(1e-10, -1e-11);
        let ev = |kind, radius| IntegrationEvent { kind, radius };
        assert_eq!(classify(&ev(EventKind::CrossedZero, 3.0), &prof, 1e-8), Classification::TooHigh);
        assert_eq!(classify(&ev(EventKind::TurnedUpward, 5.0), &prof, 1e-8), Classification::TooLow);
        assert_eq!(classify(&ev(EventKind::ExceededBound, 5.0), &prof, 1e-8), Classification::TooLow);
        assert_eq!(classify(&ev(EventKind::ReachedRmax, 30.0), &prof, 1e-8), Classification::Converged);
        let flat = dummy_profile(0.3, -1e-3);
        assert_eq!(classify(&ev(EventKind::ReachedRmax, 30.0), &flat, 1e-8), Classification::TooLow);
        let rising = dummy_profile(1e-10, 1e-12);
        assert_eq!(classify(&ev(EventKind::ReachedRmax, 30.0), &rising, 1e-8), Classification::TooLow);
    }

    #[test]
    fn tail_fit_recovers_own_model() {
        let grid = RadialGrid::uniform(5.0, 40.0, 200).unwrap();
        let u: Vec<f64> = grid.nodes().iter().map(|&r| r.powi(-1) * (-2.0 * r.sqrt()).exp()).collect();
        let du = grid.nodes().iter().zip(&u).map(|(&r, &v)| -v * (1.0 / r + 1.0 / r.sqrt())).collect();
        let prof = RadialProfile { grid, u, du, beta: 1.0, tail: None };
        let fit = fit_tail(&prof, &reference(), (5.0, 40.0)).unwrap();
        assert!((fit.stretched_exponent - 2.0).abs() < 1e-10);
        assert!((fit.algebraic_power - 1.0).abs() < 1e-10);
        assert!((fit.amplitude - 1.0).abs() < 1e-9);
        let free = fit_tail_free_power(&prof, (5.0, 40.0)).unwrap();
        assert!((free.radial_power - 0.5).abs() < 1e-6);
        assert!((free.stretched_exponent - 2.0).abs() < 1e-5);
        assert!((free.algebraic_power - 1.0).abs() < 1e-5);
        assert!(matches!(fit_tail(&prof, &reference(), (5.0, 5.5)), Err(ShootError::WindowTooShort(_))));
    }

    #[test]
    fn invalid_bracket() {
        let p = reference();
        let cfg = ShootingConfig::graded(1e-6, 30.0, 512).unwrap();
        let err = find_ground_state(&p, (7.0, 8.0), 1e-10, &cfg).unwrap_err();
        assert!(matches!(err, ShootError::BracketInvalid { .. }));
    }

    #[test]
    fn identities_vanish_for_identical_profiles() {
        let p = reference();
        let grid = RadialGrid::graded(1e-6, 3.0, 400).unwrap();
        let (u, _) = integrate(&p, 2.5, &grid, &ControllerConfig::default()).unwrap();
        assert!(wronskian_identity_residual(&u, &u, &p).unwrap() < 1e-9);
        let cmp = comparison_quantity(&u, &u, &p).unwrap();
        assert!(cmp.x.iter().all(|&x| x.abs() < 1e-15 * 10.0));
    }

    #[test]
    fn wronskian_negative_control() {
        let p = reference();
        let grid = RadialGrid::graded(1e-6, 3.0, 400).unwrap();
        let (u, _) = integrate(&p, 2.5, &grid, &ControllerConfig::default()).unwrap();
        let mut v = u.clone();
        v.u.iter_mut().for_each(|x| *x *= 2.0);
        v.du.iter_mut().for_each(|x| *x *= 2.0);
        v.beta *= 2.0;
        assert!(wronskian_identity_residual(&u, &v, &p).unwrap() > 0.1);
    }

    #[test]
    fn grid_mismatch() {
        let p = reference();
        let ctrl = ControllerConfig::default();
        let (u, _) = integrate(&p, 2.5, &RadialGrid::graded(1e-6, 3.0, 100).unwrap(), &ctrl).unwrap();
        let (v, _) = integrate(&p, 2.5, &RadialGrid::graded(1e-6, 3.0, 101).unwrap(), &ctrl).unwrap();
        assert_eq!(wronskian_identity_residual(&u, &v, &p), Err(ShootError::GridMismatch));
    }

    #[test]
    fn comparison_vanishes_at_origin() {
        let p = reference();
        let grid = RadialGrid::graded(1e-6, 2.0, 300).unwrap();
        let ctrl = ControllerConfig::default();
        let opts = EventOptions::default();
        let (u, _) = integrate_with(&p, 2.2, &grid, &ctrl, &opts).unwrap();
        let (v, _) = integrate_with(&p, 2.6, &grid, &ctrl, &opts).unwrap();
        let cmp = comparison_quantity(&u, &v, &p).unwrap();
        let xmax = cmp.x.iter().map(|x| x.abs()).fold(0.0, f64::max);
        assert!(cmp.x[0].abs() < 1e-9 * xmax);
    }

    #[test]
    fn log_spacing() {
        let b = log_spaced(1.0, 100.0, 3);
        assert!((b[1] - 10.0).abs() < 1e-12);
    }
}
