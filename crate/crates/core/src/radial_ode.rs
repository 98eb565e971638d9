//! The singular radial profile equation
//!
//! ```text
//! u'' + ((d-1+2a)/r) u' - omega u / r^{2a} + u^{p-1} / r^{2a} = 0
//! ```
//!
//! integrated outward from a series start near `r = 0` with event
//! detection for the shooting dichotomy.

use std::fmt::Write as _;

use thiserror::Error;

use crate::integrator::{dp5_step, step_factor, ControllerConfig, State};
use crate::params::ProblemParams;
use crate::quadrature::centered_derivative5;
use crate::report::fmt17;
use crate::shooting::TailFit;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("shooting height beta = {0} must be positive")]
    NonpositiveBeta(f64),
    #[error("step size underflow at r = {r} (h = {h})")]
    StepSizeUnderflow { r: f64, h: f64 },
    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
}

/// Strictly increasing positive radii; the first node is the series
/// hand-off radius and the last the truncation radius.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
}

impl RadialGrid {
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self, OdeError> {
        if nodes.len() < 2 {
            return Err(OdeError::InvalidGrid("need at least two nodes"));
        }
        if !(nodes[0] > 0.0) {
            return Err(OdeError::InvalidGrid("first node must be positive"));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) || !nodes.iter().all(|r| r.is_finite()) {
            return Err(OdeError::InvalidGrid("nodes must be finite and strictly increasing"));
        }
        Ok(RadialGrid { nodes })
    }

    /// `n` nodes `r_start + (r_max - r_start) t^2` with `t` uniform in
    /// `[0, 1]`; dense near the origin where `u''` is singular.
    pub fn graded(r_start: f64, r_max: f64, n: usize) -> Result<Self, OdeError> {
        if n < 3 || !(r_max > r_start) {
            return Err(OdeError::InvalidGrid("graded grid needs n >= 3 and r_max > r_start"));
        }
        let span = r_max - r_start;
        let last = (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 / last;
                r_start + span * t * t
            })
            .collect();
        nodes[n - 1] = r_max;
        Self::from_nodes(nodes)
    }

    pub fn uniform(r_start: f64, r_max: f64, n: usize) -> Result<Self, OdeError> {
        if n < 2 || !(r_max > r_start) {
            return Err(OdeError::InvalidGrid("uniform grid needs n >= 2 and r_max > r_start"));
        }
        let h = (r_max - r_start) / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| r_start + h * i as f64).collect();
        nodes[n - 1] = r_max;
        Self::from_nodes(nodes)
    }

    /// Every node multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        RadialGrid {
            nodes: self.nodes.iter().map(|r| r * factor).collect(),
        }
    }

    /// The graded grid with each interval bisected (`2n - 1` nodes).
    pub fn refined(&self) -> Self {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(*self.nodes.last().unwrap());
        RadialGrid { nodes }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_start(&self) -> f64 {
        self.nodes[0]
    }

    pub fn r_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    fn prefix(&self, len: usize) -> Self {
        RadialGrid {
            nodes: self.nodes[..len].to_vec(),
        }
    }
}

/// Samples of a trajectory started at height `beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub grid: RadialGrid,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub beta: f64,
    pub tail: Option<TailFit>,
}

impl RadialProfile {
    pub fn radii(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn r_start(&self) -> f64 {
        self.grid.r_start()
    }

    pub fn r_max(&self) -> f64 {
        self.grid.r_max()
    }

    pub fn is_positive(&self) -> bool {
        self.u.iter().all(|&v| v > 0.0)
    }

    /// `u' < 0` at every node beyond the hand-off radius.
    pub fn is_strictly_decreasing(&self) -> bool {
        self.du.iter().skip(1).all(|&v| v < 0.0) && self.u.windows(2).all(|w| w[1] < w[0])
    }

    /// First `len` nodes.
    pub fn truncated(&self, len: usize) -> Self {
        RadialProfile {
            grid: self.grid.prefix(len),
            u: self.u[..len].to_vec(),
            du: self.du[..len].to_vec(),
            beta: self.beta,
            tail: None,
        }
    }

    /// CSV with header `r,u,du` and 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,u,du\n");
        for i in 0..self.len() {
            let _ = writeln!(
                out,
                "{},{},{}",
                fmt17(self.radii()[i]),
                fmt17(self.u[i]),
                fmt17(self.du[i])
            );
        }
        out
    }

    /// Parses the `r,u,du` CSV produced by [`RadialProfile::to_csv`].
    pub fn from_csv(text: &str, beta: f64) -> Result<Self, OdeError> {
        let mut r = Vec::new();
        let mut u = Vec::new();
        let mut du = Vec::new();
        for line in text.lines().skip(1).filter(|l| !l.trim().is_empty()) {
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| OdeError::InvalidGrid("unparseable CSV row"))?;
            if cols.len() != 3 {
                return Err(OdeError::InvalidGrid("expected three CSV columns"));
            }
            r.push(cols[0]);
            u.push(cols[1]);
            du.push(cols[2]);
        }
        Ok(RadialProfile {
            grid: RadialGrid::from_nodes(r)?,
            u,
            du,
            beta,
            tail: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    CrossedZero,
    TurnedUpward,
    ExceededBound,
    ReachedRmax,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::CrossedZero => "crossed_zero",
            EventKind::TurnedUpward => "turned_upward",
            EventKind::ExceededBound => "exceeded_bound",
            EventKind::ReachedRmax => "reached_rmax",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationEvent {
    pub kind: EventKind,
    pub radius: f64,
}

/// Which events halt the integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventOptions {
    pub stop_on_zero: bool,
    pub stop_on_turn: bool,
    /// `ExceededBound` fires when `u > bound_factor * beta`.
    pub bound_factor: f64,
}

impl Default for EventOptions {
    fn default() -> Self {
        EventOptions {
            stop_on_zero: true,
            stop_on_turn: true,
            bound_factor: 2.0,
        }
    }
}

/// `u''` from the radial equation, with the nonlinearity extended oddly
/// to `u < 0`.
#[inline]
pub fn ode_rhs(params: &ProblemParams, r: f64, u: f64, du: f64) -> f64 {
    debug_assert!(r > 0.0);
    let nonlin = u.signum() * u.abs().powf(params.p - 1.0);
    -(params.flux_exponent() / r) * du + (params.omega * u - nonlin) / r.powf(2.0 * params.a)
}

/// Leading coefficient `c = (beta^{p-1} - omega beta) / d` of
/// `u'(r) = -c r^{1-2a} + o(r^{1-2a})` at the origin.
pub fn origin_coefficient(params: &ProblemParams, beta: f64) -> f64 {
    (beta.powf(params.p - 1.0) - params.omega * beta) / params.dim()
}

/// `(u, u')` at `r_start` from the leading-order expansion at the origin.
pub fn series_start(params: &ProblemParams, beta: f64, r_start: f64) -> Result<(f64, f64), OdeError> {
    if !(beta > 0.0) {
        return Err(OdeError::NonpositiveBeta(beta));
    }
    let c = origin_coefficient(params, beta);
    let e = 2.0 - 2.0 * params.a;
    let u = beta - c * r_start.powf(e) / e;
    let du = -c * r_start.powf(1.0 - 2.0 * params.a);
    Ok((u, du))
}

/// Integrates from the series start to the last grid node, halting at the
/// first event. The returned profile holds every node reached before the
/// event.
pub fn integrate(
    params: &ProblemParams,
    beta: f64,
    grid: &RadialGrid,
    ctrl: &ControllerConfig,
) -> Result<(RadialProfile, IntegrationEvent), OdeError> {
    integrate_with(params, beta, grid, ctrl, &EventOptions::default())
}

pub fn integrate_with(
    params: &ProblemParams,
    beta: f64,
    grid: &RadialGrid,
    ctrl: &ControllerConfig,
    events: &EventOptions,
) -> Result<(RadialProfile, IntegrationEvent), OdeError> {
    let nodes = grid.nodes();
    let (u0, du0) = series_start(params, beta, nodes[0])?;
    let f = |r: f64, y: &State| [y[1], ode_rhs(params, r, y[0], y[1])];
    let bound = events.bound_factor * beta;

    let mut u = Vec::with_capacity(nodes.len());
    let mut du = Vec::with_capacity(nodes.len());
    u.push(u0);
    du.push(du0);

    let mut r = nodes[0];
    let mut y: State = [u0, du0];
    let mut h = (ctrl.max_step_ratio * r).min(ctrl.max_step);
    let mut steps = 0usize;
    let mut seen_descent = du0 < 0.0;

    for &target in &nodes[1..] {
        while r < target {
            steps += 1;
            if steps > ctrl.max_steps {
                return Err(OdeError::TooManySteps(ctrl.max_steps));
            }
            let cap = (ctrl.max_step_ratio * r).min(ctrl.max_step);
            h = h.min(cap);
            let h_proposed = h;
            let hitting = r + h >= target;
            let h_try = if hitting { target - r } else { h };
            if h_try < 1e-15 * r.max(1e-300) {
                return Err(OdeError::StepSizeUnderflow { r, h: h_try });
            }
            let step = dp5_step(&f, r, &y, h_try, ctrl);
            if !step.err.is_finite() || step.err > 1.0 {
                h = h_try * step_factor(if step.err.is_finite() { step.err } else { 1e10 });
                continue;
            }
            let y_new = step.y;
            // event checks on the accepted step [r, r + h_try]
            let mut hit: Option<(EventKind, usize)> = None;
            if events.stop_on_zero && y[0] > 0.0 && y_new[0] <= 0.0 {
                hit = Some((EventKind::CrossedZero, 0));
            }
            if hit.is_none() && events.stop_on_turn && seen_descent && y[1] < 0.0 && y_new[1] >= 0.0 && y_new[0] > 0.0 {
                hit = Some((EventKind::TurnedUpward, 1));
            }
            if hit.is_none() && y_new[0] > bound {
                hit = Some((EventKind::ExceededBound, 2));
            }
            if let Some((kind, which)) = hit {
                let radius = locate_event(&f, r, &y, h_try, ctrl, |s: &State| match which {
                    0 => s[0],
                    1 => s[1],
                    _ => s[0] - bound,
                });
                let len = u.len();
                let profile = RadialProfile {
                    grid: grid.prefix(len),
                    u,
                    du,
                    beta,
                    tail: None,
                };
                return Ok((profile, IntegrationEvent { kind, radius }));
            }
            if y_new[1] < 0.0 {
                seen_descent = true;
            }
            r = if hitting { target } else { r + h_try };
            y = y_new;
            h = h_try * step_factor(step.err);
            if hitting {
                // a step clipped to land on a node says little about the next one
                h = h.max(h_proposed);
            }
        }
        u.push(y[0]);
        du.push(y[1]);
    }

    let radius = grid.r_max();
    Ok((
        RadialProfile {
            grid: grid.clone(),
            u,
            du,
            beta,
            tail: None,
        },
        IntegrationEvent {
            kind: EventKind::ReachedRmax,
            radius,
        },
    ))
}

/// Bisection on the step length for the zero of `g` inside `(0, h]`.
fn locate_event<F, G>(f: &F, r: f64, y: &State, h: f64, ctrl: &ControllerConfig, g: G) -> f64
where
    F: Fn(f64, &State) -> State,
    G: Fn(&State) -> f64,
{
    let g0 = g(y);
    let (mut lo, mut hi) = (0.0, h);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-15 * (r + mid) {
            break;
        }
        let s = dp5_step(f, r, y, mid, ctrl).y;
        if g(&s).signum() == g0.signum() && g(&s) != 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    r + 0.5 * (lo + hi)
}

/// Per-node residual of the flux form `(r^{d-1+2a} u')' = r^{d-1}(omega u - u^{p-1})`,
/// with five-point centered differences of the flux, normalized by
/// `max r^{d-1}|u|`.
/// End nodes are reported as zero.
pub fn residual_profile(profile: &RadialProfile, params: &ProblemParams) -> Vec<f64> {
    let r = profile.radii();
    let n = r.len();
    let mut out = vec![0.0; n];
    if n < 3 {
        return out;
    }
    let fe = params.flux_exponent();
    let dm1 = params.dim() - 1.0;
    let flux: Vec<f64> = (0..n).map(|i| r[i].powf(fe) * profile.du[i]).collect();
    let scale = (0..n)
        .map(|i| r[i].powf(dm1) * profile.u[i].abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    for i in 1..n - 1 {
        let dflux = centered_derivative5(r, &flux, i);
        let u = profile.u[i];
        let rhs = r[i].powf(dm1) * (params.omega * u - u.signum() * u.abs().powf(params.p - 1.0));
        out[i] = (dflux - rhs).abs() / scale;
    }
    out
}

/// Maximum of [`residual_profile`] over interior nodes.
pub fn residual(profile: &RadialProfile, params: &ProblemParams) -> f64 {
    residual_profile(profile, params).into_iter().fold(0.0, f64::max)
}
