//! Shared solves and an independent reference integrator for the
//! integration tests.

#![allow(dead_code)]

use std::sync::OnceLock;

use dgs::radial_ode::integrate;
use dgs::shooting::{auto_bracket, find_ground_state, ShootingConfig, ShootingResult};
use dgs::{ProblemParams, RadialProfile};

pub const SHOOT_TOL: f64 = 1e-12;

pub fn reference_params() -> ProblemParams {
    ProblemParams::new(2, 0.5, 1.0, 3.0)
}

pub fn solve(params: &ProblemParams, r_start: f64, r_max: f64, n: usize) -> ShootingResult {
    let cfg = ShootingConfig::graded(r_start, r_max, n).unwrap();
    let bracket = auto_bracket(params, &cfg).unwrap();
    find_ground_state(params, bracket, SHOOT_TOL, &cfg).unwrap()
}

macro_rules! cached {
    ($name:ident, $params:expr, $r_start:expr, $r_max:expr, $n:expr) => {
        pub fn $name() -> &'static ShootingResult {
            static CELL: OnceLock<ShootingResult> = OnceLock::new();
            CELL.get_or_init(|| solve(&$params, $r_start, $r_max, $n))
        }
    };
}

cached!(reference, reference_params(), 1e-6, 30.0, 4096);
cached!(reference_coarse, reference_params(), 1e-6, 30.0, 2048);
cached!(reference_fine, reference_params(), 1e-6, 30.0, 8192);
cached!(reference_deep_start, reference_params(), 1e-12, 30.0, 4096);
cached!(reference_deep_start_coarse, reference_params(), 1e-12, 30.0, 2048);
cached!(quarter_weight, ProblemParams::new(2, 0.25, 1.0, 3.0), 1e-6, 30.0, 4096);

/// Trajectories from `beta_star * (1 -+ rel)` on the grid of `cfg`, cut to
/// the nodes where both are still positive.
pub fn bracketing_pair(params: &ProblemParams, beta_star: f64, rel: f64, cfg: &ShootingConfig) -> (RadialProfile, RadialProfile) {
    let (lo, _) = integrate(params, beta_star * (1.0 - rel), &cfg.grid, &cfg.controller).unwrap();
    let (hi, _) = integrate(params, beta_star * (1.0 + rel), &cfg.grid, &cfg.controller).unwrap();
    let len = lo
        .len()
        .min(hi.len())
        .min(lo.u.iter().zip(&hi.u).position(|(a, b)| !(*a > 0.0 && *b > 0.0)).unwrap_or(usize::MAX));
    (lo.truncated(len), hi.truncated(len))
}

/// Outcome of one classical shot with the reference integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shot {
    High,
    Low,
}

/// Classical NLS ground state `u'' + (d-1)/r u' - u + u^{p-1} = 0` by
/// bisection, integrated with fixed-step classical RK4 from the Taylor
/// start `u = b - (b^{p-1} - b) r^2 / (2d)` at `r = h`.
pub fn classical_oracle(d: f64, p: f64, h: f64, r_max: f64, low: f64, high: f64) -> f64 {
    let rhs = |r: f64, u: f64, v: f64| -> (f64, f64) { (v, -(d - 1.0) / r * v + u - u.signum() * u.abs().powf(p - 1.0)) };
    let shot = |b: f64| -> Shot {
        let c = (b.powf(p - 1.0) - b) / d;
        let (mut r, mut u, mut v) = (h, b - 0.5 * c * h * h, -c * h);
        while r < r_max {
            let (k1u, k1v) = rhs(r, u, v);
            let (k2u, k2v) = rhs(r + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v);
            let (k3u, k3v) = rhs(r + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v);
            let (k4u, k4v) = rhs(r + h, u + h * k3u, v + h * k3v);
            u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            r += h;
            if u < 0.0 {
                return Shot::High;
            }
            if v > 0.0 {
                return Shot::Low;
            }
        }
        Shot::Low
    };
    let (mut lo, mut hi) = (low, high);
    assert_eq!(shot(lo), Shot::Low);
    assert_eq!(shot(hi), Shot::High);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match shot(mid) {
            Shot::High => hi = mid,
            Shot::Low => lo = mid,
        }
    }
    0.5 * (lo + hi)
}
