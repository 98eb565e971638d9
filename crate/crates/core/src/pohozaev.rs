//! The Pohozaev quantity
//!
//! ```text
//! J(r,u) = A/2 u'^2 + B u' u + C/2 u^2 - omega A/2 u^2/r^{2a} + A/p u^p/r^{2a}
//! ```
//!
//! with power weights `A, B, C` chosen so that along any solution of the
//! radial equation `dJ/dr = G(r) u^2` for an explicit two-term power `G`.
//! The frequency enters `J` and the first term of `G` as a plain factor;
//! at `omega = 1` both reduce to the classical weights.

use std::fmt::Write as _;

use thiserror::Error;

use crate::params::ProblemParams;
use crate::quadrature::centered_derivative;
use crate::radial_ode::{series_start, RadialProfile};
use crate::report::{fmt17, KvReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PohozaevError {
    #[error("positivity condition {name} fails: value {value}")]
    Preflight { name: &'static str, value: f64 },
    #[error("profile must be strictly positive with at least three nodes")]
    BadProfile,
}

/// Exponent `sigma = (4a + 2(d-1+2a)p) / (p+2)` of `A(r) = r^sigma`.
pub fn sigma(params: &ProblemParams) -> f64 {
    (4.0 * params.a + 2.0 * params.flux_exponent() * params.p) / (params.p + 2.0)
}

/// `(2d - 2 + 2a) / (p + 2)`, the prefactor shared by `B` and `C`.
fn bc_prefactor(params: &ProblemParams) -> f64 {
    (2.0 * params.dim() - 2.0 + 2.0 * params.a) / (params.p + 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

pub fn weights(params: &ProblemParams, r: f64) -> Weights {
    let s = sigma(params);
    let k = bc_prefactor(params);
    Weights {
        a: r.powf(s),
        b: k * r.powf(s - 1.0),
        c: k * (params.dim() + 2.0 * params.a - s) * r.powf(s - 2.0),
    }
}

/// Residuals of the three linear constraints that fix `A, B, C`:
/// `A'/2 - n A/r + B`, `B' - n B/r + C` and `A'/(p r^{2a}) - 2aA/(p r^{2a+1}) - B/r^{2a}`,
/// with the derivatives taken analytically from the power laws.
pub fn weight_constraints(params: &ProblemParams, r: f64) -> [f64; 3] {
    let s = sigma(params);
    let w = weights(params, r);
    let n = params.flux_exponent();
    let (a, p) = (params.a, params.p);
    let da = s * w.a / r;
    let db = (s - 1.0) * w.b / r;
    let r2a = r.powf(2.0 * a);
    [
        da / 2.0 - n / r * w.a + w.b,
        db - n / r * w.b + w.c,
        da / (p * r2a) - 2.0 * a * w.a / (p * r2a * r) - w.b / r2a,
    ]
}

/// `J(r, u)` at a single point.
pub fn j_value(params: &ProblemParams, r: f64, u: f64, du: f64) -> f64 {
    let w = weights(params, r);
    let r2a = r.powf(2.0 * params.a);
    0.5 * w.a * du * du + w.b * du * u + 0.5 * w.c * u * u - 0.5 * params.omega * w.a * u * u / r2a
        + w.a / params.p * u.abs().powf(params.p) / r2a
}

/// `J` at every node of the profile.
pub fn j_of_r(params: &ProblemParams, profile: &RadialProfile) -> Vec<f64> {
    profile
        .radii()
        .iter()
        .zip(profile.u.iter().zip(&profile.du))
        .map(|(&r, (&u, &du))| j_value(params, r, u, du))
        .collect()
}

/// The two coefficients of `G(r) = -omega c1 r^{sigma-2a-1} + c2 r^{sigma-3}`.
pub fn g_coefficients(params: &ProblemParams) -> (f64, f64) {
    let s = sigma(params);
    let (d, a, p) = (params.dim(), params.a, params.p);
    let c1 = (p - 2.0) * (d - 1.0 + a) / (p + 2.0);
    let c2 = bc_prefactor(params) * (d + 2.0 * a - s) * ((2.0 * a + (d - 1.0 + 2.0 * a) * p) / (p + 2.0) - 1.0);
    (c1, c2)
}

pub fn g_of_r(params: &ProblemParams, r: f64) -> f64 {
    let s = sigma(params);
    let (c1, c2) = g_coefficients(params);
    -params.omega * c1 * r.powf(s - 2.0 * params.a - 1.0) + c2 * r.powf(s - 3.0)
}

/// Sign-change radius of `G`: `(c2 / (omega c1))^{1/(2-2a)}`.
pub fn r0_closed_form(params: &ProblemParams) -> f64 {
    let (c1, c2) = g_coefficients(params);
    (c2 / (params.omega * c1)).powf(1.0 / (2.0 - 2.0 * params.a))
}

/// Sign change of `G` located by bisection on `G` itself.
pub fn r0_bisection(params: &ProblemParams) -> Option<f64> {
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    let mut steps = 0;
    while !(g_of_r(params, lo) > 0.0) {
        lo *= 0.5;
        steps += 1;
        if steps > 1000 || lo == 0.0 {
            return None;
        }
    }
    while g_of_r(params, hi) > 0.0 {
        hi *= 2.0;
        steps += 1;
        if steps > 1000 || hi.is_infinite() {
            return None;
        }
    }
    for _ in 0..400 {
        let mid = (lo * hi).sqrt();
        if g_of_r(params, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// The positivity conditions the monotonicity argument rests on:
/// `d + 2a - sigma > 0`, `sigma/2 - 1 > 0`, and the endpoint conditions
/// `sigma/2 - a > 0`, `1 - 2a + sigma/2 > 0`.
pub fn preflight(params: &ProblemParams) -> Result<(), PohozaevError> {
    let s = sigma(params);
    let checks = [
        ("d+2a-sigma>0", params.dim() + 2.0 * params.a - s),
        ("sigma/2-1>0", s / 2.0 - 1.0),
        ("sigma/2-a>0", s / 2.0 - params.a),
        ("1-2a+sigma/2>0", 1.0 - 2.0 * params.a + s / 2.0),
    ];
    for (name, value) in checks {
        if !(value > 0.0) {
            return Err(PohozaevError::Preflight { name, value });
        }
    }
    Ok(())
}

/// Radius below which [`verify_dj`] skips nodes: `1e-3` in the natural
/// length unit `omega^{-1/(2-2a)}`. Near the origin `J ~ r^{sigma-2}` and
/// `G u^2 ~ r^{sigma-3}` are not smooth, so difference quotients on the
/// first cells do not improve under refinement.
pub fn dj_check_radius(params: &ProblemParams) -> f64 {
    1e-3 * params.omega.powf(-1.0 / (2.0 - 2.0 * params.a))
}

/// `max |dJ/dr - G u^2| / max |G u^2|` over interior nodes with
/// `r >= dj_check_radius`, with `dJ/dr` from centered differences of
/// sampled `J`.
pub fn verify_dj(params: &ProblemParams, profile: &RadialProfile) -> f64 {
    let r = profile.radii();
    let j = j_of_r(params, profile);
    let n = r.len();
    if n < 3 {
        return f64::NAN;
    }
    let r_min = dj_check_radius(params);
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for i in (1..n - 1).filter(|&i| r[i] >= r_min) {
        let dj = centered_derivative(r, &j, i);
        let gu2 = g_of_r(params, r[i]) * profile.u[i] * profile.u[i];
        num = num.max((dj - gu2).abs());
        den = den.max(gu2.abs());
    }
    num / den.max(f64::MIN_POSITIVE)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PohozaevDiagnostics {
    pub sigma: f64,
    pub radii: Vec<f64>,
    pub j: Vec<f64>,
    pub g: Vec<f64>,
    pub u: Vec<f64>,
    pub dj_dr_residual: f64,
    pub r0: f64,
    pub r0_bisection: Option<f64>,
    pub j_max: f64,
    pub j_min: f64,
    /// `J` at the first and last node.
    pub j_limits: (f64, f64),
    /// `J` from the origin series at `r = min(r_start, 1e-12)`, a probe of
    /// the limit `r -> 0`.
    pub j_origin_probe: f64,
    /// Radius of the largest sampled `J`.
    pub j_argmax: f64,
}

impl PohozaevDiagnostics {
    /// `G > 0` at nodes below `r0` and `G < 0` above.
    pub fn g_sign_pattern_ok(&self) -> bool {
        self.radii
            .iter()
            .zip(&self.g)
            .all(|(&r, &g)| if r < self.r0 { g > 0.0 } else if r > self.r0 { g < 0.0 } else { true })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,J,G,u\n");
        for i in 0..self.radii.len() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                fmt17(self.radii[i]),
                fmt17(self.j[i]),
                fmt17(self.g[i]),
                fmt17(self.u[i])
            );
        }
        out
    }

    pub fn report(&self) -> KvReport {
        let mut r = KvReport::new();
        r.push("sigma", self.sigma)
            .push("r0", self.r0)
            .push("r0_bisection", self.r0_bisection.unwrap_or(f64::NAN))
            .push("J_max", self.j_max)
            .push("J_min", self.j_min)
            .push("J_argmax", self.j_argmax)
            .push("J_at_r_start", self.j_limits.0)
            .push("J_at_r_max", self.j_limits.1)
            .push("J_origin_probe", self.j_origin_probe)
            .push("dJdr_residual", self.dj_dr_residual);
        r
    }
}

fn origin_probe(params: &ProblemParams, profile: &RadialProfile) -> Result<f64, PohozaevError> {
    let r = profile.r_start().min(1e-12);
    let (u, du) = series_start(params, profile.beta, r).map_err(|_| PohozaevError::BadProfile)?;
    Ok(j_value(params, r, u, du))
}

pub fn diagnostics(params: &ProblemParams, profile: &RadialProfile) -> Result<PohozaevDiagnostics, PohozaevError> {
    if profile.len() < 3 || !profile.is_positive() {
        return Err(PohozaevError::BadProfile);
    }
    preflight(params)?;
    let radii = profile.radii().to_vec();
    let j = j_of_r(params, profile);
    let g: Vec<f64> = radii.iter().map(|&r| g_of_r(params, r)).collect();
    let (imax, &j_max) = j
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let j_min = j.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(PohozaevDiagnostics {
        sigma: sigma(params),
        dj_dr_residual: verify_dj(params, profile),
        r0: r0_closed_form(params),
        r0_bisection: r0_bisection(params),
        j_max,
        j_min,
        j_limits: (j[0], j[j.len() - 1]),
        j_origin_probe: origin_probe(params, profile)?,
        j_argmax: radii[imax],
        u: profile.u.clone(),
        radii,
        j,
        g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_ode::RadialGrid;
    use proptest::prelude::*;

    fn reference() -> ProblemParams {
        ProblemParams::new(2, 0.5, 1.0, 3.0)
    }

    #[test]
    fn printed_weights_at_one() {
        let p = reference();
        assert!((sigma(&p) - 2.8).abs() < 1e-15);
        let w = weights(&p, 1.0);
        assert_eq!(w.a, 1.0);
        assert!((w.b - 0.6).abs() < 1e-15);
        assert!((w.c - 0.12).abs() < 1e-14);
        let r = 3.7;
        assert!((weights(&p, r).a / w.a - r.powf(2.8)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn weights_solve_linear_system(d in 2u32..6, a in 0.01f64..0.99, t in 0.0f64..1.0, r in 0.01f64..20.0) {
            let params = ProblemParams::new(d, a, 1.0, 2.0);
            let upper = params.critical_exponent().value().min(12.0);
            let params = ProblemParams { p: 2.0 + 1e-3 + t * (upper - 2.0 - 2e-3), ..params };
            let w = weights(&params, r);
            for res in weight_constraints(&params, r) {
                let scale = w.a / r.powf(2.0 * a + 1.0) + w.a / r + w.b;
                prop_assert!(res.abs() <= 1e-12 * scale, "res={res}");
            }
        }

        #[test]
        fn window_conditions_hold(d in 3u32..6, a in 0.01f64..0.99, t in 0.001f64..0.999) {
            // for d >= 3 every admissible p passes the preflight
            let crit = crate::params::critical_exponent(d, a).value().min(50.0);
            let params = ProblemParams::new(d, a, 1.0, 2.0 + t * (crit - 2.0));
            prop_assert!(params.validate().is_ok());
            prop_assert!(preflight(&params).is_ok());
        }
    }

    #[test]
    fn preflight_fails_in_low_weight_planar_case() {
        // d = 2 needs a > 1/(1+p) for sigma > 2
        let params = ProblemParams::new(2, 0.2, 1.0, 3.0);
        assert!(params.validate().is_ok());
        assert!(matches!(
            preflight(&params),
            Err(PohozaevError::Preflight { name: "sigma/2-1>0", .. })
        ));
        assert!(preflight(&ProblemParams::new(2, 0.3, 1.0, 3.0)).is_ok());
    }

    #[test]
    fn g_signs_and_r0() {
        let p = reference();
        assert!(g_of_r(&p, 1e-3) > 0.0);
        assert!(g_of_r(&p, 50.0) < 0.0);
        let r0 = r0_closed_form(&p);
        assert!(g_of_r(&p, r0).abs() < 1e-14);
        let rb = r0_bisection(&p).unwrap();
        assert!((rb - r0).abs() <= 1e-12 * r0);
        // closed form: c1 = 1.5/5, c2 = 0.6 * 0.2 * 0.4, r0 = (c2/c1)^{1/(2-2a)} = 0.16
        assert!((r0 - 0.16).abs() < 1e-14);
    }

    // equilibrium u = 1 at omega = 1: J = C/2 - A/(2 r^{2a}) + A/(p r^{2a}),
    // differentiated in closed form, equals G
    #[test]
    fn equilibrium_dj_equals_g() {
        for &(d, a, pp) in &[(2u32, 0.5, 3.0), (3, 0.25, 3.5), (4, 0.7, 2.6)] {
            let params = ProblemParams::new(d, a, 1.0, pp);
            let s = sigma(&params);
            let k = bc_prefactor(&params) * (params.dim() + 2.0 * a - s);
            let coef = 1.0 / pp - 0.5;
            for &r in &[0.1, 0.7, 2.0, 9.0] {
                let j = j_value(&params, r, 1.0, 0.0);
                let closed = 0.5 * k * r.powf(s - 2.0) + coef * r.powf(s - 2.0 * a);
                assert!((j - closed).abs() < 1e-12 * closed.abs().max(1.0));
                let dj = 0.5 * k * (s - 2.0) * r.powf(s - 3.0) + coef * (s - 2.0 * a) * r.powf(s - 2.0 * a - 1.0);
                let g = g_of_r(&params, r);
                assert!((dj - g).abs() < 1e-12 * g.abs().max(1e-3), "d={d} a={a} r={r}");
            }
        }
    }

    #[test]
    fn corrupted_profile_breaks_dj() {
        let p = reference();
        let grid = RadialGrid::uniform(0.5, 3.0, 400).unwrap();
        let radii = grid.nodes().to_vec();
        let mut prof = RadialProfile {
            grid,
            u: vec![1.0; radii.len()],
            du: vec![0.0; radii.len()],
            beta: 1.0,
            tail: None,
        };
        assert!(verify_dj(&p, &prof) < 1e-3);
        prof.u[200] = 1.05;
        assert!(verify_dj(&p, &prof) > 1.0);
    }

    #[test]
    fn csv_header() {
        let p = reference();
        let grid = RadialGrid::uniform(0.1, 1.0, 4).unwrap();
        let prof = RadialProfile {
            grid,
            u: vec![1.0; 4],
            du: vec![0.0; 4],
            beta: 1.0,
            tail: None,
        };
        let diag = diagnostics(&p, &prof).unwrap();
        let csv = diag.to_csv();
        assert!(csv.starts_with("r,J,G,u\n"));
        assert_eq!(csv.lines().count(), 5);
    }
}
