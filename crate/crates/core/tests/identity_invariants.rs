//! Integral identities of the ground state and the Pohozaev apparatus.

mod common;

use common::*;
use dgs::pohozaev::{self, dj_check_radius, g_of_r, j_of_r, preflight, r0_bisection, r0_closed_form, sigma};
use dgs::quadrature::centered_derivative;
use dgs::variational::{functionals, predicted_ratios};
use dgs::{ProblemParams, RadialProfile};
use proptest::prelude::*;

fn scaled(profile: &RadialProfile, t: f64) -> RadialProfile {
    RadialProfile {
        u: profile.u.iter().map(|v| t * v).collect(),
        du: profile.du.iter().map(|v| t * v).collect(),
        beta: t * profile.beta,
        tail: profile.tail.map(|mut f| {
            f.amplitude *= t;
            f
        }),
        ..profile.clone()
    }
}

/// Any valid `(d, a, p)` with `omega = 1`.
fn valid_params() -> impl Strategy<Value = ProblemParams> {
    (2u32..6, 0.01f64..0.99, 0.001f64..0.999).prop_map(|(d, a, frac)| {
        let crit = dgs::params::critical_exponent(d, a).value().min(40.0);
        ProblemParams::new(d, a, 1.0, 2.0 + frac * (crit - 2.0))
    })
}

#[test]
fn functionals_are_positive_and_match_the_predicted_ratios() {
    let params = reference_params();
    let f = functionals(&reference().profile, &params).unwrap();
    assert!(f.kinetic > 0.0 && f.mass > 0.0 && f.power > 0.0);
    // Nehari K + omega M = P and the dilation identity fix K / P and omega M / P.
    let (d, a, p) = (params.dim(), params.a, params.p);
    let k_ratio = d * (0.5 - 1.0 / p) / (1.0 - a);
    let (pk, pm) = predicted_ratios(&params);
    assert!((pk - k_ratio).abs() < 1e-15 && (pm - (1.0 - k_ratio)).abs() < 1e-15);
    assert!((f.kinetic / f.power - k_ratio).abs() < 1e-8, "K/P = {}", f.kinetic / f.power);
    assert!((params.omega * f.mass / f.power - (1.0 - k_ratio)).abs() < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn weinstein_quotient_is_scale_invariant(t in 0.05f64..20.0) {
        let params = reference_params();
        let base = functionals(&reference().profile, &params).unwrap();
        let f = functionals(&scaled(&reference().profile, t), &params).unwrap();
        prop_assert!((f.weinstein / base.weinstein - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ground_state_maximizes_energy_on_its_fibre(t in 0.0f64..4.0) {
        let f = functionals(&reference().profile, &reference_params()).unwrap();
        prop_assert!(f.energy_at_scale(t) <= f.energy_at_scale(1.0) + 1e-9 * f.energy.abs());
        prop_assert!((f.fibre_maximum() - f.energy).abs() <= 1e-8 * f.energy.abs());
    }

    #[test]
    fn sigma_window_conditions(params in valid_params()) {
        let (d, a, p) = (params.dim(), params.a, params.p);
        let s = sigma(&params);
        prop_assert!(d + 2.0 * a - s > 0.0);
        // sigma/2 - 1 > 0 fails exactly in d = 2 with a <= 1 / (1 + p)
        let window = params.d > 2 || a > 1.0 / (1.0 + p);
        prop_assert_eq!(s / 2.0 - 1.0 > 0.0, window);
        prop_assert_eq!(preflight(&params).is_ok(), window);
    }

    #[test]
    fn g_changes_sign_once_at_r0(params in valid_params()) {
        prop_assume!(preflight(&params).is_ok());
        let r0 = r0_closed_form(&params);
        prop_assert!(r0 > 0.0);
        // near a = 1 and p = 2 the sign-change radius leaves the range where
        // G itself is representable
        prop_assume!((1e-30..1e30).contains(&r0));
        let b = r0_bisection(&params).unwrap();
        prop_assert!((b - r0).abs() <= 1e-9 * r0);
        for f in [1e-3, 0.1, 0.5, 0.9] {
            prop_assert!(g_of_r(&params, f * r0) > 0.0);
        }
        for f in [1.1, 2.0, 10.0, 1e3] {
            prop_assert!(g_of_r(&params, f * r0) < 0.0);
        }
    }
}

#[test]
fn j_derivative_follows_the_sign_of_g() {
    let params = reference_params();
    let prof = &reference().profile;
    let r = prof.radii();
    let j = j_of_r(&params, prof);
    let r0 = r0_closed_form(&params);
    let j_max = j.iter().fold(0.0f64, |m, v| m.max(*v));
    let mut checked = 0;
    for i in 1..r.len() - 1 {
        let gu2 = g_of_r(&params, r[i]) * prof.u[i] * prof.u[i];
        // skip the origin layer, the neighbourhood of r0 and the flat far tail
        if r[i] < dj_check_radius(&params) || (r[i] / r0 - 1.0).abs() < 0.05 || gu2.abs() < 1e-8 * j_max {
            continue;
        }
        let dj = centered_derivative(r, &j, i);
        assert_eq!(dj > 0.0, gu2 > 0.0, "r = {}: dJ/dr {dj:e}, G u^2 {gu2:e}", r[i]);
        checked += 1;
    }
    assert!(checked > 1000);
}

#[test]
fn j_is_nonnegative_and_not_identically_zero() {
    let params = reference_params();
    let diag = pohozaev::diagnostics(&params, &reference().profile).unwrap();
    assert!(diag.j_max > 0.0);
    assert!(diag.j_min >= -1e-8 * diag.j_max);
    assert!(diag.g_sign_pattern_ok());
}
