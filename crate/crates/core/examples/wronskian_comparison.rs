//! Two trajectories started just below and just above the ground-state
//! height, and the Wronskian identity that links them.

use dgs::radial_ode::integrate;
use dgs::shooting::{auto_bracket, comparison_quantity, find_ground_state, wronskian_identity_residual, ShootingConfig};
use dgs::ProblemParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ProblemParams::new(2, 0.5, 1.0, 3.0);
    let cfg = ShootingConfig::graded(1e-6, 30.0, 4096)?;
    let beta = find_ground_state(&params, auto_bracket(&params, &cfg)?, 1e-12, &cfg)?.beta_star;
    let (u, ev_u) = integrate(&params, beta * 0.99, &cfg.grid, &cfg.controller)?;
    let (v, ev_v) = integrate(&params, beta * 1.01, &cfg.grid, &cfg.controller)?;
    println!("low start: {} at r = {:.4}", ev_u.kind.as_str(), ev_u.radius);
    println!("high start: {} at r = {:.4}", ev_v.kind.as_str(), ev_v.radius);
    let len = u
        .u
        .iter()
        .zip(&v.u)
        .position(|(a, b)| !(*a > 0.0 && *b > 0.0))
        .unwrap_or(u.len().min(v.len()));
    let (u, v) = (u.truncated(len), v.truncated(len));
    println!("Wronskian identity residual {:.3e}", wronskian_identity_residual(&u, &v, &params)?);
    println!("comparison consistency {:.3e}", comparison_quantity(&u, &v, &params)?.consistency());
    Ok(())
}
