//! Solves at omega = 1, carries the solution to omega = 4 with the scaling
//! map, and compares against a direct solve at omega = 4.

use dgs::shooting::{auto_bracket, find_ground_state, ShootingConfig};
use dgs::{ProblemParams, ScalingMap};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = ProblemParams::new(2, 0.5, 1.0, 3.0);
    let target = base.with_omega(4.0);
    let map = ScalingMap::for_params(&target);
    println!("amplitude factor {}, dilation factor {}", map.amplitude_factor, map.dilation_factor);

    let cfg = ShootingConfig::graded(1e-6, 30.0, 4096)?;
    let normalized = find_ground_state(&base, auto_bracket(&base, &cfg)?, 1e-12, &cfg)?;

    let cfg4 = ShootingConfig::new(cfg.grid.scaled(1.0 / map.dilation_factor));
    let direct = find_ground_state(&target, auto_bracket(&target, &cfg4)?, 1e-12, &cfg4)?;

    let (_, u, _) = map.transport(normalized.profile.radii(), &normalized.profile.u, &normalized.profile.du);
    let worst = u
        .iter()
        .zip(&direct.profile.u)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("transported beta* {:.13}", map.amplitude_factor * normalized.beta_star);
    println!("direct beta*      {:.13}", direct.beta_star);
    println!("max nodewise |difference| / beta* = {:.2e}", worst / direct.beta_star);
    Ok(())
}
