//! The Pohozaev quantity J(r) along the ground state: it vanishes at both
//! ends, stays nonnegative, and its derivative G u^2 changes sign once at r0.

use dgs::pohozaev::{diagnostics, preflight, sigma};
use dgs::shooting::{auto_bracket, find_ground_state, ShootingConfig};
use dgs::ProblemParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ProblemParams::new(2, 0.5, 1.0, 3.0);
    preflight(&params)?;
    println!("sigma = {}", sigma(&params));
    let cfg = ShootingConfig::graded(1e-12, 30.0, 4096)?;
    let res = find_ground_state(&params, auto_bracket(&params, &cfg)?, 1e-12, &cfg)?;
    let d = diagnostics(&params, &res.profile)?;
    print!("{}", d.report());
    let step = d.radii.len() / 16;
    for i in (0..d.radii.len()).step_by(step) {
        println!("r {:>12.6e}  J {:>12.6e}  G {:>12.6e}", d.radii[i], d.j[i], d.g[i]);
    }
    Ok(())
}
