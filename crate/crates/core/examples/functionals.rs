//! Kinetic, mass and power integrals of the ground state, the Nehari and
//! dilation identities, and the energy along the fibre t -> t u.

use dgs::shooting::{auto_bracket, find_ground_state, ShootingConfig};
use dgs::variational::{functionals, predicted_ratios};
use dgs::ProblemParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ProblemParams::new(2, 0.5, 1.0, 3.0);
    let cfg = ShootingConfig::graded(1e-6, 30.0, 4096)?;
    let res = find_ground_state(&params, auto_bracket(&params, &cfg)?, 1e-12, &cfg)?;
    let f = functionals(&res.profile, &params)?;
    print!("{}", f.report());
    let (k, m) = predicted_ratios(&params);
    println!("K/P = {:.10} (predicted {k:.10})", f.kinetic / f.power);
    println!("omega M/P = {:.10} (predicted {m:.10})", params.omega * f.mass / f.power);
    for t in [0.5, 0.9, 1.0, 1.1, 1.5] {
        println!("E[{t} u] = {:.10}", f.energy_at_scale(t));
    }
    Ok(())
}
