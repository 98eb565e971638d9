//! Shoots for the ground state of the reference problem and prints the
//! shooting summary together with a few profile samples.

use dgs::shooting::{auto_bracket, find_ground_state, ShootingConfig};
use dgs::ProblemParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ProblemParams::new(2, 0.5, 1.0, 3.0).validate()?;
    let cfg = ShootingConfig::graded(1e-6, 30.0, 4096)?;
    let bracket = auto_bracket(&params, &cfg)?;
    let res = find_ground_state(&params, bracket, 1e-12, &cfg)?;
    print!("{}", res.report());
    let r = res.profile.radii();
    for target in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let i = r.iter().position(|&x| x >= target).unwrap_or(r.len() - 1);
        println!("u({:.4}) = {:.10}", r[i], res.profile.u[i]);
    }
    Ok(())
}
