//! Lowest eigenvalues of the linearized operator for the first spherical
//! harmonics, with the Sturm count at zero as a certificate of the single
//! negative direction.

use dgs::shooting::{auto_bracket, find_ground_state, ShootingConfig};
use dgs::spectrum::{assemble, eigen_lowest, morse_witness, sturm_count, HarmonicIndex};
use dgs::ProblemParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ProblemParams::new(2, 0.5, 1.0, 3.0);
    let cfg = ShootingConfig::graded(1e-6, 30.0, 4096)?;
    let res = find_ground_state(&params, auto_bracket(&params, &cfg)?, 1e-12, &cfg)?;
    for k in 0..3 {
        let op = assemble(&res.profile, &params, HarmonicIndex::new(k))?;
        let rep = eigen_lowest(&op, 4, 1e-10)?;
        println!(
            "k = {k}: eigenvalues {:?}, sign changes {:?}, below zero {}",
            rep.eigenvalues.iter().map(|l| format!("{l:.6}")).collect::<Vec<_>>(),
            rep.sign_changes,
            sturm_count(&op.diag, &op.off, &op.mass, 0.0)
        );
        if k == 0 {
            println!("<L+ u, u> = {:.6}", morse_witness(&op, &res.profile));
        }
    }
    Ok(())
}
