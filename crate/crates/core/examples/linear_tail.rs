//! Far-field decay of the linearized problem for a = 0.25, where the
//! stretched exponent sqrt(omega)/(1-a) applies.

use dgs::shooting::{auto_bracket, find_ground_state, ShootingConfig};
use dgs::spectrum::{assemble, eigen_lowest, linearized_tail_check, HarmonicIndex};
use dgs::ProblemParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ProblemParams::new(2, 0.25, 1.0, 3.0);
    let cfg = ShootingConfig::graded(1e-6, 30.0, 4096)?;
    let res = find_ground_state(&params, auto_bracket(&params, &cfg)?, 1e-12, &cfg)?;
    let op = assemble(&res.profile, &params, HarmonicIndex::new(0))?;
    let rep = eigen_lowest(&op, 4, 1e-10)?;
    let t = linearized_tail_check(&rep, &params, &res.profile)?;
    println!("zero mode: kappa {:.4} (expected {:.4}), sigma {:.4} (WKB {:.4})", t.kappa, t.expected_kappa, t.sigma, t.wkb_sigma);
    println!(
        "eigenvector at lambda = {:.4}: fitted kappa {:.4}, free-space rate {:.4}",
        t.eigenvalue, t.eigen_fit.stretched_exponent, t.eigen_kappa
    );
    Ok(())
}
