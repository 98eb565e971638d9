//! Classifies a logarithmic range of shooting heights: every trajectory
//! below the ground-state height turns upward, every one above crosses zero.

use dgs::shooting::{auto_bracket, classification_transitions, log_spaced, scan_beta, ShootingConfig};
use dgs::ProblemParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ProblemParams::new(2, 0.5, 1.0, 3.0);
    let cfg = ShootingConfig::graded(1e-6, 30.0, 2048)?;
    let (low, high) = auto_bracket(&params, &cfg)?;
    let scan = scan_beta(&params, &log_spaced(0.5 * low, 2.0 * high, 24), &cfg)?;
    for e in &scan {
        println!("beta {:>12.6}  {:<9}  {:<13} at r = {:.4}", e.beta, e.classification.as_str(), e.event.kind.as_str(), e.event.radius);
    }
    println!("transitions: {}", classification_transitions(&scan));
    Ok(())
}
