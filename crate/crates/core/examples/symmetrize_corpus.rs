//! Polarization and rearrangement on a few random fields: Lebesgue norms are
//! preserved exactly and the weighted Dirichlet energy does not grow beyond
//! the lattice tolerance.

use dgs::symmetrize::{corpus_row, polarization_sweeps, random_smooth_field, rearrangement_tolerance};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (n, extent, a, p) = (128, 4.0, 0.5, 3.0);
    println!("seed  lp change (H)  D defect (H)  lp change (*)  D excess (*)");
    for seed in 0..8 {
        let row = corpus_row(seed, 2, n, extent, a, p)?;
        println!(
            "{seed:>4}  {:>13.2e}  {:>12.2e}  {:>13.2e}  {:>12.4}",
            row.polarization_lp_change, row.polarization_dirichlet_defect, row.rearrangement_lp_change, row.rearrangement_excess
        );
    }
    println!("rearrangement tolerance {:.4}", rearrangement_tolerance(n));
    let sweeps = polarization_sweeps(&random_smooth_field(2, n, extent, 3)?, 5)?;
    println!("l2 distance to the rearrangement over polarization sweeps: {sweeps:.4?}");
    Ok(())
}
