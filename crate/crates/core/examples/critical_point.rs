//! Fidelity-susceptibility estimate of the Ising critical coupling.

use majorana_core::ising_solver::{critical_estimate, fidelity_scan};

fn main() -> majorana_core::Result<()> {
    let chain: Vec<f64> = (0..=40).map(|i| 0.7 + 0.015 * i as f64).collect();
    let s = fidelity_scan(1, 12, &chain)?;
    println!("12-site chain: peak at J/h = {:?} (exact 1)", s.peak());

    let grid: Vec<f64> = (0..=12).map(|i| 0.28 + 0.015 * i as f64).collect();
    let est = critical_estimate(&[(3, 3)], &grid).err();
    println!("one size is not enough: {est:?}");
    let est = critical_estimate(&[(2, 2), (3, 3)], &grid)?;
    for s in &est.scans {
        println!("{}x{}: susceptibility peak {:?}, gap minimum {:?}", s.rows, s.cols, s.peak(), s.gap_minimum());
    }
    println!("lambda/Delta at criticality ~ {:.3} +- {:.3}", est.estimate, est.uncertainty);
    Ok(())
}
