//! Energy cost of an antiperiodic seam in the Ising model, paramagnet against ferromagnet.

use majorana_core::ising_solver::{log_linear_fit, seam_splitting};

fn main() -> majorana_core::Result<()> {
    for ratio in [0.15, 1.0] {
        let pts: Vec<_> = (2..=4).map(|n| seam_splitting(n, n, ratio)).collect::<Result<_, _>>()?;
        for p in &pts {
            println!("lambda/Delta = {ratio}: n = {} splitting {:.4e}", p.rows, p.splitting);
        }
        let (_, slope, dev) = log_linear_fit(&[2.0, 3.0, 4.0], &pts.iter().map(|p| p.splitting).collect::<Vec<_>>())?;
        println!("  ln splitting slope {slope:.3}, worst relative deviation {dev:.2e}");
    }
    Ok(())
}
