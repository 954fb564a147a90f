//! Fourth-order plaquette term on one cluster, and the lambda^4 scaling on the torus.

use majorana_core::lattice::{build_lattice, single_plaquette_cluster, Boundary};
use majorana_core::perturbation::{coefficient_fit, self_energy};

fn main() -> majorana_core::Result<()> {
    let cluster = single_plaquette_cluster()?;
    let r = self_energy(&cluster, 1.0, 0.05)?;
    println!("order 2: identity {:.3e}, residual {:.1e}", r.order2_identity, r.order2_residual);
    println!("order 3: largest coefficient {:.1e}", r.order3_norm);
    println!(
        "order 4: plaquette coefficient * Delta^3 / lambda^4 = {:.12} (-5/16 = {})",
        r.normalized_coefficient,
        -5.0 / 16.0
    );
    println!("         projected plaquette {:?}", r.plaquette_words);

    let lat = build_lattice(2, Boundary::Torus)?;
    let fit = coefficient_fit(&lat, 1.0, &[0.02, 0.03, 0.04, 0.05, 0.06])?;
    println!(
        "torus: plaquette gap ~ lambda^{:.3}, ground splitting ~ lambda^{:.3}",
        fit.gap_fit.exponent, fit.splitting_fit.exponent
    );
    Ok(())
}
