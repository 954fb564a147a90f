//! Every plaquette sector of the same parity carries the same spectrum. Slow (about a minute).

use majorana_core::lattice::{build_lattice, Boundary};
use majorana_core::sector::projecting_back_check;

fn main() -> majorana_core::Result<()> {
    let lat = build_lattice(2, Boundary::Torus)?;
    let r = projecting_back_check(&lat, 1.0, 0.3)?;
    println!(
        "{} reference levels, {} even-parity levels, multiplicity {}",
        r.reference_levels, r.parity_levels, r.multiplicity
    );
    println!("max deviation {:.2e}, smallest sector overlap {:.4}", r.max_deviation, r.min_overlap);
    println!("violations: {:?}", r.violations());
    Ok(())
}
