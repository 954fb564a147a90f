//! The fermion spectrum in the all-plus white sector is a union of parity-constrained
//! transverse-field Ising spectra, one per gauge class.

use majorana_core::ising_map::{frustration_analysis, GaugeConfig};
use majorana_core::ising_solver::{equivalence_check, pm_effective_gauge};
use majorana_core::lattice::{build_lattice, Boundary};

fn main() -> majorana_core::Result<()> {
    let lat = build_lattice(2, Boundary::Torus)?;
    let r = equivalence_check(&lat, 1.0, 0.2)?;
    println!(
        "{} fermion levels vs {} Ising levels from {} classes, max deviation {:.2e}",
        r.fermion_levels,
        r.ising_levels,
        r.classes.len(),
        r.max_deviation
    );

    // two sign flips on one site leave the class unchanged; a single edge flip frustrates
    let mut g = GaugeConfig::ferromagnetic(&lat);
    g.flip_site(&lat, 0);
    println!("site flip: {:?}", frustration_analysis(&lat, &g)?);
    let mut g = GaugeConfig::ferromagnetic(&lat);
    g.sigma[0] = -1;
    g.sigma[1] = -1;
    let e = pm_effective_gauge(&lat, &g, 1.0, 0.1)?;
    println!("two edges of a white square: {:?}, energy above ferromagnet {:.3e}", e.class, e.energy);
    Ok(())
}
