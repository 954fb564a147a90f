//! Sector-resolved spectrum and the sector holding the global ground state.

use majorana_core::fermion::{build_h, conserved_set, jw_order, ModelParams};
use majorana_core::lattice::{build_lattice, Boundary};
use majorana_core::sector::{ground_sector_scan, spectra, SectorLabel};

fn main() -> majorana_core::Result<()> {
    let lat = build_lattice(2, Boundary::Torus)?;
    let order = jw_order(&lat)?;
    let cs = conserved_set(&lat, &order)?;
    let h = build_h(&lat, &ModelParams::new(1.0, 0.1), &order)?;
    let labels: Vec<SectorLabel> = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
        .iter()
        .map(|&(a, b)| SectorLabel::all_plus(cs.white.len(), cs.gray.len()).with_loops(a, b))
        .collect();
    let r = spectra(&h, &cs, &labels, Some(3))?;
    print!("{}", r.to_csv());

    for p in ground_sector_scan(&lat, 1.0, &[0.1, 0.3])? {
        println!("lambda/Delta = {}: E0 = {:.10} in {:?}", p.ratio, p.energy, p.labels);
    }
    Ok(())
}
