//! Island lattice on the torus and on an open patch.

use majorana_core::lattice::{build_lattice, build_open_patch, Boundary, BoundaryLinks, SignMode};

fn main() -> majorana_core::Result<()> {
    let lat = build_lattice(3, Boundary::Torus)?;
    println!(
        "L=3 torus: {} islands, {} links, {} white and {} gray plaquettes",
        lat.num_islands(),
        lat.links().len(),
        lat.white().len(),
        lat.gray().len()
    );
    let (a, b) = lat.homology_loops()?;
    println!("loops: {} links winding {:?}, {} links winding {:?}", a.links.len(), a.winding, b.links.len(), b.winding);

    let random = lat.assign_link_signs(&SignMode::Random(7))?;
    let flipped = random.signs().iter().filter(|&&s| s < 0).count();
    println!("seed 7 flips {flipped} of {} link signs", random.links().len());

    let patch = build_open_patch(2, 2, BoundaryLinks::Corners)?;
    println!("2x2 open patch: unlinked corner modes {:?}", patch.unlinked_modes());
    Ok(())
}
