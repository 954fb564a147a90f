//! Unpaired corner modes of an open patch double every level.

use majorana_core::fermion::{build_h, jw_order, ModelParams};
use majorana_core::lattice::{build_open_patch, BoundaryLinks};
use majorana_core::sector::level_multiplicities;

fn main() -> majorana_core::Result<()> {
    let lat = build_open_patch(2, 2, BoundaryLinks::Corners)?;
    let order = jw_order(&lat)?;
    for (d, l) in [(1.0, 0.1), (1.0, 0.5), (0.3, 1.0), (2.0, 0.7), (1.5, 0.2), (0.0, 1.0)] {
        let levels = level_multiplicities(&build_h(&lat, &ModelParams::new(d, l), &order)?)?;
        let smallest = levels.iter().map(|x| x.1).min().unwrap();
        println!("Delta={d} lambda={l}: E0 = {:.8} x{}, smallest multiplicity {smallest}", levels[0].0, levels[0].1);
    }
    Ok(())
}
