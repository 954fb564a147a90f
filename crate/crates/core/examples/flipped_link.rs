//! Ground manifold of the toric code after flipping the sign of one link.

use majorana_core::toric::frustrated_ground_manifold;

fn main() -> majorana_core::Result<()> {
    for l in [2, 3] {
        let r = frustrated_ground_manifold(l, &[0])?;
        println!(
            "L={l}: plaquettes {:?} change sign, E0 = {}, {} states ({} syndromes x {})",
            r.flipped_plaquettes, r.energy, r.ground_states, r.minimizing_syndromes, r.states_per_syndrome
        );
        let c = &r.comparison;
        println!(
            "  claim: {} states at {}; here {} states at {} in those units",
            c.claimed_states, c.claimed_energy, r.ground_states, c.energy_in_claim_units
        );
    }
    let r = frustrated_ground_manifold(3, &[0, 1])?;
    println!("two flips on one white square: E0 = {}, {} states", r.energy, r.ground_states);
    Ok(())
}
