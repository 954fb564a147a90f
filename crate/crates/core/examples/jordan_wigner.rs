//! Fermionic Hamiltonian as a qubit operator, with its conserved plaquettes.

use majorana_core::fermion::{build_h, conserved_set, jw_order, ModelParams};
use majorana_core::lattice::{build_lattice, Boundary};

fn main() -> majorana_core::Result<()> {
    let lat = build_lattice(2, Boundary::Torus)?;
    let order = jw_order(&lat)?;
    let h = build_h(&lat, &ModelParams::new(1.0, 0.2), &order)?;
    println!("{} modes on {} qubits, {} Pauli terms", order.num_modes(), order.num_qubits(), h.len());

    let cs = conserved_set(&lat, &order)?;
    for (i, c) in cs.white.iter().enumerate() {
        println!("white {i}: {} commutes with H: {}", c.word(), h.commutes_with(c));
    }
    for (i, c) in cs.gray.iter().enumerate() {
        println!("gray  {i}: {} commutes with H: {}", c.word(), h.commutes_with(c));
    }
    Ok(())
}
