//! Effective toric code: degeneracy, logical operators and a hole.

use majorana_core::toric::{degeneracy, hole_report, logical_ops, toric_stabilizers};

fn main() -> majorana_core::Result<()> {
    for l in 2..=6 {
        let m = toric_stabilizers(l, &[])?;
        println!(
            "L={l}: {} plaquettes on {} qubits, degeneracy {}",
            m.terms.len(),
            m.num_qubits,
            degeneracy(&m)?.value()
        );
    }
    for (x, z) in logical_ops(&toric_stabilizers(4, &[])?)? {
        println!("logical pair {} / {}", x.word(), z.word());
    }

    let h = hole_report(4, 5)?;
    println!(
        "hole at white {}: {} terms removed, degeneracy {} -> {}, loop around the hole is a stabilizer: {}",
        h.white,
        h.removed.len(),
        h.baseline,
        h.degeneracy,
        h.loop_is_stabilizer
    );
    for (a, b) in &h.logical_pairs {
        println!("  {a} / {b}");
    }
    Ok(())
}
