//! Pauli strings: products, commutation and stabilizer rank.

use majorana_core::pauli::{gf2_rank, OperatorSum, PauliString};

fn main() -> majorana_core::Result<()> {
    let n = 4;
    let xx = PauliString::from_sparse(n, &[(0, 'X'), (1, 'X')]);
    let zz = PauliString::from_sparse(n, &[(0, 'Z'), (1, 'Z')]);
    let zi = PauliString::z(n, 0);
    let p = xx.mul(&zz)?;
    println!("XX * ZZ = ({}) {}", p.phase(), p.word());
    println!("[XX, ZZ] = 0: {}", xx.commutes(&zz)?);
    println!("[XX, Z0] = 0: {}", xx.commutes(&zi)?);

    // Bell pair stabilizers on qubits 0,1 leave qubits 2,3 free
    let r = gf2_rank(&[xx, zz])?;
    println!("rank {}, ground space 2^{}", r.rank, r.log2_degeneracy);

    let mut h = OperatorSum::zero(n);
    h.add_real(-1.0, &xx);
    h.add_real(-1.0, &zz);
    println!("H = {}", h.to_text().trim());
    Ok(())
}
