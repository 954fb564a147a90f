//! A weak intra-island coupling i eps c_p c_q acts as a single-qubit term.

use majorana_core::lattice::single_plaquette_cluster;
use majorana_core::perturbation::epsilon_projection;

fn main() -> majorana_core::Result<()> {
    let lat = single_plaquette_cluster()?;
    for letters in [('a', 'b'), ('a', 'c'), ('a', 'd'), ('b', 'c'), ('b', 'd'), ('c', 'd')] {
        let p = epsilon_projection(&lat, 1, letters, 0.01)?;
        let terms: Vec<String> = p.iter().map(|(c, w)| format!("{:+.3} {}", c.re, w.word())).collect();
        println!("i eps c_{} c_{} -> {}", letters.0, letters.1, terms.join(" "));
    }
    Ok(())
}
