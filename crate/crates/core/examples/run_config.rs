//! Running an experiment from a JSON config, as the `majorana` binary does.

use majorana_core::runner::{run_experiment, Experiment, ExperimentConfig};

fn main() -> majorana_core::Result<()> {
    let cfg = ExperimentConfig::from_json(
        r#"{
            "experiment": "seam",
            "lattice": { "sizes": [2, 3] },
            "model": { "lambda": [0.15, 1.0] }
        }"#,
    )?;
    let out = std::env::temp_dir().join("majorana-seam");
    let r = run_experiment(&cfg, Experiment::Seam, &out)?;
    println!("{}", r.summary);
    for f in &r.files {
        println!("wrote {}", f.display());
    }
    print!("{}", std::fs::read_to_string(out.join("seam.csv"))?);
    Ok(())
}
