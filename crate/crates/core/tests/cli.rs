//! End-to-end runs of the `majorana` binary against golden outputs.
//! Set `UPDATE_GOLDEN=1` to rewrite the expected files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_majorana"))
}

fn golden_dir(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn run(name: &str, out: &Path) -> Output {
    let cfg = golden_dir(name).join("config.json");
    bin().args([name, "--config"]).arg(&cfg).arg("--out").arg(out).output().unwrap()
}

fn check_golden(name: &str) {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(name, tmp.path());
    assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["experiment"], name);
    assert_eq!(manifest["passed"], true);
    for key in ["version", "config", "wall_seconds", "timestamp"] {
        assert!(manifest.get(key).is_some(), "manifest lacks {key}");
    }
    let outputs: Vec<String> =
        manifest["outputs"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    assert!(!outputs.is_empty());
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for f in outputs {
        let got = fs::read_to_string(tmp.path().join(&f)).unwrap();
        assert!(!got.contains('\r'));
        let path = golden_dir(name).join(&f);
        if update {
            fs::write(&path, &got).unwrap();
        } else {
            let want = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {}", path.display()));
            assert_eq!(got, want, "{name}/{f} differs from golden");
        }
    }
}

#[test]
fn spectrum_golden() {
    check_golden("spectrum");
}

#[test]
fn sectors_golden() {
    check_golden("sectors");
}

#[test]
fn pt_check_golden() {
    check_golden("pt-check");
}

#[test]
fn ising_equiv_golden() {
    check_golden("ising-equiv");
}

#[test]
fn phase_scan_golden() {
    check_golden("phase-scan");
}

#[test]
fn seam_golden() {
    check_golden("seam");
}

#[test]
fn toric_golden() {
    check_golden("toric");
}

#[test]
fn lemma_check_golden() {
    check_golden("lemma-check");
}

#[test]
fn epsilon_check_golden() {
    check_golden("epsilon-check");
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(run("spectrum", a.path()).status.success());
    assert!(run("spectrum", b.path()).status.success());
    let read = |d: &Path| fs::read(d.join("spectrum.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.json");

    fs::write(&cfg, r#"{"lattice":{"L":2,"colour":"red"}}"#).unwrap();
    let o = bin().args(["spectrum", "--config"]).arg(&cfg).arg("--out").arg(tmp.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));

    fs::write(&cfg, r#"{"lattice":{"L":3}}"#).unwrap();
    let o = bin().args(["spectrum", "--config"]).arg(&cfg).arg("--out").arg(tmp.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("65536"));

    // a negative tolerance cannot be met
    fs::write(&cfg, r#"{"lattice":{"L":2},"model":{"delta":1.0,"lambda":[0.1]},"solver":{"tolerance":-1}}"#).unwrap();
    let o = bin().args(["ising-equiv", "--config"]).arg(&cfg).arg("--out").arg(tmp.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(4));
    assert!(tmp.path().join("ising-equiv.csv").exists());
}

#[test]
fn verbose_lists_files() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bin().args(["pt-check", "--verbose", "--threads", "1", "--out"]).arg(tmp.path()).output().unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("manifest.json"));
}
