//! Configuration-driven experiments behind the `majorana` binary.
//!
//! One experiment per invocation. Each writes a CSV or JSON result and a
//! `manifest.json` into the output directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::fermion::{build_h, conserved_set, jw_order, EpsilonTerm, ModelParams};
use crate::ising_solver::{critical_estimate, equivalence_check, log_linear_fit, seam_splitting};
use crate::lattice::{
    build_lattice, build_open_patch, single_plaquette_cluster, Boundary, BoundaryLinks, SignMode, SignedLattice,
};
use crate::perturbation::{epsilon_projection, self_energy};
use crate::sector::{all_fixed_labels, ground_sector_scan, projecting_back_check, spectra, SectorLabel};
use crate::toric::{degeneracy, frustrated_ground_manifold, hole_report, toric_stabilizers};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
#[derive(clap::ValueEnum)]
pub enum Experiment {
    Spectrum,
    Sectors,
    PtCheck,
    IsingEquiv,
    PhaseScan,
    Seam,
    Toric,
    LemmaCheck,
    EpsilonCheck,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::Spectrum,
        Experiment::Sectors,
        Experiment::PtCheck,
        Experiment::IsingEquiv,
        Experiment::PhaseScan,
        Experiment::Seam,
        Experiment::Toric,
        Experiment::LemmaCheck,
        Experiment::EpsilonCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::Sectors => "sectors",
            Experiment::PtCheck => "pt-check",
            Experiment::IsingEquiv => "ising-equiv",
            Experiment::PhaseScan => "phase-scan",
            Experiment::Seam => "seam",
            Experiment::Toric => "toric",
            Experiment::LemmaCheck => "lemma-check",
            Experiment::EpsilonCheck => "epsilon-check",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signs {
    Default,
    Random,
    #[serde(untagged)]
    Explicit(Vec<i8>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeConfig {
    #[serde(rename = "L")]
    pub l: usize,
    pub boundary: Boundary,
    /// `[rows, cols]` of an open patch; `[1, 1]` is the single-plaquette cluster.
    pub patch: Option<[usize; 2]>,
    pub corner_links: bool,
    pub signs: Signs,
    pub seed: u64,
    /// Removed link ids.
    pub holes: Vec<usize>,
    /// White plaquettes around which a hole is cut (toric).
    pub white_holes: Vec<usize>,
    /// Links whose sign is flipped (toric frustration).
    pub flipped_links: Vec<usize>,
    /// Linear sizes for size scans (toric degeneracy, seam lengths).
    pub sizes: Vec<usize>,
    /// `[rows, cols]` shapes for the critical-point scan.
    pub shapes: Vec<[usize; 2]>,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            l: 2,
            boundary: Boundary::Torus,
            patch: None,
            corner_links: true,
            signs: Signs::Default,
            seed: 0,
            holes: Vec::new(),
            white_holes: Vec::new(),
            flipped_links: Vec::new(),
            sizes: Vec::new(),
            shapes: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub delta: f64,
    /// Coupling grid; ratios `lambda / Delta` for the Ising-only experiments.
    pub lambda: Vec<f64>,
    pub epsilon: Vec<EpsilonTerm>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { delta: 1.0, lambda: vec![0.1], epsilon: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Lowest levels per sector, all when absent.
    pub k: Option<usize>,
    /// Pass threshold for spectral comparisons.
    pub tolerance: f64,
    /// Largest Hilbert-space dimension an experiment may touch.
    pub max_dim: usize,
    /// `all-plus` or `all` fixed sectors for `spectrum`.
    pub sectors: String,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { k: None, tolerance: 1e-8, max_dim: 1 << 16, sectors: "all-plus".into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    #[serde(default)]
    pub lattice: LatticeConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn new(e: Experiment) -> Self {
        Self {
            experiment: Some(e),
            lattice: LatticeConfig::default(),
            model: ModelConfig::default(),
            solver: SolverConfig::default(),
            output: OutputConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn single_lambda(&self) -> Result<f64> {
        match self.model.lambda.as_slice() {
            [l] => Ok(*l),
            v => Err(Error::Config(format!("this experiment takes one lambda, got {}", v.len()))),
        }
    }

    pub fn build_lattice(&self) -> Result<SignedLattice> {
        let c = &self.lattice;
        let lat = match (c.boundary, c.patch) {
            (Boundary::Torus, None) => build_lattice(c.l, Boundary::Torus)?,
            (Boundary::Open, Some([1, 1])) => single_plaquette_cluster()?,
            (Boundary::Open, Some([r, k])) => {
                build_open_patch(r, k, if c.corner_links { BoundaryLinks::Corners } else { BoundaryLinks::None })?
            }
            (Boundary::Open, None) => return Err(Error::Config("open boundary needs lattice.patch".into())),
            (Boundary::Torus, Some(_)) => return Err(Error::Config("lattice.patch needs an open boundary".into())),
        };
        let mode = match &c.signs {
            Signs::Default => SignMode::Default,
            Signs::Random => SignMode::Random(c.seed),
            Signs::Explicit(v) => SignMode::Explicit(v.clone()),
        };
        lat.assign_link_signs(&mode)?.with_holes(c.holes.iter().copied())
    }

    fn check_dim(&self, what: &'static str, qubits: usize) -> Result<()> {
        let dim = 1usize.checked_shl(qubits as u32).unwrap_or(usize::MAX);
        if dim > self.solver.max_dim {
            return Err(Error::Capacity { what, got: dim, limit: self.solver.max_dim });
        }
        Ok(())
    }
}

/// Files written by an experiment and whether its checks passed.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub passed: bool,
    pub summary: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Parse(_) | Error::Json(_) | Error::Io(_) | Error::Lattice(_) | Error::OddSize(_) => 2,
        Error::Capacity { .. } => 3,
        _ => 4,
    }
}

fn num(v: f64) -> String {
    format!("{v:.12e}")
}

struct Output {
    name: &'static str,
    body: String,
}

fn csv(name: &'static str, body: String) -> Output {
    Output { name, body }
}

fn json_out(name: &'static str, v: &serde_json::Value) -> Result<Output> {
    Ok(Output { name, body: serde_json::to_string_pretty(v)? + "\n" })
}

/// Runs one experiment and writes its outputs and manifest into `out`.
pub fn run_experiment(cfg: &ExperimentConfig, which: Experiment, out: &Path) -> Result<RunOutcome> {
    if let Some(e) = cfg.experiment {
        if e != which {
            return Err(Error::Config(format!("config is for {}, not {}", e.name(), which.name())));
        }
    }
    let start = Instant::now();
    let (outputs, passed, summary) = dispatch(cfg, which)?;
    fs::create_dir_all(out)?;
    let mut files = Vec::new();
    for o in &outputs {
        let p = out.join(o.name);
        fs::write(&p, &o.body)?;
        files.push(p);
    }
    let manifest = json!({
        "experiment": which.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "outputs": outputs.iter().map(|o| o.name).collect::<Vec<_>>(),
        "passed": passed,
        "summary": summary,
        "wall_seconds": start.elapsed().as_secs_f64(),
        "timestamp": SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    });
    let p = out.join("manifest.json");
    fs::write(&p, serde_json::to_string_pretty(&manifest)? + "\n")?;
    files.push(p);
    Ok(RunOutcome { files, passed, summary })
}

fn dispatch(cfg: &ExperimentConfig, which: Experiment) -> Result<(Vec<Output>, bool, String)> {
    match which {
        Experiment::Spectrum => spectrum(cfg),
        Experiment::Sectors => sectors(cfg),
        Experiment::PtCheck => pt_check(cfg),
        Experiment::IsingEquiv => ising_equiv(cfg),
        Experiment::PhaseScan => phase_scan(cfg),
        Experiment::Seam => seam(cfg),
        Experiment::Toric => toric(cfg),
        Experiment::LemmaCheck => lemma_check(cfg),
        Experiment::EpsilonCheck => epsilon_check(cfg),
    }
}

fn spectrum(cfg: &ExperimentConfig) -> Result<(Vec<Output>, bool, String)> {
    let lat = cfg.build_lattice()?;
    let lambda = cfg.single_lambda()?;
    let order = jw_order(&lat)?;
    cfg.check_dim("hilbert dimension", order.num_qubits())?;
    let params = ModelParams { delta: cfg.model.delta, lambda, epsilon: cfg.model.epsilon.clone() };
    let h = build_h(&lat, &params, &order)?;
    let cs = conserved_set(&lat, &order)?;
    let mut labels = all_fixed_labels(&cs);
    match cfg.solver.sectors.as_str() {
        "all" => {}
        "all-plus" => labels.retain(|l| l.c_w.iter().chain(&l.c_g).all(|&c| c == Some(1))),
        s => return Err(Error::Config(format!("solver.sectors must be all or all-plus, got {s}"))),
    }
    if !cfg.model.epsilon.is_empty() {
        // epsilon terms need not commute with the plaquettes
        labels = vec![SectorLabel::free(cs.white.len(), cs.gray.len())];
    }
    let r = spectra(&h, &cs, &labels, cfg.solver.k)?;
    let lowest = r.merged().first().copied().unwrap_or(f64::NAN);
    Ok((vec![csv("spectrum.csv", r.to_csv())], true, format!("{} sectors, lowest {}", r.sectors.len(), num(lowest))))
}

fn sectors(cfg: &ExperimentConfig) -> Result<(Vec<Output>, bool, String)> {
    let lat = cfg.build_lattice()?;
    cfg.check_dim("hilbert dimension", 2 * lat.num_islands())?;
    let scan = ground_sector_scan(&lat, cfg.model.delta, &cfg.model.lambda)?;
    let mut s = String::from("lambda,energy,degeneracy,labels\n");
    for p in &scan {
        writeln!(s, "{},{},{},{}", num(p.ratio), num(p.energy), p.degeneracy, p.labels.join(";")).unwrap();
    }
    let all_plus = scan.iter().filter(|p| p.labels.iter().all(|l| !l.contains('-'))).count();
    Ok((vec![csv("sectors.csv", s)], true, format!("{all_plus} of {} points in the all-plus sector", scan.len())))
}

fn pt_check(cfg: &ExperimentConfig) -> Result<(Vec<Output>, bool, String)> {
    let lat = single_plaquette_cluster()?;
    let lambda = cfg.single_lambda()?;
    let r = self_energy(&lat, cfg.model.delta, lambda)?;
    let expected = -5.0 / 16.0;
    let ok = (r.normalized_coefficient - expected).abs() <= 1e-8 * expected.abs()
        && r.order2_residual <= 1e-10
        && r.order3_norm == 0.0;
    let v = json!({ "report": r, "expected_normalized_coefficient": expected, "passed": ok });
    Ok((vec![json_out("pt-check.json", &v)?], ok, format!("normalized coefficient {}", num(r.normalized_coefficient))))
}

fn ising_equiv(cfg: &ExperimentConfig) -> Result<(Vec<Output>, bool, String)> {
    let lat = cfg.build_lattice()?;
    cfg.check_dim("hilbert dimension", 2 * lat.num_islands())?;
    let mut s = String::from("delta,lambda,fermion_levels,ising_levels,classes,max_deviation,passed\n");
    let mut ok = true;
    let mut worst = 0.0f64;
    for &lambda in &cfg.model.lambda {
        let r = equivalence_check(&lat, cfg.model.delta, lambda)?;
        let pass = r.counts_match() && r.max_deviation <= cfg.solver.tolerance;
        ok &= pass;
        worst = worst.max(r.max_deviation);
        writeln!(
            s,
            "{},{},{},{},{},{},{}",
            num(r.delta),
            num(r.lambda),
            r.fermion_levels,
            r.ising_levels,
            r.classes.len(),
            num(r.max_deviation),
            pass
        )
        .unwrap();
    }
    Ok((vec![csv("ising-equiv.csv", s)], ok, format!("max deviation {}", num(worst))))
}

fn phase_scan(cfg: &ExperimentConfig) -> Result<(Vec<Output>, bool, String)> {
    let shapes: Vec<(usize, usize)> = cfg.lattice.shapes.iter().map(|s| (s[0], s[1])).collect();
    for &(r, c) in &shapes {
        cfg.check_dim("spins", r * c)?;
    }
    let est = critical_estimate(&shapes, &cfg.model.lambda)?;
    let mut s = String::from("rows,cols,ratio,energy,gap,susceptibility\n");
    for scan in &est.scans {
        for (i, &g) in scan.ratios.iter().enumerate() {
            // susceptibility is reported at the midpoint that follows each grid point
            let chi = scan.susceptibility.get(i).map(|&v| num(v)).unwrap_or_default();
            writeln!(
                s,
                "{},{},{},{},{},{}",
                scan.rows,
                scan.cols,
                num(g),
                num(scan.energies[i]),
                num(scan.gaps[i]),
                chi
            )
            .unwrap();
        }
    }
    let peaks: Vec<_> = est
        .scans
        .iter()
        .map(|s| json!({"rows": s.rows, "cols": s.cols, "peak": s.peak(), "gap_minimum": s.gap_minimum()}))
        .collect();
    let v = json!({ "estimate": est.estimate, "uncertainty": est.uncertainty, "sizes": peaks });
    Ok((
        vec![csv("phase-scan.csv", s), json_out("phase-scan.json", &v)?],
        true,
        format!("critical ratio {} +- {}", num(est.estimate), num(est.uncertainty)),
    ))
}

fn seam(cfg: &ExperimentConfig) -> Result<(Vec<Output>, bool, String)> {
    let sizes = if cfg.lattice.sizes.is_empty() { vec![2, 3, 4] } else { cfg.lattice.sizes.clone() };
    for &n in &sizes {
        cfg.check_dim("spins", n * n)?;
    }
    let mut s = String::from("ratio,n,fm_energy,seam_energy,splitting\n");
    let mut fits = Vec::new();
    for &ratio in &cfg.model.lambda {
        let mut ys = Vec::new();
        for &n in &sizes {
            let p = seam_splitting(n, n, ratio)?;
            writeln!(s, "{},{},{},{},{}", num(ratio), n, num(p.fm_energy), num(p.seam_energy), num(p.splitting))
                .unwrap();
            ys.push(p.splitting);
        }
        let xs: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
        let fit = log_linear_fit(&xs, &ys).ok();
        fits.push(json!({
            "ratio": ratio,
            "monotone_decreasing": ys.windows(2).all(|w| w[1] < w[0]),
            "monotone_increasing": ys.windows(2).all(|w| w[1] > w[0]),
            "log_linear": fit.map(|(a, b, dev)| json!({"intercept": a, "slope": b, "max_relative_deviation": dev})),
        }));
    }
    let v = json!({ "sizes": sizes, "fits": fits });
    Ok((vec![csv("seam.csv", s), json_out("seam.json", &v)?], true, format!("{} ratios", cfg.model.lambda.len())))
}

fn toric(cfg: &ExperimentConfig) -> Result<(Vec<Output>, bool, String)> {
    let c = &cfg.lattice;
    let sizes = if c.sizes.is_empty() { vec![c.l] } else { c.sizes.clone() };
    let mut degs = Vec::new();
    for &l in &sizes {
        let m = toric_stabilizers(l, &[])?;
        degs.push(json!({"L": l, "plaquettes": m.terms.len(), "degeneracy": degeneracy(&m)?.value() as u64}));
    }
    let holes = c.white_holes.iter().map(|&w| hole_report(c.l, w)).collect::<Result<Vec<_>>>()?;
    let frustration =
        if c.flipped_links.is_empty() { None } else { Some(frustrated_ground_manifold(c.l, &c.flipped_links)?) };
    let summary = match &frustration {
        Some(f) => format!(
            "flipped links: {} states at energy {}; claimed {} at {}",
            f.ground_states, f.energy, f.comparison.claimed_states, f.comparison.claimed_energy
        ),
        None => format!("{} sizes", sizes.len()),
    };
    let v = json!({ "degeneracy": degs, "holes": holes, "frustration": frustration });
    Ok((vec![json_out("toric.json", &v)?], true, summary))
}

fn lemma_check(cfg: &ExperimentConfig) -> Result<(Vec<Output>, bool, String)> {
    let lat = cfg.build_lattice()?;
    cfg.check_dim("hilbert dimension", 2 * lat.num_islands())?;
    let mut reports = Vec::new();
    let mut violations = Vec::new();
    for &lambda in &cfg.model.lambda {
        let r = projecting_back_check(&lat, cfg.model.delta, lambda)?;
        violations.extend(r.violations().into_iter().map(|v| format!("lambda {lambda}: {v}")));
        reports.push(r);
    }
    let ok = violations.is_empty();
    let v = json!({ "reports": reports, "violations": violations });
    Ok((vec![json_out("lemma-check.json", &v)?], ok, if ok { "lemma holds".into() } else { violations.join("; ") }))
}

fn epsilon_check(cfg: &ExperimentConfig) -> Result<(Vec<Output>, bool, String)> {
    let lat = single_plaquette_cluster()?;
    let terms = if cfg.model.epsilon.is_empty() {
        vec![EpsilonTerm { island: 0, letters: ('b', 'd'), strength: 0.01 }]
    } else {
        cfg.model.epsilon.clone()
    };
    let mut rows = Vec::new();
    for t in &terms {
        let p = epsilon_projection(&lat, t.island, t.letters, t.strength)?;
        let words: Vec<_> =
            p.iter().map(|(c, w)| json!({"coefficient": c.re, "imag": c.im, "word": w.word()})).collect();
        rows.push(json!({"island": t.island, "letters": format!("{}{}", t.letters.0, t.letters.1), "strength": t.strength, "projection": words}));
    }
    let v = json!({ "terms": rows });
    Ok((vec![json_out("epsilon-check.json", &v)?], true, format!("{} terms", terms.len())))
}
