//! Quick deterministic self-checks behind the `verify` command.
//!
//! Each check compares a production code path against an independent dense
//! computation at small size. The report holds no timings or paths, so two
//! runs of the same build produce the same bytes.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::ExperimentConfig;
use super::journal;
use super::runner::{run_prepare, PREP_FILE};
use crate::circuit::{build_hea, simulate_dense, simulate_mps, AnsatzConfig, AnsatzFamily, Entangler};
use crate::dense::{trace_product, von_neumann_entropy};
use crate::error::Result;
use crate::measure::{chi_correlation_identity_dense, zne_fit, FitKind};
use crate::models::{tfim, Lattice};
use crate::oracles::{bdg_thermal_energy, dense_gibbs, ThermalEd};
use crate::varprep::{free_energy, ObjectiveContext, PrepRecord};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(s, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        let _ = writeln!(s, "{}", if self.passed() { "all checks passed" } else { "some checks failed" });
        s
    }

    fn push(&mut self, name: &'static str, result: Result<(bool, String)>) {
        let (passed, detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
        self.checks.push(Check { name, passed, detail });
    }
}

fn hea(n: usize, na: usize, layers: usize) -> AnsatzConfig {
    AnsatzConfig { family: AnsatzFamily::Hea, n_physical: n, n_ancilla: na, layers, entangler: Entangler::Cnot }
}

fn random_theta(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
}

fn free_energy_check() -> Result<(bool, String)> {
    let spec = tfim(Lattice::chain(4)?, 1.0, 0.5);
    let circuit = build_hea(&hea(4, 4, 2))?;
    let beta = 1.3;
    let ctx = ObjectiveContext::new(circuit.clone(), spec.to_mpo(&[0, 1, 2, 3], 8)?, beta)?;
    let h = spec.dense_matrix()?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let theta = random_theta(&mut rng, circuit.n_params());
        let mps = free_energy(&theta, &ctx)?.f;
        let rho = simulate_dense(&circuit, &theta)?.reduced_density_matrix(4)?;
        let dense = trace_product(&rho, &h).re - von_neumann_entropy(&rho) / beta;
        worst = worst.max((mps - dense).abs());
    }
    Ok((worst < 1e-8, format!("max |F_mps - F_dense| = {worst:.2e} over 10 circuits")))
}

fn entropy_check() -> Result<(bool, String)> {
    let circuit = build_hea(&hea(4, 4, 3))?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for k in 0..10 {
        let theta = random_theta(&mut rng, circuit.n_params());
        let cut = 1 + k % 7;
        let mps = simulate_mps(&circuit, &theta, 256, 0.0)?.entanglement_entropy(cut)?;
        let rho = simulate_dense(&circuit, &theta)?.reduced_density_matrix(cut)?;
        worst = worst.max((mps - von_neumann_entropy(&rho)).abs());
    }
    Ok((worst < 1e-8, format!("max entropy difference = {worst:.2e} over 10 circuits")))
}

fn bdg_check() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in [4, 6] {
        let ed = ThermalEd::new(&tfim(Lattice::chain(n)?, 1.0, 0.5))?;
        for beta in [0.0, 0.5, 2.0, 5.0] {
            worst = worst.max((bdg_thermal_energy(n, 1.0, 0.5, beta)? - ed.energy_density(beta)).abs());
        }
    }
    let one = (bdg_thermal_energy(1, 1.0, 0.7, 2.0)? + 0.7 * (2.0f64 * 0.7).tanh()).abs();
    Ok((worst < 1e-9 && one < 1e-12, format!("max chain difference = {worst:.2e}, single spin = {one:.2e}")))
}

fn identity_check() -> Result<(bool, String)> {
    let (mut worst_id, mut worst_m) = (0.0f64, 0.0f64);
    for n in [4, 6] {
        let spec = tfim(Lattice::chain(n)?, 1.0, 0.5);
        for beta in [0.5, 2.0, 5.0] {
            let rho = dense_gibbs(&spec, beta)?;
            worst_id = worst_id.max(chi_correlation_identity_dense(&rho, n, beta)?.diff);
            let m: f64 = ThermalEd::new(&spec)?.z_averages(beta).z.iter().sum();
            worst_m = worst_m.max(m.abs());
        }
    }
    Ok((worst_id < 1e-10 && worst_m < 1e-10, format!("identity residual = {worst_id:.2e}, |M_tot| = {worst_m:.2e}")))
}

fn zne_check() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for set in [vec![1.0, 3.0, 5.0], vec![2.0, 3.0, 4.0], vec![1.0, 2.0, 3.0, 4.0, 5.0]] {
        let y: Vec<f64> = set.iter().map(|&l: &f64| -0.9 + 0.25 * (-0.3 * l).exp()).collect();
        let (y0, kind) = zne_fit(&set, &y, FitKind::Exponential)?;
        if kind != FitKind::Exponential {
            return Ok((false, format!("set {set:?} fell back to {kind:?}")));
        }
        worst = worst.max((y0 + 0.65).abs());
    }
    Ok((worst < 1e-6, format!("max extrapolation error = {worst:.2e}")))
}

const PIPELINE: &str = "\
[model]
kind = tfim
lattice = chain 3
h = 0.5
[ansatz]
family = hea
n_ancilla = 2
layers = 1
[objective]
betas = 0 1 3
[optimizer]
max_iter = 300
restarts = 3
seed = 5
";

fn pipeline_check(work: &Path) -> Result<(bool, String)> {
    if work.exists() {
        std::fs::remove_dir_all(work)?;
    }
    let run = |name: &str| -> Result<(ExperimentConfig, String)> {
        let mut cfg = ExperimentConfig::parse(PIPELINE)?;
        cfg.output_dir = work.join(name);
        let s = run_prepare(&cfg)?;
        if !s.is_success() {
            return Err(crate::Error::PreparationFailed { beta: s.failed[0].0, diagnostics: s.failed[0].1.clone() });
        }
        let text = std::fs::read_to_string(cfg.output_dir.join(PREP_FILE))?;
        Ok((cfg, text))
    };
    let (cfg, first) = run("a")?;
    let (_, second) = run("b")?;
    let identical = first == second;

    let ed = ThermalEd::new(&cfg.hamiltonian()?)?;
    let recs: Vec<PrepRecord> = journal::load(&cfg.output_dir.join(PREP_FILE))?;
    let gap = recs.iter().map(|r| r.f - ed.free_energy(r.beta)).fold(f64::INFINITY, f64::min);

    // interrupted run: the last record was only half written
    let c = work.join("c");
    std::fs::create_dir_all(&c)?;
    let lines: Vec<&str> = first.split_inclusive('\n').collect();
    let last = lines[lines.len() - 1];
    let partial = format!("{}{}", lines[..lines.len() - 1].concat(), &last[..last.len() / 2]);
    std::fs::write(c.join(PREP_FILE), partial)?;
    let mut resumed = cfg.clone();
    resumed.output_dir = c.clone();
    let s = run_prepare(&resumed)?;
    let resumed_ok = s.computed.len() == 1 && s.skipped.len() == 2 && std::fs::read_to_string(c.join(PREP_FILE))? == first;
    std::fs::remove_dir_all(work)?;
    Ok((
        identical && resumed_ok && gap >= -1e-8,
        format!("repeat identical = {identical}, resume recomputed 1 of 3 = {resumed_ok}, min F - F_gibbs = {gap:.2e}"),
    ))
}

/// Runs every check, using `work` as scratch space for the pipeline check.
pub fn run_verify(work: &Path) -> VerifyReport {
    let mut r = VerifyReport::default();
    r.push("free energy, MPS against dense", free_energy_check());
    r.push("cut entropy, MPS against dense", entropy_check());
    r.push("free-fermion energy against ED", bdg_check());
    r.push("susceptibility identity and Z2 symmetry", identity_check());
    r.push("exponential extrapolation", zne_check());
    r.push("prepare determinism, resume and Gibbs bound", pipeline_check(work));
    r
}
