//! The β-sweep pipelines: prepare, measure, oracle, plot data.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ModelChoice};
use super::journal::{self, Journal};
use crate::circuit::{build_hea, build_tfda, simulate_mps, AnsatzFamily, Circuit};
use crate::dense::symmetric_eigen;
use crate::error::{Error, Result};
use crate::measure::{
    chi_correlation_identity, energy_from_shots, fold_gates, noisy_sample_with_truncation, sample_physical,
    specific_heat_from_state, susceptibility_from_shots, two_point_from_shots, zne_extrapolate, Basis, Estimate,
    NoiseModel, ShotTable, SpecificHeat, ZneEstimate,
};
use crate::models::{HamiltonianSpec, Lattice};
use crate::oracles::{bdg_thermal_energy, qmc_tfim2d, QmcConfig, Source, ThermalEd};
use crate::tensornet::{gates, Mpo, MpsState};
use crate::varprep::{infidelity, multistart_prepare, ObjectiveContext, PrepRecord, MIN_BETA};

pub const RECORD_SCHEMA_VERSION: u32 = 1;
pub const PREP_FILE: &str = "prep.jsonl";
pub const MEASURE_FILE: &str = "measure.jsonl";
pub const ORACLE_FILE: &str = "oracle.jsonl";

/// Largest system for which measure reports the dense infidelity.
pub const MAX_INFIDELITY_SITES: usize = 8;
/// Largest system for which the dense Gibbs free energy is compared.
pub const MAX_BOUND_SITES: usize = 10;

/// β as used by the objective; β below the clamp share one key.
pub fn beta_key(beta: f64) -> f64 {
    beta.max(MIN_BETA)
}

fn same_beta(a: f64, b: f64) -> bool {
    beta_key(a) == beta_key(b)
}

/// Requested β values with clamp-duplicates removed, in config order.
fn unique_betas(cfg: &ExperimentConfig) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &b in &cfg.objective.betas {
        if !out.iter().any(|&o| same_beta(o, b)) {
            out.push(b);
        }
    }
    out
}

/// Outcome of one pipeline stage.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunSummary {
    pub computed: Vec<f64>,
    pub skipped: Vec<f64>,
    pub failed: Vec<(f64, String)>,
}

impl RunSummary {
    pub fn is_success(&self) -> bool {
        self.failed.is_empty()
    }
}

/// Circuit, Hamiltonian and site placement shared by all stages.
pub struct Setup {
    pub spec: HamiltonianSpec,
    /// Chain position of each lattice site.
    pub site_layout: Vec<usize>,
    pub circuit: Circuit,
    pub hamiltonian: Mpo,
}

impl Setup {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let spec = cfg.hamiltonian()?;
        let site_layout = cfg.model.lattice.default_layout();
        let acfg = cfg.ansatz_config()?;
        let circuit = match acfg.family {
            AnsatzFamily::Hea => build_hea(&acfg)?,
            AnsatzFamily::Tfda => build_tfda(&acfg, &spec, &site_layout)?,
        };
        let hamiltonian = spec.to_mpo(&site_layout, circuit.n_qubits())?;
        Ok(Self { spec, site_layout, circuit, hamiltonian })
    }

    pub fn context(&self, cfg: &ExperimentConfig, beta: f64) -> Result<ObjectiveContext> {
        Ok(ObjectiveContext::new(self.circuit.clone(), self.hamiltonian.clone(), beta)?
            .with_truncation(cfg.objective.chi_max, cfg.objective.svd_cutoff))
    }

    pub fn state(&self, cfg: &ExperimentConfig, theta: &[f64]) -> Result<MpsState> {
        simulate_mps(&self.circuit, theta, cfg.objective.chi_max, cfg.objective.svd_cutoff)
    }

    /// e^{−βH}/Z on the physical block, qubits in chain order.
    pub fn dense_gibbs_chain(&self, beta: f64) -> Result<DMatrix<C64>> {
        let h = self.spec.dense_matrix_with_layout(&self.site_layout)?;
        let (vals, vecs) = symmetric_eigen(h);
        let e0 = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let w: Vec<f64> = vals.iter().map(|e| (-beta * (e - e0)).exp()).collect();
        let z: f64 = w.iter().sum();
        let d = vals.len();
        let rho = DMatrix::from_fn(d, d, |i, k| (0..d).map(|m| vecs[(i, m)] * w[m] * vecs[(k, m)]).sum::<f64>() / z);
        Ok(rho.map(|x| C64::new(x, 0.0)))
    }
}

fn out_path(cfg: &ExperimentConfig, name: &str) -> PathBuf {
    cfg.output_dir.join(name)
}

/// Optimizes every configured β and appends one `PrepRecord` per β to
/// `prep.jsonl`. β values already present are skipped, so an interrupted
/// run picks up where it stopped. Failed β points are reported, not written.
pub fn run_prepare(cfg: &ExperimentConfig) -> Result<RunSummary> {
    std::fs::create_dir_all(&cfg.output_dir)?;
    std::fs::write(out_path(cfg, "config.txt"), cfg.to_text())?;
    let setup = Setup::new(cfg)?;
    let path = out_path(cfg, PREP_FILE);
    let done: Vec<PrepRecord> = journal::load(&path)?;
    let mut out = Journal::open(&path)?;
    let mut summary = RunSummary::default();
    let settings = cfg.prep_settings();
    for beta in unique_betas(cfg) {
        if done.iter().any(|r| same_beta(r.beta, beta)) {
            log::info!("beta = {beta}: prepared already, skipping");
            summary.skipped.push(beta);
            continue;
        }
        log::info!("beta = {beta}: preparing with {} restarts", settings.restarts);
        match setup.context(cfg, beta).and_then(|ctx| multistart_prepare(&ctx, &settings)) {
            Ok(rec) => {
                log::info!("beta = {beta}: F = {:.10}", rec.f);
                out.append(&rec)?;
                summary.computed.push(beta);
            }
            Err(e) => {
                log::error!("beta = {beta}: {e}");
                summary.failed.push((beta, e.to_string()));
            }
        }
    }
    Ok(summary)
}

/// Noisy runs at each folded noise factor and the extrapolations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoisyRecord {
    pub noise_p: f64,
    pub readout_flip: f64,
    pub noise_factors: Vec<f64>,
    pub energy_density: Vec<Estimate>,
    pub susceptibility: Vec<Estimate>,
    pub energy_zne: Vec<ZneEstimate>,
    pub susceptibility_zne: Vec<ZneEstimate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureRecord {
    pub schema_version: u32,
    /// β after clamping, as in the matching `PrepRecord`.
    pub beta: f64,
    pub beta_clamped: bool,
    pub n_sites: usize,
    pub shots: u64,
    pub energy_density: Estimate,
    pub energy_density_exact: f64,
    pub free_energy_density: f64,
    pub susceptibility: Estimate,
    pub susceptibility_exact: f64,
    /// |χ − correlation sum| on the prepared state.
    pub susceptibility_identity_residual: f64,
    pub specific_heat: SpecificHeat,
    /// C^z between site 0 and sites 1..N, lattice order.
    pub correlations: Vec<Estimate>,
    pub correlations_exact: Vec<f64>,
    /// F − F_Gibbs for systems small enough to diagonalize.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gibbs_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infidelity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noisy: Option<NoisyRecord>,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed for one sampling job, independent of run order.
fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix(base), |acc, &p| splitmix(acc ^ splitmix(p)))
}

fn shot_file(cfg: &ExperimentConfig, beta: f64, tag: &str) -> PathBuf {
    cfg.output_dir.join("shots").join(format!("beta{beta:?}_{tag}.txt"))
}

fn measure_one(cfg: &ExperimentConfig, setup: &Setup, rec: &PrepRecord) -> Result<MeasureRecord> {
    let n = setup.spec.n_sites();
    let m = &cfg.measurement;
    let beta = rec.beta;
    let state = setup.state(cfg, &rec.theta_star)?;
    let lay_phys = &setup.circuit.layout()[..n];
    let bkey = beta.to_bits();
    let sample = |basis: Basis, tag: u64| -> Result<ShotTable> {
        let seed = derive_seed(m.seed, &[bkey, tag]);
        sample_physical(&state, lay_phys, basis, m.shots, seed)?.reorder(&setup.site_layout)
    };
    let z = sample(Basis::Z, 0)?;
    let x = sample(Basis::X, 1)?;
    z.write_file(&shot_file(cfg, beta, "Z"))?;
    x.write_file(&shot_file(cfg, beta, "X"))?;

    let energy_density = energy_from_shots(&z, &x, &setup.spec)?;
    let susceptibility = susceptibility_from_shots(&z, beta, n)?;
    let id = chi_correlation_identity(&state, &setup.site_layout, beta)?;
    let specific_heat = specific_heat_from_state(&state, &setup.hamiltonian, beta, n)?;
    let correlations = (1..n).map(|j| two_point_from_shots(&z, 0, j)).collect::<Result<Vec<_>>>()?;
    let norm2 = state.norm().powi(2);
    let pz = gates::pauli_z();
    let zexp = |s: usize| -> Result<f64> { Ok(state.expectation_product(&[(setup.site_layout[s], &pz)])?.re / norm2) };
    let z0 = zexp(0)?;
    let mut correlations_exact = Vec::with_capacity(n - 1);
    for j in 1..n {
        let zz = state.expectation_product(&[(setup.site_layout[0], &pz), (setup.site_layout[j], &pz)])?.re / norm2;
        correlations_exact.push(zz - z0 * zexp(j)?);
    }

    let gibbs_gap = if n <= MAX_BOUND_SITES {
        let ed = ThermalEd::new(&setup.spec)?;
        Some(rec.f - ed.free_energy(beta))
    } else {
        None
    };
    let infidelity = if n <= MAX_INFIDELITY_SITES {
        Some(infidelity(&state.reduced_density_matrix(n)?, &setup.dense_gibbs_chain(beta)?)?)
    } else {
        None
    };
    let noisy = if m.zne_sets.is_empty() { None } else { Some(measure_noisy(cfg, setup, rec)?) };
    Ok(MeasureRecord {
        schema_version: RECORD_SCHEMA_VERSION,
        beta,
        beta_clamped: rec.beta_clamped,
        n_sites: n,
        shots: m.shots,
        energy_density,
        energy_density_exact: rec.e / n as f64,
        free_energy_density: rec.f / n as f64,
        susceptibility,
        susceptibility_exact: id.lhs,
        susceptibility_identity_residual: id.diff,
        specific_heat,
        correlations,
        correlations_exact,
        gibbs_gap,
        infidelity,
        noisy,
    })
}

fn measure_noisy(cfg: &ExperimentConfig, setup: &Setup, rec: &PrepRecord) -> Result<NoisyRecord> {
    let m = &cfg.measurement;
    let n = setup.spec.n_sites();
    let noise = NoiseModel::new(m.noise_p, m.readout_flip)?;
    let lambdas = cfg.noise_factors();
    let bkey = rec.beta.to_bits();
    let (mut energy, mut chi) = (Vec::new(), Vec::new());
    for &lambda in &lambdas {
        let folded = fold_gates(&setup.circuit, lambda)?;
        let run = |basis: Basis, tag: u64| -> Result<ShotTable> {
            let seed = derive_seed(m.seed, &[bkey, tag, lambda.to_bits()]);
            let (chi_max, cut) = (cfg.objective.chi_max, cfg.objective.svd_cutoff);
            noisy_sample_with_truncation(&folded, &rec.theta_star, &noise, basis, m.shots, seed, chi_max, cut)?
                .reorder(&setup.site_layout)
        };
        let z = run(Basis::Z, 2)?;
        let x = run(Basis::X, 3)?;
        z.write_file(&shot_file(cfg, rec.beta, &format!("noisy{lambda:?}_Z")))?;
        x.write_file(&shot_file(cfg, rec.beta, &format!("noisy{lambda:?}_X")))?;
        let e = energy_from_shots(&z, &x, &setup.spec)?;
        let c = susceptibility_from_shots(&z, rec.beta, n)?;
        log::info!("beta = {}: lambda = {lambda}: eps = {:.5} ± {:.1e}", rec.beta, e.value, e.stderr);
        energy.push(e);
        chi.push(c);
    }
    let extrapolate = |series: &[Estimate], tag: u64| -> Result<Vec<ZneEstimate>> {
        m.zne_sets
            .iter()
            .enumerate()
            .map(|(k, set)| {
                let pts: Vec<(f64, f64, f64)> = set
                    .iter()
                    .map(|&l| {
                        let i = lambdas.iter().position(|&x| x == l).expect("noise factors cover every set");
                        (l, series[i].value, series[i].stderr)
                    })
                    .collect();
                zne_extrapolate(&pts, m.zne_fit, m.bootstrap_resamples, derive_seed(m.seed, &[bkey, tag, k as u64]))
            })
            .collect()
    };
    Ok(NoisyRecord {
        noise_p: m.noise_p,
        readout_flip: m.readout_flip,
        noise_factors: lambdas.clone(),
        energy_zne: extrapolate(&energy, 4)?,
        susceptibility_zne: extrapolate(&chi, 5)?,
        energy_density: energy,
        susceptibility: chi,
    })
}

/// Samples every prepared state and appends a `MeasureRecord` per β to
/// `measure.jsonl`. Every configured β must have a prep record.
pub fn run_measure(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let preps: Vec<PrepRecord> = journal::load(&out_path(cfg, PREP_FILE))?;
    let betas = unique_betas(cfg);
    let missing: Vec<f64> = betas.iter().copied().filter(|&b| !preps.iter().any(|r| same_beta(r.beta, b))).collect();
    if !missing.is_empty() {
        let list: Vec<String> = missing.iter().map(|b| b.to_string()).collect();
        return Err(Error::Dependency(format!(
            "no prep record for beta = {} in {}",
            list.join(", "),
            out_path(cfg, PREP_FILE).display()
        )));
    }
    std::fs::create_dir_all(cfg.output_dir.join("shots"))?;
    let setup = Setup::new(cfg)?;
    let path = out_path(cfg, MEASURE_FILE);
    let done: Vec<MeasureRecord> = journal::load(&path)?;
    let mut out = Journal::open(&path)?;
    let mut summary = RunSummary::default();
    for beta in betas {
        if done.iter().any(|r| same_beta(r.beta, beta)) {
            summary.skipped.push(beta);
            continue;
        }
        let rec = preps.iter().find(|r| same_beta(r.beta, beta)).expect("checked above");
        match measure_one(cfg, &setup, rec) {
            Ok(m) => {
                out.append(&m)?;
                summary.computed.push(beta);
            }
            Err(e) => {
                log::error!("beta = {beta}: {e}");
                summary.failed.push((beta, e.to_string()));
            }
        }
    }
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub schema_version: u32,
    pub beta: f64,
    pub source: Source,
    pub energy_density: f64,
    pub energy_stderr: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_energy_density: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub susceptibility: Option<Estimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub specific_heat: Option<f64>,
    /// C^z between site 0 and sites 1..N.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlations: Option<Vec<f64>>,
    pub n_samples: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn oracle_one(cfg: &ExperimentConfig, spec: &HamiltonianSpec, source: Source, beta: f64) -> Result<OracleRecord> {
    let n = spec.n_sites();
    let base = |energy_density| OracleRecord {
        schema_version: RECORD_SCHEMA_VERSION,
        beta,
        source,
        energy_density,
        energy_stderr: 0.0,
        free_energy_density: None,
        susceptibility: None,
        specific_heat: None,
        correlations: None,
        n_samples: 0,
        warnings: Vec::new(),
    };
    match source {
        Source::DenseEd => {
            let ed = ThermalEd::new(spec)?;
            let z = ed.z_averages(beta);
            let mut r = base(ed.energy_density(beta));
            r.free_energy_density = (beta > 0.0).then(|| ed.free_energy(beta) / n as f64);
            r.susceptibility = Some(Estimate { value: z.susceptibility(beta), stderr: 0.0 });
            r.specific_heat = Some(ed.specific_heat(beta));
            r.correlations = Some((1..n).map(|j| z.correlation(0, j)).collect());
            Ok(r)
        }
        Source::Bdg => match (cfg.model.model, cfg.model.lattice) {
            (ModelChoice::Tfim { j, h }, Lattice::Chain { n }) => Ok(base(bdg_thermal_energy(n, j, h, beta)?)),
            _ => Err(Error::Argument("the free-fermion reference covers the TFIM chain only".into())),
        },
        Source::Qmc => match (cfg.model.model, cfg.model.lattice) {
            (ModelChoice::Tfim { j, h }, Lattice::Grid { rows, cols }) => {
                let o = &cfg.oracle;
                let mut q = QmcConfig::new(rows, cols, beta_key(beta), j, h);
                q.n_thermalization = o.qmc_thermalization;
                q.n_measure_sweeps = o.qmc_sweeps;
                q.n_bins = o.qmc_bins;
                q.n_chains = o.qmc_chains;
                q.seed = o.qmc_seed;
                let res = qmc_tfim2d(&q)?;
                let mut r = base(res.reference.energy_density);
                r.energy_stderr = res.reference.stderr;
                r.n_samples = res.reference.n_samples;
                r.susceptibility = Some(Estimate { value: res.susceptibility, stderr: res.susceptibility_stderr });
                r.correlations = Some(res.correlations.iter().skip(1).copied().collect());
                r.warnings = res.warnings;
                Ok(r)
            }
            _ => Err(Error::Argument("the Monte Carlo reference covers the TFIM grid only".into())),
        },
    }
}

/// Computes every configured reference at every β into `oracle.jsonl`.
pub fn run_oracle(cfg: &ExperimentConfig) -> Result<RunSummary> {
    std::fs::create_dir_all(&cfg.output_dir)?;
    let spec = cfg.hamiltonian()?;
    let path = out_path(cfg, ORACLE_FILE);
    let done: Vec<OracleRecord> = journal::load(&path)?;
    let mut out = Journal::open(&path)?;
    let mut summary = RunSummary::default();
    for beta in unique_betas(cfg) {
        for &source in &cfg.oracle.sources {
            if done.iter().any(|r| r.source == source && same_beta(r.beta, beta)) {
                summary.skipped.push(beta);
                continue;
            }
            match oracle_one(cfg, &spec, source, beta) {
                Ok(r) => {
                    out.append(&r)?;
                    summary.computed.push(beta);
                }
                Err(e) => {
                    log::error!("beta = {beta}, {source:?}: {e}");
                    summary.failed.push((beta, format!("{source:?}: {e}")));
                }
            }
        }
    }
    Ok(summary)
}

struct Csv {
    text: String,
}

impl Csv {
    fn new(title: &str) -> Self {
        let mut text = String::new();
        let _ = writeln!(text, "# {title}");
        let _ = writeln!(text, "# columns: beta = inverse temperature, value, stderr (0 for exact values), source");
        text.push_str("beta,value,stderr,source\n");
        Self { text }
    }

    fn row(&mut self, beta: f64, value: f64, stderr: f64, source: &str) {
        let _ = writeln!(self.text, "{beta},{value},{stderr},{source}");
    }
}

fn source_name(s: Source) -> &'static str {
    match s {
        Source::DenseEd => "dense_ed",
        Source::Bdg => "bdg",
        Source::Qmc => "qmc",
    }
}

fn set_name(set: &[f64]) -> String {
    set.iter().map(|l| l.to_string()).collect::<Vec<_>>().join("-")
}

/// Writes long-format CSV files under `<out>/plots` from the measure and
/// oracle results and returns their paths. The β grids of the two files
/// must agree when both are present.
pub fn emit_plotdata(out_dir: &Path) -> Result<Vec<PathBuf>> {
    let measures: Vec<MeasureRecord> = journal::load(&out_dir.join(MEASURE_FILE))?;
    if measures.is_empty() {
        return Err(Error::Dependency(format!("no measure records in {}", out_dir.display())));
    }
    let oracles: Vec<OracleRecord> = journal::load(&out_dir.join(ORACLE_FILE))?;
    if !oracles.is_empty() {
        let mb: BTreeSet<u64> = measures.iter().map(|r| beta_key(r.beta).to_bits()).collect();
        let ob: BTreeSet<u64> = oracles.iter().map(|r| beta_key(r.beta).to_bits()).collect();
        let mut unmatched: Vec<f64> = mb.symmetric_difference(&ob).map(|&b| f64::from_bits(b)).collect();
        if !unmatched.is_empty() {
            unmatched.sort_by(f64::total_cmp);
            return Err(Error::Join(unmatched));
        }
    }
    let mut energy = Csv::new("energy density per site");
    let mut chi = Csv::new("magnetic susceptibility");
    let mut cv = Csv::new("specific heat per site");
    let mut free = Csv::new("free energy per site");
    let mut corr = Csv::new("spin correlation C^z(0, j); source carries the distance j");
    let mut infid = Csv::new("infidelity of the prepared physical state against the Gibbs state");
    let mut zne = Csv::new("noisy energy density by noise factor (source raw:LAMBDA) and zero-noise extrapolations (zne:SET)");
    for r in &measures {
        let b = r.beta;
        energy.row(b, r.energy_density.value, r.energy_density.stderr, "shots");
        energy.row(b, r.energy_density_exact, 0.0, "variational");
        chi.row(b, r.susceptibility.value, r.susceptibility.stderr, "shots");
        chi.row(b, r.susceptibility_exact, 0.0, "variational");
        cv.row(b, r.specific_heat.value, 0.0, "variational");
        free.row(b, r.free_energy_density, 0.0, "variational");
        for (j, (e, x)) in r.correlations.iter().zip(&r.correlations_exact).enumerate() {
            corr.row(b, e.value, e.stderr, &format!("shots:j={}", j + 1));
            corr.row(b, *x, 0.0, &format!("variational:j={}", j + 1));
        }
        if let Some(f) = r.infidelity {
            infid.row(b, f, 0.0, "variational");
        }
        if let Some(nz) = &r.noisy {
            for (l, (e, c)) in nz.noise_factors.iter().zip(nz.energy_density.iter().zip(&nz.susceptibility)) {
                zne.row(b, e.value, e.stderr, &format!("raw:{l}"));
                chi.row(b, c.value, c.stderr, &format!("noisy_raw:{l}"));
            }
            for z in &nz.energy_zne {
                let half = 0.5 * (z.ci_high - z.ci_low);
                zne.row(b, z.extrapolated, half / 1.96, &format!("zne:{}", set_name(&z.noise_factors)));
            }
            for z in &nz.susceptibility_zne {
                let half = 0.5 * (z.ci_high - z.ci_low);
                chi.row(b, z.extrapolated, half / 1.96, &format!("zne:{}", set_name(&z.noise_factors)));
            }
        }
    }
    for o in &oracles {
        let (b, s) = (o.beta, source_name(o.source));
        energy.row(b, o.energy_density, o.energy_stderr, s);
        if let Some(x) = o.susceptibility {
            chi.row(b, x.value, x.stderr, s);
        }
        if let Some(c) = o.specific_heat {
            cv.row(b, c, 0.0, s);
        }
        if let Some(f) = o.free_energy_density {
            free.row(b, f, 0.0, s);
        }
        for (j, c) in o.correlations.iter().flatten().enumerate() {
            corr.row(b, *c, 0.0, &format!("{s}:j={}", j + 1));
        }
    }
    let dir = out_dir.join("plots");
    std::fs::create_dir_all(&dir)?;
    let mut paths = Vec::new();
    for (name, csv) in [
        ("energy.csv", energy),
        ("susceptibility.csv", chi),
        ("specific_heat.csv", cv),
        ("free_energy.csv", free),
        ("correlations.csv", corr),
        ("infidelity.csv", infid),
        ("zne_energy.csv", zne),
    ] {
        let p = dir.join(name);
        std::fs::write(&p, csv.text)?;
        paths.push(p);
    }
    Ok(paths)
}
