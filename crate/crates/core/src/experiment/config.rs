//! Line-based experiment configuration.
//!
//! ```text
//! # comment
//! [section]
//! key = value
//! ```
//!
//! Sections: `model`, `ansatz`, `objective`, `optimizer`, `measurement`,
//! `oracle`, `output`. Lists are whitespace separated; ZNE noise-factor sets
//! are separated by `;` (`1 3 5; 2 3 4`). Unknown sections or keys, repeated
//! keys and malformed values are errors that name the line. `to_text` writes
//! every key in a fixed order, so a parsed canonical file re-serializes to
//! the same bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::circuit::{AnsatzConfig, AnsatzFamily, Entangler};
use crate::error::{Error, Result};
use crate::measure::FitKind;
use crate::models::{tfim, xxz, HamiltonianSpec, Lattice};
use crate::oracles::Source;
use crate::varprep::{OptimizerKind, OptimizerSettings, PrepSettings};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelChoice {
    Tfim { j: f64, h: f64 },
    Xxz { j: f64, delta: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelBlock {
    pub model: ModelChoice,
    pub lattice: Lattice,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnsatzBlock {
    pub family: AnsatzFamily,
    pub n_ancilla: usize,
    pub layers: usize,
    pub entangler: Entangler,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObjectiveBlock {
    pub betas: Vec<f64>,
    pub chi_max: usize,
    pub svd_cutoff: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerBlock {
    pub kind: OptimizerKind,
    pub max_iter: usize,
    pub restarts: usize,
    pub rho_begin: f64,
    pub rho_end: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementBlock {
    pub shots: u64,
    pub seed: u64,
    pub noise_p: f64,
    pub readout_flip: f64,
    pub zne_sets: Vec<Vec<f64>>,
    pub zne_fit: FitKind,
    pub bootstrap_resamples: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleBlock {
    pub sources: Vec<Source>,
    pub qmc_thermalization: usize,
    pub qmc_sweeps: usize,
    pub qmc_bins: usize,
    pub qmc_chains: usize,
    pub qmc_seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelBlock,
    pub ansatz: AnsatzBlock,
    pub objective: ObjectiveBlock,
    pub optimizer: OptimizerBlock,
    pub measurement: MeasurementBlock,
    pub oracle: OracleBlock,
    pub output_dir: PathBuf,
}

fn perr<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, message: message.into() })
}

struct Entry {
    line: usize,
    value: String,
    used: bool,
}

/// Raw `section → key → entry` map with line numbers kept for diagnostics.
struct Raw {
    sections: BTreeMap<String, (usize, BTreeMap<String, Entry>)>,
}

const SECTIONS: [&str; 7] = ["model", "ansatz", "objective", "optimizer", "measurement", "oracle", "output"];

impl Raw {
    fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, (usize, BTreeMap<String, Entry>)> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let s = raw.split('#').next().unwrap_or("").trim();
            if s.is_empty() {
                continue;
            }
            if let Some(name) = s.strip_prefix('[') {
                let Some(name) = name.strip_suffix(']') else { return perr(line, "unterminated section header") };
                let name = name.trim().to_string();
                if !SECTIONS.contains(&name.as_str()) {
                    return perr(line, format!("unknown section [{name}]"));
                }
                if sections.contains_key(&name) {
                    return perr(line, format!("section [{name}] repeated"));
                }
                sections.insert(name.clone(), (line, BTreeMap::new()));
                current = Some(name);
                continue;
            }
            let Some((k, v)) = s.split_once('=') else { return perr(line, format!("expected `key = value`, got `{s}`")) };
            let Some(sec) = &current else { return perr(line, "key outside of any section") };
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if k.is_empty() {
                return perr(line, "empty key");
            }
            let map = &mut sections.get_mut(sec).unwrap().1;
            if map.contains_key(&k) {
                return perr(line, format!("key `{k}` repeated in [{sec}]"));
            }
            map.insert(k, Entry { line, value: v, used: false });
        }
        Ok(Self { sections })
    }

    fn take(&mut self, sec: &str, key: &str) -> Option<(usize, String)> {
        let e = self.sections.get_mut(sec)?.1.get_mut(key)?;
        e.used = true;
        Some((e.line, e.value.clone()))
    }

    fn section_line(&self, sec: &str) -> usize {
        self.sections.get(sec).map(|s| s.0).unwrap_or(0)
    }

    fn required<T>(&mut self, sec: &str, key: &str, f: impl Fn(&str) -> std::result::Result<T, String>) -> Result<T> {
        match self.take(sec, key) {
            Some((line, v)) => f(&v).or_else(|m| perr(line, format!("[{sec}] {key}: {m}"))),
            None => perr(self.section_line(sec), format!("[{sec}] is missing required key `{key}`")),
        }
    }

    fn optional<T>(&mut self, sec: &str, key: &str, default: T, f: impl Fn(&str) -> std::result::Result<T, String>) -> Result<T> {
        match self.take(sec, key) {
            Some((line, v)) => f(&v).or_else(|m| perr(line, format!("[{sec}] {key}: {m}"))),
            None => Ok(default),
        }
    }

    fn check_unused(&self) -> Result<()> {
        for (sec, (_, map)) in &self.sections {
            for (k, e) in map {
                if !e.used {
                    return perr(e.line, format!("unknown key `{k}` in [{sec}]"));
                }
            }
        }
        Ok(())
    }
}

fn num<T: FromStr>(s: &str) -> std::result::Result<T, String> {
    s.parse::<T>().map_err(|_| format!("cannot parse `{s}`"))
}

fn finite(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = num(s)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn list<T>(s: &str, f: impl Fn(&str) -> std::result::Result<T, String>) -> std::result::Result<Vec<T>, String> {
    s.split_whitespace().map(f).collect()
}

fn lattice(s: &str) -> std::result::Result<Lattice, String> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    match parts.as_slice() {
        ["chain", n] => Lattice::chain(num(n)?).map_err(|e| e.to_string()),
        ["grid", r, c] => Lattice::grid(num(r)?, num(c)?).map_err(|e| e.to_string()),
        _ => Err(format!("expected `chain N` or `grid ROWS COLS`, got `{s}`")),
    }
}

fn choice<T: Copy>(s: &str, options: &[(&str, T)]) -> std::result::Result<T, String> {
    options
        .iter()
        .find(|(k, _)| *k == s)
        .map(|(_, v)| *v)
        .ok_or_else(|| format!("`{s}` is not one of {}", options.iter().map(|o| o.0).collect::<Vec<_>>().join(", ")))
}

const FAMILIES: [(&str, AnsatzFamily); 2] = [("hea", AnsatzFamily::Hea), ("tfda", AnsatzFamily::Tfda)];
const ENTANGLERS: [(&str, Entangler); 2] = [("cnot", Entangler::Cnot), ("rzz", Entangler::Rzz)];
const OPTIMIZERS: [(&str, OptimizerKind); 2] = [("cobyla", OptimizerKind::Cobyla), ("nelder_mead", OptimizerKind::NelderMead)];
const FITS: [(&str, FitKind); 2] = [("exponential", FitKind::Exponential), ("linear", FitKind::Linear)];
const SOURCES: [(&str, Source); 3] = [("dense_ed", Source::DenseEd), ("bdg", Source::Bdg), ("qmc", Source::Qmc)];

fn name_of<T: Copy + PartialEq>(v: T, options: &[(&'static str, T)]) -> &'static str {
    options.iter().find(|o| o.1 == v).map(|o| o.0).unwrap_or("?")
}

fn zne_sets(s: &str) -> std::result::Result<Vec<Vec<f64>>, String> {
    s.split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let set = list(p, finite)?;
            if set.len() < 2 || set.iter().any(|&l| l < 1.0) {
                return Err(format!("noise-factor set `{p}` needs at least two values ≥ 1"));
            }
            Ok(set)
        })
        .collect()
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = Raw::parse(text)?;
        let kind = raw.required("model", "kind", |s| choice(s, &[("tfim", 0), ("xxz", 1)]))?;
        let lattice = raw.required("model", "lattice", lattice)?;
        let j = raw.optional("model", "J", 1.0, finite)?;
        let model = if kind == 0 {
            ModelChoice::Tfim { j, h: raw.optional("model", "h", 0.5, finite)? }
        } else {
            ModelChoice::Xxz { j, delta: raw.optional("model", "delta", 1.0, finite)? }
        };
        let n = lattice.n_sites();

        let family = raw.optional("ansatz", "family", AnsatzFamily::Hea, |s| choice(s, &FAMILIES))?;
        let ansatz = AnsatzBlock {
            family,
            n_ancilla: raw.optional("ansatz", "n_ancilla", n, num)?,
            layers: raw.optional("ansatz", "layers", 2, num)?,
            entangler: raw.optional("ansatz", "entangler", Entangler::Cnot, |s| choice(s, &ENTANGLERS))?,
        };

        let betas = raw.required("objective", "betas", |s| {
            let b = list(s, finite)?;
            if b.is_empty() {
                return Err("at least one beta is required".into());
            }
            if let Some(x) = b.iter().find(|&&x| x < 0.0) {
                return Err(format!("beta must be ≥ 0, got {x}"));
            }
            Ok(b)
        })?;
        let objective = ObjectiveBlock {
            betas,
            chi_max: raw.optional("objective", "chi_max", 128, num)?,
            svd_cutoff: raw.optional("objective", "svd_cutoff", 1e-12, finite)?,
        };

        let d = OptimizerSettings::default();
        let optimizer = OptimizerBlock {
            kind: raw.optional("optimizer", "kind", d.kind, |s| choice(s, &OPTIMIZERS))?,
            max_iter: raw.optional("optimizer", "max_iter", d.max_iter, num)?,
            restarts: raw.optional("optimizer", "restarts", 10, num)?,
            rho_begin: raw.optional("optimizer", "rho_begin", d.rho_begin, finite)?,
            rho_end: raw.optional("optimizer", "rho_end", d.rho_end, finite)?,
            seed: raw.optional("optimizer", "seed", 1, num)?,
        };

        let measurement = MeasurementBlock {
            shots: raw.optional("measurement", "shots", 100_000, num)?,
            seed: raw.optional("measurement", "seed", 7, num)?,
            noise_p: raw.optional("measurement", "noise_p", 0.0, finite)?,
            readout_flip: raw.optional("measurement", "readout_flip", 0.0, finite)?,
            zne_sets: raw.optional("measurement", "zne_sets", Vec::new(), zne_sets)?,
            zne_fit: raw.optional("measurement", "zne_fit", FitKind::Exponential, |s| choice(s, &FITS))?,
            bootstrap_resamples: raw.optional("measurement", "bootstrap_resamples", 1000, num)?,
        };

        let oracle = OracleBlock {
            sources: raw.optional("oracle", "sources", Vec::new(), |s| list(s, |x| choice(x, &SOURCES)))?,
            qmc_thermalization: raw.optional("oracle", "qmc_thermalization", 2000, num)?,
            qmc_sweeps: raw.optional("oracle", "qmc_sweeps", 20_000, num)?,
            qmc_bins: raw.optional("oracle", "qmc_bins", 64, num)?,
            qmc_chains: raw.optional("oracle", "qmc_chains", 4, num)?,
            qmc_seed: raw.optional("oracle", "qmc_seed", 1, num)?,
        };

        let output_dir = raw.optional("output", "dir", PathBuf::from("results"), |s| {
            if s.is_empty() {
                Err("empty path".into())
            } else {
                Ok(PathBuf::from(s))
            }
        })?;
        raw.check_unused()?;
        let cfg = Self { model: ModelBlock { model, lattice }, ansatz, objective, optimizer, measurement, oracle, output_dir };
        cfg.check().map_err(|e| match e {
            Error::Argument(m) => Error::Parse { line: 0, message: m },
            other => other,
        })?;
        Ok(cfg)
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Cross-field checks that a single line cannot express.
    fn check(&self) -> Result<()> {
        self.hamiltonian()?;
        self.ansatz_config()?;
        if self.measurement.shots == 0 {
            return crate::error::arg("measurement shots must be positive");
        }
        crate::measure::NoiseModel::new(self.measurement.noise_p, self.measurement.readout_flip)?;
        if self.optimizer.restarts == 0 {
            return crate::error::arg("optimizer restarts must be at least 1");
        }
        Ok(())
    }

    /// Replaces the optimizer, measurement and Monte Carlo seeds.
    pub fn override_seed(&mut self, seed: u64) {
        self.optimizer.seed = seed;
        self.measurement.seed = seed;
        self.oracle.qmc_seed = seed;
    }

    pub fn n_sites(&self) -> usize {
        self.model.lattice.n_sites()
    }

    pub fn hamiltonian(&self) -> Result<HamiltonianSpec> {
        match self.model.model {
            ModelChoice::Tfim { j, h } => Ok(tfim(self.model.lattice, j, h)),
            ModelChoice::Xxz { j, delta } => xxz(self.model.lattice, j, delta),
        }
    }

    pub fn ansatz_config(&self) -> Result<AnsatzConfig> {
        let a = &self.ansatz;
        if a.family == AnsatzFamily::Tfda && a.n_ancilla != self.n_sites() {
            return crate::error::arg(format!("tfda needs n_ancilla = {} (one per site)", self.n_sites()));
        }
        if a.n_ancilla == 0 {
            return crate::error::arg("at least one ancilla is required");
        }
        Ok(AnsatzConfig {
            family: a.family,
            n_physical: self.n_sites(),
            n_ancilla: a.n_ancilla,
            layers: a.layers,
            entangler: a.entangler,
        })
    }

    pub fn prep_settings(&self) -> PrepSettings {
        let o = &self.optimizer;
        PrepSettings {
            restarts: o.restarts,
            seed: o.seed,
            optimizer: OptimizerSettings { kind: o.kind, max_iter: o.max_iter, rho_begin: o.rho_begin, rho_end: o.rho_end },
        }
    }

    /// Every noise factor named by any ZNE set, ascending and distinct.
    pub fn noise_factors(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.measurement.zne_sets.iter().flatten().copied().collect();
        all.sort_by(f64::total_cmp);
        all.dedup();
        all
    }

    /// Canonical text form; parsing it gives back `self`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "[model]");
        match self.model.model {
            ModelChoice::Tfim { j, h } => {
                let _ = writeln!(s, "kind = tfim");
                let _ = writeln!(s, "lattice = {}", lattice_text(&self.model.lattice));
                let _ = writeln!(s, "J = {j:?}");
                let _ = writeln!(s, "h = {h:?}");
            }
            ModelChoice::Xxz { j, delta } => {
                let _ = writeln!(s, "kind = xxz");
                let _ = writeln!(s, "lattice = {}", lattice_text(&self.model.lattice));
                let _ = writeln!(s, "J = {j:?}");
                let _ = writeln!(s, "delta = {delta:?}");
            }
        }
        let a = &self.ansatz;
        let _ = writeln!(s, "\n[ansatz]");
        let _ = writeln!(s, "family = {}", name_of(a.family, &FAMILIES));
        let _ = writeln!(s, "n_ancilla = {}", a.n_ancilla);
        let _ = writeln!(s, "layers = {}", a.layers);
        let _ = writeln!(s, "entangler = {}", name_of(a.entangler, &ENTANGLERS));
        let o = &self.objective;
        let _ = writeln!(s, "\n[objective]");
        let _ = writeln!(s, "betas = {}", join(&o.betas));
        let _ = writeln!(s, "chi_max = {}", o.chi_max);
        let _ = writeln!(s, "svd_cutoff = {:?}", o.svd_cutoff);
        let p = &self.optimizer;
        let _ = writeln!(s, "\n[optimizer]");
        let _ = writeln!(s, "kind = {}", name_of(p.kind, &OPTIMIZERS));
        let _ = writeln!(s, "max_iter = {}", p.max_iter);
        let _ = writeln!(s, "restarts = {}", p.restarts);
        let _ = writeln!(s, "rho_begin = {:?}", p.rho_begin);
        let _ = writeln!(s, "rho_end = {:?}", p.rho_end);
        let _ = writeln!(s, "seed = {}", p.seed);
        let m = &self.measurement;
        let _ = writeln!(s, "\n[measurement]");
        let _ = writeln!(s, "shots = {}", m.shots);
        let _ = writeln!(s, "seed = {}", m.seed);
        let _ = writeln!(s, "noise_p = {:?}", m.noise_p);
        let _ = writeln!(s, "readout_flip = {:?}", m.readout_flip);
        let _ = writeln!(s, "zne_sets = {}", m.zne_sets.iter().map(|z| join(z)).collect::<Vec<_>>().join("; "));
        let _ = writeln!(s, "zne_fit = {}", name_of(m.zne_fit, &FITS));
        let _ = writeln!(s, "bootstrap_resamples = {}", m.bootstrap_resamples);
        let q = &self.oracle;
        let _ = writeln!(s, "\n[oracle]");
        let _ = writeln!(s, "sources = {}", q.sources.iter().map(|&x| name_of(x, &SOURCES)).collect::<Vec<_>>().join(" "));
        let _ = writeln!(s, "qmc_thermalization = {}", q.qmc_thermalization);
        let _ = writeln!(s, "qmc_sweeps = {}", q.qmc_sweeps);
        let _ = writeln!(s, "qmc_bins = {}", q.qmc_bins);
        let _ = writeln!(s, "qmc_chains = {}", q.qmc_chains);
        let _ = writeln!(s, "qmc_seed = {}", q.qmc_seed);
        let _ = writeln!(s, "\n[output]");
        let _ = writeln!(s, "dir = {}", self.output_dir.display());
        s
    }
}

fn lattice_text(l: &Lattice) -> String {
    match *l {
        Lattice::Chain { n } => format!("chain {n}"),
        Lattice::Grid { rows, cols } => format!("grid {rows} {cols}"),
    }
}
