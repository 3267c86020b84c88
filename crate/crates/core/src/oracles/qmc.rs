//! Wolff-cluster Monte Carlo for the transverse-field Ising model on an open
//! grid.
//!
//! The Suzuki–Trotter decomposition with M slices of width Δτ = β/M maps the
//! quantum model to a classical anisotropic Ising model with spatial coupling
//! K_s = Δτ·J and temporal coupling K_t = ½ ln coth(Δτ·h), periodic in
//! imaginary time. Energy estimator: equal-time bond correlations for the ZZ
//! part, and for each temporal bond tanh(Δτ·h) when the two spins agree,
//! coth(Δτ·h) when they differ, for the transverse part. By default every
//! estimate is also computed at 2M slices and Richardson-extrapolated in Δτ².

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ThermalReference;
use crate::error::{arg, Error, Result};
use crate::models::Lattice;

pub const MIN_BINS: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QmcConfig {
    pub rows: usize,
    pub cols: usize,
    pub beta: f64,
    pub j: f64,
    pub h: f64,
    pub n_slices: usize,
    pub n_thermalization: usize,
    pub n_measure_sweeps: usize,
    pub n_bins: usize,
    pub n_chains: usize,
    pub seed: u64,
    /// Also run at 2M slices and extrapolate away the O(Δτ²) bias.
    #[serde(default = "yes")]
    pub trotter_extrapolation: bool,
}

fn yes() -> bool {
    true
}

/// M = max(8, ⌈10β⌉).
pub fn default_slices(beta: f64) -> usize {
    ((10.0 * beta).ceil() as usize).max(8)
}

impl QmcConfig {
    pub fn new(rows: usize, cols: usize, beta: f64, j: f64, h: f64) -> Self {
        Self {
            rows,
            cols,
            beta,
            j,
            h,
            n_slices: default_slices(beta),
            n_thermalization: 2_000,
            n_measure_sweeps: 20_000,
            n_bins: 64,
            n_chains: 4,
            seed: 1,
            trotter_extrapolation: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("beta", self.beta), ("J", self.j), ("h", self.h)] {
            if !v.is_finite() {
                return Err(Error::NumericInput(format!("{name} = {v}")));
            }
        }
        if self.rows * self.cols < 2 {
            return arg("QMC lattice needs at least two sites");
        }
        if self.beta <= 0.0 || self.h < 0.0 || self.j < 0.0 {
            return arg("QMC needs beta > 0 and non-negative J, h");
        }
        if self.n_slices < 8 || self.beta / self.n_slices as f64 > 0.1 + 1e-12 {
            return arg(format!("need M >= 8 and beta/M <= 0.1, got M = {}", self.n_slices));
        }
        if self.n_bins < MIN_BINS || self.n_measure_sweeps < self.n_bins || self.n_chains == 0 {
            return arg(format!(
                "need n_bins >= {MIN_BINS}, n_measure_sweeps >= n_bins and at least one chain"
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QmcResult {
    pub reference: ThermalReference,
    pub susceptibility: f64,
    pub susceptibility_stderr: f64,
    /// ⟨M_tot⟩ per site; zero up to noise by the Z₂ symmetry.
    pub magnetization: f64,
    /// C^z_ij, row-major, with ⟨σᶻ⟩ = 0 by symmetry.
    pub correlations: Vec<f64>,
    pub correlations_stderr: Vec<f64>,
    pub n_slices: usize,
    pub autocorrelation_time: f64,
    pub warnings: Vec<String>,
}

/// Classical Ising system on `n_slices` copies of a spatial graph, with
/// periodic temporal bonds when there is more than one slice.
struct Wolff {
    n: usize,
    m: usize,
    neighbors: Vec<Vec<usize>>,
    p_space: f64,
    p_time: f64,
    spins: Vec<i8>,
    stack: Vec<usize>,
}

impl Wolff {
    fn new(lattice: &Lattice, m: usize, k_space: f64, k_time: f64) -> Self {
        let n = lattice.n_sites();
        let mut neighbors = vec![Vec::new(); n];
        for (a, b) in lattice.bonds() {
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        let prob = |k: f64| if k.is_infinite() { 1.0 } else { -(-2.0 * k).exp_m1() };
        Self {
            n,
            m,
            neighbors,
            p_space: prob(k_space),
            p_time: if m > 1 { prob(k_time) } else { 0.0 },
            spins: vec![1; n * m],
            stack: Vec::new(),
        }
    }

    fn cluster_update(&mut self, rng: &mut ChaCha8Rng) -> usize {
        let seed = rng.gen_range(0..self.spins.len());
        let s0 = self.spins[seed];
        self.spins[seed] = -s0;
        self.stack.push(seed);
        let mut size = 1;
        while let Some(x) = self.stack.pop() {
            let (k, i) = (x / self.n, x % self.n);
            for &j in &self.neighbors[i] {
                let y = k * self.n + j;
                if self.spins[y] == s0 && rng.gen::<f64>() < self.p_space {
                    self.spins[y] = -s0;
                    self.stack.push(y);
                    size += 1;
                }
            }
            if self.p_time > 0.0 {
                for kk in [(k + 1) % self.m, (k + self.m - 1) % self.m] {
                    let y = kk * self.n + i;
                    if self.spins[y] == s0 && rng.gen::<f64>() < self.p_time {
                        self.spins[y] = -s0;
                        self.stack.push(y);
                        size += 1;
                    }
                }
            }
        }
        size
    }

    /// A fixed number of cluster flips. The count must not depend on the
    /// clusters drawn, or measurements would be taken at biased times.
    fn sweep(&mut self, rng: &mut ChaCha8Rng, clusters: usize) -> usize {
        (0..clusters).map(|_| self.cluster_update(rng)).sum()
    }

    /// Thermalizes and returns the number of clusters that flips about one
    /// lattice volume on average.
    fn thermalize(&mut self, rng: &mut ChaCha8Rng, sweeps: usize) -> usize {
        let volume = self.spins.len();
        let (mut clusters, mut flipped) = (1usize, 1usize);
        for _ in 0..sweeps {
            let per_sweep = (volume * clusters).div_ceil(flipped).max(1);
            flipped += self.sweep(rng, per_sweep);
            clusters += per_sweep;
        }
        (volume * clusters).div_ceil(flipped).max(1)
    }

    fn slice(&self, k: usize) -> &[i8] {
        &self.spins[k * self.n..(k + 1) * self.n]
    }
}

/// Observables of one configuration.
struct Sample {
    energy_density: f64,
    m: f64,
    m2: f64,
    zz: Vec<f64>,
}

fn measure(w: &Wolff, bonds: &[(usize, usize)], j: f64, h: f64, a: f64) -> Sample {
    let (n, m) = (w.n, w.m);
    let (t, c) = if a > 0.0 { (a.tanh(), 1.0 / a.tanh()) } else { (0.0, 0.0) };
    let (mut zz_bonds, mut x_sum, mut mag, mut mag2) = (0.0, 0.0, 0.0, 0.0);
    let mut zz = vec![0.0; n * n];
    for k in 0..m {
        let s = w.slice(k);
        let next = w.slice((k + 1) % m);
        zz_bonds += bonds.iter().map(|&(p, q)| (s[p] * s[q]) as f64).sum::<f64>();
        x_sum += s.iter().zip(next).map(|(x, y)| if x == y { t } else { c }).sum::<f64>();
        let mk: f64 = s.iter().map(|&v| v as f64).sum();
        mag += mk;
        mag2 += mk * mk;
        for p in 0..n {
            for q in 0..n {
                zz[p * n + q] += (s[p] * s[q]) as f64;
            }
        }
    }
    let mf = m as f64;
    zz.iter_mut().for_each(|v| *v /= mf);
    Sample { energy_density: (-j * zz_bonds / mf - h * x_sum / mf) / n as f64, m: mag / mf, m2: mag2 / mf, zz }
}

struct ChainOutput {
    bins: Vec<Sample>,
    energy_series_var: f64,
}

fn run_chain(cfg: &QmcConfig, lattice: &Lattice, m: usize, chain: usize) -> ChainOutput {
    let dtau = cfg.beta / m as f64;
    let a = dtau * cfg.h;
    let k_time = if a > 0.0 { 0.5 * (1.0 / a.tanh()).ln() } else { f64::INFINITY };
    let mut w = Wolff::new(lattice, m, dtau * cfg.j, k_time);
    let bonds = lattice.bonds();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(chain as u64);
    let clusters = w.thermalize(&mut rng, cfg.n_thermalization);
    let per_bin = cfg.n_measure_sweeps / cfg.n_bins;
    let n2 = w.n * w.n;
    let mut bins = Vec::with_capacity(cfg.n_bins);
    let (mut e_sum, mut e_sq) = (0.0, 0.0);
    for _ in 0..cfg.n_bins {
        let mut acc = Sample { energy_density: 0.0, m: 0.0, m2: 0.0, zz: vec![0.0; n2] };
        for _ in 0..per_bin {
            w.sweep(&mut rng, clusters);
            let s = measure(&w, &bonds, cfg.j, cfg.h, a);
            e_sum += s.energy_density;
            e_sq += s.energy_density * s.energy_density;
            acc.energy_density += s.energy_density;
            acc.m += s.m;
            acc.m2 += s.m2;
            acc.zz.iter_mut().zip(&s.zz).for_each(|(x, y)| *x += y);
        }
        let inv = 1.0 / per_bin as f64;
        acc.energy_density *= inv;
        acc.m *= inv;
        acc.m2 *= inv;
        acc.zz.iter_mut().for_each(|x| *x *= inv);
        bins.push(acc);
    }
    let count = (per_bin * cfg.n_bins) as f64;
    let mean = e_sum / count;
    ChainOutput { bins, energy_series_var: (e_sq / count - mean * mean).max(0.0) }
}

fn mean_stderr(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

struct Estimates {
    energy: (f64, f64),
    chi: (f64, f64),
    mag: f64,
    corr: Vec<(f64, f64)>,
    tau: f64,
}

fn estimate(cfg: &QmcConfig, lattice: &Lattice, m: usize, stream_offset: usize) -> Estimates {
    let n = lattice.n_sites();
    let chains: Vec<ChainOutput> = (0..cfg.n_chains)
        .into_par_iter()
        .map(|c| run_chain(cfg, lattice, m, stream_offset + c))
        .collect();
    let bins: Vec<&Sample> = chains.iter().flat_map(|c| c.bins.iter()).collect();
    let energy = mean_stderr(bins.iter().map(|b| b.energy_density));
    let chi_scale = cfg.beta / (n * n) as f64;
    let chi = mean_stderr(bins.iter().map(|b| chi_scale * b.m2));
    let (mag, _) = mean_stderr(bins.iter().map(|b| b.m / n as f64));
    let corr = (0..n * n).map(|k| mean_stderr(bins.iter().map(|b| b.zz[k]))).collect();
    // τ_int from the ratio of binned to naive variance of the mean
    let per_bin = (cfg.n_measure_sweeps / cfg.n_bins) as f64;
    let naive_var =
        chains.iter().map(|c| c.energy_series_var).sum::<f64>() / chains.len() as f64 / (bins.len() as f64 * per_bin);
    let tau = if naive_var > 0.0 { 0.5 * energy.1 * energy.1 / naive_var } else { 0.0 };
    Estimates { energy, chi, mag, corr, tau }
}

/// Removes the O(Δτ²) Trotter error from estimates at M and 2M slices.
fn richardson(coarse: (f64, f64), fine: (f64, f64)) -> (f64, f64) {
    ((4.0 * fine.0 - coarse.0) / 3.0, (16.0 * fine.1 * fine.1 + coarse.1 * coarse.1).sqrt() / 3.0)
}

pub fn qmc_tfim2d(cfg: &QmcConfig) -> Result<QmcResult> {
    cfg.validate()?;
    let lattice = Lattice::grid(cfg.rows, cfg.cols)?;
    let coarse = estimate(cfg, &lattice, cfg.n_slices, 0);
    let est = if cfg.trotter_extrapolation {
        let fine = estimate(cfg, &lattice, 2 * cfg.n_slices, cfg.n_chains);
        Estimates {
            energy: richardson(coarse.energy, fine.energy),
            chi: richardson(coarse.chi, fine.chi),
            mag: (coarse.mag + fine.mag) / 2.0,
            corr: coarse.corr.iter().zip(&fine.corr).map(|(&c, &f)| richardson(c, f)).collect(),
            tau: coarse.tau.max(fine.tau),
        }
    } else {
        coarse
    };

    let tau = est.tau;
    let mut warnings = Vec::new();
    if (cfg.n_thermalization as f64) < 10.0 * tau {
        warnings.push(format!(
            "thermalization of {} sweeps is shorter than 10 autocorrelation times (tau = {tau:.1})",
            cfg.n_thermalization
        ));
    }
    if cfg.h == 0.0 || cfg.j == 0.0 {
        warnings.push("J = 0 or h = 0 decouples the cluster moves; sampling may be nonergodic".into());
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    let runs = if cfg.trotter_extrapolation { 2 } else { 1 };
    Ok(QmcResult {
        reference: ThermalReference {
            source: super::Source::Qmc,
            beta: cfg.beta,
            energy_density: est.energy.0,
            stderr: est.energy.1,
            n_samples: (cfg.n_measure_sweeps * cfg.n_chains * runs) as u64,
        },
        susceptibility: est.chi.0,
        susceptibility_stderr: est.chi.1,
        magnetization: est.mag,
        correlations: est.corr.iter().map(|c| c.0).collect(),
        correlations_stderr: est.corr.iter().map(|c| c.1).collect(),
        n_slices: cfg.n_slices,
        autocorrelation_time: tau,
        warnings,
    })
}
