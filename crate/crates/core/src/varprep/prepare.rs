use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::objective::{free_energy, ObjectiveContext};
use super::optimizer::{minimize, Minimum, OptimizerSettings};
use crate::error::{arg, Error, Result};

pub const PREP_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrepSettings {
    pub restarts: usize,
    pub seed: u64,
    pub optimizer: OptimizerSettings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartOutcome {
    pub restart: usize,
    /// Final free energy, or `None` when the run aborted.
    #[serde(rename = "F")]
    pub f: Option<f64>,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Result of preparing one β. One JSON object per line in a results file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrepRecord {
    pub schema_version: u32,
    pub beta: f64,
    pub beta_clamped: bool,
    pub theta_star: Vec<f64>,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "S")]
    pub s: f64,
    pub restarts_run: usize,
    pub best_restart: usize,
    /// Objective evaluations spent by the best restart.
    pub iterations_used: usize,
    pub seed: u64,
    /// `(evaluation, best F)` samples of the best restart.
    pub convergence_trace: Vec<(usize, f64)>,
    pub restarts: Vec<RestartOutcome>,
    pub discarded_weight: f64,
    pub truncation_warning: bool,
}

/// Starting point for restart `index`: θ ~ U(−π, π) from its own ChaCha
/// stream, so adding restarts leaves earlier ones untouched.
pub fn initial_parameters(seed: u64, index: usize, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    (0..n).map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
}

/// Runs `settings.restarts` independent optimizations in parallel and keeps
/// the one with the lowest free energy.
pub fn multistart_prepare(ctx: &ObjectiveContext, settings: &PrepSettings) -> Result<PrepRecord> {
    if settings.restarts == 0 {
        return arg("restarts must be at least 1");
    }
    let n = ctx.circuit.n_params();
    let runs: Vec<Result<Minimum>> = (0..settings.restarts)
        .into_par_iter()
        .map(|r| {
            let x0 = initial_parameters(settings.seed, r, n);
            minimize(&settings.optimizer, |th: &[f64]| Ok(free_energy(th, ctx)?.f), &x0)
        })
        .collect();

    let outcomes: Vec<RestartOutcome> = runs
        .iter()
        .enumerate()
        .map(|(r, run)| match run {
            Ok(m) => RestartOutcome { restart: r, f: Some(m.f), iterations: m.iterations, error: None },
            Err(e) => RestartOutcome { restart: r, f: None, iterations: 0, error: Some(e.to_string()) },
        })
        .collect();
    let best = runs
        .iter()
        .enumerate()
        .filter_map(|(r, run)| run.as_ref().ok().map(|m| (r, m)))
        .min_by(|a, b| a.1.f.total_cmp(&b.1.f));
    let Some((best_restart, m)) = best else {
        let diagnostics: Vec<String> =
            outcomes.iter().map(|o| format!("restart {}: {}", o.restart, o.error.as_deref().unwrap_or("?"))).collect();
        return Err(Error::PreparationFailed { beta: ctx.beta(), diagnostics: diagnostics.join("; ") });
    };
    let fe = free_energy(&m.x, ctx)?;
    Ok(PrepRecord {
        schema_version: PREP_SCHEMA_VERSION,
        beta: ctx.beta(),
        beta_clamped: ctx.beta_clamped(),
        theta_star: m.x.clone(),
        f: fe.f,
        e: fe.e,
        s: fe.s,
        restarts_run: settings.restarts,
        best_restart,
        iterations_used: m.iterations,
        seed: settings.seed,
        convergence_trace: m.trace.clone(),
        restarts: outcomes,
        discarded_weight: fe.discarded_weight,
        truncation_warning: fe.truncation_warning,
    })
}
