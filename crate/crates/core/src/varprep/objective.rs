use crate::circuit::{simulate_mps, Circuit};
use crate::error::{arg, Error, Result};
use crate::tensornet::{Mpo, MpsState, DEFAULT_CHI_MAX, DEFAULT_SVD_CUTOFF};

/// Smallest inverse temperature the objective evaluates at; β = 0 divides
/// the entropy term by zero.
pub const MIN_BETA: f64 = 1e-5;

/// Discarded weight above which results carry a truncation warning.
pub const TRUNCATION_WARNING: f64 = 1e-4;

/// Everything needed to evaluate F(θ) for one β.
#[derive(Clone, Debug)]
pub struct ObjectiveContext {
    pub circuit: Circuit,
    /// Hamiltonian on the full physical+ancilla chain.
    pub hamiltonian: Mpo,
    beta: f64,
    beta_clamped: bool,
    pub chi_max: usize,
    pub svd_cutoff: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreeEnergy {
    pub f: f64,
    pub e: f64,
    pub s: f64,
    pub discarded_weight: f64,
    pub truncation_warning: bool,
}

impl ObjectiveContext {
    pub fn new(circuit: Circuit, hamiltonian: Mpo, beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::NumericInput(format!("beta = {beta}")));
        }
        if circuit.n_ancilla() == 0 {
            return arg("the purification needs at least one ancilla qubit");
        }
        if hamiltonian.n_sites() != circuit.n_qubits() {
            return arg(format!(
                "Hamiltonian spans {} sites, circuit has {} qubits",
                hamiltonian.n_sites(),
                circuit.n_qubits()
            ));
        }
        let beta_clamped = beta < MIN_BETA;
        Ok(Self {
            circuit,
            hamiltonian,
            beta: beta.max(MIN_BETA),
            beta_clamped,
            chi_max: DEFAULT_CHI_MAX,
            svd_cutoff: DEFAULT_SVD_CUTOFF,
        })
    }

    pub fn with_truncation(mut self, chi_max: usize, svd_cutoff: f64) -> Self {
        self.chi_max = chi_max;
        self.svd_cutoff = svd_cutoff;
        self
    }

    /// The β actually used, after clamping.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn beta_clamped(&self) -> bool {
        self.beta_clamped
    }

    /// Bond index between the physical and the ancilla block.
    pub fn ancilla_cut(&self) -> usize {
        self.circuit.n_physical()
    }

    pub fn prepare_state(&self, theta: &[f64]) -> Result<MpsState> {
        simulate_mps(&self.circuit, theta, self.chi_max, self.svd_cutoff)
    }

    pub fn evaluate_state(&self, state: &MpsState) -> Result<FreeEnergy> {
        let e = state.expectation_mpo(&self.hamiltonian)?;
        let s = state.entanglement_entropy(self.ancilla_cut())?;
        let w = state.cumulative_discarded_weight();
        Ok(FreeEnergy { f: e - s / self.beta, e, s, discarded_weight: w, truncation_warning: w > TRUNCATION_WARNING })
    }
}

/// F = E − S/β for the purified state prepared from θ.
pub fn free_energy(theta: &[f64], ctx: &ObjectiveContext) -> Result<FreeEnergy> {
    if theta.len() != ctx.circuit.n_params() {
        return arg(format!("expected {} parameters, got {}", ctx.circuit.n_params(), theta.len()));
    }
    let fe = ctx.evaluate_state(&ctx.prepare_state(theta)?)?;
    if fe.truncation_warning {
        log::warn!("discarded weight {:.3e} exceeds {TRUNCATION_WARNING:e}", fe.discarded_weight);
    }
    Ok(fe)
}
