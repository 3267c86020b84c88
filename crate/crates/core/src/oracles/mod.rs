//! Reference results: dense exact diagonalization, the free-fermion solution
//! of the open TFIM chain, and Wolff quantum Monte Carlo for 2D grids.

mod bdg;
mod dense_ed;
mod qmc;

use serde::{Deserialize, Serialize};

pub use bdg::{bdg_single_particle_energies, bdg_thermal_energy, bdg_thermal_energy_closed_form, MAX_BDG_SITES};
pub use dense_ed::{
    dense_gibbs, exact_correlations, exact_specific_heat, exact_susceptibility, ThermalEd, ZAverages, MAX_ED_SITES,
};
pub use qmc::{default_slices, qmc_tfim2d, QmcConfig, QmcResult, MIN_BINS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Source {
    #[serde(rename = "dense_ed")]
    DenseEd,
    #[serde(rename = "bdg")]
    Bdg,
    #[serde(rename = "qmc")]
    Qmc,
}

impl Source {
    pub fn is_exact(self) -> bool {
        !matches!(self, Source::Qmc)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalReference {
    pub source: Source,
    pub beta: f64,
    pub energy_density: f64,
    /// Zero for exact sources.
    pub stderr: f64,
    /// Monte Carlo measurements; zero for exact sources.
    pub n_samples: u64,
}

impl ThermalReference {
    pub fn exact(source: Source, beta: f64, energy_density: f64) -> Self {
        Self { source, beta, energy_density, stderr: 0.0, n_samples: 0 }
    }
}
