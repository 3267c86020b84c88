//! Observable estimation from shots and states, synthetic noise, gate
//! folding, zero-noise extrapolation and bootstrap error bars.

pub mod bootstrap;
mod estimators;
mod folding;
mod noise;
pub mod shots;
mod zne;

pub use bootstrap::{bootstrap_ci, BootstrapData, BootstrapResult, Resampled, DEFAULT_RESAMPLES};
pub use estimators::{
    chi_correlation_identity, chi_correlation_identity_dense, energy_from_shots, magnetization_mpo, sample_physical,
    specific_heat_from_state, susceptibility_from_shots, two_point_from_shots, Estimate, IdentityCheck, SpecificHeat,
};
pub use folding::fold_gates;
pub use noise::{noisy_sample, noisy_sample_with_truncation, NoiseModel};
pub use shots::{Basis, ShotTable};
pub use zne::{zne_extrapolate, zne_fit, FitKind, ZneEstimate};
