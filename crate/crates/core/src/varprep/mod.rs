//! Free-energy objective, derivative-free optimizers and the multi-start
//! preparation driver.

mod fidelity;
mod objective;
pub mod optimizer;
mod prepare;

pub use fidelity::infidelity;
pub use objective::{free_energy, FreeEnergy, ObjectiveContext, MIN_BETA, TRUNCATION_WARNING};
pub use optimizer::{cobyla_minimize, minimize, nelder_mead_minimize, Minimum, OptimizerKind, OptimizerSettings};
pub use prepare::{initial_parameters, multistart_prepare, PrepRecord, PrepSettings, RestartOutcome, PREP_SCHEMA_VERSION};
