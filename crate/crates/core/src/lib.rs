//! Variational preparation of Gibbs states for lattice spin models, with
//! free energies evaluated on matrix product state purifications.

pub mod circuit;
pub mod dense;
pub mod error;
pub mod experiment;
pub mod measure;
pub mod models;
pub mod oracles;
pub mod tensornet;
pub mod varprep;

pub use error::{Error, Result};
