//! Gate-level circuits, ansatz builders and routing onto the MPS chain.

mod ansatz;
#[allow(clippy::module_inception)]
mod circuit;
mod gate;
mod routing;

pub use ansatz::{build_hea, build_tfda, AnsatzConfig, AnsatzFamily, Entangler};
pub use circuit::{bind_parameters, simulate_dense, simulate_mps, BoundGate, Circuit};
pub use gate::{Gate, GateKind};
pub use routing::route_to_chain;
