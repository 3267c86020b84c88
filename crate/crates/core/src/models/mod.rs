//! Lattices, spin Hamiltonians as Pauli sums, and their MPO compilation.

mod hamiltonian;
mod lattice;
mod mpo_compile;

pub use hamiltonian::{tfim, xxz, HamiltonianSpec, ModelKind, Pauli, PauliTerm};
pub(crate) use hamiltonian::check_layout;
pub use lattice::{snake_map, Lattice};
