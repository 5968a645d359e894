//! Pauli algebra, Hamiltonians, Bohr components, Gibbs states and their
//! purifications.

pub mod bohr;
pub mod doubled;
pub mod gibbs;
pub mod hamiltonian;
pub mod io;
pub mod pauli;

pub use bohr::{bohr_decompose, bohr_decompose_with, BohrDecomposition};
pub use doubled::{estimate_observable, purified_gibbs, purified_vector, DoubledState};
pub use gibbs::{gibbs_state, GibbsState};
pub use hamiltonian::{build_tfim, build_tfim_capped, SpectralHamiltonian, DEFAULT_MAX_QUBITS};
pub use pauli::{Pauli, PauliString};
