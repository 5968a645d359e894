pub mod auxdyn;
pub mod blockenc;
pub mod cli;
pub mod error;
pub mod factorization;
pub mod lindblad;
pub mod linalg;
pub mod quadrature;
pub mod spectral;
pub mod stateprep;

pub use error::{Error, Result};
