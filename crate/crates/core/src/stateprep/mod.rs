pub mod filter;
pub mod prepare;

pub use crate::spectral::doubled::estimate_observable;
pub use filter::*;
pub use prepare::*;
