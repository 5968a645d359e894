pub mod assemble;
pub mod circuit;
pub mod oracles;

pub use assemble::*;
pub use circuit::{Oracle, Registers, Step, Wire};
pub use oracles::*;
