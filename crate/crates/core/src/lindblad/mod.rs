pub mod generator;
pub mod spec;

pub use generator::*;
pub use spec::*;
