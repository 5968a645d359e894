pub mod bell;
pub mod evolve;
pub mod figures;
pub mod generator;

pub use bell::*;
pub use evolve::*;
pub use figures::*;
pub use generator::*;
