pub mod factors;
pub mod sos;

pub use factors::*;
pub use sos::*;
