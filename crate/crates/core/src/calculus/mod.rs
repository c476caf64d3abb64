//! Detection facts and the rules that move them between presentations.

pub mod slopeset;
pub mod fact;
