//! Program transformations.

pub mod normalize;
pub mod separate;
pub mod serialize;
pub mod prune;
