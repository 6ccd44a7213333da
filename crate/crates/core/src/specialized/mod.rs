//! Function objects with representation-specific composition and inversion.

mod linear;
mod permutation;

pub use linear::LinearMap;
pub use permutation::Permutation;
