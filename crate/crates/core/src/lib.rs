//! Coulomb wave functions F, G, H± and their energy-holomorphic counterparts
//! Φ, Ψ, I for complex η, ρ and complex or half-integer ℓ.

pub mod cli;
pub mod complexfn;
pub mod coulomb;
mod dd;
pub mod error;
pub mod hypergeom;
pub mod oracle;
pub mod render;
pub mod selftest;
pub mod series;

pub use error::{CoulombError, Result};
