//! Monte-Carlo Casimir energies and lateral forces from noncompact U(1)
//! lattice gauge theory on anisotropic four-dimensional lattices.
//!
//! Perfect conductors are imposed by freezing tangential links to zero,
//! dielectrics by weighting electric plaquettes. Interaction energies come
//! from the four-scene subtraction `full - only_a - only_b + free`.

pub mod error;
pub mod geometry;
pub mod lattice;
pub mod observables;
pub mod reference;
pub mod runner;
pub mod sampler;

pub use error::{Error, Result};
