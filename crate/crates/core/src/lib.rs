//! Random Cayley graphs over finite abelian groups, their automorphism groups,
//! and proper distinguishing colorings.
//!
//! The crate samples inverse-closed connection sets, builds `Γ(A, S)`, decides
//! whether `Aut(Γ)` is the minimal group `A ⋊ <i>`, and certifies
//! `χ_D(Γ) ≤ χ(Γ) + 1` constructively. A seeded Monte Carlo harness compares
//! empirical frequencies against the closed-form bounds in [`bounds`].

pub mod bits;
pub mod bounds;
pub mod cayley;
pub mod coloring;
pub mod distinguishing;
pub mod error;
pub mod events;
pub mod exec;
pub mod group;
pub mod harness;
pub mod perm;
pub mod sampler;
pub mod symmetry;

pub use cayley::{CayleyGraph, Graph};
pub use coloring::Coloring;
pub use error::{Error, Result};
pub use group::{Family, GroupSpec};
pub use perm::Permutation;
pub use sampler::{ConnectionSet, RandomStream};
pub use symmetry::AutomorphismGroup;
