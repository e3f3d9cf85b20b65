//! Exact Chermak-Delgado lattice computations for finite p-groups of class 2.
//!
//! A class-2 p-group with elementary abelian central quotient and derived
//! subgroup is captured, up to everything the Chermak-Delgado measure can
//! see, by a W-valued alternating bilinear form on G/Z(G). This crate
//! represents such forms exactly over F_p, enumerates subspaces to compute
//! the measure-maximizing lattice, constructs four families of groups whose
//! lattices are quasiantichains, and analyzes the lattice's matrix algebra
//! to recover the width/abelian-atom-count law.
//!
//! Modules, bottom up:
//! - [`ffalg`]: matrices, kernels, polynomials, companion matrices over F_p;
//! - [`formspace`]: alternating forms, canonical subspaces, perp, enumeration;
//! - [`cdcore`]: the lattice computation, shape classification, certificates;
//! - [`families`]: the four explicit constructions and their predictions;
//! - [`structure`]: the matrix algebra behind the atoms and the (a, b) law;
//! - [`oracle`]: an element-level central-extension model used to cross-check
//!   the subspace computations against honest group arithmetic.

pub mod cdcore;
pub mod error;
pub mod families;
pub mod ffalg;
pub mod formspace;
pub mod oracle;
pub mod structure;

pub use error::{Error, Result};

/// Default cap on exhaustive subspace enumeration. Overridable per call and,
/// in the CLI, via `CDQ_MAX_SUBSPACES`.
pub const DEFAULT_SUBSPACE_CAP: u128 = 5_000_000;
