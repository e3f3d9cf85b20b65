//! Alternating W-valued forms on F_p^d, canonical subspaces, the perp
//! operator that linearizes centralizers, and exhaustive subspace
//! enumeration.

mod enumerate;
mod form;
mod subspace;

pub use enumerate::{enumerate_subspaces, gaussian_binomial, subspace_count, SubspaceIter};
pub(crate) use enumerate::scan_subspaces;
pub use form::{lemma_ss_check, AlternatingForm, ValidationReport, MAX_FORM_DIM};
pub use subspace::Subspace;
