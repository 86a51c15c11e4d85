//! Lovász-type extensions of set functions and black-box checks of the
//! additivity axioms that characterize them.
//!
//! A set function `φ: 2^[n] → ℝ` is stored as a table indexed by bitmask. Its
//! Lovász extension, symmetric Lovász extension and the two-parameter median
//! additive family are evaluated in `O(n log n)` per point by sorting. The
//! [`axioms`] module checks arbitrary [`Aggregator`]s against comonotonic,
//! horizontal and diagonal-section properties and reports reproducible
//! witnesses for every violation.

pub mod aggregator;
pub mod axioms;
pub mod error;
pub mod lovasz;
pub mod oracle;
pub mod setfn;
pub mod vecops;

pub use aggregator::{Aggregator, Builtin, FnAggregator};
pub use axioms::{check, Axiom, CheckConfig, Inputs, Tolerance, Verdict, Witness};
pub use error::{Error, Result};
pub use lovasz::{
    diagonal_section, reconstruct_from_sections, Extension, LovaszExtension,
    MedianAdditiveExtension, SectionFamily, SectionForm, SymmetricLovaszExtension,
};
pub use setfn::{
    is_capacity, mobius_transform, random_set_function, MobiusRepresentation, SetFunction,
    SetFunctionKind, Subset,
};
pub use vecops::{are_comonotonic, sort_chain, DomainSpec, SortChain};
