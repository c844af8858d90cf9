//! Exact computation on maximal k-wise intersecting set families.
//!
//! Families over a ground set `[n]` are explicit bitmaps ([`SetFamily`]);
//! subsets are machine words ([`Mask`]). On top of these the crate provides
//! the extremal constructions, the k-wise intersecting and maximality
//! checkers, disjoint-union coverage, disjointness graphs with the stability
//! statistics built from them, and a symmetry-reduced exhaustive search for
//! the minimum size of a maximal family at small `n`.

pub mod constructions;
pub mod disjointness;
pub mod error;
pub mod family;
pub mod generator;
pub mod kwise;
pub mod mask;
pub mod ratio;
pub mod search;

pub use constructions::{linked_cubes, pair_of_cubes, series_of_cubes, Partition};
pub use error::{Error, Result};
pub use family::{SetFamily, MAX_FAMILY_WIDTH};
pub use kwise::{
    addable_masks, addable_witness, is_k_wise_intersecting, is_maximal_k_wise, maximal_closure, KwiseMode,
};
pub use mask::{Mask, MAX_MASK_WIDTH};
pub use ratio::Rational;
