//! Involutions, conjugacy classes and commuting involution graphs in the
//! classical affine Weyl groups.
//!
//! The crate models elements of the affine families `A`, `B`, `Bbar`, `C`, `D`
//! as pairs `(sigma, v)` of a signed permutation and an integer translation
//! vector, classifies their involution conjugacy classes by labelled cycle
//! type plus residue data, and analyses the commuting involution graph of each
//! class: connectivity verdicts with certificates, windowed component
//! decompositions, certified distance witnesses and constructive bounded-length
//! paths to canonical representatives.
//!
//! Start with [`AffineElement`] and [`GroupFamily`], or run the examples:
//! `cargo run --example classify_element`.

pub mod commuting;
pub mod conjugacy;
pub mod construct;
pub mod element;
pub mod enumerate;
pub mod error;
pub mod graph;
pub mod involution;
pub mod report;
pub mod text;
pub mod verify;

pub use element::{AffineElement, FamilyTag, GroupFamily, Sign, SignedPermutation};
pub use error::{Error, Result};
