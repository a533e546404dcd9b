//! Exact kernel for double affine bundles: special affine spaces, double
//! affine and double vector spaces in decomposed form, atlas transitions,
//! the phase/contact tower of an AV-bundle, and n-affine bundles.

pub mod error;
pub mod exact;

pub use error::{Error, Result};
pub mod affine;
pub mod double;
pub mod random;
pub mod atlas;
pub mod check;
pub mod phase;
pub mod naffine;
