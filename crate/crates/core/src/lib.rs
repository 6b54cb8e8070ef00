//! Secant-preserving linear dimensionality reduction.
//!
//! The hierarchical engine clusters a data set, represents each cluster by
//! a PCA basis or a sample of its secants, links clusters through secants
//! between small anchor sets, and then iteratively tilts an orthonormal
//! projection frame toward whichever representative vector it currently
//! shortens the most. The plain variant on an explicit secant set lives in
//! [`sap`] and shares the same update step.

pub mod cli;
pub mod clustering;
pub mod dataset;
pub mod error;
pub mod hsap;
pub mod linalg;
pub mod plot;
pub mod sap;
pub mod secant;

pub use error::{ErrorClass, HsapError, Result};

/// Derives an independent 64-bit seed for `(stream, index)` from a master
/// seed (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut z = seed
        ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
