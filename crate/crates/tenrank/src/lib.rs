//! Exact certification toolkit for multiqudit tensor families.
//!
//! The crate builds the named state families (GHZ, W, Dicke, and the
//! three qudit generalizations of W), certifies their tensor ranks with
//! persistence-based lower bounds and explicitly verified
//! decompositions, checks border-rank approximations and degeneration
//! chains over exact epsilon arithmetic, and certifies rate-one
//! asymptotic SLOCC transformations. All arithmetic is exact: rationals,
//! cyclotomic field elements, and Laurent polynomials in epsilon.

mod error;

pub mod acceptance;
pub mod decomp;
pub mod degen;
pub mod digest;
pub mod families;
pub mod json;
pub mod persistence;
pub mod pipeline;
pub mod rates;
pub mod scalar;
pub mod tensor;

pub use error::{Error, Result};
