//! Numerical logarithmic potential theory on finite-gap subsets of the real
//! line, Jacobi matrices built from measures on such sets, and the
//! step-by-step sum rules that tie the two together.

pub mod cli;
pub mod error;
pub mod jacobi;
pub mod potential;
pub(crate) mod quadrature;
pub mod realset;
pub mod sumrule;

pub use error::{Error, Result};
pub use jacobi::{JacobiCoeffs, MeasureModel, MeasureSpec, Tail};
pub use potential::{solve_green, EquilibriumQuadrature, GreenModel};
pub use realset::{fat_cantor, GapSet, Location};

/// SHA-256 of the compact JSON serialization, hex encoded.
pub(crate) fn hash_json<T: serde::Serialize>(value: &T) -> String {
    use sha2::{Digest, Sha256};
    let bytes = serde_json::to_vec(value).unwrap_or_default();
    hex::encode(Sha256::digest(&bytes))
}
