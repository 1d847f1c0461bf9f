//! Residual properties of mapping-torus groups.
//!
//! Exact classifiers deciding when the fundamental group of a mapping torus
//! (of an integer matrix, a free-group automorphism, or a braid) is residually
//! `p`, residually nilpotent, or residually torsion-free nilpotent, together
//! with explicit finite `p`-group quotients that certify positive answers.
//!
//! The numeric core is generic over [`Scalar`]; the aliases below fix the
//! arbitrary-precision instantiation that the classifiers use.

pub mod braid;
pub mod classify;
pub mod error;
pub mod extension;
pub mod freegrp;
pub mod intlin;
pub mod magnus;
pub mod pgrouplab;
pub mod scalar;
pub mod witness;

pub use error::{Error, Result};
pub use scalar::Scalar;

use num_bigint::BigInt;

pub type IntMatrix = intlin::Matrix<BigInt>;
pub type IntPoly = intlin::Poly<BigInt>;
pub type SmallMatrix = intlin::Matrix<i64>;
