//! Exact integer and modular linear algebra.

pub mod factor;
mod lattice;
mod matrix;
mod modular;
pub mod normal_form;
mod poly;

pub use lattice::{lattice_chain_invariants, ChainInvariants};
pub use matrix::Matrix;
pub use modular::{default_order_cap, is_unipotent_mod, matrix_order_mod, ModMatrix, Unipotence};
pub use poly::Poly;

use crate::scalar::Scalar;

pub fn det_exact<T: Scalar>(m: &Matrix<T>) -> T {
    m.det()
}

pub fn charpoly_exact<T: Scalar>(m: &Matrix<T>) -> Poly<T> {
    m.charpoly()
}
