use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::intlin::factor::factor_monic;
use crate::intlin::normal_form::{hermite_rows, smith_invariants};
use crate::intlin::{Matrix, Poly};
use crate::scalar::Scalar;

/// Invariants of the decreasing chain `B^i Z^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainInvariants {
    /// Rank of `B^n`, where the ranks of the powers have stabilized.
    pub stable_rank: usize,
    /// `[B^n Z^n : B^(n+1) Z^n]`, absent when the stable rank is zero.
    #[serde(with = "crate::scalar::json::option")]
    pub stable_index: Option<BigInt>,
    /// Rank of `\bigcap_i B^i Z^n`.
    pub intersection_rank: usize,
}

impl ChainInvariants {
    pub fn intersection_trivial(&self) -> bool {
        self.intersection_rank == 0
    }

    /// The coarse test `r = 0 or d >= 2`. Exact when `r <= 1`; for larger
    /// stable rank a map like `diag(2, 1)` has `d = 2` yet fixes a line, so
    /// callers should use [`Self::intersection_trivial`].
    pub fn index_test(&self) -> bool {
        match &self.stable_index {
            None => true,
            Some(d) => *d >= BigInt::from(2),
        }
    }
}

/// Chain invariants of an integer square matrix.
///
/// On the stable lattice `L = B^n Z^n` the map `B` is injective, so it is a
/// rank-`r` integer matrix `C`. The intersection of the chain is the largest
/// sublattice of `L` on which `C` is onto, whose rank is the total degree of
/// the irreducible factors of `charpoly(C)` with constant term `±1`.
pub fn lattice_chain_invariants<T: Scalar>(b: &Matrix<T>) -> ChainInvariants {
    let b = b.map(Scalar::to_big);
    let n = b.dim();
    let bn = b.pow(n as u64);
    let r = bn.rank();
    if r == 0 {
        return ChainInvariants {
            stable_rank: 0,
            stable_index: None,
            intersection_rank: 0,
        };
    }
    // Rows of `basis` are a basis of L.
    let basis = hermite_rows(&bn.transpose());
    debug_assert_eq!(basis.rows(), r);

    let coords = |v: &[BigInt]| solve_in_basis(&basis, v).expect("vector lies in the stable lattice");

    let bn1 = bn.mul_ref(&b);
    let gens: Vec<Vec<BigInt>> = (0..n).map(|j| coords(&bn1.column(j))).collect();
    let gen_matrix = Matrix::from_fn(r, n, |i, j| gens[j][i].clone());
    let index: BigInt = smith_invariants(&gen_matrix).iter().product();

    let images: Vec<Vec<BigInt>> = (0..r)
        .map(|k| coords(&b.mul_vec(basis.row(k))))
        .collect();
    let restricted = Matrix::from_fn(r, r, |i, j| images[j][i].clone());
    debug_assert_eq!(restricted.det().abs(), index);

    ChainInvariants {
        stable_rank: r,
        stable_index: Some(index),
        intersection_rank: unit_degree(&restricted.charpoly()),
    }
}

/// Total degree of the irreducible factors with unit constant term.
fn unit_degree(chi: &Poly<BigInt>) -> usize {
    factor_monic(chi)
        .iter()
        .filter(|f| f.coeff(0).abs().is_one())
        .map(|f| f.degree().unwrap())
        .sum()
}

/// Coordinates of `v` in the row-echelon basis, or `None` if `v` is not in
/// the lattice.
fn solve_in_basis(basis: &Matrix<BigInt>, v: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut rest = v.to_vec();
    let mut out = Vec::with_capacity(basis.rows());
    for k in 0..basis.rows() {
        let row = basis.row(k);
        let pc = row.iter().position(|x| !num_traits::Zero::is_zero(x))?;
        let (q, rem) = num_integer::Integer::div_rem(&rest[pc], &row[pc]);
        if !num_traits::Zero::is_zero(&rem) {
            return None;
        }
        for (x, h) in rest.iter_mut().zip(row) {
            *x -= &q * h;
        }
        out.push(q);
    }
    rest.iter().all(num_traits::Zero::is_zero).then_some(out)
}
