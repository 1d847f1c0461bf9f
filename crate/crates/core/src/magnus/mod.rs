//! Truncated Magnus expansion of free groups.
//!
//! `x_i -> 1 + X_i` embeds `F_n` in the units of noncommutative power series.
//! Truncating at degree `d` over `F_p` gives finite `p`-group quotients whose
//! kernels (mod-`p` dimension subgroups) are fully invariant, and the graded
//! pieces give the action of an automorphism on the lower central layers.

mod lyndon;
mod series;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegrp::{FreeEndo, FreeWord};
use crate::intlin::{is_unipotent_mod, Matrix};
use crate::scalar::{is_prime, p_power_exponent, Scalar};
use crate::IntMatrix;

pub use lyndon::{
    basic_commutator, bracket_polynomial, is_lyndon, lie_bracket, lyndon_coordinates, lyndon_words,
    standard_factorization, witt_dimension, LiePoly,
};
pub use series::{Monomial, Ring, TruncatedSeries};

/// Resource bounds for the Magnus engine.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MagnusCaps {
    pub max_degree: usize,
    pub max_layer: usize,
    pub max_rank: usize,
    /// Largest Lie layer basis a layer matrix may be built on.
    pub max_basis: usize,
    /// Iteration bound when computing induced automorphism orders.
    pub max_order: u64,
}

impl Default for MagnusCaps {
    fn default() -> Self {
        Self {
            max_degree: 8,
            max_layer: 4,
            max_rank: 6,
            max_basis: witt_dimension(6, 4),
            max_order: 1 << 16,
        }
    }
}

/// Magnus image of `w`, truncated at degree `d`.
pub fn magnus_embed<T: Scalar>(w: &FreeWord, d: usize, ring: Ring<T>) -> TruncatedSeries<T> {
    let mut s = TruncatedSeries::one(w.rank(), d, ring);
    for &l in w.letters() {
        let i = (l.unsigned_abs() - 1) as usize;
        s = if l > 0 {
            s.mul_generator(i)
        } else {
            s.mul_generator_inverse(i)
        };
    }
    s
}

/// Least `d` with `magnus_embed(w, d, F_p) != 1`.
pub fn magnus_depth(w: &FreeWord, p: u64, cap: usize) -> Result<usize> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if w.is_identity() {
        return Err(Error::IsIdentity);
    }
    let s = magnus_embed::<i64>(w, cap, Ring::prime_field(p));
    s.lowest_nonconstant_degree().ok_or(Error::CapExceeded {
        what: "Magnus degree",
        cap: cap as u64,
    })
}

/// Matrix of an endomorphism on a free Lie layer, in the Lyndon basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LieLayerMatrix {
    pub layer: usize,
    pub basis: Vec<Monomial>,
    pub ring: Ring<BigInt>,
    pub matrix: IntMatrix,
}

impl LieLayerMatrix {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Basis element as a bracket, e.g. `[x1,[x1,x2]]`.
    pub fn basis_label(&self, k: usize) -> String {
        bracket_label(&self.basis[k])
    }
}

pub fn bracket_label(w: &[u8]) -> String {
    match standard_factorization(w) {
        None => format!("x{}", w[0] + 1),
        Some((u, v)) => format!("[{},{}]", bracket_label(u), bracket_label(v)),
    }
}

/// The Lyndon basis of layer `i` with bracket polynomials, checked against caps.
fn layer_basis(rank: usize, i: usize, caps: &MagnusCaps) -> Result<(Vec<Monomial>, Vec<LiePoly>)> {
    let size = witt_dimension(rank, i);
    if size > caps.max_basis || rank > caps.max_rank {
        return Err(Error::LayerTooDeep {
            layer: i,
            size,
            bound: caps.max_basis,
        });
    }
    let basis = lyndon_words(rank, i);
    let polys = basis.iter().map(|w| bracket_polynomial(w)).collect();
    Ok((basis, polys))
}

pub fn lie_layer_matrix(phi: &FreeEndo, i: usize, ring: Ring<BigInt>) -> Result<LieLayerMatrix> {
    lie_layer_matrix_with(phi, i, ring, &MagnusCaps::default())
}

/// The induced map on `gamma_i / gamma_{i+1}` is the degree-`i` part of the
/// graded Lie homomorphism generated by the abelianization, so each basis
/// bracket is mapped by linear substitution `X_j -> sum_k A[k][j] X_k`.
pub fn lie_layer_matrix_with(
    phi: &FreeEndo,
    i: usize,
    ring: Ring<BigInt>,
    caps: &MagnusCaps,
) -> Result<LieLayerMatrix> {
    if i == 0 {
        return Err(Error::Malformed("layer index must be at least 1".into()));
    }
    let n = phi.rank();
    let (basis, polys) = layer_basis(n, i, caps)?;
    let a = phi.abelianization_matrix();
    let linear: Vec<Vec<(u8, BigInt)>> = (0..n)
        .map(|j| {
            (0..n)
                .filter(|&k| !a[(k, j)].is_zero())
                .map(|k| (k as u8, a[(k, j)].clone()))
                .collect()
        })
        .collect();
    let dim = basis.len();
    let mut m = Matrix::<BigInt>::zeros(dim, dim);
    for (col, p) in polys.iter().enumerate() {
        let image = substitute_linear(p, &linear);
        let coords = lyndon_coordinates(&image, &basis, &polys)
            .expect("image of a Lie element is a Lie element");
        for (row, c) in coords.into_iter().enumerate() {
            m[(row, col)] = ring.reduce(c);
        }
    }
    Ok(LieLayerMatrix {
        layer: i,
        basis,
        ring,
        matrix: m,
    })
}

fn substitute_linear(p: &LiePoly, linear: &[Vec<(u8, BigInt)>]) -> LiePoly {
    let mut out = LiePoly::new();
    for (m, c) in p {
        let mut partial: Vec<(Monomial, BigInt)> = vec![(Vec::with_capacity(m.len()), c.clone())];
        for &v in m {
            let mut next = Vec::with_capacity(partial.len() * linear[v as usize].len());
            for (pm, pc) in &partial {
                for (k, a) in &linear[v as usize] {
                    let mut nm = pm.clone();
                    nm.push(*k);
                    next.push((nm, pc * a));
                }
            }
            partial = next;
        }
        for (nm, nc) in partial {
            lyndon::add_to(&mut out, nm, nc);
        }
    }
    out
}

/// Layer matrix computed the long way: Magnus-expand `phi` applied to each
/// basic commutator and read off the degree-`i` component. Used as a cross
/// check of [`lie_layer_matrix`].
pub fn lie_layer_matrix_by_expansion(phi: &FreeEndo, i: usize) -> Result<IntMatrix> {
    let n = phi.rank();
    let (basis, polys) = layer_basis(n, i, &MagnusCaps::default())?;
    let dim = basis.len();
    let mut m = Matrix::<BigInt>::zeros(dim, dim);
    for (col, w) in basis.iter().enumerate() {
        let image = phi.apply(&basic_commutator(n, w))?;
        let s = magnus_embed::<BigInt>(&image, i, Ring::Integers);
        if (1..i).any(|k| !s.component(k).is_empty()) {
            return Err(Error::Malformed("image left the lower central term".into()));
        }
        let top: LiePoly = s.component(i).into_iter().collect();
        let coords = lyndon_coordinates(&top, &basis, &polys)
            .ok_or_else(|| Error::Malformed("leading term is not a Lie element".into()))?;
        for (row, c) in coords.into_iter().enumerate() {
            m[(row, col)] = c;
        }
    }
    Ok(m)
}

pub fn unipotent_on_layers(phi: &FreeEndo, p: u64, c: usize) -> Result<bool> {
    unipotent_on_layers_with(phi, p, c, &MagnusCaps::default())
}

pub fn unipotent_on_layers_with(phi: &FreeEndo, p: u64, c: usize, caps: &MagnusCaps) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    for i in 1..=c {
        let a = lie_layer_matrix_with(phi, i, Ring::Integers, caps)?;
        if !is_unipotent_mod(&a.matrix, p).unipotent {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn unipotent_over_z(phi: &FreeEndo, c: usize) -> Result<bool> {
    unipotent_over_z_with(phi, c, &MagnusCaps::default())
}

pub fn unipotent_over_z_with(phi: &FreeEndo, c: usize, caps: &MagnusCaps) -> Result<bool> {
    for i in 1..=c {
        let a = lie_layer_matrix_with(phi, i, Ring::Integers, caps)?;
        if !is_unipotent_over_z(&a.matrix) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(A - I)^dim == 0` exactly.
pub fn is_unipotent_over_z(a: &IntMatrix) -> bool {
    a.minus_identity().pow(a.dim() as u64).is_zero()
}

/// Order of the automorphism induced by `phi` on the level-`(p, d)` Magnus
/// quotient `F_n / ker(F_n -> units of F_p<<X>>/deg > d)`.
///
/// The quotient is generated by the images of the `x_j`, so `phi^k` is trivial
/// exactly when it fixes every `1 + X_j`.
pub fn induced_order(phi: &FreeEndo, p: u64, d: usize, cap: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let n = phi.rank();
    let ring: Ring<i64> = Ring::prime_field(p);
    let base: Vec<TruncatedSeries<i64>> = phi
        .images()
        .iter()
        .map(|w| magnus_embed(w, d, ring.clone()))
        .collect();
    let targets: Vec<TruncatedSeries<i64>> = (0..n)
        .map(|j| TruncatedSeries::one(n, d, ring.clone()).mul_generator(j))
        .collect();
    let one = TruncatedSeries::one(n, d, ring.clone());
    let mut current = base.clone();
    let mut k = 1u64;
    while current != targets {
        if k >= cap {
            return Err(Error::CapExceeded {
                what: "induced automorphism order",
                cap,
            });
        }
        // phi^{k+1}(x_j) = phi^k(phi(x_j)): substitute X_m -> phi^k(x_m) - 1.
        let shifted: Vec<TruncatedSeries<i64>> = current.iter().map(|s| s.sub(&one)).collect();
        current = base.iter().map(|s| s.substitute(&shifted)).collect();
        k += 1;
    }
    Ok(k)
}

/// Like [`induced_order`] but insists on a `p`-power and returns the exponent.
pub fn induced_order_exponent(phi: &FreeEndo, p: u64, d: usize, cap: u64) -> Result<u32> {
    let order = induced_order(phi, p, d, cap)?;
    p_power_exponent(order, p).ok_or(Error::NonPPowerOrder { order, p })
}

/// Size of the level-`(p, d)` Magnus quotient is at most `p^(n + n^2 + ... + n^d)`;
/// this returns the exponent.
pub fn magnus_quotient_log_bound(rank: usize, d: usize) -> u64 {
    (1..=d as u32).map(|i| (rank as u64).pow(i)).sum()
}

/// Coefficients of a series as a map keyed by printable monomials.
pub fn series_table<T: Scalar>(s: &TruncatedSeries<T>) -> BTreeMap<String, String> {
    s.terms()
        .iter()
        .map(|(m, c)| {
            let key = if m.is_empty() {
                "1".to_string()
            } else {
                m.iter().map(|v| format!("X{}", v + 1)).collect::<String>()
            };
            (key, c.to_string())
        })
        .collect()
}
