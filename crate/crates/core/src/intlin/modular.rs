use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intlin::Matrix;
use crate::scalar::{is_prime, p_power_exponent, Scalar};

/// Square matrix over `Z/m` with `m` a prime power, entries kept in `[0, m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct ModMatrix<T> {
    #[serde(with = "crate::scalar::json")]
    modulus: T,
    entries: Matrix<T>,
}

impl<T: Scalar> ModMatrix<T> {
    pub fn new(entries: &Matrix<T>, modulus: T) -> Result<Self> {
        let m = modulus.to_u64().unwrap_or(0);
        let prime_power = (2..=m).find(|&q| m.is_multiple_of(q)).is_some_and(|q| {
            is_prime(q) && p_power_exponent(m, q).is_some()
        });
        if !prime_power || !entries.is_square() {
            return Err(Error::Malformed(format!(
                "modulus {modulus} must be a prime power and the matrix square"
            )));
        }
        Ok(Self {
            entries: entries.reduce_mod(&modulus),
            modulus,
        })
    }

    pub fn modulus(&self) -> &T {
        &self.modulus
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.modulus, other.modulus);
        Self {
            entries: self.entries.mul_ref(&other.entries).reduce_mod(&self.modulus),
            modulus: self.modulus.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.entries.is_identity()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_zero()
    }

    pub fn minus_identity(&self) -> Self {
        Self {
            entries: self.entries.minus_identity().reduce_mod(&self.modulus),
            modulus: self.modulus.clone(),
        }
    }

    pub fn det(&self) -> T {
        self.entries.det().modulo(&self.modulus)
    }
}

/// Result of a unipotence test modulo `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unipotence {
    pub unipotent: bool,
    /// Least `j >= 1` with `(M - I)^j = 0 mod p`; present when unipotent.
    pub index: Option<usize>,
}

/// Whether `(M - I)^n = 0 mod p`, with the nilpotency index of `M - I`.
/// The identity has index 1 by convention (`M - I` is already zero).
pub fn is_unipotent_mod<T: Scalar>(m: &Matrix<T>, p: u64) -> Unipotence {
    let pm = T::from_u64(p).expect("prime fits scalar");
    let n = m.dim();
    let b = m.minus_identity().reduce_mod(&pm);
    let mut power = b.clone();
    for j in 1..=n {
        if power.is_zero() {
            return Unipotence {
                unipotent: true,
                index: Some(j),
            };
        }
        power = power.mul_ref(&b).reduce_mod(&pm);
    }
    Unipotence {
        unipotent: false,
        index: None,
    }
}

/// `p^(k n^2)`, saturating.
pub fn default_order_cap(p: u64, k: u32, n: usize) -> u64 {
    let e = (k as u64).saturating_mul((n * n) as u64);
    let mut acc: u64 = 1;
    for _ in 0..e {
        acc = acc.saturating_mul(p);
        if acc == u64::MAX {
            break;
        }
    }
    acc
}

/// Least `m >= 1` with `M^m = I mod p^k`.
pub fn matrix_order_mod<T: Scalar>(m: &Matrix<T>, p: u64, k: u32, cap: u64) -> Result<u64> {
    let pm = T::from_u64(p).expect("prime fits scalar");
    if m.det().modulo(&pm).is_zero() {
        return Err(Error::NotInvertibleMod(p.to_string()));
    }
    let modulus = num_traits::pow(pm, k as usize);
    let base = m.reduce_mod(&modulus);
    let mut acc = base.clone();
    let mut order = 1u64;
    while !acc.is_identity() {
        if order >= cap {
            return Err(Error::CapExceeded {
                what: "matrix order",
                cap,
            });
        }
        acc = acc.mul_ref(&base).reduce_mod(&modulus);
        order += 1;
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn m(rows: &[&[i64]]) -> Matrix<BigInt> {
        Matrix::from_i64_rows(rows).unwrap()
    }

    #[test]
    fn unipotence_examples() {
        let u = is_unipotent_mod(&m(&[&[13, 8], &[8, 5]]), 2);
        assert!(u.unipotent);
        assert!(!is_unipotent_mod(&m(&[&[2, 1], &[1, 1]]), 2).unipotent);
        for p in [2, 3, 5, 7] {
            let u = is_unipotent_mod(&Matrix::<BigInt>::identity(3), p);
            assert_eq!(u, Unipotence { unipotent: true, index: Some(1) });
        }
        // A 3x3 Jordan block has index 3.
        let j = m(&[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]);
        assert_eq!(is_unipotent_mod(&j, 5).index, Some(3));
    }

    #[test]
    fn orders() {
        assert_eq!(matrix_order_mod(&m(&[&[2, 1], &[1, 1]]), 2, 1, 100), Ok(3));
        assert_eq!(matrix_order_mod(&Matrix::<BigInt>::identity(2), 5, 2, 10), Ok(1));
        let cyc = m(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]);
        assert_eq!(matrix_order_mod(&cyc, 2, 1, 10), Ok(3));
        assert!(matches!(
            matrix_order_mod(&m(&[&[2, 0], &[0, 1]]), 2, 1, 10),
            Err(Error::NotInvertibleMod(_))
        ));
        assert!(matches!(
            matrix_order_mod(&m(&[&[1, 1], &[0, 1]]), 7, 1, 3),
            Err(Error::CapExceeded { .. })
        ));
        // [[1,1],[0,1]] has order p^k modulo p^k.
        assert_eq!(matrix_order_mod(&m(&[&[1, 1], &[0, 1]]), 3, 2, 1000), Ok(9));
    }

    #[test]
    fn mod_matrix_rejects_composite_modulus() {
        assert!(ModMatrix::new(&m(&[&[1]]), BigInt::from(6)).is_err());
        assert!(ModMatrix::new(&m(&[&[1]]), BigInt::from(9)).is_ok());
        let a = ModMatrix::new(&m(&[&[-1, 5], &[2, 3]]), BigInt::from(4)).unwrap();
        assert_eq!(a.matrix(), &m(&[&[3, 1], &[2, 3]]));
    }
}
