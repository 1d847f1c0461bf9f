use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Dense univariate integer polynomial, coefficients from the constant term up.
/// Trailing zeros are trimmed, so the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Poly<T> {
    #[serde(with = "crate::scalar::json::vec")]
    coeffs: Vec<T>,
}

impl<T: Scalar> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| T::int(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::new(vec![T::one()])
    }

    /// `x - c`
    pub fn linear(c: T) -> Self {
        Self::new(vec![-c, T::one()])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeffs_i64(&self) -> Vec<i64> {
        self.coeffs
            .iter()
            .map(|c| c.to_i64().expect("coefficient fits in i64"))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Quotient and remainder by a monic divisor; exact over the integers.
    pub fn div_rem_monic(&self, divisor: &Self) -> (Self, Self) {
        assert!(divisor.is_monic(), "divisor must be monic");
        let dd = divisor.degree().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![T::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone();
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].clone() - c.clone() * d.clone();
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn divisible_by_monic(&self, divisor: &Self) -> bool {
        self.div_rem_monic(divisor).1.is_zero()
    }

    /// `(x - 1)^n`
    pub fn x_minus_one_pow(n: usize) -> Self {
        Self::linear(T::one()).pow(n as u32)
    }

    /// gcd of all coefficients (non-negative; zero for the zero polynomial).
    pub fn content(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |acc, c| num_integer::Integer::gcd(&acc, c))
    }

    pub fn reduce_mod(&self, m: &T) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.modulo(m)).collect())
    }

    /// The `k`-th cyclotomic polynomial.
    pub fn cyclotomic(k: usize) -> Self {
        assert!(k >= 1);
        let mut xk = vec![T::zero(); k + 1];
        xk[0] = -T::one();
        xk[k] = T::one();
        let mut p = Self::new(xk);
        for d in 1..k {
            if k.is_multiple_of(d) {
                p = p.div_rem_monic(&Self::cyclotomic(d)).0;
            }
        }
        p
    }

    /// Whether this monic polynomial is a product of cyclotomic polynomials,
    /// i.e. all of its roots are roots of unity.
    pub fn is_cyclotomic_product(&self) -> bool {
        if !self.is_monic() {
            return false;
        }
        let mut rest = self.clone();
        let mut k = 1usize;
        // phi(k) >= sqrt(k/2), so k <= 2 deg^2 covers every factor that can occur.
        let bound = 2 * self.degree().unwrap().pow(2) + 2;
        while rest.degree().unwrap() > 0 && k <= bound {
            let c = Self::cyclotomic(k);
            let (q, r) = rest.div_rem_monic(&c);
            if r.is_zero() {
                rest = q;
            } else {
                k += 1;
            }
        }
        rest.degree() == Some(0)
    }
}

impl<T: Scalar> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match (i, abs.is_one()) {
                (0, _) => write!(f, "{abs}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{abs}x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{abs}x^{i}")?,
            }
        }
        Ok(())
    }
}

impl<T: Scalar> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}
