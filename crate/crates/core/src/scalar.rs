//! Integer scalar abstraction and small number-theory helpers.
//!
//! Everything in this crate is exact. Matrices, polynomials, truncated series
//! and extension elements are generic over [`Scalar`], which is satisfied by
//! the machine integers `i64`/`i128` and by [`num_bigint::BigInt`]. The
//! classifiers use `BigInt` through the aliases at the crate root; the
//! machine types are there for the hot loops of the Magnus engine where
//! every coefficient is reduced modulo a small prime power.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// Exact integer scalar.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + Eq
    + Ord
    + Hash
    + Integer
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    fn int(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("scalar cannot hold i64 value")
    }

    fn from_big(v: &BigInt) -> Option<Self>;

    fn to_big(&self) -> BigInt;

    /// Least non-negative residue modulo `m` (`m > 0`).
    fn modulo(&self, m: &Self) -> Self {
        self.mod_floor(m)
    }
}

impl Scalar for i64 {
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i64()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Scalar for i128 {
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Scalar for BigInt {
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&n| is_prime(n)).collect()
}

/// Distinct prime divisors of `|n|` in increasing order, by trial division.
/// `n` must be nonzero.
pub fn prime_divisors(n: &BigInt) -> Vec<BigInt> {
    assert!(!n.is_zero_big(), "prime_divisors of zero");
    let mut n = n.abs();
    let mut out = Vec::new();
    let two = BigInt::from(2);
    if n.is_even() {
        out.push(two.clone());
        while n.is_even() {
            n /= &two;
        }
    }
    let mut d = BigInt::from(3);
    while &d * &d <= n {
        if (&n % &d).is_zero_big() {
            out.push(d.clone());
            while (&n % &d).is_zero_big() {
                n /= &d;
            }
        }
        d += 2;
    }
    if n > BigInt::from(1) {
        out.push(n);
    }
    out
}

/// All positive divisors of `|n|` (`n != 0`), increasing.
pub fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut primes = Vec::new();
    let mut rest = n.clone();
    for p in prime_divisors(&n) {
        let mut e = 0u32;
        while (&rest % &p).is_zero_big() {
            rest /= &p;
            e += 1;
        }
        primes.push((p, e));
    }
    let mut out = vec![BigInt::from(1)];
    for (p, e) in primes {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for d in &out {
            let mut pk = BigInt::from(1);
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// `Some(k)` when `n == p^k` (with `n >= 1`).
pub fn p_power_exponent(n: u64, p: u64) -> Option<u32> {
    if n == 0 || p < 2 {
        return None;
    }
    let mut n = n;
    let mut k = 0;
    while n.is_multiple_of(p) {
        n /= p;
        k += 1;
    }
    (n == 1).then_some(k)
}

trait ZeroBig {
    fn is_zero_big(&self) -> bool;
}

impl ZeroBig for BigInt {
    fn is_zero_big(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}


/// Serde adapters for integers in JSON: a number when the value fits in
/// `i64`, a decimal string otherwise. Both forms are accepted on input.
pub mod json {
    use std::fmt;
    use std::marker::PhantomData;

    use num_bigint::BigInt;
    use serde::de::{self, Visitor};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::Scalar;

    pub struct Ser<'a, T>(pub &'a T);

    impl<T: Scalar> Serialize for Ser<'_, T> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            match self.0.to_i64() {
                Some(x) => s.serialize_i64(x),
                None => s.collect_str(self.0),
            }
        }
    }

    pub struct De<T>(pub T);

    impl<'de, T: Scalar> Deserialize<'de> for De<T> {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            struct V<T>(PhantomData<T>);
            impl<T: Scalar> V<T> {
                fn fit<E: de::Error>(b: BigInt) -> Result<De<T>, E> {
                    T::from_big(&b)
                        .map(De)
                        .ok_or_else(|| E::custom(format!("integer {b} out of range")))
                }
            }
            impl<T: Scalar> Visitor<'_> for V<T> {
                type Value = De<T>;

                fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                    f.write_str("an integer or a decimal string")
                }

                fn visit_i64<E: de::Error>(self, v: i64) -> Result<De<T>, E> {
                    Self::fit(v.into())
                }

                fn visit_u64<E: de::Error>(self, v: u64) -> Result<De<T>, E> {
                    Self::fit(v.into())
                }

                fn visit_i128<E: de::Error>(self, v: i128) -> Result<De<T>, E> {
                    Self::fit(v.into())
                }

                fn visit_str<E: de::Error>(self, v: &str) -> Result<De<T>, E> {
                    let b = v
                        .trim()
                        .parse::<BigInt>()
                        .map_err(|_| E::invalid_value(de::Unexpected::Str(v), &self))?;
                    Self::fit(b)
                }
            }
            d.deserialize_any(V(PhantomData))
        }
    }

    pub fn serialize<T: Scalar, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        Ser(v).serialize(s)
    }

    pub fn deserialize<'de, T: Scalar, D: Deserializer<'de>>(d: D) -> Result<T, D::Error> {
        De::deserialize(d).map(|x| x.0)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<T: Scalar, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(Ser))
        }

        pub fn deserialize<'de, T: Scalar, D: Deserializer<'de>>(d: D) -> Result<Vec<T>, D::Error> {
            Ok(Vec::<De<T>>::deserialize(d)?.into_iter().map(|x| x.0).collect())
        }
    }

    pub mod vec2 {
        use super::*;

        pub fn serialize<T: Scalar, S: Serializer>(v: &[Vec<T>], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|r| r.iter().map(Ser).collect::<Vec<_>>()))
        }

        pub fn deserialize<'de, T: Scalar, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<T>>, D::Error> {
            Ok(Vec::<Vec<De<T>>>::deserialize(d)?
                .into_iter()
                .map(|r| r.into_iter().map(|x| x.0).collect())
                .collect())
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<T: Scalar, S: Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
            v.as_ref().map(Ser).serialize(s)
        }

        pub fn deserialize<'de, T: Scalar, D: Deserializer<'de>>(d: D) -> Result<Option<T>, D::Error> {
            Ok(Option::<De<T>>::deserialize(d)?.map(|x| x.0))
        }
    }
}
