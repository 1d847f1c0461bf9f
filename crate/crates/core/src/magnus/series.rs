use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Coefficient ring of a truncated series: the integers or `Z/m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub enum Ring<T> {
    Integers,
    /// `Z/m` for a prime power `m`; `m = p` is the field `F_p`.
    Modulo(#[serde(with = "crate::scalar::json")] T),
}

impl<T: Scalar> Ring<T> {
    pub fn prime_field(p: u64) -> Self {
        Ring::Modulo(T::from_u64(p).expect("modulus fits scalar"))
    }

    pub fn reduce(&self, x: T) -> T {
        match self {
            Ring::Integers => x,
            Ring::Modulo(m) => x.modulo(m),
        }
    }
}

/// A monomial `X_{i1} X_{i2} ... X_{ik}`, variables numbered from 0.
pub type Monomial = Vec<u8>;

/// Element of `R<<X_1..X_n>>` truncated above degree `d`.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries<T> {
    rank: usize,
    degree: usize,
    ring: Ring<T>,
    terms: BTreeMap<Monomial, T>,
}

impl<T: Scalar> TruncatedSeries<T> {
    pub fn zero(rank: usize, degree: usize, ring: Ring<T>) -> Self {
        Self {
            rank,
            degree,
            ring,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(rank: usize, degree: usize, ring: Ring<T>) -> Self {
        let mut s = Self::zero(rank, degree, ring);
        s.add_term(Vec::new(), T::one());
        s
    }

    /// The variable `X_i` (0-based).
    pub fn variable(rank: usize, degree: usize, ring: Ring<T>, i: usize) -> Self {
        let mut s = Self::zero(rank, degree, ring);
        if degree >= 1 {
            s.add_term(vec![i as u8], T::one());
        }
        s
    }

    pub fn from_terms(
        rank: usize,
        degree: usize,
        ring: Ring<T>,
        terms: impl IntoIterator<Item = (Monomial, T)>,
    ) -> Self {
        let mut s = Self::zero(rank, degree, ring);
        for (m, c) in terms {
            s.add_term(m, c);
        }
        s
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn ring(&self) -> &Ring<T> {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, T> {
        &self.terms
    }

    pub fn coeff(&self, m: &[u8]) -> T {
        self.terms.get(m).cloned().unwrap_or_else(T::zero)
    }

    pub fn constant(&self) -> T {
        self.coeff(&[])
    }

    pub fn add_term(&mut self, m: Monomial, c: T) {
        if m.len() > self.degree {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                let c = self.ring.reduce(c);
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let c = self.ring.reduce(o.get().clone() + c);
                if c.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = c;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant().is_one()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self::from_terms(
            self.rank,
            self.degree,
            self.ring.clone(),
            self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.rank, other.rank);
        let d = self.degree.min(other.degree);
        let mut acc: HashMap<Monomial, T> = HashMap::new();
        for (a, ca) in &self.terms {
            if a.len() > d {
                continue;
            }
            for (b, cb) in &other.terms {
                if a.len() + b.len() > d {
                    continue;
                }
                let mut m = Vec::with_capacity(a.len() + b.len());
                m.extend_from_slice(a);
                m.extend_from_slice(b);
                let e = acc.entry(m).or_insert_with(T::zero);
                *e = e.clone() + ca.clone() * cb.clone();
            }
        }
        let mut out = Self::zero(self.rank, d, self.ring.clone());
        for (m, c) in acc {
            out.add_term(m, c);
        }
        out
    }

    /// Right multiplication by `X_i`, dropping terms pushed past the degree.
    fn shift(&self, i: u8) -> Self {
        let mut out = Self::zero(self.rank, self.degree, self.ring.clone());
        for (m, c) in &self.terms {
            if m.len() < self.degree {
                let mut m = m.clone();
                m.push(i);
                out.terms.insert(m, c.clone());
            }
        }
        out
    }

    /// `self * (1 + X_i)`
    pub fn mul_generator(&self, i: usize) -> Self {
        self.add(&self.shift(i as u8))
    }

    /// `self * (1 + X_i)^-1 = self * (1 - X_i + X_i^2 - ...)`
    pub fn mul_generator_inverse(&self, i: usize) -> Self {
        let mut out = self.clone();
        let mut cur = self.clone();
        for _ in 0..self.degree {
            cur = cur.shift(i as u8).neg();
            if cur.is_zero() {
                break;
            }
            out = out.add(&cur);
        }
        out
    }

    /// Inverse of a series with constant term 1.
    pub fn inverse_unit(&self) -> Option<Self> {
        if !self.constant().is_one() {
            return None;
        }
        let one = Self::one(self.rank, self.degree, self.ring.clone());
        let u = self.sub(&one);
        let neg_u = u.neg();
        let mut out = one.clone();
        let mut power = one;
        for _ in 0..self.degree {
            power = power.mul(&neg_u);
            if power.is_zero() {
                break;
            }
            out = out.add(&power);
        }
        Some(out)
    }

    /// Group commutator `a b a^-1 b^-1` of two units.
    pub fn group_commutator(&self, other: &Self) -> Self {
        let ai = self.inverse_unit().expect("unit");
        let bi = other.inverse_unit().expect("unit");
        self.mul(other).mul(&ai).mul(&bi)
    }

    /// Homogeneous component of degree `k`.
    pub fn component(&self, k: usize) -> BTreeMap<Monomial, T> {
        self.terms
            .iter()
            .filter(|(m, _)| m.len() == k)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect()
    }

    /// Least degree `>= 1` carrying a nonzero coefficient.
    pub fn lowest_nonconstant_degree(&self) -> Option<usize> {
        self.terms.keys().map(Vec::len).filter(|&l| l > 0).min()
    }

    pub fn truncate(&self, degree: usize) -> Self {
        Self::from_terms(
            self.rank,
            degree.min(self.degree),
            self.ring.clone(),
            self.terms.iter().map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    pub fn reduce(&self, ring: Ring<T>) -> Self {
        Self::from_terms(
            self.rank,
            self.degree,
            ring,
            self.terms.iter().map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    /// Algebra substitution `X_j -> images[j]`; every image must have zero
    /// constant term so that truncation is respected.
    pub fn substitute(&self, images: &[Self]) -> Self {
        debug_assert!(images.iter().all(|y| y.constant().is_zero()));
        let one = Self::one(self.rank, self.degree, self.ring.clone());
        let mut cache: HashMap<Monomial, Self> = HashMap::new();
        cache.insert(Vec::new(), one);
        let mut out = Self::zero(self.rank, self.degree, self.ring.clone());
        // BTreeMap order visits every prefix before its extensions; terms
        // absent from the series still need their prefixes computed.
        for (m, c) in &self.terms {
            let prod = monomial_image(m, images, &mut cache);
            for (pm, pc) in &prod.terms {
                out.add_term(pm.clone(), pc.clone() * c.clone());
            }
        }
        out
    }
}

fn monomial_image<T: Scalar>(
    m: &[u8],
    images: &[TruncatedSeries<T>],
    cache: &mut HashMap<Monomial, TruncatedSeries<T>>,
) -> TruncatedSeries<T> {
    if let Some(s) = cache.get(m) {
        return s.clone();
    }
    let (last, prefix) = m.split_last().expect("empty monomial is cached");
    let p = monomial_image(prefix, images, cache);
    let s = p.mul(&images[*last as usize]);
    cache.insert(m.to_vec(), s.clone());
    s
}

impl<T: Scalar> fmt::Display for TruncatedSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<(&Monomial, &T)> = self.terms.iter().collect();
        ordered.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.0.cmp(b.0)));
        for (k, (m, c)) in ordered.into_iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if m.is_empty() {
                write!(f, "{c}")?;
                continue;
            }
            if !c.is_one() {
                write!(f, "{c}*")?;
            }
            for v in m.iter() {
                write!(f, "X{}", v + 1)?;
            }
        }
        Ok(())
    }
}

impl<T: Scalar> fmt::Debug for TruncatedSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedSeries[d={}]({self})", self.degree)
    }
}
