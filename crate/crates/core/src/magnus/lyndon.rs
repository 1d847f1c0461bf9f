//! Lyndon words, their standard bracketing, and rewriting of homogeneous Lie
//! elements in the Lyndon basis.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::series::Monomial;
use crate::freegrp::FreeWord;

/// Homogeneous noncommutative polynomial with integer coefficients.
pub type LiePoly = BTreeMap<Monomial, BigInt>;

/// Lyndon words of length exactly `len` over `{0..rank-1}`, in lexicographic order.
pub fn lyndon_words(rank: usize, len: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    if rank == 0 || len == 0 {
        return out;
    }
    // Duval's generator.
    let k = rank as u8;
    let mut w: Vec<u8> = vec![0];
    loop {
        if w.len() == len {
            out.push(w.clone());
        }
        let m = w.len();
        while w.len() < len {
            let c = w[w.len() - m];
            w.push(c);
        }
        while w.last() == Some(&(k - 1)) {
            w.pop();
        }
        match w.last_mut() {
            Some(c) => *c += 1,
            None => break,
        }
    }
    out
}

pub fn is_lyndon(w: &[u8]) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| w < &w[i..])
}

/// Standard factorization `w = u v` with `v` the longest proper Lyndon suffix.
pub fn standard_factorization(w: &[u8]) -> Option<(&[u8], &[u8])> {
    if w.len() < 2 {
        return None;
    }
    (1..w.len())
        .find(|&i| is_lyndon(&w[i..]))
        .map(|i| (&w[..i], &w[i..]))
}

pub fn lie_bracket(a: &LiePoly, b: &LiePoly) -> LiePoly {
    let mut out = LiePoly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let c = ca * cb;
            let mut ab = ma.clone();
            ab.extend_from_slice(mb);
            let mut ba = mb.clone();
            ba.extend_from_slice(ma);
            add_to(&mut out, ab, c.clone());
            add_to(&mut out, ba, -c);
        }
    }
    out
}

pub(crate) fn add_to(p: &mut LiePoly, m: Monomial, c: BigInt) {
    if c.is_zero() {
        return;
    }
    match p.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// Bracket polynomial `P(w)` of a Lyndon word under its standard bracketing.
pub fn bracket_polynomial(w: &[u8]) -> LiePoly {
    match standard_factorization(w) {
        None => {
            let mut p = LiePoly::new();
            p.insert(w.to_vec(), BigInt::one());
            p
        }
        Some((u, v)) => lie_bracket(&bracket_polynomial(u), &bracket_polynomial(v)),
    }
}

/// Group commutator of the same shape as the standard bracketing, so that its
/// Magnus expansion is `1 + P(w) + higher terms`.
pub fn basic_commutator(rank: usize, w: &[u8]) -> FreeWord {
    match standard_factorization(w) {
        None => FreeWord::generator(rank, w[0] as usize + 1),
        Some((u, v)) => basic_commutator(rank, u)
            .commutator(&basic_commutator(rank, v))
            .expect("same rank"),
    }
}

/// Coordinates of a homogeneous Lie element of degree `basis[0].len()` in the
/// Lyndon basis. Returns `None` if the element is not a Lie element.
///
/// `P(l)` equals `l` plus lexicographically larger words, so eliminating the
/// smallest word in the support is triangular.
pub fn lyndon_coordinates(q: &LiePoly, basis: &[Monomial], polys: &[LiePoly]) -> Option<Vec<BigInt>> {
    let index: BTreeMap<&[u8], usize> = basis.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
    let mut rest = q.clone();
    let mut coords = vec![BigInt::zero(); basis.len()];
    while let Some((m, c)) = rest.iter().next().map(|(m, c)| (m.clone(), c.clone())) {
        let &k = index.get(m.as_slice())?;
        for (pm, pc) in &polys[k] {
            add_to(&mut rest, pm.clone(), -(&c * pc));
        }
        coords[k] += c;
    }
    Some(coords)
}

/// Dimension of the degree-`i` layer of the free Lie algebra of rank `n`.
pub fn witt_dimension(n: usize, i: usize) -> usize {
    if i == 0 {
        return 0;
    }
    let n = BigInt::from(n);
    let mut total = BigInt::zero();
    for e in 1..=i {
        if i.is_multiple_of(e) {
            let mu = mobius(e);
            if mu != 0 {
                total += BigInt::from(mu) * num_traits::pow(n.clone(), i / e);
            }
        }
    }
    let d: BigInt = total / BigInt::from(i);
    num_traits::ToPrimitive::to_usize(&d).expect("layer dimension fits usize")
}

fn mobius(mut n: usize) -> i64 {
    let mut mu = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}
