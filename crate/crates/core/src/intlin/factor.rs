//! Factorization of small-degree monic integer polynomials (Kronecker's method).
//!
//! Only used on characteristic polynomials of lattice endomorphisms, whose
//! degree is bounded by the matrix dimension, so the exhaustive divisor search
//! stays small.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::intlin::Poly;
use crate::scalar::divisors;

/// Irreducible monic factors over Z, with multiplicity, in the order found.
pub fn factor_monic(f: &Poly<BigInt>) -> Vec<Poly<BigInt>> {
    assert!(f.is_monic(), "factor_monic needs a monic polynomial");
    let mut out = Vec::new();
    let mut rest = f.clone();
    'outer: while rest.degree().unwrap() > 0 {
        let deg = rest.degree().unwrap();
        for e in 1..=deg / 2 {
            if let Some(g) = find_factor(&rest, e) {
                rest = rest.div_rem_monic(&g).0;
                out.push(g);
                continue 'outer;
            }
        }
        out.push(rest);
        break;
    }
    out
}

/// A monic degree-`e` factor of `f`, if one exists.
fn find_factor(f: &Poly<BigInt>, e: usize) -> Option<Poly<BigInt>> {
    if f.coeff(0).is_zero() {
        return (e == 1).then(|| Poly::linear(BigInt::zero()));
    }
    // e interpolation nodes with f(a) != 0, preferring few divisors.
    let mut nodes: Vec<(BigInt, Vec<BigInt>)> = Vec::new();
    let mut a: i64 = 0;
    let mut candidates = Vec::new();
    while candidates.len() < e + 6 {
        for x in [a, -a] {
            if candidates.iter().any(|(y, _): &(BigInt, BigInt)| *y == BigInt::from(x)) {
                continue;
            }
            let v = f.eval(&BigInt::from(x));
            if v.is_zero() {
                // x is an integer root.
                return (e == 1).then(|| Poly::linear(BigInt::from(x)));
            }
            candidates.push((BigInt::from(x), v));
        }
        a += 1;
    }
    let mut ranked: Vec<(usize, BigInt, BigInt)> = candidates
        .into_iter()
        .map(|(x, v)| (divisors(&v).len(), x, v))
        .collect();
    ranked.sort_by(|l, r| l.0.cmp(&r.0).then(l.1.abs().cmp(&r.1.abs())));
    for (_, x, v) in ranked.into_iter().take(e) {
        let ds = divisors(&v);
        let mut signed = Vec::with_capacity(2 * ds.len());
        for d in ds {
            signed.push(-d.clone());
            signed.push(d);
        }
        nodes.push((x, signed));
    }
    let mut idx = vec![0usize; e];
    loop {
        let pts: Vec<(BigInt, BigInt)> = nodes
            .iter()
            .zip(&idx)
            .map(|((x, vals), &i)| (x.clone(), vals[i].clone()))
            .collect();
        if let Some(g) = monic_interpolant(&pts) {
            if f.divisible_by_monic(&g) {
                return Some(g);
            }
        }
        // odometer
        let mut k = 0;
        loop {
            if k == e {
                return None;
            }
            idx[k] += 1;
            if idx[k] < nodes[k].1.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// The unique monic polynomial of degree `pts.len()` through `pts`, when it
/// has integer coefficients.
fn monic_interpolant(pts: &[(BigInt, BigInt)]) -> Option<Poly<BigInt>> {
    let e = pts.len();
    let xs: Vec<BigInt> = pts.iter().map(|p| p.0.clone()).collect();
    // h(x) = g(x) - x^e has degree < e; Newton divided differences must be integral.
    let mut dd: Vec<BigInt> = pts
        .iter()
        .map(|(x, y)| y - num_traits::pow(x.clone(), e))
        .collect();
    for level in 1..e {
        for i in (level..e).rev() {
            let num = &dd[i] - &dd[i - 1];
            let den = &xs[i] - &xs[i - level];
            if !(&num % &den).is_zero() {
                return None;
            }
            dd[i] = num / den;
        }
    }
    let mut h = Poly::new(vec![dd[e - 1].clone()]);
    for i in (0..e - 1).rev() {
        h = h.mul(&Poly::linear(xs[i].clone())).add(&Poly::new(vec![dd[i].clone()]));
    }
    let mut lead = vec![BigInt::zero(); e + 1];
    lead[e] = BigInt::one();
    Some(Poly::new(lead).add(&h))
}
