//! Dense linear algebra over a prime field with `u64` entries.

use std::collections::{BTreeSet, VecDeque};

/// Matrix over `F_p`, row-major, entries in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpMatrix {
    pub p: u64,
    pub n: usize,
    pub data: Vec<u64>,
}

impl FpMatrix {
    pub fn new(p: u64, n: usize, data: Vec<u64>) -> Self {
        Self {
            p,
            n,
            data: data.into_iter().map(|x| x % p).collect(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.n + j]
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        (0..self.n)
            .map(|i| (0..self.n).fold(0, |acc, j| (acc + self.get(i, j) * v[j]) % self.p))
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Subspace of `F_p^n` held as a reduced row echelon basis, which is
/// canonical, so equal subspaces compare equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subspace {
    pub rows: Vec<Vec<u64>>,
}

impl Subspace {
    pub fn zero() -> Self {
        Self { rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows
            .iter()
            .map(|r| r.iter().position(|&x| x != 0).expect("nonzero row"))
            .collect()
    }

    /// Residue of `v` after clearing the pivot coordinates.
    pub fn reduce(&self, v: &[u64], p: u64) -> Vec<u64> {
        let mut v = v.to_vec();
        for (row, pc) in self.rows.iter().zip(self.pivots()) {
            let c = v[pc];
            if c != 0 {
                for (x, r) in v.iter_mut().zip(row) {
                    *x = (*x + (p - c) * r) % p;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[u64], p: u64) -> bool {
        self.reduce(v, p).iter().all(|&x| x == 0)
    }

    /// Adds `v` (if new) and returns whether the dimension grew.
    pub fn insert(&mut self, v: &[u64], p: u64) -> bool {
        let mut r = self.reduce(v, p);
        let Some(pc) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inv_mod(r[pc], p);
        for x in r.iter_mut() {
            *x = *x * inv % p;
        }
        for row in self.rows.iter_mut() {
            let c = row[pc];
            if c != 0 {
                for (x, y) in row.iter_mut().zip(&r) {
                    *x = (*x + (p - c) * y) % p;
                }
            }
        }
        self.rows.push(r);
        self.rows.sort_by_key(|row| row.iter().position(|&x| x != 0));
        true
    }

    /// Smallest `M`-invariant subspace containing `self` and `v`.
    pub fn invariant_closure(&self, v: &[u64], m: &FpMatrix) -> Self {
        let mut out = self.clone();
        let mut queue = VecDeque::from([v.to_vec()]);
        while let Some(w) = queue.pop_front() {
            if out.insert(&w, m.p) {
                queue.push_back(m.apply(&w));
            }
        }
        out
    }

    /// Matrix of the action induced by `M` on `F_p^n / self`, in the
    /// coordinates of the non-pivot positions. `self` must be invariant.
    pub fn quotient_action(&self, m: &FpMatrix) -> FpMatrix {
        let piv: BTreeSet<usize> = self.pivots().into_iter().collect();
        let free: Vec<usize> = (0..m.n).filter(|j| !piv.contains(j)).collect();
        let k = free.len();
        let mut data = vec![0; k * k];
        for (c, &j) in free.iter().enumerate() {
            let img = self.reduce(&m.column(j), m.p);
            for (r, &i) in free.iter().enumerate() {
                data[r * k + c] = img[i];
            }
        }
        FpMatrix::new(m.p, k, data)
    }
}

/// Image of `M` as a subspace.
pub fn image(m: &FpMatrix) -> Subspace {
    let mut s = Subspace::zero();
    for j in 0..m.n {
        s.insert(&m.column(j), m.p);
    }
    s
}

pub fn mat_mul(a: &FpMatrix, b: &FpMatrix) -> FpMatrix {
    let n = a.n;
    let mut data = vec![0; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a.get(i, k);
            if x == 0 {
                continue;
            }
            for j in 0..n {
                data[i * n + j] = (data[i * n + j] + x * b.get(k, j)) % a.p;
            }
        }
    }
    FpMatrix { p: a.p, n, data }
}

pub fn identity(p: u64, n: usize) -> FpMatrix {
    FpMatrix::new(p, n, (0..n * n).map(|k| u64::from(k / n == k % n)).collect())
}

pub fn mat_pow(a: &FpMatrix, mut e: u64) -> FpMatrix {
    let mut acc = identity(a.p, a.n);
    let mut b = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = mat_mul(&acc, &b);
        }
        b = mat_mul(&b, &b);
        e >>= 1;
    }
    acc
}

pub fn minus_identity(a: &FpMatrix) -> FpMatrix {
    let mut out = a.clone();
    for i in 0..a.n {
        out.data[i * a.n + i] = (out.data[i * a.n + i] + a.p - 1) % a.p;
    }
    out
}

/// Multiplicative order of an invertible matrix, or `None` past `cap`.
pub fn order(a: &FpMatrix, cap: u64) -> Option<u64> {
    let id = identity(a.p, a.n);
    let mut acc = a.clone();
    let mut k = 1;
    while acc != id {
        if k >= cap {
            return None;
        }
        acc = mat_mul(&acc, a);
        k += 1;
    }
    Some(k)
}
