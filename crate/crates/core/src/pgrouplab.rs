//! Brute-force finite `p`-groups of small matrices over `Z/p^k`, used to test
//! the group-theoretic lemmas the classifiers rest on.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{is_prime, p_power_exponent};

/// Default bound on the order of a generated group.
pub const DEFAULT_ORDER_CAP: usize = 100_000;
/// Largest group for which a multiplication table and the subgroup lattice
/// are built.
pub const TABLE_LIMIT: usize = 2_187;

type Elem = Vec<u64>;

/// A subgroup as the sorted list of element indices.
pub type Subgroup = Vec<u32>;

#[derive(Clone, Debug)]
pub struct FinitePGroup {
    p: u64,
    modulus: u64,
    dim: usize,
    elements: Vec<Elem>,
    index: HashMap<Elem, u32>,
    table: Option<Vec<u32>>,
    inverses: Vec<u32>,
    identity: u32,
}

fn mat_mul(a: &[u64], b: &[u64], n: usize, m: u64) -> Elem {
    let mut out = vec![0; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = (out[i * n + j] + x * b[k * n + j]) % m;
            }
        }
    }
    out
}

/// Explicit closure of the group generated by `gens` (square matrices given
/// as rows) over `Z/p^k`.
pub fn generate_group(gens: &[Vec<Vec<i64>>], p: u64, k: u32, cap: usize) -> Result<FinitePGroup> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let modulus = p.pow(k);
    let dim = gens.first().map_or(1, Vec::len);
    let mut flat: Vec<Elem> = Vec::new();
    for g in gens {
        if g.len() != dim || g.iter().any(|r| r.len() != dim) {
            return Err(Error::Malformed("generators must be square of one size".into()));
        }
        flat.push(
            g.iter()
                .flatten()
                .map(|&x| x.rem_euclid(modulus as i64) as u64)
                .collect(),
        );
    }
    let id: Elem = (0..dim * dim).map(|t| u64::from(t / dim == t % dim)).collect();
    let mut elements = vec![id.clone()];
    let mut index: HashMap<Elem, u32> = HashMap::from([(id, 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in &flat {
            let x = mat_mul(&elements[i], g, dim, modulus);
            if !index.contains_key(&x) {
                if elements.len() >= cap {
                    return Err(Error::CapExceeded {
                        what: "group order",
                        cap: cap as u64,
                    });
                }
                index.insert(x.clone(), elements.len() as u32);
                queue.push_back(elements.len());
                elements.push(x);
            }
        }
    }
    // A finite monoid of invertible matrices closed under right
    // multiplication by generators is the group they generate, provided each
    // generator is invertible; a singular generator shows up as a missing
    // inverse below.
    let order = elements.len() as u64;
    if p_power_exponent(order, p).is_none() {
        return Err(Error::NotAPGroup(p));
    }
    let mut g = FinitePGroup {
        p,
        modulus,
        dim,
        elements,
        index,
        table: None,
        inverses: Vec::new(),
        identity: 0,
    };
    if g.order() <= TABLE_LIMIT {
        let n = g.order();
        let mut t = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                t[a * n + b] = g.lookup(&mat_mul(&g.elements[a], &g.elements[b], dim, modulus))?;
            }
        }
        g.table = Some(t);
    }
    g.inverses = (0..g.order() as u32)
        .map(|a| g.find_inverse(a))
        .collect::<Result<_>>()?;
    Ok(g)
}

impl FinitePGroup {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn element(&self, a: u32) -> &[u64] {
        &self.elements[a as usize]
    }

    fn lookup(&self, x: &Elem) -> Result<u32> {
        self.index
            .get(x)
            .copied()
            .ok_or_else(|| Error::Malformed("generators are not invertible".into()))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.table {
            Some(t) => t[a as usize * self.order() + b as usize],
            None => self
                .lookup(&mat_mul(self.element(a), self.element(b), self.dim, self.modulus))
                .expect("closed under multiplication"),
        }
    }

    fn find_inverse(&self, a: u32) -> Result<u32> {
        let mut x = a;
        let mut prev = self.identity;
        // a^(ord a) = 1, so a^(ord a - 1) is the inverse.
        for _ in 0..self.order() {
            if x == self.identity {
                return Ok(prev);
            }
            prev = x;
            x = self.mul(x, a);
        }
        Err(Error::Malformed("element of infinite order".into()))
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inverses[a as usize]
    }

    pub fn commutator(&self, a: u32, b: u32) -> u32 {
        let ab = self.mul(a, b);
        self.mul(self.mul(ab, self.inv(a)), self.inv(b))
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        (0..e).fold(self.identity, |acc, _| self.mul(acc, a))
    }

    pub fn element_order(&self, a: u32) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn whole(&self) -> Subgroup {
        (0..self.order() as u32).collect()
    }

    /// Subgroup generated by `gens`.
    pub fn closure(&self, gens: &[u32]) -> Subgroup {
        let mut seen: HashSet<u32> = HashSet::from([self.identity]);
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        let mut v: Vec<u32> = seen.into_iter().collect();
        v.sort_unstable();
        v
    }

    pub fn center(&self) -> Subgroup {
        (0..self.order() as u32)
            .filter(|&z| (0..self.order() as u32).all(|g| self.mul(z, g) == self.mul(g, z)))
            .collect()
    }

    /// Derived subgroup of `h`.
    pub fn derived(&self, h: &[u32]) -> Subgroup {
        let comms: BTreeSet<u32> = h
            .iter()
            .flat_map(|&a| h.iter().map(move |&b| (a, b)))
            .map(|(a, b)| self.commutator(a, b))
            .collect();
        self.closure(&comms.into_iter().collect::<Vec<_>>())
    }

    pub fn is_normal(&self, k: &[u32]) -> bool {
        let set: HashSet<u32> = k.iter().copied().collect();
        (0..self.order() as u32).all(|g| {
            k.iter()
                .all(|&x| set.contains(&self.mul(self.mul(g, x), self.inv(g))))
        })
    }

    fn require_table(&self) -> Result<()> {
        if self.table.is_some() {
            Ok(())
        } else {
            Err(Error::CapExceeded {
                what: "subgroup enumeration group order",
                cap: TABLE_LIMIT as u64,
            })
        }
    }

    /// Every subgroup, ordered by size and then by elements.
    pub fn subgroups(&self) -> Result<Vec<Subgroup>> {
        self.require_table()?;
        let mut found: BTreeSet<(usize, Subgroup)> = BTreeSet::new();
        let trivial = vec![self.identity];
        let mut frontier = vec![trivial.clone()];
        found.insert((1, trivial));
        while let Some(h) = frontier.pop() {
            let members: HashSet<u32> = h.iter().copied().collect();
            for g in 0..self.order() as u32 {
                if members.contains(&g) {
                    continue;
                }
                let mut gens = h.clone();
                gens.push(g);
                let s = self.closure(&gens);
                if found.insert((s.len(), s.clone())) {
                    frontier.push(s);
                }
            }
        }
        Ok(found.into_iter().map(|(_, s)| s).collect())
    }

    pub fn maximal_subgroups(&self) -> Result<Vec<Subgroup>> {
        let n = self.order();
        Ok(self
            .subgroups()?
            .into_iter()
            .filter(|s| s.len() * self.p as usize == n)
            .collect())
    }

    pub fn is_cyclic(&self, h: &[u32]) -> bool {
        h.iter().any(|&g| self.element_order(g) == h.len() as u64)
    }
}

pub fn intersect(a: &[u32], b: &[u32]) -> Subgroup {
    let bs: HashSet<u32> = b.iter().copied().collect();
    a.iter().copied().filter(|x| bs.contains(x)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrattiniData {
    pub frattini: Subgroup,
    pub frattini_order: usize,
    /// `log_p |P / Φ(P)|`
    pub rank: u32,
    pub quotient_elementary_abelian: bool,
}

pub fn frattini_data(g: &FinitePGroup) -> Result<FrattiniData> {
    let maxes = g.maximal_subgroups()?;
    let phi = maxes
        .iter()
        .fold(g.whole(), |acc, m| intersect(&acc, m));
    let set: HashSet<u32> = phi.iter().copied().collect();
    let all = 0..g.order() as u32;
    let elementary = all.clone().all(|x| set.contains(&g.pow(x, g.p)))
        && all
            .clone()
            .all(|x| (0..g.order() as u32).all(|y| set.contains(&g.commutator(x, y))));
    let rank = p_power_exponent((g.order() / phi.len()) as u64, g.p).expect("p-group index");
    Ok(FrattiniData {
        frattini_order: phi.len(),
        frattini: phi,
        rank,
        quotient_elementary_abelian: elementary,
    })
}

/// Whether every subgroup with cyclic abelianization is cyclic.
pub fn check_cyclic_abelianization(g: &FinitePGroup) -> Result<bool> {
    for h in g.subgroups()? {
        let d = g.derived(&h);
        let quotient = h.len() / d.len();
        let dset: HashSet<u32> = d.iter().copied().collect();
        // hH' has order = least m with h^m in H'
        let abel_cyclic = h.iter().any(|&x| {
            let mut y = x;
            let mut m = 1;
            while !dset.contains(&y) {
                y = g.mul(y, x);
                m += 1;
            }
            m == quotient
        });
        if abel_cyclic && !g.is_cyclic(&h) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Index of `K1 ∩ K2` in `P` is a power of `p`.
pub fn tower_lemma_check(g: &FinitePGroup, k1: &[u32], k2: &[u32]) -> Result<bool> {
    if !g.is_normal(k1) || !g.is_normal(k2) {
        return Err(Error::NotNormal);
    }
    let k = intersect(k1, k2);
    Ok(g.order().is_multiple_of(k.len()) && p_power_exponent((g.order() / k.len()) as u64, g.p).is_some())
}

/// Order of conjugation by `a` as a permutation of the group.
pub fn inner_automorphism_order(g: &FinitePGroup, a: u32) -> u64 {
    let n = g.order() as u32;
    let conj = |x: u32| g.mul(g.mul(a, x), g.inv(a));
    let mut current: Vec<u32> = (0..n).map(conj).collect();
    let mut k = 1;
    while current.iter().enumerate().any(|(i, &x)| x != i as u32) {
        current = current.into_iter().map(conj).collect();
        k += 1;
    }
    k
}

/// Size of a smallest generating set, by exhaustive search.
pub fn minimal_generating_set_size(g: &FinitePGroup) -> usize {
    let n = g.order();
    if n == 1 {
        return 0;
    }
    let all: Vec<u32> = (0..n as u32).collect();
    for size in 1..=n {
        let mut stack = vec![(0usize, Vec::<u32>::new())];
        while let Some((start, chosen)) = stack.pop() {
            if chosen.len() == size {
                if g.closure(&chosen).len() == n {
                    return size;
                }
                continue;
            }
            for (i, &x) in all.iter().enumerate().skip(start) {
                let mut c = chosen.clone();
                c.push(x);
                stack.push((i + 1, c));
            }
        }
    }
    n
}

/// `UT(3, p)`, generated by the two elementary matrices.
pub fn unitriangular3(p: u64) -> Result<FinitePGroup> {
    let gens = vec![
        vec![vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]],
        vec![vec![1, 0, 0], vec![0, 1, 1], vec![0, 0, 1]],
    ];
    generate_group(&gens, p, 1, DEFAULT_ORDER_CAP)
}

/// Cyclic group of order `p^2`, generated by `[[1,1],[0,1]]` over `Z/p^2`.
pub fn cyclic_p_squared(p: u64) -> Result<FinitePGroup> {
    generate_group(&[vec![vec![1, 1], vec![0, 1]]], p, 2, DEFAULT_ORDER_CAP)
}

/// Elementary abelian group of order `p^2` as block-diagonal unipotents.
pub fn elementary_abelian_p_squared(p: u64) -> Result<FinitePGroup> {
    let gens = vec![
        vec![vec![1, 1, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
        vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 1], vec![0, 0, 0, 1]],
    ];
    generate_group(&gens, p, 1, DEFAULT_ORDER_CAP)
}
