//! Braid groups acting on free groups, and the homology of finite abelian
//! covers of the punctured disk.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegrp::{FreeEndo, FreeWord};
use crate::intlin::Matrix;
use crate::IntMatrix;

/// A braid on `strands` strands; letters are `(i, ±1)` for `σ_i^{±1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<(usize, i8)>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<(usize, i8)>) -> Result<Self> {
        if strands == 0 {
            return Err(Error::Malformed("a braid needs at least one strand".into()));
        }
        for &(i, e) in &letters {
            if i == 0 || i >= strands || (e != 1 && e != -1) {
                return Err(Error::Malformed(format!(
                    "braid letter ({i}, {e}) out of range for {strands} strands"
                )));
            }
        }
        Ok(Self { strands, letters })
    }

    pub fn empty(strands: usize) -> Self {
        Self {
            strands,
            letters: Vec::new(),
        }
    }

    /// `"s1 S2 s1"`, uppercase for inverses; `""` or `"1"` is the empty braid.
    pub fn parse(strands: usize, s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (sign, rest) = match tok.strip_prefix('s') {
                Some(r) => (1, r),
                None => match tok.strip_prefix('S') {
                    Some(r) => (-1, r),
                    None => return Err(Error::Malformed(format!("bad braid letter {tok:?}"))),
                },
            };
            let i: usize = rest
                .parse()
                .map_err(|_| Error::Malformed(format!("bad braid letter {tok:?}")))?;
            letters.push((i, sign));
        }
        Self::new(strands, letters)
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[(usize, i8)] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.strands != other.strands {
            return Err(Error::RankMismatch {
                expected: self.strands,
                found: other.strands,
            });
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(Self {
            strands: self.strands,
            letters,
        })
    }

    pub fn inverse(&self) -> Self {
        Self {
            strands: self.strands,
            letters: self.letters.iter().rev().map(|&(i, e)| (i, -e)).collect(),
        }
    }

    pub fn pow(&self, k: usize) -> Self {
        Self {
            strands: self.strands,
            letters: self.letters.repeat(k),
        }
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let toks: Vec<String> = self
            .letters
            .iter()
            .map(|&(i, e)| format!("{}{i}", if e > 0 { 's' } else { 'S' }))
            .collect();
        write!(f, "{}", toks.join(" "))
    }
}

impl FromStr for BraidWord {
    type Err = Error;

    /// `"3: s1 S2"`
    fn from_str(s: &str) -> Result<Self> {
        let (n, w) = s
            .split_once(':')
            .ok_or_else(|| Error::Malformed("expected \"strands: letters\"".into()))?;
        let n = n
            .trim()
            .parse()
            .map_err(|_| Error::Malformed(format!("bad strand count {n:?}")))?;
        Self::parse(n, w)
    }
}

/// `σ_i` (`sign = 1`) or `σ_i^-1` on `F_n`.
pub fn artin_generator(n: usize, i: usize, sign: i8) -> FreeEndo {
    let g = |k: usize| FreeWord::generator(n, k);
    let mut fwd: Vec<FreeWord> = (1..=n).map(g).collect();
    let mut bwd = fwd.clone();
    // σ_i: x_i -> x_i x_{i+1} x_i^-1, x_{i+1} -> x_i
    fwd[i - 1] = &(&g(i) * &g(i + 1)) * &g(i).inverse();
    fwd[i] = g(i);
    // σ_i^-1: x_i -> x_{i+1}, x_{i+1} -> x_{i+1}^-1 x_i x_{i+1}
    bwd[i - 1] = g(i + 1);
    bwd[i] = &(&g(i + 1).inverse() * &g(i)) * &g(i + 1);
    let (imgs, inv) = if sign > 0 { (fwd, bwd) } else { (bwd, fwd) };
    FreeEndo::with_inverse(imgs, inv).expect("Artin generators are automorphisms")
}

/// Action of a braid on `F_n`; the leftmost letter acts first.
pub fn artin_endo(b: &BraidWord) -> FreeEndo {
    b.letters
        .iter()
        .fold(FreeEndo::identity(b.strands), |acc, &(i, e)| {
            artin_generator(b.strands, i, e)
                .compose(&acc)
                .expect("same rank")
        })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraidPermutation {
    /// `perm[k]` is the image of strand `k + 1`, 1-based.
    pub perm: Vec<usize>,
    pub is_pure: bool,
}

impl BraidPermutation {
    pub fn order(&self) -> usize {
        let n = self.perm.len();
        let mut seen = vec![false; n];
        let mut acc = 1usize;
        for s in 0..n {
            let mut len = 0;
            let mut k = s;
            while !seen[k] {
                seen[k] = true;
                k = self.perm[k] - 1;
                len += 1;
            }
            if len > 0 {
                acc = acc.lcm(&len);
            }
        }
        acc
    }
}

/// Image in the symmetric group, as the permutation of the generators that
/// the Artin action induces on homology.
pub fn braid_permutation(b: &BraidWord) -> BraidPermutation {
    let mut perm: Vec<usize> = (1..=b.strands).collect();
    for &(i, _) in &b.letters {
        // σ_i sends x_{i+1} to x_i and x_i to a conjugate of x_{i+1}.
        for v in perm.iter_mut() {
            if *v == i {
                *v = i + 1;
            } else if *v == i + 1 {
                *v = i;
            }
        }
    }
    let is_pure = perm.iter().enumerate().all(|(k, &v)| v == k + 1);
    BraidPermutation { perm, is_pure }
}

/// Coset graph of a finite-index subgroup of `F_n`, with a breadth-first
/// spanning tree and the resulting Schreier basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverGraph {
    rank: usize,
    /// `action[g][v]` is the endpoint of the edge labelled `x_{g+1}` at `v`.
    action: Vec<Vec<usize>>,
    inverse_action: Vec<Vec<usize>>,
    /// Word from the base vertex 0 to each vertex along the tree.
    tree_words: Vec<FreeWord>,
    /// `basis_index[g][v]` numbers the non-tree edge `(v, g)`.
    basis_index: Vec<Vec<Option<usize>>>,
    basis_edges: Vec<(usize, usize)>,
    assignments: Option<(u64, Vec<u64>)>,
}

impl CoverGraph {
    /// Kernel of `F_n -> Z/m`, `x_g -> assignments[g]`.
    pub fn from_finite_quotient(rank: usize, m: u64, assignments: &[u64]) -> Result<Self> {
        if assignments.len() != rank {
            return Err(Error::RankMismatch {
                expected: rank,
                found: assignments.len(),
            });
        }
        if m == 0 {
            return Err(Error::Malformed("modulus must be positive".into()));
        }
        let g = assignments.iter().fold(m, |acc, &a| acc.gcd(&(a % m)));
        if g != 1 {
            return Err(Error::NotTransitive(m));
        }
        let mm = m as usize;
        let action = assignments
            .iter()
            .map(|&a| (0..mm).map(|v| (v + (a % m) as usize) % mm).collect())
            .collect();
        let mut c = Self::from_permutations(rank, action)?;
        c.assignments = Some((m, assignments.iter().map(|a| a % m).collect()));
        Ok(c)
    }

    /// Cover given by one permutation of the vertices per generator.
    pub fn from_permutations(rank: usize, action: Vec<Vec<usize>>) -> Result<Self> {
        if action.len() != rank || rank == 0 {
            return Err(Error::RankMismatch {
                expected: rank,
                found: action.len(),
            });
        }
        let m = action[0].len();
        let mut inverse_action = vec![vec![usize::MAX; m]; rank];
        for (g, perm) in action.iter().enumerate() {
            if perm.len() != m {
                return Err(Error::Malformed("edge labels must all be permutations".into()));
            }
            for (v, &w) in perm.iter().enumerate() {
                if w >= m || inverse_action[g][w] != usize::MAX {
                    return Err(Error::Malformed("edge labels must all be permutations".into()));
                }
                inverse_action[g][w] = v;
            }
        }
        // Breadth-first tree from 0, generators in index order.
        let mut tree_words: Vec<Option<FreeWord>> = vec![None; m];
        let mut tree_edge = vec![vec![false; m]; rank];
        tree_words[0] = Some(FreeWord::identity(rank));
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for g in 0..rank {
                let w = action[g][v];
                if tree_words[w].is_none() {
                    let word = tree_words[v].as_ref().unwrap() * &FreeWord::generator(rank, g + 1);
                    tree_words[w] = Some(word);
                    tree_edge[g][v] = true;
                    queue.push_back(w);
                }
            }
        }
        if tree_words.iter().any(Option::is_none) {
            return Err(Error::NotTransitive(m as u64));
        }
        let mut basis_index = vec![vec![None; m]; rank];
        let mut basis_edges = Vec::new();
        for v in 0..m {
            for g in 0..rank {
                if !tree_edge[g][v] {
                    basis_index[g][v] = Some(basis_edges.len());
                    basis_edges.push((v, g));
                }
            }
        }
        Ok(Self {
            rank,
            action,
            inverse_action,
            tree_words: tree_words.into_iter().map(Option::unwrap).collect(),
            basis_index,
            basis_edges,
            assignments: None,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn index(&self) -> usize {
        self.tree_words.len()
    }

    pub fn edge_count(&self) -> usize {
        self.rank * self.index()
    }

    /// Rank of the subgroup, `E - V + 1`.
    pub fn subgroup_rank(&self) -> usize {
        self.basis_edges.len()
    }

    pub fn assignments(&self) -> Option<(u64, &[u64])> {
        self.assignments.as_ref().map(|(m, a)| (*m, a.as_slice()))
    }

    /// Schreier generator for the `k`-th non-tree edge `(v, g)`:
    /// `T(v) x_g T(v x_g)^-1`.
    pub fn schreier_generator(&self, k: usize) -> FreeWord {
        let (v, g) = self.basis_edges[k];
        let w = self.action[g][v];
        &(&self.tree_words[v] * &FreeWord::generator(self.rank, g + 1)) * &self.tree_words[w].inverse()
    }

    pub fn schreier_basis(&self) -> Vec<FreeWord> {
        (0..self.subgroup_rank()).map(|k| self.schreier_generator(k)).collect()
    }

    /// Reads `w` from the base vertex. Returns the end vertex and the
    /// exponent sums of the Schreier generators crossed.
    pub fn read(&self, w: &FreeWord) -> (usize, Vec<i64>) {
        let mut counts = vec![0i64; self.subgroup_rank()];
        let mut v = 0usize;
        for &l in w.letters() {
            let g = l.unsigned_abs() as usize - 1;
            if l > 0 {
                if let Some(k) = self.basis_index[g][v] {
                    counts[k] += 1;
                }
                v = self.action[g][v];
            } else {
                let u = self.inverse_action[g][v];
                if let Some(k) = self.basis_index[g][u] {
                    counts[k] -= 1;
                }
                v = u;
            }
        }
        (v, counts)
    }

    pub fn contains(&self, w: &FreeWord) -> bool {
        self.read(w).0 == 0
    }
}

pub fn cover_from_finite_quotient(rank: usize, m: u64, assignments: &[u64]) -> Result<CoverGraph> {
    CoverGraph::from_finite_quotient(rank, m, assignments)
}

/// Whether `phi` maps the subgroup of the cover into itself.
pub fn endo_preserves_cover(phi: &FreeEndo, c: &CoverGraph) -> Result<bool> {
    if phi.rank() != c.rank {
        return Err(Error::RankMismatch {
            expected: c.rank,
            found: phi.rank(),
        });
    }
    for s in c.schreier_basis() {
        if !c.contains(&phi.apply(&s)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Matrix of `phi` on the first homology of the cover, in the Schreier basis;
/// column `k` is the abelianized image of the `k`-th basis loop.
pub fn induced_cover_homology(phi: &FreeEndo, c: &CoverGraph) -> Result<IntMatrix> {
    if phi.rank() != c.rank {
        return Err(Error::RankMismatch {
            expected: c.rank,
            found: phi.rank(),
        });
    }
    let r = c.subgroup_rank();
    let mut cols = Vec::with_capacity(r);
    for s in c.schreier_basis() {
        let (end, counts) = c.read(&phi.apply(&s)?);
        if end != 0 {
            return Err(Error::NotInvariant);
        }
        cols.push(counts);
    }
    Ok(Matrix::from_fn(r, r, |i, j| BigInt::from(cols[j][i])))
}
