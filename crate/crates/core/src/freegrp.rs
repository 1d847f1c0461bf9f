//! Free-group words, endomorphisms, and mapping-torus elements.
//!
//! Generators are numbered from 1. A letter is stored as a signed integer:
//! `k` is `x_k` and `-k` is its inverse. The text syntax is whitespace
//! separated tokens, `x3` for a generator and `X3` for its inverse; the
//! empty string (or `1`) is the identity.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intlin::Matrix;
use crate::IntMatrix;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FreeWord {
    rank: usize,
    letters: Vec<i32>,
}

impl FreeWord {
    pub fn identity(rank: usize) -> Self {
        Self {
            rank,
            letters: Vec::new(),
        }
    }

    pub fn generator(rank: usize, index: usize) -> Self {
        assert!((1..=rank).contains(&index), "generator index out of range");
        Self {
            rank,
            letters: vec![index as i32],
        }
    }

    /// Builds and freely reduces a word from signed letters.
    pub fn from_letters(rank: usize, letters: &[i32]) -> Result<Self> {
        if let Some(&bad) = letters
            .iter()
            .find(|&&l| l == 0 || l.unsigned_abs() as usize > rank)
        {
            return Err(Error::Malformed(format!(
                "letter {bad} out of range for rank {rank}"
            )));
        }
        let mut w = Self::identity(rank);
        for &l in letters {
            w.push(l);
        }
        Ok(w)
    }

    pub fn parse(rank: usize, s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (sign, rest) = match tok.chars().next() {
                Some('x') => (1, &tok[1..]),
                Some('X') => (-1, &tok[1..]),
                _ => return Err(Error::Malformed(format!("bad word token {tok:?}"))),
            };
            let idx: i32 = rest
                .parse()
                .map_err(|_| Error::Malformed(format!("bad word token {tok:?}")))?;
            letters.push(sign * idx);
        }
        Self::from_letters(rank, &letters)
    }

    fn push(&mut self, l: i32) {
        if self.letters.last() == Some(&-l) {
            self.letters.pop();
        } else {
            self.letters.push(l);
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        check_rank(self.rank, other.rank)?;
        let mut out = self.clone();
        for &l in &other.letters {
            out.push(l);
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Self {
        Self {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        (0..e.unsigned_abs()).fold(Self::identity(self.rank), |acc, _| &acc * &base)
    }

    /// `u v u^-1 v^-1`
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        check_rank(self.rank, other.rank)?;
        Ok(&(&(self * other) * &self.inverse()) * &other.inverse())
    }

    /// Exponent sum of each generator.
    pub fn exponent_sums(&self) -> Vec<i64> {
        let mut out = vec![0i64; self.rank];
        for &l in &self.letters {
            out[l.unsigned_abs() as usize - 1] += l.signum() as i64;
        }
        out
    }

    /// Uniformly random freely reduced word of exactly `len` letters.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, rank: usize, len: usize) -> Self {
        let mut letters: Vec<i32> = Vec::with_capacity(len);
        while letters.len() < len {
            let g = rng.gen_range(1..=rank as i32);
            let l = if rng.gen_bool(0.5) { g } else { -g };
            if letters.last() != Some(&-l) {
                letters.push(l);
            }
        }
        Self { rank, letters }
    }
}

impl std::ops::Mul<&FreeWord> for &FreeWord {
    type Output = FreeWord;
    fn mul(self, rhs: &FreeWord) -> FreeWord {
        self.multiply(rhs).expect("rank mismatch")
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let c = if *l > 0 { 'x' } else { 'X' };
            write!(f, "{c}{}", l.unsigned_abs())?;
        }
        Ok(())
    }
}

impl fmt::Debug for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreeWord({self})")
    }
}

fn check_rank(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::RankMismatch { expected, found })
    }
}

/// Endomorphism of the free group of rank `n`, given by generator images.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FreeEndo {
    rank: usize,
    images: Vec<FreeWord>,
    certified_inverse: Option<Vec<FreeWord>>,
}

impl FreeEndo {
    pub fn new(images: Vec<FreeWord>) -> Result<Self> {
        let rank = images.len();
        if rank == 0 {
            return Err(Error::Malformed("free group rank must be positive".into()));
        }
        for w in &images {
            check_rank(rank, w.rank)?;
        }
        Ok(Self {
            rank,
            images,
            certified_inverse: None,
        })
    }

    /// Endomorphism together with an inverse; both compositions are checked.
    pub fn with_inverse(images: Vec<FreeWord>, inverse: Vec<FreeWord>) -> Result<Self> {
        let mut e = Self::new(images)?;
        let inv = Self::new(inverse)?;
        check_rank(e.rank, inv.rank)?;
        let fixes_all = |f: &Self, g: &Self| {
            (1..=f.rank).all(|j| {
                let x = FreeWord::generator(f.rank, j);
                f.apply(&g.apply(&x).unwrap()).unwrap() == x
            })
        };
        if !fixes_all(&e, &inv) || !fixes_all(&inv, &e) {
            return Err(Error::BadInverse);
        }
        e.certified_inverse = Some(inv.images);
        Ok(e)
    }

    pub fn parse(rank: usize, images: &[&str], inverse: Option<&[&str]>) -> Result<Self> {
        let parse_all = |ws: &[&str]| -> Result<Vec<FreeWord>> {
            ws.iter().map(|s| FreeWord::parse(rank, s)).collect()
        };
        let imgs = parse_all(images)?;
        check_rank(rank, imgs.len())?;
        match inverse {
            Some(inv) => Self::with_inverse(imgs, parse_all(inv)?),
            None => Self::new(imgs),
        }
    }

    pub fn identity(rank: usize) -> Self {
        let gens: Vec<FreeWord> = (1..=rank).map(|j| FreeWord::generator(rank, j)).collect();
        Self {
            rank,
            images: gens.clone(),
            certified_inverse: Some(gens),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[FreeWord] {
        &self.images
    }

    pub fn certified_inverse(&self) -> Option<&[FreeWord]> {
        self.certified_inverse.as_deref()
    }

    pub fn is_certified(&self) -> bool {
        self.certified_inverse.is_some()
    }

    pub fn inverse(&self) -> Option<Self> {
        self.certified_inverse.as_ref().map(|inv| Self {
            rank: self.rank,
            images: inv.clone(),
            certified_inverse: Some(self.images.clone()),
        })
    }

    pub fn apply(&self, w: &FreeWord) -> Result<FreeWord> {
        check_rank(self.rank, w.rank)?;
        let mut out = FreeWord::identity(self.rank);
        for &l in &w.letters {
            let img = &self.images[l.unsigned_abs() as usize - 1];
            if l > 0 {
                for &m in &img.letters {
                    out.push(m);
                }
            } else {
                for &m in img.letters.iter().rev() {
                    out.push(-m);
                }
            }
        }
        Ok(out)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_rank(self.rank, other.rank)?;
        let images = other
            .images
            .iter()
            .map(|w| self.apply(w))
            .collect::<Result<Vec<_>>>()?;
        let certified_inverse = match (&self.certified_inverse, &other.certified_inverse) {
            (Some(a), Some(b)) => {
                let other_inv = Self::new(b.clone())?;
                Some(
                    a.iter()
                        .map(|w| other_inv.apply(w))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            _ => None,
        };
        Ok(Self {
            rank: self.rank,
            images,
            certified_inverse,
        })
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.rank), |acc, _| {
            self.compose(&acc).expect("same rank")
        })
    }

    /// Column `j` holds the exponent sums of the image of `x_j`.
    pub fn abelianization_matrix(&self) -> IntMatrix {
        let sums: Vec<Vec<i64>> = self.images.iter().map(FreeWord::exponent_sums).collect();
        Matrix::from_fn(self.rank, self.rank, |i, j| BigInt::from(sums[j][i]))
    }

    /// Whether the induced map on `H_1(F; Z/p)` is the identity.
    pub fn is_mod_p_torelli(&self, p: u64) -> bool {
        self.abelianization_matrix()
            .minus_identity()
            .reduce_mod(&BigInt::from(p))
            .is_zero()
    }

    /// `x_i -> x_i x_j^e`, other generators fixed.
    pub fn right_transvection(rank: usize, i: usize, j: usize, e: i64) -> Self {
        assert_ne!(i, j);
        let xj = FreeWord::generator(rank, j);
        let build = |e: i64| {
            let mut imgs: Vec<FreeWord> = (1..=rank).map(|k| FreeWord::generator(rank, k)).collect();
            imgs[i - 1] = &imgs[i - 1] * &xj.pow(e);
            imgs
        };
        Self::with_inverse(build(e), build(-e)).expect("transvection inverse")
    }

    /// `x_i -> x_j^e x_i`, other generators fixed.
    pub fn left_transvection(rank: usize, i: usize, j: usize, e: i64) -> Self {
        assert_ne!(i, j);
        let xj = FreeWord::generator(rank, j);
        let build = |e: i64| {
            let mut imgs: Vec<FreeWord> = (1..=rank).map(|k| FreeWord::generator(rank, k)).collect();
            imgs[i - 1] = &xj.pow(e) * &imgs[i - 1];
            imgs
        };
        Self::with_inverse(build(e), build(-e)).expect("transvection inverse")
    }

    /// `x_i -> x_i c` for a word `c` not involving `x_i`.
    pub fn multiply_generator(rank: usize, i: usize, c: &FreeWord) -> Result<Self> {
        if c.letters.iter().any(|l| l.unsigned_abs() as usize == i) {
            return Err(Error::Malformed(format!("word {c} involves x{i}")));
        }
        let build = |c: &FreeWord| {
            let mut imgs: Vec<FreeWord> = (1..=rank).map(|k| FreeWord::generator(rank, k)).collect();
            imgs[i - 1] = &imgs[i - 1] * c;
            imgs
        };
        Self::with_inverse(build(c), build(&c.inverse()))
    }

    /// Conjugation `w -> u w u^-1`.
    pub fn inner(u: &FreeWord) -> Self {
        let rank = u.rank;
        let build = |u: &FreeWord| {
            (1..=rank)
                .map(|k| &(u * &FreeWord::generator(rank, k)) * &u.inverse())
                .collect()
        };
        Self::with_inverse(build(u), build(&u.inverse())).expect("inner inverse")
    }

    /// `x_i -> x_i^-1`.
    pub fn inversion(rank: usize, i: usize) -> Self {
        let mut imgs: Vec<FreeWord> = (1..=rank).map(|k| FreeWord::generator(rank, k)).collect();
        imgs[i - 1] = imgs[i - 1].inverse();
        Self::with_inverse(imgs.clone(), imgs).expect("involution")
    }
}

impl fmt::Display for FreeEndo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, w) in self.images.iter().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "x{} -> {w}", j + 1)?;
        }
        Ok(())
    }
}

/// Mapping torus of a free-group automorphism: `F ⋊ <t>` with
/// `t w t^-1 = ψ(w)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingTorusSpec {
    fiber: FreeEndo,
    pub description: String,
}

impl MappingTorusSpec {
    pub fn new(fiber: FreeEndo, description: impl Into<String>) -> Result<Self> {
        if !fiber.is_certified() {
            return Err(Error::NotCertified);
        }
        Ok(Self {
            fiber,
            description: description.into(),
        })
    }

    pub fn monodromy(&self) -> &FreeEndo {
        &self.fiber
    }

    pub fn rank(&self) -> usize {
        self.fiber.rank
    }

    /// Product in the mapping-torus group, using
    /// `(t^a u)(t^b v) = t^(a+b) ψ^(-b)(u) v`.
    pub fn multiply(&self, x: &MappingTorusElement, y: &MappingTorusElement) -> Result<MappingTorusElement> {
        let u = self.twist(&x.fiber_word, -y.t_exponent)?;
        Ok(MappingTorusElement {
            t_exponent: x.t_exponent + y.t_exponent,
            fiber_word: u.multiply(&y.fiber_word)?,
        })
    }

    /// `ψ^k(w)` for any integer `k`.
    pub fn twist(&self, w: &FreeWord, k: i64) -> Result<FreeWord> {
        let step = if k >= 0 {
            self.fiber.clone()
        } else {
            self.fiber.inverse().ok_or(Error::NotCertified)?
        };
        (0..k.unsigned_abs()).try_fold(w.clone(), |acc, _| step.apply(&acc))
    }
}

/// `t^m w` in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MappingTorusElement {
    pub t_exponent: i64,
    pub fiber_word: FreeWord,
}

impl MappingTorusElement {
    pub fn new(t_exponent: i64, fiber_word: FreeWord) -> Self {
        Self {
            t_exponent,
            fiber_word,
        }
    }

    pub fn fiber(w: FreeWord) -> Self {
        Self::new(0, w)
    }

    pub fn stable_letter(rank: usize, m: i64) -> Self {
        Self::new(m, FreeWord::identity(rank))
    }

    pub fn is_identity(&self) -> bool {
        self.t_exponent == 0 && self.fiber_word.is_identity()
    }
}

impl fmt::Display for MappingTorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.t_exponent, self.fiber_word.is_identity()) {
            (0, _) => write!(f, "{}", self.fiber_word),
            (m, true) => write!(f, "t^{m}"),
            (m, false) => write!(f, "t^{m} {}", self.fiber_word),
        }
    }
}

impl FromStr for MappingTorusElement {
    type Err = Error;

    /// Parses `"t^2 x1 X2"`; the rank is inferred as the largest index used
    /// and should be fixed with [`MappingTorusElement::with_rank`].
    fn from_str(s: &str) -> Result<Self> {
        let mut toks = s.split_whitespace().peekable();
        let mut m = 0i64;
        while let Some(tok) = toks.peek() {
            if let Some(e) = tok.strip_prefix("t^") {
                m += e
                    .parse::<i64>()
                    .map_err(|_| Error::Malformed(format!("bad stable letter {tok:?}")))?;
            } else if *tok == "t" {
                m += 1;
            } else if *tok == "T" {
                m -= 1;
            } else {
                break;
            }
            toks.next();
        }
        let rest: Vec<&str> = toks.collect();
        let max = rest
            .iter()
            .filter_map(|t| t.get(1..).and_then(|d| d.parse::<usize>().ok()))
            .max()
            .unwrap_or(1);
        Ok(Self::new(m, FreeWord::parse(max, &rest.join(" "))?))
    }
}

impl MappingTorusElement {
    pub fn with_rank(mut self, rank: usize) -> Result<Self> {
        if self
            .fiber_word
            .letters
            .iter()
            .any(|l| l.unsigned_abs() as usize > rank)
        {
            return Err(Error::RankMismatch {
                expected: rank,
                found: self.fiber_word.rank,
            });
        }
        self.fiber_word.rank = rank;
        Ok(self)
    }
}
