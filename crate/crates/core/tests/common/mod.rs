#![allow(dead_code)]

use num_bigint::BigInt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use resip_core::freegrp::{FreeEndo, FreeWord, MappingTorusSpec};
use resip_core::IntMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn beta_endo() -> FreeEndo {
    let s1 = FreeEndo::parse(3, &["x1 x2 X1", "x1", "x3"], Some(&["x2", "X2 x1 x2", "x3"])).unwrap();
    let s2i = FreeEndo::parse(3, &["x1", "x3", "X3 x2 x3"], Some(&["x1", "x2 x3 X2", "x2"])).unwrap();
    s2i.compose(&s1).unwrap()
}

pub fn beta() -> MappingTorusSpec {
    MappingTorusSpec::new(beta_endo(), "beta").unwrap()
}

pub fn alpha() -> MappingTorusSpec {
    let a = FreeEndo::parse(2, &["x1 x1 x2", "x1 x2"], Some(&["x1 X2", "x2 X1 x2"])).unwrap();
    MappingTorusSpec::new(a, "alpha").unwrap()
}

pub fn mat(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_i64_rows(rows).unwrap()
}

/// Random automorphism as a product of Nielsen moves.
pub fn random_automorphism<R: Rng>(rng: &mut R, rank: usize, moves: usize) -> FreeEndo {
    (0..moves).fold(FreeEndo::identity(rank), |acc, _| {
        let i = rng.gen_range(1..=rank);
        let mut j = rng.gen_range(1..rank);
        if j >= i {
            j += 1;
        }
        let e = if rng.gen_bool(0.5) { 1 } else { -1 };
        let m = match rng.gen_range(0..3) {
            0 => FreeEndo::right_transvection(rank, i, j, e),
            1 => FreeEndo::left_transvection(rank, i, j, e),
            _ => FreeEndo::inversion(rank, i),
        };
        m.compose(&acc).unwrap()
    })
}

/// Automorphism whose abelianization is unipotent over Z: transvections
/// `x_i -> x_i x_j^e` with `i < j` only, plus inner automorphisms.
pub fn random_unipotent<R: Rng>(rng: &mut R, rank: usize, moves: usize) -> FreeEndo {
    (0..moves).fold(FreeEndo::identity(rank), |acc, _| {
        let m = if rng.gen_bool(0.2) {
            let len = rng.gen_range(1..=2);
            FreeEndo::inner(&FreeWord::random(rng, rank, len))
        } else {
            let i = rng.gen_range(1..rank);
            let j = rng.gen_range(i + 1..=rank);
            let e = if rng.gen_bool(0.5) { 1 } else { -1 };
            if rng.gen_bool(0.5) {
                FreeEndo::right_transvection(rank, i, j, e)
            } else {
                FreeEndo::left_transvection(rank, i, j, e)
            }
        };
        m.compose(&acc).unwrap()
    })
}

/// Mod-`p` Torelli automorphism: a product of `x_i -> x_i x_j^(±p)` and
/// inner automorphisms.
pub fn random_torelli<R: Rng>(rng: &mut R, rank: usize, p: i64, moves: usize) -> FreeEndo {
    (0..moves).fold(FreeEndo::identity(rank), |acc, _| {
        let m = if rng.gen_bool(0.3) {
            let len = rng.gen_range(1..=3);
            FreeEndo::inner(&FreeWord::random(rng, rank, len))
        } else {
            let i = rng.gen_range(1..=rank);
            let mut j = rng.gen_range(1..rank);
            if j >= i {
                j += 1;
            }
            let e = if rng.gen_bool(0.5) { p } else { -p };
            FreeEndo::right_transvection(rank, i, j, e)
        };
        m.compose(&acc).unwrap()
    })
}

/// Random `SL_2(Z)` element as a word in `[[1,1],[0,1]]` and `[[1,0],[1,1]]`
/// and their inverses.
pub fn random_sl2<R: Rng>(rng: &mut R, max_len: usize) -> IntMatrix {
    let gens = [
        mat(&[&[1, 1], &[0, 1]]),
        mat(&[&[1, -1], &[0, 1]]),
        mat(&[&[1, 0], &[1, 1]]),
        mat(&[&[1, 0], &[-1, 1]]),
    ];
    let len = rng.gen_range(0..=max_len);
    (0..len).fold(IntMatrix::identity(2), |acc, _| acc.mul_ref(&gens[rng.gen_range(0..4)]))
}

/// Random element of `GL_n(Z)` from elementary row operations and sign flips.
pub fn random_gl<R: Rng>(rng: &mut R, n: usize, steps: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let e = if n > 1 && rng.gen_bool(0.85) {
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let c = rng.gen_range(-2i64..=2);
            IntMatrix::from_fn(n, n, |r, s| {
                if r == s {
                    BigInt::from(1)
                } else if r == i && s == j {
                    BigInt::from(c)
                } else {
                    BigInt::from(0)
                }
            })
        } else {
            IntMatrix::from_fn(n, n, |r, s| {
                if r != s {
                    BigInt::from(0)
                } else if r == i {
                    BigInt::from(-1)
                } else {
                    BigInt::from(1)
                }
            })
        };
        m = e.mul_ref(&m);
    }
    m
}

/// `(A - I)^n mod p` computed by plain repeated multiplication.
pub fn nilpotent_mod_p(a: &IntMatrix, p: u64) -> bool {
    let n = a.dim();
    let b = a.minus_identity();
    let pb = BigInt::from(p);
    let mut acc = IntMatrix::identity(n);
    for _ in 0..n {
        acc = acc.mul_ref(&b).reduce_mod(&pb);
    }
    acc.is_zero()
}
