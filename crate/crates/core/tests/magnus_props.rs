mod common;

use num_bigint::BigInt;
use proptest::prelude::*;
use resip_core::freegrp::{FreeEndo, FreeWord, MappingTorusSpec};
use resip_core::magnus::{
    induced_order, lie_layer_matrix, lie_layer_matrix_by_expansion, lyndon_words, magnus_depth, magnus_embed,
    witt_dimension, Ring, TruncatedSeries,
};
use resip_core::witness::{induced_automorphism_order, sample_magnus_kernel};

fn word(rank: usize) -> impl Strategy<Value = FreeWord> {
    prop::collection::vec((1..=rank as i32, any::<bool>()), 0..12).prop_map(move |ls| {
        let letters: Vec<i32> = ls.into_iter().map(|(g, inv)| if inv { -g } else { g }).collect();
        FreeWord::from_letters(rank, &letters).unwrap()
    })
}

/// Lyndon words counted by brute force: strictly smaller than every proper rotation.
fn brute_lyndon_count(n: usize, len: usize) -> usize {
    let total = n.pow(len as u32);
    (0..total)
        .filter(|&code| {
            let w: Vec<usize> = (0..len).map(|k| (code / n.pow((len - 1 - k) as u32)) % n).collect();
            (1..len).all(|r| {
                let rot: Vec<usize> = w[r..].iter().chain(&w[..r]).copied().collect();
                w < rot
            })
        })
        .count()
}

/// Expansion of `x_i^-1` written out term by term: `sum_k (-X_i)^k`.
fn inverse_generator_series(rank: usize, d: usize, i: usize) -> TruncatedSeries<BigInt> {
    let mut s = TruncatedSeries::zero(rank, d, Ring::Integers);
    for k in 0..=d {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        s.add_term(vec![i as u8; k], BigInt::from(sign));
    }
    s
}

#[test]
fn witt_dimensions_match_lyndon_counts() {
    for n in 1..=4 {
        for i in 1..=4 {
            let brute = brute_lyndon_count(n, i);
            assert_eq!(witt_dimension(n, i), brute, "n = {n}, i = {i}");
            assert_eq!(lyndon_words(n, i).len(), brute);
        }
    }
    assert_eq!(witt_dimension(2, 2), 1);
    assert_eq!(witt_dimension(2, 3), 2);
    assert_eq!(witt_dimension(3, 2), 3);
}

#[test]
fn inverse_generators_expand_as_geometric_series() {
    for rank in 1..=3 {
        for i in 1..=rank {
            let w = FreeWord::generator(rank, i).inverse();
            assert_eq!(magnus_embed(&w, 6, Ring::Integers), inverse_generator_series(rank, 6, i - 1));
        }
    }
}

#[test]
fn magnus_multiplicative_on_seeded_pairs() {
    let mut rng = common::rng(0x3a9);
    for k in 0..200 {
        let rank = 2 + k % 3;
        let d = 1 + k % 5;
        let u = FreeWord::random(&mut rng, rank, 1 + k % 9);
        let v = FreeWord::random(&mut rng, rank, 1 + (k * 7) % 11);
        let uv = &u * &v;
        for ring in [Ring::Integers, Ring::prime_field(3)] {
            let lhs = magnus_embed::<BigInt>(&uv, d, ring.clone());
            let rhs = magnus_embed(&u, d, ring.clone()).mul(&magnus_embed(&v, d, ring));
            assert_eq!(lhs, rhs, "{u} * {v} at degree {d}");
        }
    }
}

#[test]
fn unipotence_propagates_to_layer_four() {
    let mut rng = common::rng(0x1a4e);
    for k in 0..50 {
        let p = [2u64, 3, 5][k % 3];
        let rank = 2 + k % 2;
        let u = common::random_unipotent(&mut rng, rank, 4);
        let t = common::random_torelli(&mut rng, rank, p as i64, 2);
        let phi = u.compose(&t).unwrap();
        assert!(common::nilpotent_mod_p(&phi.abelianization_matrix(), p));
        for i in 1..=4 {
            let m = lie_layer_matrix(&phi, i, Ring::Integers).unwrap();
            assert!(common::nilpotent_mod_p(&m.matrix, p), "layer {i} of {phi} at p = {p}");
        }
    }
}

#[test]
fn layer_matrices_agree_with_expansion() {
    let mut rng = common::rng(0xe4);
    for k in 0..12 {
        let rank = 2 + k % 2;
        let phi = common::random_automorphism(&mut rng, rank, 3);
        for i in 1..=3 {
            let fast = lie_layer_matrix(&phi, i, Ring::Integers).unwrap().matrix;
            assert_eq!(fast, lie_layer_matrix_by_expansion(&phi, i).unwrap(), "{phi} layer {i}");
        }
    }
}

#[test]
fn layer_matrices_are_functorial() {
    let mut rng = common::rng(0xf0c);
    for k in 0..30 {
        let rank = 2 + k % 3;
        let phi = common::random_automorphism(&mut rng, rank, 4);
        let rho = common::random_automorphism(&mut rng, rank, 4);
        let both = phi.compose(&rho).unwrap();
        for i in 1..=3 {
            let m = |f: &FreeEndo| lie_layer_matrix(f, i, Ring::Integers).unwrap().matrix;
            assert_eq!(m(&both), m(&phi).mul_ref(&m(&rho)));
        }
    }
}

#[test]
fn magnus_kernel_is_fully_invariant() {
    let mut rng = common::rng(0x4e7);
    for k in 0..12 {
        let p = [2u64, 3][k % 2];
        let d = 1 + k % 3;
        let rank = 2;
        let phi = common::random_automorphism(&mut rng, rank, 2);
        for w in sample_magnus_kernel(rank, p, d, 6, k as u64) {
            let ring: Ring<i64> = Ring::prime_field(p);
            assert!(magnus_embed(&w, d, ring.clone()).is_one());
            assert!(magnus_embed(&phi.apply(&w).unwrap(), d, ring).is_one());
        }
    }
}

#[test]
fn transvection_induced_order() {
    let phi = FreeEndo::parse(2, &["x1 x2", "x2"], Some(&["x1 X2", "x2"])).unwrap();
    let spec = MappingTorusSpec::new(phi.clone(), "transvection").unwrap();
    // phi^k(x1) = x1 x2^k, and (1 + X2)^k = 1 mod (2, deg > 3) first at k = 4.
    assert_eq!(induced_automorphism_order(&spec, 2, 3, 6561).unwrap(), 4);
    assert_eq!(induced_order(&phi, 2, 1, 100).unwrap(), 2);
    assert_eq!(induced_order(&FreeEndo::identity(3), 5, 4, 100).unwrap(), 1);
    let beta = common::beta();
    assert_eq!(induced_automorphism_order(&beta, 3, 2, 6561).unwrap(), 3);
}

proptest! {
    #[test]
    fn magnus_multiplicative(u in word(3), v in word(3), d in 1usize..=5) {
        let uv = &u * &v;
        let lhs = magnus_embed::<i64>(&uv, d, Ring::prime_field(5));
        let rhs = magnus_embed(&u, d, Ring::prime_field(5)).mul(&magnus_embed(&v, d, Ring::prime_field(5)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_word_inverts_series(u in word(2), d in 1usize..=6) {
        let s = magnus_embed::<BigInt>(&u, d, Ring::Integers);
        let t = magnus_embed::<BigInt>(&u.inverse(), d, Ring::Integers);
        prop_assert!(s.mul(&t).is_one());
        prop_assert_eq!(s.inverse_unit().unwrap(), t);
    }

    #[test]
    fn commutators_are_deep(u in word(2), v in word(2), p in prop::sample::select(vec![2u64, 3, 5])) {
        let c = u.commutator(&v).unwrap();
        prop_assume!(!c.is_identity());
        prop_assert!(magnus_depth(&c, p, 6).map_or(true, |d| d >= 2));
    }
}
