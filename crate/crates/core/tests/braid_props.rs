mod common;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::Rng;
use resip_core::braid::{
    artin_endo, braid_permutation, cover_from_finite_quotient, endo_preserves_cover, induced_cover_homology, BraidWord,
};
use resip_core::freegrp::FreeWord;
use resip_core::intlin::Poly;

fn braid(n: usize, s: &str) -> BraidWord {
    BraidWord::parse(n, s).unwrap()
}

fn random_braid<R: Rng>(rng: &mut R, n: usize, len: usize) -> BraidWord {
    let letters = (0..len)
        .map(|_| (rng.gen_range(1..n), if rng.gen_bool(0.5) { 1 } else { -1 }))
        .collect();
    BraidWord::new(n, letters).unwrap()
}

#[test]
fn braid_relations_hold() {
    for n in 3..=5 {
        for i in 1..n - 1 {
            let a = braid(n, &format!("s{} s{} s{}", i, i + 1, i));
            let b = braid(n, &format!("s{} s{} s{}", i + 1, i, i + 1));
            assert_eq!(artin_endo(&a).images(), artin_endo(&b).images());
        }
        for i in 1..n {
            for j in i + 2..n {
                let a = braid(n, &format!("s{i} s{j}"));
                let b = braid(n, &format!("s{j} s{i}"));
                assert_eq!(artin_endo(&a).images(), artin_endo(&b).images());
            }
            let id = braid(n, &format!("s{i} S{i}"));
            assert!(artin_endo(&id).images().iter().enumerate().all(|(k, w)| *w == FreeWord::generator(n, k + 1)));
        }
    }
}

#[test]
fn abelianization_is_a_homomorphism() {
    let mut rng = common::rng(0xab);
    for k in 0..60 {
        let rank = 2 + k % 3;
        let phi = common::random_automorphism(&mut rng, rank, 4);
        let rho = common::random_automorphism(&mut rng, rank, 4);
        let both = phi.compose(&rho).unwrap();
        assert_eq!(
            both.abelianization_matrix(),
            phi.abelianization_matrix().mul_ref(&rho.abelianization_matrix())
        );
        let w = FreeWord::random(&mut rng, rank, 8);
        let sums: Vec<BigInt> = w.exponent_sums().into_iter().map(BigInt::from).collect();
        let image: Vec<BigInt> = phi.apply(&w).unwrap().exponent_sums().into_iter().map(BigInt::from).collect();
        assert_eq!(phi.abelianization_matrix().mul_vec(&sums), image);
        let inv = phi.inverse().unwrap();
        assert_eq!(inv.apply(&phi.apply(&w).unwrap()).unwrap(), w);
    }
}

#[test]
fn beta_permutation_and_cover() {
    let b = braid(3, "s1 S2");
    let perm = braid_permutation(&b);
    assert_eq!(perm.order(), 3);
    assert!(!perm.is_pure);
    assert!(braid_permutation(&b.pow(3)).is_pure);

    let cover = cover_from_finite_quotient(3, 2, &[1, 1, 1]).unwrap();
    assert_eq!(cover.subgroup_rank(), 5);
    let m = induced_cover_homology(&artin_endo(&b), &cover).unwrap();
    let m3 = induced_cover_homology(&artin_endo(&b.pow(3)), &cover).unwrap();
    assert_eq!(m.dim(), 5);
    assert_eq!(m.pow(3), m3);
    let f = m.charpoly();
    let q = Poly::from_i64(&[1, -3, 1]);
    assert!(f.divisible_by_monic(&q));
    assert!(f.div_rem_monic(&q).0.is_cyclotomic_product());
    assert!(m3.charpoly().divisible_by_monic(&Poly::from_i64(&[1, -18, 1])));
}

#[test]
fn cover_membership_and_ranks() {
    let mut rng = common::rng(0xc0);
    for (rank, m, assign) in [(2usize, 2u64, vec![1u64, 0]), (3, 3, vec![1, 1, 1]), (3, 4, vec![1, 2, 3]), (2, 5, vec![2, 1])] {
        let cover = cover_from_finite_quotient(rank, m, &assign).unwrap();
        assert_eq!(cover.index() as u64, m);
        assert_eq!(cover.subgroup_rank(), m as usize * (rank - 1) + 1);
        for _ in 0..100 {
            let len = rng.gen_range(0..12);
            let w = FreeWord::random(&mut rng, rank, len);
            let weight: i64 = w.exponent_sums().iter().zip(&assign).map(|(e, a)| e * *a as i64).sum();
            assert_eq!(cover.contains(&w), weight.rem_euclid(m as i64) == 0, "{w}");
        }
        for g in cover.schreier_basis() {
            assert!(cover.contains(&g));
        }
    }
}

#[test]
fn cover_action_is_functorial() {
    let mut rng = common::rng(0xf7);
    let cover = cover_from_finite_quotient(3, 2, &[1, 1, 1]).unwrap();
    let cover3 = cover_from_finite_quotient(4, 3, &[1, 1, 1, 1]).unwrap();
    for k in 0..20 {
        let (n, c) = if k % 2 == 0 { (3, &cover) } else { (4, &cover3) };
        let a = random_braid(&mut rng, n, 5);
        let b = random_braid(&mut rng, n, 5);
        let (fa, fb) = (artin_endo(&a), artin_endo(&b));
        assert!(endo_preserves_cover(&fa, c).unwrap());
        let ab = artin_endo(&a.concat(&b).unwrap());
        assert_eq!(ab.images(), fb.compose(&fa).unwrap().images());
        let m = |f: &resip_core::freegrp::FreeEndo| induced_cover_homology(f, c).unwrap();
        assert_eq!(m(&fb.compose(&fa).unwrap()), m(&fb).mul_ref(&m(&fa)));
        assert!(m(&fa).det().magnitude() == &1u32.into());
    }
}

#[test]
fn transvection_does_not_preserve_odd_cover() {
    let cover = cover_from_finite_quotient(2, 2, &[1, 0]).unwrap();
    let phi = resip_core::freegrp::FreeEndo::right_transvection(2, 2, 1, 1);
    assert!(!endo_preserves_cover(&phi, &cover).unwrap());
    assert!(induced_cover_homology(&phi, &cover).is_err());
}

proptest! {
    #[test]
    fn boundary_word_is_fixed(seed in any::<u64>(), n in 2usize..=5, len in 0usize..10) {
        let b = random_braid(&mut common::rng(seed), n, len);
        let boundary = (1..=n).fold(FreeWord::identity(n), |acc, k| &acc * &FreeWord::generator(n, k));
        let phi = artin_endo(&b);
        prop_assert_eq!(phi.apply(&boundary).unwrap(), boundary);
        // generators go to conjugates of generators, permuted
        let mut hit = vec![false; n];
        for img in phi.images() {
            let sums = img.exponent_sums();
            let nonzero: Vec<usize> = (0..n).filter(|&k| sums[k] != 0).collect();
            prop_assert_eq!(nonzero.len(), 1);
            prop_assert_eq!(sums[nonzero[0]], 1);
            hit[nonzero[0]] = true;
        }
        prop_assert!(hit.iter().all(|&h| h));
        prop_assert_eq!(braid_permutation(&b).is_pure, phi.abelianization_matrix().is_identity());
    }
}
