mod common;

use proptest::prelude::*;
use resip_core::classify::free_fiber_residually_p;
use resip_core::freegrp::{FreeEndo, FreeWord, MappingTorusElement, MappingTorusSpec};
use resip_core::magnus::{magnus_embed, Ring};
use resip_core::witness::{
    combine_witnesses, find_p_quotient_witness, verify_witness, PGroupQuotient, QuotientComponent, WitnessOutcome,
};
use resip_core::Error;

fn certificate(out: WitnessOutcome) -> PGroupQuotient {
    match out {
        WitnessOutcome::Certificate(q) => q,
        WitnessOutcome::Undecided { reason } => panic!("undecided: {reason}"),
    }
}

#[test]
fn fixture_certificates_verify() {
    let beta = common::beta();
    let id = MappingTorusSpec::new(FreeEndo::identity(2), "identity").unwrap();
    let cases: Vec<(&MappingTorusSpec, &str, u64)> = vec![
        (&beta, "x1 x2 X1 X2", 3),
        (&beta, "x1", 3),
        (&beta, "x1 x1 x1", 3),
        (&beta, "t", 3),
        (&beta, "t^3 x2", 3),
        (&id, "x1 x2 X1 X2", 2),
        (&id, "x1 x1", 2),
        (&id, "t^-2", 5),
    ];
    let mut certs = Vec::new();
    for (spec, g, p) in cases {
        let g: MappingTorusElement = g.parse::<MappingTorusElement>().unwrap().with_rank(spec.rank()).unwrap();
        let q = certificate(find_p_quotient_witness(spec, &g, p).unwrap());
        let check = verify_witness(&q).unwrap();
        assert!(check.valid, "{g} at {p}: {check:?}");
        if spec == &beta {
            certs.push(q);
        }
    }
    let combined = combine_witnesses(&certs).unwrap();
    assert_eq!(combined.survivors.len(), certs.len());
    assert!(verify_witness(&combined).unwrap().valid);
    assert_eq!(combined.order_log_bound, certs.iter().map(|c| c.order_log_bound).sum::<u64>());
}

#[test]
fn identity_commutator_certificate_shape() {
    let id = MappingTorusSpec::new(FreeEndo::identity(2), "identity").unwrap();
    let g = MappingTorusElement::fiber(FreeWord::parse(2, "x1 x2 X1 X2").unwrap());
    let q = certificate(find_p_quotient_witness(&id, &g, 2).unwrap());
    assert_eq!(
        q.components,
        vec![QuotientComponent::Magnus { degree: 2, precision: 1, induced_order_exponent: 0 }]
    );
    assert_eq!(q.survivors[0].image.get("X1X2").map(String::as_str), Some("1"));
}

#[test]
fn tampered_certificates_are_rejected() {
    let beta = common::beta();
    let g = MappingTorusElement::fiber(FreeWord::parse(3, "x1 X2").unwrap());
    let q = certificate(find_p_quotient_witness(&beta, &g, 3).unwrap());
    let mut wrong_image = q.clone();
    wrong_image.survivors[0].image.insert("X1".into(), "2".into());
    assert!(!verify_witness(&wrong_image).unwrap().survivors_ok);
    let mut dead = q.clone();
    dead.survivors[0].element = MappingTorusElement::fiber(FreeWord::identity(3));
    assert!(!verify_witness(&dead).unwrap().valid);
    let mut small = q;
    small.order_log_bound = 0;
    assert!(!verify_witness(&small).unwrap().bound_ok);
}

#[test]
fn mixed_primes_rejected() {
    let beta = common::beta();
    let t = MappingTorusElement::stable_letter(3, 1);
    let a = certificate(find_p_quotient_witness(&beta, &t, 2).unwrap());
    let b = certificate(find_p_quotient_witness(&beta, &t, 3).unwrap());
    assert_eq!(combine_witnesses(&[a, b]), Err(Error::MixedPrimes));
}

#[test]
fn consistent_with_classifier() {
    let mut rng = common::rng(0xc1a5);
    for k in 0..24 {
        let p = [2u64, 3, 5][k % 3];
        let rank = 2 + k % 2;
        let psi = common::random_unipotent(&mut rng, rank, 3)
            .compose(&common::random_torelli(&mut rng, rank, p as i64, 1))
            .unwrap();
        let spec = MappingTorusSpec::new(psi, "u").unwrap();
        assert!(free_fiber_residually_p(&spec, p).unwrap().is_residually_p());
        let w = FreeWord::random(&mut rng, rank, 1 + k % 4);
        let w = if w.is_identity() { FreeWord::generator(rank, 1) } else { w };
        let q = certificate(find_p_quotient_witness(&spec, &MappingTorusElement::fiber(w), p).unwrap());
        assert!(verify_witness(&q).unwrap().valid);
    }
    let beta = common::beta();
    for p in [2u64, 5, 7] {
        assert!(!free_fiber_residually_p(&beta, p).unwrap().is_residually_p());
        let g = MappingTorusElement::fiber(FreeWord::generator(3, 1));
        assert!(matches!(find_p_quotient_witness(&beta, &g, p).unwrap(), WitnessOutcome::Undecided { .. }));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn survival_is_monotone_in_degree(letters in prop::collection::vec(prop::sample::select(vec![1i32, -1, 2, -2]), 1..10),
                                       p in prop::sample::select(vec![2u64, 3, 5])) {
        let w = FreeWord::from_letters(2, &letters).unwrap();
        let ring: Ring<i64> = Ring::prime_field(p);
        let mut survived = false;
        for d in 1..=6 {
            let now = !magnus_embed(&w, d, ring.clone()).is_one();
            prop_assert!(!survived || now);
            survived = now;
        }
    }

    #[test]
    fn certificates_are_sound(seed in any::<u64>(), m in -4i64..=4, len in 1usize..6) {
        let mut rng = common::rng(seed);
        let p = 3;
        let psi = common::random_unipotent(&mut rng, 2, 3);
        let spec = MappingTorusSpec::new(psi, "u").unwrap();
        let w = FreeWord::random(&mut rng, 2, len);
        let g = MappingTorusElement::new(m, w);
        prop_assume!(!g.is_identity());
        let q = certificate(find_p_quotient_witness(&spec, &g, p).unwrap());
        let check = verify_witness(&q).unwrap();
        prop_assert!(check.valid);
    }
}
