//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line, in order.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resip_core::braid::{artin_endo, braid_permutation, cover_from_finite_quotient, induced_cover_homology, BraidWord};
use resip_core::classify::{
    bs_classify, chain_invariants, free_fiber_residually_p, residually_p_prime_set, sl2_power_divisibility,
    torus_residually_nilpotent, torus_residually_p, Obstruction, Outcome, PrimeSet,
};
use resip_core::extension::{
    circle_bundle_central_witness, heisenberg_checks, verify_cocycle, BaseElem, CircleBundleSpec, Cocycle2,
};
use resip_core::freegrp::{FreeEndo, FreeWord, MappingTorusElement, MappingTorusSpec};
use resip_core::magnus::{lie_layer_matrix, lyndon_words, magnus_embed, witt_dimension, Ring};
use resip_core::pgrouplab::{
    check_cyclic_abelianization, frattini_data, intersect, tower_lemma_check, unitriangular3,
};
use resip_core::witness::{combine_witnesses, find_p_quotient_witness, verify_witness, WitnessOutcome};
use resip_core::{IntMatrix, IntPoly};
use resip_cli::{parse_task_file, run_tasks, RunOptions};
use serde_json::Value;

type Check = fn() -> Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn mat(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_i64_rows(rows).unwrap()
}

fn small_primes(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect()
}

/// `(A - I)^n = 0 mod p`, by repeated multiplication.
fn nilpotent_mod_p(a: &IntMatrix, p: u64) -> bool {
    let b = a.minus_identity();
    let pb = BigInt::from(p);
    let mut acc = IntMatrix::identity(a.dim());
    for _ in 0..a.dim() {
        acc = acc.mul_ref(&b).reduce_mod(&pb);
    }
    acc.is_zero()
}

fn random_sl2(rng: &mut ChaCha8Rng, max_len: usize) -> IntMatrix {
    let gens = [
        mat(&[&[1, 1], &[0, 1]]),
        mat(&[&[1, -1], &[0, 1]]),
        mat(&[&[1, 0], &[1, 1]]),
        mat(&[&[1, 0], &[-1, 1]]),
    ];
    let len = rng.gen_range(0..=max_len);
    (0..len).fold(IntMatrix::identity(2), |acc, _| acc.mul_ref(&gens[rng.gen_range(0..4)]))
}

fn beta_word() -> BraidWord {
    BraidWord::parse(3, "s1 S2").unwrap()
}

fn beta() -> MappingTorusSpec {
    MappingTorusSpec::new(artin_endo(&beta_word()), "beta").unwrap()
}

fn alpha() -> MappingTorusSpec {
    let a = FreeEndo::parse(2, &["x1 x1 x2", "x1 x2"], Some(&["x1 X2", "x2 X1 x2"])).unwrap();
    MappingTorusSpec::new(a, "alpha").unwrap()
}

fn sol_fixture() -> Result<(), String> {
    let a = mat(&[&[2, 1], &[1, 1]]);
    for p in small_primes(100) {
        let v = torus_residually_p(&a, p).map_err(|e| e.to_string())?;
        ensure!(v.is_not_residually_p(), "p = {p}: {v:?}");
    }
    ensure!(!torus_residually_nilpotent(&a).unwrap(), "reported residually nilpotent");
    Ok(())
}

fn cubed_prime_set() -> Result<(), String> {
    let a = mat(&[&[2, 1], &[1, 1]]);
    ensure!(a.pow(3) == mat(&[&[13, 8], &[8, 5]]), "cube mismatch");
    let set = residually_p_prime_set(&mat(&[&[13, 8], &[8, 5]])).map_err(|e| e.to_string())?;
    ensure!(set == PrimeSet::Finite(vec![BigInt::from(2)]), "got {set:?}");
    Ok(())
}

fn sl2_criteria_equivalent() -> Result<(), String> {
    let mut rng = rng(0x5_12);
    for _ in 0..500 {
        let a = random_sl2(&mut rng, 20);
        let det = a.minus_identity().det();
        for p in small_primes(50) {
            let divides = (&det % BigInt::from(p)) == BigInt::from(0);
            ensure!(divides == nilpotent_mod_p(&a, p), "oracle disagrees on {a} at {p}");
            let v = torus_residually_p(&a, p).map_err(|e| e.to_string())?;
            ensure!(divides == v.is_residually_p(), "classifier disagrees on {a} at {p}");
        }
    }
    Ok(())
}

fn bs_sweep() -> Result<(), String> {
    for q in 1i64..=50 {
        let r = bs_classify(&BigInt::from(q)).map_err(|e| e.to_string())?;
        if q == 1 {
            ensure!(r.residually_p_primes == PrimeSet::All, "q = 1: {r:?}");
        } else {
            let expected: Vec<BigInt> =
                small_primes(50).into_iter().filter(|p| (q - 1) % *p as i64 == 0).map(BigInt::from).collect();
            ensure!(r.residually_p_primes == PrimeSet::Finite(expected), "q = {q}: {r:?}");
        }
        ensure!(r.omega_nilpotent == (q != 2), "q = {q}: omega-nilpotence");
        let chain = chain_invariants(&mat(&[&[q]])).intersection_trivial();
        ensure!(chain == r.omega_nilpotent, "q = {q}: lattice chain disagrees");
    }
    Ok(())
}

fn sl2_powers() -> Result<(), String> {
    let mut rng = rng(0xdead);
    let cat = mat(&[&[2, 1], &[1, 1]]);
    for _ in 0..20 {
        let a = random_sl2(&mut rng, 12);
        for p in [2u64, 3, 5, 7] {
            let hits = |k: u64| {
                let d = a.pow(k).minus_identity().det();
                (&d % BigInt::from(p)) == BigInt::from(0)
            };
            let k = sl2_power_divisibility(&a, p, None).map_err(|e| e.to_string())?;
            ensure!(k <= p * (p * p - 1), "k = {k} too large for {a} at {p}");
            ensure!(hits(k) && (1..k).all(|j| !hits(j)), "{a} at {p}: k = {k} not least");
        }
    }
    ensure!(sl2_power_divisibility(&cat, 2, None).unwrap() == 3, "cat map at 2");
    ensure!(sl2_power_divisibility(&cat, 5, None).unwrap() == 2, "cat map at 5");
    Ok(())
}

fn beta_fixture() -> Result<(), String> {
    let b = beta_word();
    let perm = braid_permutation(&b);
    ensure!(perm.order() == 3 && !perm.is_pure, "permutation {perm:?}");
    ensure!(braid_permutation(&b.pow(3)).is_pure, "beta^3 not pure");
    let spec = beta();
    ensure!(free_fiber_residually_p(&spec, 3).unwrap().is_residually_p(), "not residually 3");
    for p in [2u64, 5, 7, 11, 13] {
        let v = free_fiber_residually_p(&spec, p).map_err(|e| e.to_string())?;
        ensure!(v.is_not_residually_p(), "p = {p}: {v:?}");
    }
    Ok(())
}

fn beta_cover() -> Result<(), String> {
    let b = beta_word();
    let cover = cover_from_finite_quotient(3, 2, &[1, 1, 1]).map_err(|e| e.to_string())?;
    ensure!(cover.subgroup_rank() == 5, "rank {}", cover.subgroup_rank());
    let m = induced_cover_homology(&artin_endo(&b), &cover).map_err(|e| e.to_string())?;
    let m3 = induced_cover_homology(&artin_endo(&b.pow(3)), &cover).map_err(|e| e.to_string())?;
    ensure!(m.pow(3) == m3, "M(beta)^3 != M(beta^3)");
    let f = m.charpoly();
    let q = IntPoly::from_i64(&[1, -3, 1]);
    ensure!(f.divisible_by_monic(&q), "x^2-3x+1 does not divide {f}");
    ensure!(f.div_rem_monic(&q).0.is_cyclotomic_product(), "cofactor not cyclotomic");
    let f3 = m3.charpoly();
    ensure!(f3.divisible_by_monic(&IntPoly::from_i64(&[1, -18, 1])), "x^2-18x+1 does not divide {f3}");
    Ok(())
}

fn alpha_fixture() -> Result<(), String> {
    let spec = alpha();
    ensure!(spec.monodromy().abelianization_matrix() == mat(&[&[2, 1], &[1, 1]]), "abelianization");
    for p in [2u64, 3, 5, 7] {
        let v = free_fiber_residually_p(&spec, p).map_err(|e| e.to_string())?;
        ensure!(
            matches!(v.outcome, Outcome::NotResiduallyP { obstruction: Obstruction::NoPPowerQuotient { .. } }),
            "p = {p}: {v:?}"
        );
    }
    Ok(())
}

/// Lyndon words counted by brute force: strictly smaller than every proper rotation.
fn brute_lyndon_count(n: usize, len: usize) -> usize {
    let total = n.pow(len as u32);
    (0..total)
        .filter(|&start| {
            let mut code = start;
            let w: Vec<usize> = (0..len)
                .map(|_| {
                    let c = code % n;
                    code /= n;
                    c
                })
                .collect();
            (1..len).all(|r| {
                let rot: Vec<usize> = w[r..].iter().chain(&w[..r]).copied().collect();
                w < rot
            })
        })
        .count()
}

fn magnus_engine() -> Result<(), String> {
    let mut rng = rng(0x3a9);
    for k in 0..200 {
        let rank = 2 + k % 3;
        let d = 1 + k % 5;
        let u = FreeWord::random(&mut rng, rank, 1 + k % 9);
        let v = FreeWord::random(&mut rng, rank, 1 + (k * 7) % 11);
        let uv = u.multiply(&v).unwrap();
        let lhs = magnus_embed::<BigInt>(&uv, d, Ring::Integers);
        let rhs = magnus_embed(&u, d, Ring::Integers).mul(&magnus_embed(&v, d, Ring::Integers));
        ensure!(lhs == rhs, "{u} * {v} at degree {d}");
    }
    for n in 1..=4 {
        for i in 1..=4 {
            let brute = brute_lyndon_count(n, i);
            ensure!(witt_dimension(n, i) == brute, "Witt n = {n}, i = {i}");
            ensure!(lyndon_words(n, i).len() == brute, "Lyndon n = {n}, i = {i}");
        }
    }
    for k in 0..50 {
        let p = [2u64, 3, 5][k % 3];
        let rank = 2 + k % 2;
        let phi = random_unipotent(&mut rng, rank, 4);
        ensure!(nilpotent_mod_p(&phi.abelianization_matrix(), p), "seed automorphism not unipotent");
        for i in 1..=4 {
            let m = lie_layer_matrix(&phi, i, Ring::Integers).map_err(|e| e.to_string())?;
            ensure!(nilpotent_mod_p(&m.matrix, p), "layer {i} of {phi} at {p}");
        }
    }
    Ok(())
}

/// Upper unitriangular transvections and inner automorphisms.
fn random_unipotent(rng: &mut ChaCha8Rng, rank: usize, moves: usize) -> FreeEndo {
    (0..moves).fold(FreeEndo::identity(rank), |acc, _| {
        let m = if rng.gen_bool(0.2) {
            let len = rng.gen_range(1..=2);
            FreeEndo::inner(&FreeWord::random(rng, rank, len))
        } else {
            let i = rng.gen_range(1..rank);
            let j = rng.gen_range(i + 1..=rank);
            let e = if rng.gen_bool(0.5) { 1 } else { -1 };
            FreeEndo::right_transvection(rank, i, j, e)
        };
        m.compose(&acc).unwrap()
    })
}

fn random_torelli(rng: &mut ChaCha8Rng, rank: usize, p: i64, moves: usize) -> FreeEndo {
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

fn witness_soundness() -> Result<(), String> {
    let beta = beta();
    let id = MappingTorusSpec::new(FreeEndo::identity(2), "identity").unwrap();
    let cases: [(&MappingTorusSpec, &str, u64); 6] = [
        (&beta, "x1 x2 X1 X2", 3),
        (&beta, "x1 X2", 3),
        (&beta, "t", 3),
        (&beta, "t^3 x2", 3),
        (&id, "x1 x2 X1 X2", 2),
        (&id, "t^-2 x1", 5),
    ];
    let mut beta_certs = Vec::new();
    for (spec, g, p) in cases {
        let g: MappingTorusElement = g.parse::<MappingTorusElement>().unwrap().with_rank(spec.rank()).unwrap();
        let q = match find_p_quotient_witness(spec, &g, p).map_err(|e| e.to_string())? {
            WitnessOutcome::Certificate(q) => q,
            WitnessOutcome::Undecided { reason } => return Err(format!("{g} at {p}: {reason}")),
        };
        let check = verify_witness(&q).map_err(|e| e.to_string())?;
        ensure!(check.valid, "{g} at {p}: {check:?}");
        if spec == &beta {
            beta_certs.push(q);
        }
    }
    let combined = combine_witnesses(&beta_certs).map_err(|e| e.to_string())?;
    ensure!(combined.survivors.len() == beta_certs.len(), "survivors lost in combination");
    ensure!(verify_witness(&combined).unwrap().valid, "combined certificate rejected");
    Ok(())
}

fn pgroup_lab() -> Result<(), String> {
    for p in [2u64, 3, 5] {
        let g = unitriangular3(p).map_err(|e| e.to_string())?;
        ensure!(g.order() as u64 == p * p * p, "|UT(3,{p})| = {}", g.order());
        let f = frattini_data(&g).map_err(|e| e.to_string())?;
        ensure!(f.rank == 2, "Frattini rank {} at {p}", f.rank);
    }
    for p in [2u64, 3] {
        let g = unitriangular3(p).unwrap();
        ensure!(check_cyclic_abelianization(&g).unwrap(), "cyclic abelianization lemma at {p}");
        let subs = g.subgroups().unwrap();
        for h in &subs {
            // independent brute force: H/H' cyclic implies H cyclic
            let d: HashSet<u32> = g.derived(h).into_iter().collect();
            let index = (h.len() / d.len()) as u64;
            let quotient_cyclic = h.iter().any(|&x| (1..index).all(|m| !d.contains(&g.pow(x, m))));
            let cyclic = h.iter().any(|&x| g.element_order(x) == h.len() as u64);
            ensure!(!quotient_cyclic || cyclic, "lemma fails on a subgroup of order {}", h.len());
        }
        let normals: Vec<_> = subs.into_iter().filter(|h| g.is_normal(h)).collect();
        for k1 in &normals {
            for k2 in &normals {
                ensure!(tower_lemma_check(&g, k1, k2).unwrap(), "tower lemma at {p}");
                let k = intersect(k1, k2);
                ensure!(g.is_normal(&k), "intersection not normal");
            }
        }
    }
    Ok(())
}

fn extension_module() -> Result<(), String> {
    ensure!(heisenberg_checks().all_pass(), "Heisenberg checks");
    for genus in 1..=3 {
        for euler in 1..=3 {
            let c = circle_bundle_central_witness(CircleBundleSpec { genus, euler }).map_err(|e| e.to_string())?;
            ensure!(c.verified, "circle bundle ({genus}, {euler})");
        }
    }
    ensure!(verify_cocycle(&Cocycle2::heisenberg()).valid, "Heisenberg cocycle rejected");
    let table = |values: [[i64; 3]; 3]| Cocycle2::Table {
        mul: (0..3).map(|a| (0..3).map(|b| (a + b) % 3).collect()).collect(),
        values: values.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(),
        modulus: None,
    };
    ensure!(verify_cocycle(&table([[0, 0, 0], [0, 0, 1], [0, 1, 1]])).valid, "carry cocycle rejected");
    let bad = table([[0, 0, 0], [0, 1, 0], [0, 0, 0]]);
    let check = verify_cocycle(&bad);
    ensure!(!check.valid, "negative control accepted");
    let [g, h, k] = check.violation.ok_or("no violating triple")?;
    ensure!(bad.defect(&g, &h, &k) != BigInt::from(0), "reported triple has zero defect");
    ensure!(matches!(g, BaseElem::Index(_)), "table triple");
    Ok(())
}

fn torelli_stability() -> Result<(), String> {
    let spec = beta();
    let base = free_fiber_residually_p(&spec, 3).unwrap();
    let mut rng = rng(0x7e11);
    for _ in 0..20 {
        let tau = random_torelli(&mut rng, 3, 3, 3);
        ensure!(tau.is_mod_p_torelli(3), "tau not mod-3 Torelli");
        let composed = MappingTorusSpec::new(spec.monodromy().compose(&tau).unwrap(), "beta tau").unwrap();
        let v = free_fiber_residually_p(&composed, 3).map_err(|e| e.to_string())?;
        ensure!(v == base, "verdict changed: {v:?}");
    }
    Ok(())
}

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn resip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resip")).args(args).output().expect("spawn resip")
}

fn cli_contract() -> Result<(), String> {
    let mut fixtures: Vec<PathBuf> = std::fs::read_dir(fixture_dir())
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    fixtures.sort();
    ensure!(fixtures.len() >= 9, "only {} fixture files", fixtures.len());
    for f in &fixtures {
        let text = std::fs::read_to_string(f).unwrap();
        let parsed = parse_task_file(&text).map_err(|e| format!("{}: {e}", f.display()))?;
        let again = parse_task_file(&parsed.to_json()).map_err(|e| e.to_string())?;
        ensure!(again == parsed, "{}: round trip changed the tasks", f.display());
        let name = f.to_str().unwrap();
        let serial = resip(&["--tasks", name, "--parallel", "1"]);
        let parallel = resip(&["--tasks", name, "--parallel", "4"]);
        ensure!(serial.status.code() == Some(0), "{name}: exit {:?}", serial.status.code());
        ensure!(serial.stdout == parallel.stdout, "{name}: output depends on parallelism");
        let report: Value = serde_json::from_slice(&serial.stdout).map_err(|e| e.to_string())?;
        for e in report["entries"].as_array().unwrap() {
            ensure!(e["status"] == "ok", "{name}: {} has status {}", e["id"], e["status"]);
        }
    }
    let all = fixture_dir().join("all.json");
    let parsed = parse_task_file(&std::fs::read_to_string(&all).unwrap()).unwrap();
    let one = run_tasks(&parsed, &RunOptions { parallelism: 1, ..Default::default() });
    let many = run_tasks(&parsed, &RunOptions { parallelism: 8, ..Default::default() });
    ensure!(one == many, "library report depends on parallelism");

    let tmp = Path::new(env!("CARGO_TARGET_TMPDIR"));
    let bad = tmp.join("bad_schema.json");
    std::fs::write(&bad, r#"{"version": 1, "tasks": [{"kind": "torus", "matrix": [[1, "x"]]}]}"#).unwrap();
    let out = resip(&["--tasks", bad.to_str().unwrap()]);
    ensure!(out.status.code() == Some(2), "bad schema exit {:?}", out.status.code());
    ensure!(String::from_utf8_lossy(&out.stderr).contains("tasks[0].matrix[0][1]"), "error path missing");
    let out = resip(&["--caps", "power_search=1", "sl2-power", "--matrix", "2 1; 1 1", "--p", "7"]);
    ensure!(out.status.code() == Some(3), "cap exit {:?}", out.status.code());
    let out = resip(&["primes", "--matrix", "13 8; 8 5"]);
    ensure!(out.status.code() == Some(0), "one-shot exit {:?}", out.status.code());
    Ok(())
}

fn main() {
    let criteria: [(&str, Check); 14] = [
        ("sol torus bundle is residually p for no p <= 100", sol_fixture),
        ("prime set of [[13,8],[8,5]] is {2}", cubed_prime_set),
        ("SL2 determinant and unipotence criteria agree", sl2_criteria_equivalent),
        ("BS(1,q) sweep for q in 1..=50", bs_sweep),
        ("least k with p | det(A^k - I)", sl2_powers),
        ("beta: residually p at 3 only", beta_fixture),
        ("beta on the double cover", beta_cover),
        ("alpha: obstruction at 2, 3, 5, 7", alpha_fixture),
        ("Magnus engine", magnus_engine),
        ("witness certificates re-verify and combine", witness_soundness),
        ("p-group lab", pgroup_lab),
        ("central extensions", extension_module),
        ("verdicts stable under mod-3 Torelli twists", torelli_stability),
        ("CLI contract and shipped fixtures", cli_contract),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(()) => println!("PASS {:>2} {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
