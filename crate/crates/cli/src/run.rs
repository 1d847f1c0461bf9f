//! Task execution. Each task is pure; reports come back in input order.

use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;
use resip_core::braid::{
    artin_endo, braid_permutation, cover_from_finite_quotient, endo_preserves_cover, induced_cover_homology,
    BraidWord,
};
use resip_core::classify::{
    bs_classify, chain_invariants, free_fiber_residually_p_with, residually_p_prime_set, rtfn_sufficient_with,
    sl2_power_divisibility, torus_residually_nilpotent, torus_residually_p,
};
use resip_core::extension::{
    circle_bundle_central_witness, heisenberg_checks, nilpotence_sample, verify_cocycle, CircleBundleSpec,
};
use resip_core::freegrp::MappingTorusElement;
use resip_core::scalar::primes_up_to;
use resip_core::witness::{combine_witnesses_with, find_p_quotient_witness_with, verify_witness, WitnessOutcome};
use resip_core::{Error, IntMatrix, IntPoly};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::caps::CapOverrides;
use crate::schema::{
    from_matrix, to_matrix, BraidCoverTask, BsTask, ExtensionCheck, ExtensionTask, FiberedTask, Int, PrimesTask,
    Sl2PowerTask, Task, TaskFile, TaskKind, TorusTask, WitnessTask, SCHEMA_VERSION,
};

const DEFAULT_PRIME_BOUND: u64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Error,
    CapExceeded,
}

/// A resource cap that stopped or weakened a computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapEvent {
    pub what: String,
    pub limit: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub id: String,
    pub kind: String,
    pub status: Status,
    pub verdict: Value,
    pub certificate: Value,
    pub cap_events: Vec<CapEvent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: u64,
    pub entries: Vec<ReportEntry>,
}

impl Report {
    pub fn any_cap_exceeded(&self) -> bool {
        self.entries.iter().any(|e| e.status == Status::CapExceeded)
    }

    /// 0 when every task ran to completion, 3 when a cap was hit.
    pub fn exit_code(&self) -> i32 {
        if self.any_cap_exceeded() {
            3
        } else {
            0
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub parallelism: usize,
    /// Caps from the environment and command line; the task file's own caps
    /// sit between these and the defaults.
    pub env_caps: CapOverrides,
    pub flag_caps: CapOverrides,
    pub timing: bool,
}

struct Outcome {
    verdict: Value,
    certificate: Value,
    caps: Vec<CapEvent>,
}

fn cap_event(e: &Error) -> Option<CapEvent> {
    match e {
        Error::CapExceeded { what, cap } => Some(CapEvent {
            what: what.to_string(),
            limit: *cap,
        }),
        Error::SearchSpaceTooLarge { bound, .. } => Some(CapEvent {
            what: "invariant subspace search".into(),
            limit: *bound,
        }),
        Error::LayerTooDeep { bound, .. } => Some(CapEvent {
            what: "Lie layer basis".into(),
            limit: *bound as u64,
        }),
        _ => None,
    }
}

pub fn run_tasks(file: &TaskFile, opts: &RunOptions) -> Report {
    let base = opts
        .env_caps
        .merged(file.caps.as_ref().unwrap_or(&CapOverrides::default()))
        .merged(&opts.flag_caps);
    let run = |(i, t): (usize, &Task)| run_task(i, t, &base, opts.timing);
    let entries = if opts.parallelism <= 1 {
        file.tasks.iter().enumerate().map(run).collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.parallelism)
            .build()
            .expect("thread pool")
            .install(|| file.tasks.par_iter().enumerate().map(run).collect())
    };
    Report {
        version: SCHEMA_VERSION,
        entries,
    }
}

pub fn run_task(index: usize, task: &Task, base: &CapOverrides, timing: bool) -> ReportEntry {
    let caps = match &task.caps {
        Some(c) => base.merged(c),
        None => base.clone(),
    };
    let start = Instant::now();
    let result = execute(&task.kind, &caps);
    let elapsed_ms = timing.then(|| start.elapsed().as_millis() as u64);
    let id = task.id.clone().unwrap_or_else(|| format!("task-{index}"));
    let kind = task.kind.name().to_string();
    match result {
        Ok(o) => ReportEntry {
            id,
            kind,
            status: if o.caps.is_empty() { Status::Ok } else { Status::CapExceeded },
            verdict: o.verdict,
            certificate: o.certificate,
            cap_events: o.caps,
            error: None,
            elapsed_ms,
        },
        Err(e) => {
            let ev = cap_event(&e);
            ReportEntry {
                id,
                kind,
                status: if ev.is_some() { Status::CapExceeded } else { Status::Error },
                verdict: Value::Null,
                certificate: Value::Null,
                cap_events: ev.into_iter().collect(),
                error: Some(e.to_string()),
                elapsed_ms,
            }
        }
    }
}

fn malformed(e: String) -> Error {
    Error::Malformed(e)
}

fn prime_list(primes: &Option<Vec<u64>>, up_to: &Option<u64>) -> Vec<u64> {
    match (primes, up_to) {
        (Some(ps), _) => ps.clone(),
        (None, Some(b)) => primes_up_to(*b),
        (None, None) => primes_up_to(DEFAULT_PRIME_BOUND),
    }
}

fn poly_json(p: &IntPoly) -> Vec<Int> {
    p.coeffs().iter().cloned().map(Int).collect()
}

fn poly_from(coeffs: &[Int]) -> IntPoly {
    IntPoly::new(coeffs.iter().map(|c| c.0.clone()).collect())
}

fn divisibility(charpoly: &IntPoly, factors: &[Vec<Int>]) -> Vec<Value> {
    factors
        .iter()
        .map(|f| {
            let q = poly_from(f);
            let divides = q.is_monic() && charpoly.divisible_by_monic(&q);
            let cyclotomic_cofactor = divides && charpoly.div_rem_monic(&q).0.is_cyclotomic_product();
            json!({
                "factor": f,
                "divides": divides,
                "cofactor_cyclotomic": cyclotomic_cofactor,
            })
        })
        .collect()
}

fn execute(kind: &TaskKind, caps: &CapOverrides) -> Result<Outcome, Error> {
    let ok = |verdict, certificate| {
        Ok(Outcome {
            verdict,
            certificate,
            caps: Vec::new(),
        })
    };
    match kind {
        TaskKind::Torus(TorusTask { matrix, primes, primes_up_to }) => {
            let a = to_matrix(matrix).map_err(malformed)?;
            let verdicts = prime_list(primes, primes_up_to)
                .into_iter()
                .map(|p| torus_residually_p(&a, p))
                .collect::<Result<Vec<_>, _>>()?;
            let at: Vec<u64> = verdicts.iter().filter(|v| v.is_residually_p()).map(|v| v.p).collect();
            ok(
                json!({
                    "prime_set": residually_p_prime_set(&a)?,
                    "residually_nilpotent": torus_residually_nilpotent(&a)?,
                    "residually_p_at": at,
                    "verdicts": verdicts,
                }),
                json!({
                    "charpoly": poly_json(&a.charpoly()),
                    "det_a_minus_i": Int(a.minus_identity().det()),
                    "lattice_chain": chain_invariants(&a),
                }),
            )
        }
        TaskKind::Primes(PrimesTask { matrix }) => {
            let a = to_matrix(matrix).map_err(malformed)?;
            ok(
                json!({ "prime_set": residually_p_prime_set(&a)? }),
                json!({ "charpoly": poly_json(&a.charpoly()) }),
            )
        }
        TaskKind::Fibered(FiberedTask { monodromy, primes, primes_up_to, layers }) => {
            let spec = monodromy.spec().map_err(malformed)?;
            let ccaps = caps.classify();
            let verdicts = prime_list(primes, primes_up_to)
                .into_iter()
                .map(|p| free_fiber_residually_p_with(&spec, p, &ccaps))
                .collect::<Result<Vec<_>, _>>()?;
            let mut cap_events: Vec<CapEvent> = verdicts
                .iter()
                .filter(|v| v.hit_cap())
                .map(|_| CapEvent {
                    what: "invariant subspace search".into(),
                    limit: ccaps.max_subspaces.min(ccaps.search_space),
                })
                .collect();
            cap_events.dedup();
            let at: Vec<u64> = verdicts.iter().filter(|v| v.is_residually_p()).map(|v| v.p).collect();
            let mut verdict = json!({ "residually_p_at": at, "verdicts": verdicts });
            if let Some(c) = layers {
                match rtfn_sufficient_with(&spec, *c, &ccaps.magnus) {
                    Ok(b) => verdict["unipotent_over_z_to_layer"] = json!({ "layers": c, "holds": b }),
                    Err(e) => match cap_event(&e) {
                        Some(ev) => cap_events.push(ev),
                        None => return Err(e),
                    },
                }
            }
            let mut certificate = json!({
                "abelianization": from_matrix(&spec.monodromy().abelianization_matrix()),
                "images": spec.monodromy().images().iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            });
            if let Some(b) = monodromy.braid_word().map_err(malformed)? {
                let perm = braid_permutation(&b);
                let k = perm.order();
                certificate["braid"] = json!({
                    "permutation": perm.perm,
                    "permutation_order": k,
                    "power_is_pure": braid_permutation(&b.pow(k)).is_pure,
                });
            }
            Ok(Outcome {
                verdict,
                certificate,
                caps: cap_events,
            })
        }
        TaskKind::Bs(BsTask { q }) => ok(serde_json::to_value(bs_classify(q.value())?).expect("report"), Value::Null),
        TaskKind::BraidCover(BraidCoverTask { strands, braid, modulus, assignments, factors, powers }) => {
            let b = BraidWord::parse(*strands, braid)?;
            let phi = artin_endo(&b);
            let cover = cover_from_finite_quotient(*strands, *modulus, assignments)?;
            if !endo_preserves_cover(&phi, &cover)? {
                return Err(Error::NotInvariant);
            }
            let m = induced_cover_homology(&phi, &cover)?;
            let f = m.charpoly();
            let power_checks = powers
                .iter()
                .map(|pc| {
                    let mk = induced_cover_homology(&artin_endo(&b.pow(pc.k as usize)), &cover)?;
                    let fk = mk.charpoly();
                    Ok(json!({
                        "k": pc.k,
                        "matrix": from_matrix(&mk),
                        "charpoly": poly_json(&fk),
                        "equals_matrix_power": mk == m.pow(pc.k),
                        "divisibility": divisibility(&fk, &pc.factors),
                    }))
                })
                .collect::<Result<Vec<Value>, Error>>()?;
            ok(
                json!({
                    "rank": m.dim(),
                    "divisibility": divisibility(&f, factors),
                    "powers": power_checks,
                }),
                json!({
                    "cover_index": cover.index(),
                    "schreier_basis": cover.schreier_basis().iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                    "matrix": from_matrix(&m),
                    "charpoly": poly_json(&f),
                    "determinant": Int(m.det()),
                }),
            )
        }
        TaskKind::Witness(WitnessTask { monodromy, elements, p, exploratory }) => {
            let spec = monodromy.spec().map_err(malformed)?;
            let wcaps = caps.witness(*exploratory);
            let mut found = Vec::new();
            let mut undecided = Vec::new();
            for s in elements {
                let g = s.parse::<MappingTorusElement>()?.with_rank(spec.rank())?;
                match find_p_quotient_witness_with(&spec, &g, *p, &wcaps)? {
                    WitnessOutcome::Certificate(q) => found.push(q),
                    WitnessOutcome::Undecided { reason } => undecided.push(json!({ "element": s, "reason": reason })),
                }
            }
            let certificate = if found.is_empty() {
                Value::Null
            } else {
                let q = combine_witnesses_with(&found, &wcaps)?;
                let check = verify_witness(&q)?;
                json!({
                    "quotient": q,
                    "check": check,
                    "verify_command": "resip verify-witness --certificate <report.json>",
                })
            };
            let survivors: Vec<String> = found
                .iter()
                .flat_map(|q| q.survivors.iter().map(|s| s.element.to_string()))
                .collect();
            ok(
                json!({
                    "p": p,
                    "outcome": if undecided.is_empty() { "certificate" } else { "undecided" },
                    "survivors": survivors,
                    "undecided": undecided,
                }),
                certificate,
            )
        }
        TaskKind::Extension(ExtensionTask { check, genus, euler, cocycle }) => match check {
            ExtensionCheck::Heisenberg => {
                let r = heisenberg_checks();
                ok(json!({ "all_pass": r.all_pass() }), serde_json::to_value(r).expect("report"))
            }
            ExtensionCheck::CircleBundle => {
                let spec = CircleBundleSpec {
                    genus: genus.ok_or_else(|| malformed("missing genus".into()))?,
                    euler: euler.ok_or_else(|| malformed("missing euler".into()))?,
                };
                let c = circle_bundle_central_witness(spec)?;
                ok(json!({ "verified": c.verified }), serde_json::to_value(c).expect("certificate"))
            }
            ExtensionCheck::Cocycle => {
                let f = cocycle.as_ref().ok_or_else(|| malformed("missing cocycle".into()))?;
                let check = verify_cocycle(f);
                let sample = check.valid.then(|| nilpotence_sample(f, 24, 1));
                ok(
                    json!({ "valid": check.valid }),
                    json!({ "check": check, "nilpotence": sample }),
                )
            }
        },
        TaskKind::Sl2Power(Sl2PowerTask { matrix, primes }) => {
            let a: IntMatrix = to_matrix(matrix).map_err(malformed)?;
            let ks = primes
                .iter()
                .map(|&p| Ok(json!({ "p": p, "k": sl2_power_divisibility(&a, p, caps.power_search)? })))
                .collect::<Result<Vec<Value>, Error>>()?;
            let trace: BigInt = &a[(0, 0)] + &a[(1, 1)];
            ok(json!({ "least_powers": ks }), json!({ "trace": Int(trace) }))
        }
    }
}
