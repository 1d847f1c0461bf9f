//! Finite p-group quotients of mapping-torus groups in which a chosen element
//! survives.
//!
//! Two quotient families are used. A stable-letter quotient sends
//! `t^m w` to `m mod p^j`. A Magnus quotient is `Q ⋊ Z/p^s`, where `Q` is the
//! image of the fiber in the units of `F_p<<X>>` truncated above degree `d`
//! and `p^s` is the order of the automorphism the monodromy induces on `Q`.

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegrp::{FreeEndo, FreeWord, MappingTorusElement, MappingTorusSpec};
use crate::intlin::is_unipotent_mod;
use crate::magnus::{
    induced_order, induced_order_exponent, magnus_depth, magnus_embed, magnus_quotient_log_bound,
    series_table, Ring,
};
use crate::scalar::is_prime;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCaps {
    pub max_degree: usize,
    pub order_cap: u64,
    pub max_combine: usize,
    /// Skip the unipotence precondition. The search may then fail to find
    /// anything even when a quotient exists.
    pub exploratory: bool,
}

impl Default for WitnessCaps {
    fn default() -> Self {
        Self {
            max_degree: 8,
            order_cap: 6561,
            max_combine: 16,
            exploratory: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuotientComponent {
    /// `G -> Z/p^j`, killing the fiber.
    StableLetter { exponent: u32 },
    /// `G -> Q_d ⋊ Z/p^s`.
    Magnus {
        degree: usize,
        precision: u32,
        induced_order_exponent: u32,
    },
}

impl QuotientComponent {
    /// `log_p` of an upper bound on the component's order.
    pub fn log_order_bound(&self, rank: usize) -> u64 {
        match self {
            Self::StableLetter { exponent } => u64::from(*exponent),
            Self::Magnus {
                degree,
                induced_order_exponent,
                ..
            } => magnus_quotient_log_bound(rank, *degree) + u64::from(*induced_order_exponent),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Survivor {
    pub element: MappingTorusElement,
    /// Index into `components` of a factor where the image is nontrivial.
    pub component: usize,
    /// Printable image: fiber series coefficients and the stable-letter residue.
    pub image: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PGroupQuotient {
    pub p: u64,
    pub monodromy: FreeEndo,
    pub components: Vec<QuotientComponent>,
    pub survivors: Vec<Survivor>,
    /// The quotient has order at most `p^order_log_bound`.
    pub order_log_bound: u64,
}

impl PGroupQuotient {
    pub fn rank(&self) -> usize {
        self.monodromy.rank()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum WitnessOutcome {
    Certificate(PGroupQuotient),
    Undecided { reason: String },
}

impl WitnessOutcome {
    pub fn certificate(&self) -> Option<&PGroupQuotient> {
        match self {
            Self::Certificate(q) => Some(q),
            Self::Undecided { .. } => None,
        }
    }
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

fn smallest_exceeding(p: u64, m: u64) -> u32 {
    let mut j = 1;
    let mut q = p;
    while q <= m {
        q = q.saturating_mul(p);
        j += 1;
    }
    j
}

fn image_in(
    component: &QuotientComponent,
    g: &MappingTorusElement,
    p: u64,
) -> (bool, BTreeMap<String, String>) {
    let residue = |e: u32| g.t_exponent.rem_euclid(p.pow(e) as i64);
    match component {
        QuotientComponent::StableLetter { exponent } => {
            let r = residue(*exponent);
            (r != 0, BTreeMap::from([("t".to_string(), r.to_string())]))
        }
        QuotientComponent::Magnus {
            degree,
            induced_order_exponent,
            ..
        } => {
            let s = magnus_embed::<i64>(&g.fiber_word, *degree, Ring::prime_field(p));
            let r = residue(*induced_order_exponent);
            let mut table = series_table(&s);
            table.insert("t".to_string(), r.to_string());
            (!s.is_one() || r != 0, table)
        }
    }
}

/// Order of the automorphism induced on the level-`(p, d)` Magnus quotient.
pub fn induced_automorphism_order(spec: &MappingTorusSpec, p: u64, d: usize, cap: u64) -> Result<u64> {
    check_prime(p)?;
    let psi = spec.monodromy();
    if !is_unipotent_mod(&psi.abelianization_matrix(), p).unipotent {
        return Err(Error::NotUnipotentModP(p));
    }
    let s = induced_order_exponent(psi, p, d, cap)?;
    Ok(p.pow(s))
}

pub fn find_p_quotient_witness(
    spec: &MappingTorusSpec,
    g: &MappingTorusElement,
    p: u64,
) -> Result<WitnessOutcome> {
    find_p_quotient_witness_with(spec, g, p, &WitnessCaps::default())
}

pub fn find_p_quotient_witness_with(
    spec: &MappingTorusSpec,
    g: &MappingTorusElement,
    p: u64,
    caps: &WitnessCaps,
) -> Result<WitnessOutcome> {
    check_prime(p)?;
    if g.fiber_word.rank() != spec.rank() {
        return Err(Error::RankMismatch {
            expected: spec.rank(),
            found: g.fiber_word.rank(),
        });
    }
    if g.is_identity() {
        return Err(Error::IsIdentity);
    }
    let psi = spec.monodromy();
    let component = if g.t_exponent != 0 {
        QuotientComponent::StableLetter {
            exponent: smallest_exceeding(p, g.t_exponent.unsigned_abs()),
        }
    } else {
        if !caps.exploratory && !is_unipotent_mod(&psi.abelianization_matrix(), p).unipotent {
            return Ok(WitnessOutcome::Undecided {
                reason: Error::NotUnipotentModP(p).to_string(),
            });
        }
        let d = magnus_depth(&g.fiber_word, p, caps.max_degree)?;
        let s = match induced_order_exponent(psi, p, d, caps.order_cap) {
            Ok(s) => s,
            Err(e @ Error::NonPPowerOrder { .. }) if caps.exploratory => {
                return Ok(WitnessOutcome::Undecided {
                    reason: e.to_string(),
                })
            }
            Err(e) => return Err(e),
        };
        QuotientComponent::Magnus {
            degree: d,
            precision: 1,
            induced_order_exponent: s,
        }
    };
    let (_, image) = image_in(&component, g, p);
    Ok(WitnessOutcome::Certificate(PGroupQuotient {
        p,
        monodromy: psi.clone(),
        order_log_bound: component.log_order_bound(spec.rank()),
        components: vec![component],
        survivors: vec![Survivor {
            element: g.clone(),
            component: 0,
            image,
        }],
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub valid: bool,
    pub survivors_ok: bool,
    pub orders_ok: bool,
    pub kernel_invariant: bool,
    pub kernel_samples: usize,
    pub bound_ok: bool,
}

const KERNEL_SAMPLES: usize = 20;

/// Random elements of the kernel `F_n -> units of F_p<<X>>/deg > d`:
/// iterated commutators of weight `d + 1` and `p^j`-th powers with `p^j > d`.
pub fn sample_magnus_kernel(rank: usize, p: u64, d: usize, count: usize, seed: u64) -> Vec<FreeWord> {
    let mut rng = StdRng::seed_from_u64(seed);
    let j = smallest_exceeding(p, d as u64);
    (0..count)
        .map(|k| {
            if k % 2 == 0 {
                let len = rng.gen_range(1..=3);
                let mut w = FreeWord::random(&mut rng, rank, len);
                for _ in 0..d {
                    let len = rng.gen_range(1..=3);
                    let v = FreeWord::random(&mut rng, rank, len);
                    w = v.commutator(&w).expect("same rank");
                }
                w
            } else {
                let len = rng.gen_range(1..=3);
                FreeWord::random(&mut rng, rank, len).pow(p.pow(j) as i64)
            }
        })
        .collect()
}

/// Re-checks a stored certificate from its own data.
pub fn verify_witness(q: &PGroupQuotient) -> Result<WitnessCheck> {
    check_prime(q.p)?;
    let p = q.p;
    let rank = q.rank();
    let survivors_ok = !q.survivors.is_empty()
        && q.survivors.iter().all(|s| {
            s.element.fiber_word.rank() == rank
                && q.components
                    .get(s.component)
                    .is_some_and(|c| image_in(c, &s.element, p) == (true, s.image.clone()))
        });
    let mut orders_ok = true;
    let mut kernel_invariant = true;
    let mut kernel_samples = 0;
    let ring: Ring<i64> = Ring::prime_field(p);
    for c in &q.components {
        let QuotientComponent::Magnus {
            degree,
            induced_order_exponent,
            ..
        } = c
        else {
            continue;
        };
        let target = p
            .checked_pow(*induced_order_exponent)
            .ok_or(Error::CapExceeded {
                what: "induced automorphism order",
                cap: u64::MAX,
            })?;
        match induced_order(&q.monodromy, p, *degree, target.saturating_add(1)) {
            Ok(o) => orders_ok &= o == target,
            Err(Error::CapExceeded { .. }) => orders_ok = false,
            Err(e) => return Err(e),
        }
        for k in sample_magnus_kernel(rank, p, *degree, KERNEL_SAMPLES, *degree as u64) {
            kernel_samples += 1;
            let before = magnus_embed(&k, *degree, ring.clone()).is_one();
            let after = magnus_embed(&q.monodromy.apply(&k)?, *degree, ring.clone()).is_one();
            kernel_invariant &= before && after;
        }
    }
    let bound_ok = q.order_log_bound >= q.components.iter().map(|c| c.log_order_bound(rank)).sum();
    Ok(WitnessCheck {
        valid: survivors_ok && orders_ok && kernel_invariant && bound_ok,
        survivors_ok,
        orders_ok,
        kernel_invariant,
        kernel_samples,
        bound_ok,
    })
}

/// Direct product of quotients of the same group at the same prime.
pub fn combine_witnesses(ws: &[PGroupQuotient]) -> Result<PGroupQuotient> {
    combine_witnesses_with(ws, &WitnessCaps::default())
}

pub fn combine_witnesses_with(ws: &[PGroupQuotient], caps: &WitnessCaps) -> Result<PGroupQuotient> {
    let first = ws
        .first()
        .ok_or_else(|| Error::InvalidSpec("no witnesses to combine".into()))?;
    if ws.len() > caps.max_combine {
        return Err(Error::CapExceeded {
            what: "combined witnesses",
            cap: caps.max_combine as u64,
        });
    }
    if ws.iter().any(|w| w.p != first.p) {
        return Err(Error::MixedPrimes);
    }
    if ws.iter().any(|w| w.monodromy != first.monodromy) {
        return Err(Error::InvalidSpec("witnesses are for different groups".into()));
    }
    let mut out = PGroupQuotient {
        p: first.p,
        monodromy: first.monodromy.clone(),
        components: Vec::new(),
        survivors: Vec::new(),
        order_log_bound: 0,
    };
    for w in ws {
        let offset = out.components.len();
        out.components.extend(w.components.iter().cloned());
        out.survivors.extend(w.survivors.iter().map(|s| Survivor {
            component: s.component + offset,
            ..s.clone()
        }));
        out.order_log_bound += w.order_log_bound;
    }
    Ok(out)
}
