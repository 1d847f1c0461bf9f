//! Verdicts: residually `p`, residually nilpotent, and the torsion-free
//! nilpotent sufficiency certificate, for torus bundles, `BS(1, q)` and
//! free-fiber mapping tori.

pub mod fp;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegrp::MappingTorusSpec;
use crate::intlin::{is_unipotent_mod, lattice_chain_invariants, ChainInvariants, Matrix, ModMatrix, Poly};
use crate::magnus::unipotent_over_z_with;
use crate::magnus::MagnusCaps;
use crate::scalar::{is_prime, p_power_exponent, prime_divisors, Scalar};
use crate::IntMatrix;
use fp::{FpMatrix, Subspace};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub p: u64,
    #[serde(flatten)]
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    ResiduallyP { certificate: Certificate },
    NotResiduallyP { obstruction: Obstruction },
    Undecided {
        reason: String,
        /// Set when a search cap, not the mathematics, left the question open.
        #[serde(default)]
        capped: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "criterion", rename_all = "snake_case")]
pub enum Certificate {
    /// `(A - I)^index = 0 mod p` on (fiber) homology.
    UnipotentModP { index: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obstruction {
    /// The homology action is not unipotent mod `p`: its characteristic
    /// polynomial mod `p` differs from `(x - 1)^n`.
    NotUnipotentModP { charpoly_mod_p: Vec<u64> },
    /// No invariant subspace of codimension at least 2 has a quotient on which
    /// the action has `p`-power order.
    NoPPowerQuotient { subspaces_checked: u64 },
}

impl Verdict {
    pub fn is_residually_p(&self) -> bool {
        matches!(self.outcome, Outcome::ResiduallyP { .. })
    }

    pub fn is_not_residually_p(&self) -> bool {
        matches!(self.outcome, Outcome::NotResiduallyP { .. })
    }

    pub fn is_undecided(&self) -> bool {
        matches!(self.outcome, Outcome::Undecided { .. })
    }

    pub fn hit_cap(&self) -> bool {
        matches!(self.outcome, Outcome::Undecided { capped: true, .. })
    }

    pub fn label(&self) -> &'static str {
        match self.outcome {
            Outcome::ResiduallyP { .. } => "residually_p",
            Outcome::NotResiduallyP { .. } => "not_residually_p",
            Outcome::Undecided { .. } => "undecided",
        }
    }
}

/// Search bounds for the classifiers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyCaps {
    /// Largest `p^n` for exhaustive invariant-subspace enumeration.
    pub search_space: u64,
    /// Largest number of invariant subspaces visited.
    pub max_subspaces: u64,
    pub magnus: MagnusCaps,
}

impl Default for ClassifyCaps {
    fn default() -> Self {
        Self {
            search_space: 1_000_000,
            max_subspaces: 200_000,
            magnus: MagnusCaps::default(),
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

fn check_automorphism(a: &IntMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Malformed("matrix must be square".into()));
    }
    let d = a.det();
    if d.abs().is_one() {
        Ok(())
    } else {
        Err(Error::NotInvertible(d.to_string()))
    }
}

fn charpoly_mod_p(a: &IntMatrix, p: u64) -> Vec<u64> {
    a.charpoly()
        .reduce_mod(&BigInt::from(p))
        .coeffs()
        .iter()
        .map(|c| c.to_u64().expect("reduced"))
        .collect()
}

pub fn torus_residually_p(a: &IntMatrix, p: u64) -> Result<Verdict> {
    check_automorphism(a)?;
    check_prime(p)?;
    let u = is_unipotent_mod(a, p);
    if a.dim() == 2 && a.det().is_one() {
        let divides = (a.minus_identity().det() % BigInt::from(p)).is_zero();
        assert_eq!(
            divides, u.unipotent,
            "SL2 criteria disagree for {a} at p = {p}"
        );
    }
    let outcome = match u.index {
        Some(index) => Outcome::ResiduallyP {
            certificate: Certificate::UnipotentModP { index },
        },
        None => Outcome::NotResiduallyP {
            obstruction: Obstruction::NotUnipotentModP {
                charpoly_mod_p: charpoly_mod_p(a, p),
            },
        },
    };
    Ok(Verdict { p, outcome })
}

/// A set of primes: everything, or an explicit finite list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "PrimeSetRepr", into = "PrimeSetRepr")]
pub enum PrimeSet {
    All,
    Finite(Vec<BigInt>),
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct PrimeList(#[serde(with = "crate::scalar::json::vec")] Vec<BigInt>);

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", content = "primes", rename_all = "snake_case")]
enum PrimeSetRepr {
    All,
    Finite(PrimeList),
}

impl From<PrimeSetRepr> for PrimeSet {
    fn from(r: PrimeSetRepr) -> Self {
        match r {
            PrimeSetRepr::All => PrimeSet::All,
            PrimeSetRepr::Finite(PrimeList(ps)) => PrimeSet::Finite(ps),
        }
    }
}

impl From<PrimeSet> for PrimeSetRepr {
    fn from(s: PrimeSet) -> Self {
        match s {
            PrimeSet::All => PrimeSetRepr::All,
            PrimeSet::Finite(ps) => PrimeSetRepr::Finite(PrimeList(ps)),
        }
    }
}

impl PrimeSet {
    pub fn contains(&self, p: u64) -> bool {
        match self {
            PrimeSet::All => is_prime(p),
            PrimeSet::Finite(ps) => ps.contains(&BigInt::from(p)),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, PrimeSet::Finite(ps) if ps.is_empty())
    }

    fn from_gcd(g: &BigInt) -> Self {
        if g.is_zero() {
            PrimeSet::All
        } else {
            PrimeSet::Finite(prime_divisors(g))
        }
    }
}

/// Primes dividing the content of `charpoly(A) - (x - 1)^n`.
fn unipotent_prime_set(a: &IntMatrix) -> PrimeSet {
    let diff = a.charpoly().sub(&Poly::x_minus_one_pow(a.dim()));
    PrimeSet::from_gcd(&diff.content())
}

pub fn residually_p_prime_set(a: &IntMatrix) -> Result<PrimeSet> {
    check_automorphism(a)?;
    Ok(unipotent_prime_set(a))
}

pub fn torus_residually_nilpotent(a: &IntMatrix) -> Result<bool> {
    check_automorphism(a)?;
    Ok(endo_semidirect_omega_nilpotent(a))
}

/// Whether `Z^n x_A Z` (any square `A`) is omega-nilpotent, i.e. the chain
/// `(A - I)^i Z^n` meets in zero.
pub fn endo_semidirect_omega_nilpotent(a: &IntMatrix) -> bool {
    chain_invariants(a).intersection_trivial()
}

pub fn chain_invariants(a: &IntMatrix) -> ChainInvariants {
    lattice_chain_invariants(&a.minus_identity())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BsReport {
    #[serde(with = "crate::scalar::json")]
    pub q: BigInt,
    pub residually_p_primes: PrimeSet,
    pub omega_nilpotent: bool,
    /// `q = 1` is the abelian group `Z^2`.
    pub trivial_case: bool,
}

pub fn bs_classify(q: &BigInt) -> Result<BsReport> {
    if !q.is_positive() {
        return Err(Error::InvalidQ(q.to_string()));
    }
    let qm1 = q - BigInt::one();
    let primes = PrimeSet::from_gcd(&qm1);
    let omega = *q != BigInt::from(2);

    let m = Matrix::from_rows(vec![vec![q.clone()]])?;
    assert_eq!(unipotent_prime_set(&m), primes);
    assert_eq!(endo_semidirect_omega_nilpotent(&m), omega);

    Ok(BsReport {
        q: q.clone(),
        residually_p_primes: primes,
        omega_nilpotent: omega,
        trivial_case: q.is_one(),
    })
}

/// An invariant subspace whose quotient carries an action of `p`-power order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientWitness {
    pub subspace: Vec<Vec<u64>>,
    pub quotient_dim: usize,
    pub induced_order: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientSearch {
    pub exists: bool,
    pub witness: Option<QuotientWitness>,
    pub subspaces_checked: u64,
}

pub fn p_power_order_quotient_exists<T: Scalar>(m: &ModMatrix<T>) -> Result<QuotientSearch> {
    p_power_order_quotient_exists_with(m, &ClassifyCaps::default())
}

/// Exhaustive search over invariant subspaces `W` of codimension at least 2,
/// in order of dimension and then canonical basis, for one whose quotient
/// action has `p`-power order.
pub fn p_power_order_quotient_exists_with<T: Scalar>(
    m: &ModMatrix<T>,
    caps: &ClassifyCaps,
) -> Result<QuotientSearch> {
    let p = m.modulus().to_u64().unwrap_or(0);
    check_prime(p)?;
    let n = m.dim();
    if n < 2 {
        return Err(Error::RankTooSmall(n));
    }
    if m.det().is_zero() {
        return Err(Error::NotInvertibleMod(p.to_string()));
    }
    let size = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > caps.search_space as u128 {
        return Err(Error::SearchSpaceTooLarge {
            size: u64::try_from(size).unwrap_or(u64::MAX),
            bound: caps.search_space,
        });
    }
    let fm = to_fp(m.matrix(), p);
    let order_cap = group_order_bound(p, n);

    let mut checked = 0u64;
    let mut level: BTreeSet<Subspace> = BTreeSet::from([Subspace::zero()]);
    while !level.is_empty() {
        let mut next = BTreeSet::new();
        for w in &level {
            checked += 1;
            if checked > caps.max_subspaces {
                return Err(Error::SearchSpaceTooLarge {
                    size: checked,
                    bound: caps.max_subspaces,
                });
            }
            let q = w.quotient_action(&fm);
            let ord = fp::order(&q, order_cap).expect("order of an invertible matrix is bounded");
            if p_power_exponent(ord, p).is_some() {
                return Ok(QuotientSearch {
                    exists: true,
                    witness: Some(QuotientWitness {
                        subspace: w.rows.clone(),
                        quotient_dim: n - w.dim(),
                        induced_order: ord,
                    }),
                    subspaces_checked: checked,
                });
            }
            for v in complement_vectors(w, n, p) {
                let s = w.invariant_closure(&v, &fm);
                if s.dim() + 2 <= n {
                    next.insert(s);
                }
            }
        }
        level = next;
    }
    Ok(QuotientSearch {
        exists: false,
        witness: None,
        subspaces_checked: checked,
    })
}

/// Nonzero vectors vanishing on the pivot coordinates of `w`; together with
/// `w` they represent every coset.
fn complement_vectors(w: &Subspace, n: usize, p: u64) -> impl Iterator<Item = Vec<u64>> {
    let piv: BTreeSet<usize> = w.pivots().into_iter().collect();
    let free: Vec<usize> = (0..n).filter(|j| !piv.contains(j)).collect();
    let count = p.pow(free.len() as u32);
    (1..count).map(move |mut k| {
        let mut v = vec![0; n];
        for &j in &free {
            v[j] = k % p;
            k /= p;
        }
        v
    })
}

/// `|GL_n(F_p)|` saturated; every element order divides it.
fn group_order_bound(p: u64, n: usize) -> u64 {
    let pn = p.saturating_pow(n as u32);
    (0..n as u32).fold(1u64, |acc, i| acc.saturating_mul(pn - p.saturating_pow(i))).saturating_add(1)
}

fn to_fp<T: Scalar>(m: &Matrix<T>, p: u64) -> FpMatrix {
    let pm = T::from_u64(p).expect("prime fits scalar");
    FpMatrix::new(
        p,
        m.dim(),
        m.entries()
            .iter()
            .map(|x| x.modulo(&pm).to_u64().expect("reduced entry"))
            .collect(),
    )
}

/// Closed form for the same question: with `p^a` the `p`-part of the order of
/// `M`, the smallest invariant subspace with a `p`-power-order quotient is
/// `U = im(M^(p^a) - I)`, so a qualifying quotient exists iff `codim U >= 2`.
pub fn minimal_p_power_kernel<T: Scalar>(m: &ModMatrix<T>) -> Result<Subspace> {
    let p = m.modulus().to_u64().unwrap_or(0);
    check_prime(p)?;
    let fm = to_fp(m.matrix(), p);
    let ord = fp::order(&fm, group_order_bound(p, m.dim())).ok_or(Error::NotInvertibleMod(p.to_string()))?;
    let mut pa = 1u64;
    let mut rest = ord;
    while rest % p == 0 {
        rest /= p;
        pa *= p;
    }
    Ok(fp::image(&fp::minus_identity(&fp::mat_pow(&fm, pa))))
}

pub fn free_fiber_residually_p(spec: &MappingTorusSpec, p: u64) -> Result<Verdict> {
    free_fiber_residually_p_with(spec, p, &ClassifyCaps::default())
}

/// Every branch reads only the abelianization mod `p`.
pub fn free_fiber_residually_p_with(spec: &MappingTorusSpec, p: u64, caps: &ClassifyCaps) -> Result<Verdict> {
    check_prime(p)?;
    let n = spec.rank();
    if n < 2 {
        return Err(Error::RankTooSmall(n));
    }
    let a = spec.monodromy().abelianization_matrix();
    let u = is_unipotent_mod(&a, p);
    if let Some(index) = u.index {
        return Ok(Verdict {
            p,
            outcome: Outcome::ResiduallyP {
                certificate: Certificate::UnipotentModP { index },
            },
        });
    }
    let m = ModMatrix::new(&a, BigInt::from(p))?;
    let outcome = match p_power_order_quotient_exists_with(&m, caps) {
        Ok(search) if !search.exists => Outcome::NotResiduallyP {
            obstruction: Obstruction::NoPPowerQuotient {
                subspaces_checked: search.subspaces_checked,
            },
        },
        Ok(search) => {
            let w = search.witness.expect("witness accompanies success");
            Outcome::Undecided {
                reason: format!(
                    "not unipotent mod {p}, but an invariant quotient of dimension {} has induced order {}",
                    w.quotient_dim, w.induced_order
                ),
                capped: false,
            }
        }
        Err(Error::SearchSpaceTooLarge { size, bound }) => Outcome::Undecided {
            reason: format!("invariant subspace search too large ({size} > {bound})"),
            capped: true,
        },
        Err(e) => return Err(e),
    };
    Ok(Verdict { p, outcome })
}

/// Least `k >= 1` with `p | det(A^k - I)` for `A` in `SL_2(Z)`.
pub fn sl2_power_divisibility(a: &IntMatrix, p: u64, cap: Option<u64>) -> Result<u64> {
    check_prime(p)?;
    if a.dim() != 2 || !a.det().is_one() {
        return Err(Error::Malformed("expected a 2x2 matrix of determinant 1".into()));
    }
    let cap = cap.unwrap_or_else(|| p.saturating_mul(p.saturating_mul(p).saturating_sub(1)));
    let fm = to_fp(a, p);
    let mut acc = fm.clone();
    for k in 1..=cap {
        let b = fp::minus_identity(&acc);
        let det = (b.get(0, 0) * b.get(1, 1) + p * p - b.get(0, 1) * b.get(1, 0) % p) % p;
        if det == 0 {
            return Ok(k);
        }
        acc = fp::mat_mul(&acc, &fm);
    }
    Err(Error::CapExceeded {
        what: "power search",
        cap,
    })
}

/// Sufficient certificate for residual torsion-free nilpotence: the monodromy
/// is unipotent over `Z` on every layer up to `c`.
pub fn rtfn_sufficient(spec: &MappingTorusSpec, c: usize) -> Result<bool> {
    unipotent_over_z_with(spec.monodromy(), c, &MagnusCaps::default())
}

pub fn rtfn_sufficient_with(spec: &MappingTorusSpec, c: usize, caps: &MagnusCaps) -> Result<bool> {
    unipotent_over_z_with(spec.monodromy(), c, caps)
}
