use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("matrix is not invertible modulo {0}")]
    NotInvertibleMod(String),
    #[error("matrix is not invertible over the integers (det = {0})")]
    NotInvertible(String),
    #[error("{what} exceeded cap {cap}")]
    CapExceeded { what: &'static str, cap: u64 },
    #[error("element is the identity")]
    IsIdentity,
    #[error("layer {layer} basis has {size} elements, above the bound {bound}")]
    LayerTooDeep { layer: usize, size: usize, bound: usize },
    #[error("endomorphism has no certified inverse")]
    NotCertified,
    #[error("certified inverse does not invert the endomorphism")]
    BadInverse,
    #[error("invariant subspace search space {size} exceeds {bound}")]
    SearchSpaceTooLarge { size: u64, bound: u64 },
    #[error("fiber rank {0} too small; use the torus/Baumslag-Solitar classifiers")]
    RankTooSmall(usize),
    #[error("invalid Baumslag-Solitar parameter q = {0}")]
    InvalidQ(String),
    #[error("monodromy is not unipotent modulo {0} on homology")]
    NotUnipotentModP(u64),
    #[error("induced automorphism has order {order}, not a power of {p}")]
    NonPPowerOrder { order: u64, p: u64 },
    #[error("witnesses use different primes")]
    MixedPrimes,
    #[error("assignments do not generate Z/{0}")]
    NotTransitive(u64),
    #[error("endomorphism does not preserve the cover")]
    NotInvariant,
    #[error("group order is not a power of {0}")]
    NotAPGroup(u64),
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("map is not a homomorphism")]
    NotHomomorphism,
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
}

pub type Result<T> = std::result::Result<T, Error>;
