//! Central extensions `0 -> A -> E -> Q -> 1` given by normalized 2-cocycles,
//! with group law `(a, g)(b, h) = (a + b + f(g, h), gh)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intlin::Matrix;
use crate::scalar::Scalar;
use crate::IntMatrix;

/// Element of the base group: a vector in `Z^r`, or an index into a table.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BaseElem {
    Vector(#[serde(with = "crate::scalar::json::vec")] Vec<BigInt>),
    Index(usize),
}

impl BaseElem {
    pub fn vector(v: &[i64]) -> Self {
        BaseElem::Vector(v.iter().map(|&x| BigInt::from(x)).collect())
    }
}

/// A normalized 2-cocycle with values in `Z` or `Z/m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Cocycle2 {
    /// `f(u, v) = u^T F v` on `Z^r`.
    Bilinear {
        form: IntMatrix,
        #[serde(default, with = "crate::scalar::json::option")]
        modulus: Option<BigInt>,
    },
    /// A finite base group by Cayley table (element 0 is the identity) and
    /// the value table `f(g, h) = values[g][h]`.
    Table {
        mul: Vec<Vec<usize>>,
        #[serde(with = "crate::scalar::json::vec2")]
        values: Vec<Vec<BigInt>>,
        #[serde(default, with = "crate::scalar::json::option")]
        modulus: Option<BigInt>,
    },
}

impl Cocycle2 {
    pub fn bilinear(form: IntMatrix) -> Self {
        Cocycle2::Bilinear { form, modulus: None }
    }

    /// The Heisenberg cocycle `f((a,b),(c,d)) = a d`.
    pub fn heisenberg() -> Self {
        Self::bilinear(Matrix::from_i64_rows(&[&[0, 1], &[0, 0]]).expect("2x2"))
    }

    pub fn zero_bilinear(r: usize) -> Self {
        Self::bilinear(Matrix::zeros(r, r))
    }

    fn modulus(&self) -> Option<&BigInt> {
        match self {
            Cocycle2::Bilinear { modulus, .. } | Cocycle2::Table { modulus, .. } => modulus.as_ref(),
        }
    }

    pub fn reduce(&self, a: BigInt) -> BigInt {
        match self.modulus() {
            Some(m) => a.modulo(m),
            None => a,
        }
    }

    pub fn base_identity(&self) -> BaseElem {
        match self {
            Cocycle2::Bilinear { form, .. } => BaseElem::Vector(vec![BigInt::zero(); form.rows()]),
            Cocycle2::Table { .. } => BaseElem::Index(0),
        }
    }

    pub fn check_base(&self, g: &BaseElem) -> Result<()> {
        match (self, g) {
            (Cocycle2::Bilinear { form, .. }, BaseElem::Vector(v)) if v.len() == form.rows() => Ok(()),
            (Cocycle2::Table { mul, .. }, BaseElem::Index(i)) if *i < mul.len() => Ok(()),
            _ => Err(Error::Malformed(format!("base element {g:?} does not fit the cocycle"))),
        }
    }

    pub fn base_mul(&self, g: &BaseElem, h: &BaseElem) -> BaseElem {
        match (self, g, h) {
            (Cocycle2::Bilinear { .. }, BaseElem::Vector(u), BaseElem::Vector(v)) => {
                BaseElem::Vector(u.iter().zip(v).map(|(a, b)| a + b).collect())
            }
            (Cocycle2::Table { mul, .. }, BaseElem::Index(a), BaseElem::Index(b)) => BaseElem::Index(mul[*a][*b]),
            _ => panic!("base elements do not match the cocycle"),
        }
    }

    pub fn base_inv(&self, g: &BaseElem) -> BaseElem {
        match (self, g) {
            (Cocycle2::Bilinear { .. }, BaseElem::Vector(u)) => BaseElem::Vector(u.iter().map(|a| -a).collect()),
            (Cocycle2::Table { mul, .. }, BaseElem::Index(a)) => {
                BaseElem::Index(mul[*a].iter().position(|&c| c == 0).expect("group table"))
            }
            _ => panic!("base element does not match the cocycle"),
        }
    }

    pub fn eval(&self, g: &BaseElem, h: &BaseElem) -> BigInt {
        let raw = match (self, g, h) {
            (Cocycle2::Bilinear { form, .. }, BaseElem::Vector(u), BaseElem::Vector(v)) => {
                let fv = form.mul_vec(v);
                u.iter().zip(&fv).map(|(a, b)| a * b).sum()
            }
            (Cocycle2::Table { values, .. }, BaseElem::Index(a), BaseElem::Index(b)) => values[*a][*b].clone(),
            _ => panic!("base elements do not match the cocycle"),
        };
        self.reduce(raw)
    }

    /// `f(g,h) + f(gh,k) - f(h,k) - f(g,hk)`
    pub fn defect(&self, g: &BaseElem, h: &BaseElem, k: &BaseElem) -> BigInt {
        let gh = self.base_mul(g, h);
        let hk = self.base_mul(h, k);
        self.reduce(self.eval(g, h) + self.eval(&gh, k) - self.eval(h, k) - self.eval(g, &hk))
    }

    /// Deterministic sample of base elements; vectors have entries in `[-5, 5]`.
    pub fn sample_base(&self, count: usize, seed: u64) -> Vec<BaseElem> {
        let mut rng = StdRng::seed_from_u64(seed);
        match self {
            Cocycle2::Bilinear { form, .. } => (0..count)
                .map(|_| BaseElem::Vector((0..form.rows()).map(|_| BigInt::from(rng.gen_range(-5..=5))).collect()))
                .collect(),
            Cocycle2::Table { mul, .. } => (0..count).map(|_| BaseElem::Index(rng.gen_range(0..mul.len()))).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocycleCheck {
    pub valid: bool,
    pub violation: Option<[BaseElem; 3]>,
    pub triples_checked: u64,
}

/// Cocycle identity and normalization. Tables are checked exhaustively;
/// bilinear forms satisfy the identity identically, which is confirmed on a
/// deterministic sample of triples.
pub fn verify_cocycle(f: &Cocycle2) -> CocycleCheck {
    let fail = |v: [BaseElem; 3], n| CocycleCheck {
        valid: false,
        violation: Some(v),
        triples_checked: n,
    };
    let id = f.base_identity();
    let triples: Box<dyn Iterator<Item = [BaseElem; 3]>> = match f {
        Cocycle2::Table { mul, values, .. } => {
            let n = mul.len();
            let shape_ok = values.len() == n
                && values.iter().all(|r| r.len() == n)
                && mul.iter().all(|r| r.len() == n && r.iter().all(|&c| c < n));
            if !shape_ok {
                return CocycleCheck {
                    valid: false,
                    violation: None,
                    triples_checked: 0,
                };
            }
            Box::new((0..n).flat_map(move |a| {
                (0..n).flat_map(move |b| (0..n).map(move |c| [BaseElem::Index(a), BaseElem::Index(b), BaseElem::Index(c)]))
            }))
        }
        Cocycle2::Bilinear { .. } => {
            let s = f.sample_base(300, 0x5eed);
            let t: Vec<[BaseElem; 3]> = (0..100).map(|i| [s[3 * i].clone(), s[3 * i + 1].clone(), s[3 * i + 2].clone()]).collect();
            Box::new(t.into_iter())
        }
    };
    let mut checked = 0;
    for [g, h, k] in triples {
        checked += 1;
        if !f.eval(&id, &g).is_zero() || !f.eval(&g, &id).is_zero() {
            return fail([id.clone(), g.clone(), id.clone()], checked);
        }
        if !f.defect(&g, &h, &k).is_zero() {
            return fail([g, h, k], checked);
        }
    }
    CocycleCheck {
        valid: true,
        violation: None,
        triples_checked: checked,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExtensionElement {
    #[serde(with = "crate::scalar::json")]
    pub central: BigInt,
    pub base: BaseElem,
}

impl ExtensionElement {
    pub fn new(central: impl Into<BigInt>, base: BaseElem) -> Self {
        Self {
            central: central.into(),
            base,
        }
    }

    pub fn identity(f: &Cocycle2) -> Self {
        Self::new(0, f.base_identity())
    }

    pub fn is_identity(&self, f: &Cocycle2) -> bool {
        f.reduce(self.central.clone()).is_zero() && self.base == f.base_identity()
    }
}

pub fn ext_multiply(x: &ExtensionElement, y: &ExtensionElement, f: &Cocycle2) -> ExtensionElement {
    ExtensionElement {
        central: f.reduce(&x.central + &y.central + f.eval(&x.base, &y.base)),
        base: f.base_mul(&x.base, &y.base),
    }
}

pub fn ext_inverse(x: &ExtensionElement, f: &Cocycle2) -> ExtensionElement {
    let u_inv = f.base_inv(&x.base);
    ExtensionElement {
        central: f.reduce(-&x.central - f.eval(&x.base, &u_inv)),
        base: u_inv,
    }
}

/// `x y x^-1 y^-1`
pub fn ext_commutator(x: &ExtensionElement, y: &ExtensionElement, f: &Cocycle2) -> ExtensionElement {
    let xy = ext_multiply(x, y, f);
    let t = ext_multiply(&xy, &ext_inverse(x, f), f);
    ext_multiply(&t, &ext_inverse(y, f), f)
}

pub fn ext_pow(x: &ExtensionElement, e: i64, f: &Cocycle2) -> ExtensionElement {
    let base = if e < 0 { ext_inverse(x, f) } else { x.clone() };
    (0..e.unsigned_abs()).fold(ExtensionElement::identity(f), |acc, _| ext_multiply(&acc, &base, f))
}

/// Class-two and torsion-freeness checks on samples of a bilinear extension
/// of `Z^r` by `Z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NilpotenceSample {
    /// Every sampled commutator is central.
    pub commutators_central: bool,
    /// Commutators of commutators with samples are trivial.
    pub gamma3_trivial: bool,
    /// Some sampled commutator is nontrivial.
    pub nonabelian: bool,
    /// `x^m != 1` for sampled `x != 1` and `1 <= m <= 12`.
    pub torsion_free: bool,
    pub samples: usize,
}

impl NilpotenceSample {
    pub fn class_exactly_two(&self) -> bool {
        self.commutators_central && self.gamma3_trivial && self.nonabelian
    }
}

fn sample_elements(f: &Cocycle2, count: usize, seed: u64) -> Vec<ExtensionElement> {
    let mut rng = StdRng::seed_from_u64(seed);
    f.sample_base(count, seed ^ 0xa5a5)
        .into_iter()
        .map(|b| ExtensionElement::new(rng.gen_range(-5..=5), b))
        .collect()
}

pub fn nilpotence_sample(f: &Cocycle2, count: usize, seed: u64) -> NilpotenceSample {
    let xs = sample_elements(f, count, seed);
    let id = f.base_identity();
    let mut central = true;
    let mut gamma3 = true;
    let mut nonabelian = false;
    for x in &xs {
        for y in &xs {
            let c = ext_commutator(x, y, f);
            if c.base != id {
                central = false;
            }
            if !c.is_identity(f) {
                nonabelian = true;
            }
            for z in xs.iter().take(8) {
                if !ext_commutator(&c, z, f).is_identity(f) {
                    gamma3 = false;
                }
            }
        }
    }
    let torsion_free = xs
        .iter()
        .filter(|x| !x.is_identity(f))
        .all(|x| (1..=12).all(|m| !ext_pow(x, m, f).is_identity(f)));
    NilpotenceSample {
        commutators_central: central,
        gamma3_trivial: gamma3,
        nonabelian,
        torsion_free,
        samples: xs.len(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeisenbergReport {
    pub commutator_xy_is_z: bool,
    pub z_central: bool,
    pub class_two: bool,
    pub torsion_free: bool,
    pub products: [(ExtensionElement, ExtensionElement); 2],
}

impl HeisenbergReport {
    pub fn all_pass(&self) -> bool {
        self.commutator_xy_is_z && self.z_central && self.class_two && self.torsion_free
    }
}

pub fn heisenberg_checks() -> HeisenbergReport {
    let f = Cocycle2::heisenberg();
    let x = ExtensionElement::new(0, BaseElem::vector(&[1, 0]));
    let y = ExtensionElement::new(0, BaseElem::vector(&[0, 1]));
    let z = ExtensionElement::new(1, BaseElem::vector(&[0, 0]));
    let xy = ext_commutator(&x, &y, &f);
    let z_central = ext_commutator(&x, &z, &f).is_identity(&f) && ext_commutator(&y, &z, &f).is_identity(&f);
    let class = ext_commutator(&xy, &x, &f).is_identity(&f) && ext_commutator(&xy, &y, &f).is_identity(&f);
    let sample = nilpotence_sample(&f, 40, 7);
    HeisenbergReport {
        commutator_xy_is_z: xy == z,
        z_central,
        class_two: class && sample.class_exactly_two(),
        torsion_free: sample.torsion_free,
        products: [
            (ext_multiply(&x, &y, &f), ext_multiply(&y, &x, &f)),
            (
                ext_multiply(&ExtensionElement::new(2, f.base_identity()), &ExtensionElement::new(3, f.base_identity()), &f),
                ExtensionElement::new(5, f.base_identity()),
            ),
        ],
    }
}

/// A homomorphism between base groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseHom {
    /// `Z^r -> Z^s`, column `j` the image of `e_j`.
    Linear { matrix: IntMatrix },
    /// Table groups: `images[g]`.
    Table { images: Vec<usize> },
}

impl BaseHom {
    pub fn apply(&self, g: &BaseElem) -> BaseElem {
        match (self, g) {
            (BaseHom::Linear { matrix }, BaseElem::Vector(v)) => BaseElem::Vector(matrix.mul_vec(v)),
            (BaseHom::Table { images }, BaseElem::Index(i)) => BaseElem::Index(images[*i]),
            _ => panic!("base element does not match the homomorphism"),
        }
    }
}

/// Whether `f = phi^* k`, i.e. `f(g, h) = k(phi g, phi h)` for all `g, h`.
pub fn pullback_equality_check(f: &Cocycle2, k: &Cocycle2, phi: &BaseHom) -> Result<bool> {
    match (f, k, phi) {
        (Cocycle2::Bilinear { form: ff, modulus: mf }, Cocycle2::Bilinear { form: kf, modulus: mk }, BaseHom::Linear { matrix }) => {
            if matrix.cols() != ff.rows() || matrix.rows() != kf.rows() {
                return Err(Error::Malformed("homomorphism shape does not match the cocycles".into()));
            }
            if mf != mk {
                return Ok(false);
            }
            // phi^* k has form Phi^T K Phi.
            let pulled = matrix.transpose().mul_ref(kf).mul_ref(matrix);
            Ok(match mf {
                Some(m) => pulled.reduce_mod(m) == ff.reduce_mod(m),
                None => &pulled == ff,
            })
        }
        (Cocycle2::Table { mul: gm, .. }, Cocycle2::Table { mul: hm, .. }, BaseHom::Table { images }) => {
            let n = gm.len();
            if images.len() != n || images.iter().any(|&i| i >= hm.len()) {
                return Err(Error::NotHomomorphism);
            }
            for a in 0..n {
                for b in 0..n {
                    if images[gm[a][b]] != hm[images[a]][images[b]] {
                        return Err(Error::NotHomomorphism);
                    }
                }
            }
            for a in 0..n {
                for b in 0..n {
                    let (ga, gb) = (BaseElem::Index(a), BaseElem::Index(b));
                    if f.eval(&ga, &gb) != k.eval(&phi.apply(&ga), &phi.apply(&gb)) {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        _ => Err(Error::Malformed("cocycles and homomorphism are of different kinds".into())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircleBundleSpec {
    pub genus: u32,
    pub euler: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircleBundleCertificate {
    pub genus: u32,
    pub euler: i64,
    /// Image of each `[a_i, b_i]`; all equal to `(e, 0)`.
    #[serde(with = "crate::scalar::json::vec")]
    pub commutator_images: Vec<BigInt>,
    pub relator_image: ExtensionElement,
    pub z_image: ExtensionElement,
    pub z_power_image: ExtensionElement,
    /// `z`-image has no nontrivial power up to this exponent.
    pub z_order_checked_to: u32,
    pub nilpotence: NilpotenceSample,
    pub verified: bool,
}

/// Map of `<a_i, b_i, z | prod [a_i, b_i] = z^e, z central>` onto the
/// class-two extension of `Z^{2g}` by `Z` with cocycle `e * sum u_{a_i} v_{b_i}`,
/// sending `z` to `(g, 0)`.
pub fn circle_bundle_central_witness(spec: CircleBundleSpec) -> Result<CircleBundleCertificate> {
    if spec.genus < 1 {
        return Err(Error::InvalidSpec(format!("genus {} must be at least 1", spec.genus)));
    }
    if spec.euler == 0 {
        return Err(Error::InvalidSpec("Euler number must be nonzero".into()));
    }
    let g = spec.genus as usize;
    let e = BigInt::from(spec.euler);
    let mut form = Matrix::<BigInt>::zeros(2 * g, 2 * g);
    for i in 0..g {
        form[(2 * i, 2 * i + 1)] = e.clone();
    }
    let f = Cocycle2::bilinear(form);
    let gen = |k: usize| {
        let mut v = vec![BigInt::zero(); 2 * g];
        v[k] = BigInt::one();
        ExtensionElement::new(0, BaseElem::Vector(v))
    };
    let mut relator = ExtensionElement::identity(&f);
    let mut comm_images = Vec::with_capacity(g);
    let mut comms_ok = true;
    for i in 0..g {
        let c = ext_commutator(&gen(2 * i), &gen(2 * i + 1), &f);
        comms_ok &= c == ExtensionElement::new(e.clone(), f.base_identity());
        comm_images.push(c.central.clone());
        relator = ext_multiply(&relator, &c, &f);
    }
    let z = ExtensionElement::new(BigInt::from(g), f.base_identity());
    let z_power = ext_pow(&z, spec.euler, &f);
    let z_central = (0..2 * g).all(|k| ext_commutator(&z, &gen(k), &f).is_identity(&f));
    let z_infinite = (1..=20).all(|m| !ext_pow(&z, m, &f).is_identity(&f));
    let nilpotence = nilpotence_sample(&f, 24, u64::from(spec.genus) * 31 + spec.euler.unsigned_abs());
    let verified = comms_ok
        && relator == z_power
        && relator.central == BigInt::from(g) * &e
        && z_central
        && z_infinite
        && nilpotence.class_exactly_two()
        && nilpotence.torsion_free
        && verify_cocycle(&f).valid;
    Ok(CircleBundleCertificate {
        genus: spec.genus,
        euler: spec.euler,
        commutator_images: comm_images,
        relator_image: relator,
        z_image: z,
        z_power_image: z_power,
        z_order_checked_to: 20,
        nilpotence,
        verified,
    })
}
