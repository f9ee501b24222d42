//! Abelian extensions of Q as pairs (modulus N, subgroup H of (Z/NZ)^×).
//!
//! The unit group (Z/NZ)^× is split into cyclic components by the Chinese
//! remainder theorem: the smallest primitive root for each odd prime power,
//! and `-1`, `5` for the 2-part. Discrete logarithms turn residues into
//! exponent vectors, so subgroups become integer lattices and all field
//! operations reduce to Hermite and Smith normal forms.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::intmat::{self, Matrix};

/// A place of Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Infinity,
    Prime(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => write!(f, "inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for Place {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "oo" => Ok(Place::Infinity),
            t => {
                let p: u64 = t
                    .parse()
                    .map_err(|_| Error::Unsupported(format!("`{s}` is not a place")))?;
                if arith::is_prime(p) {
                    Ok(Place::Prime(p))
                } else {
                    Err(Error::Unsupported(format!("{p} is not prime")))
                }
            }
        }
    }
}

impl Serialize for Place {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ComponentKind {
    Cyclic,
    MinusOne,
    Five,
}

#[derive(Debug, Clone)]
struct Component {
    prime: u64,
    block: u64,
    local_gen: u64,
    order: u64,
    order_factors: Vec<(u64, u32)>,
    kind: ComponentKind,
    global: u64,
}

/// `(Z/NZ)^×` with a fixed decomposition into cyclic components.
#[derive(Debug, Clone)]
pub struct UnitGroup {
    modulus: u64,
    factors: Vec<(u64, u32)>,
    comps: Vec<Component>,
}

impl UnitGroup {
    pub fn new(modulus: u64) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        let factors = arith::factor(modulus);
        let mut comps = Vec::new();
        for &(q, a) in &factors {
            let block = q.pow(a);
            let rest = modulus / block;
            let lift = |local: u64| arith::crt(&[(local, block), (1, rest)]);
            if q == 2 {
                if a >= 2 {
                    comps.push(Component {
                        prime: 2,
                        block,
                        local_gen: block - 1,
                        order: 2,
                        order_factors: vec![(2, 1)],
                        kind: ComponentKind::MinusOne,
                        global: lift(block - 1),
                    });
                }
                if a >= 3 {
                    comps.push(Component {
                        prime: 2,
                        block,
                        local_gen: 5,
                        order: 1 << (a - 2),
                        order_factors: vec![(2, a - 2)],
                        kind: ComponentKind::Five,
                        global: lift(5),
                    });
                }
            } else {
                let g = arith::primitive_root(q, a);
                let mut order_factors = arith::factor(q - 1);
                if a > 1 {
                    order_factors.push((q, a - 1));
                }
                comps.push(Component {
                    prime: q,
                    block,
                    local_gen: g,
                    order: (q - 1) * q.pow(a - 1),
                    order_factors,
                    kind: ComponentKind::Cyclic,
                    global: lift(g),
                });
            }
        }
        UnitGroup { modulus, factors, comps }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn prime_factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.comps.len()
    }

    pub fn order(&self) -> u64 {
        self.comps.iter().map(|c| c.order).product()
    }

    /// Orders of the cyclic components.
    pub fn orders(&self) -> Vec<u64> {
        self.comps.iter().map(|c| c.order).collect()
    }

    /// Residues mod N generating each cyclic component.
    pub fn basis(&self) -> Vec<u64> {
        self.comps.iter().map(|c| c.global).collect()
    }

    /// Generators of the components attached to the prime `q` (the inertia
    /// block at `q` inside `(Z/NZ)^×`).
    pub fn block_generators(&self, q: u64) -> Vec<u64> {
        self.comps.iter().filter(|c| c.prime == q).map(|c| c.global).collect()
    }

    pub fn one(&self) -> u64 {
        1 % self.modulus.max(2)
    }

    /// Exponent vector of a unit residue.
    pub fn log(&self, x: u64) -> Vec<u64> {
        self.comps
            .iter()
            .map(|c| {
                let r = x % c.block;
                match c.kind {
                    ComponentKind::MinusOne => u64::from(r % 4 == 3),
                    ComponentKind::Five => {
                        let r = if r % 4 == 3 { c.block - r } else { r };
                        arith::discrete_log(5, r, c.order, &c.order_factors, c.block).expect("5 generates the 1 mod 4 units")
                    }
                    ComponentKind::Cyclic => arith::discrete_log(c.local_gen, r, c.order, &c.order_factors, c.block)
                        .unwrap_or_else(|| panic!("{x} is not a unit mod {}", self.modulus)),
                }
            })
            .collect()
    }

    /// Residue with the given exponent vector.
    pub fn exp(&self, v: &[u64]) -> u64 {
        if self.modulus == 1 {
            return 1;
        }
        self.comps
            .iter()
            .zip(v)
            .fold(1u64, |acc, (c, &k)| arith::mul_mod(acc, arith::pow_mod(c.global, k % c.order, self.modulus), self.modulus))
    }

    fn exp_big(&self, v: &[BigInt]) -> u64 {
        let reduced: Vec<u64> = self.comps.iter().zip(v).map(|(c, x)| arith::bigint_mod(x, c.order)).collect();
        self.exp(&reduced)
    }

    pub fn relations(&self) -> Matrix {
        let r = self.rank();
        (0..r)
            .map(|i| (0..r).map(|j| BigInt::from(if i == j { self.comps[i].order } else { 0 })).collect())
            .collect()
    }

    /// Hermite basis of the lattice of exponent vectors of the subgroup
    /// generated by `gens` (relations included, so the lattice has full rank).
    pub fn subgroup_lattice(&self, gens: &[u64]) -> Matrix {
        let mut rows: Matrix = gens
            .iter()
            .map(|&g| self.log(g).into_iter().map(BigInt::from).collect())
            .collect();
        rows.extend(self.relations());
        intmat::hermite(&rows, self.rank())
    }

    /// Lattice of the kernel of the homomorphism sending the `j`-th basis
    /// generator to `images[j]` in `⊕ Z/moduli[k]`.
    pub fn kernel_lattice(&self, images: &[Vec<u64>], moduli: &[u64]) -> Matrix {
        let r = self.rank();
        let s = moduli.len();
        let mut stacked: Matrix = images
            .iter()
            .map(|img| img.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        for (k, &d) in moduli.iter().enumerate() {
            stacked.push((0..s).map(|j| BigInt::from(if j == k { d } else { 0 })).collect());
        }
        let mut rows: Matrix = intmat::left_kernel(&stacked, s).into_iter().map(|v| v[..r].to_vec()).collect();
        rows.extend(self.relations());
        intmat::hermite(&rows, r)
    }

    /// Residues represented by the rows of a lattice basis, without 1,
    /// sorted and deduplicated.
    pub fn lattice_generators(&self, lattice: &Matrix) -> Vec<u64> {
        let one = self.one();
        let mut gens: Vec<u64> = lattice.iter().map(|row| self.exp_big(row)).filter(|&g| g != one && self.modulus > 1).collect();
        gens.sort_unstable();
        gens.dedup();
        gens
    }
}

/// Index of a full-rank lattice given by its Hermite basis.
fn lattice_index(hnf: &Matrix) -> u64 {
    hnf.iter()
        .enumerate()
        .map(|(i, row)| row[i].to_u64().expect("index fits in u64"))
        .product()
}

/// Order of the subgroup of `⊕ Z/moduli[k]` generated by `gens`.
pub fn span_order(gens: &[Vec<u64>], moduli: &[u64]) -> u64 {
    let s = moduli.len();
    let mut rows: Matrix = gens.iter().map(|g| g.iter().map(|&x| BigInt::from(x)).collect()).collect();
    for (k, &d) in moduli.iter().enumerate() {
        rows.push((0..s).map(|j| BigInt::from(if j == k { d } else { 0 })).collect());
    }
    let total: u64 = moduli.iter().product();
    total / lattice_index(&intmat::hermite(&rows, s))
}

/// Order of an element of `⊕ Z/moduli[k]`.
pub fn element_order(x: &[u64], moduli: &[u64]) -> u64 {
    x.iter().zip(moduli).fold(1, |acc, (&v, &d)| arith::lcm(acc, d / arith::gcd(v, d)))
}

/// The projection `(Z/NZ)^× → (Z/NZ)^×/H ≅ ⊕ Z/d_k` in Smith coordinates.
#[derive(Debug, Clone)]
pub struct QuotientMap {
    group: UnitGroup,
    invariants: Vec<u64>,
    proj: Vec<Vec<u64>>,
    lifts: Vec<u64>,
}

impl QuotientMap {
    pub fn new(group: UnitGroup, lattice: &Matrix) -> Self {
        let r = group.rank();
        let smith = intmat::smith(lattice, r);
        let orders = group.orders();
        let mut invariants = Vec::new();
        let mut proj = vec![Vec::new(); r];
        let mut lifts = Vec::new();
        for (k, d) in smith.diagonal.iter().enumerate() {
            let d = d.to_u64().expect("invariant fits in u64");
            if d == 1 {
                continue;
            }
            invariants.push(d);
            for (j, row) in proj.iter_mut().enumerate() {
                row.push(arith::bigint_mod(&smith.v[j][k], d));
            }
            let x: Vec<u64> = (0..r).map(|j| arith::bigint_mod(&smith.v_inv[k][j], orders[j])).collect();
            lifts.push(group.exp(&x));
        }
        QuotientMap { group, invariants, proj, lifts }
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    pub fn group(&self) -> &UnitGroup {
        &self.group
    }

    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    pub fn order(&self) -> u64 {
        self.invariants.iter().product()
    }

    /// Residue mod N mapping to the `k`-th standard generator of the quotient.
    pub fn lift(&self, k: usize) -> u64 {
        self.lifts[k]
    }

    /// Image of a unit residue (taken mod N) in the quotient.
    pub fn image(&self, x: u64) -> Vec<u64> {
        let l = self.group.log(x % self.group.modulus.max(1));
        self.invariants
            .iter()
            .enumerate()
            .map(|(k, &d)| {
                l.iter()
                    .zip(&self.proj)
                    .fold(0u64, |acc, (&lj, row)| (acc + arith::mul_mod(lj % d, row[k], d)) % d)
            })
            .collect()
    }

    pub fn is_trivial_image(&self, x: u64) -> bool {
        self.image(x).iter().all(|&v| v == 0)
    }
}

#[derive(Deserialize)]
struct RawField {
    modulus: u64,
    subgroup: Vec<u64>,
}

impl TryFrom<RawField> for AbelianFieldQ {
    type Error = Error;

    fn try_from(raw: RawField) -> Result<Self> {
        AbelianFieldQ::new(raw.modulus, &raw.subgroup)
    }
}

/// An abelian extension of Q, the fixed field of `H ≤ (Z/NZ)^×` inside Q(ζ_N).
///
/// Values built through the public constructors are canonical: the modulus
/// is the conductor and the generator list is derived from the Hermite basis
/// of the subgroup lattice, so structural equality is field equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawField")]
pub struct AbelianFieldQ {
    modulus: u64,
    subgroup: Vec<u64>,
    #[serde(skip)]
    cache: QuotientCache,
}

/// Lazily computed Galois group of a field. It is derived data, so it never
/// takes part in comparisons.
#[derive(Clone, Default)]
struct QuotientCache(Arc<OnceLock<QuotientMap>>);

impl PartialEq for QuotientCache {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for QuotientCache {}

impl std::hash::Hash for QuotientCache {
    fn hash<H: std::hash::Hasher>(&self, _: &mut H) {}
}

impl fmt::Debug for QuotientCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("..")
    }
}

impl AbelianFieldQ {
    /// The field cut out by the subgroup generated by `gens`, canonicalized.
    pub fn new(modulus: u64, gens: &[u64]) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::ZeroInput);
        }
        for &g in gens {
            if modulus > 1 && arith::gcd(g % modulus, modulus) != 1 {
                return Err(Error::BadFieldSpec {
                    spec: format!("{modulus}:{g}"),
                    reason: format!("generator {g} is not a unit mod {modulus}"),
                });
            }
        }
        let gens: Vec<u64> = gens.iter().map(|&g| if modulus == 1 { 1 } else { g % modulus }).collect();
        Ok(AbelianFieldQ { modulus, subgroup: gens, cache: QuotientCache::default() }.canonicalize())
    }

    pub fn rational() -> Self {
        AbelianFieldQ { modulus: 1, subgroup: Vec::new(), cache: QuotientCache::default() }
    }

    /// Q(√d) for a squarefree integer `d` (`d = 1` gives Q).
    pub fn quadratic(d: i64) -> Result<Self> {
        let spec = format!("quad:{d}");
        if d == 0 || !arith::is_squarefree(d.unsigned_abs()) {
            return Err(Error::BadFieldSpec { spec, reason: "D must be a nonzero squarefree integer".into() });
        }
        if d == 1 {
            return Ok(Self::rational());
        }
        let disc = if d.rem_euclid(4) == 1 { d } else { 4 * d };
        let n = disc.unsigned_abs();
        let group = UnitGroup::new(n);
        let images: Vec<Vec<u64>> = group
            .basis()
            .iter()
            .map(|&b| vec![u64::from(arith::kronecker(disc, b) != 1)])
            .collect();
        let lattice = group.kernel_lattice(&images, &[2]);
        Ok(Self::from_lattice(&group, &lattice).canonicalize())
    }

    /// The full cyclotomic field Q(ζ_n).
    pub fn cyclotomic(n: u64) -> Result<Self> {
        Self::new(n, &[])
    }

    /// The unique subfield of degree `d` of Q(ζ_n), when it is unique.
    pub fn cyclotomic_subfield(n: u64, d: u64) -> Result<Self> {
        let spec = format!("cyclosub:{n}:{d}");
        if n == 0 || d == 0 {
            return Err(Error::BadFieldSpec { spec, reason: "N and d must be positive".into() });
        }
        let group = UnitGroup::new(n);
        let r = group.rank();
        let mut rows: Matrix = (0..r)
            .map(|i| (0..r).map(|j| BigInt::from(if i == j { d } else { 0 })).collect())
            .collect();
        rows.extend(group.relations());
        let lattice = intmat::hermite(&rows, r);
        let index = lattice_index(&lattice);
        if index != d {
            return Err(Error::BadFieldSpec {
                spec,
                reason: format!("Q(ζ_{n}) has no unique subfield of degree {d}"),
            });
        }
        Ok(Self::from_lattice(&group, &lattice).canonicalize())
    }

    /// Parses `quad:D`, `cyclo:N`, `cyclosub:N:d`, `explicit:N:g1,g2,...` or `rational`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = |reason: &str| Error::BadFieldSpec { spec: spec.to_string(), reason: reason.to_string() };
        let parts: Vec<&str> = spec.trim().split(':').collect();
        let int = |s: &str| s.trim().parse::<u64>().map_err(|_| bad(&format!("`{s}` is not a positive integer")));
        match parts.as_slice() {
            ["rational"] | ["Q"] => Ok(Self::rational()),
            ["quad", d] => {
                let d: i64 = d.trim().parse().map_err(|_| bad("D must be an integer"))?;
                Self::quadratic(d)
            }
            ["cyclo", n] => Self::cyclotomic(int(n)?),
            ["cyclosub", n, d] => Self::cyclotomic_subfield(int(n)?, int(d)?),
            ["explicit", n] => Self::new(int(n)?, &[]),
            ["explicit", n, gens] => {
                let gens = gens
                    .split(',')
                    .filter(|g| !g.trim().is_empty())
                    .map(int)
                    .collect::<Result<Vec<u64>>>()?;
                Self::new(int(n)?, &gens)
            }
            _ => Err(bad("expected quad:D, cyclo:N, cyclosub:N:d, explicit:N:g1,g2,... or rational")),
        }
    }

    fn from_lattice(group: &UnitGroup, lattice: &Matrix) -> Self {
        AbelianFieldQ { modulus: group.modulus(), subgroup: group.lattice_generators(lattice), cache: QuotientCache::default() }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Alias of [`modulus`](Self::modulus) for canonical values.
    pub fn conductor(&self) -> u64 {
        self.modulus
    }

    pub fn subgroup(&self) -> &[u64] {
        &self.subgroup
    }

    pub fn unit_group(&self) -> UnitGroup {
        UnitGroup::new(self.modulus)
    }

    pub fn lattice(&self) -> (UnitGroup, Matrix) {
        let group = self.unit_group();
        let lattice = group.subgroup_lattice(&self.subgroup);
        (group, lattice)
    }

    /// The Galois group `(Z/NZ)^×/H` in Smith coordinates.
    pub fn quotient(&self) -> &QuotientMap {
        self.cache.0.get_or_init(|| {
            let (group, lattice) = self.lattice();
            QuotientMap::new(group, &lattice)
        })
    }

    pub fn degree(&self) -> u64 {
        self.quotient().order()
    }

    pub fn is_rational(&self) -> bool {
        self.modulus == 1
    }

    pub fn is_cyclic(&self) -> bool {
        self.quotient().invariants().len() <= 1
    }

    /// The same field with the smallest possible modulus.
    pub fn canonicalize(&self) -> Self {
        let mut n = self.modulus;
        let mut gens = self.subgroup.clone();
        loop {
            let group = UnitGroup::new(n);
            let lattice = group.subgroup_lattice(&gens);
            let quotient = QuotientMap::new(group.clone(), &lattice);
            let droppable = group.prime_factors().iter().find(|&&(q, a)| {
                if q == 2 && a == 1 {
                    return true;
                }
                let block = q.pow(a);
                let local = if a == 1 { arith::primitive_root(q, 1) } else { 1 + q.pow(a - 1) };
                let kernel_gen = arith::crt(&[(local, block), (1, n / block)]);
                quotient.is_trivial_image(kernel_gen)
            });
            match droppable {
                Some(&(q, _)) => {
                    n /= q;
                    gens = gens.iter().map(|&g| if n == 1 { 1 } else { g % n }).collect();
                }
                None => return Self::from_lattice(&group, &lattice),
            }
        }
    }

    fn preimage_lattice(&self, group: &UnitGroup) -> Matrix {
        let q = self.quotient();
        let images: Vec<Vec<u64>> = group.basis().iter().map(|&b| q.image(b)).collect();
        group.kernel_lattice(&images, q.invariants())
    }

    pub fn compositum(&self, other: &Self) -> Self {
        let group = UnitGroup::new(arith::lcm(self.modulus, other.modulus));
        let (q1, q2) = (self.quotient(), other.quotient());
        let images: Vec<Vec<u64>> = group
            .basis()
            .iter()
            .map(|&b| {
                let mut v = q1.image(b);
                v.extend(q2.image(b));
                v
            })
            .collect();
        let moduli: Vec<u64> = q1.invariants().iter().chain(q2.invariants()).copied().collect();
        let lattice = group.kernel_lattice(&images, &moduli);
        Self::from_lattice(&group, &lattice).canonicalize()
    }

    pub fn compositum_all(fields: &[Self]) -> Self {
        fields.iter().fold(Self::rational(), |acc, f| acc.compositum(f))
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let group = UnitGroup::new(arith::lcm(self.modulus, other.modulus));
        let mut rows = self.preimage_lattice(&group);
        rows.extend(other.preimage_lattice(&group));
        let lattice = intmat::hermite(&rows, group.rank());
        Self::from_lattice(&group, &lattice).canonicalize()
    }

    pub fn is_subfield_of(&self, other: &Self) -> bool {
        let group = UnitGroup::new(arith::lcm(self.modulus, other.modulus));
        let mine = self.quotient();
        other
            .preimage_lattice(&group)
            .iter()
            .all(|row| mine.is_trivial_image(group.exp_big(row)))
    }

    /// The unique subfield of degree `d` of a cyclic field.
    pub fn subfield_of_degree(&self, d: u64) -> Result<Self> {
        let q = self.quotient();
        if q.invariants().len() > 1 {
            return Err(Error::NonCyclic);
        }
        let degree = q.order();
        if d == 0 || degree % d != 0 {
            return Err(Error::BadDegree { requested: d, degree });
        }
        if d == degree {
            return Ok(self.clone());
        }
        if d == 1 {
            return Ok(Self::rational());
        }
        let group = q.group().clone();
        let images: Vec<Vec<u64>> = group.basis().iter().map(|&b| vec![q.image(b)[0] % d]).collect();
        let lattice = group.kernel_lattice(&images, &[d]);
        Ok(Self::from_lattice(&group, &lattice).canonicalize())
    }

    /// The fixed field of the kernel of the character
    /// `x ↦ Σ_k coeffs[k] x_k (d / d_k) mod d` on the Galois group in Smith
    /// coordinates. Every invariant `d_k` must divide `d`.
    pub fn character_kernel_field(&self, coeffs: &[u64], d: u64) -> Result<Self> {
        let q = self.quotient();
        if coeffs.len() != q.invariants().len() || q.invariants().iter().any(|&dk| d % dk != 0) {
            return Err(Error::BadDegree { requested: d, degree: q.order() });
        }
        let group = q.group().clone();
        let images: Vec<Vec<u64>> = group
            .basis()
            .iter()
            .map(|&b| {
                let x = q.image(b);
                let v = x
                    .iter()
                    .zip(coeffs)
                    .zip(q.invariants())
                    .fold(0u64, |acc, ((&xk, &ck), &dk)| (acc + xk * ck % d * (d / dk)) % d);
                vec![v]
            })
            .collect();
        let lattice = group.kernel_lattice(&images, &[d]);
        Ok(Self::from_lattice(&group, &lattice).canonicalize())
    }

    /// The largest subfield of `p`-power degree of a cyclic field.
    pub fn p_part(&self, p: u64) -> Result<Self> {
        let degree = self.degree();
        self.subfield_of_degree(p.pow(arith::valuation(degree, p)))
    }

    pub fn decomposition_group(&self, place: Place) -> GaloisSubgroup {
        decomposition_group(self.modulus, place)
    }

    pub fn inertia_group(&self, place: Place) -> GaloisSubgroup {
        inertia_group(self.modulus, place)
    }

    /// Local degree `[F_w : Q_v]` at any place above `v`.
    pub fn local_degree(&self, place: Place) -> u64 {
        let q = self.quotient();
        let d = self.decomposition_group(place);
        let images: Vec<Vec<u64>> = d.generators().iter().map(|&g| q.image(g)).collect();
        span_order(&images, q.invariants())
    }

    /// The subgroup `H` itself as a Galois subgroup of `(Z/NZ)^×`.
    pub fn fixing_group(&self) -> GaloisSubgroup {
        GaloisSubgroup::new(self.modulus, self.subgroup.clone())
    }
}

impl fmt::Display for AbelianFieldQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.subgroup.iter().map(u64::to_string).collect();
        write!(f, "explicit:{}:{}", self.modulus, gens.join(","))
    }
}

impl FromStr for AbelianFieldQ {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// A subgroup of `(Z/NZ)^×` given by generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisSubgroup {
    modulus: u64,
    generators: Vec<u64>,
}

impl GaloisSubgroup {
    pub fn new(modulus: u64, mut generators: Vec<u64>) -> Self {
        let one = 1 % modulus.max(2);
        generators.retain(|&g| modulus > 1 && g % modulus != one);
        generators.iter_mut().for_each(|g| *g %= modulus);
        generators.sort_unstable();
        generators.dedup();
        GaloisSubgroup { modulus, generators }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    pub fn order(&self) -> u64 {
        let group = UnitGroup::new(self.modulus);
        group.order() / lattice_index(&group.subgroup_lattice(&self.generators))
    }

    pub fn contains(&self, x: u64) -> bool {
        let group = UnitGroup::new(self.modulus);
        let q = QuotientMap::new(group.clone(), &group.subgroup_lattice(&self.generators));
        q.is_trivial_image(x)
    }

    /// All elements, by closure under the generators.
    pub fn elements(&self) -> Vec<u64> {
        let m = self.modulus;
        let mut seen = vec![1 % m.max(2)];
        let mut idx = 0;
        let mut set: std::collections::HashSet<u64> = seen.iter().copied().collect();
        while idx < seen.len() {
            let x = seen[idx];
            for &g in &self.generators {
                let y = arith::mul_mod(x, g, m);
                if set.insert(y) {
                    seen.push(y);
                }
            }
            idx += 1;
        }
        seen.sort_unstable();
        seen
    }
}

/// Decomposition group at `v` inside `(Z/NZ)^×`.
pub fn decomposition_group(modulus: u64, place: Place) -> GaloisSubgroup {
    match place {
        Place::Infinity => GaloisSubgroup::new(modulus, if modulus > 2 { vec![modulus - 1] } else { vec![] }),
        Place::Prime(p) => {
            let a = arith::valuation(modulus, p);
            if a == 0 {
                return GaloisSubgroup::new(modulus, vec![p % modulus.max(1)]);
            }
            let block = p.pow(a);
            let rest = modulus / block;
            let mut gens = UnitGroup::new(modulus).block_generators(p);
            gens.push(arith::crt(&[(p % rest.max(1), rest), (1, block)]));
            GaloisSubgroup::new(modulus, gens)
        }
    }
}

/// Inertia group at `v` inside `(Z/NZ)^×` (trivial at unramified places).
pub fn inertia_group(modulus: u64, place: Place) -> GaloisSubgroup {
    match place {
        Place::Infinity => decomposition_group(modulus, place),
        Place::Prime(p) => GaloisSubgroup::new(modulus, UnitGroup::new(modulus).block_generators(p)),
    }
}

/// The local Artin symbol `(c, Q(ζ_N)_v / Q_v)` as a residue mod N.
///
/// At a prime `p` with `N = p^a m` and `c = p^val u`, the symbol is the
/// residue congruent to `p^val` mod `m` and to `u^{-1}` mod `p^a`. At the
/// real place it is `-1` for negative `c`.
pub fn local_artin_symbol(modulus: u64, place: Place, c: &BigRational) -> Result<u64> {
    if c.is_zero() {
        return Err(Error::ZeroInput);
    }
    if modulus <= 1 {
        return Ok(1);
    }
    match place {
        Place::Infinity => Ok(if c.is_negative() { modulus - 1 } else { 1 }),
        Place::Prime(p) => {
            let a = arith::valuation(modulus, p);
            let block = p.pow(a);
            let rest = modulus / block;
            let bp = BigInt::from(p);
            let mut num = c.numer().clone();
            let mut den = c.denom().clone();
            let mut val: i64 = 0;
            while num.is_multiple_of(&bp) {
                num /= &bp;
                val += 1;
            }
            while den.is_multiple_of(&bp) {
                den /= &bp;
                val -= 1;
            }
            let part_rest = if rest == 1 {
                0
            } else {
                let base = if val >= 0 {
                    p % rest
                } else {
                    arith::inv_mod(p % rest, rest).expect("p is prime to the rest of N")
                };
                arith::pow_mod(base, val.unsigned_abs(), rest)
            };
            let part_block = if block == 1 {
                0
            } else {
                let un = arith::bigint_mod(&num, block);
                let ud = arith::bigint_mod(&den, block);
                arith::mul_mod(ud, arith::inv_mod(un, block).expect("u is a p-unit"), block)
            };
            Ok(arith::crt(&[(part_rest, rest), (part_block, block)]))
        }
    }
}

/// All unit residues mod N, ascending.
pub fn frobenius_classes(modulus: u64) -> Vec<u64> {
    if modulus <= 2 {
        return vec![1];
    }
    (1..modulus).filter(|&x| arith::gcd(x, modulus) == 1).collect()
}

/// `Gal(M/Q)` for the compositum `M` of a list of abelian fields, embedded
/// in the product of the individual Galois groups.
///
/// Elements are tuples of Smith coordinates, one block per field. Each
/// element carries a representative unit residue modulo the lcm of the
/// conductors, so it is the Frobenius of infinitely many primes.
#[derive(Debug, Clone)]
pub struct GaloisAmbient {
    modulus: u64,
    maps: Vec<QuotientMap>,
    offsets: Vec<usize>,
    moduli: Vec<u64>,
    elements: Vec<Vec<u64>>,
    reps: Vec<u64>,
    index: HashMap<Vec<u64>, usize>,
    limit: u64,
    residues: ResidueCache,
}

/// Memo of `residue ↦ element index`, filled on demand.
#[derive(Default)]
struct ResidueCache(Mutex<HashMap<u64, usize>>);

impl Clone for ResidueCache {
    fn clone(&self) -> Self {
        ResidueCache(Mutex::new(self.0.lock().expect("cache lock").clone()))
    }
}

impl fmt::Debug for ResidueCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("..")
    }
}

impl GaloisAmbient {
    pub fn new(fields: &[AbelianFieldQ], limit: u64) -> Result<Self> {
        let mut modulus = 1u64;
        for f in fields {
            let g = arith::gcd(modulus, f.modulus());
            modulus = (modulus / g)
                .checked_mul(f.modulus())
                .ok_or_else(|| Error::Unsupported("lcm of conductors exceeds 64 bits".into()))?;
        }
        let maps: Vec<QuotientMap> = fields.iter().map(|f| f.quotient().clone()).collect();
        let mut offsets = Vec::with_capacity(maps.len() + 1);
        let mut moduli = Vec::new();
        for m in &maps {
            offsets.push(moduli.len());
            moduli.extend_from_slice(m.invariants());
        }
        offsets.push(moduli.len());
        let mut ambient = GaloisAmbient {
            modulus,
            maps,
            offsets,
            moduli,
            elements: Vec::new(),
            reps: Vec::new(),
            index: HashMap::new(),
            limit,
            residues: ResidueCache::default(),
        };
        let group = UnitGroup::new(modulus);
        let gens: Vec<(u64, Vec<u64>)> = group.basis().into_iter().map(|b| (b, ambient.image(b))).collect();
        let images: Vec<Vec<u64>> = gens.iter().map(|(_, v)| v.clone()).collect();
        let size = span_order(&images, &ambient.moduli);
        if size > limit {
            return Err(Error::GaloisTooLarge { size, limit });
        }
        let zero = vec![0u64; ambient.moduli.len()];
        ambient.index.insert(zero.clone(), 0);
        ambient.elements.push(zero);
        ambient.reps.push(1 % modulus.max(2));
        let mut head = 0;
        while head < ambient.elements.len() {
            for (res, img) in &gens {
                let next = ambient.add(&ambient.elements[head], img);
                if !ambient.index.contains_key(&next) {
                    let rep = arith::mul_mod(ambient.reps[head], *res, modulus.max(2));
                    ambient.index.insert(next.clone(), ambient.elements.len());
                    ambient.elements.push(next);
                    ambient.reps.push(rep);
                }
            }
            head += 1;
        }
        debug_assert_eq!(ambient.elements.len() as u64, size);
        Ok(ambient)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    /// The bound on `|(Z/NZ)^×|` and on the group size this ambient was built with.
    pub fn modulus_limit(&self) -> u64 {
        self.limit
    }

    pub fn field_count(&self) -> usize {
        self.maps.len()
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn element(&self, idx: usize) -> &[u64] {
        &self.elements[idx]
    }

    pub fn representative(&self, idx: usize) -> u64 {
        self.reps[idx]
    }

    pub fn field_invariants(&self, field: usize) -> &[u64] {
        &self.moduli[self.offsets[field]..self.offsets[field + 1]]
    }

    pub fn field_coords<'a>(&self, elt: &'a [u64], field: usize) -> &'a [u64] {
        &elt[self.offsets[field]..self.offsets[field + 1]]
    }

    /// Order of the restriction of `elt` to the given field.
    pub fn field_order(&self, elt: &[u64], field: usize) -> u64 {
        element_order(self.field_coords(elt, field), self.field_invariants(field))
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).zip(&self.moduli).map(|((&x, &y), &d)| (x + y) % d).collect()
    }

    pub fn scale(&self, a: &[u64], k: u64) -> Vec<u64> {
        a.iter().zip(&self.moduli).map(|(&x, &d)| arith::mul_mod(x, k % d, d)).collect()
    }

    /// Image of a unit residue (mod the ambient modulus).
    pub fn image(&self, residue: u64) -> Vec<u64> {
        self.maps.iter().flat_map(|m| m.image(residue % m.modulus().max(1))).collect()
    }

    pub fn element_of(&self, residue: u64) -> usize {
        let residue = residue % self.modulus.max(1);
        if let Some(&k) = self.residues.0.lock().expect("cache lock").get(&residue) {
            return k;
        }
        let k = self.index[&self.image(residue)];
        self.residues.0.lock().expect("cache lock").insert(residue, k);
        k
    }

    /// Element indices of the subgroup generated by the given elements.
    pub fn closure(&self, gens: &[Vec<u64>]) -> Vec<usize> {
        let mut out = vec![0usize];
        let mut seen = vec![false; self.size()];
        seen[0] = true;
        let mut head = 0;
        while head < out.len() {
            for g in gens {
                let next = self.index[&self.add(&self.elements[out[head]], g)];
                if !seen[next] {
                    seen[next] = true;
                    out.push(next);
                }
            }
            head += 1;
        }
        out
    }

    /// Decomposition group at `v`, as element indices.
    pub fn decomposition(&self, place: Place) -> Vec<usize> {
        let d = decomposition_group(self.modulus, place);
        let gens: Vec<Vec<u64>> = d.generators().iter().map(|&g| self.image(g)).collect();
        self.closure(&gens)
    }

    /// Image of the local Artin symbol of `c` at `v`.
    pub fn artin(&self, place: Place, c: &BigRational) -> Result<Vec<u64>> {
        Ok(self.image(local_artin_symbol(self.modulus, place, c)?))
    }

    /// Whether `x` lies in the subgroup generated by `gens`.
    pub fn in_span(&self, gens: &[Vec<u64>], x: &[u64]) -> bool {
        let base = span_order(gens, &self.moduli);
        let mut with = gens.to_vec();
        with.push(x.to_vec());
        span_order(&with, &self.moduli) == base
    }
}
