//! Place classes and local-degree exponents for a prime-power context.
//!
//! A context fixes a cyclic pivot `K` of degree `p^e` and factors
//! `K_1, ..., K_m`. For each place `v` of Q and each factor, the exponent
//! `e_{i,v}` is `log_p` of the degree of the fields into which `K ⊗ K_i`
//! splits above `v`. Unramified places only depend on their Frobenius
//! residue mod N, so the infinitely many places collapse to `∞`, the primes
//! dividing N, and one class per unit residue.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::abelian_q::{self, AbelianFieldQ, GaloisAmbient, GaloisSubgroup, Place};
use crate::arith;
use crate::error::{Error, Result};

/// Default bound on `|(Z/NZ)^×|`.
pub const DEFAULT_MODULUS_LIMIT: u64 = 1_000_000;

/// Pivot `K` (cyclic of degree `p^e`) together with the factors `K_i`.
#[derive(Debug, Clone)]
pub struct Context {
    p: u64,
    e: u32,
    pivot: AbelianFieldQ,
    factors: Vec<AbelianFieldQ>,
    exps: Vec<u32>,
    ambient: Arc<GaloisAmbient>,
    pivot_slot: usize,
    factor_slots: Vec<usize>,
}

/// A class of places of Q with identical local behaviour in the context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlaceClass {
    /// `∞` or a prime dividing the ambient modulus.
    Exceptional(Place),
    /// All primes `q ∤ N` with `q ≡ t mod N`.
    Frob(u64),
}

impl PlaceClass {
    /// Decomposition group of the class inside `(Z/NZ)^×`.
    pub fn decomposition(&self, modulus: u64) -> GaloisSubgroup {
        match *self {
            PlaceClass::Exceptional(v) => abelian_q::decomposition_group(modulus, v),
            PlaceClass::Frob(t) => GaloisSubgroup::new(modulus, vec![t]),
        }
    }
}

impl fmt::Display for PlaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceClass::Exceptional(v) => write!(f, "{v}"),
            PlaceClass::Frob(t) => write!(f, "frob({t})"),
        }
    }
}

fn pivot_shape(pivot: &AbelianFieldQ) -> Result<(u64, u32)> {
    if !pivot.is_cyclic() {
        return Err(Error::NonCyclic);
    }
    let degree = pivot.degree();
    let (p, e) = match arith::factor(degree).as_slice() {
        &[(p, e)] => (p, e),
        _ => {
            return Err(Error::Unsupported(format!(
                "pivot must have prime power degree greater than 1, got {degree}"
            )))
        }
    };
    Ok((p, e))
}

impl Context {
    /// Builds the context together with its own Galois ambient.
    pub fn new(pivot: AbelianFieldQ, factors: Vec<AbelianFieldQ>, modulus_limit: u64) -> Result<Self> {
        let mut fields = vec![pivot.clone()];
        fields.extend(factors.iter().cloned());
        let ambient = Arc::new(GaloisAmbient::new(&fields, modulus_limit)?);
        let slots = (1..=factors.len()).collect();
        Self::with_ambient(pivot, factors, ambient, 0, slots)
    }

    /// Builds the context over a shared ambient in which the pivot and the
    /// factors occupy the given field slots.
    pub fn with_ambient(
        pivot: AbelianFieldQ,
        factors: Vec<AbelianFieldQ>,
        ambient: Arc<GaloisAmbient>,
        pivot_slot: usize,
        factor_slots: Vec<usize>,
    ) -> Result<Self> {
        let (p, e) = pivot_shape(&pivot)?;
        assert_eq!(factors.len(), factor_slots.len(), "one slot per factor");
        let mut ctx = Context { p, e, pivot, factors, exps: Vec::new(), ambient, pivot_slot, factor_slots };
        ctx.exps = (0..ctx.factors.len())
            .map(|i| {
                let slot = ctx.factor_slots[i];
                let min_val = (0..ctx.ambient.size())
                    .map(|k| ctx.ambient.element(k))
                    .filter(|s| ctx.ambient.field_coords(s, slot).iter().all(|&x| x == 0))
                    .map(|s| ctx.val(ctx.pivot_coord(s)))
                    .min()
                    .unwrap_or(e);
                e - min_val
            })
            .collect();
        Ok(ctx)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn pivot(&self) -> &AbelianFieldQ {
        &self.pivot
    }

    pub fn factors(&self) -> &[AbelianFieldQ] {
        &self.factors
    }

    /// Global exponents `e_i`, in the original factor order.
    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn modulus(&self) -> u64 {
        self.ambient.modulus()
    }

    pub fn ambient(&self) -> &GaloisAmbient {
        &self.ambient
    }

    fn pivot_coord(&self, s: &[u64]) -> u64 {
        self.ambient.field_coords(s, self.pivot_slot)[0]
    }

    /// `v_p` of a residue mod `p^e`, with `v_p(0) = e`.
    fn val(&self, x: u64) -> u32 {
        let x = x % self.p.pow(self.e);
        if x == 0 {
            self.e
        } else {
            arith::valuation(x, self.p)
        }
    }

    /// Exponents and pivot exponent for a cyclic decomposition group generated
    /// by the ambient element `s`.
    fn cyclic_exponents(&self, s: &[u64]) -> (Vec<u32>, u32) {
        let x = self.pivot_coord(s);
        let q = self.p.pow(self.e);
        let exps = self
            .factor_slots
            .iter()
            .map(|&slot| {
                let o = self.ambient.field_order(s, slot);
                self.e - self.val(arith::mul_mod(o % q, x, q))
            })
            .collect();
        (exps, self.e - self.val(x))
    }

    /// Exponents and pivot exponent for a decomposition group given by its
    /// ambient element indices.
    fn group_exponents(&self, elements: &[usize]) -> (Vec<u32>, u32) {
        let elts: Vec<&[u64]> = elements.iter().map(|&k| self.ambient.element(k)).collect();
        let pivot_min = elts.iter().map(|s| self.val(self.pivot_coord(s))).min().unwrap_or(self.e);
        let exps = self
            .factor_slots
            .iter()
            .map(|&slot| {
                let m = elts
                    .iter()
                    .filter(|s| self.ambient.field_coords(s, slot).iter().all(|&x| x == 0))
                    .map(|s| self.val(self.pivot_coord(s)))
                    .min()
                    .unwrap_or(self.e);
                self.e - m
            })
            .collect();
        (exps, self.e - pivot_min)
    }

    /// Exponent vector `(e_{1,v}, ..., e_{m,v})` and the pivot's local degree
    /// exponent for a class.
    pub fn class_exponents(&self, cls: &PlaceClass) -> (Vec<u32>, u32) {
        match *cls {
            PlaceClass::Exceptional(v) => self.group_exponents(&self.ambient.decomposition(v)),
            PlaceClass::Frob(t) => self.cyclic_exponents(&self.ambient.image(t)),
        }
    }

    /// Exponent vector for the place `v` itself.
    pub fn place_exponents(&self, v: Place) -> (Vec<u32>, u32) {
        self.class_exponents(&self.class_of(v))
    }

    /// The class containing a place.
    pub fn class_of(&self, v: Place) -> PlaceClass {
        class_of(self.modulus(), v)
    }

    /// `e_{i,v}` for one factor.
    pub fn local_degree_exponent(&self, i: usize, cls: &PlaceClass) -> u32 {
        self.class_exponents(cls).0[i]
    }

    pub fn pivot_local_exponent(&self, cls: &PlaceClass) -> u32 {
        self.class_exponents(cls).1
    }

    /// The places dividing `N∞`, which get classes of their own.
    fn exceptional_classes(&self) -> Vec<PlaceClass> {
        let mut out = vec![PlaceClass::Exceptional(Place::Infinity)];
        out.extend(arith::factor(self.modulus()).into_iter().map(|(q, _)| PlaceClass::Exceptional(Place::Prime(q))));
        out
    }

    /// Distinct exponent vectors over all places, sorted. Unramified places
    /// are covered through the Galois group, one element at a time.
    pub fn distinct_vectors(&self) -> Vec<Vec<u32>> {
        let mut set: BTreeSet<Vec<u32>> =
            self.exceptional_classes().iter().map(|c| self.class_exponents(c).0).collect();
        for k in 0..self.ambient.size() {
            set.insert(self.cyclic_exponents(self.ambient.element(k)).0);
        }
        set.into_iter().collect()
    }

    /// One exceptional class per place dividing `N∞`, then one class per unit
    /// residue mod N.
    pub fn build_profile(&self) -> Result<SplittingProfile> {
        let n = self.modulus();
        let units = arith::euler_phi(n);
        if units > self.ambient.modulus_limit() {
            return Err(Error::ModulusTooLarge { size: units, limit: self.ambient.modulus_limit() });
        }
        let mut classes = Vec::new();
        for class in self.exceptional_classes() {
            let (exponents, pivot_exp) = self.class_exponents(&class);
            classes.push(ClassEntry { class, exponents, pivot_exp });
        }
        let mut cache: HashMap<usize, (Vec<u32>, u32)> = HashMap::new();
        for t in abelian_q::frobenius_classes(n) {
            let k = self.ambient.element_of(t);
            let (exponents, pivot_exp) = cache
                .entry(k)
                .or_insert_with(|| self.cyclic_exponents(self.ambient.element(k)))
                .clone();
            classes.push(ClassEntry { class: PlaceClass::Frob(t), exponents, pivot_exp });
        }
        SplittingProfile::from_parts(self.p, self.e, self.exps.clone(), classes, Some(n))
    }
}

/// The class of a place for the modulus N.
pub fn class_of(modulus: u64, v: Place) -> PlaceClass {
    match v {
        Place::Prime(q) if modulus % q != 0 => PlaceClass::Frob(if modulus == 1 { 1 } else { q % modulus }),
        _ => PlaceClass::Exceptional(v),
    }
}

/// A class with its exponent data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassEntry {
    pub class: PlaceClass,
    pub exponents: Vec<u32>,
    pub pivot_exp: u32,
}

/// The exponent data of a context on every place class.
///
/// Factors are kept in their original order. `factor_order` lists them by
/// descending global exponent, which is the order the combinatorial
/// definitions assume.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplittingProfile {
    p: u64,
    e: u32,
    exps: Vec<u32>,
    classes: Vec<ClassEntry>,
    modulus: Option<u64>,
    frob_index: HashMap<u64, usize>,
}

impl SplittingProfile {
    /// Assembles and validates a profile.
    pub fn from_parts(p: u64, e: u32, exps: Vec<u32>, classes: Vec<ClassEntry>, modulus: Option<u64>) -> Result<Self> {
        let bad = |msg: String| Err(Error::MalformedProfile(msg));
        if !arith::is_prime(p) {
            return bad(format!("p = {p} is not prime"));
        }
        if e == 0 {
            return bad("e must be at least 1".into());
        }
        for (i, &ei) in exps.iter().enumerate() {
            if ei > e {
                return bad(format!("exps[{i}] = {ei} exceeds e = {e}"));
            }
        }
        let mut infinities = 0;
        let mut primes = BTreeSet::new();
        let mut frob_index = HashMap::new();
        for (k, entry) in classes.iter().enumerate() {
            let at = format!("classes[{k}] ({})", entry.class);
            if entry.exponents.len() != exps.len() {
                return bad(format!("{at}: {} exponents for {} factors", entry.exponents.len(), exps.len()));
            }
            if entry.pivot_exp > e {
                return bad(format!("{at}: pivot_exp {} exceeds e = {e}", entry.pivot_exp));
            }
            for (i, (&eiv, &ei)) in entry.exponents.iter().zip(&exps).enumerate() {
                if eiv > ei {
                    return bad(format!("{at}: exponent {eiv} of factor {i} exceeds its global exponent {ei}"));
                }
                if eiv > entry.pivot_exp {
                    return bad(format!("{at}: exponent {eiv} of factor {i} exceeds pivot_exp {}", entry.pivot_exp));
                }
            }
            match entry.class {
                PlaceClass::Exceptional(Place::Infinity) => infinities += 1,
                PlaceClass::Exceptional(Place::Prime(q)) => {
                    if !arith::is_prime(q) {
                        return bad(format!("{at}: {q} is not prime"));
                    }
                    if !primes.insert(q) {
                        return bad(format!("{at}: prime {q} listed twice"));
                    }
                }
                PlaceClass::Frob(t) => {
                    if frob_index.insert(t, k).is_some() {
                        return bad(format!("{at}: residue {t} listed twice"));
                    }
                }
            }
        }
        if infinities != 1 {
            return bad(format!("expected exactly one infty class, found {infinities}"));
        }
        if let Some(n) = modulus {
            if n == 0 {
                return bad("modulus must be positive".into());
            }
            let expected: BTreeSet<u64> = arith::factor(n).into_iter().map(|(q, _)| q).collect();
            if primes != expected {
                return bad(format!("prime classes {primes:?} do not match the primes dividing {n}"));
            }
            for &t in frob_index.keys() {
                if n > 1 && (t >= n || arith::gcd(t, n) != 1) {
                    return bad(format!("frob residue {t} is not a reduced unit mod {n}"));
                }
            }
            let units = if n <= 2 { 1 } else { arith::euler_phi(n) };
            if frob_index.len() as u64 != units {
                return bad(format!("{} frob classes but (Z/{n}Z)^× has {units} elements", frob_index.len()));
            }
        }
        Ok(SplittingProfile { p, e, exps, classes, modulus, frob_index })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn e_max(&self) -> u32 {
        self.exps.iter().copied().max().unwrap_or(0)
    }

    pub fn classes(&self) -> &[ClassEntry] {
        &self.classes
    }

    pub fn modulus(&self) -> Option<u64> {
        self.modulus
    }

    pub fn factor_count(&self) -> usize {
        self.exps.len()
    }

    /// Factor indices sorted by descending global exponent (stable).
    pub fn factor_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.exps.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(self.exps[i]));
        order
    }

    /// Entry for a class, if present.
    pub fn entry(&self, cls: &PlaceClass) -> Option<&ClassEntry> {
        match cls {
            PlaceClass::Frob(t) => self.frob_index.get(t).map(|&k| &self.classes[k]),
            _ => self.classes.iter().find(|c| c.class == *cls),
        }
    }

    /// Entry for the class of a place (requires a known modulus).
    pub fn entry_for_place(&self, v: Place) -> Option<&ClassEntry> {
        self.entry(&class_of(self.modulus?, v))
    }

    /// Whether the class lies in `Σ_i^d`, i.e. `e_{i,v} ≤ d`.
    pub fn sigma_membership(&self, i: usize, d: u32, cls: &PlaceClass) -> Option<bool> {
        self.entry(cls).map(|c| c.exponents[i] <= d)
    }

    /// Distinct exponent vectors over all classes, sorted.
    pub fn distinct_vectors(&self) -> Vec<Vec<u32>> {
        let set: BTreeSet<Vec<u32>> = self.classes.iter().map(|c| c.exponents.clone()).collect();
        set.into_iter().collect()
    }

    /// Replaces the exponents of one class (used to build corrupted profiles
    /// in tests). The result is re-validated.
    pub fn with_class_exponents(&self, cls: &PlaceClass, exponents: Vec<u32>, pivot_exp: u32) -> Result<Self> {
        let mut classes = self.classes.clone();
        let entry = classes
            .iter_mut()
            .find(|c| c.class == *cls)
            .ok_or_else(|| Error::MalformedProfile(format!("no class {cls}")))?;
        entry.exponents = exponents;
        entry.pivot_exp = pivot_exp;
        Self::from_parts(self.p, self.e, self.exps.clone(), classes, self.modulus)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("profile serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        serde_json::from_value(value.clone()).map_err(|e| Error::MalformedProfile(e.to_string()))
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MalformedProfile(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClass {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<u64>,
    exponents: Vec<u32>,
    pivot_exp: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    p: u64,
    e: u32,
    exps: Vec<u32>,
    classes: Vec<RawClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    factor_order: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modulus: Option<u64>,
}

impl Serialize for SplittingProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let classes = self
            .classes
            .iter()
            .map(|c| {
                let (kind, value) = match c.class {
                    PlaceClass::Exceptional(Place::Infinity) => ("infty", None),
                    PlaceClass::Exceptional(Place::Prime(q)) => ("prime", Some(q)),
                    PlaceClass::Frob(t) => ("frob", Some(t)),
                };
                RawClass { kind: kind.into(), value, exponents: c.exponents.clone(), pivot_exp: c.pivot_exp }
            })
            .collect();
        let order = self.factor_order();
        let identity = order.iter().enumerate().all(|(k, &i)| k == i);
        RawProfile {
            p: self.p,
            e: self.e,
            exps: self.exps.clone(),
            classes,
            factor_order: (!identity).then_some(order),
            modulus: self.modulus,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SplittingProfile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawProfile::deserialize(d)?;
        let mut classes = Vec::with_capacity(raw.classes.len());
        for (k, c) in raw.classes.into_iter().enumerate() {
            let class = match (c.kind.as_str(), c.value) {
                ("infty", None) => PlaceClass::Exceptional(Place::Infinity),
                ("prime", Some(q)) => PlaceClass::Exceptional(Place::Prime(q)),
                ("frob", Some(t)) => PlaceClass::Frob(t),
                (kind, value) => {
                    return Err(D::Error::custom(format!(
                        "classes[{k}]: kind `{kind}` with value {value:?} is not valid"
                    )))
                }
            };
            classes.push(ClassEntry { class, exponents: c.exponents, pivot_exp: c.pivot_exp });
        }
        let profile = SplittingProfile::from_parts(raw.p, raw.e, raw.exps, classes, raw.modulus)
            .map_err(|e| D::Error::custom(e.to_string()))?;
        if let Some(order) = raw.factor_order {
            if order != profile.factor_order() {
                return Err(D::Error::custom("factor_order does not match exps"));
            }
        }
        Ok(profile)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(d: i64) -> AbelianFieldQ {
        AbelianFieldQ::quadratic(d).unwrap()
    }

    fn example_ctx() -> Context {
        Context::new(quad(13), vec![quad(17), quad(221)], DEFAULT_MODULUS_LIMIT).unwrap()
    }

    #[test]
    fn local_exponents_of_biquadratic_context() {
        let ctx = Context::new(quad(13), vec![quad(17)], DEFAULT_MODULUS_LIMIT).unwrap();
        assert_eq!(ctx.exps(), &[1]);
        assert_eq!(ctx.place_exponents(Place::Prime(2)).0, vec![1]);
        assert_eq!(ctx.place_exponents(Place::Prime(5)).0, vec![0]);
        // 3 splits in √13, so the pivot is locally trivial there
        assert_eq!(ctx.place_exponents(Place::Prime(3)), (vec![0], 0));
    }

    #[test]
    fn example_profile_always_has_a_split_factor() {
        let profile = example_ctx().build_profile().unwrap();
        assert_eq!(profile.classes().len(), 192 + 2 + 1);
        for c in profile.classes() {
            assert!(c.exponents.contains(&0), "class {}", c.class);
        }
        let two = profile.entry_for_place(Place::Prime(2)).unwrap();
        assert_eq!(profile.sigma_membership(0, 0, &two.class), Some(false));
        assert_eq!(profile.sigma_membership(0, 1, &two.class), Some(true));
    }

    #[test]
    fn single_factor_equal_to_pivot_or_rational() {
        // K ⊗ K splits completely over K
        let ctx = Context::new(quad(5), vec![quad(5)], DEFAULT_MODULUS_LIMIT).unwrap();
        assert_eq!(ctx.exps(), &[0]);
        assert!(ctx.build_profile().unwrap().classes().iter().all(|c| c.exponents == vec![0]));
        // K ⊗ Q = K, so Σ_1 is the split set of K
        let ctx = Context::new(quad(5), vec![AbelianFieldQ::rational()], DEFAULT_MODULUS_LIMIT).unwrap();
        assert_eq!(ctx.exps(), &[1]);
        for c in ctx.build_profile().unwrap().classes() {
            assert_eq!(c.exponents, vec![c.pivot_exp]);
        }
    }

    #[test]
    fn biquadratic_with_a_local_field() {
        // Q(√3,√5) has local degree 4 at 3 (3 ramifies in √3, inert in √5)
        let ctx = Context::new(quad(3), vec![quad(5), quad(15)], DEFAULT_MODULUS_LIMIT).unwrap();
        let profile = ctx.build_profile().unwrap();
        let three = profile.entry_for_place(Place::Prime(3)).unwrap();
        assert_eq!(three.exponents, vec![1, 1]);
    }

    #[test]
    fn exponents_depend_only_on_generated_subgroup() {
        let ctx = Context::new(
            AbelianFieldQ::cyclotomic(9).unwrap().subfield_of_degree(3).unwrap(),
            vec![AbelianFieldQ::cyclotomic(7).unwrap(), AbelianFieldQ::cyclotomic(9).unwrap()],
            DEFAULT_MODULUS_LIMIT,
        )
        .unwrap();
        let n = ctx.modulus();
        for t in abelian_q::frobenius_classes(n) {
            let base = ctx.class_exponents(&PlaceClass::Frob(t));
            let ord = arith::order_mod(t, n, arith::euler_phi(n), &arith::factor(arith::euler_phi(n)));
            for j in 1..ord {
                if arith::gcd(j, ord) == 1 {
                    assert_eq!(ctx.class_exponents(&PlaceClass::Frob(arith::pow_mod(t, j, n))), base);
                }
            }
        }
    }

    #[test]
    fn subfield_context_drops_exponents_by_one() {
        let k = AbelianFieldQ::cyclotomic_subfield(17, 4).unwrap();
        let k0 = k.subfield_of_degree(2).unwrap();
        let factors = vec![AbelianFieldQ::cyclotomic(17).unwrap().subfield_of_degree(8).unwrap(), quad(13), quad(17)];
        let full = Context::new(k, factors.clone(), DEFAULT_MODULUS_LIMIT).unwrap();
        let sub = Context::new(k0, factors, DEFAULT_MODULUS_LIMIT).unwrap();
        for (&ei, &fi) in full.exps().iter().zip(sub.exps()) {
            assert!(fi <= ei);
            if ei != 0 {
                assert_eq!(ei, fi + 1);
            }
        }
        let (pf, ps) = (full.build_profile().unwrap(), sub.build_profile().unwrap());
        for (a, b) in pf.classes().iter().zip(ps.classes()) {
            assert_eq!(a.class, b.class);
            for (&x, &y) in a.exponents.iter().zip(&b.exponents) {
                assert!(y <= x);
                if x != 0 {
                    assert_eq!(x, y + 1);
                }
            }
        }
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let profile = example_ctx().build_profile().unwrap();
        let json = profile.to_json();
        assert_eq!(SplittingProfile::from_json(&json).unwrap(), profile);
        let mut broken = json.clone();
        broken["classes"][0]["exponents"][0] = serde_json::json!(5);
        assert!(matches!(SplittingProfile::from_json(&broken), Err(Error::MalformedProfile(_))));
        let toy = r#"{"p":2,"e":1,"exps":[1,1],"classes":[
            {"kind":"infty","exponents":[0,0],"pivot_exp":0},
            {"kind":"frob","value":3,"exponents":[1,0],"pivot_exp":1}]}"#;
        let toy = SplittingProfile::from_json_str(toy).unwrap();
        assert_eq!(toy.classes().len(), 2);
        assert_eq!(SplittingProfile::from_json(&toy.to_json()).unwrap(), toy);
    }
}
