//! Hasse invariants of cyclic algebras, local solvability, the Brauer–Manin
//! character `α_c` and the resulting decision procedure.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::abelian_q::{local_artin_symbol, span_order, AbelianFieldQ, GaloisAmbient, Place, QuotientMap};
use crate::arith;
use crate::error::{Error, Result};
use crate::sha_core::{self, covering_range, Limits, ShaDecomposition};

/// An element of Q/Z, kept in `[0, 1)`.
pub type Fraction = Ratio<u64>;

fn fraction(num: u64, den: u64) -> Fraction {
    Ratio::new(num % den, den)
}

fn add_mod_one(a: Fraction, b: Fraction) -> Fraction {
    let s = a + b;
    s - s.trunc()
}

fn scale_mod_one(a: Fraction, k: u64) -> Fraction {
    fraction(a.numer() * (k % a.denom()), *a.denom())
}

/// A cyclic field with a fixed generator `g` of its Galois group.
#[derive(Debug, Clone)]
pub struct CyclicField {
    field: AbelianFieldQ,
    quotient: QuotientMap,
    degree: u64,
    generator: u64,
    gamma_inv: u64,
}

impl CyclicField {
    pub fn new(field: AbelianFieldQ) -> Result<Self> {
        let quotient = field.quotient();
        if quotient.invariants().len() > 1 {
            return Err(Error::NonCyclic);
        }
        let degree = quotient.order();
        let n = field.modulus();
        let (generator, gamma_inv) = if degree == 1 {
            (1, 0)
        } else {
            (1..n)
                .filter(|&t| arith::gcd(t, n) == 1)
                .find_map(|t| {
                    let gamma = quotient.image(t)[0];
                    arith::inv_mod(gamma, degree).map(|inv| (t, inv))
                })
                .expect("a cyclic quotient has a generating residue")
        };
        Ok(CyclicField { quotient: quotient.clone(), field, degree, generator, gamma_inv })
    }

    pub fn field(&self) -> &AbelianFieldQ {
        &self.field
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    /// The residue whose class is the chosen generator of `Gal(K/Q)`.
    pub fn generator(&self) -> u64 {
        self.generator
    }

    /// `inv_v (K, c) = j/d` where the local Artin symbol of `c` is `g^j`.
    pub fn invariant(&self, c: &BigRational, v: Place) -> Result<Fraction> {
        let t = local_artin_symbol(self.field.modulus(), v, c)?;
        if self.degree == 1 {
            return Ok(Fraction::zero());
        }
        let y = self.quotient.image(t)[0];
        Ok(fraction(arith::mul_mod(y, self.gamma_inv, self.degree), self.degree))
    }

    /// Invariants over `{∞} ∪ {p | N} ∪ {p | c}`, checked to sum to zero.
    pub fn ledger(&self, c: &BigRational) -> Result<InvariantLedger> {
        let places = support(self.field.modulus(), c)?;
        let mut entries = BTreeMap::new();
        for v in places {
            entries.insert(v, self.invariant(c, v)?);
        }
        let ledger = InvariantLedger { degree: self.degree, entries };
        if !ledger.sum().is_zero() {
            return Err(Error::Inconsistent(format!("Hasse invariants of ({}, {c}) sum to {}", self.field, ledger.sum())));
        }
        Ok(ledger)
    }
}

/// Local invariants `inv_v (K, c)` on a finite set of places.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantLedger {
    pub degree: u64,
    pub entries: BTreeMap<Place, Fraction>,
}

impl InvariantLedger {
    pub fn sum(&self) -> Fraction {
        self.entries.values().fold(Fraction::zero(), |acc, &x| add_mod_one(acc, x))
    }

    pub fn get(&self, v: Place) -> Fraction {
        self.entries.get(&v).copied().unwrap_or_else(Fraction::zero)
    }
}

/// `inv_v (K, c)` for a cyclic field K with its canonical generator.
pub fn hasse_invariant(k: &AbelianFieldQ, c: &BigRational, v: Place) -> Result<Fraction> {
    CyclicField::new(k.clone())?.invariant(c, v)
}

/// The invariant ledger of `(K, c)`.
pub fn invariant_ledger(k: &AbelianFieldQ, c: &BigRational) -> Result<InvariantLedger> {
    CyclicField::new(k.clone())?.ledger(c)
}

fn prime_divisors(x: &BigInt) -> Result<Vec<u64>> {
    let mag: BigUint = x.magnitude().clone();
    if mag.is_one() {
        return Ok(Vec::new());
    }
    Ok(arith::factor_big(&mag)?.into_iter().map(|(p, _)| p).collect())
}

/// `{∞} ∪ {p | N} ∪ {p | num(c) den(c)}`, sorted.
pub fn support(modulus: u64, c: &BigRational) -> Result<Vec<Place>> {
    if c.is_zero() {
        return Err(Error::ZeroInput);
    }
    let mut primes: BTreeSet<u64> = arith::factor(modulus).into_iter().map(|(p, _)| p).collect();
    primes.extend(prime_divisors(c.numer())?);
    primes.extend(prime_divisors(c.denom())?);
    let mut out = vec![Place::Infinity];
    out.extend(primes.into_iter().map(Place::Prime));
    Ok(out)
}

/// Values of `α_c(p)` on the generators of `Ш(K(p), K')`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaComponent {
    pub p: u64,
    pub generator_values: Vec<Fraction>,
}

/// The Brauer–Manin character `α_c` on the chosen generators of `Ш(L)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obstruction {
    pub components: Vec<AlphaComponent>,
}

impl Obstruction {
    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.generator_values.iter().all(Zero::is_zero))
    }

    /// `α_c` as an element of `⊕ Z/d_k`, the dual of `Ш(L)` in the Smith
    /// coordinates of the components.
    pub fn character(&self, sha: &ShaDecomposition) -> Vec<u64> {
        self.components
            .iter()
            .zip(&sha.components)
            .flat_map(|(a, comp)| {
                a.generator_values
                    .iter()
                    .zip(comp.group.invariant_factors())
                    .map(|(v, &d)| v.numer() * (d / v.denom()) % d)
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .components
            .iter()
            .map(|c| {
                let values: Vec<[String; 2]> =
                    c.generator_values.iter().map(|v| [v.numer().to_string(), v.denom().to_string()]).collect();
                (c.p.to_string(), serde_json::json!({ "generator_values": values }))
            })
            .collect();
        serde_json::Value::Object(map)
    }
}

/// Outcome of the decision procedure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    NoLocalSolution(Place),
    Obstructed(Obstruction),
    Solvable,
}

impl Verdict {
    pub fn is_solvable(&self) -> bool {
        matches!(self, Verdict::Solvable)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::NoLocalSolution(_) => "no_local",
            Verdict::Obstructed(_) => "obstructed",
            Verdict::Solvable => "solvable",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Verdict::NoLocalSolution(v) => serde_json::json!({ "verdict": self.name(), "witness": v, "alpha": null }),
            Verdict::Obstructed(o) => serde_json::json!({ "verdict": self.name(), "witness": null, "alpha": o.to_json() }),
            Verdict::Solvable => serde_json::json!({ "verdict": self.name(), "witness": null, "alpha": {} }),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NoLocalSolution(v) => write!(f, "no local solution at {v}"),
            Verdict::Obstructed(o) => {
                write!(f, "obstructed:")?;
                for c in &o.components {
                    let vals: Vec<String> = c.generator_values.iter().map(|x| x.to_string()).collect();
                    write!(f, " α({}) = [{}]", c.p, vals.join(", "))?;
                }
                Ok(())
            }
            Verdict::Solvable => write!(f, "solvable"),
        }
    }
}

/// Representatives of the knot group found by a height scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KnotGroup {
    /// Each representative with its character in Smith coordinates.
    pub representatives: Vec<(String, Vec<u64>)>,
    /// Invariant factors of the dual group being generated.
    pub moduli: Vec<u64>,
    pub complete: bool,
    pub scanned: u64,
}

/// Nonzero rationals of height at most `bound`, ascending by height, then
/// positive before negative, then by denominator and numerator.
pub fn rationals_by_height(bound: u64) -> impl Iterator<Item = BigRational> {
    (1..=bound).flat_map(|h| {
        let mut pairs = Vec::new();
        for den in 1..=h {
            if den < h {
                if arith::gcd(h, den) == 1 {
                    pairs.push((h, den));
                }
            } else {
                for num in 1..=h {
                    if arith::gcd(num, h) == 1 && (num < h || h == 1) {
                        pairs.push((num, den));
                    }
                }
            }
        }
        pairs.sort_by_key(|&(n, d)| (d, n));
        let pos = pairs.clone().into_iter().map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)));
        let neg = pairs.into_iter().map(|(n, d)| BigRational::new(-BigInt::from(n), BigInt::from(d)));
        pos.chain(neg).collect::<Vec<_>>()
    })
}

/// A multinorm problem `N_{L/Q}(t) = c` with everything that does not depend
/// on `c` computed once.
#[derive(Debug)]
pub struct Multinorm {
    factors: Vec<AbelianFieldQ>,
    sha: ShaDecomposition,
    pivots: Vec<CyclicField>,
    norm_symbols: Mutex<HashMap<Place, Arc<HashSet<usize>>>>,
}

impl Multinorm {
    /// Prepares `L = ∏ factors` around a cyclic pivot (the first cyclic
    /// factor when `pivot` is `None`).
    pub fn new(factors: &[AbelianFieldQ], pivot: Option<usize>, limits: &Limits) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::NoCyclicFactor(None));
        }
        let pivot = match pivot {
            Some(i) => i,
            None => sha_core::find_cyclic_pivot(factors)?,
        };
        let sha = sha_core::compute_sha(factors, pivot, limits)?;
        let pivots = sha
            .components
            .iter()
            .map(|c| CyclicField::new(c.context.pivot().clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Multinorm { factors: factors.to_vec(), sha, pivots, norm_symbols: Mutex::new(HashMap::new()) })
    }

    pub fn factors(&self) -> &[AbelianFieldQ] {
        &self.factors
    }

    pub fn pivot(&self) -> usize {
        self.sha.pivot
    }

    pub fn sha(&self) -> &ShaDecomposition {
        &self.sha
    }

    pub fn ambient(&self) -> &GaloisAmbient {
        &self.sha.ambient
    }

    pub fn modulus(&self) -> u64 {
        self.sha.ambient.modulus()
    }

    pub fn support(&self, c: &BigRational) -> Result<Vec<Place>> {
        support(self.modulus(), c)
    }

    /// Ambient elements that are Artin symbols of local norms at `v`: the
    /// span of the elements of `D_v` acting trivially on some factor.
    fn local_norm_symbols(&self, v: Place) -> Arc<HashSet<usize>> {
        if let Some(span) = self.norm_symbols.lock().expect("cache lock").get(&v) {
            return span.clone();
        }
        let amb = self.ambient();
        let gens: Vec<Vec<u64>> = amb
            .decomposition(v)
            .iter()
            .map(|&k| amb.element(k))
            .filter(|s| (0..self.factors.len()).any(|j| amb.field_coords(s, j).iter().all(|&x| x == 0)))
            .map(<[u64]>::to_vec)
            .collect();
        let span: Arc<HashSet<usize>> = Arc::new(amb.closure(&gens).into_iter().collect());
        self.norm_symbols.lock().expect("cache lock").insert(v, span.clone());
        span
    }

    /// Whether `c` is a local norm from `L ⊗ Q_v`.
    pub fn locally_solvable(&self, c: &BigRational, v: Place) -> Result<bool> {
        let amb = self.ambient();
        let symbol = amb.element_of(local_artin_symbol(amb.modulus(), v, c)?);
        Ok(self.local_norm_symbols(v).contains(&symbol))
    }

    /// The first place of the support where `c` is not a local norm.
    pub fn local_obstruction(&self, c: &BigRational) -> Result<Option<Place>> {
        for v in self.support(c)? {
            if !self.locally_solvable(c, v)? {
                return Ok(Some(v));
            }
        }
        Ok(None)
    }

    /// Ledger of `(K(p), c)` for the component of prime `p`.
    pub fn ledger(&self, component: usize, c: &BigRational) -> Result<InvariantLedger> {
        self.pivots[component].ledger(c)
    }

    /// `α_c`, requiring local solvability everywhere.
    pub fn alpha(&self, c: &BigRational) -> Result<Obstruction> {
        if let Some(v) = self.local_obstruction(c)? {
            return Err(Error::NotLocallySolvable(v));
        }
        self.alpha_unchecked(c)
    }

    fn alpha_unchecked(&self, c: &BigRational) -> Result<Obstruction> {
        let mut components = Vec::new();
        for (comp, pivot) in self.sha.components.iter().zip(&self.pivots) {
            let ledger = pivot.ledger(c)?;
            let ctx = &comp.context;
            let exps = ctx.exps();
            let mut generator_values = Vec::new();
            for a in comp.group.generators() {
                let mut low = Fraction::zero();
                let mut high = Fraction::zero();
                for (&v, &inv) in &ledger.entries {
                    if inv.is_zero() {
                        continue;
                    }
                    let (w, _) = ctx.place_exponents(v);
                    let (lo, hi) = covering_range(comp.p, exps, a, &w)
                        .ok_or_else(|| Error::Inconsistent(format!("{v} is not covered by a generator of G")))?;
                    low = add_mod_one(low, scale_mod_one(inv, lo));
                    high = add_mod_one(high, scale_mod_one(inv, hi));
                }
                if low != high {
                    return Err(Error::Inconsistent(format!(
                        "α_c depends on the covering index: {low} against {high}"
                    )));
                }
                generator_values.push(low);
            }
            components.push(AlphaComponent { p: comp.p, generator_values });
        }
        Ok(Obstruction { components })
    }

    pub fn decide(&self, c: &BigRational) -> Result<Verdict> {
        if let Some(v) = self.local_obstruction(c)? {
            return Ok(Verdict::NoLocalSolution(v));
        }
        if self.sha.is_trivial() {
            return Ok(Verdict::Solvable);
        }
        let alpha = self.alpha_unchecked(c)?;
        Ok(if alpha.is_zero() { Verdict::Solvable } else { Verdict::Obstructed(alpha) })
    }

    /// Scans rationals by height for everywhere-local norms whose characters
    /// generate the dual of `Ш(L)`.
    pub fn knot_group(&self, bound: u64) -> Result<KnotGroup> {
        let moduli: Vec<u64> = self
            .sha
            .components
            .iter()
            .flat_map(|c| c.group.invariant_factors().to_vec())
            .collect();
        let target = self.sha.order();
        let mut chars: Vec<Vec<u64>> = Vec::new();
        let mut representatives = Vec::new();
        let mut scanned = 0;
        if target > 1 {
            for c in rationals_by_height(bound) {
                scanned += 1;
                if self.local_obstruction(&c)?.is_some() {
                    continue;
                }
                let chi = self.alpha_unchecked(&c)?.character(&self.sha);
                let before = span_order(&chars, &moduli);
                chars.push(chi.clone());
                if span_order(&chars, &moduli) > before {
                    representatives.push((c.to_string(), chi));
                    if span_order(&chars, &moduli) == target {
                        break;
                    }
                } else {
                    chars.pop();
                }
            }
        }
        let complete = span_order(&chars, &moduli) == target;
        Ok(KnotGroup { representatives, moduli, complete, scanned })
    }
}

/// Whether `c` is a local norm from `L` at `v`.
pub fn locally_solvable(factors: &[AbelianFieldQ], c: &BigRational, v: Place) -> Result<bool> {
    local_only(factors)?.locally_solvable(c, v)
}

/// `Ok(None)` when `c` is everywhere a local norm, else the first failing place.
pub fn locally_solvable_everywhere(factors: &[AbelianFieldQ], c: &BigRational) -> Result<Option<Place>> {
    local_only(factors)?.local_obstruction(c)
}

fn local_only(factors: &[AbelianFieldQ]) -> Result<Multinorm> {
    // a rational factor stands in as the pivot: local questions never use Ш
    let mut with_q = factors.to_vec();
    with_q.push(AbelianFieldQ::rational());
    let mut m = Multinorm::new(&with_q, Some(factors.len()), &Limits::default())?;
    m.factors.pop();
    Ok(m)
}

pub fn alpha(factors: &[AbelianFieldQ], pivot: usize, c: &BigRational) -> Result<Obstruction> {
    Multinorm::new(factors, Some(pivot), &Limits::default())?.alpha(c)
}

pub fn decide(factors: &[AbelianFieldQ], pivot: usize, c: &BigRational) -> Result<Verdict> {
    Multinorm::new(factors, Some(pivot), &Limits::default())?.decide(c)
}

pub fn knot_group(factors: &[AbelianFieldQ], pivot: usize, bound: u64) -> Result<KnotGroup> {
    Multinorm::new(factors, Some(pivot), &Limits::default())?.knot_group(bound)
}

/// Parses `a`, `a/b` (with optional sign) into a nonzero rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Unsupported(format!("`{s}` is not a rational number"));
    let (num, den) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    if num.is_zero() {
        return Err(Error::ZeroInput);
    }
    Ok(BigRational::new(num, den))
}

/// Sum of the invariants of `(K, c)` over the given places, as a multiple of `1/d`.
pub fn invariant_sum(k: &CyclicField, c: &BigRational, places: &[Place]) -> Result<u64> {
    let mut total = Fraction::zero();
    for &v in places {
        total = add_mod_one(total, k.invariant(c, v)?);
    }
    Ok(total.numer() * (k.degree() / total.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn quad(d: i64) -> AbelianFieldQ {
        AbelianFieldQ::quadratic(d).unwrap()
    }

    fn example() -> Vec<AbelianFieldQ> {
        vec![quad(13), quad(17), quad(221)]
    }

    #[test]
    fn invariants_of_quadratic_algebras() {
        let k = quad(13);
        assert_eq!(hasse_invariant(&k, &q(17, 1), Place::Prime(13)).unwrap(), Fraction::zero());
        // 2 is a non-residue mod 13, so (√13, 2) ramifies at 13 and at 2
        assert_eq!(hasse_invariant(&k, &q(2, 1), Place::Prime(13)).unwrap(), fraction(1, 2));
        assert_eq!(hasse_invariant(&k, &q(2, 1), Place::Prime(2)).unwrap(), fraction(1, 2));
        // (√13, -1) is split at ∞ since √13 is real
        assert_eq!(hasse_invariant(&k, &q(-1, 1), Place::Infinity).unwrap(), Fraction::zero());
        assert_eq!(hasse_invariant(&quad(-1), &q(-1, 1), Place::Infinity).unwrap(), fraction(1, 2));
        assert_eq!(hasse_invariant(&k, &q(0, 1), Place::Infinity), Err(Error::ZeroInput));
    }

    #[test]
    fn ledgers_sum_to_zero() {
        for k in [quad(13), quad(-5), AbelianFieldQ::cyclotomic_subfield(7, 3).unwrap(), AbelianFieldQ::cyclotomic(5).unwrap(), AbelianFieldQ::cyclotomic_subfield(17, 8).unwrap()] {
            for (a, b) in [(2, 1), (-3, 7), (91, 10), (-1, 1), (1000, 999)] {
                let ledger = invariant_ledger(&k, &q(a, b)).unwrap();
                assert!(ledger.sum().is_zero());
            }
        }
    }

    #[test]
    fn norms_have_zero_invariants() {
        // N(2 + √13) = -9, N(x + y ζ_3 ...) via 7 = N(3 + √2) in Q(√2)
        for (k, c) in [(quad(13), q(-9, 1)), (quad(2), q(7, 1)), (quad(-1), q(5, 1))] {
            let ledger = invariant_ledger(&k, &c).unwrap();
            assert!(ledger.entries.values().all(Zero::is_zero), "{k}, {c}");
        }
    }

    #[test]
    fn example_has_no_local_obstructions() {
        let l = example();
        for c in rationals_by_height(12) {
            assert_eq!(locally_solvable_everywhere(&l, &c).unwrap(), None, "c = {c}");
        }
    }

    #[test]
    fn two_quadratics_can_fail_locally() {
        let l = vec![quad(13), quad(17)];
        assert_eq!(locally_solvable_everywhere(&l, &q(5, 1)).unwrap(), Some(Place::Prime(5)));
        assert_eq!(decide(&l, 0, &q(5, 1)).unwrap(), Verdict::NoLocalSolution(Place::Prime(5)));
        assert_eq!(decide(&l, 0, &q(1, 1)).unwrap(), Verdict::Solvable);
    }

    #[test]
    fn example_knot_group_has_one_generator() {
        let l = example();
        let m = Multinorm::new(&l, Some(0), &Limits::default()).unwrap();
        let knot = m.knot_group(60).unwrap();
        assert!(knot.complete);
        assert_eq!(knot.representatives.len(), 1);
        let c = parse_rational(&knot.representatives[0].0).unwrap();
        assert!(matches!(m.decide(&c).unwrap(), Verdict::Obstructed(_)));
        assert_eq!(m.decide(&q(1, 1)).unwrap(), Verdict::Solvable);
        // c1 c2 has the sum of the characters
        let c2 = q(-9, 1);
        let chi = |x: &BigRational| m.alpha(x).unwrap().character(m.sha());
        let prod = &c * &c2;
        let sum: Vec<u64> = chi(&c).iter().zip(chi(&c2)).map(|(a, b)| (a + b) % 2).collect();
        assert_eq!(chi(&prod), sum);
    }

    #[test]
    fn height_order() {
        let first: Vec<String> = rationals_by_height(3).map(|c| c.to_string()).collect();
        assert_eq!(first, vec!["1", "-1", "2", "1/2", "-2", "-1/2", "3", "3/2", "1/3", "2/3", "-3", "-3/2", "-1/3", "-2/3"]);
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rational("-3/6").unwrap(), q(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert_eq!(parse_rational("0"), Err(Error::ZeroInput));
        assert!(parse_rational("1/0").is_err());
    }
}
