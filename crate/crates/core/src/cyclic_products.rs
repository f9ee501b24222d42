//! Closed forms for `L` a product of cyclic extensions of Q.
//!
//! For cyclic factors of prime degree p the group `Ш(L)` is either zero or
//! `(Z/pZ)^{n-2}`, and it is nonzero exactly when all factors sit in one
//! field `F` of degree `p²` whose local degrees are at most p. The general
//! case reduces to this one prime by prime, through the degree-p subfields.

use num_rational::BigRational;
use serde::Serialize;

use crate::abelian_q::{AbelianFieldQ, Place};
use crate::arith;
use crate::brauer::{support, CyclicField};
use crate::error::{Error, Result};
use crate::sha_core::{self, Limits};

/// Local degree of a field at a place, as a certificate entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalDegree {
    pub place: Place,
    pub degree: u64,
}

/// Outcome of the prime-degree criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrimeCaseVerdict {
    Zero,
    NonZero { field: AbelianFieldQ, m: u32, local_degrees: Vec<LocalDegree> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeCaseReport {
    pub p: u64,
    pub factors: Vec<AbelianFieldQ>,
    pub verdict: PrimeCaseVerdict,
}

impl PrimeCaseReport {
    pub fn is_zero(&self) -> bool {
        matches!(self.verdict, PrimeCaseVerdict::Zero)
    }

    /// Invariant factors of `Ш` predicted by the closed form.
    pub fn invariant_factors(&self) -> Vec<u64> {
        match &self.verdict {
            PrimeCaseVerdict::Zero => Vec::new(),
            PrimeCaseVerdict::NonZero { m, .. } => vec![self.p; *m as usize],
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let factors: Vec<String> = self.factors.iter().map(ToString::to_string).collect();
        match &self.verdict {
            PrimeCaseVerdict::Zero => serde_json::json!({ "p": self.p, "factors": factors, "verdict": "zero" }),
            PrimeCaseVerdict::NonZero { field, m, local_degrees } => serde_json::json!({
                "p": self.p,
                "factors": factors,
                "verdict": "nonzero",
                "m": m,
                "field": field.to_string(),
                "local_degrees": local_degrees,
            }),
        }
    }
}

/// Places where a field can have a local degree above p: the primes dividing
/// its conductor and `∞`. Unramified decomposition groups are cyclic.
fn exceptional_places(field: &AbelianFieldQ) -> Vec<Place> {
    let mut out = vec![Place::Infinity];
    out.extend(arith::factor(field.modulus()).into_iter().map(|(q, _)| Place::Prime(q)));
    out
}

/// The prime-degree criterion for a product of cyclic fields of degree p.
pub fn sha_prime_case(factors: &[AbelianFieldQ]) -> Result<PrimeCaseReport> {
    let first = factors.first().ok_or_else(|| Error::WrongShape("empty factor list".into()))?;
    let p = first.degree();
    if !arith::is_prime(p) {
        return Err(Error::NotPrimeDegree(p));
    }
    for f in factors {
        if !f.is_cyclic() {
            return Err(Error::NonCyclic);
        }
        if f.degree() != p {
            return Err(Error::NotPrimeDegree(f.degree()));
        }
    }
    let mut distinct: Vec<AbelianFieldQ> = Vec::new();
    for f in factors {
        if !distinct.contains(f) {
            distinct.push(f.clone());
        }
    }
    let n = distinct.len() as u64;
    let zero = |distinct: Vec<AbelianFieldQ>| Ok(PrimeCaseReport { p, factors: distinct, verdict: PrimeCaseVerdict::Zero });
    if n <= 2 || n >= p + 2 {
        return zero(distinct);
    }
    let field = distinct[0].compositum(&distinct[1]);
    if field.degree() != p * p || !distinct.iter().all(|f| f.is_subfield_of(&field)) {
        return zero(distinct);
    }
    let local_degrees: Vec<LocalDegree> = exceptional_places(&field)
        .into_iter()
        .map(|place| LocalDegree { place, degree: field.local_degree(place) })
        .collect();
    if local_degrees.iter().any(|l| l.degree > p) {
        return zero(distinct);
    }
    Ok(PrimeCaseReport {
        p,
        factors: distinct,
        verdict: PrimeCaseVerdict::NonZero { field, m: (n - 2) as u32, local_degrees },
    })
}

/// Both routes to `Ш(L)` for a product of cyclic fields.
#[derive(Debug, Clone)]
pub struct CyclicProductReport {
    /// Closed-form report for each prime dividing every degree.
    pub prime_cases: Vec<PrimeCaseReport>,
    /// Primes whose closed form is nonzero.
    pub obstruction_primes: Vec<u64>,
    /// Elementary divisors of `Ш(L)` from the general pipeline.
    pub elementary_divisors: Vec<u64>,
}

impl CyclicProductReport {
    pub fn vanishes(&self) -> bool {
        self.elementary_divisors.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let cases: Vec<serde_json::Value> = self.prime_cases.iter().map(PrimeCaseReport::to_json).collect();
        serde_json::json!({
            "prime_cases": cases,
            "obstruction_primes": self.obstruction_primes,
            "elementary_divisors": self.elementary_divisors,
            "vanishes": self.vanishes(),
        })
    }
}

/// `K(p)_prim`, the degree-p subfield of a cyclic field, if p divides its degree.
pub fn primitive_part(k: &AbelianFieldQ, p: u64) -> Result<Option<AbelianFieldQ>> {
    if k.degree() % p != 0 {
        return Ok(None);
    }
    k.subfield_of_degree(p).map(Some)
}

/// `Ш(L)` for cyclic factors, by the closed form and by the general
/// pipeline, with the two checked against each other.
pub fn sha_product_cyclic(factors: &[AbelianFieldQ], limits: &Limits) -> Result<CyclicProductReport> {
    if factors.is_empty() {
        return Err(Error::WrongShape("empty factor list".into()));
    }
    if let Some(i) = factors.iter().position(|f| !f.is_cyclic()) {
        return Err(Error::NoCyclicFactor(Some(i)));
    }
    let sha = sha_core::compute_sha(factors, 0, limits)?;
    let total: u64 = factors.iter().map(AbelianFieldQ::degree).product();
    let mut prime_cases = Vec::new();
    for (p, _) in arith::factor(total) {
        let part: Vec<u64> = sha
            .components
            .iter()
            .filter(|c| c.p == p)
            .flat_map(|c| c.group.invariant_factors().to_vec())
            .collect();
        let prims = factors
            .iter()
            .map(|k| primitive_part(k, p))
            .collect::<Result<Option<Vec<_>>>>()?;
        let Some(prims) = prims else {
            // some K_i(p) is Q, so L(p) has a rational factor
            if !part.is_empty() {
                return Err(Error::Inconsistent(format!("Ш(L) has a {p}-part although some factor has degree prime to {p}")));
            }
            continue;
        };
        let case = sha_prime_case(&prims)?;
        if case.is_zero() != part.is_empty() {
            return Err(Error::Inconsistent(format!(
                "closed form and pipeline disagree on the vanishing of the {p}-part: {:?} against {part:?}",
                case.invariant_factors()
            )));
        }
        if factors.iter().all(|k| k.degree() == p) && case.invariant_factors() != part {
            return Err(Error::Inconsistent(format!(
                "closed form {:?} and pipeline {part:?} disagree",
                case.invariant_factors()
            )));
        }
        prime_cases.push(case);
    }
    let obstruction_primes = prime_cases.iter().filter(|c| !c.is_zero()).map(|c| c.p).collect();
    Ok(CyclicProductReport { prime_cases, obstruction_primes, elementary_divisors: sha.elementary_divisors() })
}

/// The `p + 1` subfields of degree p of a field with group `C_p × C_p`,
/// as fixed fields of the characters `(1, t)` for `t < p` and then `(0, 1)`.
pub fn degree_p_subfields(field: &AbelianFieldQ) -> Result<Vec<AbelianFieldQ>> {
    let inv = field.quotient().invariants().to_vec();
    let p = match inv.as_slice() {
        &[a, b] if a == b && arith::is_prime(a) => a,
        _ => return Err(Error::WrongShape(format!("Galois group with invariants {inv:?} is not C_p × C_p"))),
    };
    let mut out: Vec<AbelianFieldQ> = (0..p)
        .map(|t| field.character_kernel_field(&[1, t], p))
        .collect::<Result<_>>()?;
    out.push(field.character_kernel_field(&[0, 1], p)?);
    Ok(out)
}

/// The isomorphism `c ↦ (Σ_{Ω_1} [K, c]_v, ..., Σ_{Ω_{p-1}} [K, c]_v)` onto
/// `(Z/pZ)^{p-1}`, with `K` the last subfield and `Ω_i` the split places of
/// the i-th one. The field data is checked once and reused across `c`.
#[derive(Debug, Clone)]
pub struct ExampleMap {
    field: AbelianFieldQ,
    subfields: Vec<AbelianFieldQ>,
    k: CyclicField,
    p: u64,
}

impl ExampleMap {
    pub fn new(field: &AbelianFieldQ, subfields: &[AbelianFieldQ]) -> Result<Self> {
        let expected = degree_p_subfields(field)?;
        let p = field.quotient().invariants()[0];
        if subfields.len() as u64 != p + 1 || !expected.iter().all(|f| subfields.contains(f)) {
            return Err(Error::WrongShape(format!("expected the {} distinct degree-{p} subfields of {field}", p + 1)));
        }
        if let Some(v) = exceptional_places(field).into_iter().find(|&v| field.local_degree(v) > p) {
            return Err(Error::WrongShape(format!("{field} has local degree {} at {v}, so Ш vanishes", p * p)));
        }
        let k = CyclicField::new(subfields[p as usize].clone())?;
        Ok(Self { field: field.clone(), subfields: subfields.to_vec(), k, p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn eval(&self, c: &BigRational) -> Result<Vec<u64>> {
        let p = self.p;
        let mut terms = Vec::new();
        for v in support(self.field.modulus(), c)? {
            let inv = self.k.invariant(c, v)?;
            if *inv.numer() != 0 {
                terms.push((v, inv.numer() * (p / inv.denom()) % p));
            }
        }
        Ok(self.subfields[..p as usize - 1]
            .iter()
            .map(|ki| {
                terms
                    .iter()
                    .filter(|&&(v, _)| ki.local_degree(v) == 1)
                    .fold(0, |acc, &(_, x)| (acc + x) % p)
            })
            .collect())
    }
}

/// One-shot form of [`ExampleMap::eval`].
pub fn example_map_f(field: &AbelianFieldQ, subfields: &[AbelianFieldQ], c: &BigRational) -> Result<Vec<u64>> {
    ExampleMap::new(field, subfields)?.eval(c)
}
