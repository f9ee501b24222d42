//! Brute-force verifiers that corroborate the decision procedure.
//!
//! `norm_solution_search` looks for explicit global solutions when every
//! factor is Q or quadratic, and `spot_check_profile` recomputes profile
//! entries at actual small primes from Frobenius orders.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::abelian_q::{AbelianFieldQ, Place};
use crate::arith;
use crate::error::{Error, Result};
use crate::splitting::{Context, SplittingProfile};

/// A nonzero rational modulo squares: a sign and a squarefree set of primes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareClass {
    negative: bool,
    primes: Vec<u64>,
}

impl SquareClass {
    pub fn one() -> Self {
        Self { negative: false, primes: Vec::new() }
    }

    pub fn from_i64(n: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroInput);
        }
        let primes = arith::factor(n.unsigned_abs())
            .into_iter()
            .filter(|&(_, k)| k % 2 == 1)
            .map(|(q, _)| q)
            .collect();
        Ok(Self { negative: n < 0, primes })
    }

    pub fn from_rational(c: &BigRational) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::ZeroInput);
        }
        let odd = |n: &BigInt| -> Result<Self> {
            let f = arith::factor_big(&n.magnitude().clone())?;
            let primes = f.into_iter().filter(|&(_, k)| k % 2 == 1).map(|(q, _)| q).collect();
            Ok(Self { negative: false, primes })
        };
        let mut out = odd(c.numer())?.mul(&odd(c.denom())?);
        out.negative = c.is_negative();
        Ok(out)
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.primes, &other.primes);
        let (mut i, mut j) = (0, 0);
        let mut primes = Vec::with_capacity(a.len() + b.len());
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i] < b[j]) {
                primes.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j] < a[i] {
                primes.push(b[j]);
                j += 1;
            } else {
                i += 1;
                j += 1;
            }
        }
        Self { negative: self.negative != other.negative, primes }
    }

    /// The squarefree integer representing the class.
    pub fn value(&self) -> BigInt {
        let n: BigInt = self.primes.iter().map(|&q| BigInt::from(q)).product();
        if self.negative {
            -n
        } else {
            n
        }
    }

    fn contains(&self, q: u64) -> bool {
        self.primes.binary_search(&q).is_ok()
    }

    /// The class with the prime `q` removed, reduced mod `m`, as a signed unit.
    fn unit_part_mod(&self, q: u64, m: u64) -> u64 {
        let mut r = if self.negative { m - 1 } else { 1 };
        for &l in &self.primes {
            if l != q {
                r = arith::mul_mod(r, l % m, m);
            }
        }
        r
    }
}

fn legendre(a: u64, q: u64) -> i32 {
    match arith::pow_mod(a % q, (q - 1) / 2, q) {
        1 => 1,
        0 => 0,
        _ => -1,
    }
}

/// The Hilbert symbol `(a, b)_v` of two square classes.
pub fn hilbert_symbol(a: &SquareClass, b: &SquareClass, v: Place) -> i32 {
    match v {
        Place::Infinity => {
            if a.negative && b.negative {
                -1
            } else {
                1
            }
        }
        Place::Prime(2) => {
            let (alpha, beta) = (a.contains(2) as u64, b.contains(2) as u64);
            let (u, w) = (a.unit_part_mod(2, 8), b.unit_part_mod(2, 8));
            let eps = |x: u64| ((x - 1) / 2) % 2;
            let omega = |x: u64| ((x * x - 1) / 8) % 2;
            if (eps(u) * eps(w) + alpha * omega(w) + beta * omega(u)) % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Prime(q) => {
            let (alpha, beta) = (a.contains(q), b.contains(q));
            let mut s = if alpha && beta && q % 4 == 3 { -1 } else { 1 };
            if beta {
                s *= legendre(a.unit_part_mod(q, q), q);
            }
            if alpha {
                s *= legendre(b.unit_part_mod(q, q), q);
            }
            s
        }
    }
}

/// Whether the class `s` consists of norms from `Q(√D)`.
pub fn is_local_global_norm(s: &SquareClass, d: &SquareClass) -> bool {
    let mut places = vec![Place::Infinity, Place::Prime(2)];
    places.extend(s.primes.iter().chain(&d.primes).filter(|&&q| q != 2).map(|&q| Place::Prime(q)));
    places.into_iter().all(|v| hilbert_symbol(s, d, v) == 1)
}

/// The squarefree `D` with `field = Q(√D)`, if the field is quadratic.
pub fn quadratic_radicand(field: &AbelianFieldQ) -> Option<i64> {
    if field.degree() != 2 {
        return None;
    }
    let n = field.conductor() as i64;
    let mut candidates = vec![n, -n];
    if n % 4 == 0 {
        candidates.extend([n / 4, -n / 4]);
    }
    candidates
        .into_iter()
        .find(|&d| arith::is_squarefree(d.unsigned_abs()) && AbelianFieldQ::quadratic(d).is_ok_and(|f| f == *field))
}

/// One coordinate `x + y√D` of a solution. For a rational factor `D = 1` and `y = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormComponent {
    pub radicand: i64,
    pub x: BigRational,
    pub y: BigRational,
}

impl NormComponent {
    pub fn norm(&self) -> BigRational {
        if self.radicand == 1 && self.y.is_zero() {
            return self.x.clone();
        }
        &self.x * &self.x - BigRational::from_integer(self.radicand.into()) * &self.y * &self.y
    }

    fn scale(&mut self, r: &BigRational) {
        self.x = &self.x * r;
        self.y = &self.y * r;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormSolution {
    pub components: Vec<NormComponent>,
}

impl NormSolution {
    pub fn norm(&self) -> BigRational {
        self.components.iter().map(NormComponent::norm).fold(BigRational::one(), |acc, n| acc * n)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let parts: Vec<serde_json::Value> = self
            .components
            .iter()
            .map(|c| serde_json::json!({ "radicand": c.radicand, "x": c.x.to_string(), "y": c.y.to_string() }))
            .collect();
        serde_json::json!({ "components": parts, "norm": self.norm().to_string() })
    }
}

/// Squarefree classes with `|s| ≤ bound` in the order `1, -1, 2, -2, ...`.
fn classes_by_size(bound: u64) -> Vec<SquareClass> {
    let mut out = Vec::new();
    for n in 1..=bound {
        if arith::is_squarefree(n) {
            let pos = SquareClass::from_i64(n as i64).expect("nonzero");
            let mut neg = pos.clone();
            neg.negative = true;
            out.push(pos);
            out.push(neg);
        }
    }
    out
}

/// Key of `y` relative to `Q(√D)`: the primes outside `S = {∞, 2} ∪ primes(D)`
/// dividing `y` that are inert in `Q(√D)`, and the symbols `(y, D)_v` on `S`.
/// Two classes share a key exactly when their product is a norm.
fn join_key(y: &SquareClass, d: &SquareClass) -> (Vec<u64>, u64) {
    let dv = d.value();
    let dv = i64::try_from(&dv).expect("radicand fits in i64");
    let inert: Vec<u64> = y
        .primes
        .iter()
        .copied()
        .filter(|&q| q != 2 && !d.contains(q) && arith::kronecker(dv, q) == -1)
        .collect();
    let mut places = vec![Place::Infinity, Place::Prime(2)];
    places.extend(d.primes.iter().filter(|&&q| q != 2).map(|&q| Place::Prime(q)));
    let mask = places
        .into_iter()
        .enumerate()
        .fold(0u64, |m, (k, v)| if hilbert_symbol(y, d, v) == -1 { m | (1 << k) } else { m });
    (inert, mask)
}

fn is_perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// An element of `Q(√D)` of norm `s`, by a search for `x² = s z² + D y²`.
fn element_of_norm(s: &SquareClass, d: i64) -> Result<NormComponent> {
    let sv = s.value();
    let dv = BigInt::from(d);
    let cap = |n: &BigInt| -> u64 { 2 * u64::try_from(n.magnitude().sqrt()).unwrap_or(u64::MAX / 8) + 10 };
    let (y_cap, z_cap) = (cap(&sv), cap(&dv));
    for scale in [1u64, 4, 16] {
        for z in 1..=z_cap * scale {
            let sz = &sv * BigInt::from(z) * BigInt::from(z);
            for y in 0..=y_cap * scale {
                let rhs = &sz + &dv * BigInt::from(y) * BigInt::from(y);
                if let Some(x) = is_perfect_square(&rhs) {
                    let zq = BigRational::from_integer(z.into());
                    return Ok(NormComponent {
                        radicand: d,
                        x: BigRational::from_integer(x) / &zq,
                        y: BigRational::from_integer(y.into()) / zq,
                    });
                }
            }
        }
    }
    Err(Error::Inconsistent(format!("no element of norm {sv} found in Q(√{d})")))
}

/// Search for `t` with `N_{L/Q}(t) = c` when every factor is Q or quadratic.
///
/// Each coordinate is determined up to squares by its norm class, so the
/// search runs over tuples of squarefree norm classes with `|s_i| ≤ bound`
/// for all factors but the last, whose class is forced. The last two
/// coordinates are matched through a hash join on Hilbert-symbol keys. A hit
/// is turned into explicit elements and verified exactly.
pub fn norm_solution_search(factors: &[AbelianFieldQ], c: &BigRational, bound: u64) -> Result<Option<NormSolution>> {
    if bound == 0 {
        return Err(Error::WrongShape("bound must be at least 1".into()));
    }
    let target = SquareClass::from_rational(c)?;
    let mut radicands = Vec::with_capacity(factors.len());
    for f in factors {
        match f.degree() {
            1 => radicands.push(1),
            2 => radicands.push(quadratic_radicand(f).ok_or_else(|| Error::UnsupportedDegree(2))?),
            d => return Err(Error::UnsupportedDegree(d)),
        }
    }
    let unit = |d: i64| NormComponent { radicand: d, x: BigRational::one(), y: BigRational::zero() };
    if let Some(k) = radicands.iter().position(|&d| d == 1) {
        let mut components: Vec<NormComponent> = radicands.iter().map(|&d| unit(d)).collect();
        components[k].x = c.clone();
        return Ok(Some(NormSolution { components }));
    }
    let Some(classes) = search_classes(&radicands, &target, bound)? else {
        return Ok(None);
    };
    let mut components = classes
        .iter()
        .zip(&radicands)
        .map(|(s, &d)| element_of_norm(s, d))
        .collect::<Result<Vec<_>>>()?;
    let solution = NormSolution { components: components.clone() };
    // the product of norms is c times a rational square
    let ratio = solution.norm() / c;
    let (Some(a), Some(b)) = (is_perfect_square(ratio.numer()), is_perfect_square(ratio.denom())) else {
        return Err(Error::Inconsistent(format!("norm ratio {ratio} is not a square")));
    };
    components[0].scale(&BigRational::new(b, a));
    let solution = NormSolution { components };
    if solution.norm() != *c {
        return Err(Error::Inconsistent(format!("constructed solution has norm {}", solution.norm())));
    }
    Ok(Some(solution))
}

fn search_classes(radicands: &[i64], target: &SquareClass, bound: u64) -> Result<Option<Vec<SquareClass>>> {
    let ds: Vec<SquareClass> = radicands.iter().map(|&d| SquareClass::from_i64(d)).collect::<Result<_>>()?;
    let m = ds.len();
    let last = &ds[m - 1];
    if m == 1 {
        return Ok(is_local_global_norm(target, last).then(|| vec![target.clone()]));
    }
    let pool = classes_by_size(bound);
    let norms: Vec<Vec<&SquareClass>> =
        ds[..m - 1].iter().map(|d| pool.iter().filter(|s| is_local_global_norm(s, d)).collect()).collect();
    let mut join: HashMap<(Vec<u64>, u64), &SquareClass> = HashMap::new();
    for &s in &norms[m - 2] {
        join.entry(join_key(s, last)).or_insert(s);
    }
    let prefix_len = m - 2;
    if norms[..prefix_len].iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let mut idx = vec![0usize; prefix_len];
    loop {
        let prefix: Vec<SquareClass> = idx.iter().enumerate().map(|(k, &j)| norms[k][j].clone()).collect();
        let x = prefix.iter().fold(target.clone(), |acc, s| acc.mul(s));
        if let Some(&s) = join.get(&join_key(&x, last)) {
            let mut out = prefix;
            out.push(s.clone());
            out.push(x.mul(s));
            return Ok(Some(out));
        }
        // advance the odometer, last coordinate fastest
        let mut k = prefix_len;
        loop {
            if k == 0 {
                return Ok(None);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < norms[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Outcome of a successful spot check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpotCheckReport {
    pub primes: Vec<u64>,
}

/// Recomputes the profile entry of each of the first `budget` primes
/// `q ∤ N` from Frobenius orders: the pivot exponent is `log_p` of the order
/// of `q` in `Gal(K/Q)`, and `e_{i,q}` is `log_p` of the ratio of its orders
/// in `K·K_i` and in `K_i`.
pub fn spot_check_profile(ctx: &Context, profile: &SplittingProfile, budget: usize) -> Result<SpotCheckReport> {
    let modulus = profile
        .modulus()
        .ok_or_else(|| Error::WrongShape("profile has no modulus, so classes cannot be matched to primes".into()))?;
    if profile.factor_count() != ctx.factors().len() || profile.p() != ctx.p() {
        return Err(Error::WrongShape("profile does not belong to the context".into()));
    }
    let p = ctx.p();
    let composita: Vec<AbelianFieldQ> = ctx.factors().iter().map(|k| ctx.pivot().compositum(k)).collect();
    let log = |n: u64, q: u64| -> Result<u32> {
        arith::log_p(n, p).ok_or_else(|| Error::Mismatch { prime: q, detail: format!("{n} is not a power of {p}") })
    };
    let mut checked = Vec::with_capacity(budget);
    let mut q = 1u64;
    while checked.len() < budget {
        q += 1;
        if !arith::is_prime(q) || modulus % q == 0 {
            continue;
        }
        let v = Place::Prime(q);
        let pivot_exp = log(ctx.pivot().local_degree(v), q)?;
        let exponents = ctx
            .factors()
            .iter()
            .zip(&composita)
            .map(|(k, kk)| log(kk.local_degree(v) / k.local_degree(v), q))
            .collect::<Result<Vec<u32>>>()?;
        let entry = profile
            .entry_for_place(v)
            .ok_or_else(|| Error::Mismatch { prime: q, detail: "no class for this prime".into() })?;
        if entry.exponents != exponents || entry.pivot_exp != pivot_exp {
            return Err(Error::Mismatch {
                prime: q,
                detail: format!(
                    "class {} records {:?} with pivot exponent {}, direct computation gives {exponents:?} with {pivot_exp}",
                    entry.class, entry.exponents, entry.pivot_exp
                ),
            });
        }
        checked.push(q);
    }
    Ok(SpotCheckReport { primes: checked })
}
