//! The combinatorial groups `G ⊇ D` and `Ш(K, K') = G/D`.
//!
//! Everything here works on exponent data alone: the ambient group
//! `⊕ Z/p^{e_i}Z` and, for each place class, the vector `(e_{i,v})`. A tuple
//! `a` lies in `G` when every class admits some `n ∈ Z/p^{e_1}Z` with
//! `n ≡ a_i mod p^{e_{i,v}}` for all `i`, which is the condition
//! `e_{i,v} ≤ δ(n, a_i)` unwound.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::abelian_q::{span_order, AbelianFieldQ, GaloisAmbient};
use crate::arith;
use crate::error::{Error, Result};
use crate::intmat::{self, Matrix};
use crate::splitting::{Context, SplittingProfile, DEFAULT_MODULUS_LIMIT};

/// Default bound on the size of the ambient tuple space `∏ p^{e_i}`.
pub const DEFAULT_AMBIENT_LIMIT: u64 = 10_000_000;

/// Size guards for the two enumerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Bound on `|(Z/NZ)^×|` for the ambient modulus N.
    pub modulus_limit: u64,
    /// Bound on `∏ p^{e_i}`.
    pub ambient_limit: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { modulus_limit: DEFAULT_MODULUS_LIMIT, ambient_limit: DEFAULT_AMBIENT_LIMIT }
    }
}

/// Largest `d ≤ min(s, t)` with `x ≡ y mod p^d`, for `x ∈ Z/p^s`, `y ∈ Z/p^t`.
pub fn delta(p: u64, x: u64, s: u32, y: u64, t: u32) -> u32 {
    let m = s.min(t);
    let mut d = 0;
    let mut q = 1u64;
    while d < m && x % (q * p) == y % (q * p) {
        d += 1;
        q *= p;
    }
    d
}

/// Whether `x ∈ Z/p^s` dominates `y ∈ Z/p^t`.
pub fn dominates(p: u64, x: u64, s: u32, y: u64, t: u32) -> bool {
    s >= t && x % p.pow(t) == y % p.pow(t)
}

fn e_max(exps: &[u32]) -> u32 {
    exps.iter().copied().max().unwrap_or(0)
}

/// `I_n(a) = { i : n ≽ a_i }` for `n ∈ Z/p^{e_1}`.
pub fn index_set(p: u64, exps: &[u32], a: &[u64], n: u64) -> BTreeSet<usize> {
    let e1 = e_max(exps);
    (0..exps.len()).filter(|&i| dominates(p, n, e1, a[i], exps[i])).collect()
}

/// The tuple `I(a) = (I_0(a), ..., I_{p^{e_1}-1}(a))`.
pub fn index_tuple(p: u64, exps: &[u32], a: &[u64]) -> Vec<BTreeSet<usize>> {
    (0..p.pow(e_max(exps))).map(|n| index_set(p, exps, a, n)).collect()
}

/// Checks the two coherence conditions, and that the sets cover all indices.
pub fn is_coherent(p: u64, exps: &[u32], tuple: &[BTreeSet<usize>]) -> bool {
    let len = p.pow(e_max(exps));
    if tuple.len() as u64 != len {
        return false;
    }
    let covered: BTreeSet<usize> = tuple.iter().flatten().copied().collect();
    if covered != (0..exps.len()).collect() {
        return false;
    }
    for (n1, set) in tuple.iter().enumerate() {
        for &i in set {
            let q = p.pow(exps[i]);
            for (n2, other) in tuple.iter().enumerate() {
                let same = n1 as u64 % q == n2 as u64 % q;
                if other.contains(&i) != same {
                    return false;
                }
            }
        }
    }
    true
}

/// Inverse of [`index_tuple`] on coherent tuples.
pub fn invert_index_tuple(p: u64, exps: &[u32], tuple: &[BTreeSet<usize>]) -> Result<Vec<u64>> {
    if !is_coherent(p, exps, tuple) {
        return Err(Error::NotCoherent(format!("{tuple:?}")));
    }
    Ok((0..exps.len())
        .map(|i| {
            let n = tuple.iter().position(|s| s.contains(&i)).expect("coherent tuples cover every index");
            n as u64 % p.pow(exps[i])
        })
        .collect())
}

/// The set of `n` with `n ≡ a_i mod p^{w_i}` for all `i`, as a residue class
/// `r mod p^W`, or `None` when the congruences are incompatible.
pub fn viable(p: u64, a: &[u64], w: &[u32]) -> Option<(u32, u64)> {
    let mut state = (0u32, 0u64);
    for (&ai, &wi) in a.iter().zip(w) {
        state = combine(p, state, ai, wi)?;
    }
    Some(state)
}

fn combine(p: u64, (big_w, r): (u32, u64), ai: u64, wi: u32) -> Option<(u32, u64)> {
    if wi <= big_w {
        (r % p.pow(wi) == ai % p.pow(wi)).then_some((big_w, r))
    } else {
        let m = p.pow(wi);
        (ai % p.pow(big_w) == r).then_some((wi, ai % m))
    }
}

/// Smallest and largest `n ∈ Z/p^{e_1}` for which a class with exponent
/// vector `w` lies in `Ω(I_n(a))`.
pub fn covering_range(p: u64, exps: &[u32], a: &[u64], w: &[u32]) -> Option<(u64, u64)> {
    let (big_w, r) = viable(p, a, w)?;
    let e1 = e_max(exps);
    Some((r, r + (p.pow(e1 - big_w) - 1) * p.pow(big_w)))
}

/// Some `n` with the class in `Ω(I_n(a))`, the smallest one.
pub fn omega_covers(profile: &SplittingProfile, a: &[u64], w: &[u32]) -> Option<u64> {
    covering_range(profile.p(), profile.exps(), a, w).map(|(lo, _)| lo)
}

/// Whether `a ∈ G`.
pub fn membership_g(profile: &SplittingProfile, a: &[u64]) -> bool {
    profile.classes().iter().all(|c| viable(profile.p(), a, &c.exponents).is_some())
}

/// Ambient data of a group `G/D` computation: `⊕ Z/p^{e_i}` and the
/// distinct class vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleSpace {
    pub p: u64,
    pub exps: Vec<u32>,
    pub vectors: Vec<Vec<u32>>,
}

impl TupleSpace {
    pub fn from_profile(profile: &SplittingProfile) -> Self {
        TupleSpace { p: profile.p(), exps: profile.exps().to_vec(), vectors: profile.distinct_vectors() }
    }

    /// The same data straight from a context, without listing residues.
    pub fn from_context(ctx: &Context) -> Self {
        TupleSpace { p: ctx.p(), exps: ctx.exps().to_vec(), vectors: ctx.distinct_vectors() }
    }

    /// The data of the `K_0`-context, `K_0` the subfield of index p in K.
    pub fn descend(&self) -> Self {
        let dec = |v: &[u32]| v.iter().map(|&x| x.saturating_sub(1)).collect::<Vec<u32>>();
        let vectors: BTreeSet<Vec<u32>> = self.vectors.iter().map(|v| dec(v)).collect();
        TupleSpace { p: self.p, exps: dec(&self.exps), vectors: vectors.into_iter().collect() }
    }

    /// The data defining `G(K/K_0, K')`: exponents `r_i = min(1, e_i)`.
    pub fn relative(&self) -> Self {
        let cut = |v: &[u32]| v.iter().map(|&x| x.min(1)).collect::<Vec<u32>>();
        let vectors: BTreeSet<Vec<u32>> = self.vectors.iter().map(|v| cut(v)).collect();
        TupleSpace { p: self.p, exps: cut(&self.exps), vectors: vectors.into_iter().collect() }
    }

    pub fn moduli(&self) -> Vec<u64> {
        self.exps.iter().map(|&e| self.p.pow(e)).collect()
    }

    pub fn ambient_size(&self) -> u128 {
        self.exps.iter().map(|&e| u128::from(self.p).pow(e)).product()
    }

    pub fn contains(&self, a: &[u64]) -> bool {
        self.vectors.iter().all(|w| viable(self.p, a, w).is_some())
    }

    fn decode(&self, mut idx: u64, moduli: &[u64]) -> Vec<u64> {
        moduli
            .iter()
            .map(|&m| {
                let x = idx % m;
                idx /= m;
                x
            })
            .collect()
    }

    fn encode(&self, a: &[u64], moduli: &[u64]) -> u64 {
        a.iter().zip(moduli).rev().fold(0, |acc, (&x, &m)| acc * m + x)
    }

    /// All members of G, as a membership table over mixed-radix indices.
    fn enumerate(&self, limit: u64) -> Result<Vec<bool>> {
        let size = self.ambient_size();
        if size > u128::from(limit) {
            return Err(Error::AmbientTooLarge { size, limit });
        }
        let moduli = self.moduli();
        let mut table = vec![false; size as usize];
        let mut a = vec![0u64; self.exps.len()];
        let states = vec![(0u32, 0u64); self.vectors.len()];
        self.dfs(0, &moduli, &mut a, &states, &mut table);
        Ok(table)
    }

    fn dfs(&self, i: usize, moduli: &[u64], a: &mut Vec<u64>, states: &[(u32, u64)], table: &mut [bool]) {
        if i == self.exps.len() {
            table[self.encode(a, moduli) as usize] = true;
            return;
        }
        'values: for x in 0..moduli[i] {
            let mut next = Vec::with_capacity(states.len());
            for (w, &st) in self.vectors.iter().zip(states) {
                match combine(self.p, st, x, w[i]) {
                    Some(s) => next.push(s),
                    None => continue 'values,
                }
            }
            a[i] = x;
            self.dfs(i + 1, moduli, a, &next, table);
        }
    }

    /// Computes `G`, checks that it is a subgroup containing `D`, and
    /// returns `G/D`.
    pub fn sha(&self, limit: u64) -> Result<ShaGroup> {
        if self.exps.iter().all(|&e| e == 0) {
            return Ok(ShaGroup::trivial(self.p, self.exps.clone(), 1));
        }
        let moduli = self.moduli();
        let table = self.enumerate(limit)?;
        let members: Vec<u64> = (0..table.len() as u64).filter(|&k| table[k as usize]).collect();
        let add = |x: u64, y: &[u64]| {
            let xs = self.decode(x, &moduli);
            let sum: Vec<u64> = xs.iter().zip(y).zip(&moduli).map(|((&a, &b), &m)| (a + b) % m).collect();
            self.encode(&sum, &moduli)
        };
        let mut in_span = vec![false; table.len()];
        in_span[0] = true;
        let mut span = vec![0u64];
        let mut gens: Vec<Vec<u64>> = Vec::new();
        for &k in &members {
            if in_span[k as usize] {
                continue;
            }
            let g = self.decode(k, &moduli);
            let base = span.clone();
            let mut shift = k;
            while !in_span[shift as usize] {
                for &s in &base {
                    let t = add(s, &self.decode(shift, &moduli));
                    in_span[t as usize] = true;
                    span.push(t);
                }
                shift = add(shift, &g);
            }
            gens.push(g);
        }
        if span.len() != members.len() || span.iter().any(|&s| !table[s as usize]) {
            return Err(Error::Inconsistent("the enumerated set G is not a subgroup".into()));
        }
        let diagonal: Vec<u64> = moduli.iter().map(|&m| 1 % m).collect();
        if !table[self.encode(&diagonal, &moduli) as usize] {
            return Err(Error::Inconsistent("the diagonal is not in G".into()));
        }
        for &x in &members {
            for g in &gens {
                if !table[add(x, g) as usize] {
                    return Err(Error::Inconsistent("G is not closed under addition".into()));
                }
            }
        }
        Ok(ShaGroup::from_generators(self.p, self.exps.clone(), gens, members.len() as u64))
    }
}

/// `Ш = G/D` for one prime-power context, with explicit coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShaGroup {
    p: u64,
    exps: Vec<u32>,
    g_generators: Vec<Vec<u64>>,
    g_order: u64,
    invariant_factors: Vec<u64>,
    generators: Vec<Vec<u64>>,
    basis: Matrix,
    transform: Matrix,
}

fn solve_upper(basis: &Matrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut rest = v.to_vec();
    let mut x = Vec::with_capacity(basis.len());
    for (i, row) in basis.iter().enumerate() {
        let (q, r) = rest[i].div_rem(&row[i]);
        if !r.is_zero() {
            return None;
        }
        for (t, b) in rest.iter_mut().zip(row) {
            *t -= &q * b;
        }
        x.push(q);
    }
    rest.iter().all(Zero::is_zero).then_some(x)
}

impl ShaGroup {
    fn trivial(p: u64, exps: Vec<u32>, g_order: u64) -> Self {
        ShaGroup {
            p,
            exps,
            g_generators: Vec::new(),
            g_order,
            invariant_factors: Vec::new(),
            generators: Vec::new(),
            basis: Matrix::new(),
            transform: Matrix::new(),
        }
    }

    fn from_generators(p: u64, exps: Vec<u32>, g_generators: Vec<Vec<u64>>, g_order: u64) -> Self {
        let m = exps.len();
        let moduli: Vec<u64> = exps.iter().map(|&e| p.pow(e)).collect();
        let relations: Matrix = (0..m)
            .map(|i| (0..m).map(|j| BigInt::from(if i == j { moduli[i] } else { 0 })).collect())
            .collect();
        let mut rows = intmat::from_u64_rows(&g_generators);
        rows.extend(relations.iter().cloned());
        let basis = intmat::hermite(&rows, m);
        let mut d_rows = vec![vec![BigInt::from(1u8); m]];
        d_rows.extend(relations);
        let c: Matrix = d_rows
            .iter()
            .map(|v| solve_upper(&basis, v).expect("D lies in G"))
            .collect();
        let smith = intmat::smith(&c, m);
        let mut invariant_factors = Vec::new();
        let mut transform = vec![Vec::new(); m];
        let mut generators = Vec::new();
        for (k, d) in smith.diagonal.iter().enumerate() {
            let d = d.to_u64().expect("invariant factor fits in u64");
            if d == 1 {
                continue;
            }
            invariant_factors.push(d);
            for (j, row) in transform.iter_mut().enumerate() {
                row.push(smith.v[j][k].clone());
            }
            let rep = intmat::mat_mul(&vec![smith.v_inv[k].clone()], &basis);
            generators.push(rep[0].iter().zip(&moduli).map(|(x, &q)| arith::bigint_mod(x, q)).collect());
        }
        ShaGroup { p, exps, g_generators, g_order, invariant_factors, generators, basis, transform }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ambient_exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    /// Coset representatives in G of the standard generators of `G/D`.
    pub fn generators(&self) -> &[Vec<u64>] {
        &self.generators
    }

    /// A generating set of G itself.
    pub fn g_generators(&self) -> &[Vec<u64>] {
        &self.g_generators
    }

    pub fn g_order(&self) -> u64 {
        self.g_order
    }

    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn factor_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.exps.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(self.exps[i]));
        order
    }

    fn lift(&self, a: &[u64]) -> Option<Vec<BigInt>> {
        if self.basis.is_empty() {
            return Some(Vec::new());
        }
        let v: Vec<BigInt> = a.iter().map(|&x| BigInt::from(x)).collect();
        solve_upper(&self.basis, &v)
    }

    /// Whether a tuple lies in G (by the lattice of G, not the profile).
    pub fn in_g(&self, a: &[u64]) -> bool {
        if self.exps.iter().all(|&e| e == 0) {
            return true;
        }
        self.lift(a).is_some()
    }

    /// Coordinates of the class of `a ∈ G` in `⊕ Z/d_k`.
    pub fn coords(&self, a: &[u64]) -> Option<Vec<u64>> {
        let y = self.lift(a)?;
        Some(
            self.invariant_factors
                .iter()
                .enumerate()
                .map(|(k, &d)| {
                    let s = y.iter().zip(&self.transform).fold(BigInt::zero(), |acc, (yj, row)| acc + yj * &row[k]);
                    arith::bigint_mod(&s, d)
                })
                .collect(),
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("group serializes")
    }
}

impl Serialize for ShaGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde_json::json!({
            "p": self.p,
            "invariant_factors": self.invariant_factors,
            "generators": self.generators,
            "ambient_exponents": self.exps,
            "factor_order": self.factor_order(),
        })
        .serialize(s)
    }
}

/// `Ш(K, K')` for the context of a profile.
pub fn compute_sha_prime_power(profile: &SplittingProfile, ambient_limit: u64) -> Result<ShaGroup> {
    TupleSpace::from_profile(profile).sha(ambient_limit)
}

/// `Ш(K_0, K')` from the profile of K, or `None` when `e = 1`.
pub fn compute_sha_descended(profile: &SplittingProfile, ambient_limit: u64) -> Result<Option<ShaGroup>> {
    if profile.e() == 1 {
        return Ok(None);
    }
    TupleSpace::from_profile(profile).descend().sha(ambient_limit).map(Some)
}

/// `Ш(K/K_0, K')`.
pub fn compute_sha_relative(profile: &SplittingProfile, ambient_limit: u64) -> Result<ShaGroup> {
    TupleSpace::from_profile(profile).relative().sha(ambient_limit)
}

/// `F(b)_i = p^{e_i - f_i} b_i`.
pub fn f_map(p: u64, e: &[u32], f: &[u32], b: &[u64]) -> Vec<u64> {
    b.iter()
        .zip(e.iter().zip(f))
        .map(|(&x, (&ei, &fi))| x * p.pow(ei - fi) % p.pow(ei))
        .collect()
}

/// `π(a)_i = a_i mod p^{r_i}`.
pub fn pi_map(p: u64, r: &[u32], a: &[u64]) -> Vec<u64> {
    a.iter().zip(r).map(|(&x, &ri)| x % p.pow(ri)).collect()
}

/// Outcome of checking `0 → Ш(K_0,K') → Ш(K,K') → Ш(K/K_0,K') → 0`.
#[derive(Debug, Clone)]
pub struct ExactSequenceReport {
    pub sha: ShaGroup,
    pub sha0: Option<ShaGroup>,
    pub relative: ShaGroup,
    pub f_maps_g0_into_g: bool,
    pub f_injective: bool,
    pub pi_surjective: bool,
    pub image_is_kernel: bool,
    pub cardinality_identity: bool,
}

impl ExactSequenceReport {
    pub fn holds(&self) -> bool {
        self.f_maps_g0_into_g && self.f_injective && self.pi_surjective && self.image_is_kernel && self.cardinality_identity
    }
}

/// Checks `0 → Ш_0 → Ш → Ш_rel → 0` on the data of a profile.
pub fn check_exact_sequence(profile: &SplittingProfile, ambient_limit: u64) -> Result<ExactSequenceReport> {
    exact_sequence(TupleSpace::from_profile(profile), profile.e(), ambient_limit)
}

/// Checks the exact sequence on the data of a context.
pub fn check_exact_sequence_context(ctx: &Context, ambient_limit: u64) -> Result<ExactSequenceReport> {
    exact_sequence(TupleSpace::from_context(ctx), ctx.e(), ambient_limit)
}

fn exact_sequence(space: TupleSpace, e: u32, ambient_limit: u64) -> Result<ExactSequenceReport> {
    let sha = space.sha(ambient_limit)?;
    let rel_space = space.relative();
    let relative = rel_space.sha(ambient_limit)?;
    let p = space.p;
    let sha_moduli = sha.invariant_factors().to_vec();
    let rel_moduli = relative.invariant_factors().to_vec();
    let to_rel = |a: &[u64]| relative.coords(&pi_map(p, &rel_space.exps, a)).expect("π maps G into the relative G");
    let pi_images: Vec<Vec<u64>> = sha.generators().iter().map(|a| to_rel(a)).collect();
    let pi_surjective = span_order(&pi_images, &rel_moduli) == relative.order();
    let (sha0, f_maps_g0_into_g, f_injective, image_in_kernel, order0) = if e == 1 {
        (None, true, true, true, 1)
    } else {
        let sub = space.descend();
        let sha0 = sub.sha(ambient_limit)?;
        let lift = |b: &[u64]| f_map(p, &space.exps, &sub.exps, b);
        let f_maps = sha0.g_generators().iter().all(|b| sha.in_g(&lift(b)));
        let images: Vec<Vec<u64>> = sha0
            .generators()
            .iter()
            .map(|b| sha.coords(&lift(b)).expect("F maps G_0 into G"))
            .collect();
        let injective = span_order(&images, &sha_moduli) == sha0.order();
        let in_kernel = sha0.generators().iter().all(|b| to_rel(&lift(b)).iter().all(|&x| x == 0));
        let order0 = sha0.order();
        (Some(sha0), f_maps, injective, in_kernel, order0)
    };
    let cardinality_identity = sha.order() == order0 * relative.order();
    Ok(ExactSequenceReport {
        image_is_kernel: image_in_kernel && f_injective && pi_surjective && cardinality_identity,
        sha,
        sha0,
        relative,
        f_maps_g0_into_g,
        f_injective,
        pi_surjective,
        cardinality_identity,
    })
}

/// `G` for a prime-degree pivot rendered as labelled partitions
/// `(J_0, ..., J_{p-1})` of `J = { i : e_i = 1 }`, one per element of G.
pub fn partition_view(profile: &SplittingProfile, ambient_limit: u64) -> Result<Vec<Vec<Vec<usize>>>> {
    if profile.e() != 1 {
        return Err(Error::WrongExponent(profile.e()));
    }
    let p = profile.p();
    let j: Vec<usize> = (0..profile.factor_count()).filter(|&i| profile.exps()[i] == 1).collect();
    let size = u128::from(p).pow(j.len() as u32);
    if size > u128::from(ambient_limit) {
        return Err(Error::AmbientTooLarge { size, limit: ambient_limit });
    }
    let vectors = profile.distinct_vectors();
    let mut out = Vec::new();
    for code in 0..size as u64 {
        let mut blocks = vec![Vec::new(); p as usize];
        let mut c = code;
        for &i in &j {
            blocks[(c % p) as usize].push(i);
            c /= p;
        }
        // each class needs a block J_n outside of which every factor is split
        let covers = vectors.iter().all(|w| {
            blocks
                .iter()
                .enumerate()
                .any(|(n, _)| j.iter().all(|&i| blocks[n].contains(&i) || w[i] == 0))
        });
        if covers {
            out.push(blocks);
        }
    }
    Ok(out)
}

/// One prime component of `Ш(L)`.
#[derive(Debug, Clone)]
pub struct ShaComponent {
    pub p: u64,
    pub context: Context,
    pub group: ShaGroup,
}

impl ShaComponent {
    /// The splitting profile of the component, listing every unit residue.
    pub fn profile(&self) -> Result<SplittingProfile> {
        self.context.build_profile()
    }
}

/// `Ш(L) = ⊕_p Ш(K(p), K')` for a chosen cyclic pivot.
#[derive(Debug, Clone)]
pub struct ShaDecomposition {
    pub pivot: usize,
    pub factors: Vec<AbelianFieldQ>,
    pub components: Vec<ShaComponent>,
    pub ambient: Arc<GaloisAmbient>,
}

impl ShaDecomposition {
    pub fn order(&self) -> u64 {
        self.components.iter().map(|c| c.group.order()).product()
    }

    pub fn is_trivial(&self) -> bool {
        self.components.iter().all(|c| c.group.is_trivial())
    }

    /// Elementary divisors of `Ш(L)`, ascending.
    pub fn elementary_divisors(&self) -> Vec<u64> {
        let mut out: Vec<u64> = self.components.iter().flat_map(|c| c.group.invariant_factors().to_vec()).collect();
        out.sort_unstable();
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let components: Vec<serde_json::Value> = self.components.iter().map(|c| c.group.to_json()).collect();
        serde_json::json!({
            "pivot": self.pivot,
            "order": self.order(),
            "elementary_divisors": self.elementary_divisors(),
            "components": components,
        })
    }
}

/// Index of the first cyclic factor.
pub fn find_cyclic_pivot(factors: &[AbelianFieldQ]) -> Result<usize> {
    factors.iter().position(AbelianFieldQ::is_cyclic).ok_or(Error::NoCyclicFactor(None))
}

/// Fields of the shared ambient: all factors, then `K(p)` for each `p`.
pub(crate) fn pivot_parts(pivot: &AbelianFieldQ) -> Result<Vec<(u64, AbelianFieldQ)>> {
    arith::factor(pivot.degree())
        .into_iter()
        .map(|(p, _)| Ok((p, pivot.p_part(p)?)))
        .collect()
}

/// Builds the prime-power contexts of `L` around a pivot, sharing one ambient.
pub fn contexts(factors: &[AbelianFieldQ], pivot: usize, limits: &Limits) -> Result<(Arc<GaloisAmbient>, Vec<Context>)> {
    if pivot >= factors.len() {
        return Err(Error::BadPivot { index: pivot, len: factors.len() });
    }
    if !factors[pivot].is_cyclic() {
        return Err(Error::NoCyclicFactor(Some(pivot)));
    }
    let parts = pivot_parts(&factors[pivot])?;
    let mut fields = factors.to_vec();
    fields.extend(parts.iter().map(|(_, k)| k.clone()));
    let ambient = Arc::new(GaloisAmbient::new(&fields, limits.modulus_limit)?);
    let others: Vec<usize> = (0..factors.len()).filter(|&i| i != pivot).collect();
    let contexts = parts
        .into_iter()
        .enumerate()
        .map(|(k, (_, kp))| {
            Context::with_ambient(
                kp,
                others.iter().map(|&i| factors[i].clone()).collect(),
                ambient.clone(),
                factors.len() + k,
                others.clone(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((ambient, contexts))
}

/// `Ш(L)` through the prime-power contexts of a cyclic pivot.
pub fn compute_sha(factors: &[AbelianFieldQ], pivot: usize, limits: &Limits) -> Result<ShaDecomposition> {
    let (ambient, contexts) = contexts(factors, pivot, limits)?;
    let components = contexts
        .into_iter()
        .map(|context| {
            let group = TupleSpace::from_context(&context).sha(limits.ambient_limit)?;
            Ok(ShaComponent { p: context.p(), context, group })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ShaDecomposition { pivot, factors: factors.to_vec(), components, ambient })
}
