//! Random instance generators shared by the integration tests.
#![allow(dead_code)]

use multinorm::arith;
use multinorm::AbelianFieldQ;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn quad(d: i64) -> AbelianFieldQ {
    AbelianFieldQ::quadratic(d).unwrap()
}

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Squarefree `D ≠ 0, 1` with `|D| ≤ bound`.
pub fn radicands(bound: i64) -> Vec<i64> {
    (-bound..=bound)
        .filter(|&d| d != 0 && d != 1 && arith::is_squarefree(d.unsigned_abs()))
        .collect()
}

/// `n` distinct quadratic fields with `|D| ≤ bound`.
pub fn random_quadratics(rng: &mut StdRng, n: usize, bound: i64) -> Vec<AbelianFieldQ> {
    radicands(bound).choose_multiple(rng, n).map(|&d| quad(d)).collect()
}

/// A random subfield of `Q(ζ_m)` for `m ≤ max_conductor` with degree in
/// `[2, max_degree]`, cut out by a few random units.
pub fn random_abelian(rng: &mut StdRng, max_conductor: u64, max_degree: u64, cyclic: bool) -> AbelianFieldQ {
    loop {
        let m = rng.gen_range(3..=max_conductor);
        let units: Vec<u64> = (1..m).filter(|&x| arith::gcd(x, m) == 1).collect();
        let k = rng.gen_range(0..=2);
        let gens: Vec<u64> = (0..k).map(|_| *units.choose(rng).unwrap()).collect();
        let f = AbelianFieldQ::new(m, &gens).unwrap();
        if (2..=max_degree).contains(&f.degree()) && (!cyclic || f.is_cyclic()) {
            return f;
        }
    }
}

/// Primes `q < bound` with `q ≡ 1 mod d`.
pub fn primes_congruent_one(d: u64, bound: u64) -> Vec<u64> {
    (2..bound).filter(|&q| arith::is_prime(q) && q % d == 1).collect()
}

/// A random rational of height at most `h`.
pub fn random_rational(rng: &mut StdRng, h: i64) -> BigRational {
    let num = rng.gen_range(1..=h) * if rng.gen_bool(0.5) { 1 } else { -1 };
    let den = rng.gen_range(1..=h);
    BigRational::new(num.into(), den.into())
}

/// Pairs of primes `q ≡ 1 mod 3` below `bound` that are cubes modulo each other.
pub fn mutual_cube_pairs(bound: u64) -> Vec<(u64, u64)> {
    let primes = primes_congruent_one(3, bound);
    let cube = |a: u64, m: u64| arith::pow_mod(a % m, (m - 1) / 3, m) == 1;
    let mut out = Vec::new();
    for (i, &a) in primes.iter().enumerate() {
        for &b in &primes[i + 1..] {
            if cube(a, b) && cube(b, a) {
                out.push((a, b));
            }
        }
    }
    out
}
