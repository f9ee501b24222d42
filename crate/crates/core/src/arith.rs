//! Machine-word modular arithmetic, factorization and discrete logarithms.
//!
//! Moduli handled here are conductors and lcm's of conductors, which fit in
//! a `u64`; products are taken through `u128`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Reduces a (possibly negative, arbitrarily large) integer modulo `m`.
pub fn bigint_mod(x: &BigInt, m: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(m));
    r.to_u64().expect("residue fits in u64")
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut r = 1u64;
        let mut ys = 2u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn factor_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Prime factorization as sorted `(prime, exponent)` pairs; `factor(1)` is empty.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "factor(0)");
    let mut primes = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n % p == 0 {
            primes.push(p);
            n /= p;
        }
    }
    factor_into(n, &mut primes);
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, k)) if *q == p => *k += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factor(n)
        .into_iter()
        .map(|(p, k)| (p - 1) * p.pow(k - 1))
        .product()
}

/// p-adic valuation of a positive integer.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Exact base-`p` logarithm of a power of `p`.
pub fn log_p(n: u64, p: u64) -> Option<u32> {
    let v = valuation(n, p);
    (p.checked_pow(v) == Some(n)).then_some(v)
}

/// Combines `x = r_i (mod m_i)` for pairwise coprime moduli.
pub fn crt(parts: &[(u64, u64)]) -> u64 {
    let modulus: u64 = parts.iter().map(|&(_, m)| m).product();
    let mut x = 0u64;
    for &(r, m) in parts {
        if m == 1 {
            continue;
        }
        let rest = modulus / m;
        let inv = inv_mod(rest % m, m).expect("moduli pairwise coprime");
        let term = mul_mod(mul_mod(r % m, inv, m), rest, modulus);
        x = (x + term) % modulus;
    }
    x % modulus.max(1)
}

/// Multiplicative order of `a` modulo `m`, given the factorization of a
/// multiple of it.
pub fn order_mod(a: u64, m: u64, multiple: u64, multiple_factors: &[(u64, u32)]) -> u64 {
    let mut ord = multiple;
    for &(p, _) in multiple_factors {
        while ord % p == 0 && pow_mod(a, ord / p, m) == 1 % m {
            ord /= p;
        }
    }
    ord
}

/// Smallest generator of `(Z/p^k)^×` for an odd prime `p`.
pub fn primitive_root(p: u64, k: u32) -> u64 {
    debug_assert!(p % 2 == 1 && is_prime(p));
    let q = p.pow(k);
    let phi = (p - 1) * p.pow(k - 1);
    let mut factors = factor(p - 1);
    if k > 1 {
        factors.push((p, k - 1));
    }
    (2..q)
        .find(|&g| g % p != 0 && order_mod(g, q, phi, &factors) == phi)
        .expect("odd prime powers have primitive roots")
}

fn bsgs(g: u64, h: u64, order: u64, m: u64) -> Option<u64> {
    let step = (order as f64).sqrt().ceil() as u64 + 1;
    let mut table = std::collections::HashMap::with_capacity(step as usize);
    let mut cur = 1 % m;
    for j in 0..step {
        table.entry(cur).or_insert(j);
        cur = mul_mod(cur, g, m);
    }
    let g_inv_step = pow_mod(inv_mod(g, m)?, step, m);
    let mut gamma = h % m;
    for i in 0..step {
        if let Some(&j) = table.get(&gamma) {
            let x = i * step + j;
            if x < order {
                return Some(x);
            }
        }
        gamma = mul_mod(gamma, g_inv_step, m);
    }
    None
}

/// Discrete logarithm of `h` to base `g` in a cyclic group of the given order
/// inside `(Z/m)^×` (Pohlig-Hellman over baby-step giant-step).
pub fn discrete_log(g: u64, h: u64, order: u64, order_factors: &[(u64, u32)], m: u64) -> Option<u64> {
    if order == 1 {
        return (h % m == 1 % m).then_some(0);
    }
    let mut residues = Vec::with_capacity(order_factors.len());
    for &(p, k) in order_factors {
        let pk = p.pow(k);
        let cofactor = order / pk;
        let gi = pow_mod(g, cofactor, m);
        let hi = pow_mod(h, cofactor, m);
        // digits base p
        let gamma = pow_mod(gi, pk / p, m);
        let mut x = 0u64;
        let mut pj = 1u64;
        for j in 0..k {
            let t = pow_mod(mul_mod(pow_mod(inv_mod(gi, m)?, x, m), hi, m), pk / p / pj, m);
            let d = bsgs(gamma, t, p, m)?;
            x += d * pj;
            if j + 1 < k {
                pj *= p;
            }
        }
        residues.push((x % pk, pk));
    }
    let x = crt(&residues);
    (pow_mod(g, x, m) == h % m).then_some(x)
}

/// Kronecker symbol `(a/n)`.
pub fn kronecker(a: i64, n: u64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut n = n;
    let mut result = 1i32;
    let a_mod8 = a.rem_euclid(8);
    while n % 2 == 0 {
        n /= 2;
        match a_mod8 {
            1 | 7 => {}
            3 | 5 => result = -result,
            _ => return 0,
        }
    }
    // Jacobi (a/n) for odd n
    let mut a = a.rem_euclid(n as i64) as u64;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

pub fn is_squarefree(n: u64) -> bool {
    n > 0 && factor(n).iter().all(|&(_, k)| k == 1)
}

fn big_is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime(small);
    }
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn big_pollard(n: &BigUint) -> BigUint {
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = BigUint::one();
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            d = diff.gcd(n);
        }
        if &d != n {
            return d;
        }
        c += 1u32;
    }
}

fn big_factor_into(n: BigUint, out: &mut Vec<u64>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if let Some(small) = n.to_u64() {
        factor(small).into_iter().for_each(|(p, k)| out.extend(std::iter::repeat_n(p, k as usize)));
        return Ok(());
    }
    if big_is_probable_prime(&n) {
        return Err(Error::Unsupported(format!("prime factor {n} exceeds 64 bits")));
    }
    let d = big_pollard(&n);
    let rest = &n / &d;
    big_factor_into(d, out)?;
    big_factor_into(rest, out)
}

/// Factorization of a nonzero big integer's absolute value. Prime factors
/// must fit in 64 bits.
pub fn factor_big(n: &BigUint) -> Result<Vec<(u64, u32)>> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    if let Some(small) = n.to_u64() {
        return Ok(factor(small));
    }
    let mut n = n.clone();
    let mut primes = Vec::new();
    let mut p = 2u64;
    while p < 1000 {
        let bp = BigUint::from(p);
        while (&n % &bp).is_zero() {
            primes.push(p);
            n /= &bp;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    big_factor_into(n, &mut primes)?;
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, k)) if *q == p => *k += 1,
            _ => out.push((p, 1)),
        }
    }
    Ok(out)
}
