//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

mod common;

use std::time::{Duration, Instant};

use multinorm::brauer::{invariant_ledger, rationals_by_height};
use multinorm::cyclic_products::{degree_p_subfields, ExampleMap};
use multinorm::sha_core::check_exact_sequence_context;
use multinorm::splitting::DEFAULT_MODULUS_LIMIT;
use multinorm::{
    compute_sha, norm_solution_search, sha_prime_case, spot_check_profile, AbelianFieldQ, Context,
    Limits, Multinorm, Verdict,
};
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use common::{mutual_cube_pairs, primes_congruent_one, q, quad, radicands, random_abelian, random_quadratics, random_rational, rng};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed <= limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn example() -> Vec<AbelianFieldQ> {
    vec![quad(13), quad(17), quad(221)]
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let sha = compute_sha(&example(), 0, &Limits::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(sha.elementary_divisors() == vec![2], || format!("Ш = {:?}", sha.elementary_divisors()))?;
    within(elapsed, Duration::from_secs(1))?;
    Ok("Ш ≅ Z/2".into())
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let mut rng = rng(2);
    for k in 0..25 {
        let n = rng.gen_range(4..=6);
        let l = random_quadratics(&mut rng, n, 100);
        let sha = compute_sha(&l, 0, &Limits::default()).map_err(|e| format!("set {k}: {e}"))?;
        let names: Vec<String> = l.iter().map(ToString::to_string).collect();
        ensure(sha.is_trivial(), || format!("set {k} {names:?}: Ш = {:?}", sha.elementary_divisors()))?;
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok("25 sets of 4 to 6 quadratic fields, all Ш = 0".into())
}

fn criterion_3() -> Check {
    let mut rng = rng(3);
    for k in 0..25 {
        let pivot = random_abelian(&mut rng, 200, 9, true);
        let other = random_abelian(&mut rng, 200, 9, false);
        let sha = compute_sha(&[pivot.clone(), other.clone()], 0, &Limits::default())
            .map_err(|e| format!("pair {k}: {e}"))?;
        ensure(sha.is_trivial(), || format!("pair {k} ({pivot}, {other}): Ш = {:?}", sha.elementary_divisors()))?;
    }
    Ok("25 two-factor algebras, all Ш = 0".into())
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let l: Vec<AbelianFieldQ> = [25, 15, 9].iter().map(|&n| AbelianFieldQ::cyclotomic(n).unwrap()).collect();
    for pivot in [0, 2] {
        let sha = compute_sha(&l, pivot, &Limits::default()).map_err(|e| e.to_string())?;
        ensure(sha.is_trivial(), || format!("pivot {pivot}: Ш = {:?}", sha.elementary_divisors()))?;
    }
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok("Ш = 0 through the ζ_25 and ζ_9 pivots".into())
}

/// A random field whose degree is a power of p up to p^3, inside Q(ζ_q) or a
/// compositum of two such.
fn random_p_field(rng: &mut impl Rng, p: u64, primes: &[u64]) -> AbelianFieldQ {
    let pick = |rng: &mut dyn rand::RngCore| {
        let qq = *primes.choose(rng).unwrap();
        let max = (1..=3).filter(|&k| (qq - 1) % p.pow(k) == 0).max().unwrap();
        let d = p.pow(rand::Rng::gen_range(rng, 1..=max));
        AbelianFieldQ::cyclotomic_subfield(qq, d).unwrap()
    };
    let f = pick(rng);
    if rng.gen_bool(0.3) {
        f.compositum(&pick(rng))
    } else {
        f
    }
}

fn criterion_5() -> Check {
    let mut rng = rng(5);
    let mut nontrivial = 0;
    let mut done = 0;
    while done < 20 {
        let p = if rng.gen_bool(0.5) { 2 } else { 3 };
        let e = rng.gen_range(1..=3u32);
        let pool: Vec<u64> = primes_congruent_one(p, 120);
        let pivot_primes = primes_congruent_one(p.pow(e), 200);
        let q0 = *pivot_primes.choose(&mut rng).unwrap();
        let pivot = AbelianFieldQ::cyclotomic_subfield(q0, p.pow(e)).unwrap();
        let m = rng.gen_range(1..=4);
        let factors: Vec<AbelianFieldQ> = if rng.gen_bool(0.5) {
            let mut primes: Vec<u64> = pool.choose_multiple(&mut rng, 2).copied().collect();
            primes.push(q0);
            (0..m).map(|_| random_p_field(&mut rng, p, &primes)).collect()
        } else {
            // subfields of K·K' cut out by random characters of its group
            let q1 = *pivot_primes.iter().filter(|&&x| x != q0).collect::<Vec<_>>().choose(&mut rng).unwrap();
            let big = pivot.compositum(&AbelianFieldQ::cyclotomic_subfield(*q1, p.pow(e)).unwrap());
            let d = p.pow(e);
            (0..m)
                .map(|_| big.character_kernel_field(&[rng.gen_range(0..d), rng.gen_range(0..d)], d).unwrap())
                .collect()
        };
        let Ok(ctx) = Context::new(pivot.clone(), factors, DEFAULT_MODULUS_LIMIT) else { continue };
        let size: u64 = ctx.exps().iter().map(|&k| p.pow(k)).product();
        if size > 100_000 {
            continue;
        }
        let report = check_exact_sequence_context(&ctx, 100_000).map_err(|err| format!("context {done}: {err}"))?;
        ensure(report.holds(), || format!("context {done} (p = {p}, e = {e}, exps {:?}): {report:?}", ctx.exps()))?;
        if !report.sha.is_trivial() {
            nontrivial += 1;
        }
        done += 1;
    }
    Ok(format!("20 contexts, {nontrivial} with Ш ≠ 0"))
}

fn criterion_6() -> Check {
    let mut rng = rng(6);
    let mut entries = 0;
    for k in 0..100 {
        let field = random_abelian(&mut rng, 500, 16, true);
        let c = random_rational(&mut rng, 10_000);
        let ledger = invariant_ledger(&field, &c).map_err(|e| format!("ledger {k} ({field}, {c}): {e}"))?;
        ensure(ledger.sum().is_zero(), || format!("ledger {k} ({field}, {c}) sums to {}", ledger.sum()))?;
        entries += ledger.entries.values().filter(|v| !v.is_zero()).count();
    }
    Ok(format!("100 ledgers sum to 0, {entries} nonzero local invariants"))
}

fn criterion_7() -> Check {
    let start = Instant::now();
    let l = example();
    let mn = Multinorm::new(&l, Some(0), &Limits::default()).map_err(|e| e.to_string())?;
    let knot = mn.knot_group(60).map_err(|e| e.to_string())?;
    let (rep, _) = knot.representatives.first().ok_or("knot scan found no representative")?;
    let c = multinorm::parse_rational(rep).map_err(|e| e.to_string())?;
    let verdict = mn.decide(&c).map_err(|e| e.to_string())?;
    ensure(matches!(verdict, Verdict::Obstructed(_)), || format!("c = {c} gives {verdict}"))?;
    let found = norm_solution_search(&l, &c, 10_000).map_err(|e| e.to_string())?;
    ensure(found.is_none(), || format!("a solution exists for obstructed c = {c}"))?;
    let mut rng = rng(7);
    let mut corroborated = 0;
    for k in 0..20 {
        let mut c = q(1);
        for f in &l {
            let d = multinorm::oracle::quadratic_radicand(f).unwrap();
            let (x, y) = loop {
                let (x, y) = (rng.gen_range(-20i64..=20), rng.gen_range(-20i64..=20));
                if x * x != d * y * y {
                    break (x, y);
                }
            };
            c *= q(x * x - d * y * y);
        }
        let verdict = mn.decide(&c).map_err(|e| format!("norm {k} ({c}): {e}"))?;
        ensure(verdict == Verdict::Solvable, || format!("constructed norm {c} gives {verdict}"))?;
        let alpha = mn.alpha(&c).map_err(|e| e.to_string())?;
        ensure(alpha.is_zero(), || format!("α_c ≠ 0 for the constructed norm {c}"))?;
        if let Some(t) = norm_solution_search(&l, &c, 200).map_err(|e| e.to_string())? {
            ensure(t.norm() == c, || format!("search returned a wrong solution for {c}"))?;
            corroborated += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!("c = {c} obstructed with no solution up to 10^4, 20 norms solvable ({corroborated} re-solved by search)"))
}

fn criterion_8() -> Check {
    let field = quad(13).compositum(&quad(17));
    let subfields = example();
    let mn = Multinorm::new(&subfields, Some(2), &Limits::default()).map_err(|e| e.to_string())?;
    let map = ExampleMap::new(&field, &subfields).map_err(|e| e.to_string())?;
    let (mut local, mut solvable) = (0, 0);
    for c in rationals_by_height(200) {
        let verdict = mn.decide(&c).map_err(|e| format!("{c}: {e}"))?;
        if matches!(verdict, Verdict::NoLocalSolution(_)) {
            continue;
        }
        local += 1;
        let f = map.eval(&c).map_err(|e| format!("{c}: {e}"))?;
        let vanishes = f.iter().all(|&x| x == 0);
        ensure(vanishes == verdict.is_solvable(), || format!("c = {c}: f = {f:?} but the verdict is {verdict}"))?;
        if vanishes {
            solvable += 1;
        }
    }
    Ok(format!("{local} locally solvable c of height ≤ 200 agree, {solvable} solvable"))
}

fn criterion_9() -> Check {
    let mut rng = rng(9);
    let cube_pairs = mutual_cube_pairs(400);
    let cube_primes = primes_congruent_one(3, 100);
    let ds = radicands(60);
    let mut nonzero = 0;
    for k in 0..30 {
        let p = if k % 2 == 0 { 2 } else { 3 };
        let field = if p == 2 {
            let (a, b) = loop {
                let pair: Vec<i64> = ds.choose_multiple(&mut rng, 2).copied().collect();
                if quad(pair[0]).compositum(&quad(pair[1])).degree() == 4 {
                    break (pair[0], pair[1]);
                }
            };
            quad(a).compositum(&quad(b))
        } else if rng.gen_bool(0.6) {
            let &(a, b) = cube_pairs.choose(&mut rng).ok_or("no mutual cube pair")?;
            AbelianFieldQ::cyclotomic_subfield(a, 3).unwrap().compositum(&AbelianFieldQ::cyclotomic_subfield(b, 3).unwrap())
        } else {
            let pair: Vec<u64> = cube_primes.choose_multiple(&mut rng, 2).copied().collect();
            AbelianFieldQ::cyclotomic_subfield(pair[0], 3).unwrap().compositum(&AbelianFieldQ::cyclotomic_subfield(pair[1], 3).unwrap())
        };
        let subs = degree_p_subfields(&field).map_err(|e| e.to_string())?;
        let n = rng.gen_range(2..=subs.len());
        let mut family: Vec<AbelianFieldQ> = subs.choose_multiple(&mut rng, n).cloned().collect();
        if rng.gen_bool(0.25) {
            let extra = if p == 2 {
                quad(*ds.choose(&mut rng).unwrap())
            } else {
                AbelianFieldQ::cyclotomic_subfield(*cube_primes.choose(&mut rng).unwrap(), 3).unwrap()
            };
            family.push(extra);
        }
        let closed = sha_prime_case(&family).map_err(|e| format!("family {k}: {e}"))?;
        let sha = compute_sha(&family, 0, &Limits::default()).map_err(|e| format!("family {k}: {e}"))?;
        let names: Vec<String> = family.iter().map(ToString::to_string).collect();
        ensure(closed.invariant_factors() == sha.elementary_divisors(), || {
            format!(
                "family {k} {names:?}: closed form {:?}, pipeline {:?}",
                closed.invariant_factors(),
                sha.elementary_divisors()
            )
        })?;
        if !closed.is_zero() {
            nonzero += 1;
        }
    }
    Ok(format!("30 families agree, {nonzero} with Ш ≠ 0"))
}

fn criterion_10() -> Check {
    let mut contexts = Vec::new();
    let limits = Limits::default();
    for c in compute_sha(&example(), 0, &limits).map_err(|e| e.to_string())?.components {
        contexts.push(("criterion 1", c.context));
    }
    let zeta: Vec<AbelianFieldQ> = [25, 15, 9].iter().map(|&n| AbelianFieldQ::cyclotomic(n).unwrap()).collect();
    for pivot in [0, 2] {
        for c in compute_sha(&zeta, pivot, &limits).map_err(|e| e.to_string())?.components {
            contexts.push(("criterion 4", c.context));
        }
    }
    for c in compute_sha(&example(), 2, &limits).map_err(|e| e.to_string())?.components {
        contexts.push(("criterion 8", c.context));
    }
    for (label, ctx) in &contexts {
        let profile = ctx.build_profile().map_err(|e| format!("{label}: {e}"))?;
        spot_check_profile(ctx, &profile, 200).map_err(|e| format!("{label}: {e}"))?;
    }
    Ok(format!("{} profiles agree at the first 200 unramified primes", contexts.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("Example regression", criterion_1),
        ("four or more quadratic fields", criterion_2),
        ("two-factor algebras", criterion_3),
        ("cyclotomic triple", criterion_4),
        ("exact sequence", criterion_5),
        ("reciprocity", criterion_6),
        ("end-to-end decision", criterion_7),
        ("map f against decide", criterion_8),
        ("closed form against pipeline", criterion_9),
        ("Chebotarev spot check", criterion_10),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}; {elapsed:.2?})", k + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} {name}: FAIL ({detail}; {elapsed:.2?})", k + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
