mod common;

use multinorm::cyclic_products::{degree_p_subfields, sha_product_cyclic};
use multinorm::sha_core::{check_exact_sequence, TupleSpace};
use multinorm::splitting::DEFAULT_MODULUS_LIMIT;
use multinorm::{
    compute_sha, norm_solution_search, sha_prime_case, AbelianFieldQ, Context, Limits, Multinorm, SplittingProfile,
    Verdict,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use common::{mutual_cube_pairs, primes_congruent_one, q, quad, radicands, random_abelian, rng};

#[test]
fn sha_does_not_depend_on_the_pivot() {
    let mut rng = rng(11);
    for _ in 0..15 {
        let n = rng.gen_range(2..=4);
        let l: Vec<AbelianFieldQ> = (0..n).map(|_| random_abelian(&mut rng, 60, 8, true)).collect();
        let reference = compute_sha(&l, 0, &Limits::default()).unwrap().elementary_divisors();
        for pivot in 1..n {
            let other = compute_sha(&l, pivot, &Limits::default()).unwrap().elementary_divisors();
            assert_eq!(reference, other, "{l:?} with pivots 0 and {pivot}");
        }
    }
}

#[test]
fn prime_degree_trichotomy() {
    let ds = radicands(40);
    let mut rng = rng(12);
    for _ in 0..40 {
        let n = rng.gen_range(1..=6);
        let family: Vec<AbelianFieldQ> = ds.choose_multiple(&mut rng, n).map(|&d| quad(d)).collect();
        let r = sha_prime_case(&family).unwrap();
        let k = r.factors.len() as u64;
        let f = r.invariant_factors();
        if k <= 2 || k >= 4 {
            assert!(f.is_empty());
        } else {
            assert!(f.is_empty() || f == vec![2; (k - 2) as usize]);
        }
    }
}

#[test]
fn cubic_families_through_both_routes() {
    let primes = primes_congruent_one(3, 200);
    let cube_pairs = mutual_cube_pairs(400);
    let mut rng = rng(13);
    let mut nonzero = 0;
    for k in 0..20 {
        let pair: Vec<u64> = if k % 2 == 0 {
            let &(a, b) = cube_pairs.choose(&mut rng).unwrap();
            vec![a, b]
        } else {
            primes.choose_multiple(&mut rng, 2).copied().collect()
        };
        let f = AbelianFieldQ::cyclotomic_subfield(pair[0], 3)
            .unwrap()
            .compositum(&AbelianFieldQ::cyclotomic_subfield(pair[1], 3).unwrap());
        let subs = degree_p_subfields(&f).unwrap();
        assert_eq!(subs.len(), 4);
        let n = rng.gen_range(3..=4);
        let family: Vec<AbelianFieldQ> = subs.choose_multiple(&mut rng, n).cloned().collect();
        let report = sha_product_cyclic(&family, &Limits::default()).unwrap();
        if !report.vanishes() {
            nonzero += 1;
            assert_eq!(report.elementary_divisors, vec![3; n - 2]);
        }
    }
    assert!(nonzero > 0, "no cubic family had Ш ≠ 0");
}

#[test]
fn cyclic_products_of_composite_degree() {
    let mut rng = rng(14);
    for _ in 0..12 {
        let n = rng.gen_range(2..=3);
        let l: Vec<AbelianFieldQ> = (0..n).map(|_| random_abelian(&mut rng, 100, 12, true)).collect();
        // internal cross-checks raise an error on any disagreement
        sha_product_cyclic(&l, &Limits::default()).unwrap();
    }
}

#[test]
fn context_vectors_match_the_profile() {
    let mut rng = rng(15);
    for _ in 0..10 {
        let pivot = AbelianFieldQ::cyclotomic_subfield(*[5u64, 13, 17, 29].choose(&mut rng).unwrap(), 4).unwrap();
        let factors: Vec<AbelianFieldQ> = (0..rng.gen_range(1..=3)).map(|_| random_abelian(&mut rng, 40, 8, false)).collect();
        let ctx = Context::new(pivot, factors, DEFAULT_MODULUS_LIMIT).unwrap();
        let profile = ctx.build_profile().unwrap();
        assert_eq!(ctx.distinct_vectors(), profile.distinct_vectors());
        let back = SplittingProfile::from_json(&profile.to_json()).unwrap();
        assert_eq!(back, profile);
        assert_eq!(
            TupleSpace::from_profile(&profile).sha(1_000_000).unwrap().invariant_factors(),
            TupleSpace::from_context(&ctx).sha(1_000_000).unwrap().invariant_factors()
        );
        assert!(check_exact_sequence(&profile, 1_000_000).unwrap().holds());
    }
}

#[test]
fn large_conductors_need_no_residue_listing() {
    let l: Vec<AbelianFieldQ> = [-97, 89, -83, 79, 73, -71].iter().map(|&d| quad(d)).collect();
    let sha = compute_sha(&l, 0, &Limits::default()).unwrap();
    assert!(sha.is_trivial());
    assert!(matches!(
        sha.components[0].profile(),
        Err(multinorm::Error::ModulusTooLarge { .. })
    ));
}

#[test]
fn obstructed_values_have_no_solution() {
    let l = vec![quad(13), quad(17), quad(221)];
    let mn = Multinorm::new(&l, None, &Limits::default()).unwrap();
    let mut obstructed = 0;
    for c in multinorm::brauer::rationals_by_height(30) {
        match mn.decide(&c).unwrap() {
            Verdict::Obstructed(_) => {
                obstructed += 1;
                assert_eq!(norm_solution_search(&l, &c, 300).unwrap(), None, "c = {c}");
            }
            Verdict::Solvable => {}
            Verdict::NoLocalSolution(v) => panic!("{c} fails at {v}, but every c is a local norm here"),
        }
    }
    assert!(obstructed > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn products_of_norms_are_solvable(coords in prop::collection::vec((-30i64..=30, -30i64..=30), 2)) {
        let l = vec![quad(5), quad(-3)];
        let mut c = q(1);
        for ((x, y), d) in coords.iter().zip([5i64, -3]) {
            prop_assume!(x * x != d * y * y);
            c *= q(x * x - d * y * y);
        }
        let mn = Multinorm::new(&l, None, &Limits::default()).unwrap();
        prop_assert_eq!(mn.decide(&c).unwrap(), Verdict::Solvable);
        // the first coordinate's norm class is within the bound, so the search must succeed
        let t = norm_solution_search(&l, &c, 5_400).unwrap().expect("a solution within the bound");
        prop_assert_eq!(t.norm(), c);
    }

    #[test]
    fn knot_characters_are_additive(a in 1i64..200, b in 1i64..200) {
        let l = vec![quad(13), quad(17), quad(221)];
        let mn = Multinorm::new(&l, None, &Limits::default()).unwrap();
        let (ca, cb) = (q(a), q(b));
        let sha = mn.sha();
        let chi = |c| mn.alpha(c).unwrap().character(sha);
        let sum: Vec<u64> = chi(&ca).iter().zip(chi(&cb)).map(|(x, y)| (x + y) % 2).collect();
        prop_assert_eq!(chi(&(&ca * &cb)), sum);
    }
}
