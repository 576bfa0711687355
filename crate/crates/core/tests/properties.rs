use std::sync::Arc;

use nqcalc_core::cartan::{d, insertion, lie};
use nqcalc_core::poly::{ratio, GradedPoly as P};
use nqcalc_core::random::{random_context, random_form, random_poly, random_vector_field};
use nqcalc_core::spencer::{extract_spencer, reconstruct_form, validate_spencer};
use nqcalc_core::GradedContext;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Sample {
    ctx: Arc<GradedContext>,
    polys: Vec<(P, u32)>,
}

/// A context and three homogeneous polynomials with their parities.
fn sample(seed: u64, degrees: [(i32, i32); 3]) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ctx = random_context(&mut rng, 3, 3, 2, false).unwrap();
    let polys = degrees
        .iter()
        .map(|&(k, n)| (random_poly(&ctx, &mut rng, k, n, 4, 2), ((k + n) % 2) as u32))
        .collect();
    Sample { ctx, polys }
}

fn neg_if(odd: bool, p: P) -> P {
    if odd {
        -&p
    } else {
        p
    }
}

fn names(ctx: &GradedContext, word: &[usize]) -> Vec<String> {
    word.iter().map(|&i| ctx.generator(i % ctx.num_generators()).name.clone()).collect()
}

fn word_context(seed: u64) -> Arc<GradedContext> {
    random_context(&mut ChaCha8Rng::seed_from_u64(seed), 3, 3, 2, false).unwrap()
}

fn bidegrees() -> impl Strategy<Value = [(i32, i32); 3]> {
    [(0i32..=2, 0i32..=2), (0i32..=2, 0i32..=2), (0i32..=2, 0i32..=2)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_associative(seed in any::<u64>(), degs in bidegrees()) {
        let s = sample(seed, degs);
        let [(a, _), (b, _), (c, _)] = &s.polys[..] else { unreachable!() };
        prop_assert_eq!(&(a * b) * c, a * &(b * c));
    }

    #[test]
    fn product_distributes(seed in any::<u64>(), degs in bidegrees()) {
        let s = sample(seed, degs);
        let [(a, _), (b, _), (c, _)] = &s.polys[..] else { unreachable!() };
        prop_assert_eq!(a * &(b + c), &(a * b) + &(a * c));
        prop_assert_eq!(&(a + b) * c, &(a * c) + &(b * c));
    }

    #[test]
    fn product_is_graded_commutative(seed in any::<u64>(), degs in bidegrees()) {
        let s = sample(seed, degs);
        let [(a, pa), (b, pb), _] = &s.polys[..] else { unreachable!() };
        prop_assert_eq!(a * b, neg_if(pa * pb == 1, b * a));
        if *pa == 1 {
            prop_assert!((a * a).is_zero());
        }
    }

    #[test]
    fn partials_are_graded_derivations(seed in any::<u64>(), degs in bidegrees()) {
        let s = sample(seed, degs);
        let [(a, pa), (b, _), _] = &s.polys[..] else { unreachable!() };
        for idx in 0..s.ctx.num_generators() {
            let odd = s.ctx.generator(idx).is_odd();
            let lhs = (a * b).partial(idx);
            let rhs = &(&a.partial(idx) * b) + &neg_if(odd && *pa == 1, a * &b.partial(idx));
            prop_assert_eq!(lhs, rhs, "generator {}", idx);
        }
    }

    #[test]
    fn de_rham_squares_to_zero(seed in any::<u64>(), degs in bidegrees()) {
        let s = sample(seed, degs);
        let [(a, pa), (b, _), _] = &s.polys[..] else { unreachable!() };
        prop_assert!(d(&d(a)).is_zero());
        prop_assert_eq!(d(&(a * b)), &(&d(a) * b) + &neg_if(*pa == 1, a * &d(b)));
    }

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>(), words in prop::collection::vec((-5i64..=5, prop::collection::vec(0usize..32, 0..6)), 0..5)) {
        let ctx = word_context(seed);
        let raw: Vec<_> = words.iter().map(|(c, w)| (ratio(*c, 1), names(&ctx, w))).collect();
        let p = P::normalize(&ctx, &raw).unwrap();
        let again: Vec<_> = p
            .terms()
            .iter()
            .map(|(m, c)| {
                let word: Vec<String> = m
                    .exponents()
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &e)| std::iter::repeat(ctx.generator(i).name.clone()).take(e as usize))
                    .collect();
                (c.clone(), word)
            })
            .collect();
        prop_assert_eq!(P::normalize(&ctx, &again).unwrap(), p);
    }

    #[test]
    fn adjacent_swap_follows_koszul_rule(seed in any::<u64>(), word in prop::collection::vec(0usize..32, 2..6), at in 0usize..4) {
        let ctx = word_context(seed);
        let w = names(&ctx, &word);
        let i = at % (w.len() - 1);
        let mut swapped = w.clone();
        swapped.swap(i, i + 1);
        let odd = |n: &str| ctx.generator(ctx.require(n).unwrap()).is_odd();
        let p = P::normalize(&ctx, &[(ratio(1, 1), w.clone())]).unwrap();
        let q = P::normalize(&ctx, &[(ratio(1, 1), swapped)]).unwrap();
        prop_assert_eq!(q, neg_if(odd(&w[i]) && odd(&w[i + 1]), p));
    }

    #[test]
    fn cartan_commutators(seed in any::<u64>(), dx in -2i32..=1, dy in -2i32..=1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = random_context(&mut rng, 3, 3, 2, true).unwrap();
        let x = random_vector_field(&ctx, &mut rng, dx, true).unwrap();
        let y = random_vector_field(&ctx, &mut rng, dy, true).unwrap();
        let xy = x.commutator(&y).unwrap();
        let (ix, iy) = (insertion(&x).unwrap(), insertion(&y).unwrap());
        let (lx, ly) = (lie(&x).unwrap(), lie(&y).unwrap());
        prop_assert!(ix.commutator(&iy).unwrap().is_zero());
        prop_assert_eq!(lx.commutator(&iy).unwrap(), insertion(&xy).unwrap());
        prop_assert_eq!(lx.commutator(&ly).unwrap(), lie(&xy).unwrap());
    }

    #[test]
    fn spencer_round_trip(seed in any::<u64>(), k in 0u32..=3, n in 1u32..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = random_context(&mut rng, 3, 3, 2, seed % 2 == 0).unwrap();
        let w = random_form(&ctx, &mut rng, k, n, 4);
        let s = extract_spencer(&w, k, n).unwrap();
        prop_assert!(validate_spencer(&s).passes());
        let back = reconstruct_form(&s).unwrap();
        prop_assert!(extract_spencer(&back, k, n).unwrap().same_data(&s));
        prop_assert_eq!(back, w);
    }
}
