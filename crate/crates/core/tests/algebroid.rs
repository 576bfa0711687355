mod common;

use common::{algebroid_corpus, algebroid_oracle, v};
use nqcalc_core::algebroid::{
    algebroid_context, build_homological_derivation, build_homological_vf, chevalley_eilenberg, check_homological,
    extract_algebroid, AlgebroidData, CochainValues,
};
use nqcalc_core::poly::GradedPoly as P;
use nqcalc_core::random::random_poly;
use nqcalc_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn homological_iff_jacobi_oracle() {
    let mut seen = (0, 0);
    for case in algebroid_corpus() {
        let q = build_homological_vf(&case.a).unwrap();
        let hom = check_homological(&q).unwrap().homological;
        let oracle = algebroid_oracle(&case.a);
        assert_eq!(hom, oracle, "{}", case.name);
        if hom {
            seen.0 += 1;
            assert_eq!(extract_algebroid(&q).unwrap(), case.a, "{}", case.name);
        } else {
            seen.1 += 1;
            assert!(matches!(extract_algebroid(&q), Err(Error::NotHomological(_))));
        }
    }
    assert!(seen.0 >= 8 && seen.1 >= 3, "{seen:?}");
}

#[test]
fn so3_structure_read_back() {
    let ctx = algebroid_context(&[] as &[&str], &["a1", "a2", "a3"], &[] as &[&str]).unwrap();
    let mut a = AlgebroidData::abelian(&ctx).unwrap();
    common::so3_structure(&mut a, &ctx, 1);
    let q = build_homological_vf(&a).unwrap();
    // Q = -(a1 a2 d/da3 + a2 a3 d/da1 + a3 a1 d/da2)
    let a1 = v(&ctx, "a1");
    let a2 = v(&ctx, "a2");
    assert_eq!(q.coefficient(ctx.fiber_index(2)), -&(&a1 * &a2));
    let back = extract_algebroid(&q).unwrap();
    assert_eq!(back.structure(1, 0, 2), &P::integer(&ctx, -1));
}

fn random_cochain(a: &AlgebroidData, rng: &mut ChaCha8Rng, arity: usize) -> CochainValues {
    let ctx = a.context();
    let mut phi = CochainValues::zero(arity);
    let r = a.rank();
    let mut idx = vec![0usize; arity];
    fn next(idx: &mut [usize], r: usize) -> bool {
        for p in (0..idx.len()).rev() {
            let limit = r - (idx.len() - p);
            if idx[p] < limit {
                idx[p] += 1;
                for q in p + 1..idx.len() {
                    idx[q] = idx[q - 1] + 1;
                }
                return true;
            }
        }
        false
    }
    if arity > r {
        return phi;
    }
    for (p, slot) in idx.iter_mut().enumerate() {
        *slot = p;
    }
    loop {
        let comps: Vec<P> = (0..ctx.rank()).map(|_| random_poly(ctx, rng, 0, 0, 2, 2)).collect();
        phi.values.insert(idx.clone(), comps);
        if !next(&mut idx, r) {
            break;
        }
    }
    phi
}

#[test]
fn chevalley_eilenberg_squares_to_zero_and_matches_q() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in algebroid_corpus() {
        let q = build_homological_vf(&case.a).unwrap();
        if !check_homological(&q).unwrap().homological {
            continue;
        }
        let ctx = case.a.context();
        for arity in 0..=2 {
            let phi = random_cochain(&case.a, &mut rng, arity);
            let d1 = chevalley_eilenberg(&case.a, &phi).unwrap();
            let d2 = chevalley_eilenberg(&case.a, &d1).unwrap();
            assert!(d2.values.is_empty(), "{}", case.name);
            let via_q = q.apply(&phi.to_form(ctx)).unwrap();
            assert_eq!(via_q, d1.to_form(ctx), "{} arity {arity}", case.name);
        }
    }
}

#[test]
fn representation_flatness() {
    let ctx = algebroid_context(&["x"], &["a1", "a2"], &["e"]).unwrap();
    let x = v(&ctx, "x");
    let mut a = AlgebroidData::abelian(&ctx).unwrap();
    a.set_anchor(0, 0, P::one(&ctx));
    a.set_anchor(1, 0, x.clone());
    a.set_structure(0, 1, 0, P::one(&ctx));
    a.set_theta(1, 0, 0, P::integer(&ctx, 3));
    let q = build_homological_derivation(&a).unwrap();
    assert!(check_homological(&q).unwrap().homological);
    assert_eq!(extract_algebroid(&q).unwrap(), a);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for arity in 0..=1 {
        let phi = random_cochain(&a, &mut rng, arity);
        let d1 = chevalley_eilenberg(&a, &phi).unwrap();
        assert_eq!(q.apply(&phi.to_form(&ctx)).unwrap(), d1.to_form(&ctx));
        assert!(chevalley_eilenberg(&a, &d1).unwrap().values.is_empty());
    }

    a.set_theta(0, 0, 0, x);
    let q = build_homological_derivation(&a).unwrap();
    let h = check_homological(&q).unwrap();
    assert!(!h.homological);
    let (loc, p) = h.witness.unwrap();
    assert!(!p.is_zero(), "{loc}");
}

#[test]
fn malformed_inputs_rejected() {
    let ctx = algebroid_context(&["x"], &["a1", "a2"], &[] as &[&str]).unwrap();
    let x = v(&ctx, "x");
    let a = AlgebroidData::abelian(&ctx).unwrap();
    let bad = AlgebroidData::new(
        &ctx,
        vec![vec![P::zero(&ctx)]; 2],
        vec![vec![vec![x.clone(), P::zero(&ctx)], vec![P::zero(&ctx); 2]], vec![vec![P::zero(&ctx); 2]; 2]],
        None,
    );
    assert!(matches!(bad, Err(Error::FrameMismatch(_))));
    assert!(matches!(build_homological_derivation(&a), Err(Error::FrameMismatch(_))));
    let phi = CochainValues { arity: 1, values: [(vec![0, 1], vec![x])].into_iter().collect() };
    assert!(matches!(chevalley_eilenberg(&a, &phi), Err(Error::ArityMismatch(_))));
}
