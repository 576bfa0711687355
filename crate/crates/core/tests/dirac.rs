mod common;

use std::sync::Arc;

use common::{algebroid_corpus, base, bivector_corpus, bivector_is_poisson, c, v};
use nqcalc_core::algebroid::{algebroid_context, AlgebroidData};
use nqcalc_core::cartan::{d, insert, lie_derive};
use nqcalc_core::classifiers::dirac::{check_presymplectic_nq, courant_pairing, dorfman, DiracMorphism, Section};
use nqcalc_core::poly::GradedPoly as P;
use nqcalc_core::random::{random_form, random_poly};
use nqcalc_core::{Derivation, GradedContext, VectorValuedForm};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const AGREE: &str = "agrees with L_Q w = 0";
const ANCHOR: &str = "(1) tangent part of Phi is the anchor";
const ISOTROPY: &str = "(2) image of Phi is isotropic";
const BRACKET: &str = "(3) Phi intertwines brackets";

fn sec(vector: Vec<P>, covector: Vec<P>) -> Section {
    Section::new(vector, covector).unwrap()
}

#[test]
fn pairing_and_bracket_examples() {
    let r2 = base(&["x", "y"]);
    let (zero, one) = (c(&r2, 0), c(&r2, 1));
    let dx_part = sec(vec![one.clone(), zero.clone()], vec![zero.clone(), zero.clone()]);
    let dx_form = sec(vec![zero.clone(), zero.clone()], vec![one.clone(), zero.clone()]);
    assert_eq!(courant_pairing(&dx_part, &dx_form).unwrap(), one);
    let dy_form = sec(vec![zero.clone(), zero.clone()], vec![zero.clone(), one.clone()]);
    assert!(dorfman(&dx_part, &dy_form).unwrap().is_zero());
    let a = sec(vec![one.clone(), zero.clone()], vec![zero.clone(), one.clone()]);
    let b = sec(vec![zero.clone(), one.clone()], vec![one.clone(), zero.clone()]);
    assert!(dorfman(&a, &b).unwrap().is_zero());
}

/// `L_X s' - i_X' ds` through graded Cartan calculus on the base.
fn dorfman_oracle(ctx: &Arc<GradedContext>, s: &Section, t: &Section) -> Section {
    let field = |x: &[P]| {
        let coeffs: Vec<(usize, P)> = x.iter().enumerate().map(|(i, p)| (ctx.base_index(i), p.clone())).collect();
        Derivation::vector_field(ctx, 0, &coeffs, None).unwrap()
    };
    let form = |w: &[P]| {
        let mut acc = P::zero(ctx);
        for (i, p) in w.iter().enumerate() {
            acc = &acc + &(p * &P::differential_of(ctx, ctx.base_index(i)));
        }
        VectorValuedForm::scalar(acc).unwrap()
    };
    let (x, xp) = (field(&s.vector), field(&t.vector));
    let vector_field = x.commutator(&xp).unwrap();
    let sigma = form(&s.covector);
    let cov = lie_derive(&x, &form(&t.covector)).unwrap().sub(&insert(&xp, &VectorValuedForm::scalar(d(sigma.component(0))).unwrap()).unwrap());
    let m = ctx.num_base();
    Section {
        vector: (0..m).map(|i| vector_field.coefficient(ctx.base_index(i))).collect(),
        covector: (0..m)
            .map(|i| cov.component(0).partial(ctx.differential_index(ctx.base_index(i))))
            .collect(),
    }
}

#[test]
fn dorfman_matches_cartan_calculus() {
    let ctx = base(&["x", "y", "z"]);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..40 {
        let mut rand_vec = || (0..3).map(|_| random_poly(&ctx, &mut rng, 0, 0, 2, 2)).collect::<Vec<P>>();
        let s = sec(rand_vec(), rand_vec());
        let t = sec(rand_vec(), rand_vec());
        assert_eq!(dorfman(&s, &t).unwrap(), dorfman_oracle(&ctx, &s, &t));
        let ds = dorfman(&s, &s).unwrap();
        // [s, s]_D = (0, d <<s, s>> / 2)
        let half = courant_pairing(&s, &s).unwrap();
        let dhalf = d(&half);
        for i in 0..3 {
            assert!(ds.vector[i].is_zero());
            assert_eq!(ds.covector[i].scale_int(2), dhalf.partial(ctx.differential_index(ctx.base_index(i))));
        }
    }
}

#[test]
fn poisson_graphs() {
    for case in bivector_corpus() {
        let (a, phi) = DiracMorphism::poisson_graph(&case.p).unwrap();
        let r = check_presymplectic_nq(&a, &phi).unwrap();
        assert_eq!(r.passes(), bivector_is_poisson(&case.p), "{}\n{r}", case.name);
        assert_eq!(r.passes(), case.poisson);
        assert!(r.passed(ANCHOR) && r.passed(ISOTROPY), "{}\n{r}", case.name);
        assert!(r.passed("rank A = dim M") && r.passed("ker l ∩ ker rho = 0"), "{r}");
        assert!(r.passed(AGREE), "{}\n{r}", case.name);
        if !case.poisson {
            assert!(r.check(BRACKET).unwrap().witness.is_some());
        }
    }
}

fn tangent_r2() -> (Arc<GradedContext>, AlgebroidData) {
    let ctx = algebroid_context(&["x", "y"], &["a1", "a2"], &[] as &[&str]).unwrap();
    let a = AlgebroidData::tangent(&ctx).unwrap();
    (ctx, a)
}

fn one_forms(ctx: &Arc<GradedContext>, rows: Vec<Vec<P>>) -> Vec<VectorValuedForm> {
    rows.into_iter()
        .map(|row| {
            let mut acc = P::zero(ctx);
            for (i, p) in row.into_iter().enumerate() {
                acc = &acc + &(&p * &P::differential_of(ctx, ctx.base_index(i)));
            }
            VectorValuedForm::scalar(acc).unwrap()
        })
        .collect()
}

#[test]
fn each_condition_has_a_violator() {
    let (ctx, a) = tangent_r2();
    let (x, zero, one) = (v(&ctx, "x"), c(&ctx, 0), c(&ctx, 1));

    let zero_l = one_forms(&ctx, vec![vec![zero.clone(); 2]; 2]);
    let phi = DiracMorphism::from_algebroid(&a, &zero_l).unwrap();
    let r = check_presymplectic_nq(&a, &phi).unwrap();
    assert!(r.passes(), "{r}");
    assert!(r.passed("rank A = dim M") && r.passed("ker l ∩ ker rho = 0"));
    assert!(!r.passed("w non-degenerate"));

    let bent = DiracMorphism::new(&ctx, vec![vec![one.clone(), x.clone()], vec![zero.clone(), one.clone()]], vec![vec![zero.clone(); 2]; 2]).unwrap();
    let r = check_presymplectic_nq(&a, &bent).unwrap();
    assert!(!r.passed(ANCHOR) && r.check(ANCHOR).unwrap().witness.is_some(), "{r}");
    assert!(r.passed(AGREE));

    let swapped = one_forms(&ctx, vec![vec![zero.clone(), one.clone()], vec![one.clone(), zero.clone()]]);
    let r = check_presymplectic_nq(&a, &DiracMorphism::from_algebroid(&a, &swapped).unwrap()).unwrap();
    assert!(!r.passed(ISOTROPY), "{r}");
    assert!(r.check(ISOTROPY).unwrap().witness.as_ref().unwrap().contains("= 2"));
    assert!(r.passed(AGREE));

    // l = i_(.) (z dx^dy) on TR3, a graph of a non-closed 2-form
    let ctx3 = algebroid_context(&["x", "y", "z"], &["a1", "a2", "a3"], &[] as &[&str]).unwrap();
    let a3 = AlgebroidData::tangent(&ctx3).unwrap();
    let (z, o) = (v(&ctx3, "z"), c(&ctx3, 0));
    let twisted = one_forms(&ctx3, vec![vec![o.clone(), z.clone(), o.clone()], vec![-&z, o.clone(), o.clone()], vec![o.clone(); 3]]);
    let r = check_presymplectic_nq(&a3, &DiracMorphism::from_algebroid(&a3, &twisted).unwrap()).unwrap();
    assert!(r.passed(ISOTROPY) && !r.passed(BRACKET), "{r}");
    assert!(r.passed(AGREE));

    let symplectic = one_forms(&ctx, vec![vec![zero.clone(), one.clone()], vec![-&one, zero.clone()]]);
    let r = check_presymplectic_nq(&a, &DiracMorphism::from_algebroid(&a, &symplectic).unwrap()).unwrap();
    assert!(r.passes() && r.passed("w non-degenerate"), "{r}");
}

#[test]
fn random_one_forms_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut seen = (0, 0);
    for case in algebroid_corpus() {
        let ctx = case.a.context().clone();
        if ctx.num_base() == 0 {
            continue;
        }
        for _ in 0..3 {
            let ell: Vec<VectorValuedForm> = (0..case.a.rank()).map(|_| random_form(&ctx, &mut rng, 1, 0, 2)).collect();
            let phi = DiracMorphism::from_algebroid(&case.a, &ell).unwrap();
            let r = check_presymplectic_nq(&case.a, &phi).unwrap();
            assert!(r.passed(AGREE), "{}\n{r}", case.name);
            if r.passes() { seen.0 += 1 } else { seen.1 += 1 }
        }
    }
    assert!(seen.0 > 0 && seen.1 > 0, "{seen:?}");
}
