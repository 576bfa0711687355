//! Acceptance suite. Each criterion prints one line and the test fails if any
//! criterion does.

#[path = "../../core/tests/common/mod.rs"]
mod common;
mod support;

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

use common::foliation::foliation_corpus;
use common::jacobi::{jacobi_corpus, jacobi_oracle};
use common::kplectic::{homological_corpus, tautological};
use common::{algebroid_corpus, algebroid_oracle, bivector_corpus, bivector_is_poisson, c, v};
use nqcalc_core::algebroid::{algebroid_context, build_homological_vf, check_homological, AlgebroidData};
use nqcalc_core::cartan::{covariant, d, de_rham, de_rham_operator, insertion, lie, lie_derive};
use nqcalc_core::classifiers::contact::{cartan_form, cartan_spencer_data, check_contact_nq, jet_context};
use nqcalc_core::classifiers::dirac::{check_presymplectic_nq, DiracMorphism};
use nqcalc_core::classifiers::foliation::check_im_foliation;
use nqcalc_core::classifiers::poisson::{nq_to_poisson, poisson_to_nq};
use nqcalc_core::classifiers::spencer_op::{algebroid_q, check_im_kplectic, check_spencer_operator};
use nqcalc_core::classifiers::{compat_report, ObstructionKind};
use nqcalc_core::poly::{rat, GradedPoly as P};
use nqcalc_core::random::{random_context, random_form, random_poly, random_vector_field};
use nqcalc_core::spencer::{extract_spencer, reconstruct_form, validate_spencer};
use nqcalc_core::{Derivation, GradedContext, Homogeneity, VectorValuedForm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{golden, run_case, CASES};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn sign(odd: bool) -> nqcalc_core::Rational {
    rat(if odd { -1 } else { 1 })
}

fn same_on(a: &Derivation, b: &Derivation, forms: &[VectorValuedForm]) -> Result<bool, String> {
    for w in forms {
        if ok(a.apply(w), "apply")? != ok(b.apply(w), "apply")? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn zero_endo(ctx: &Arc<GradedContext>) -> Vec<Vec<P>> {
    let r = ctx.rank();
    vec![vec![P::zero(ctx); r]; r]
}

fn cartan_suite() -> Outcome {
    let start = Instant::now();
    let mut instances = 0;
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(10_000 + seed);
        let ctx = ok(random_context(&mut rng, 3, 3, 2, true), "context")?;
        let (dx, dy) = (rng.gen_range(-2..=1), rng.gen_range(-2..=1));
        let x = ok(random_vector_field(&ctx, &mut rng, dx, true), "field")?;
        let y = ok(random_vector_field(&ctx, &mut rng, dy, true), "field")?;
        let forms: Vec<_> = (0..3)
            .map(|_| {
                let k = rng.gen_range(0..=2);
                let n = rng.gen_range(0..=2);
                random_form(&ctx, &mut rng, k, n, 3)
            })
            .collect();
        let (ix, iy) = (ok(insertion(&x), "i")?, ok(insertion(&y), "i")?);
        let (lx, ly) = (ok(lie(&x), "L")?, ok(lie(&y), "L")?);
        let xy = ok(x.commutator(&y), "[X,Y]")?;
        ensure!(ok(ix.commutator(&iy), "[i,i]")?.is_zero(), "seed {seed}: [i_X,i_Y] != 0");
        ensure!(ok(lx.commutator(&iy), "[L,i]")? == ok(insertion(&xy), "i")?, "seed {seed}: [L_X,i_Y] != i_[X,Y]");
        let lxy = ok(lie(&xy), "L")?;
        ensure!(ok(lx.commutator(&ly), "[L,L]")? == lxy, "seed {seed}: [L_X,L_Y] != L_[X,Y]");
        ensure!(same_on(&ok(lx.commutator(&ly), "[L,L]")?, &lxy, &forms)?, "seed {seed}: [L_X,L_Y] on forms");

        let fd = rng.gen_range(0..=1);
        let f = random_poly(&ctx, &mut rng, 0, fd, 2, 1);
        if let Homogeneity::Homogeneous(b) = f.bidegree() {
            let fx = ok(x.left_mul(&f), "fX")?;
            ensure!(same_on(&ok(insertion(&fx), "i")?, &ok(ix.left_mul(&f), "f i")?, &forms)?, "seed {seed}: i_(fX) != f i_X");
            let twist = sign((b.internal_degree as i32 + dx).rem_euclid(2) == 1);
            let rhs = ok(ok(lx.left_mul(&f), "f L")?.try_add(&ok(ix.left_mul(&d(&f)), "df i")?.scale(&twist)), "sum")?;
            ensure!(same_on(&ok(lie(&fx), "L")?, &rhs, &forms)?, "seed {seed}: L_(fX) Leibniz");
        }

        let dn = de_rham_operator(&ctx);
        ensure!(ok(dn.commutator(&dn), "[d,d]")?.is_zero(), "seed {seed}: [d_nabla,d_nabla] != 0");
        let nx = ok(covariant(&ok(x.coordinate_part().with_endo(zero_endo(&ctx)), "endo")?), "covariant")?;
        let lnx = ok(lie(&nx), "L")?;
        ensure!(ok(ok(insertion(&nx), "i")?.commutator(&dn), "[i,d]")? == lnx, "seed {seed}: [i_X,d_nabla] != L_X");
        ensure!(ok(lnx.commutator(&dn), "[L,d]")?.is_zero(), "seed {seed}: [L_X,d_nabla] != 0");
        instances += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(instances >= 200, "only {instances} instances");
    ensure!(secs <= 60.0, "{instances} instances took {secs:.1} s");
    Ok(format!("{instances} instances, 0 failures, {secs:.1} s"))
}

fn spencer_round_trip() -> Outcome {
    let mut count = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(20_000 + seed);
        let ctx = ok(random_context(&mut rng, 3, 3, 2, seed % 2 == 0), "context")?;
        let k = rng.gen_range(0..=3);
        let n = rng.gen_range(1..=2);
        let w = random_form(&ctx, &mut rng, k, n, 4);
        let s = ok(extract_spencer(&w, k, n), "extract")?;
        ensure!(validate_spencer(&s).passes(), "seed {seed}: extracted data fail the identities");
        let back = ok(reconstruct_form(&s), "reconstruct")?;
        ensure!(back == w, "seed {seed}: reconstruct(extract(w)) != w");
        ensure!(ok(extract_spencer(&back, k, n), "extract")?.same_data(&s), "seed {seed}: extract(reconstruct(s)) != s");
        count += 1;
    }
    Ok(format!("{count} forms, k <= 3, n in 1..=2"))
}

fn homological_equivalence() -> Outcome {
    let (mut hom, mut not) = (0, 0);
    for case in algebroid_corpus() {
        let q = ok(build_homological_vf(&case.a), &case.name)?;
        let verdict = ok(check_homological(&q), &case.name)?.homological;
        ensure!(verdict == algebroid_oracle(&case.a), "{}: [Q,Q] verdict disagrees with Jacobiator", case.name);
        if verdict { hom += 1 } else { not += 1 }
    }
    ensure!(hom + not >= 10, "corpus has {} members", hom + not);
    Ok(format!("{} algebroids, {hom} homological, {not} not", hom + not))
}

fn compat_equivalence() -> Outcome {
    let ctx = ok(algebroid_context(&["x", "y"], &["a1", "a2"], &[] as &[&str]), "context")?;
    let q = ok(build_homological_vf(&ok(AlgebroidData::tangent(&ctx), "tangent")?), "Q")?;
    let (mut pairs, mut compatible, mut closed) = (0, 0, 0);
    for seed in 0..60u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(30_000 + seed);
        let k = rng.gen_range(0..=2);
        let n = rng.gen_range(1..=2);
        let eta = random_form(&ctx, &mut rng, k, n, 3);
        let exact = ok(lie_derive(&q, &eta), "L_Q")?;
        let generic = random_form(&ctx, &mut rng, k, n, 3);
        let closed_two = ok(de_rham(&random_form(&ctx, &mut rng, 1, n, 3)), "d")?;
        for w in [exact, generic, closed_two] {
            if w.is_zero() {
                continue;
            }
            let r = ok(compat_report(&q, &w), "compat")?;
            ensure!(r.agreement, "seed {seed}: direct and obstruction verdicts differ for {w}");
            pairs += 1;
            compatible += usize::from(r.direct);
            if w.bidegree() == Homogeneity::Homogeneous(nqcalc_core::Bidegree { form_degree: 2, internal_degree: n })
                && ok(de_rham(&w), "d")?.is_zero()
            {
                closed += 1;
                if r.vanishes(ObstructionKind::B) && r.vanishes(ObstructionKind::C) {
                    ensure!(r.vanishes(ObstructionKind::A), "seed {seed}: B, C vanish but A does not");
                }
            }
        }
    }
    ensure!(pairs >= 50 && compatible > 0 && compatible < pairs, "{pairs} pairs, {compatible} compatible");
    Ok(format!("{pairs} pairs ({compatible} compatible), {closed} closed 2-forms"))
}

fn poisson_equivalence() -> Outcome {
    let mut poisson = 0;
    let cases = bivector_corpus();
    for case in &cases {
        let nq = ok(poisson_to_nq(&case.p), &case.name)?;
        let passes = ok(nq.compat(), &case.name)?.passes();
        ensure!(passes == bivector_is_poisson(&case.p), "{}: compat verdict differs from [P,P] oracle", case.name);
        match nq_to_poisson(&nq.q, &nq.omega) {
            Ok(back) if passes => {
                ensure!(ok(back.transport(case.p.context()), "transport")? == case.p, "{}: bivector not recovered", case.name);
            }
            Ok(_) => return Err(format!("{}: recovered a bivector from a non-homological Q", case.name)),
            Err(e) => ensure!(!passes, "{}: {e}", case.name),
        }
        poisson += usize::from(passes);
    }
    Ok(format!("{} bivectors, {poisson} Poisson, each recovered exactly", cases.len()))
}

const ANCHOR: &str = "(1) tangent part of Phi is the anchor";
const ISOTROPY: &str = "(2) image of Phi is isotropic";
const BRACKET: &str = "(3) Phi intertwines brackets";

fn one_forms(ctx: &Arc<GradedContext>, rows: Vec<Vec<P>>) -> Vec<VectorValuedForm> {
    rows.into_iter()
        .map(|row| {
            let mut acc = P::zero(ctx);
            for (i, p) in row.into_iter().enumerate() {
                acc = &acc + &(&p * &P::differential_of(ctx, ctx.base_index(i)));
            }
            VectorValuedForm::scalar(acc).expect("scalar context")
        })
        .collect()
}

fn dirac_morphisms() -> Outcome {
    let mut graphs = 0;
    for case in bivector_corpus().into_iter().filter(|c| c.poisson) {
        let (a, phi) = ok(DiracMorphism::poisson_graph(&case.p), &case.name)?;
        let r = ok(check_presymplectic_nq(&a, &phi), &case.name)?;
        ensure!(r.passes(), "{}: graph fails\n{r}", case.name);
        ensure!(r.passed("rank A = dim M") && r.passed("ker l ∩ ker rho = 0"), "{}: rank/kernel\n{r}", case.name);
        graphs += 1;
    }

    let ctx = ok(algebroid_context(&["x", "y"], &["a1", "a2"], &[] as &[&str]), "context")?;
    let a = ok(AlgebroidData::tangent(&ctx), "tangent")?;
    let (x, zero, one) = (v(&ctx, "x"), c(&ctx, 0), c(&ctx, 1));
    let bent = ok(
        DiracMorphism::new(&ctx, vec![vec![one.clone(), x], vec![zero.clone(), one.clone()]], vec![vec![zero.clone(); 2]; 2]),
        "bent",
    )?;
    let swapped = one_forms(&ctx, vec![vec![zero.clone(), one.clone()], vec![one, zero]]);
    let swapped = ok(DiracMorphism::from_algebroid(&a, &swapped), "swapped")?;

    let ctx3 = ok(algebroid_context(&["x", "y", "z"], &["a1", "a2", "a3"], &[] as &[&str]), "context")?;
    let a3 = ok(AlgebroidData::tangent(&ctx3), "tangent")?;
    let (z, o) = (v(&ctx3, "z"), c(&ctx3, 0));
    let twisted = one_forms(&ctx3, vec![vec![o.clone(), z.clone(), o.clone()], vec![-&z, o.clone(), o.clone()], vec![o; 3]]);
    let twisted = ok(DiracMorphism::from_algebroid(&a3, &twisted), "twisted")?;

    for (label, alg, phi, cond) in [("bent", &a, &bent, ANCHOR), ("swapped", &a, &swapped, ISOTROPY), ("twisted", &a3, &twisted, BRACKET)] {
        let r = ok(check_presymplectic_nq(alg, phi), label)?;
        let check = r.check(cond).ok_or_else(|| format!("{label}: no check `{cond}`"))?;
        ensure!(!check.passed && check.witness.is_some(), "{label}: `{cond}` not violated with witness\n{r}");
    }
    Ok(format!("{graphs} Poisson graphs pass, one violator per condition"))
}

fn contact_structures() -> Outcome {
    for names in [vec!["x"], vec!["x", "y"], vec!["x", "y", "z"]] {
        let base: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let ctx = ok(jet_context(&base), "jet context")?;
        let s = ok(cartan_spencer_data(&ctx), "Cartan data")?;
        ensure!(validate_spencer(&s).passes(), "m = {}: Cartan data fail the identities", names.len());
        let mut theta = v(&ctx, "d(u)");
        for n in &names {
            theta = &theta + &(&v(&ctx, &format!("p_{n}")) * &v(&ctx, &format!("d({n})")));
        }
        let theta = VectorValuedForm::along(theta, 0);
        ensure!(ok(cartan_form(&ctx), "Cartan form")? == theta, "m = {}: reconstructed form differs", names.len());
        ensure!(ok(extract_spencer(&theta, 1, 1), "extract")?.same_data(&s), "m = {}: extract differs", names.len());
    }
    let (mut pass, mut fail) = (0, 0);
    for (name, jac) in jacobi_corpus() {
        let r = ok(check_contact_nq(&jac), &name)?;
        ensure!(r.passes() == jacobi_oracle(&jac), "{name}: verdict differs from Jacobiator\n{r}");
        ensure!(r.passed("Schouten side agrees with compatibility"), "{name}: sides disagree\n{r}");
        if r.passes() { pass += 1 } else { fail += 1 }
    }
    Ok(format!("Cartan data exact for m <= 3, {} Jacobi pairs ({pass} pass, {fail} fail)", pass + fail))
}

fn foliations() -> Outcome {
    const AGREE: &str = "agrees with compatible involutive distribution";
    let (mut pass, mut fail) = (0, 0);
    for fx in foliation_corpus() {
        let r = ok(check_im_foliation(&fx.a, &fx.f), fx.name)?;
        ensure!(r.passed(AGREE), "{}: verdict differs from distribution check\n{r}", fx.name);
        if let Some(e) = fx.expected {
            ensure!(r.passes() == e, "{}: expected {e}\n{r}", fx.name);
        }
        if r.passes() { pass += 1 } else { fail += 1 }
    }
    ensure!(pass + fail >= 5 && fail >= 1, "{pass} pass, {fail} fail");
    Ok(format!("{} fixtures, {fail} failing", pass + fail))
}

fn spencer_operators() -> Outcome {
    const AGREE: &str = "agrees with L_Q w = 0";
    let mut rng = ChaCha8Rng::seed_from_u64(40_000);
    let (mut ops, mut kpl) = (0, 0);
    for (name, a) in homological_corpus() {
        let ctx = a.context().clone();
        let q = ok(algebroid_q(&a), &name)?;
        for k in 1..=3u32 {
            let exact = ok(lie_derive(&q, &random_form(&ctx, &mut rng, k, 0, 3)), "L_Q")?;
            let generic = random_form(&ctx, &mut rng, k, 1, 3);
            for w in [exact, generic] {
                let s = ok(extract_spencer(&w, k, 1), "extract")?;
                let r = ok(check_spencer_operator(&a, &s), &name)?;
                let compat = ok(compat_report(&q, &ok(reconstruct_form(&s), "reconstruct")?), "compat")?;
                ensure!(r.passed(AGREE) && r.passes() == compat.passes(), "{name} k={k}: operator verdict differs\n{r}");
                ops += 1;
            }
            if !ctx.has_frame() {
                let ell: Vec<VectorValuedForm> = (0..a.rank()).map(|_| random_form(&ctx, &mut rng, k, 0, 2)).collect();
                let r = ok(check_im_kplectic(&a, &ell, k), &name)?;
                ensure!(r.passed(AGREE), "{name} k={k}: k-plectic verdict differs\n{r}");
                kpl += 1;
            }
        }
    }
    for k in 1..=3 {
        let (a, ell) = tautological(3, k);
        let r = ok(check_im_kplectic(&a, &ell, k as u32), "tautological")?;
        ensure!(r.passes() && r.passed("ker l = 0") && r.passed("(im l)° = 0"), "tautological k={k}\n{r}");
    }
    Ok(format!("{ops} operator and {kpl} k-plectic comparisons, tautological k = 1, 2, 3 pass"))
}

fn cli_determinism() -> Outcome {
    let mut fixtures = BTreeSet::new();
    for &(name, sub, format, code) in CASES {
        let (first, c1) = run_case(name, sub, format);
        let (second, c2) = run_case(name, sub, format);
        ensure!(first == second, "{name} {sub} {format}: runs differ");
        ensure!(c1 == code && c2 == code, "{name} {sub} {format}: exit {c1}, expected {code}");
        let path = golden(name, sub, format);
        let expected = ok(std::fs::read_to_string(&path), &path.display().to_string())?;
        ensure!(first == expected, "{name} {sub} {format}: differs from golden file");
        fixtures.insert(name);
    }
    ensure!(fixtures.len() >= 8, "only {} fixtures", fixtures.len());
    Ok(format!("{} reports over {} manifests byte-identical", CASES.len(), fixtures.len()))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Cartan identities", cartan_suite),
        ("Spencer round trip", spencer_round_trip),
        ("homological vs Jacobiator", homological_equivalence),
        ("direct vs obstruction compatibility", compat_equivalence),
        ("Poisson bivectors", poisson_equivalence),
        ("Dirac morphisms", dirac_morphisms),
        ("contact and Jacobi", contact_structures),
        ("IM foliations", foliations),
        ("Spencer operators and k-plectic", spencer_operators),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: pass  {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
