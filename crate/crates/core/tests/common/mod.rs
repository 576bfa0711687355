#![allow(dead_code)]

use std::sync::Arc;

use nqcalc_core::algebroid::{algebroid_context, AlgebroidData};
use nqcalc_core::classifiers::poisson::{cotangent_algebroid, cotangent_context};
use nqcalc_core::classifiers::MultivectorField;
use nqcalc_core::poly::GradedPoly as P;
use nqcalc_core::GradedContext;

pub mod foliation;
pub mod jacobi;
pub mod kplectic;

pub fn v(ctx: &Arc<GradedContext>, name: &str) -> P {
    P::var(ctx, name).unwrap()
}

pub fn c(ctx: &Arc<GradedContext>, n: i64) -> P {
    P::integer(ctx, n)
}

pub fn base(names: &[&str]) -> Arc<GradedContext> {
    GradedContext::builder().bases(names.iter().copied()).build().unwrap()
}

/// Applies a vector field on the base (components in coordinate order).
pub fn apply_vf(ctx: &Arc<GradedContext>, x: &[P], f: &P) -> P {
    let mut acc = P::zero(ctx);
    for (i, xi) in x.iter().enumerate() {
        acc = &acc + &(xi * &f.partial(ctx.base_index(i)));
    }
    acc
}

/// Lie bracket of two vector fields on the base, componentwise.
pub fn vf_bracket(ctx: &Arc<GradedContext>, x: &[P], y: &[P]) -> Vec<P> {
    (0..x.len()).map(|i| &apply_vf(ctx, x, &y[i]) - &apply_vf(ctx, y, &x[i])).collect()
}

/// Independent check of the algebroid axioms on frame elements: anchor is
/// a morphism of brackets and the Jacobiator of `[[e_a, e_b]] = c^c_{ab}
/// e_c` extended by the Leibniz rule vanishes.
pub fn algebroid_oracle(a: &AlgebroidData) -> bool {
    let ctx = a.context();
    let r = a.rank();
    let m = ctx.num_base();
    let rho = |i: usize| -> Vec<P> { (0..m).map(|j| a.anchor(i, j).clone()).collect() };
    for i in 0..r {
        for j in 0..r {
            let lhs = vf_bracket(ctx, &rho(i), &rho(j));
            for (l, lhs_l) in lhs.iter().enumerate() {
                let mut rhs = P::zero(ctx);
                for k in 0..r {
                    rhs = &rhs + &(a.structure(i, j, k) * a.anchor(k, l));
                }
                if *lhs_l != rhs {
                    return false;
                }
            }
        }
    }
    // [[e_i, f^d e_d]] = rho_i(f^d) e_d + f^d c^f_{id} e_f
    let bracket_with = |i: usize, f: &[P]| -> Vec<P> {
        let mut out: Vec<P> = (0..r).map(|d| apply_vf(ctx, &rho(i), &f[d])).collect();
        for d in 0..r {
            for g in 0..r {
                out[g] = &out[g] + &(&f[d] * a.structure(i, d, g));
            }
        }
        out
    };
    let bracket_pair = |i: usize, j: usize| -> Vec<P> { (0..r).map(|k| a.structure(i, j, k).clone()).collect() };
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                let t1 = bracket_with(i, &bracket_pair(j, k));
                let t2 = bracket_with(j, &bracket_pair(k, i));
                let t3 = bracket_with(k, &bracket_pair(i, j));
                for g in 0..r {
                    if !(&(&t1[g] + &t2[g]) + &t3[g]).is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Jacobiator of `{x^i, x^j} = P^{ij}` on coordinate triples.
pub fn bivector_is_poisson(p: &MultivectorField) -> bool {
    let ctx = p.context();
    let m = ctx.num_base();
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let mut jac = P::zero(ctx);
                for (a, b, cc) in [(i, j, k), (j, k, i), (k, i, j)] {
                    for l in 0..m {
                        jac = &jac + &(&p.get(&[a, l]) * &p.get(&[b, cc]).partial(ctx.base_index(l)));
                    }
                }
                if !jac.is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

pub struct BivectorCase {
    pub name: &'static str,
    pub p: MultivectorField,
    pub poisson: bool,
}

pub fn bivector_corpus() -> Vec<BivectorCase> {
    let r2 = base(&["x", "y"]);
    let r3 = base(&["x", "y", "z"]);
    let (x2, y2) = (v(&r2, "x"), v(&r2, "y"));
    let (x, y, z) = (v(&r3, "x"), v(&r3, "y"), v(&r3, "z"));
    let bv = |ctx: &Arc<GradedContext>, e: Vec<(usize, usize, P)>| MultivectorField::bivector(ctx, &e).unwrap();
    vec![
        BivectorCase { name: "x dx^dy", p: bv(&r2, vec![(0, 1, x2.clone())]), poisson: true },
        BivectorCase {
            name: "(x^2+y) dx^dy",
            p: bv(&r2, vec![(0, 1, &(&x2 * &x2) + &y2)]),
            poisson: true,
        },
        BivectorCase {
            name: "so(3)*",
            p: bv(&r3, vec![(0, 1, z.clone()), (1, 2, x.clone()), (2, 0, y.clone())]),
            poisson: true,
        },
        BivectorCase { name: "zero", p: MultivectorField::zero(&r2, 2), poisson: true },
        BivectorCase {
            name: "dx^dy + y dx^dz",
            p: bv(&r3, vec![(0, 1, c(&r3, 1)), (0, 2, y.clone())]),
            poisson: true,
        },
        BivectorCase {
            name: "dx^dy + x dx^dz",
            p: bv(&r3, vec![(0, 1, c(&r3, 1)), (0, 2, x.clone())]),
            poisson: false,
        },
        BivectorCase {
            name: "y dx^dy + x dy^dz",
            p: bv(&r3, vec![(0, 1, y.clone()), (1, 2, x.clone())]),
            poisson: false,
        },
    ]
}

pub struct AlgebroidCase {
    pub name: String,
    pub a: AlgebroidData,
}

fn set_bracket(a: &mut AlgebroidData, i: usize, j: usize, k: usize, p: P) {
    a.set_structure(i, j, k, p);
}

pub fn so3_structure(a: &mut AlgebroidData, ctx: &Arc<GradedContext>, s: i64) {
    set_bracket(a, 0, 1, 2, c(ctx, s));
    set_bracket(a, 1, 2, 0, c(ctx, s));
    set_bracket(a, 2, 0, 1, c(ctx, s));
}

/// Algebroids with their expected Jacobi verdicts left to the oracle.
pub fn algebroid_corpus() -> Vec<AlgebroidCase> {
    let mut out = Vec::new();
    let ctx = algebroid_context(&["x", "y"], &["a1", "a2"], &[] as &[&str]).unwrap();
    out.push(AlgebroidCase { name: "abelian".into(), a: AlgebroidData::abelian(&ctx).unwrap() });
    out.push(AlgebroidCase { name: "TR2".into(), a: AlgebroidData::tangent(&ctx).unwrap() });

    let lie = algebroid_context(&[] as &[&str], &["a1", "a2", "a3"], &[] as &[&str]).unwrap();
    let mut so3 = AlgebroidData::abelian(&lie).unwrap();
    so3_structure(&mut so3, &lie, 1);
    out.push(AlgebroidCase { name: "so(3)".into(), a: so3 });

    let mut broken = AlgebroidData::abelian(&lie).unwrap();
    set_bracket(&mut broken, 0, 1, 2, c(&lie, 1));
    set_bracket(&mut broken, 0, 2, 0, c(&lie, 1));
    out.push(AlgebroidCase { name: "bracket without Jacobi".into(), a: broken });

    for b in bivector_corpus() {
        let ctx = cotangent_context(b.p.context().base_names()).unwrap();
        out.push(AlgebroidCase {
            name: format!("T* of {}", b.name),
            a: cotangent_algebroid(&ctx, &b.p).unwrap(),
        });
    }

    let line = algebroid_context(&["x"], &["a1", "a2"], &[] as &[&str]).unwrap();
    let x = v(&line, "x");
    let mut aff = AlgebroidData::abelian(&line).unwrap();
    aff.set_anchor(0, 0, c(&line, 1));
    aff.set_anchor(1, 0, x);
    set_bracket(&mut aff, 0, 1, 0, c(&line, 1));
    out.push(AlgebroidCase { name: "aff(1) on R".into(), a: aff });

    let r3 = algebroid_context(&["x", "y", "z"], &["a1", "a2", "a3"], &[] as &[&str]).unwrap();
    let (x, y, z) = (v(&r3, "x"), v(&r3, "y"), v(&r3, "z"));
    let mut rot = AlgebroidData::abelian(&r3).unwrap();
    rot.set_anchor(0, 1, -&z);
    rot.set_anchor(0, 2, y.clone());
    rot.set_anchor(1, 0, z.clone());
    rot.set_anchor(1, 2, -&x);
    rot.set_anchor(2, 0, -&y);
    rot.set_anchor(2, 1, x.clone());
    so3_structure(&mut rot, &r3, -1);
    out.push(AlgebroidCase { name: "so(3) on R3".into(), a: rot });

    let mut bad_tm = AlgebroidData::tangent(&ctx).unwrap();
    set_bracket(&mut bad_tm, 0, 1, 0, c(&ctx, 1));
    out.push(AlgebroidCase { name: "TR2 with [[e1,e2]] = e1".into(), a: bad_tm });
    out
}
