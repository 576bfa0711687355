use std::sync::Arc;

use nqcalc_core::classifiers::contact::JacobiPair;
use nqcalc_core::classifiers::MultivectorField;
use nqcalc_core::poly::GradedPoly as P;
use nqcalc_core::GradedContext;

use super::{base, bivector_corpus, c, v};

/// `{f, g} = L^{ij} d_i f d_j g + f E(g) - g E(f)`, written out directly.
fn bracket(ctx: &Arc<GradedContext>, lam: &[Vec<P>], e: &[P], f: &P, g: &P) -> P {
    let m = ctx.num_base();
    let mut out = P::zero(ctx);
    for i in 0..m {
        for j in 0..m {
            out = &out + &(&lam[i][j] * &(&f.partial(ctx.base_index(i)) * &g.partial(ctx.base_index(j))));
        }
        out = &out + &(&e[i] * &(&(f * &g.partial(ctx.base_index(i))) - &(g * &f.partial(ctx.base_index(i)))));
    }
    out
}

/// Jacobiator on triples of functions of degree at most two.
pub fn jacobi_oracle(jac: &JacobiPair) -> bool {
    let ctx = jac.context();
    let m = ctx.num_base();
    let lam: Vec<Vec<P>> = (0..m).map(|i| (0..m).map(|j| jac.lambda.get(&[i, j])).collect()).collect();
    let e = jac.reeb.components();
    let mut probes = vec![P::one(ctx)];
    let xs: Vec<P> = ctx.base_names().iter().map(|n| v(ctx, n)).collect();
    for (i, xi) in xs.iter().enumerate() {
        probes.push(xi.clone());
        for xj in &xs[i..] {
            probes.push(xi * xj);
        }
    }
    let br = |f: &P, g: &P| bracket(ctx, &lam, &e, f, g);
    for f in &probes {
        for g in &probes {
            for h in &probes {
                let s = &(&br(f, &br(g, h)) + &br(g, &br(h, f))) + &br(h, &br(f, g));
                if !s.is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

pub fn pair(ctx: &Arc<GradedContext>, lam: Vec<(usize, usize, P)>, e: Vec<P>) -> JacobiPair {
    JacobiPair::new(MultivectorField::bivector(ctx, &lam).unwrap(), MultivectorField::vector(ctx, &e).unwrap()).unwrap()
}

pub fn jacobi_corpus() -> Vec<(String, JacobiPair)> {
    let r2 = base(&["x", "y"]);
    let r3 = base(&["x", "y", "z"]);
    let (x2, y2) = (v(&r2, "x"), v(&r2, "y"));
    let (x, y, z) = (v(&r3, "x"), v(&r3, "y"), v(&r3, "z"));
    let (o2, o3) = (c(&r2, 0), c(&r3, 0));
    let mut out = vec![
        ("dx^dy, E = dx".to_string(), pair(&r2, vec![(0, 1, c(&r2, 1))], vec![c(&r2, 1), o2.clone()])),
        ("dx^dy, E = x dy".into(), pair(&r2, vec![(0, 1, c(&r2, 1))], vec![o2.clone(), x2.clone()])),
        ("x dx^dy, E = dy".into(), pair(&r2, vec![(0, 1, x2.clone())], vec![o2.clone(), c(&r2, 1)])),
        ("y dx^dy, E = dx".into(), pair(&r2, vec![(0, 1, y2.clone())], vec![c(&r2, 1), o2.clone()])),
        ("dx^dy, E = dz".into(), pair(&r3, vec![(0, 1, c(&r3, 1))], vec![o3.clone(), o3.clone(), c(&r3, 1)])),
    ];
    // contact form dz - y dx and its sign flip
    for s in [1, -1] {
        out.push((
            format!("{s} (dy^dx + y dy^dz), E = dz"),
            pair(&r3, vec![(1, 0, c(&r3, s)), (1, 2, y.scale_int(s))], vec![o3.clone(), o3.clone(), c(&r3, 1)]),
        ));
    }
    out.push(("x dx^dy, E = z dz".into(), pair(&r3, vec![(0, 1, x.clone())], vec![o3.clone(), o3.clone(), z.clone()])));
    for b in bivector_corpus() {
        let ctx = b.p.context().clone();
        let e = vec![P::zero(&ctx); ctx.num_base()];
        out.push((format!("Poisson {}", b.name), JacobiPair::new(b.p, MultivectorField::vector(&ctx, &e).unwrap()).unwrap()));
    }
    out
}
