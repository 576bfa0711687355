//! Seeded generators of contexts, polynomials, vector fields and forms for
//! property checks.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::context::GradedContext;
use crate::derivation::Derivation;
use crate::error::Result;
use crate::form::VectorValuedForm;
use crate::poly::{rat, GradedPoly, Monomial};

/// All monomials of bidegree `(form, internal)` whose base coordinate part
/// has exponent sum at most `max_base`.
pub fn monomials_of_bidegree(
    ctx: &GradedContext,
    form: u32,
    internal: u32,
    max_base: u32,
) -> Vec<Monomial> {
    let n = ctx.num_generators();
    let nb = ctx.num_base();
    let graded: Vec<usize> = (nb..n).collect();
    let mut out = Vec::new();
    let mut exps = vec![0u32; n];
    fill_graded(ctx, &graded, 0, form, internal, &mut exps, &mut |e| {
        let mut base = vec![0u32; nb];
        fill_base(&mut base, 0, max_base, &mut |b| {
            let mut m = e.to_vec();
            m[..nb].copy_from_slice(b);
            out.push(Monomial(m));
        });
    });
    out.sort();
    out
}

fn fill_graded(
    ctx: &GradedContext,
    gens: &[usize],
    pos: usize,
    form: u32,
    internal: u32,
    exps: &mut Vec<u32>,
    emit: &mut dyn FnMut(&[u32]),
) {
    if pos == gens.len() {
        if form == 0 && internal == 0 {
            emit(exps);
        }
        return;
    }
    let g = ctx.generator(gens[pos]);
    let max = if g.is_odd() { 1 } else { u32::MAX };
    let mut e = 0;
    loop {
        let f = e * g.form_degree;
        let i = e * g.internal_degree;
        if f > form || i > internal || e > max {
            break;
        }
        exps[gens[pos]] = e;
        fill_graded(ctx, gens, pos + 1, form - f, internal - i, exps, emit);
        if g.form_degree == 0 && g.internal_degree == 0 {
            break;
        }
        e += 1;
    }
    exps[gens[pos]] = 0;
}

fn fill_base(b: &mut Vec<u32>, pos: usize, budget: u32, emit: &mut dyn FnMut(&[u32])) {
    if pos == b.len() {
        emit(b);
        return;
    }
    for e in 0..=budget {
        b[pos] = e;
        fill_base(b, pos + 1, budget - e, emit);
    }
    b[pos] = 0;
}

fn random_coefficient<R: Rng>(rng: &mut R) -> i64 {
    let v = rng.gen_range(1..=3);
    if rng.gen_bool(0.5) {
        -v
    } else {
        v
    }
}

/// A random homogeneous polynomial with at most `max_terms` monomials.
pub fn random_poly<R: Rng>(
    ctx: &Arc<GradedContext>,
    rng: &mut R,
    form: i32,
    internal: i32,
    max_terms: usize,
    max_base: u32,
) -> GradedPoly {
    if form < 0 || internal < 0 {
        return GradedPoly::zero(ctx);
    }
    let mons = monomials_of_bidegree(ctx, form as u32, internal as u32, max_base);
    let mut acc = GradedPoly::zero(ctx);
    if mons.is_empty() || max_terms == 0 {
        return acc;
    }
    let k = rng.gen_range(0..=max_terms.min(mons.len()));
    for m in mons.choose_multiple(rng, k) {
        acc = &acc + &GradedPoly::from_monomial(ctx, m.clone(), rat(random_coefficient(rng)));
    }
    acc
}

/// A random vector field of internal degree `degree`, optionally with a
/// random frame action.
pub fn random_vector_field<R: Rng>(
    ctx: &Arc<GradedContext>,
    rng: &mut R,
    degree: i32,
    with_endo: bool,
) -> Result<Derivation> {
    let mut coeffs = Vec::new();
    for g in ctx.coordinate_indices() {
        let target = ctx.generator(g).internal_degree as i32 + degree;
        let p = random_poly(ctx, rng, 0, target, 2, 1);
        if !p.is_zero() {
            coeffs.push((g, p));
        }
    }
    let endo = if with_endo {
        let r = ctx.rank();
        Some(
            (0..r)
                .map(|_| (0..r).map(|_| random_poly(ctx, rng, 0, degree, 2, 1)).collect())
                .collect(),
        )
    } else {
        None
    };
    Derivation::vector_field(ctx, degree, &coeffs, endo)
}

/// A random homogeneous E-valued form.
pub fn random_form<R: Rng>(
    ctx: &Arc<GradedContext>,
    rng: &mut R,
    form: u32,
    internal: u32,
    max_terms: usize,
) -> VectorValuedForm {
    let comps = (0..ctx.rank())
        .map(|_| random_poly(ctx, rng, form as i32, internal as i32, max_terms, 1))
        .collect();
    VectorValuedForm::new(ctx, comps).expect("components live in the context")
}

/// A random context with up to `max_base` base coordinates and `max_fiber`
/// fiber coordinates of degree at most `max_degree`, an optional frame of
/// rank at most two, and (when requested) a random flat connection.
pub fn random_context<R: Rng>(
    rng: &mut R,
    max_base: usize,
    max_fiber: usize,
    max_degree: u32,
    with_connection: bool,
) -> Result<Arc<GradedContext>> {
    let nb = rng.gen_range(1..=max_base.max(1));
    let nf = rng.gen_range(1..=max_fiber.max(1));
    let rank = rng.gen_range(0..=2usize);
    let mut b = GradedContext::builder();
    for i in 0..nb {
        b = b.base(format!("x{}", i + 1));
    }
    for a in 0..nf {
        b = b.fiber(format!("z{}", a + 1), rng.gen_range(1..=max_degree.max(1)));
    }
    for f in 0..rank {
        b = b.frame(format!("e{}", f + 1));
    }
    let ctx = b.build()?;
    if !with_connection || rank == 0 {
        return Ok(ctx);
    }
    Ok(random_flat_connection(&ctx, rng)?)
}

/// Installs `Gamma_i = d_i h delta + c_i N` with `h` a base polynomial, `c_i`
/// constants and `N` strictly upper triangular; such connections are flat.
pub fn random_flat_connection<R: Rng>(
    ctx: &Arc<GradedContext>,
    rng: &mut R,
) -> Result<Arc<GradedContext>> {
    let r = ctx.frame_names().len();
    let h = random_poly(ctx, rng, 0, 0, 3, 2);
    let mut entries: BTreeMap<(usize, usize, usize), GradedPoly> = BTreeMap::new();
    for i in 0..ctx.num_base() {
        let dh = h.partial(ctx.base_index(i));
        for a in 0..r {
            entries.insert((i, a, a), dh.clone());
        }
        let c = rng.gen_range(-2..=2);
        for a in 0..r {
            for b in 0..a {
                let v = GradedPoly::integer(ctx, c * (1 + (a + b) as i64 % 2));
                let slot = entries.entry((i, a, b)).or_insert_with(|| GradedPoly::zero(ctx));
                *slot = &*slot + &v;
            }
        }
    }
    let named: Vec<_> = entries
        .into_iter()
        .filter(|(_, p)| !p.is_zero())
        .map(|((i, a, b), p)| {
            (
                ctx.base_names()[i].clone(),
                ctx.frame_names()[a].clone(),
                ctx.frame_names()[b].clone(),
                p,
            )
        })
        .collect();
    ctx.with_connection(&named)
}
