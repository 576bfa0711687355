//! Vector valued Cartan calculus: insertions, Lie derivatives, the de Rham
//! differential of a flat connection, and the grading derivation.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::context::GradedContext;
use crate::derivation::{zero_endo, Derivation};
use crate::error::{Error, Result};
use crate::form::VectorValuedForm;
use crate::poly::{rat, GradedPoly, Homogeneity};

/// Plain de Rham differential of a scalar form.
pub fn d(p: &GradedPoly) -> GradedPoly {
    let ctx = p.context();
    let mut acc = GradedPoly::zero(ctx);
    for g in ctx.coordinate_indices() {
        let dp = p.partial(g);
        if !dp.is_zero() {
            acc = &acc + &(&GradedPoly::differential_of(ctx, g) * &dp);
        }
    }
    acc
}

/// The insertion `i_X` of a vector field (frame action is ignored).
pub fn insertion(x: &Derivation) -> Result<Derivation> {
    x.require_vector_field()?;
    let ctx = x.context();
    let mut symbol = BTreeMap::new();
    for (&g, c) in x.symbol() {
        symbol.insert(ctx.differential_index(g), c.clone());
    }
    Ok(Derivation::from_parts_unchecked(ctx, -1, x.degree(), symbol, zero_endo(ctx)))
}

/// The Lie derivative `L_X`: symbol `[i_X, d]`, frame action that of `X`.
pub fn lie(x: &Derivation) -> Result<Derivation> {
    x.require_vector_field()?;
    let ctx = x.context();
    let sign = if x.degree().rem_euclid(2) == 1 { rat(-1) } else { rat(1) };
    let mut symbol = BTreeMap::new();
    for (&g, c) in x.symbol() {
        symbol.insert(g, c.clone());
        let dc = d(c).scale(&sign);
        if !dc.is_zero() {
            symbol.insert(ctx.differential_index(g), dc);
        }
    }
    Ok(Derivation::from_parts_unchecked(ctx, 0, x.degree(), symbol, x.endo().to_vec()))
}

/// The de Rham differential `d_nabla` of the connection of the context.
pub fn de_rham_operator(ctx: &Arc<GradedContext>) -> Derivation {
    let mut symbol = BTreeMap::new();
    for g in ctx.coordinate_indices() {
        symbol.insert(g, GradedPoly::differential_of(ctx, g));
    }
    let mut endo = zero_endo(ctx);
    for (i, alpha, beta, gamma) in ctx.connection_entries() {
        let term = &GradedPoly::differential_of(ctx, ctx.base_index(i)) * &gamma;
        endo[beta][alpha] = &endo[beta][alpha] + &term;
    }
    Derivation::from_parts_unchecked(ctx, 1, 0, symbol, endo)
}

pub fn insert(x: &Derivation, w: &VectorValuedForm) -> Result<VectorValuedForm> {
    x.check_context(w.context())?;
    insertion(x)?.apply(w)
}

pub fn lie_derive(x: &Derivation, w: &VectorValuedForm) -> Result<VectorValuedForm> {
    x.check_context(w.context())?;
    lie(x)?.apply(w)
}

pub fn de_rham(w: &VectorValuedForm) -> Result<VectorValuedForm> {
    de_rham_operator(w.context()).apply(w)
}

/// Covariant derivative `nabla_X` along a vector field.
pub fn covariant(x: &Derivation) -> Result<Derivation> {
    x.require_vector_field()?;
    let ctx = x.context();
    let mut endo = zero_endo(ctx);
    for (i, alpha, beta, gamma) in ctx.connection_entries() {
        let xi = x.coefficient(ctx.base_index(i));
        if !xi.is_zero() {
            endo[beta][alpha] = &endo[beta][alpha] + &(&xi * &gamma);
        }
    }
    let coords: Vec<_> = x.symbol().iter().map(|(g, c)| (*g, c.clone())).collect();
    Derivation::vector_field(ctx, x.degree(), &coords, Some(endo))
}

/// The grading derivation `Delta_E = sum |z^a| z^a d/dz^a` with zero frame action.
pub fn grading_derivation(ctx: &Arc<GradedContext>) -> Derivation {
    let mut symbol = BTreeMap::new();
    for g in ctx.fiber_indices() {
        let deg = ctx.generator(g).internal_degree as i64;
        symbol.insert(g, GradedPoly::generator(ctx, g).scale_int(deg));
    }
    Derivation::from_parts_unchecked(ctx, 0, 0, symbol, zero_endo(ctx))
}

/// `n^{-1} i_Delta w`, a primitive of the closed form `w` of internal degree `n`.
pub fn potential(w: &VectorValuedForm, n: u32) -> Result<VectorValuedForm> {
    let ctx = w.context();
    if n == 0 {
        return Err(Error::DegreeZero);
    }
    if w.is_zero() {
        return Ok(VectorValuedForm::zero(ctx));
    }
    match w.bidegree() {
        Homogeneity::Homogeneous(b) if b.internal_degree == n => {}
        Homogeneity::Homogeneous(b) => {
            return Err(Error::WrongDegree { expected: n as i32, found: b.internal_degree as i32 })
        }
        _ => return Err(Error::Inhomogeneous(format!("form `{w}`"))),
    }
    let dw = de_rham(w)?;
    if let Some((alpha, p)) = dw.first_nonzero() {
        return Err(Error::NotClosed(format!("component {alpha} of d(w) is `{p}`")));
    }
    let theta = insert(&grading_derivation(ctx), w)?.scale(&crate::poly::ratio(1, n as i64));
    let check = de_rham(&theta)?;
    if check != *w {
        return Err(Error::NotClosed(format!("d of the potential is `{check}`")));
    }
    Ok(theta)
}

/// Checks `d_nabla^2 e_alpha = 0` for every frame element.
pub fn check_flat(ctx: &Arc<GradedContext>) -> Result<()> {
    let dn = de_rham_operator(ctx);
    for alpha in 0..ctx.rank() {
        let e = VectorValuedForm::frame_element(ctx, alpha);
        let dd = dn.apply(&dn.apply(&e)?)?;
        if let Some((beta, p)) = dd.first_nonzero() {
            return Err(Error::NonFlatConnection(format!(
                "curvature applied to {} has component `{p}` along {}",
                ctx.frame_names()[alpha],
                ctx.frame_names()[beta]
            )));
        }
    }
    Ok(())
}
