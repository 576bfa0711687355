//! The Cartan form on `J^1 L[1]` for a trivialized line bundle, and degree
//! one contact NQ-manifolds as Jacobi pairs `(Lambda, E)`.

use std::sync::Arc;

use crate::algebroid::{algebroid_context, build_homological_derivation, AlgebroidData};
use crate::classifiers::compat::compat_report;
use crate::classifiers::multivector::{schouten_bracket, MultivectorField};
use crate::classifiers::{Check, Report};
use crate::context::GradedContext;
use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::form::VectorValuedForm;
use crate::poly::{rat, GradedPoly};
use crate::spencer::{reconstruct_form, SpencerData};

/// Fiber coordinate dual to `j^1 1`.
pub const JET_VALUE: &str = "u";
/// Frame element trivializing the line bundle.
pub const LINE_FRAME: &str = "e";

pub fn jet_momentum_name(x: &str) -> String {
    format!("p_{x}")
}

/// The context `J^1 L[1]` over the given base: fibers `u` and `p_x`, frame `e`.
pub fn jet_context(base: &[String]) -> Result<Arc<GradedContext>> {
    let mut fibers = vec![JET_VALUE.to_string()];
    fibers.extend(base.iter().map(|x| jet_momentum_name(x)));
    algebroid_context(base, &fibers, &[LINE_FRAME.to_string()])
}

fn require_jet_layout(ctx: &GradedContext) -> Result<()> {
    crate::algebroid::require_degree_one(ctx)?;
    if ctx.num_fiber() != ctx.num_base() + 1 || ctx.frame_names().len() != 1 {
        return Err(Error::FrameMismatch(
            "J^1 L[1] needs dim M + 1 fiber coordinates and a one element frame".into(),
        ));
    }
    Ok(())
}

/// `j^1 f = f d/du + d_i f d/dp_i` for a function `f` on the base.
pub fn jet_prolongation(ctx: &Arc<GradedContext>, f: &GradedPoly) -> Result<Derivation> {
    require_jet_layout(ctx)?;
    if !f.is_base_function() {
        return Err(Error::InvalidDegree(format!("`{f}` is not a function on the base")));
    }
    let f = f.transport(ctx)?;
    let mut coeffs = vec![(ctx.fiber_index(0), f.clone())];
    for i in 0..ctx.num_base() {
        coeffs.push((ctx.fiber_index(i + 1), f.partial(ctx.base_index(i))));
    }
    coeffs.retain(|(_, p)| !p.is_zero());
    Derivation::vector_field(ctx, -1, &coeffs, None)
}

/// Spencer data of the Cartan form: `l(d/du) = e`, `l(d/dp_i) = 0`,
/// `D(d/du) = 0`, `D(d/dp_i) = dx^i e`, which is forced by `D(j^1 f) = 0`.
pub fn cartan_spencer_data(ctx: &Arc<GradedContext>) -> Result<SpencerData> {
    require_jet_layout(ctx)?;
    let u = ctx.fiber_index(0);
    SpencerData::from_fn(
        ctx,
        1,
        1,
        |b| {
            if b.target == u {
                Ok(VectorValuedForm::zero(ctx))
            } else {
                let i = b.target - ctx.fiber_index(1);
                Ok(VectorValuedForm::along(GradedPoly::differential_of(ctx, ctx.base_index(i)), 0))
            }
        },
        |b| {
            if b.target == u {
                Ok(VectorValuedForm::frame_element(ctx, 0))
            } else {
                Ok(VectorValuedForm::zero(ctx))
            }
        },
    )
}

/// The Cartan form `theta = (du + p_i dx^i) e`, reconstructed from its
/// Spencer data.
pub fn cartan_form(ctx: &Arc<GradedContext>) -> Result<VectorValuedForm> {
    reconstruct_form(&cartan_spencer_data(ctx)?)
}

/// A Jacobi pair `(Lambda, E)` on a trivial line bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiPair {
    pub lambda: MultivectorField,
    pub reeb: MultivectorField,
}

impl JacobiPair {
    pub fn new(lambda: MultivectorField, reeb: MultivectorField) -> Result<Self> {
        if lambda.degree() != 2 || reeb.degree() != 1 {
            return Err(Error::ArityMismatch("a bivector and a vector field are required".into()));
        }
        let reeb = reeb.transport(lambda.context())?;
        Ok(JacobiPair { lambda, reeb })
    }

    pub fn context(&self) -> &Arc<GradedContext> {
        self.lambda.context()
    }

    /// `{f, g} = Lambda(df, dg) + f E(g) - g E(f)`.
    pub fn bracket(&self, f: &GradedPoly, g: &GradedPoly) -> Result<GradedPoly> {
        let ctx = self.context();
        let grad = |h: &GradedPoly| -> Vec<GradedPoly> { (0..ctx.num_base()).map(|i| h.partial(ctx.base_index(i))).collect() };
        let lam = self.lambda.pair(&grad(f), &grad(g))?;
        Ok(&(&lam + &(f * &self.reeb.apply(g)?)) - &(g * &self.reeb.apply(f)?))
    }
}

/// The Lie algebroid `J^1 L` of a Jacobi pair with its representation on
/// `L`, in the frame `eps_0 = j^1 1`, `eps_i = dx^i`.
pub fn jet_algebroid(ctx: &Arc<GradedContext>, jac: &JacobiPair) -> Result<AlgebroidData> {
    require_jet_layout(ctx)?;
    let m = ctx.num_base();
    let lam = jac.lambda.transport(ctx)?;
    let e: Vec<GradedPoly> = jac.reeb.transport(ctx)?.components();
    let mut a = AlgebroidData::abelian(ctx)?;
    for (j, ej) in e.iter().enumerate() {
        a.set_anchor(0, j, ej.clone());
    }
    for i in 0..m {
        for j in 0..m {
            a.set_anchor(i + 1, j, lam.get(&[i, j]));
        }
        a.set_theta(i + 1, 0, 0, -&e[i]);
    }
    for j in 0..m {
        for k in 0..m {
            a.set_structure(0, j + 1, k + 1, e[j].partial(ctx.base_index(k)));
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            let lij = lam.get(&[i, j]);
            let mut row = vec![GradedPoly::zero(ctx); m + 1];
            row[0] = -&lij;
            for (k, slot) in row.iter_mut().enumerate().skip(1) {
                *slot = lij.partial(ctx.base_index(k - 1));
            }
            row[i + 1] = &row[i + 1] + &e[j];
            row[j + 1] = &row[j + 1] - &e[i];
            for (c, p) in row.into_iter().enumerate() {
                a.set_structure(i + 1, j + 1, c, p);
            }
        }
    }
    Ok(a)
}

/// Coefficient `c` in the Jacobi condition `[Lambda, Lambda] = c E ^ Lambda`
/// for the normalization of [`schouten_bracket`].
pub const JACOBI_CONSTANT: i64 = -2;

/// Schouten-side conditions `[Lambda, Lambda] = c E ^ Lambda` and
/// `[E, Lambda] = 0`, with witnesses.
pub fn jacobi_witnesses(jac: &JacobiPair) -> Result<(Option<String>, Option<String>)> {
    let ll = schouten_bracket(&jac.lambda, &jac.lambda)?;
    let el = jac.reeb.wedge(&jac.lambda)?.scale(&rat(JACOBI_CONSTANT));
    let first = ll.try_sub(&el)?;
    let w1 = first
        .first_nonzero()
        .map(|(idx, c)| format!("[L,L] - ({JACOBI_CONSTANT}) E^L has {c} on {}", first.index_label(&idx)));
    let second = schouten_bracket(&jac.reeb, &jac.lambda)?;
    let w2 = second
        .first_nonzero()
        .map(|(idx, c)| format!("[E,L] has {c} on {}", second.index_label(&idx)));
    Ok((w1, w2))
}

/// Builds `J^1 L[1]`, its Cartan form and the homological derivation of a
/// candidate Jacobi pair, and compares compatibility with the Schouten side.
pub fn check_contact_nq(jac: &JacobiPair) -> Result<Report> {
    let ctx = jet_context(jac.context().base_names())?;
    let a = jet_algebroid(&ctx, jac)?;
    let q = build_homological_derivation(&a)?;
    let theta = cartan_form(&ctx)?;
    let mut report = Report::new("contact NQ-manifold");
    let c = compat_report(&q, &theta)?;
    report.push(Check::new("[Q,Q] = 0", 1, c.homological_witness.clone()));
    let w = (!c.direct).then(|| c.witness().unwrap_or_default());
    report.push(Check::new("L_Q theta = 0", 1, w));
    report.push(Check::new("obstructions agree with L_Q theta", c.pairs_checked, (!c.agreement).then(|| "obstruction verdict differs".to_string())));
    let (w1, w2) = jacobi_witnesses(jac)?;
    let schouten = w1.is_none() && w2.is_none();
    report.push(Check::new(format!("[L,L] = {JACOBI_CONSTANT} E^L"), 1, w1).informational());
    report.push(Check::new("[E,L] = 0", 1, w2).informational());
    let agree = (schouten != c.passes())
        .then(|| format!("Schouten verdict {schouten}, compatibility verdict {}", c.passes()));
    report.push(Check::new("Schouten side agrees with compatibility", 1, agree));
    report.note(format!("theta = {theta}"));
    Ok(report)
}
