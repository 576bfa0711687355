//! Bivectors and degree one symplectic NQ-manifolds `T*[1]M`.

use std::sync::Arc;

use crate::algebroid::{algebroid_context, build_homological_vf, extract_algebroid, AlgebroidData};
use crate::classifiers::compat::{compat_report, CompatReport};
use crate::classifiers::multivector::{schouten_bracket, MultivectorField};
use crate::classifiers::rank::{adjugate, square_nondegeneracy, Nondegeneracy};
use crate::context::GradedContext;
use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::form::VectorValuedForm;
use crate::poly::{ratio, GradedPoly, Homogeneity};
use crate::spencer::extract_spencer;

/// Name of the fiber coordinate of `T*[1]M` dual to `x`.
pub fn momentum_name(x: &str) -> String {
    format!("p_{x}")
}

/// The context `T*[1]M` over the base of `ctx`.
pub fn cotangent_context(base: &[String]) -> Result<Arc<GradedContext>> {
    let fibers: Vec<String> = base.iter().map(|x| momentum_name(x)).collect();
    algebroid_context(base, &fibers, &[])
}

/// Canonical form `sum_i d(p_i) d(x^i)`.
pub fn canonical_symplectic(ctx: &Arc<GradedContext>) -> VectorValuedForm {
    let mut acc = GradedPoly::zero(ctx);
    for i in 0..ctx.num_base() {
        let dp = GradedPoly::differential_of(ctx, ctx.fiber_index(i));
        let dx = GradedPoly::differential_of(ctx, ctx.base_index(i));
        acc = &acc + &(&dp * &dx);
    }
    VectorValuedForm::scalar(acc).expect("scalar context")
}

/// Cotangent algebroid of a bivector: `rho(dx^i) = P^{ij} d/dx^j`,
/// `[[dx^i, dx^j]] = d P^{ij}`. The context must be `T*[1]M`.
pub fn cotangent_algebroid(ctx: &Arc<GradedContext>, p: &MultivectorField) -> Result<AlgebroidData> {
    if p.degree() != 2 {
        return Err(Error::ArityMismatch("a bivector is required".into()));
    }
    let p = p.transport(ctx)?;
    let m = ctx.num_base();
    let mut a = AlgebroidData::abelian(ctx)?;
    for i in 0..m {
        for j in 0..m {
            let pij = p.get(&[i, j]);
            a.set_anchor(i, j, pij.clone());
            if i < j {
                for k in 0..m {
                    a.set_structure(i, j, k, pij.partial(ctx.base_index(k)));
                }
            }
        }
    }
    Ok(a)
}

/// `T*[1]M` with its canonical form and the homological vector field of a bivector.
#[derive(Debug, Clone)]
pub struct PoissonNq {
    pub context: Arc<GradedContext>,
    pub algebroid: AlgebroidData,
    pub q: Derivation,
    pub omega: VectorValuedForm,
}

impl PoissonNq {
    /// Compatibility report of `Q` with the canonical form.
    pub fn compat(&self) -> Result<CompatReport> {
        compat_report(&self.q, &self.omega)
    }
}

pub fn poisson_to_nq(p: &MultivectorField) -> Result<PoissonNq> {
    let ctx = cotangent_context(p.context().base_names())?;
    let algebroid = cotangent_algebroid(&ctx, p)?;
    let q = build_homological_vf(&algebroid)?;
    Ok(PoissonNq { omega: canonical_symplectic(&ctx), context: ctx, algebroid, q })
}

/// Whether `[P, P] = 0`, with the first nonzero coefficient otherwise.
pub fn poisson_witness(p: &MultivectorField) -> Result<Option<String>> {
    let pp = schouten_bracket(p, p)?;
    Ok(pp.first_nonzero().map(|(idx, c)| format!("[P,P] has {c} on {}", pp.index_label(&idx))))
}

/// Matrix `l[a][i]` of a map frame -> 1-forms on the base.
pub(crate) fn one_form_matrix(ls: &[VectorValuedForm]) -> Result<Vec<Vec<GradedPoly>>> {
    let mut rows = Vec::new();
    for l in ls {
        let c = l.component(0);
        let ctx = c.context();
        let mut row = Vec::new();
        for i in 0..ctx.num_base() {
            let coeff = c.partial(ctx.differential_index(ctx.base_index(i)));
            if !coeff.is_base_function() {
                return Err(Error::NotSymplectic(format!("l value `{c}` is not a 1-form on the base")));
            }
            row.push(coeff);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Recovers the bivector of a compatible degree one symplectic pair.
pub fn nq_to_poisson(q: &Derivation, omega: &VectorValuedForm) -> Result<MultivectorField> {
    let ctx = omega.context();
    crate::algebroid::require_degree_one(ctx)
        .map_err(|_| Error::NotSymplectic("the context is not of degree one".into()))?;
    if ctx.rank() != 1 || ctx.has_frame() {
        return Err(Error::NotSymplectic("a scalar form is required".into()));
    }
    match omega.bidegree() {
        Homogeneity::Homogeneous(b) if b.form_degree == 2 && b.internal_degree == 1 => {}
        Homogeneity::Zero if ctx.num_base() == 0 => {}
        _ => return Err(Error::NotSymplectic(format!("`{omega}` is not a degree one 2-form"))),
    }
    if ctx.num_fiber() != ctx.num_base() {
        return Err(Error::NotSymplectic("rank of A differs from dim M".into()));
    }
    let dw = crate::cartan::de_rham(omega)?;
    if !dw.is_zero() {
        return Err(Error::NotSymplectic(format!("d w = {dw}")));
    }
    let s = extract_spencer(omega, 2, 1)?;
    let ls: Vec<VectorValuedForm> = (0..ctx.num_fiber()).map(|a| s.l_value(a).clone()).collect();
    let l = one_form_matrix(&ls)?;
    let (verdict, det) = square_nondegeneracy(&l);
    let det = match verdict {
        Nondegeneracy::Everywhere => det.expect("nonempty"),
        Nondegeneracy::Generic { locus } => {
            return Err(Error::NotSymplectic(format!("l degenerates where {locus} = 0")))
        }
        Nondegeneracy::Degenerate if ctx.num_base() == 0 => GradedPoly::one(ctx),
        Nondegeneracy::Degenerate => return Err(Error::NotSymplectic("l is degenerate".into())),
    };
    let report = compat_report(q, omega)?;
    if !report.passes() {
        return Err(Error::NotCompatible(report.witness().unwrap_or_default()));
    }
    let a = extract_algebroid(q)?;
    let m = ctx.num_base();
    let inv_det = ratio(1, 1) / det.constant_term();
    let inverse: Vec<Vec<GradedPoly>> = if m == 0 {
        Vec::new()
    } else {
        adjugate(&l).iter().map(|row| row.iter().map(|p| p.scale(&inv_det)).collect()).collect()
    };
    // s_i = sum_b inverse[i][b] d/dp_b satisfies l(s_i) = dx^i.
    let mut out = MultivectorField::zero(ctx, 2);
    for i in 0..m {
        for j in i + 1..m {
            let mut pij = GradedPoly::zero(ctx);
            for b in 0..m {
                pij = &pij + &(&inverse[i][b] * a.anchor(b, j));
            }
            out.add_entry(&[i, j], &pij)?;
        }
    }
    Ok(out)
}
