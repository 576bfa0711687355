//! Locally conformal symplectic structures `(phi, w)` on a trivial line
//! bundle, their Jacobi brackets, and degree one lcs NQ-manifolds as
//! locally conformal Poisson pairs `(phi, P)`.

use std::fmt;
use std::sync::Arc;

use crate::algebroid::{algebroid_context, build_homological_derivation, AlgebroidData};
use crate::cartan::d;
use crate::classifiers::compat::compat_report;
use crate::classifiers::contact::JacobiPair;
use crate::classifiers::dirac::one_form_components;
use crate::classifiers::multivector::{schouten_bracket, MultivectorField};
use crate::classifiers::rank::{adjugate, square_nondegeneracy, transpose};
use crate::classifiers::{Check, Nondegeneracy, Report};
use crate::context::GradedContext;
use crate::error::{Error, Result};
use crate::form::VectorValuedForm;
use crate::poly::{rat, GradedPoly};
use crate::spencer::{reconstruct_form, SpencerData};

/// A quotient `num / den` of base polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFn {
    pub num: GradedPoly,
    pub den: GradedPoly,
}

impl LocalFn {
    pub fn new(num: GradedPoly, den: GradedPoly) -> Self {
        if den.is_constant() && !den.is_zero() {
            let c = den.constant_term();
            let one = GradedPoly::one(den.context());
            return LocalFn { num: num.scale(&(rat(1) / c)), den: one };
        }
        LocalFn { num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_poly(&self) -> Option<&GradedPoly> {
        (self.den.is_constant()).then_some(&self.num)
    }
}

impl fmt::Display for LocalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_poly() {
            Some(p) => write!(f, "{p}"),
            None => write!(f, "({}) / ({})", self.num, self.den),
        }
    }
}

fn scalar_form(w: &GradedPoly) -> Result<VectorValuedForm> {
    if w.context().has_frame() || w.context().num_fiber() > 0 {
        return Err(Error::UnsupportedContext("lcs data live on a base-only context".into()));
    }
    VectorValuedForm::scalar(w.clone())
}

/// `W_ij = w(d/dx^i, d/dx^j)` for a 2-form on the base.
pub fn two_form_matrix(w: &GradedPoly) -> Result<Vec<Vec<GradedPoly>>> {
    let ctx = w.context();
    let m = ctx.num_base();
    let dx = |i: usize| ctx.differential_index(ctx.base_index(i));
    let mut rows = vec![vec![GradedPoly::zero(ctx); m]; m];
    let mut rebuilt = GradedPoly::zero(ctx);
    for i in 0..m {
        let ii = w.partial(dx(i));
        for j in 0..m {
            let c = ii.partial(dx(j));
            if !c.is_base_function() {
                return Err(Error::InvalidDegree(format!("`{w}` is not a 2-form on the base")));
            }
            if i < j {
                rebuilt = &rebuilt + &(&(&GradedPoly::generator(ctx, dx(i)) * &GradedPoly::generator(ctx, dx(j))) * &c);
            }
            rows[i][j] = c;
        }
    }
    if rebuilt != *w {
        return Err(Error::InvalidDegree(format!("`{w}` is not a 2-form on the base")));
    }
    Ok(rows)
}

fn phi_components(phi: &GradedPoly) -> Result<Vec<GradedPoly>> {
    one_form_components(&scalar_form(phi)?)
}

/// Checks `d phi = 0`, `d w = phi ^ w` and non-degeneracy of `w`.
pub fn check_lcs(phi: &GradedPoly, w: &GradedPoly) -> Result<Report> {
    let phi = phi.transport(w.context())?;
    phi_components(&phi)?;
    let mat = two_form_matrix(w)?;
    let mut report = Report::new("lcs structure");
    let dphi = d(&phi);
    report.push(Check::new("d phi = 0", 1, (!dphi.is_zero()).then(|| format!("d phi = {dphi}"))));
    let defect = &d(w) - &(&phi * w);
    report.push(Check::new("d w = phi ^ w", 1, (!defect.is_zero()).then(|| format!("d w - phi ^ w = {defect}"))));
    let (verdict, _) = square_nondegeneracy(&mat);
    match &verdict {
        Nondegeneracy::Degenerate => return Err(Error::NotNondegenerate),
        Nondegeneracy::Generic { .. } => report.note(format!("w is {verdict}")),
        Nondegeneracy::Everywhere => {}
    }
    report.push(Check::pass("w non-degenerate", 1));
    Ok(report)
}

/// Hamiltonian vector fields and brackets of an lcs structure on the
/// function basis `1, x^i`.
#[derive(Debug, Clone)]
pub struct LcsJacobi {
    pub ctx: Arc<GradedContext>,
    pub basis: Vec<GradedPoly>,
    /// `X_f` for each basis function, solving `i_{X_f} w = df - f phi`.
    pub hamiltonian: Vec<Vec<LocalFn>>,
    /// `{f, g} = X_f(g) - g phi(X_f)`.
    pub table: Vec<Vec<LocalFn>>,
    /// The Jacobi pair with `{f,g} = Lambda(df,dg) + f E(g) - g E(f)`.
    pub lambda: Vec<Vec<LocalFn>>,
    pub reeb: Vec<LocalFn>,
    pub denominator: GradedPoly,
}

impl LcsJacobi {
    /// The Jacobi pair, when no denominators occur.
    pub fn jacobi_pair(&self) -> Option<JacobiPair> {
        if !self.denominator.is_constant() {
            return None;
        }
        let m = self.ctx.num_base();
        let mut entries = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                entries.push((i, j, self.lambda[i][j].as_poly()?.clone()));
            }
        }
        let e: Vec<GradedPoly> = self.reeb.iter().map(|r| r.as_poly().cloned()).collect::<Option<_>>()?;
        let lam = MultivectorField::bivector(&self.ctx, &entries).ok()?;
        JacobiPair::new(lam, MultivectorField::vector(&self.ctx, &e).ok()?).ok()
    }

    pub fn rows(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (a, f) in self.basis.iter().enumerate() {
            for (b, g) in self.basis.iter().enumerate().skip(a + 1) {
                out.push(format!("{{{f}, {g}}} = {}", self.table[a][b]));
            }
        }
        out
    }
}

/// Solves for Hamiltonian vector fields over the fraction field of base
/// polynomials, with the determinant of `w` as common denominator.
pub fn lcs_to_jacobi(phi: &GradedPoly, w: &GradedPoly) -> Result<LcsJacobi> {
    let ctx = w.context().clone();
    let phi = phi.transport(&ctx)?;
    let ph = phi_components(&phi)?;
    let mat = two_form_matrix(w)?;
    let m = ctx.num_base();
    let (verdict, det) = square_nondegeneracy(&mat);
    if verdict == Nondegeneracy::Degenerate {
        return Err(Error::NotNondegenerate);
    }
    let det = det.unwrap_or_else(|| GradedPoly::one(&ctx));
    // X = W^{-T} alpha = adj(W^T) alpha / det
    let adj = if m == 0 { Vec::new() } else { adjugate(&transpose(&mat)) };
    let sharp = |alpha: &[GradedPoly]| -> Vec<GradedPoly> {
        (0..m)
            .map(|k| {
                let mut acc = GradedPoly::zero(&ctx);
                for (j, a) in alpha.iter().enumerate() {
                    acc = &acc + &(&adj[k][j] * a);
                }
                acc
            })
            .collect()
    };
    let mut basis = vec![GradedPoly::one(&ctx)];
    basis.extend((0..m).map(|i| GradedPoly::generator(&ctx, ctx.base_index(i))));
    let mut hamiltonian = Vec::new();
    let mut nums = Vec::new();
    for f in &basis {
        let alpha: Vec<GradedPoly> = (0..m).map(|i| &f.partial(ctx.base_index(i)) - &(f * &ph[i])).collect();
        let x = sharp(&alpha);
        hamiltonian.push(x.iter().map(|c| LocalFn::new(c.clone(), det.clone())).collect());
        nums.push(x);
    }
    let mut table = Vec::new();
    for (a, _) in basis.iter().enumerate() {
        let mut row = Vec::new();
        for g in &basis {
            let mut num = GradedPoly::zero(&ctx);
            for k in 0..m {
                num = &num + &(&nums[a][k] * &(&g.partial(ctx.base_index(k)) - &(g * &ph[k])));
            }
            row.push(LocalFn::new(num, det.clone()));
        }
        table.push(row);
    }
    let mut lambda = Vec::new();
    for j in 0..m {
        lambda.push((0..m).map(|k| LocalFn::new(adj[k][j].clone(), det.clone())).collect());
    }
    let sp = sharp(&ph);
    let reeb = sp.into_iter().map(|c| LocalFn::new(-&c, det.clone())).collect();
    Ok(LcsJacobi { ctx, basis, hamiltonian, table, lambda, reeb, denominator: det })
}

/// Frame element trivializing `L`.
pub const LCS_FRAME: &str = "e";

/// The context `T*[1]M (x) L` over the given base: fibers `p_x`, frame `e`.
pub fn lcs_context(base: &[String]) -> Result<Arc<GradedContext>> {
    let fibers: Vec<String> = base.iter().map(|x| format!("p_{x}")).collect();
    algebroid_context(base, &fibers, &[LCS_FRAME.to_string()])
}

fn require_lcs_layout(ctx: &GradedContext) -> Result<()> {
    crate::algebroid::require_degree_one(ctx)?;
    if ctx.num_fiber() != ctx.num_base() || ctx.frame_names().len() != 1 {
        return Err(Error::FrameMismatch("T*[1]M (x) L needs dim M fibers and a one element frame".into()));
    }
    Ok(())
}

fn connection_components(ctx: &Arc<GradedContext>, phi: &GradedPoly) -> Result<Vec<GradedPoly>> {
    let base = GradedContext::builder().bases(ctx.base_names().iter().map(String::as_str)).build()?;
    let ph = phi_components(&phi.transport(&base)?)?;
    let closed = d(&phi.transport(&base)?);
    if !closed.is_zero() {
        return Err(Error::NonClosedConnectionForm(format!("d phi = {closed}")));
    }
    ph.iter().map(|p| p.transport(ctx)).collect()
}

/// Spencer data `(-d_nabla, id)` of `w = d_nabla theta`, where
/// `nabla e = -phi e`: `l(d/dp_i) = dx^i e`, `D(d/dp_i) = phi ^ dx^i e`.
pub fn lcs_spencer_data(ctx: &Arc<GradedContext>, phi: &GradedPoly) -> Result<SpencerData> {
    require_lcs_layout(ctx)?;
    let ph = connection_components(ctx, phi)?;
    let mut phi_form = GradedPoly::zero(ctx);
    for (i, c) in ph.iter().enumerate() {
        phi_form = &phi_form + &(c * &GradedPoly::differential_of(ctx, ctx.base_index(i)));
    }
    let first = ctx.fiber_index(0);
    SpencerData::from_fn(
        ctx,
        2,
        1,
        |b| {
            let i = b.target - first;
            Ok(VectorValuedForm::along(&phi_form * &GradedPoly::differential_of(ctx, ctx.base_index(i)), 0))
        },
        |b| {
            let i = b.target - first;
            Ok(VectorValuedForm::along(GradedPoly::differential_of(ctx, ctx.base_index(i)), 0))
        },
    )
}

/// The canonical `L`-valued 2-form `d_nabla theta` on `T*[1]M (x) L`.
pub fn lcs_form(ctx: &Arc<GradedContext>, phi: &GradedPoly) -> Result<VectorValuedForm> {
    reconstruct_form(&lcs_spencer_data(ctx, phi)?)
}

/// The algebroid `T*M (x) L` of a candidate lc-Poisson pair with its
/// representation on `L`, in the frame `eps_i = dx^i e`. With
/// `Z^i = phi_k P^{ki}`: `rho(eps_i) = P^{ij} d/dx^j`, `nabla_{eps_i} e = Z^i e`,
/// `[[eps_i, eps_j]] = (d_k P^{ij} + P^{ij} phi_k) eps_k + Z^i eps_j - Z^j eps_i`.
pub fn lcs_algebroid(ctx: &Arc<GradedContext>, phi: &GradedPoly, p: &MultivectorField) -> Result<AlgebroidData> {
    require_lcs_layout(ctx)?;
    let ph = connection_components(ctx, phi)?;
    let p = p.transport(ctx)?;
    let m = ctx.num_base();
    let z: Vec<GradedPoly> = (0..m)
        .map(|i| {
            let mut acc = GradedPoly::zero(ctx);
            for (k, c) in ph.iter().enumerate() {
                acc = &acc + &(c * &p.get(&[k, i]));
            }
            acc
        })
        .collect();
    let mut a = AlgebroidData::abelian(ctx)?;
    for i in 0..m {
        for j in 0..m {
            a.set_anchor(i, j, p.get(&[i, j]));
        }
        a.set_theta(i, 0, 0, z[i].clone());
    }
    for i in 0..m {
        for j in i + 1..m {
            let pij = p.get(&[i, j]);
            for k in 0..m {
                let mut c = &pij.partial(ctx.base_index(k)) + &(&pij * &ph[k]);
                if k == j {
                    c = &c + &z[i];
                }
                if k == i {
                    c = &c - &z[j];
                }
                a.set_structure(i, j, k, c);
            }
        }
    }
    Ok(a)
}

/// Coefficient `c` in `[P, P] = c i_phi P ^ P` for the normalization of
/// [`schouten_bracket`] and [`MultivectorField::contract`].
pub const LCP_CONSTANT: i64 = 2;

/// Witness for `[P, P] = c i_phi P ^ P`, if it fails.
pub fn lcp_witness(phi: &GradedPoly, p: &MultivectorField) -> Result<Option<String>> {
    let base = p.context();
    let ph = phi_components(&phi.transport(base)?)?;
    let pp = schouten_bracket(p, p)?;
    let rhs = p.contract(&ph)?.wedge(p)?.scale(&rat(LCP_CONSTANT));
    let diff = pp.try_sub(&rhs)?;
    Ok(diff
        .first_nonzero()
        .map(|(idx, c)| format!("[P,P] - {LCP_CONSTANT} i_phi P ^ P has {c} on {}", diff.index_label(&idx))))
}

/// Builds `T*[1]M (x) L`, `w = d_nabla theta` and the homological derivation
/// of a candidate lc-Poisson pair, and compares compatibility with the
/// Schouten-side condition.
pub fn check_lcs_nq(phi: &GradedPoly, p: &MultivectorField) -> Result<Report> {
    if p.degree() != 2 {
        return Err(Error::ArityMismatch("P must be a bivector".into()));
    }
    let ctx = lcs_context(p.context().base_names())?;
    let a = lcs_algebroid(&ctx, phi, p)?;
    let w = lcs_form(&ctx, phi)?;
    let q = build_homological_derivation(&a)?;
    let c = compat_report(&q, &w)?;
    let mut report = Report::new("lcs NQ-manifold");
    report.push(Check::new("[Q,Q] = 0", 1, c.homological_witness.clone()));
    report.push(Check::new("L_Q w = 0", 1, (!c.direct).then(|| c.witness().unwrap_or_default())));
    report.push(Check::new(
        "obstructions agree with L_Q w",
        c.pairs_checked,
        (!c.agreement).then(|| "obstruction verdict differs".to_string()),
    ));
    let lcp = lcp_witness(phi, p)?;
    let schouten = lcp.is_none();
    report.push(Check::new(format!("[P,P] = {LCP_CONSTANT} i_phi P ^ P"), 1, lcp).informational());
    let agree = (schouten != c.passes())
        .then(|| format!("Schouten verdict {schouten}, compatibility verdict {}", c.passes()));
    report.push(Check::new("Schouten side agrees with compatibility", 1, agree));
    report.note(format!("w = {w}"));
    Ok(report)
}
