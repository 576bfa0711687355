//! Sections of `TM + T*M`, the pairing and Dorfman bracket, and degree one
//! presymplectic NQ-manifolds as morphisms `A -> TM + T*M`.

use std::fmt;
use std::sync::Arc;

use crate::algebroid::AlgebroidData;
use crate::classifiers::compat::compat_report;
use crate::classifiers::multivector::MultivectorField;
use crate::classifiers::poisson::{cotangent_algebroid, cotangent_context};
use crate::classifiers::rank::row_injectivity;
use crate::classifiers::spencer_op::{algebroid_q, exterior_spencer_data};
use crate::classifiers::{Check, Report};
use crate::context::GradedContext;
use crate::error::{Error, Result};
use crate::form::VectorValuedForm;
use crate::poly::GradedPoly;
use crate::spencer::reconstruct_unchecked;

/// A pair (vector field, 1-form) on the base, by coordinate components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub vector: Vec<GradedPoly>,
    pub covector: Vec<GradedPoly>,
}

impl Section {
    pub fn new(vector: Vec<GradedPoly>, covector: Vec<GradedPoly>) -> Result<Self> {
        if vector.len() != covector.len() {
            return Err(Error::ArityMismatch("vector and covector parts differ in length".into()));
        }
        if vector.iter().chain(&covector).any(|p| !p.is_base_function()) {
            return Err(Error::InvalidDegree("section components must be functions on the base".into()));
        }
        Ok(Section { vector, covector })
    }

    pub fn zero(ctx: &Arc<GradedContext>) -> Self {
        let z = vec![GradedPoly::zero(ctx); ctx.num_base()];
        Section { vector: z.clone(), covector: z }
    }

    pub fn is_zero(&self) -> bool {
        self.vector.iter().chain(&self.covector).all(GradedPoly::is_zero)
    }

    fn context(&self) -> Option<&Arc<GradedContext>> {
        self.vector.first().map(|p| p.context())
    }

    pub fn sub(&self, other: &Section) -> Section {
        let f = |a: &[GradedPoly], b: &[GradedPoly]| a.iter().zip(b).map(|(x, y)| x - y).collect();
        Section { vector: f(&self.vector, &other.vector), covector: f(&self.covector, &other.covector) }
    }

    fn label(&self) -> String {
        let Some(ctx) = self.context() else {
            return "(0, 0)".into();
        };
        let names = ctx.base_names();
        let join = |v: &[GradedPoly], pre: &str| {
            let parts: Vec<String> = v
                .iter()
                .zip(names)
                .filter(|(p, _)| !p.is_zero())
                .map(|(p, x)| format!("({p})*{pre}{x}"))
                .collect();
            if parts.is_empty() {
                "0".to_string()
            } else {
                parts.join(" + ")
            }
        };
        format!("({}, {})", join(&self.vector, "d/d"), join(&self.covector, "d"))
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

fn apply_vf(x: &[GradedPoly], f: &GradedPoly) -> GradedPoly {
    let ctx = f.context();
    let mut acc = GradedPoly::zero(ctx);
    for (i, xi) in x.iter().enumerate() {
        if !xi.is_zero() {
            acc = &acc + &(xi * &f.partial(ctx.base_index(i)));
        }
    }
    acc
}

fn check_same_length(s: &Section, t: &Section) -> Result<()> {
    if s.vector.len() != t.vector.len() {
        return Err(Error::ArityMismatch("sections over different bases".into()));
    }
    Ok(())
}

/// `<<(X, s), (X', s')>> = i_X s' + i_X' s`.
pub fn courant_pairing(s: &Section, t: &Section) -> Result<GradedPoly> {
    check_same_length(s, t)?;
    let Some(ctx) = s.context() else {
        return Err(Error::ArityMismatch("sections over a point have no context".into()));
    };
    let mut acc = GradedPoly::zero(ctx);
    for i in 0..s.vector.len() {
        acc = &acc + &(&s.vector[i] * &t.covector[i]);
        acc = &acc + &(&t.vector[i] * &s.covector[i]);
    }
    Ok(acc)
}

/// `[(X, s), (X', s')] = ([X, X'], L_X s' - i_X' ds)`.
pub fn dorfman(s: &Section, t: &Section) -> Result<Section> {
    check_same_length(s, t)?;
    let Some(ctx) = s.context() else {
        return Ok(s.clone());
    };
    let m = s.vector.len();
    let g = |i: usize| ctx.base_index(i);
    let mut vector = Vec::with_capacity(m);
    let mut covector = Vec::with_capacity(m);
    for j in 0..m {
        vector.push(&apply_vf(&s.vector, &t.vector[j]) - &apply_vf(&t.vector, &s.vector[j]));
        let mut c = apply_vf(&s.vector, &t.covector[j]);
        for i in 0..m {
            c = &c + &(&t.covector[i] * &s.vector[i].partial(g(j)));
            let curl = &s.covector[j].partial(g(i)) - &s.covector[i].partial(g(j));
            c = &c - &(&t.vector[i] * &curl);
        }
        covector.push(c);
    }
    Ok(Section { vector, covector })
}

/// A bundle map `Phi: A -> TM + T*M` in the frame of `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracMorphism {
    ctx: Arc<GradedContext>,
    /// `tangent[a][i]`: component along `d/dx^i` of the tangent part of `Phi(e_a)`.
    tangent: Vec<Vec<GradedPoly>>,
    /// `cotangent[a][i]`: component along `dx^i` of `l(e_a)`.
    cotangent: Vec<Vec<GradedPoly>>,
}

/// Coefficients of a 1-form on the base along `dx^i`.
pub(crate) fn one_form_components(l: &VectorValuedForm) -> Result<Vec<GradedPoly>> {
    let ctx = l.context();
    if ctx.rank() != 1 || ctx.has_frame() {
        return Err(Error::FrameMismatch("a scalar 1-form is required".into()));
    }
    let c = l.component(0);
    let mut out = Vec::new();
    let mut rebuilt = GradedPoly::zero(ctx);
    for i in 0..ctx.num_base() {
        let dx = ctx.differential_index(ctx.base_index(i));
        let coeff = c.partial(dx);
        if !coeff.is_base_function() {
            return Err(Error::InvalidDegree(format!("`{c}` is not a 1-form on the base")));
        }
        rebuilt = &rebuilt + &(&GradedPoly::generator(ctx, dx) * &coeff);
        out.push(coeff);
    }
    if rebuilt != *c {
        return Err(Error::InvalidDegree(format!("`{c}` is not a 1-form on the base")));
    }
    Ok(out)
}

impl DiracMorphism {
    pub fn new(
        ctx: &Arc<GradedContext>,
        tangent: Vec<Vec<GradedPoly>>,
        cotangent: Vec<Vec<GradedPoly>>,
    ) -> Result<Self> {
        crate::algebroid::require_degree_one(ctx)?;
        let (r, m) = (ctx.num_fiber(), ctx.num_base());
        let bad = |rows: &Vec<Vec<GradedPoly>>| rows.len() != r || rows.iter().any(|row| row.len() != m);
        if bad(&tangent) || bad(&cotangent) {
            return Err(Error::FrameMismatch(format!("Phi needs {r} rows of {m} entries")));
        }
        if tangent.iter().chain(&cotangent).flatten().any(|p| !p.is_base_function()) {
            return Err(Error::InvalidDegree("entries of Phi must be functions on the base".into()));
        }
        let tangent = tangent.into_iter().map(|row| row.iter().map(|p| p.transport(ctx)).collect()).collect::<Result<_>>()?;
        let cotangent =
            cotangent.into_iter().map(|row| row.iter().map(|p| p.transport(ctx)).collect()).collect::<Result<_>>()?;
        Ok(DiracMorphism { ctx: ctx.clone(), tangent, cotangent })
    }

    /// `Phi = (rho, l)` for 1-forms `l(e_a)`.
    pub fn from_algebroid(a: &AlgebroidData, ell: &[VectorValuedForm]) -> Result<Self> {
        let ctx = a.context();
        if ell.len() != a.rank() {
            return Err(Error::ArityMismatch(format!("{} values of l for rank {}", ell.len(), a.rank())));
        }
        let tangent = (0..a.rank()).map(|i| a.anchor_row(i).to_vec()).collect();
        let cotangent = ell
            .iter()
            .map(|l| one_form_components(&l.transport(ctx)?))
            .collect::<Result<_>>()?;
        Self::new(ctx, tangent, cotangent)
    }

    /// The graph `dx^i -> (P(dx^i), dx^i)` on the cotangent algebroid of `P`.
    pub fn poisson_graph(p: &MultivectorField) -> Result<(AlgebroidData, DiracMorphism)> {
        let ctx = cotangent_context(p.context().base_names())?;
        let a = cotangent_algebroid(&ctx, p)?;
        let m = ctx.num_base();
        let ell: Vec<VectorValuedForm> = (0..m)
            .map(|i| VectorValuedForm::scalar(GradedPoly::differential_of(&ctx, ctx.base_index(i))))
            .collect::<Result<_>>()?;
        let phi = Self::from_algebroid(&a, &ell)?;
        Ok((a, phi))
    }

    pub fn context(&self) -> &Arc<GradedContext> {
        &self.ctx
    }

    pub fn rank(&self) -> usize {
        self.tangent.len()
    }

    pub fn tangent(&self) -> &[Vec<GradedPoly>] {
        &self.tangent
    }

    pub fn cotangent(&self) -> &[Vec<GradedPoly>] {
        &self.cotangent
    }

    /// `Phi(e_a)`.
    pub fn section(&self, a: usize) -> Section {
        Section { vector: self.tangent[a].clone(), covector: self.cotangent[a].clone() }
    }

    /// `Phi(sum_a f^a e_a)`.
    pub fn image(&self, f: &[GradedPoly]) -> Section {
        let mut out = Section::zero(&self.ctx);
        for (a, fa) in f.iter().enumerate() {
            if fa.is_zero() {
                continue;
            }
            for i in 0..self.ctx.num_base() {
                out.vector[i] = &out.vector[i] + &(fa * &self.tangent[a][i]);
                out.covector[i] = &out.covector[i] + &(fa * &self.cotangent[a][i]);
            }
        }
        out
    }

    /// `l(e_a)` as 1-forms.
    pub fn ell_forms(&self) -> Vec<VectorValuedForm> {
        self.cotangent
            .iter()
            .map(|row| {
                let mut acc = GradedPoly::zero(&self.ctx);
                for (i, c) in row.iter().enumerate() {
                    acc = &acc + &(&GradedPoly::differential_of(&self.ctx, self.ctx.base_index(i)) * c);
                }
                VectorValuedForm::scalar(acc).expect("scalar context")
            })
            .collect()
    }
}

const ANCHOR: &str = "(1) tangent part of Phi is the anchor";
const ISOTROPY: &str = "(2) image of Phi is isotropic";
const BRACKET: &str = "(3) Phi intertwines brackets";

fn isotropy_and_bracket(a: &AlgebroidData, phi: &DiracMorphism) -> Result<(Check, Check)> {
    let names = a.frame_names();
    let r = a.rank();
    let (mut iso_w, mut br_w) = (None, None);
    let (mut iso_n, mut br_n) = (0, 0);
    for x in 0..r {
        for y in 0..r {
            let (sx, sy) = (phi.section(x), phi.section(y));
            if x <= y {
                iso_n += 1;
                let p = courant_pairing(&sx, &sy)?;
                if iso_w.is_none() && !p.is_zero() {
                    iso_w = Some(format!("<<Phi({}), Phi({})>> = {p}", names[x], names[y]));
                }
            }
            br_n += 1;
            let c: Vec<GradedPoly> = (0..r).map(|k| a.structure(x, y, k).clone()).collect();
            let diff = phi.image(&c).sub(&dorfman(&sx, &sy)?);
            if br_w.is_none() && !diff.is_zero() {
                br_w = Some(format!("Phi[[{}, {}]] - [Phi({}), Phi({})] = {diff}", names[x], names[y], names[x], names[y]));
            }
        }
    }
    Ok((Check::new(ISOTROPY, iso_n, iso_w), Check::new(BRACKET, br_n, br_w)))
}

/// Conditions (1)-(3) for `Phi`, the rank and kernel conditions under which
/// the image is a Dirac structure, and the compatibility of the 2-form with
/// Spencer data `(-d l, l)`.
pub fn check_presymplectic_nq(a: &AlgebroidData, phi: &DiracMorphism) -> Result<Report> {
    let ctx = a.context();
    if !phi.ctx.same_layout(ctx) {
        return Err(Error::ContextMismatch);
    }
    let names = a.frame_names();
    let m = ctx.num_base();
    let mut report = Report::new("presymplectic NQ-manifold");

    let mut anchor_w = None;
    'outer: for x in 0..a.rank() {
        for i in 0..m {
            if phi.tangent[x][i] != *a.anchor(x, i) {
                anchor_w = Some(format!(
                    "Phi({}) has {} along d/d{}, the anchor has {}",
                    names[x],
                    phi.tangent[x][i],
                    ctx.base_names()[i],
                    a.anchor(x, i)
                ));
                break 'outer;
            }
        }
    }
    report.push(Check::new(ANCHOR, a.rank() * m, anchor_w));
    let (iso, br) = isotropy_and_bracket(a, phi)?;
    report.push(iso);
    report.push(br);

    let rank_w = (a.rank() != m).then(|| format!("rank A = {}, dim M = {m}", a.rank()));
    report.push(Check::new("rank A = dim M", 1, rank_w).informational());
    let rows: Vec<Vec<GradedPoly>> =
        (0..a.rank()).map(|x| phi.tangent[x].iter().chain(&phi.cotangent[x]).cloned().collect()).collect();
    let inj = row_injectivity(&rows);
    let inj_w = (!inj.is_nondegenerate()).then(|| format!("Phi is {inj}"));
    report.push(Check::new("ker l ∩ ker rho = 0", a.rank(), inj_w).informational());
    if let crate::classifiers::Nondegeneracy::Generic { locus } = &inj {
        report.note(format!("Phi is injective away from {locus} = 0"));
    }
    let l_inj = if a.rank() == m { row_injectivity(&phi.cotangent) } else { crate::classifiers::Nondegeneracy::Degenerate };
    let l_w = (!l_inj.is_nondegenerate()).then(|| format!("l: A -> T*M is {l_inj}"));
    report.push(Check::new("w non-degenerate", a.rank(), l_w).informational());

    // The form only sees l; compare with (2), (3) for Phi = (rho, l).
    let ell = phi.ell_forms();
    let q = algebroid_q(a)?;
    let s = exterior_spencer_data(ctx, 2, &ell)?;
    let w = reconstruct_unchecked(&s)?;
    report.note(format!("form: {w}"));
    let compat = compat_report(&q, &w)?;
    if let Some(wit) = compat.witness() {
        report.note(format!("compatibility witness: {wit}"));
    }
    let canonical = DiracMorphism::from_algebroid(a, &ell)?;
    let (iso2, br2) = isotropy_and_bracket(a, &canonical)?;
    let structure = iso2.passed && br2.passed;
    let agree = (structure != compat.passes())
        .then(|| format!("(2)+(3) for (rho, l): {structure}, compatibility: {}", compat.passes()));
    report.push(Check::new("agrees with L_Q w = 0", 1, agree));
    Ok(report)
}
