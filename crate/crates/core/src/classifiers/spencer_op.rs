//! Spencer operators and IM k-plectic structures on Lie algebroids, each
//! cross-checked against compatibility of the corresponding form.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebroid::{build_homological_derivation, build_homological_vf, check_homological, AlgebroidData};
use crate::cartan::{de_rham, insertion, lie};
use crate::classifiers::compat::compat_report;
use crate::classifiers::rank::{row_injectivity, Nondegeneracy};
use crate::classifiers::{Check, Report};
use crate::context::GradedContext;
use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::form::VectorValuedForm;
use crate::poly::{GradedPoly, Monomial};
use crate::spencer::{reconstruct_unchecked, validate_spencer, SpencerCondition, SpencerData};

/// `Q` of the algebroid, with frame action when the context has a frame.
pub fn algebroid_q(a: &AlgebroidData) -> Result<Derivation> {
    if a.context().has_frame() {
        build_homological_derivation(a)
    } else {
        build_homological_vf(a)
    }
}

fn require_homological(q: &Derivation) -> Result<()> {
    let h = check_homological(q)?;
    match h.witness {
        Some((loc, p)) => Err(Error::NotHomological(format!("[Q,Q] has `{p}` at {loc}"))),
        None => Ok(()),
    }
}

/// Spencer data `(-d_nabla l, l)` of order `k` and degree one, where `l`
/// assigns a (k-1)-form on the base to each frame element of `A`.
pub fn exterior_spencer_data(ctx: &Arc<GradedContext>, k: u32, ell: &[VectorValuedForm]) -> Result<SpencerData> {
    if ell.len() != ctx.num_fiber() {
        return Err(Error::ArityMismatch(format!("{} values of l for rank {}", ell.len(), ctx.num_fiber())));
    }
    let ell: Vec<VectorValuedForm> = ell.iter().map(|l| l.transport(ctx)).collect::<Result<_>>()?;
    let mut d_values = Vec::new();
    let mut l_values = Vec::new();
    let basis = crate::spencer::NegBasis::new(ctx);
    for b in basis.fields() {
        let a = b.target - ctx.fiber_index(0);
        d_values.push(de_rham(&ell[a])?.neg());
        l_values.push(ell[a].clone());
    }
    SpencerData::new(ctx, k, 1, d_values, l_values)
}

fn first_residue(r: &VectorValuedForm) -> Option<String> {
    if r.is_zero() {
        None
    } else {
        Some(r.to_string())
    }
}

struct PairLoop {
    checked: usize,
    witness: Option<String>,
}

impl PairLoop {
    fn new() -> Self {
        PairLoop { checked: 0, witness: None }
    }

    fn record(&mut self, label: impl FnOnce() -> String, residue: &VectorValuedForm) {
        self.checked += 1;
        if self.witness.is_none() {
            if let Some(r) = first_residue(residue) {
                self.witness = Some(format!("{}: {r}", label()));
            }
        }
    }

    fn into_check(self, name: &str) -> Check {
        Check::new(name, self.checked, self.witness)
    }
}

/// Checks the Leibniz rule and the three pair identities of a Spencer
/// operator on the frame of `A`, and compares with compatibility of the
/// reconstructed form with `Q`.
pub fn check_spencer_operator(a: &AlgebroidData, s: &SpencerData) -> Result<Report> {
    let ctx = a.context();
    if !s.context().same_layout(ctx) {
        return Err(Error::ContextMismatch);
    }
    crate::algebroid::require_degree_one(ctx)?;
    let q = algebroid_q(a)?;
    require_homological(&q)?;

    let mut report = Report::new(format!("Spencer operator of order {}", s.order()));
    let validation = validate_spencer(s);
    for c in [SpencerCondition::Degrees, SpencerCondition::Leibniz] {
        let n = validation.checked.get(&c).copied().unwrap_or(0);
        let w = validation.first_failure(c).map(|f| format!("{} at {}: {}", c.short(), f.location, f.residue));
        report.push(Check::new(c.label(), n, w));
    }

    let names = a.frame_names();
    let r = a.rank();
    let mut nabla = Vec::new();
    let mut anchor_ins = Vec::new();
    for i in 0..r {
        nabla.push(lie(&a.connection_field(i))?);
        anchor_ins.push(insertion(&a.anchor_field(i))?);
    }
    let bj = |i: usize| s.basis().coordinate_field(ctx, ctx.fiber_index(i));
    let mut im3 = PairLoop::new();
    let mut mixed = PairLoop::new();
    let mut sym = PairLoop::new();
    for x in 0..r {
        for y in 0..r {
            let label = || format!("({}, {})", names[x], names[y]);
            let (dx, lx) = (s.d_value(bj(x)), s.l_value(bj(x)));
            let (dy, ly) = (s.d_value(bj(y)), s.l_value(bj(y)));
            let br = a.bracket_field(x, y);
            if x < y {
                let res = nabla[x].apply(dy)?.sub(&nabla[y].apply(dx)?).sub(&s.d_of(&br)?);
                im3.record(label, &res);
            }
            let res = nabla[x].apply(ly)?.add(&anchor_ins[y].apply(dx)?).sub(&s.l_of(&br)?);
            mixed.record(label, &res);
            if x <= y {
                let res = anchor_ins[x].apply(ly)?.add(&anchor_ins[y].apply(lx)?);
                sym.record(label, &res);
            }
        }
    }
    report.push(im3.into_check("L_{nabla X} D(Y) - L_{nabla Y} D(X) = D([[X,Y]])"));
    report.push(mixed.into_check("L_{nabla X} l(Y) + i_{rho Y} D(X) = l([[X,Y]])"));
    report.push(sym.into_check("i_{rho X} l(Y) + i_{rho Y} l(X) = 0"));

    let operator_verdict = report.passes();
    let compat_verdict = if validation.passes() {
        let w = reconstruct_unchecked(s)?;
        let c = compat_report(&q, &w)?;
        report.note(format!("reconstructed form: {w}"));
        if let Some(wit) = c.witness() {
            report.note(format!("compatibility witness: {wit}"));
        }
        c.passes()
    } else {
        report.note("the data are not Spencer data of any form");
        false
    };
    report.push(agreement_check(operator_verdict, compat_verdict));
    Ok(report)
}

fn agreement_check(structure: bool, compat: bool) -> Check {
    let w = (structure != compat).then(|| format!("structure verdict {structure}, compatibility verdict {compat}"));
    Check::new("agrees with L_Q w = 0", 1, w)
}

/// Splits a polynomial into coefficients (functions on the base) of its
/// monomials in the remaining generators.
pub(crate) fn split_base(p: &GradedPoly) -> BTreeMap<Monomial, GradedPoly> {
    let ctx = p.context();
    let nb = ctx.num_base();
    let mut out: BTreeMap<Monomial, GradedPoly> = BTreeMap::new();
    for (m, c) in p.terms() {
        let mut rest = m.clone();
        let mut base = Monomial::one(m.0.len());
        for i in 0..nb {
            let g = ctx.base_index(i);
            base.0[g] = m.0[g];
            rest.0[g] = 0;
        }
        let term = GradedPoly::from_monomial(ctx, base, c.clone());
        let slot = out.entry(rest).or_insert_with(|| GradedPoly::zero(ctx));
        *slot = &*slot + &term;
    }
    out
}

/// Matrix of a family of forms with respect to the monomials they contain.
pub(crate) fn coefficient_matrix(rows: &[Vec<GradedPoly>]) -> Vec<Vec<GradedPoly>> {
    let mut columns: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
    let split: Vec<Vec<BTreeMap<Monomial, GradedPoly>>> =
        rows.iter().map(|r| r.iter().map(split_base).collect()).collect();
    for row in &split {
        for (alpha, comp) in row.iter().enumerate() {
            for m in comp.keys() {
                let n = columns.len();
                columns.entry((alpha, m.clone())).or_insert(n);
            }
        }
    }
    let order: BTreeMap<usize, usize> = columns.values().enumerate().map(|(pos, &id)| (id, pos)).collect();
    let ncols = columns.len();
    split
        .iter()
        .enumerate()
        .map(|(ri, row)| {
            let ctx = rows[ri].first().map(|p| p.context().clone());
            let mut out: Vec<Option<GradedPoly>> = vec![None; ncols];
            for (alpha, comp) in row.iter().enumerate() {
                for (m, c) in comp {
                    out[order[&columns[&(alpha, m.clone())]]] = Some(c.clone());
                }
            }
            out.into_iter()
                .map(|c| c.unwrap_or_else(|| GradedPoly::zero(ctx.as_ref().expect("nonempty row"))))
                .collect()
        })
        .collect()
}

fn nondegeneracy_check(name: &str, rows: usize, verdict: &Nondegeneracy, report: &mut Report) -> Check {
    if let Nondegeneracy::Generic { locus } = verdict {
        report.note(format!("{name}: generically non-degenerate, a minor vanishes where {locus} = 0"));
    }
    let w = (!verdict.is_nondegenerate()).then(|| format!("{verdict}"));
    Check::new(name, rows, w)
}

fn keep_zero_section(p: &GradedPoly) -> GradedPoly {
    let ctx = p.context();
    let fibers: Vec<usize> = ctx.fiber_indices().collect();
    let terms = p
        .terms()
        .iter()
        .filter(|(m, _)| fibers.iter().all(|&g| m.0[g] == 0))
        .map(|(m, c)| (m.clone(), c.clone()))
        .collect();
    GradedPoly::from_terms(ctx.clone(), terms)
}

/// IM k-plectic conditions for `l: A -> k-forms`, non-degeneracy of `l`,
/// and compatibility of the (k+1)-form with Spencer data `(-d l, l)`.
pub fn check_im_kplectic(a: &AlgebroidData, ell: &[VectorValuedForm], k: u32) -> Result<Report> {
    let ctx = a.context();
    crate::algebroid::require_degree_one(ctx)?;
    if ctx.has_frame() {
        return Err(Error::FrameMismatch("k-plectic forms are scalar".into()));
    }
    let q = algebroid_q(a)?;
    require_homological(&q)?;
    let ell: Vec<VectorValuedForm> = ell.iter().map(|l| l.transport(ctx)).collect::<Result<_>>()?;
    if ell.len() != a.rank() {
        return Err(Error::ArityMismatch(format!("{} values of l for rank {}", ell.len(), a.rank())));
    }
    for (i, l) in ell.iter().enumerate() {
        let c = l.component(0);
        let ok = c.terms().keys().all(|m| ctx.fiber_indices().all(|g| m.0[g] == 0 && m.0[ctx.differential_index(g)] == 0));
        let bad_degree = !l.is_zero()
            && !matches!(l.bidegree(), crate::poly::Homogeneity::Homogeneous(b) if b.form_degree == k && b.internal_degree == 0);
        if !ok || bad_degree {
            return Err(Error::InvalidDegree(format!("l({}) = {l} is not a {k}-form on the base", a.frame_names()[i])));
        }
    }

    let mut report = Report::new(format!("IM {k}-plectic structure"));
    let names = a.frame_names();
    let r = a.rank();
    let mut im1 = PairLoop::new();
    let mut im2 = PairLoop::new();
    let rho_ins: Vec<Derivation> = (0..r).map(|i| insertion(&a.anchor_field(i))).collect::<Result<_>>()?;
    let rho_lie: Vec<Derivation> = (0..r).map(|i| lie(&a.anchor_field(i))).collect::<Result<_>>()?;
    let dl: Vec<VectorValuedForm> = ell.iter().map(de_rham).collect::<Result<_>>()?;
    for x in 0..r {
        for y in 0..r {
            let label = || format!("({}, {})", names[x], names[y]);
            if x <= y {
                let res = rho_ins[x].apply(&ell[y])?.add(&rho_ins[y].apply(&ell[x])?);
                im1.record(label, &res);
            }
            let mut bracket = VectorValuedForm::zero(ctx);
            for c in 0..r {
                bracket = bracket.add(&ell[c].left_mul(a.structure(x, y, c))?);
            }
            let res = rho_lie[x].apply(&ell[y])?.sub(&rho_ins[y].apply(&dl[x])?).sub(&bracket);
            im2.record(label, &res);
        }
    }
    report.push(im1.into_check("IM1: i_{rho X} l(Y) + i_{rho Y} l(X) = 0"));
    report.push(im2.into_check("IM2: L_{rho X} l(Y) - i_{rho Y} d l(X) = l([[X,Y]])"));
    let im_verdict = report.passes();

    // ker l: rows are frame elements.
    let ker_rows: Vec<Vec<GradedPoly>> = ell.iter().map(|l| vec![l.component(0).clone()]).collect();
    let ker = row_injectivity(&coefficient_matrix(&ker_rows));
    let ker_check = nondegeneracy_check("ker l = 0", r, &ker, &mut report);
    // (im l)°: rows are coordinate fields of the base.
    let mut ann_rows = Vec::new();
    for i in 0..ctx.num_base() {
        let z = insertion(&Derivation::coordinate_field(ctx, ctx.base_index(i)))?;
        let row: Vec<GradedPoly> = ell.iter().map(|l| z.apply(l).map(|v| v.component(0).clone())).collect::<Result<_>>()?;
        ann_rows.push(row);
    }
    let ann = row_injectivity(&coefficient_matrix(&ann_rows));
    let ann_check = nondegeneracy_check("(im l)° = 0", ctx.num_base(), &ann, &mut report);
    report.push(ker_check);
    report.push(ann_check);

    let s = exterior_spencer_data(ctx, k + 1, &ell)?;
    let w = reconstruct_unchecked(&s)?;
    report.note(format!("form: {w}"));
    let dw = de_rham(&w)?;
    report.push(Check::new("d w = 0", 1, first_residue(&dw)));

    // Non-degeneracy of w along the zero section against the two blocks.
    let mut full_rows = Vec::new();
    for g in ctx.coordinate_indices() {
        let z = insertion(&Derivation::coordinate_field(ctx, g))?;
        full_rows.push(vec![keep_zero_section(z.apply(&w)?.component(0))]);
    }
    let full = row_injectivity(&coefficient_matrix(&full_rows));
    let block = ker.is_nondegenerate() && ann.is_nondegenerate();
    let w_block = (full.is_nondegenerate() != block)
        .then(|| format!("form verdict {full}, block verdict {block}"));
    report.push(Check::new("zero-section rank matches ker/im blocks", ctx.num_coords(), w_block));

    let c = compat_report(&q, &w)?;
    if let Some(wit) = c.witness() {
        report.note(format!("compatibility witness: {wit}"));
    }
    report.push(agreement_check(im_verdict, c.passes()));
    Ok(report)
}
