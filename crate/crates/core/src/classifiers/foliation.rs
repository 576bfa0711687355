//! IM foliations of a Lie algebroid over `TM` and the involutive
//! distributions on `A[1]` they correspond to.

use std::sync::Arc;

use crate::algebroid::{check_homological, AlgebroidData};
use crate::classifiers::spencer_op::algebroid_q;
use crate::classifiers::compat::compat_report;
use crate::classifiers::rank::{adjugate, determinant};
use crate::classifiers::{Check, Report};
use crate::context::GradedContext;
use crate::error::{Error, Result};
use crate::form::VectorValuedForm;
use crate::poly::{rat, GradedPoly};
use crate::spencer::{reconstruct_form, SpencerData};

/// Where the `A`-connection on `A/B` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuotientConnection {
    /// Solved from `nabla^{A/B}_X (Y mod B) = nabla_{rho Y} (X mod B) - [[Y,X]] mod B`.
    Derived,
    /// The representation stored in the algebroid.
    Explicit,
}

/// A subbundle `B` spanned by sections of `A`, and a flat `TM`-connection
/// on `A/B` in the frame of the algebroid context.
#[derive(Debug, Clone)]
pub struct FoliationData {
    /// Rows are sections of `A` in the `A`-frame.
    pub subframe: Vec<Vec<GradedPoly>>,
    /// `connection[i][c2][c]`: `nabla_{d/dx^i} e_c = connection[i][c2][c] e_c2`.
    pub connection: Vec<Vec<Vec<GradedPoly>>>,
    pub quotient: QuotientConnection,
}

impl FoliationData {
    /// Trivial connection in the chosen quotient frame.
    pub fn trivial(ctx: &Arc<GradedContext>, subframe: Vec<Vec<GradedPoly>>) -> Self {
        let q = ctx.frame_names().len();
        FoliationData {
            subframe,
            connection: vec![vec![vec![GradedPoly::zero(ctx); q]; q]; ctx.num_base()],
            quotient: QuotientConnection::Derived,
        }
    }

    /// `B` spanned by the frame elements with the given indices.
    pub fn coordinate(ctx: &Arc<GradedContext>, indices: &[usize]) -> Self {
        let r = ctx.num_fiber();
        let rows = indices
            .iter()
            .map(|&a| (0..r).map(|b| if a == b { GradedPoly::one(ctx) } else { GradedPoly::zero(ctx) }).collect())
            .collect();
        Self::trivial(ctx, rows)
    }
}

/// Projection `A -> A/B` in the split frame, with the complementary
/// frame elements mapping to the quotient frame.
struct Quotient {
    ctx: Arc<GradedContext>,
    q: usize,
    /// Frame elements of `A` whose images form the quotient frame.
    comp: Vec<usize>,
    /// `proj[a]` = components of `e_a mod B`.
    proj: Vec<Vec<GradedPoly>>,
    gamma: Vec<Vec<Vec<GradedPoly>>>,
}

type Section = Vec<GradedPoly>;

impl Quotient {
    fn build(a: &AlgebroidData, f: &FoliationData) -> Result<Self> {
        let ctx = a.context().clone();
        let r = a.rank();
        let s = f.subframe.len();
        if f.subframe.iter().any(|row| row.len() != r) {
            return Err(Error::ArityMismatch(format!("subframe rows must have {r} entries")));
        }
        let q = r - s.min(r);
        let frame = if ctx.has_frame() { ctx.frame_names().len() } else { 0 };
        if s > r || frame != q {
            return Err(Error::FrameMismatch(format!(
                "rank A = {r}, rank B = {s}, but the context has {frame} quotient frame elements"
            )));
        }
        let m = ctx.num_base();
        if f.connection.len() != m || f.connection.iter().any(|g| g.len() != q || g.iter().any(|row| row.len() != q)) {
            return Err(Error::ArityMismatch(format!("connection must be {m} matrices of size {q}")));
        }
        let b: Vec<Vec<GradedPoly>> =
            f.subframe.iter().map(|row| row.iter().map(|p| p.transport(&ctx)).collect::<Result<_>>()).collect::<Result<_>>()?;
        // columns J of a constant maximal minor
        let mut chosen = None;
        let mut first_locus = None;
        for cols in subsets(r, s) {
            let sub: Vec<Vec<GradedPoly>> = b.iter().map(|row| cols.iter().map(|&c| row[c].clone()).collect()).collect();
            let det = if s == 0 { GradedPoly::one(&ctx) } else { determinant(&sub) };
            if det.is_zero() {
                continue;
            }
            if det.is_constant() {
                chosen = Some((cols, sub, det));
                break;
            }
            first_locus.get_or_insert(det);
        }
        let Some((cols, mj, det)) = chosen else {
            return Err(Error::RankDrop(match first_locus {
                Some(l) => format!("B drops rank where {l} = 0"),
                None => "B is not of full rank anywhere".into(),
            }));
        };
        let comp: Vec<usize> = (0..r).filter(|a| !cols.contains(a)).collect();
        let inv_scale = rat(1) / det.constant_term();
        let adj = if s == 0 { Vec::new() } else { adjugate(&mj) };
        let mut proj = vec![vec![GradedPoly::zero(&ctx); q]; r];
        for (k, &c) in comp.iter().enumerate() {
            proj[c][k] = GradedPoly::one(&ctx);
        }
        // e_J = -M_J^{-1} b_C e_C mod B
        for (jp, &j) in cols.iter().enumerate() {
            for (k, &c) in comp.iter().enumerate() {
                let mut acc = GradedPoly::zero(&ctx);
                for (i, row) in b.iter().enumerate() {
                    acc = &acc + &(&adj[jp][i] * &row[c]);
                }
                proj[j][k] = -&acc.scale(&inv_scale);
            }
        }
        let gamma = f
            .connection
            .iter()
            .map(|g| g.iter().map(|row| row.iter().map(|p| p.transport(&ctx)).collect::<Result<_>>()).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        Ok(Quotient { ctx, q, comp, proj, gamma })
    }

    fn zero(&self) -> Section {
        vec![GradedPoly::zero(&self.ctx); self.q]
    }

    fn add(&self, s: &Section, t: &Section) -> Section {
        s.iter().zip(t).map(|(a, b)| a + b).collect()
    }

    fn sub(&self, s: &Section, t: &Section) -> Section {
        s.iter().zip(t).map(|(a, b)| a - b).collect()
    }

    fn mul(&self, f: &GradedPoly, s: &Section) -> Section {
        s.iter().map(|a| f * a).collect()
    }

    /// `X mod B` for `X = sum_a x[a] e_a`.
    fn project(&self, x: &[GradedPoly]) -> Section {
        let mut out = self.zero();
        for (a, xa) in x.iter().enumerate() {
            out = self.add(&out, &self.mul(xa, &self.proj[a]));
        }
        out
    }

    fn frame(&self, a: usize) -> Section {
        self.proj[a].clone()
    }

    /// `nabla_Z s` for a vector field `Z` on the base.
    fn nabla(&self, z: &[GradedPoly], s: &Section) -> Section {
        let mut out = self.zero();
        for (i, zi) in z.iter().enumerate() {
            if zi.is_zero() {
                continue;
            }
            for c2 in 0..self.q {
                let mut acc = s[c2].partial(self.ctx.base_index(i));
                for c in 0..self.q {
                    acc = &acc + &(&self.gamma[i][c2][c] * &s[c]);
                }
                out[c2] = &out[c2] + &(zi * &acc);
            }
        }
        out
    }

    fn coordinate(&self, i: usize) -> Vec<GradedPoly> {
        (0..self.ctx.num_base())
            .map(|k| if k == i { GradedPoly::one(&self.ctx) } else { GradedPoly::zero(&self.ctx) })
            .collect()
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn anchor(a: &AlgebroidData, x: usize) -> Vec<GradedPoly> {
    a.anchor_row(x).to_vec()
}

/// `nabla^{A/B}_{e_a} s = rho_a(s) + theta_a s`.
fn quotient_nabla(a: &AlgebroidData, qt: &Quotient, x: usize, s: &Section) -> Section {
    (0..qt.q)
        .map(|c2| {
            let mut acc = a.anchor_apply(x, &s[c2]);
            for (c, sc) in s.iter().enumerate() {
                acc = &acc + &(&a.theta(x, c2, c) * sc);
            }
            acc
        })
        .collect()
}

fn bracket_mod_b(a: &AlgebroidData, qt: &Quotient, x: usize, y: usize) -> Section {
    let c: Vec<GradedPoly> = (0..a.rank()).map(|k| a.structure(x, y, k).clone()).collect();
    qt.project(&c)
}

/// `nabla_{rho Y} (X mod B) - [[Y,X]] mod B` on frame elements.
fn imf1_rhs(a: &AlgebroidData, qt: &Quotient, x: usize, y: usize) -> Section {
    qt.sub(&qt.nabla(&anchor(a, y), &qt.frame(x)), &bracket_mod_b(a, qt, y, x))
}

fn section_label(ctx: &GradedContext, s: &Section) -> String {
    let parts: Vec<String> = s
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(c, p)| format!("({p}) {}", ctx.frame_names()[c]))
        .collect();
    if parts.is_empty() { "0".into() } else { parts.join(" + ") }
}

/// The algebroid with the quotient connection installed as its representation.
pub fn foliation_algebroid(a: &AlgebroidData, f: &FoliationData) -> Result<AlgebroidData> {
    let qt = Quotient::build(a, f)?;
    let mut out = a.clone();
    if f.quotient == QuotientConnection::Derived {
        for x in 0..a.rank() {
            for (k, &y) in qt.comp.iter().enumerate() {
                let rhs = imf1_rhs(a, &qt, x, y);
                for (c2, v) in rhs.into_iter().enumerate() {
                    out.set_theta(x, c2, k, v);
                }
            }
        }
    }
    Ok(out)
}

/// Spencer data `(-d_nabla o l, l)` of the distribution 1-form, `l` the
/// projection `A -> A/B`.
pub fn distribution_spencer_data(a: &AlgebroidData, f: &FoliationData) -> Result<SpencerData> {
    let qt = Quotient::build(a, f)?;
    let ctx = a.context().clone();
    let first = ctx.fiber_index(0);
    let pad = |s: Section| -> Result<VectorValuedForm> {
        let mut comps = s;
        comps.resize(ctx.rank(), GradedPoly::zero(&ctx));
        VectorValuedForm::new(&ctx, comps)
    };
    SpencerData::from_fn(
        &ctx,
        1,
        1,
        |b| {
            let l = qt.frame(b.target - first);
            let mut dl = qt.zero();
            for i in 0..ctx.num_base() {
                let dx = GradedPoly::differential_of(&ctx, ctx.base_index(i));
                dl = qt.add(&dl, &qt.mul(&dx, &qt.nabla(&qt.coordinate(i), &l)));
            }
            pad(dl.iter().map(|p| -p).collect())
        },
        |b| pad(qt.frame(b.target - first)),
    )
}

/// The `A/B`-valued distribution 1-form `theta_D`.
pub fn distribution_form(a: &AlgebroidData, f: &FoliationData) -> Result<VectorValuedForm> {
    reconstruct_form(&distribution_spencer_data(a, f)?)
}

/// Checks the IM foliation conditions over `TM` on frame pairs and,
/// independently, compatibility of the distribution 1-form with the
/// homological derivation; the two verdicts must agree.
pub fn check_im_foliation(a: &AlgebroidData, f: &FoliationData) -> Result<Report> {
    let qt = Quotient::build(a, f)?;
    let ctx = a.context().clone();
    let m = ctx.num_base();
    let r = a.rank();
    let full = foliation_algebroid(a, f)?;
    let mut report = Report::new("IM foliation over TM");
    report.note(format!("rank B = {}, rank A/B = {}", f.subframe.len(), qt.q));

    // flatness of nabla on A/B
    let mut curv = None;
    let mut n = 0;
    'flat: for i in 0..m {
        for j in i + 1..m {
            for c in 0..qt.q {
                n += 1;
                let mut e = qt.zero();
                e[c] = GradedPoly::one(&ctx);
                let (zi, zj) = (qt.coordinate(i), qt.coordinate(j));
                let k = qt.sub(&qt.nabla(&zi, &qt.nabla(&zj, &e)), &qt.nabla(&zj, &qt.nabla(&zi, &e)));
                if k.iter().any(|p| !p.is_zero()) {
                    curv = Some(format!("R(d/d{}, d/d{}) {} = {}", ctx.base_names()[i], ctx.base_names()[j], ctx.frame_names()[c], section_label(&ctx, &k)));
                    break 'flat;
                }
            }
        }
    }
    report.push(Check::new("nabla flat", n, curv));

    let mut w1 = None;
    for x in 0..r {
        for y in 0..r {
            let lhs = quotient_nabla(&full, &qt, x, &qt.frame(y));
            let rhs = imf1_rhs(&full, &qt, x, y);
            if lhs != rhs {
                w1 = Some(format!(
                    "X = {}, Y = {}: nabla^(A/B)_X (Y mod B) = {}, expected {}",
                    full.frame_names()[x],
                    full.frame_names()[y],
                    section_label(&ctx, &lhs),
                    section_label(&ctx, &rhs)
                ));
                break;
            }
        }
        if w1.is_some() {
            break;
        }
    }
    report.push(Check::new("nabla^(A/B)_X (Y mod B) = nabla_(rho Y) (X mod B) - [[Y,X]] mod B", r * r, w1));

    let q_der = algebroid_q(&full)?;
    let hom = check_homological(&q_der)?;
    report.push(Check::new(
        "algebroid with nabla^(A/B) is flat",
        1,
        hom.witness.as_ref().map(|(loc, p)| format!("[Q,Q] has {p} at {loc}")),
    ));

    // d_nabla([[X,Y]] mod B) = L_{nabla_X} d_nabla(Y mod B) - L_{nabla_Y} d_nabla(X mod B),
    // evaluated on d/dx^i
    let mut w3 = None;
    let mut n3 = 0;
    'imf3: for x in 0..r {
        for y in x + 1..r {
            for i in 0..m {
                n3 += 1;
                let z = qt.coordinate(i);
                let term = |u: usize, v: usize| -> Section {
                    let inner = qt.nabla(&z, &qt.frame(v));
                    let first = quotient_nabla(&full, &qt, u, &inner);
                    // [rho U, d/dx^i] = -d_i(rho_U^k) d/dx^k
                    let comm: Vec<GradedPoly> = anchor(&full, u).iter().map(|p| -&p.partial(ctx.base_index(i))).collect();
                    qt.sub(&first, &qt.nabla(&comm, &qt.frame(v)))
                };
                let s = qt.add(&qt.sub(&qt.nabla(&z, &bracket_mod_b(&full, &qt, x, y)), &term(x, y)), &term(y, x));
                if s.iter().any(|p| !p.is_zero()) {
                    w3 = Some(format!(
                        "X = {}, Y = {}, Z = d/d{}: defect {}",
                        full.frame_names()[x],
                        full.frame_names()[y],
                        ctx.base_names()[i],
                        section_label(&ctx, &s)
                    ));
                    break 'imf3;
                }
            }
        }
    }
    report.push(Check::new(
        "d_nabla([[X,Y]] mod B) = L_(nabla X) d_nabla(Y mod B) - L_(nabla Y) d_nabla(X mod B)",
        n3,
        w3,
    ));
    let im = report.checks.iter().all(|c| c.passed);

    let theta = distribution_form(a, f)?;
    let c = compat_report(&q_der, &theta)?;
    let flat = report.checks[0].passed;
    let dist = c.passes() && flat;
    report.push(
        Check::new("L_Q theta_D = 0", 1, (!c.passes()).then(|| c.witness().unwrap_or_else(|| "[Q,Q] != 0".into())))
            .informational(),
    );
    let agree = (im != dist).then(|| format!("IM verdict {im}, distribution verdict {dist}"));
    report.push(Check::new("agrees with compatible involutive distribution", 1, agree));
    report.note(format!("theta_D = {theta}"));
    Ok(report)
}
