//! Compatibility `L_Q w = 0` of a vector valued form with a homological
//! derivation, computed directly and through the obstructions `A`, `B`, `C`
//! on pairs of negatively graded basis fields.

use std::fmt;

use crate::algebroid::check_homological;
use crate::cartan::{insertion, lie};
use crate::derivation::{zero_endo, Derivation};
use crate::error::{Error, Result};
use crate::form::VectorValuedForm;
use crate::poly::{rat, Homogeneity, Rational};
use crate::spencer::{extract_spencer, SpencerData};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObstructionKind {
    A,
    B,
    C,
}

impl fmt::Display for ObstructionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ObstructionKind::A => "A",
            ObstructionKind::B => "B",
            ObstructionKind::C => "C",
        };
        write!(f, "{s}")
    }
}

/// A nonzero value of one obstruction on a pair of basis fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Obstruction {
    pub kind: ObstructionKind,
    pub x: String,
    pub y: String,
    pub value: VectorValuedForm,
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}, {}) = {}", self.kind, self.x, self.y, self.value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompatReport {
    pub order: u32,
    pub degree: u32,
    /// `L_Q w = 0`.
    pub direct: bool,
    pub direct_witness: Option<String>,
    /// `[Q, Q] = 0`.
    pub homological: bool,
    pub homological_witness: Option<String>,
    /// Nonzero obstruction values, in basis order.
    pub obstructions: Vec<Obstruction>,
    pub pairs_checked: usize,
    /// Whether the direct verdict equals the obstruction verdict.
    pub agreement: bool,
}

impl CompatReport {
    pub fn passes(&self) -> bool {
        self.homological && self.direct
    }

    pub fn obstructions_vanish(&self) -> bool {
        self.obstructions.is_empty()
    }

    pub fn vanishes(&self, kind: ObstructionKind) -> bool {
        self.obstructions.iter().all(|o| o.kind != kind)
    }

    pub fn first(&self, kind: ObstructionKind) -> Option<&Obstruction> {
        self.obstructions.iter().find(|o| o.kind == kind)
    }

    /// The most informative reason for failure, if any.
    pub fn witness(&self) -> Option<String> {
        if let Some(o) = self.obstructions.first() {
            return Some(o.to_string());
        }
        if let Some(w) = &self.direct_witness {
            return Some(w.clone());
        }
        self.homological_witness.clone()
    }
}

impl fmt::Display for CompatReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "compatibility: {}", if self.passes() { "pass" } else { "fail" })?;
        writeln!(f, "  homological: {}", self.homological)?;
        if let Some(w) = &self.homological_witness {
            writeln!(f, "    [Q,Q] witness: {w}")?;
        }
        writeln!(f, "  direct L_Q w = 0: {}", self.direct)?;
        if let Some(w) = &self.direct_witness {
            writeln!(f, "    witness: {w}")?;
        }
        writeln!(f, "  obstructions on {} pairs: {}", self.pairs_checked, self.obstructions.len())?;
        for o in &self.obstructions {
            writeln!(f, "    {o}")?;
        }
        writeln!(f, "  agreement: {}", self.agreement)
    }
}

fn sign(odd: bool) -> Rational {
    if odd {
        rat(-1)
    } else {
        rat(1)
    }
}

/// Compatibility report for a homological `Q`; fails with `NotHomological`
/// otherwise.
pub fn check_compat(q: &Derivation, w: &VectorValuedForm) -> Result<CompatReport> {
    let report = compat_report(q, w)?;
    if !report.homological {
        return Err(Error::NotHomological(
            report.homological_witness.unwrap_or_else(|| "[Q,Q] != 0".into()),
        ));
    }
    Ok(report)
}

/// Like [`check_compat`] but records `[Q, Q] != 0` in the report instead of
/// failing.
pub fn compat_report(q: &Derivation, w: &VectorValuedForm) -> Result<CompatReport> {
    q.check_context(w.context())?;
    let ctx = w.context().clone();
    let hom = check_homological(q)?;
    let homological_witness = hom.witness.map(|(loc, p)| format!("[Q,Q] has {p} at {loc}"));

    let lq = lie(q)?;
    let lqw = lq.apply(w)?;
    let direct_witness = lqw.first_nonzero().map(|(alpha, p)| {
        if ctx.has_frame() {
            format!("L_Q w has {p} along {}", ctx.frame_names()[alpha])
        } else {
            format!("L_Q w = {p}")
        }
    });
    let direct = direct_witness.is_none();

    let (k, n) = match w.bidegree() {
        Homogeneity::Zero => {
            return Ok(CompatReport {
                order: 0,
                degree: 0,
                direct,
                direct_witness,
                homological: hom.homological,
                homological_witness,
                obstructions: Vec::new(),
                pairs_checked: 0,
                agreement: direct,
            })
        }
        Homogeneity::Homogeneous(b) => (b.form_degree, b.internal_degree),
        Homogeneity::Mixed => return Err(Error::Inhomogeneous(format!("form `{w}`"))),
    };
    if n == 0 {
        return Err(Error::DegreeZero);
    }
    if ctx.degree() > n {
        return Err(Error::UnsupportedContext(format!(
            "obstructions need fiber degrees <= {n}, the context has degree {}",
            ctx.degree()
        )));
    }

    let engine = Obstructions::new(q, w, k, n)?;
    let labels: Vec<String> = engine.spencer.basis().fields().iter().map(|b| b.label(&ctx)).collect();
    let mut obstructions = Vec::new();
    let mut pairs = 0;
    for i in 0..engine.len() {
        for j in 0..engine.len() {
            pairs += 1;
            let vals = engine.values(i, j)?;
            let kinds = [ObstructionKind::A, ObstructionKind::B, ObstructionKind::C];
            for (kind, v) in kinds.into_iter().zip(vals) {
                if !v.is_zero() {
                    obstructions.push(Obstruction {
                        kind,
                        x: labels[i].clone(),
                        y: labels[j].clone(),
                        value: v,
                    });
                }
            }
        }
    }
    obstructions.sort_by_key(|o| o.kind);
    let agreement = direct == obstructions.is_empty();
    Ok(CompatReport {
        order: k,
        degree: n,
        direct,
        direct_witness,
        homological: hom.homological,
        homological_witness,
        obstructions,
        pairs_checked: pairs,
        agreement,
    })
}

struct PerField {
    field: Derivation,
    degree: i32,
    lie: Derivation,
    ins: Derivation,
    lie_qx: Derivation,
    ins_qx: Derivation,
    qx_sym: Derivation,
}

/// Evaluates the obstructions `A`, `B`, `C` of a form on pairs of basis
/// fields of its Spencer data.
pub struct Obstructions {
    spencer: SpencerData,
    lq: Derivation,
    fields: Vec<PerField>,
}

impl Obstructions {
    pub fn new(q: &Derivation, w: &VectorValuedForm, k: u32, n: u32) -> Result<Self> {
        let ctx = w.context().clone();
        q.check_context(&ctx)?;
        let spencer = extract_spencer(w, k, n)?;
        let qsym = q.with_endo(zero_endo(&ctx))?;
        let mut fields = Vec::new();
        for b in spencer.basis().fields() {
            let x = b.to_derivation(&ctx);
            let qx = q.commutator(&x)?;
            let qx_sym = qsym.commutator(&x)?;
            fields.push(PerField {
                degree: x.degree(),
                lie: lie(&x)?,
                ins: insertion(&x)?,
                lie_qx: lie(&qx)?,
                ins_qx: insertion(&qx_sym)?,
                qx_sym,
                field: x,
            });
        }
        Ok(Obstructions { spencer, lq: lie(q)?, fields })
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn spencer(&self) -> &SpencerData {
        &self.spencer
    }

    pub fn field(&self, i: usize) -> &Derivation {
        &self.fields[i].field
    }

    /// `[A(X, Y), B(X, Y), C(X, Y)]` for basis fields `X = #i`, `Y = #j`.
    pub fn values(&self, i: usize, j: usize) -> Result<[VectorValuedForm; 3]> {
        let s = &self.spencer;
        let (px, py) = (&self.fields[i], &self.fields[j]);
        let (dx, lx) = (s.d_value(i), s.l_value(i));
        let (dy, ly) = (s.d_value(j), s.l_value(j));
        let (xd, yd) = (px.degree, py.degree);
        let sxy = sign((xd * yd).rem_euclid(2) == 1);
        let z = px.qx_sym.commutator(&py.field)?;
        let lq = &self.lq;
        let a = s.d_of(&z)?.sub(&px.lie_qx.apply(dy)?).sub(
            &py.lie_qx.apply(dx)?.sub(&lq.apply(&py.lie.apply(dx)?)?).scale(&sxy),
        );
        let b = s
            .l_of(&z)?
            .sub(&px.ins_qx.apply(dy)?.scale(&sign(yd.rem_euclid(2) == 1)))
            .sub(&py.lie_qx.apply(lx)?.sub(&lq.apply(&py.lie.apply(lx)?)?).scale(&sxy));
        let c = px.ins_qx.apply(ly)?.add(
            &py.ins_qx
                .apply(lx)?
                .sub(&lq.apply(&py.ins.apply(lx)?)?)
                .scale(&sign(((xd - 1) * (yd - 1)).rem_euclid(2) == 1)),
        );
        Ok([a, b, c])
    }
}
