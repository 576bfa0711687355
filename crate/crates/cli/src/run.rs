//! Command execution.

use std::time::Instant;

use nqcalc_core::algebroid::check_homological;
use nqcalc_core::cartan::{covariant, de_rham_operator, insertion, lie};
use nqcalc_core::classifiers::contact::{check_contact_nq, jacobi_witnesses};
use nqcalc_core::classifiers::dirac::check_presymplectic_nq;
use nqcalc_core::classifiers::foliation::check_im_foliation;
use nqcalc_core::classifiers::lcs::{check_lcs, check_lcs_nq, lcs_to_jacobi};
use nqcalc_core::classifiers::poisson::{nq_to_poisson, poisson_to_nq, poisson_witness};
use nqcalc_core::classifiers::spencer_op::{algebroid_q, check_im_kplectic, check_spencer_operator};
use nqcalc_core::classifiers::{compat_report, Check, CompatReport, MultivectorField, ObstructionKind, Report};
use nqcalc_core::poly::GradedPoly;
use nqcalc_core::random::{random_form, random_vector_field};
use nqcalc_core::spencer::{extract_spencer, extract_spencer_auto, reconstruct_form, validate_spencer, SpencerData};
use nqcalc_core::{Error, Result, VectorValuedForm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::manifest::{Action, Command, Manifest, Structure};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Error,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Error => "error",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub name: String,
    pub verdict: Verdict,
    pub report: Option<Report>,
    pub error: Option<String>,
    pub elapsed_ms: Option<u128>,
}

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub outcomes: Vec<Outcome>,
}

impl RunReport {
    pub fn passes(&self) -> bool {
        self.outcomes.iter().all(|o| o.verdict == Verdict::Pass)
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.outcomes.iter().filter(|o| o.verdict == v).count()
    }

    pub fn exit_code(&self) -> i32 {
        if self.passes() {
            0
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub only: Option<String>,
    pub seed: u64,
    pub timing: bool,
}

/// The conditions of a compatibility report as checks.
pub fn compat_checks(report: &mut Report, c: &CompatReport) {
    report.push(Check::new("[Q,Q] = 0", 1, c.homological_witness.clone()));
    let direct = (!c.direct).then(|| c.direct_witness.clone().unwrap_or_else(|| "L_Q w != 0".into()));
    report.push(Check::new("L_Q w = 0", 1, direct));
    for kind in [ObstructionKind::A, ObstructionKind::B, ObstructionKind::C] {
        report.push(Check::new(format!("{kind} obstructions vanish"), c.pairs_checked, c.first(kind).map(|o| o.to_string())));
    }
    let agree = (!c.agreement).then(|| "direct verdict differs from the obstruction verdict".to_string());
    report.push(Check::new("obstructions agree with L_Q w", c.pairs_checked, agree));
    report.note(format!("order {}, degree {}", c.order, c.degree));
}

fn verify_algebroid(a: &nqcalc_core::algebroid::AlgebroidData) -> Result<Report> {
    let q = algebroid_q(a)?;
    let h = check_homological(&q)?;
    let mut r = Report::new("Lie algebroid");
    r.push(Check::new("[Q,Q] = 0", 1, h.witness.map(|(loc, p)| format!("{p} at {loc}"))));
    if a.representation().is_some() {
        r.note("Q includes the representation");
    }
    Ok(r)
}

fn compat(a: &nqcalc_core::algebroid::AlgebroidData, w: &VectorValuedForm) -> Result<Report> {
    let q = algebroid_q(a)?;
    let c = compat_report(&q, w)?;
    let mut r = Report::new("compatibility");
    compat_checks(&mut r, &c);
    Ok(r)
}

fn poisson(p: &MultivectorField) -> Result<Report> {
    let nq = poisson_to_nq(p)?;
    let c = nq.compat()?;
    let mut r = Report::new("Poisson NQ-manifold");
    compat_checks(&mut r, &c);
    let w = poisson_witness(p)?;
    let schouten = w.is_none();
    r.push(Check::new("[P,P] = 0", 1, w).informational());
    let agree = (schouten != c.passes()).then(|| format!("Schouten verdict {schouten}, compatibility verdict {}", c.passes()));
    r.push(Check::new("Schouten side agrees with compatibility", 1, agree));
    if c.passes() {
        let back = nq_to_poisson(&nq.q, &nq.omega)?.transport(p.context())?;
        let diff = back.try_sub(p)?;
        let w = diff.first_nonzero().map(|(idx, c)| format!("difference {c} on {}", diff.index_label(&idx)));
        r.push(Check::new("bivector recovered from (Q, w)", 1, w));
    }
    Ok(r)
}

fn spencer_failure(s: &SpencerData) -> Check {
    let v = validate_spencer(s);
    let checked = v.checked.values().sum();
    let w = v.failures.first().map(|f| format!("{} at {}: {}", f.condition.short(), f.location, f.residue));
    Check::new("Spencer identities", checked, w)
}

fn roundtrip_form(w: &VectorValuedForm) -> Result<Report> {
    let s = extract_spencer_auto(w)?;
    let mut r = Report::new("Spencer round trip");
    r.push(spencer_failure(&s));
    let back = reconstruct_form(&s)?;
    let diff = back.try_sub(w)?;
    r.push(Check::new("reconstruct(extract(w)) = w", 1, diff.first_nonzero().map(|(a, p)| format!("component {a} differs by {p}"))));
    let again = extract_spencer(&back, s.order(), s.degree())?;
    r.push(Check::new("extract(reconstruct(s)) = s", s.basis().len(), (!again.same_data(&s)).then(|| "data differ".to_string())));
    r.note(format!("order {}, degree {}, {} basis fields", s.order(), s.degree(), s.basis().len()));
    Ok(r)
}

fn roundtrip_data(s: &SpencerData) -> Result<Report> {
    let mut r = Report::new("Spencer round trip");
    let check = spencer_failure(s);
    let valid = check.passed;
    r.push(check);
    if valid {
        let w = reconstruct_form(s)?;
        let again = extract_spencer(&w, s.order(), s.degree())?;
        r.push(Check::new("extract(reconstruct(s)) = s", s.basis().len(), (!again.same_data(s)).then(|| "data differ".to_string())));
        r.note(format!("w = {w}"));
    }
    Ok(r)
}

fn lcs(phi: &GradedPoly, omega: &GradedPoly) -> Result<Report> {
    let mut r = match check_lcs(phi, omega) {
        Ok(r) => r,
        Err(Error::NotNondegenerate) => {
            let mut r = Report::new("lcs structure");
            r.push(Check::fail("w non-degenerate", 1, "det w vanishes identically"));
            return Ok(r);
        }
        Err(e) => return Err(e),
    };
    if r.passes() {
        let j = lcs_to_jacobi(phi, omega)?;
        for row in j.rows() {
            r.note(row);
        }
        if !j.denominator.is_constant() {
            r.note(format!("brackets carry the denominator {}", j.denominator));
        }
        if let Some(pair) = j.jacobi_pair() {
            let (w1, w2) = jacobi_witnesses(&pair)?;
            r.push(Check::new("induced pair is Jacobi", 1, w1.or(w2)).informational());
        }
    }
    Ok(r)
}

fn sample_cartan(m: &Manifest, n: usize, seed: u64) -> Result<Report> {
    let ctx = &m.context;
    let mut r = Report::new("Cartan calculus");
    let names = [
        "[i_X, i_Y] = 0",
        "[L_X, i_Y] = i_[X,Y]",
        "[L_X, L_Y] = L_[X,Y]",
        "[i_X, d_nabla] = L_X for nabla_X",
        "[L_X, d_nabla] = 0 for nabla_X",
    ];
    let mut witnesses: Vec<Option<String>> = vec![None; names.len()];
    for k in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
        let dx = rng.gen_range(-2..=1);
        let dy = rng.gen_range(-2..=1);
        let x = random_vector_field(ctx, &mut rng, dx, true)?;
        let y = random_vector_field(ctx, &mut rng, dy, true)?;
        let (ix, iy, lx, ly) = (insertion(&x)?, insertion(&y)?, lie(&x)?, lie(&y)?);
        let xy = x.commutator(&y)?;
        let fk = rng.gen_range(0..=2);
        let fn_ = rng.gen_range(0..=2);
        let w = random_form(ctx, &mut rng, fk, fn_, 3);
        let zero = vec![vec![GradedPoly::zero(ctx); ctx.rank()]; ctx.rank()];
        let nx = covariant(&x.coordinate_part().with_endo(zero)?)?;
        let dn = de_rham_operator(ctx);
        let results = [
            ix.commutator(&iy)?.is_zero(),
            lx.commutator(&iy)? == insertion(&xy)?,
            lx.commutator(&ly)? == lie(&xy)? && lx.commutator(&ly)?.apply(&w)? == lie(&xy)?.apply(&w)?,
            insertion(&nx)?.commutator(&dn)? == lie(&nx)?,
            lie(&nx)?.commutator(&dn)?.is_zero(),
        ];
        for (slot, ok) in witnesses.iter_mut().zip(results) {
            if !ok && slot.is_none() {
                *slot = Some(format!("instance {k}"));
            }
        }
    }
    for (name, w) in names.iter().zip(witnesses) {
        r.push(Check::new(*name, n, w));
    }
    r.note(format!("seed {seed}"));
    Ok(r)
}

/// Runs the classifier matching a structure.
pub fn classify(s: &Structure) -> Result<Report> {
    match s {
        Structure::Algebroid(a) => verify_algebroid(a),
        Structure::Form(w) => roundtrip_form(w),
        Structure::Spencer { algebroid: Some(a), data } => check_spencer_operator(a, data),
        Structure::Spencer { algebroid: None, data } => roundtrip_data(data),
        Structure::Bivector(p) => poisson(p),
        Structure::Jacobi(j) => check_contact_nq(j),
        Structure::Dirac { algebroid, map } => check_presymplectic_nq(algebroid, map),
        Structure::Foliation { algebroid, data } => check_im_foliation(algebroid, data),
        Structure::Lcs { phi, omega } => lcs(phi, omega),
        Structure::LcPoisson { phi, bivector } => check_lcs_nq(phi, bivector),
        Structure::Kplectic { algebroid, order, ell } => check_im_kplectic(algebroid, ell, *order),
    }
}

fn execute(m: &Manifest, action: &Action, opts: &RunOptions) -> Result<Report> {
    let get = |n: &str| m.get(n).expect("names are resolved at parse time");
    match action {
        Action::VerifyAlgebroid(a) | Action::Classify(a) => classify(get(a)),
        Action::Compat { algebroid, form } => match (get(algebroid), get(form)) {
            (Structure::Algebroid(a), Structure::Form(w)) => compat(a, w),
            _ => unreachable!("kinds are checked at parse time"),
        },
        Action::Cartan(n) => sample_cartan(m, *n, opts.seed),
        Action::Roundtrip(x) => match get(x) {
            Structure::Form(w) => roundtrip_form(w),
            Structure::Spencer { data, .. } => roundtrip_data(data),
            _ => unreachable!("kinds are checked at parse time"),
        },
    }
}

fn outcome(name: String, f: impl FnOnce() -> Result<Report>, timing: bool) -> Outcome {
    let start = Instant::now();
    let result = f();
    let elapsed_ms = timing.then(|| start.elapsed().as_millis());
    match result {
        Ok(r) => {
            let verdict = if r.passes() { Verdict::Pass } else { Verdict::Fail };
            Outcome { name, verdict, report: Some(r), error: None, elapsed_ms }
        }
        Err(e) => Outcome { name, verdict: Verdict::Error, report: None, error: Some(e.to_string()), elapsed_ms },
    }
}

fn selected<'a>(commands: &'a [Command], opts: &RunOptions) -> Vec<&'a Command> {
    commands.iter().filter(|c| opts.only.as_ref().is_none_or(|o| *o == c.name)).collect()
}

/// Executes the command list in order.
pub fn run(m: &Manifest, opts: &RunOptions) -> RunReport {
    let outcomes = selected(&m.commands, opts)
        .into_iter()
        .map(|c| outcome(c.name.clone(), || execute(m, &c.action, opts), opts.timing))
        .collect();
    RunReport { outcomes }
}

/// Spencer round trip on every form and Spencer data block.
pub fn roundtrip_all(m: &Manifest, opts: &RunOptions) -> RunReport {
    let outcomes = m
        .structures
        .iter()
        .filter(|n| matches!(n.structure, Structure::Form(_) | Structure::Spencer { .. }))
        .filter(|n| opts.only.as_ref().is_none_or(|o| *o == n.name))
        .map(|n| {
            let f = || match &n.structure {
                Structure::Form(w) => roundtrip_form(w),
                Structure::Spencer { data, .. } => roundtrip_data(data),
                _ => unreachable!(),
            };
            outcome(format!("roundtrip {}", n.name), f, opts.timing)
        })
        .collect();
    RunReport { outcomes }
}

/// The matching classifier on every structure block except plain forms.
pub fn classify_all(m: &Manifest, opts: &RunOptions) -> RunReport {
    let outcomes = m
        .structures
        .iter()
        .filter(|n| !matches!(n.structure, Structure::Form(_)))
        .filter(|n| opts.only.as_ref().is_none_or(|o| *o == n.name))
        .map(|n| outcome(format!("classify {} {}", n.structure.kind(), n.name), || classify(&n.structure), opts.timing))
        .collect();
    RunReport { outcomes }
}
