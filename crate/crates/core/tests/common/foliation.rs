use nqcalc_core::algebroid::{algebroid_context, AlgebroidData};
use nqcalc_core::classifiers::foliation::{FoliationData, QuotientConnection};

use super::{c, so3_structure, v};

pub struct Fixture {
    pub name: &'static str,
    pub a: AlgebroidData,
    pub f: FoliationData,
    pub expected: Option<bool>,
}

pub fn tangent(base: &[&str], quotient: &[&str]) -> AlgebroidData {
    let fibers: Vec<String> = (1..=base.len()).map(|i| format!("a{i}")).collect();
    let ctx = algebroid_context(base, &fibers.iter().map(String::as_str).collect::<Vec<_>>(), quotient).unwrap();
    AlgebroidData::tangent(&ctx).unwrap()
}

/// `TR2` in the frame `e1 = d/dx`, `e2 = d/dy + x d/dx`, `[[e1,e2]] = e1`.
pub fn skew_tangent() -> AlgebroidData {
    let ctx = algebroid_context(&["x", "y"], &["a1", "a2"], &["e"]).unwrap();
    let mut a = AlgebroidData::abelian(&ctx).unwrap();
    a.set_anchor(0, 0, c(&ctx, 1));
    a.set_anchor(1, 0, v(&ctx, "x"));
    a.set_anchor(1, 1, c(&ctx, 1));
    a.set_structure(0, 1, 0, c(&ctx, 1));
    a
}

pub fn foliation_corpus() -> Vec<Fixture> {
    let mut out = Vec::new();
    let a = tangent(&["x", "y"], &[]);
    let f = FoliationData::coordinate(a.context(), &[0, 1]);
    out.push(Fixture { name: "B = A", a, f, expected: Some(true) });

    let a = tangent(&["x", "y"], &["e"]);
    let f = FoliationData::coordinate(a.context(), &[0]);
    out.push(Fixture { name: "TR2, B = span(d/dx)", a, f, expected: Some(true) });

    let mut a = tangent(&["x", "y"], &["e"]);
    a.set_theta(0, 0, 0, c(a.context(), 1));
    let mut f = FoliationData::coordinate(a.context(), &[0]);
    f.quotient = QuotientConnection::Explicit;
    out.push(Fixture { name: "TR2, perturbed quotient connection", a, f, expected: Some(false) });

    let a = skew_tangent();
    let f = FoliationData::coordinate(a.context(), &[1]);
    out.push(Fixture { name: "skew frame, B = span(e2)", a, f, expected: Some(false) });

    let a = skew_tangent();
    let f = FoliationData::coordinate(a.context(), &[0]);
    out.push(Fixture { name: "skew frame, B = span(e1)", a, f, expected: None });

    let a = tangent(&["x", "y", "z"], &["e1", "e2"]);
    let f = FoliationData::coordinate(a.context(), &[2]);
    out.push(Fixture { name: "TR3, B = span(d/dz)", a, f, expected: Some(true) });

    let a = tangent(&["x", "y", "z"], &["e"]);
    let f = FoliationData::coordinate(a.context(), &[0, 1]);
    out.push(Fixture { name: "TR3, B = span(d/dx, d/dy)", a, f, expected: Some(true) });

    let a = tangent(&["x", "y"], &["e"]);
    let ctx = a.context().clone();
    let f = FoliationData::trivial(&ctx, vec![vec![c(&ctx, 1), v(&ctx, "y")]]);
    out.push(Fixture { name: "TR2, B = span(d/dx + y d/dy)", a, f, expected: None });

    let a = tangent(&["x", "y"], &["e"]);
    let ctx = a.context().clone();
    let mut f = FoliationData::coordinate(&ctx, &[0]);
    f.connection[1][0][0] = c(&ctx, 1);
    out.push(Fixture { name: "TR2, B = span(d/dx), nabla_y e = e", a, f, expected: None });

    let a = tangent(&["x", "y"], &["e"]);
    let ctx = a.context().clone();
    let mut f = FoliationData::coordinate(&ctx, &[0]);
    f.connection[0][0][0] = v(&ctx, "y");
    out.push(Fixture { name: "TR2, curved nabla", a, f, expected: Some(false) });

    let lie = algebroid_context(&[] as &[&str], &["a1", "a2", "a3"], &["e1", "e2"]).unwrap();
    let mut so3 = AlgebroidData::abelian(&lie).unwrap();
    so3_structure(&mut so3, &lie, 1);
    let f = FoliationData::coordinate(&lie, &[2]);
    out.push(Fixture { name: "so(3), B = span(a3)", a: so3, f, expected: Some(false) });

    let lie = algebroid_context(&[] as &[&str], &["a1", "a2", "a3"], &[] as &[&str]).unwrap();
    let mut so3 = AlgebroidData::abelian(&lie).unwrap();
    so3_structure(&mut so3, &lie, 1);
    let f = FoliationData::coordinate(&lie, &[0, 1, 2]);
    out.push(Fixture { name: "so(3), B = so(3)", a: so3, f, expected: Some(true) });

    for (idx, name) in [(0, "aff(1), B = span(a1)"), (1, "aff(1), B = span(a2)")] {
        let ctx = algebroid_context(&["x"], &["a1", "a2"], &["e"]).unwrap();
        let mut a = AlgebroidData::abelian(&ctx).unwrap();
        a.set_anchor(0, 0, c(&ctx, 1));
        a.set_anchor(1, 0, v(&ctx, "x"));
        a.set_structure(0, 1, 0, c(&ctx, 1));
        let f = FoliationData::coordinate(&ctx, &[idx]);
        out.push(Fixture { name, a, f, expected: None });
    }
    out
}
