//! Spencer data `(D, l)` of vector valued forms: extraction, reconstruction
//! and validation of the four defining identities.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::cartan::{d, insert, lie_derive};
use crate::context::GradedContext;
use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::form::VectorValuedForm;
use crate::poly::{ratio, Bidegree, GradedPoly, Homogeneity, Monomial, Rational};
use crate::random::monomials_of_bidegree;

/// A monomial negatively graded field `z^{b1} ... z^{bk} d/dz^b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisField {
    /// Fiber-only monomial multiplying the coordinate field.
    pub monomial: Monomial,
    /// Generator index of the fiber coordinate `z^b`.
    pub target: usize,
    pub degree: i32,
}

impl BasisField {
    pub fn to_derivation(&self, ctx: &Arc<GradedContext>) -> Derivation {
        let coeff = GradedPoly::from_monomial(ctx, self.monomial.clone(), Rational::from_integer(1.into()));
        Derivation::vector_field(ctx, self.degree, &[(self.target, coeff)], None)
            .expect("basis fields are homogeneous")
    }

    pub fn parity(&self) -> i32 {
        self.degree.rem_euclid(2)
    }

    pub fn label(&self, ctx: &GradedContext) -> String {
        let m = crate::poly::format_monomial(ctx, &self.monomial);
        let t = &ctx.generator(self.target).name;
        if m.is_empty() {
            format!("d/d{t}")
        } else {
            format!("{m}*d/d{t}")
        }
    }
}

/// The monomial basis of negatively graded vector fields over base functions.
#[derive(Debug, Clone)]
pub struct NegBasis {
    fields: Vec<BasisField>,
    index: HashMap<(Monomial, usize), usize>,
}

impl NegBasis {
    pub fn new(ctx: &GradedContext) -> Self {
        let mut fields = Vec::new();
        for b in ctx.fiber_indices() {
            let deg_b = ctx.generator(b).internal_degree;
            for w in 0..deg_b {
                for m in monomials_of_bidegree(ctx, 0, w, 0) {
                    fields.push(BasisField { monomial: m, target: b, degree: w as i32 - deg_b as i32 });
                }
            }
        }
        fields.sort_by(|a, b| b.degree.cmp(&a.degree).then(a.target.cmp(&b.target)).then(a.monomial.cmp(&b.monomial)));
        let index = fields
            .iter()
            .enumerate()
            .map(|(i, f)| ((f.monomial.clone(), f.target), i))
            .collect();
        NegBasis { fields, index }
    }

    pub fn fields(&self) -> &[BasisField] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn position(&self, monomial: &Monomial, target: usize) -> Option<usize> {
        self.index.get(&(monomial.clone(), target)).copied()
    }

    /// Index of the coordinate field `d/dz` for a fiber generator.
    pub fn coordinate_field(&self, ctx: &GradedContext, target: usize) -> usize {
        self.position(&Monomial::one(ctx.num_generators()), target)
            .expect("coordinate fields belong to the basis")
    }

    /// Writes a negatively graded vector field as `sum f_j B_j` with base
    /// polynomial coefficients `f_j`.
    pub fn decompose(&self, x: &Derivation) -> Result<Vec<(usize, GradedPoly)>> {
        let ctx = x.context();
        if !x.is_vector_field() {
            return Err(Error::NotAVectorField(format!("{x}")));
        }
        let nb = ctx.num_base();
        let mut out: BTreeMap<usize, GradedPoly> = BTreeMap::new();
        for (&g, coeff) in x.symbol() {
            if g < nb {
                return Err(Error::NotAVectorField(format!(
                    "`{x}` is not negatively graded"
                )));
            }
            for (m, c) in coeff.terms() {
                let mut base = Monomial::one(ctx.num_generators());
                let mut fiber = m.clone();
                for i in 0..nb {
                    base.0[i] = m.0[i];
                    fiber.0[i] = 0;
                }
                let j = self.position(&fiber, g).ok_or_else(|| {
                    Error::NotAVectorField(format!("`{x}` is not negatively graded"))
                })?;
                let f = GradedPoly::from_monomial(ctx, base, c.clone());
                let slot = out.entry(j).or_insert_with(|| GradedPoly::zero(ctx));
                *slot = &*slot + &f;
            }
        }
        Ok(out.into_iter().filter(|(_, f)| !f.is_zero()).collect())
    }
}

/// The pair `(D, l)` on the monomial basis, plus optional explicit values on
/// the multiples `x^i B` of basis fields by base coordinates.
#[derive(Debug, Clone)]
pub struct SpencerData {
    ctx: Arc<GradedContext>,
    k: u32,
    n: u32,
    basis: NegBasis,
    d_values: Vec<VectorValuedForm>,
    l_values: Vec<VectorValuedForm>,
    /// `(basis index, base coordinate) -> (D(x^i B), l(x^i B))`.
    multiples: BTreeMap<(usize, usize), (VectorValuedForm, VectorValuedForm)>,
}

impl SpencerData {
    /// Data given on the basis only; values on multiples follow the
    /// Leibniz rule.
    pub fn new(
        ctx: &Arc<GradedContext>,
        k: u32,
        n: u32,
        d_values: Vec<VectorValuedForm>,
        l_values: Vec<VectorValuedForm>,
    ) -> Result<Self> {
        let basis = NegBasis::new(ctx);
        if d_values.len() != basis.len() || l_values.len() != basis.len() {
            return Err(Error::InvalidSpencerData(format!(
                "expected {} values for D and l",
                basis.len()
            )));
        }
        Ok(SpencerData { ctx: ctx.clone(), k, n, basis, d_values, l_values, multiples: BTreeMap::new() })
    }

    /// Zero data of order `k` and degree `n`.
    pub fn zero(ctx: &Arc<GradedContext>, k: u32, n: u32) -> Self {
        let basis = NegBasis::new(ctx);
        let z = VectorValuedForm::zero(ctx);
        let len = basis.len();
        SpencerData {
            ctx: ctx.clone(),
            k,
            n,
            basis,
            d_values: vec![z.clone(); len],
            l_values: vec![z; len],
            multiples: BTreeMap::new(),
        }
    }

    /// Builds data from closures evaluated on every basis field.
    pub fn from_fn(
        ctx: &Arc<GradedContext>,
        k: u32,
        n: u32,
        mut dfn: impl FnMut(&BasisField) -> Result<VectorValuedForm>,
        mut lfn: impl FnMut(&BasisField) -> Result<VectorValuedForm>,
    ) -> Result<Self> {
        let basis = NegBasis::new(ctx);
        let d_values = basis.fields().iter().map(&mut dfn).collect::<Result<Vec<_>>>()?;
        let l_values = basis.fields().iter().map(&mut lfn).collect::<Result<Vec<_>>>()?;
        Self::new(ctx, k, n, d_values, l_values)
    }

    /// Records explicit values on `x^i B`.
    pub fn set_multiple(
        &mut self,
        basis_index: usize,
        base: usize,
        d_value: VectorValuedForm,
        l_value: VectorValuedForm,
    ) {
        self.multiples.insert((basis_index, base), (d_value, l_value));
    }

    pub fn context(&self) -> &Arc<GradedContext> {
        &self.ctx
    }

    pub fn order(&self) -> u32 {
        self.k
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn basis(&self) -> &NegBasis {
        &self.basis
    }

    pub fn d_value(&self, j: usize) -> &VectorValuedForm {
        &self.d_values[j]
    }

    pub fn l_value(&self, j: usize) -> &VectorValuedForm {
        &self.l_values[j]
    }

    pub fn d_values_mut(&mut self) -> &mut Vec<VectorValuedForm> {
        &mut self.d_values
    }

    pub fn l_values_mut(&mut self) -> &mut Vec<VectorValuedForm> {
        &mut self.l_values
    }

    pub fn multiples(&self) -> &BTreeMap<(usize, usize), (VectorValuedForm, VectorValuedForm)> {
        &self.multiples
    }

    /// `(D(x^i B), l(x^i B))` as predicted by the Leibniz rule and base linearity.
    pub fn leibniz_multiple(&self, j: usize, base: usize) -> Result<(VectorValuedForm, VectorValuedForm)> {
        let xi = GradedPoly::generator(&self.ctx, self.ctx.base_index(base));
        self.extend(j, &xi)
    }

    fn extend(&self, j: usize, f: &GradedPoly) -> Result<(VectorValuedForm, VectorValuedForm)> {
        let b = &self.basis.fields()[j];
        let df = d(f);
        let sign = if b.parity() == 1 { ratio(-1, 1) } else { ratio(1, 1) };
        let dv = self.d_values[j]
            .left_mul(f)?
            .add(&self.l_values[j].left_mul(&df)?.scale(&sign));
        let lv = self.l_values[j].left_mul(f)?;
        Ok((dv, lv))
    }

    /// `D(X)` for an arbitrary negatively graded field, through the basis
    /// decomposition and the Leibniz rule.
    pub fn d_of(&self, x: &Derivation) -> Result<VectorValuedForm> {
        let mut acc = VectorValuedForm::zero(&self.ctx);
        for (j, f) in self.basis.decompose(x)? {
            acc = acc.add(&self.extend(j, &f)?.0);
        }
        Ok(acc)
    }

    /// `l(X)` for an arbitrary negatively graded field.
    pub fn l_of(&self, x: &Derivation) -> Result<VectorValuedForm> {
        let mut acc = VectorValuedForm::zero(&self.ctx);
        for (j, f) in self.basis.decompose(x)? {
            acc = acc.add(&self.l_values[j].left_mul(&f)?);
        }
        Ok(acc)
    }

    /// Equality of the data on basis fields and on base multiples.
    pub fn same_data(&self, other: &SpencerData) -> bool {
        if self.k != other.k || self.n != other.n || self.basis.len() != other.basis.len() {
            return false;
        }
        if self.d_values != other.d_values || self.l_values != other.l_values {
            return false;
        }
        for j in 0..self.basis.len() {
            for i in 0..self.ctx.num_base() {
                let a = self.multiple_or_leibniz(j, i);
                let b = other.multiple_or_leibniz(j, i);
                match (a, b) {
                    (Ok(a), Ok(b)) if a == b => {}
                    _ => return false,
                }
            }
        }
        true
    }

    fn multiple_or_leibniz(&self, j: usize, i: usize) -> Result<(VectorValuedForm, VectorValuedForm)> {
        match self.multiples.get(&(j, i)) {
            Some(v) => Ok(v.clone()),
            None => self.leibniz_multiple(j, i),
        }
    }
}

impl fmt::Display for SpencerData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Spencer data of order {} and degree {}", self.k, self.n)?;
        for (j, b) in self.basis.fields().iter().enumerate() {
            let label = b.label(&self.ctx);
            writeln!(f, "  D({label}) = {}", self.d_values[j])?;
            writeln!(f, "  l({label}) = {}", self.l_values[j])?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpencerCondition {
    Degrees,
    Leibniz,
    Bracket,
    Mixed,
    Symmetry,
}

impl SpencerCondition {
    pub fn label(&self) -> &'static str {
        match self {
            SpencerCondition::Degrees => "degrees",
            SpencerCondition::Leibniz => "leibniz rule D(fX) = f D(X) + (-)^X df l(X)",
            SpencerCondition::Bracket => "L_X D(Y) - (-)^{XY} L_Y D(X) = D([X,Y])",
            SpencerCondition::Mixed => "L_X l(Y) - (-)^{X(Y-1)} i_Y D(X) = l([X,Y])",
            SpencerCondition::Symmetry => "i_X l(Y) - (-)^{(X-1)(Y-1)} i_Y l(X) = 0",
        }
    }

    pub fn short(&self) -> &'static str {
        match self {
            SpencerCondition::Degrees => "degrees",
            SpencerCondition::Leibniz => "leibniz",
            SpencerCondition::Bracket => "bracket",
            SpencerCondition::Mixed => "mixed",
            SpencerCondition::Symmetry => "symmetry",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpencerFailure {
    pub condition: SpencerCondition,
    pub location: String,
    pub residue: String,
}

#[derive(Debug, Clone)]
pub struct SpencerReport {
    pub checked: BTreeMap<SpencerCondition, usize>,
    pub failures: Vec<SpencerFailure>,
}

impl SpencerReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn condition_passes(&self, c: SpencerCondition) -> bool {
        self.failures.iter().all(|f| f.condition != c)
    }

    pub fn first_failure(&self, c: SpencerCondition) -> Option<&SpencerFailure> {
        self.failures.iter().find(|f| f.condition == c)
    }
}

fn sign_of(odd: bool) -> Rational {
    if odd {
        ratio(-1, 1)
    } else {
        ratio(1, 1)
    }
}

fn check_degree(
    v: &VectorValuedForm,
    form: u32,
    internal: i32,
) -> std::result::Result<(), String> {
    match v.bidegree() {
        Homogeneity::Zero => Ok(()),
        Homogeneity::Mixed => Err("inhomogeneous value".into()),
        Homogeneity::Homogeneous(b) => {
            if internal < 0 || b != Bidegree::new(form, internal as u32) {
                Err(format!("bidegree {b}, expected (form {form}, internal {internal})"))
            } else {
                Ok(())
            }
        }
    }
}

/// Checks degrees, the Leibniz rule on stored multiples, and the three pair
/// identities on all ordered pairs of basis fields.
pub fn validate_spencer(s: &SpencerData) -> SpencerReport {
    let ctx = &s.ctx;
    let mut checked = BTreeMap::new();
    let mut failures = Vec::new();
    let fields: Vec<Derivation> = s.basis.fields().iter().map(|b| b.to_derivation(ctx)).collect();
    let mut fail = |c: SpencerCondition, location: String, residue: String| {
        failures.push(SpencerFailure { condition: c, location, residue });
    };

    for (j, b) in s.basis.fields().iter().enumerate() {
        let label = b.label(ctx);
        let internal = s.n as i32 + b.degree;
        *checked.entry(SpencerCondition::Degrees).or_insert(0) += 2;
        if let Err(e) = check_degree(&s.d_values[j], s.k, internal) {
            fail(SpencerCondition::Degrees, format!("D({label})"), e);
        }
        let lk = s.k as i32 - 1;
        let lcheck = if lk < 0 {
            if s.l_values[j].is_zero() { Ok(()) } else { Err("order 0 data must have l = 0".into()) }
        } else {
            check_degree(&s.l_values[j], lk as u32, internal)
        };
        if let Err(e) = lcheck {
            fail(SpencerCondition::Degrees, format!("l({label})"), e);
        }
    }

    for (&(j, i), (dv, lv)) in &s.multiples {
        *checked.entry(SpencerCondition::Leibniz).or_insert(0) += 1;
        let label = format!("{}*{}", ctx.base_names()[i], s.basis.fields()[j].label(ctx));
        match s.leibniz_multiple(j, i) {
            Ok((de, le)) => {
                let rd = dv.sub(&de);
                if !rd.is_zero() {
                    fail(SpencerCondition::Leibniz, format!("D({label})"), rd.to_string());
                }
                let rl = lv.sub(&le);
                if !rl.is_zero() {
                    fail(SpencerCondition::Leibniz, format!("l({label}) (base linearity)"), rl.to_string());
                }
            }
            Err(e) => fail(SpencerCondition::Leibniz, label, e.to_string()),
        }
    }

    for (a, x) in fields.iter().enumerate() {
        for (b, y) in fields.iter().enumerate() {
            let px = s.basis.fields()[a].parity();
            let py = s.basis.fields()[b].parity();
            let pair = format!("({}, {})", s.basis.fields()[a].label(ctx), s.basis.fields()[b].label(ctx));
            let xy = match x.commutator(y) {
                Ok(v) => v,
                Err(e) => {
                    fail(SpencerCondition::Bracket, pair, e.to_string());
                    continue;
                }
            };
            let res: Result<()> = (|| {
                *checked.entry(SpencerCondition::Bracket).or_insert(0) += 1;
                let lhs = lie_derive(x, &s.d_values[b])?
                    .sub(&lie_derive(y, &s.d_values[a])?.scale(&sign_of(px * py == 1)));
                let r = lhs.sub(&s.d_of(&xy)?);
                if !r.is_zero() {
                    fail(SpencerCondition::Bracket, pair.clone(), r.to_string());
                }
                *checked.entry(SpencerCondition::Mixed).or_insert(0) += 1;
                let lhs = lie_derive(x, &s.l_values[b])?
                    .sub(&insert(y, &s.d_values[a])?.scale(&sign_of((px * (py - 1)).rem_euclid(2) == 1)));
                let r = lhs.sub(&s.l_of(&xy)?);
                if !r.is_zero() {
                    fail(SpencerCondition::Mixed, pair.clone(), r.to_string());
                }
                *checked.entry(SpencerCondition::Symmetry).or_insert(0) += 1;
                let r = insert(x, &s.l_values[b])?.sub(
                    &insert(y, &s.l_values[a])?
                        .scale(&sign_of(((px - 1) * (py - 1)).rem_euclid(2) == 1)),
                );
                if !r.is_zero() {
                    fail(SpencerCondition::Symmetry, pair.clone(), r.to_string());
                }
                Ok(())
            })();
            if let Err(e) = res {
                fail(SpencerCondition::Bracket, pair, e.to_string());
            }
        }
    }
    SpencerReport { checked, failures }
}

/// Spencer data `(L_X w, i_X w)` of a form of order `k` and degree `n`,
/// including explicit values on base multiples of basis fields.
pub fn extract_spencer(w: &VectorValuedForm, k: u32, n: u32) -> Result<SpencerData> {
    if n == 0 {
        return Err(Error::DegreeZero);
    }
    match w.bidegree() {
        Homogeneity::Zero => {}
        Homogeneity::Mixed => return Err(Error::Inhomogeneous(format!("form `{w}`"))),
        Homogeneity::Homogeneous(b) => {
            if b.internal_degree != n {
                return Err(Error::WrongDegree { expected: n as i32, found: b.internal_degree as i32 });
            }
            if b.form_degree != k {
                return Err(Error::InvalidDegree(format!(
                    "form `{w}` has order {}, expected {k}",
                    b.form_degree
                )));
            }
        }
    }
    let ctx = w.context();
    let mut s = SpencerData::zero(ctx, k, n);
    let fields: Vec<BasisField> = s.basis.fields().to_vec();
    for (j, b) in fields.iter().enumerate() {
        let x = b.to_derivation(ctx);
        s.d_values[j] = lie_derive(&x, w)?;
        s.l_values[j] = insert(&x, w)?;
        for i in 0..ctx.num_base() {
            let xi = GradedPoly::generator(ctx, ctx.base_index(i));
            let fx = x.left_mul(&xi)?;
            s.multiples.insert((j, i), (lie_derive(&fx, w)?, insert(&fx, w)?));
        }
    }
    Ok(s)
}

/// Infers order and degree from a nonzero homogeneous form.
pub fn extract_spencer_auto(w: &VectorValuedForm) -> Result<SpencerData> {
    match w.bidegree() {
        Homogeneity::Homogeneous(b) => extract_spencer(w, b.form_degree, b.internal_degree),
        Homogeneity::Zero => Err(Error::InvalidSpencerData(
            "the zero form needs an explicit order and degree".into(),
        )),
        Homogeneity::Mixed => Err(Error::Inhomogeneous(format!("form `{w}`"))),
    }
}

/// `w = sum_a (|z^a|/n) (z^a D(d_a) + dz^a l(d_a))`, after validating the
/// data; the result is checked to reproduce the data.
pub fn reconstruct_form(s: &SpencerData) -> Result<VectorValuedForm> {
    let report = validate_spencer(s);
    if let Some(f) = report.failures.first() {
        return Err(Error::InvalidSpencerData(format!(
            "{} fails at {}: {}",
            f.condition.short(),
            f.location,
            f.residue
        )));
    }
    let w = reconstruct_unchecked(s)?;
    let back = extract_spencer(&w, s.k, s.n)?;
    if !back.same_data(s) {
        return Err(Error::InvalidSpencerData(
            "reconstructed form does not reproduce the data".into(),
        ));
    }
    Ok(w)
}

/// The reconstruction formula without validation.
pub fn reconstruct_unchecked(s: &SpencerData) -> Result<VectorValuedForm> {
    let ctx = &s.ctx;
    if s.n == 0 {
        return Err(Error::DegreeZero);
    }
    let mut w = VectorValuedForm::zero(ctx);
    for a in ctx.fiber_indices() {
        let j = s.basis.coordinate_field(ctx, a);
        let deg = ctx.generator(a).internal_degree as i64;
        let c = ratio(deg, s.n as i64);
        let za = GradedPoly::generator(ctx, a);
        let dza = GradedPoly::generator(ctx, ctx.differential_index(a));
        let term = s.d_values[j].left_mul(&za)?.add(&s.l_values[j].left_mul(&dza)?);
        w = w.add(&term.scale(&c));
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::GradedPoly as P;

    #[test]
    fn canonical_symplectic_data() {
        let ctx = GradedContext::builder().base("x").fiber("p", 1).build().unwrap();
        let w = VectorValuedForm::scalar(&P::var(&ctx, "d(p)").unwrap() * &P::var(&ctx, "d(x)").unwrap()).unwrap();
        let s = extract_spencer(&w, 2, 1).unwrap();
        assert_eq!(s.basis().len(), 1);
        assert_eq!(s.l_value(0).component(0), &P::var(&ctx, "d(x)").unwrap());
        assert!(s.d_value(0).is_zero());
        assert!(validate_spencer(&s).passes());
        assert_eq!(reconstruct_form(&s).unwrap(), w);
    }

    #[test]
    fn degree_two_basis() {
        let ctx = GradedContext::builder()
            .base("x")
            .fiber("z1", 1)
            .fiber("z2", 1)
            .fiber("w", 2)
            .build()
            .unwrap();
        let basis = NegBasis::new(&ctx);
        assert_eq!(basis.len(), 5);
        assert_eq!(basis.fields()[0].degree, -1);
        assert_eq!(basis.fields().last().unwrap().degree, -2);
    }
}
