//! Canonical polynomials in the bigraded, graded-commutative algebra of a
//! [`GradedContext`].

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::context::GradedContext;
use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Exponent vector over the global generator order. Odd generators carry
/// exponent 0 or 1 and are implicitly multiplied in generator order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(len: usize) -> Self {
        Monomial(vec![0; len])
    }

    pub fn generator(len: usize, idx: usize) -> Self {
        let mut e = vec![0; len];
        e[idx] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, idx: usize) -> u32 {
        self.0[idx]
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .total()
            .cmp(&self.total())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub type Terms = BTreeMap<Monomial, Rational>;

pub(crate) fn add_terms_into(acc: &mut Terms, other: &Terms) {
    for (m, c) in other {
        add_term(acc, m.clone(), c.clone());
    }
}

pub(crate) fn add_term(acc: &mut Terms, m: Monomial, c: Rational) {
    if c.is_zero() {
        return;
    }
    match acc.entry(m) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bidegree {
    pub form_degree: u32,
    pub internal_degree: u32,
}

impl Bidegree {
    pub fn new(form_degree: u32, internal_degree: u32) -> Self {
        Bidegree { form_degree, internal_degree }
    }

    pub fn total(&self) -> u32 {
        self.form_degree + self.internal_degree
    }

    pub fn parity(&self) -> u32 {
        self.total() % 2
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(form {}, internal {})", self.form_degree, self.internal_degree)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Homogeneity {
    Zero,
    Homogeneous(Bidegree),
    Mixed,
}

impl fmt::Display for Homogeneity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Homogeneity::Zero => write!(f, "zero"),
            Homogeneity::Homogeneous(b) => write!(f, "{b}"),
            Homogeneity::Mixed => write!(f, "mixed"),
        }
    }
}

pub(crate) fn contexts_compatible(a: &Arc<GradedContext>, b: &Arc<GradedContext>) -> bool {
    Arc::ptr_eq(a, b) || a.same_layout(b)
}

pub(crate) fn monomial_bidegree(ctx: &GradedContext, m: &Monomial) -> Bidegree {
    let mut b = Bidegree::new(0, 0);
    for (i, &e) in m.0.iter().enumerate() {
        if e > 0 {
            let g = ctx.generator(i);
            b.form_degree += e * g.form_degree;
            b.internal_degree += e * g.internal_degree;
        }
    }
    b
}

pub(crate) fn monomial_parity(ctx: &GradedContext, m: &Monomial) -> u32 {
    monomial_bidegree(ctx, m).parity()
}

/// Product of two canonical monomials, with the Koszul sign from moving the
/// odd generators of `b` past those of `a`.
pub(crate) fn multiply_monomials(
    ctx: &GradedContext,
    a: &Monomial,
    b: &Monomial,
) -> Option<(Monomial, bool)> {
    let mut negative = false;
    let mut odd_after = 0u32;
    let n = a.0.len();
    let mut out = vec![0u32; n];
    for i in (0..n).rev() {
        let odd = ctx.generator(i).is_odd();
        if odd {
            if a.0[i] > 0 && b.0[i] > 0 {
                return None;
            }
            if b.0[i] > 0 && odd_after % 2 == 1 {
                negative = !negative;
            }
            if a.0[i] > 0 {
                odd_after += 1;
            }
        }
        out[i] = a.0[i] + b.0[i];
    }
    Some((Monomial(out), negative))
}

/// A canonical element of the bigraded algebra of a context.
#[derive(Clone)]
pub struct GradedPoly {
    ctx: Arc<GradedContext>,
    terms: Terms,
}

impl fmt::Debug for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedPoly({self})")
    }
}

impl PartialEq for GradedPoly {
    fn eq(&self, other: &Self) -> bool {
        contexts_compatible(&self.ctx, &other.ctx) && self.terms == other.terms
    }
}

impl Eq for GradedPoly {}

impl GradedPoly {
    pub fn zero(ctx: &Arc<GradedContext>) -> Self {
        GradedPoly { ctx: ctx.clone(), terms: Terms::new() }
    }

    pub fn one(ctx: &Arc<GradedContext>) -> Self {
        Self::constant(ctx, Rational::one())
    }

    pub fn constant(ctx: &Arc<GradedContext>, c: Rational) -> Self {
        let mut terms = Terms::new();
        add_term(&mut terms, Monomial::one(ctx.num_generators()), c);
        GradedPoly { ctx: ctx.clone(), terms }
    }

    pub fn integer(ctx: &Arc<GradedContext>, c: i64) -> Self {
        Self::constant(ctx, rat(c))
    }

    pub fn generator(ctx: &Arc<GradedContext>, idx: usize) -> Self {
        let mut terms = Terms::new();
        terms.insert(Monomial::generator(ctx.num_generators(), idx), Rational::one());
        GradedPoly { ctx: ctx.clone(), terms }
    }

    /// The generator with the given display name (`x`, `z`, `d(x)`, ...).
    pub fn var(ctx: &Arc<GradedContext>, name: &str) -> Result<Self> {
        Ok(Self::generator(ctx, ctx.require(name)?))
    }

    /// Differential `d(g)` of a coordinate given by its generator index.
    pub fn differential_of(ctx: &Arc<GradedContext>, coord: usize) -> Self {
        Self::generator(ctx, ctx.differential_index(coord))
    }

    pub fn from_terms(ctx: Arc<GradedContext>, mut terms: Terms) -> Self {
        terms.retain(|_, c| !c.is_zero());
        GradedPoly { ctx, terms }
    }

    pub fn from_monomial(ctx: &Arc<GradedContext>, m: Monomial, c: Rational) -> Self {
        let mut terms = Terms::new();
        add_term(&mut terms, m, c);
        GradedPoly { ctx: ctx.clone(), terms }
    }

    /// Builds the canonical form of a sum of products of generators given by
    /// name, applying the Koszul sign rule to each product.
    pub fn normalize<S: AsRef<str>>(
        ctx: &Arc<GradedContext>,
        raw: &[(Rational, Vec<S>)],
    ) -> Result<Self> {
        let mut acc = Terms::new();
        for (coeff, factors) in raw {
            let mut current = Monomial::one(ctx.num_generators());
            let mut negative = false;
            let mut vanished = false;
            for name in factors {
                let idx = ctx.require(name.as_ref())?;
                if vanished {
                    continue;
                }
                let g = Monomial::generator(ctx.num_generators(), idx);
                match multiply_monomials(ctx, &current, &g) {
                    Some((m, neg)) => {
                        current = m;
                        negative ^= neg;
                    }
                    None => vanished = true,
                }
            }
            if !vanished {
                let c = if negative { -coeff.clone() } else { coeff.clone() };
                add_term(&mut acc, current, c);
            }
        }
        Ok(GradedPoly { ctx: ctx.clone(), terms: acc })
    }

    pub fn context(&self) -> &Arc<GradedContext> {
        &self.ctx
    }

    pub fn terms(&self) -> &Terms {
        &self.terms
    }

    pub fn into_terms(self) -> Terms {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// Constant term (coefficient of the empty monomial).
    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial::one(self.ctx.num_generators()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// True when only base coordinates occur.
    pub fn is_base_function(&self) -> bool {
        let nb = self.ctx.num_base();
        self.terms
            .keys()
            .all(|m| m.0.iter().enumerate().all(|(i, &e)| e == 0 || i < nb))
    }

    /// True when no differentials occur (a function on the graded manifold).
    pub fn is_function(&self) -> bool {
        let nc = self.ctx.num_coords();
        self.terms
            .keys()
            .all(|m| m.0.iter().enumerate().all(|(i, &e)| e == 0 || i < nc))
    }

    pub fn bidegree(&self) -> Homogeneity {
        let mut found: Option<Bidegree> = None;
        for m in self.terms.keys() {
            let b = monomial_bidegree(&self.ctx, m);
            match found {
                None => found = Some(b),
                Some(prev) if prev != b => return Homogeneity::Mixed,
                _ => {}
            }
        }
        match found {
            None => Homogeneity::Zero,
            Some(b) => Homogeneity::Homogeneous(b),
        }
    }

    /// Parity of a homogeneous (or zero) element. Mixed parities are an error.
    pub fn parity(&self) -> Result<u32> {
        let mut found: Option<u32> = None;
        for m in self.terms.keys() {
            let p = monomial_parity(&self.ctx, m);
            match found {
                None => found = Some(p),
                Some(prev) if prev != p => {
                    return Err(Error::Inhomogeneous(format!("`{self}` mixes parities")))
                }
                _ => {}
            }
        }
        Ok(found.unwrap_or(0))
    }

    fn check(&self, other: &GradedPoly) -> Result<()> {
        if contexts_compatible(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn try_add(&self, other: &GradedPoly) -> Result<GradedPoly> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        add_terms_into(&mut terms, &other.terms);
        Ok(GradedPoly { ctx: self.ctx.clone(), terms })
    }

    pub fn try_sub(&self, other: &GradedPoly) -> Result<GradedPoly> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &GradedPoly) -> Result<GradedPoly> {
        self.check(other)?;
        let mut terms = Terms::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, neg)) = multiply_monomials(&self.ctx, ma, mb) {
                    let c = ca * cb;
                    add_term(&mut terms, m, if neg { -c } else { c });
                }
            }
        }
        Ok(GradedPoly { ctx: self.ctx.clone(), terms })
    }

    pub fn scale(&self, c: &Rational) -> GradedPoly {
        if c.is_zero() {
            return GradedPoly::zero(&self.ctx);
        }
        GradedPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> GradedPoly {
        self.scale(&rat(c))
    }

    pub fn pow(&self, n: u32) -> GradedPoly {
        let mut acc = GradedPoly::one(&self.ctx);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Left graded partial derivative with respect to a generator index.
    pub fn partial(&self, idx: usize) -> GradedPoly {
        let odd = self.ctx.generator(idx).is_odd();
        let mut terms = Terms::new();
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut out = m.clone();
            out.0[idx] -= 1;
            if odd {
                let before = (0..idx)
                    .filter(|&j| m.0[j] > 0 && self.ctx.generator(j).is_odd())
                    .count();
                let v = if before % 2 == 1 { -c.clone() } else { c.clone() };
                add_term(&mut terms, out, v);
            } else {
                add_term(&mut terms, out, c * rat(e as i64));
            }
        }
        GradedPoly { ctx: self.ctx.clone(), terms }
    }

    pub fn partial_by_name(&self, name: &str) -> Result<GradedPoly> {
        Ok(self.partial(self.ctx.require(name)?))
    }

    /// Moves this polynomial into another context by matching generator
    /// names. Every generator in use must exist in the target.
    pub fn transport(&self, target: &Arc<GradedContext>) -> Result<GradedPoly> {
        if Arc::ptr_eq(&self.ctx, target) || self.ctx.same_layout(target) {
            return Ok(GradedPoly { ctx: target.clone(), terms: self.terms.clone() });
        }
        let map: Vec<Option<usize>> = self
            .ctx
            .generators()
            .iter()
            .map(|g| target.index_of(&g.name))
            .collect();
        let mut out = GradedPoly::zero(target);
        for (m, c) in &self.terms {
            let mut factors = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let j = map[i].ok_or_else(|| {
                    Error::UnknownGenerator(self.ctx.generator(i).name.clone())
                })?;
                if target.generator(j).is_odd() != self.ctx.generator(i).is_odd() {
                    return Err(Error::InvalidDegree(format!(
                        "generator `{}` changes parity between contexts",
                        self.ctx.generator(i).name
                    )));
                }
                for _ in 0..e {
                    factors.push(target.generator(j).name.clone());
                }
            }
            let p = GradedPoly::normalize(target, &[(c.clone(), factors)])?;
            out = &out + &p;
        }
        Ok(out)
    }

    /// Sets all fiber coordinates and their differentials to zero.
    pub fn restrict_to_base(&self) -> GradedPoly {
        let ctx = &self.ctx;
        let nb = ctx.num_base();
        let nc = ctx.num_coords();
        let keep = |i: usize| i < nb || (i >= nc && i < nc + nb);
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.0.iter().enumerate().all(|(i, &e)| e == 0 || keep(i)))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        GradedPoly { ctx: ctx.clone(), terms }
    }

    /// Substitutes rational values for base coordinates.
    pub fn evaluate_base(&self, values: &[Rational]) -> GradedPoly {
        let nb = self.ctx.num_base();
        let mut terms = Terms::new();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            let mut out = m.clone();
            for i in 0..nb {
                let e = m.0[i];
                if e > 0 {
                    v *= num_traits::pow(values[i].clone(), e as usize);
                    out.0[i] = 0;
                }
            }
            add_term(&mut terms, out, v);
        }
        GradedPoly { ctx: self.ctx.clone(), terms }
    }

    /// Keeps only the monomials of the given bidegree.
    pub fn component(&self, b: Bidegree) -> GradedPoly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| monomial_bidegree(&self.ctx, m) == b)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        GradedPoly { ctx: self.ctx.clone(), terms }
    }

    /// Highest exponent sum among monomials (polynomial degree), 0 for zero.
    pub fn max_total_exponent(&self) -> u32 {
        self.terms.keys().map(Monomial::total).max().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next()
    }
}

impl Add for &GradedPoly {
    type Output = GradedPoly;
    fn add(self, rhs: &GradedPoly) -> GradedPoly {
        self.try_add(rhs).expect("context mismatch in addition")
    }
}

impl Sub for &GradedPoly {
    type Output = GradedPoly;
    fn sub(self, rhs: &GradedPoly) -> GradedPoly {
        self.try_sub(rhs).expect("context mismatch in subtraction")
    }
}

impl Mul for &GradedPoly {
    type Output = GradedPoly;
    fn mul(self, rhs: &GradedPoly) -> GradedPoly {
        self.try_mul(rhs).expect("context mismatch in multiplication")
    }
}

impl Neg for &GradedPoly {
    type Output = GradedPoly;
    fn neg(self) -> GradedPoly {
        GradedPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for GradedPoly {
            type Output = GradedPoly;
            fn $method(self, rhs: GradedPoly) -> GradedPoly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&GradedPoly> for GradedPoly {
            type Output = GradedPoly;
            fn $method(self, rhs: &GradedPoly) -> GradedPoly {
                (&self).$method(rhs)
            }
        }
        impl $tr<GradedPoly> for &GradedPoly {
            type Output = GradedPoly;
            fn $method(self, rhs: GradedPoly) -> GradedPoly {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for GradedPoly {
    type Output = GradedPoly;
    fn neg(self) -> GradedPoly {
        -&self
    }
}

pub fn format_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub(crate) fn format_monomial(ctx: &GradedContext, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let name = &ctx.generator(i).name;
        if e == 1 {
            parts.push(name.clone());
        } else {
            parts.push(format!("{name}^{e}"));
        }
    }
    parts.join("*")
}

impl fmt::Display for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let body = format_monomial(&self.ctx, m);
            if body.is_empty() {
                write!(f, "{}", format_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{body}")?;
            } else {
                write!(f, "{}*{body}", format_rational(&abs))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Arc<GradedContext> {
        GradedContext::builder()
            .bases(["x", "y"])
            .fiber("z1", 1)
            .fiber("z2", 1)
            .fiber("z3", 1)
            .fiber("w", 2)
            .build()
            .unwrap()
    }

    fn v(c: &Arc<GradedContext>, n: &str) -> GradedPoly {
        GradedPoly::var(c, n).unwrap()
    }

    #[test]
    fn odd_square_vanishes() {
        let c = ctx();
        let p = GradedPoly::normalize(&c, &[(rat(1), vec!["z1", "z1"])]).unwrap();
        assert!(p.is_zero());
        let dx = v(&c, "d(x)");
        assert!((&dx * &dx).is_zero());
    }

    #[test]
    fn differentials_anticommute() {
        let c = ctx();
        let p = GradedPoly::normalize(
            &c,
            &[(rat(1), vec!["d(x)", "d(y)"]), (rat(1), vec!["d(y)", "d(x)"])],
        )
        .unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn odd_coordinate_commutes_with_its_differential() {
        let c = ctx();
        let p = GradedPoly::normalize(
            &c,
            &[(rat(1), vec!["z1", "d(z1)"]), (rat(-1), vec!["d(z1)", "z1"])],
        )
        .unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn product_sign_matches_permutation() {
        let c = ctx();
        let a = GradedPoly::normalize(&c, &[(rat(1), vec!["z2", "z3"])]).unwrap();
        let b = v(&c, "z1");
        // z2 z3 z1 = z1 z2 z3 (cyclic permutation of three is even)
        let canon = GradedPoly::normalize(&c, &[(rat(1), vec!["z1", "z2", "z3"])]).unwrap();
        assert_eq!(&a * &b, canon);
        let a = GradedPoly::normalize(&c, &[(rat(1), vec!["z1", "z3"])]).unwrap();
        let b = v(&c, "z2");
        assert_eq!(&a * &b, -&canon);
    }

    #[test]
    fn left_partial_signs() {
        let c = ctx();
        let z1 = v(&c, "z1");
        let z2 = v(&c, "z2");
        let x = v(&c, "x");
        assert_eq!((&z1 * &x).partial_by_name("z1").unwrap(), x);
        assert_eq!((&z2 * &z1).partial_by_name("z1").unwrap(), -&z2);
        let p = &x.pow(2) * &z1;
        assert_eq!(p.partial_by_name("x").unwrap(), (&x * &z1).scale_int(2));
    }

    #[test]
    fn bidegree_reports() {
        let c = ctx();
        let p = &v(&c, "d(z1)") * &v(&c, "x");
        assert_eq!(p.bidegree(), Homogeneity::Homogeneous(Bidegree::new(1, 1)));
        assert_eq!(GradedPoly::zero(&c).bidegree(), Homogeneity::Zero);
        assert_eq!((&v(&c, "x") + &v(&c, "d(x)")).bidegree(), Homogeneity::Mixed);
    }

    #[test]
    fn display_is_canonical() {
        let c = ctx();
        let p = &(&v(&c, "x").pow(2) * &v(&c, "z1")).scale(&ratio(3, 2)) - &GradedPoly::integer(&c, 4);
        assert_eq!(p.to_string(), "3/2*x^2*z1 - 4");
    }

    #[test]
    fn unknown_generator_errors() {
        let c = ctx();
        assert_eq!(
            GradedPoly::normalize(&c, &[(rat(1), vec!["q"])]).unwrap_err(),
            Error::UnknownGenerator("q".into())
        );
    }

    #[test]
    fn mismatched_contexts_error() {
        let c = ctx();
        let other = GradedContext::builder().base("x").build().unwrap();
        let a = v(&c, "x");
        let b = GradedPoly::var(&other, "x").unwrap();
        assert_eq!(a.try_mul(&b).unwrap_err(), Error::ContextMismatch);
    }
}
