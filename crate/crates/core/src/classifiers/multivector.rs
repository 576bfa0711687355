//! Multivector fields on the base and the Schouten-Nijenhuis bracket.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::context::GradedContext;
use crate::error::{Error, Result};
use crate::poly::{contexts_compatible, GradedPoly};

/// A `k`-vector field `sum_{i1<...<ik} P^{i1...ik} d/dx^i1 ^ ... ^ d/dx^ik`
/// with base function coefficients.
#[derive(Clone)]
pub struct MultivectorField {
    ctx: Arc<GradedContext>,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, GradedPoly>,
}

/// Sorts indices; `None` when an index repeats.
fn sort_indices(idx: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut v = idx.to_vec();
    let mut neg = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            neg = !neg;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, neg))
    }
}

impl MultivectorField {
    pub fn zero(ctx: &Arc<GradedContext>, degree: usize) -> Self {
        MultivectorField { ctx: ctx.clone(), degree, coeffs: BTreeMap::new() }
    }

    /// A function seen as a 0-vector.
    pub fn function(f: &GradedPoly) -> Result<Self> {
        let mut m = Self::zero(f.context(), 0);
        m.add_entry(&[], f)?;
        Ok(m)
    }

    /// A vector field from its components along `d/dx^i`.
    pub fn vector(ctx: &Arc<GradedContext>, comps: &[GradedPoly]) -> Result<Self> {
        let mut m = Self::zero(ctx, 1);
        for (i, c) in comps.iter().enumerate() {
            m.add_entry(&[i], c)?;
        }
        Ok(m)
    }

    /// A bivector from entries `(i, j, P^{ij})`; entries with `i > j` are
    /// folded in with a sign.
    pub fn bivector(ctx: &Arc<GradedContext>, entries: &[(usize, usize, GradedPoly)]) -> Result<Self> {
        let mut m = Self::zero(ctx, 2);
        for (i, j, p) in entries {
            m.add_entry(&[*i, *j], p)?;
        }
        Ok(m)
    }

    /// Adds `p` to the coefficient of `d/dx^{idx[0]} ^ ...`.
    pub fn add_entry(&mut self, idx: &[usize], p: &GradedPoly) -> Result<()> {
        if idx.len() != self.degree {
            return Err(Error::ArityMismatch(format!(
                "{} indices for a {}-vector",
                idx.len(),
                self.degree
            )));
        }
        if !contexts_compatible(&self.ctx, p.context()) {
            return Err(Error::ContextMismatch);
        }
        if !p.is_base_function() {
            return Err(Error::InvalidDegree(format!("coefficient `{p}` is not a base function")));
        }
        if let Some(&i) = idx.iter().find(|&&i| i >= self.ctx.num_base()) {
            return Err(Error::UnknownGenerator(format!("base coordinate #{i}")));
        }
        let Some((key, neg)) = sort_indices(idx) else {
            return Ok(());
        };
        let add = if neg { -p } else { p.clone() };
        let slot = self.coeffs.entry(key.clone()).or_insert_with(|| GradedPoly::zero(&self.ctx));
        *slot = &*slot + &add;
        if slot.is_zero() {
            self.coeffs.remove(&key);
        }
        Ok(())
    }

    pub fn context(&self) -> &Arc<GradedContext> {
        &self.ctx
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficients(&self) -> &BTreeMap<Vec<usize>, GradedPoly> {
        &self.coeffs
    }

    /// Coefficient on an arbitrary index tuple (antisymmetric).
    pub fn get(&self, idx: &[usize]) -> GradedPoly {
        match sort_indices(idx) {
            None => GradedPoly::zero(&self.ctx),
            Some((key, neg)) => match self.coeffs.get(&key) {
                None => GradedPoly::zero(&self.ctx),
                Some(p) => {
                    if neg {
                        -p
                    } else {
                        p.clone()
                    }
                }
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn first_nonzero(&self) -> Option<(Vec<usize>, GradedPoly)> {
        self.coeffs.iter().next().map(|(k, v)| (k.clone(), v.clone()))
    }

    /// Label of a basis multivector such as `d/dx^d/dy`.
    pub fn index_label(&self, idx: &[usize]) -> String {
        if idx.is_empty() {
            return "1".into();
        }
        idx.iter().map(|&i| format!("d/d{}", self.ctx.base_names()[i])).collect::<Vec<_>>().join("^")
    }

    fn combine(&self, other: &Self, sign: i64) -> Result<Self> {
        if !contexts_compatible(&self.ctx, other.context()) {
            return Err(Error::ContextMismatch);
        }
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::ArityMismatch(format!(
                "cannot add a {}-vector and a {}-vector",
                self.degree, other.degree
            )));
        }
        let mut out = if self.is_zero() { Self::zero(&self.ctx, other.degree) } else { self.clone() };
        for (k, v) in &other.coeffs {
            out.add_entry(k, &v.scale_int(sign))?;
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1)
    }

    pub fn scale(&self, c: &crate::Rational) -> Self {
        let mut out = Self::zero(&self.ctx, self.degree);
        for (k, v) in &self.coeffs {
            let s = v.scale(c);
            if !s.is_zero() {
                out.coeffs.insert(k.clone(), s);
            }
        }
        out
    }

    pub fn left_mul(&self, f: &GradedPoly) -> Result<Self> {
        let mut out = Self::zero(&self.ctx, self.degree);
        for (k, v) in &self.coeffs {
            out.add_entry(k, &f.try_mul(v)?)?;
        }
        Ok(out)
    }

    /// Exterior product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if !contexts_compatible(&self.ctx, other.context()) {
            return Err(Error::ContextMismatch);
        }
        let mut out = Self::zero(&self.ctx, self.degree + other.degree);
        for (a, p) in &self.coeffs {
            for (b, q) in &other.coeffs {
                let mut idx = a.clone();
                idx.extend(b);
                out.add_entry(&idx, &(p * q))?;
            }
        }
        Ok(out)
    }

    /// Contraction with a 1-form given by components: `(i_phi P)^{J} = phi_i P^{iJ}`.
    pub fn contract(&self, phi: &[GradedPoly]) -> Result<Self> {
        if self.degree == 0 {
            return Err(Error::ArityMismatch("cannot contract a function".into()));
        }
        let mut out = Self::zero(&self.ctx, self.degree - 1);
        for (k, v) in &self.coeffs {
            for (pos, &i) in k.iter().enumerate() {
                let Some(c) = phi.get(i) else { continue };
                if c.is_zero() {
                    continue;
                }
                let mut rest = k.clone();
                rest.remove(pos);
                let t = c.try_mul(v)?;
                out.add_entry(&rest, &if pos % 2 == 1 { -&t } else { t })?;
            }
        }
        Ok(out)
    }

    /// `P(a, b)` for a bivector and two 1-forms given by components.
    pub fn pair(&self, a: &[GradedPoly], b: &[GradedPoly]) -> Result<GradedPoly> {
        let v = self.contract(a)?;
        let f = v.contract(b)?;
        Ok(f.get(&[]))
    }

    /// Applies a vector field to a base function.
    pub fn apply(&self, f: &GradedPoly) -> Result<GradedPoly> {
        if self.degree != 1 {
            return Err(Error::ArityMismatch("only vector fields act on functions".into()));
        }
        let mut acc = GradedPoly::zero(&self.ctx);
        for (k, v) in &self.coeffs {
            acc = &acc + &v.try_mul(&f.partial(self.ctx.base_index(k[0])))?;
        }
        Ok(acc)
    }

    /// Components along `d/dx^i` of a vector field.
    pub fn components(&self) -> Vec<GradedPoly> {
        (0..self.ctx.num_base()).map(|i| self.get(&[i])).collect()
    }

    /// Moves the coefficients to a context with the same base names.
    pub fn transport(&self, target: &Arc<GradedContext>) -> Result<Self> {
        let mut out = Self::zero(target, self.degree);
        for (k, v) in &self.coeffs {
            let idx = k
                .iter()
                .map(|&i| target.base_position(&self.ctx.base_names()[i]))
                .collect::<Result<Vec<_>>>()?;
            out.add_entry(&idx, &v.transport(target)?)?;
        }
        Ok(out)
    }
}

impl PartialEq for MultivectorField {
    fn eq(&self, other: &Self) -> bool {
        (self.is_zero() && other.is_zero())
            || (self.degree == other.degree
                && contexts_compatible(&self.ctx, &other.ctx)
                && self.coeffs == other.coeffs)
    }
}

impl fmt::Debug for MultivectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultivectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(k, v)| {
                if k.is_empty() {
                    format!("{v}")
                } else {
                    format!("({v})*{}", self.index_label(k))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Context of `T*[1]M` whose odd coordinates stand for `d/dx^i`.
fn super_context(ctx: &GradedContext) -> Result<Arc<GradedContext>> {
    let mut b = GradedContext::builder();
    for x in ctx.base_names() {
        b = b.base(x.clone());
    }
    for i in 0..ctx.num_base() {
        b = b.fiber(format!("__theta{i}"), 1);
    }
    b.build()
}

fn to_super(p: &MultivectorField, sup: &Arc<GradedContext>) -> Result<GradedPoly> {
    let mut acc = GradedPoly::zero(sup);
    for (k, v) in &p.coeffs {
        let mut mono = v.transport(sup)?;
        for &i in k {
            mono = &mono * &GradedPoly::generator(sup, sup.fiber_index(i));
        }
        acc = &acc + &mono;
    }
    Ok(acc)
}

fn from_super(f: &GradedPoly, ctx: &Arc<GradedContext>, degree: usize) -> Result<MultivectorField> {
    let sup = f.context();
    let nb = sup.num_base();
    let mut out = MultivectorField::zero(ctx, degree);
    for (m, c) in f.terms() {
        let mut idx = Vec::new();
        let mut base_exp = vec![0u32; sup.num_generators()];
        for (g, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if g < nb {
                base_exp[g] = e;
            } else {
                idx.push(g - nb);
            }
        }
        let coeff = GradedPoly::from_monomial(sup, crate::poly::Monomial(base_exp), c.clone());
        out.add_entry(&idx, &coeff.transport(ctx)?)?;
    }
    Ok(out)
}

/// Schouten-Nijenhuis bracket, normalized so that it is the commutator on
/// vector fields and `[X, f] = X(f)`.
pub fn schouten_bracket(p: &MultivectorField, r: &MultivectorField) -> Result<MultivectorField> {
    if !contexts_compatible(&p.ctx, &r.ctx) {
        return Err(Error::ContextMismatch);
    }
    let ctx = &p.ctx;
    let degree = (p.degree + r.degree).checked_sub(1);
    let Some(degree) = degree else {
        return Ok(MultivectorField::zero(ctx, 0));
    };
    let sup = super_context(ctx)?;
    let ps = to_super(p, &sup)?;
    let rs = to_super(r, &sup)?;
    let right = |f: &GradedPoly, deg: usize, i: usize| {
        let l = f.partial(sup.fiber_index(i));
        if deg % 2 == 0 {
            -&l
        } else {
            l
        }
    };
    let sign_odd = (p.degree + 1) * (r.degree + 1) % 2 == 1;
    let mut acc = GradedPoly::zero(&sup);
    for i in 0..ctx.num_base() {
        let t1 = &right(&ps, p.degree, i) * &rs.partial(sup.base_index(i));
        let t2 = &right(&rs, r.degree, i) * &ps.partial(sup.base_index(i));
        acc = &acc + &t1;
        acc = if sign_odd { &acc + &t2 } else { &acc - &t2 };
    }
    from_super(&acc, ctx, degree)
}
