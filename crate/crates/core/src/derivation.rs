//! Derivations of the algebra of E-valued forms.
//!
//! A derivation of bidegree `(f, n)` is stored through its symbol, a
//! coefficient for every generator (coordinates and their differentials),
//! and its endomorphism part, the values on the frame. It acts by
//!
//! ```text
//! D(w^a e_a) = s(w^a) e_a + (-1)^{p |w^a|} w^a K[b][a] e_b
//! ```
//!
//! where `p = f + n mod 2` is the parity of `D` and `s = sum s^g d/dg`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::context::GradedContext;
use crate::error::{Error, Result};
use crate::form::VectorValuedForm;
use crate::poly::{
    contexts_compatible, monomial_parity, rat, Bidegree, GradedPoly, Homogeneity, Rational, Terms,
};

#[derive(Clone)]
pub struct Derivation {
    ctx: Arc<GradedContext>,
    form_degree: i32,
    degree: i32,
    symbol: BTreeMap<usize, GradedPoly>,
    /// `endo[beta][alpha]`: coefficient of `e_beta` in `D(e_alpha)`.
    endo: Vec<Vec<GradedPoly>>,
}

fn parity_of(v: i32) -> u32 {
    v.rem_euclid(2) as u32
}

fn sign(odd: bool) -> Rational {
    if odd {
        rat(-1)
    } else {
        rat(1)
    }
}

impl Derivation {
    /// Builds a derivation after checking that every coefficient has the
    /// bidegree forced by `(form_degree, degree)`.
    pub fn new(
        ctx: &Arc<GradedContext>,
        form_degree: i32,
        degree: i32,
        symbol: BTreeMap<usize, GradedPoly>,
        endo: Option<Vec<Vec<GradedPoly>>>,
    ) -> Result<Self> {
        let r = ctx.rank();
        let endo = match endo {
            Some(e) => {
                if e.len() != r || e.iter().any(|row| row.len() != r) {
                    return Err(Error::FrameMismatch(format!(
                        "endomorphism part must be {r}x{r}"
                    )));
                }
                e
            }
            None => vec![vec![GradedPoly::zero(ctx); r]; r],
        };
        let d = Derivation { ctx: ctx.clone(), form_degree, degree, symbol, endo };
        d.validate()?;
        Ok(d.pruned())
    }

    pub(crate) fn from_parts_unchecked(
        ctx: &Arc<GradedContext>,
        form_degree: i32,
        degree: i32,
        symbol: BTreeMap<usize, GradedPoly>,
        endo: Vec<Vec<GradedPoly>>,
    ) -> Self {
        Derivation { ctx: ctx.clone(), form_degree, degree, symbol, endo }.pruned()
    }

    fn pruned(mut self) -> Self {
        self.symbol.retain(|_, p| !p.is_zero());
        self
    }

    fn validate(&self) -> Result<()> {
        for (&g, coeff) in &self.symbol {
            if g >= self.ctx.num_generators() {
                return Err(Error::UnknownGenerator(format!("#{g}")));
            }
            if !contexts_compatible(coeff.context(), &self.ctx) {
                return Err(Error::ContextMismatch);
            }
            let gen = self.ctx.generator(g);
            let f = gen.form_degree as i32 + self.form_degree;
            let n = gen.internal_degree as i32 + self.degree;
            self.check_coefficient(coeff, f, n, &format!("d/d{}", gen.name))?;
        }
        for row in &self.endo {
            for coeff in row {
                if !contexts_compatible(coeff.context(), &self.ctx) {
                    return Err(Error::ContextMismatch);
                }
                self.check_coefficient(coeff, self.form_degree, self.degree, "frame action")?;
            }
        }
        Ok(())
    }

    fn check_coefficient(&self, coeff: &GradedPoly, f: i32, n: i32, what: &str) -> Result<()> {
        match coeff.bidegree() {
            Homogeneity::Zero => Ok(()),
            Homogeneity::Mixed => Err(Error::Inhomogeneous(format!(
                "coefficient of {what} is `{coeff}`"
            ))),
            Homogeneity::Homogeneous(b) => {
                if f < 0 || n < 0 || b != Bidegree::new(f as u32, n as u32) {
                    Err(Error::InvalidDegree(format!(
                        "coefficient `{coeff}` of {what} has bidegree {b}, expected (form {f}, internal {n})"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// A vector field on the graded manifold of internal degree `degree`,
    /// given by its values on coordinates, with optional frame action.
    pub fn vector_field(
        ctx: &Arc<GradedContext>,
        degree: i32,
        coefficients: &[(usize, GradedPoly)],
        endo: Option<Vec<Vec<GradedPoly>>>,
    ) -> Result<Self> {
        let mut symbol = BTreeMap::new();
        for (g, c) in coefficients {
            if *g >= ctx.num_coords() {
                return Err(Error::NotAVectorField(format!(
                    "`{}` is not a coordinate",
                    ctx.generator(*g).name
                )));
            }
            let slot = symbol.entry(*g).or_insert_with(|| GradedPoly::zero(ctx));
            *slot = &*slot + c;
        }
        Self::new(ctx, 0, degree, symbol, endo)
    }

    /// Same as [`Derivation::vector_field`] with coordinates given by name.
    pub fn vector_field_named(
        ctx: &Arc<GradedContext>,
        degree: i32,
        coefficients: &[(&str, GradedPoly)],
    ) -> Result<Self> {
        let mut resolved = Vec::new();
        for (name, c) in coefficients {
            resolved.push((ctx.require(name)?, c.clone()));
        }
        Self::vector_field(ctx, degree, &resolved, None)
    }

    /// The coordinate vector field `d/dg` for a coordinate `g`.
    pub fn coordinate_field(ctx: &Arc<GradedContext>, g: usize) -> Self {
        let degree = -(ctx.generator(g).internal_degree as i32);
        let mut symbol = BTreeMap::new();
        symbol.insert(g, GradedPoly::one(ctx));
        Self::from_parts_unchecked(ctx, 0, degree, symbol, zero_endo(ctx))
    }

    pub fn zero(ctx: &Arc<GradedContext>, form_degree: i32, degree: i32) -> Self {
        Self::from_parts_unchecked(ctx, form_degree, degree, BTreeMap::new(), zero_endo(ctx))
    }

    /// Replaces the frame action.
    pub fn with_endo(&self, endo: Vec<Vec<GradedPoly>>) -> Result<Self> {
        Self::new(&self.ctx, self.form_degree, self.degree, self.symbol.clone(), Some(endo))
    }

    pub fn context(&self) -> &Arc<GradedContext> {
        &self.ctx
    }

    pub fn form_degree(&self) -> i32 {
        self.form_degree
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn parity(&self) -> u32 {
        parity_of(self.form_degree + self.degree)
    }

    pub fn symbol(&self) -> &BTreeMap<usize, GradedPoly> {
        &self.symbol
    }

    pub fn coefficient(&self, g: usize) -> GradedPoly {
        self.symbol.get(&g).cloned().unwrap_or_else(|| GradedPoly::zero(&self.ctx))
    }

    pub fn endo(&self) -> &[Vec<GradedPoly>] {
        &self.endo
    }

    /// True when the symbol only involves coordinates and the form degree is 0.
    pub fn is_vector_field(&self) -> bool {
        self.form_degree == 0 && self.symbol.keys().all(|&g| g < self.ctx.num_coords())
    }

    pub(crate) fn require_vector_field(&self) -> Result<()> {
        if self.is_vector_field() {
            Ok(())
        } else {
            Err(Error::NotAVectorField(format!("{self}")))
        }
    }

    pub fn has_endo(&self) -> bool {
        self.endo.iter().flatten().any(|p| !p.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.symbol.is_empty() && !self.has_endo()
    }

    pub(crate) fn check_context(&self, ctx: &Arc<GradedContext>) -> Result<()> {
        if contexts_compatible(&self.ctx, ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    /// Applies the symbol to a scalar form.
    pub fn apply_poly(&self, p: &GradedPoly) -> Result<GradedPoly> {
        self.check_context(p.context())?;
        let mut acc = GradedPoly::zero(&self.ctx);
        for (&g, coeff) in &self.symbol {
            let dp = p.partial(g);
            if !dp.is_zero() {
                acc = &acc + &(coeff * &dp);
            }
        }
        Ok(acc)
    }

    /// Applies the derivation to an E-valued form.
    pub fn apply(&self, w: &VectorValuedForm) -> Result<VectorValuedForm> {
        self.check_context(w.context())?;
        let r = self.ctx.rank();
        let mut out: Vec<GradedPoly> = Vec::with_capacity(r);
        for c in w.components() {
            out.push(self.apply_poly(c)?);
        }
        if self.has_endo() {
            let p = self.parity();
            for (alpha, c) in w.components().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let signed = if p == 1 { koszul_twist(c) } else { c.clone() };
                for (beta, slot) in out.iter_mut().enumerate() {
                    let k = &self.endo[beta][alpha];
                    if !k.is_zero() {
                        *slot = &*slot + &(&signed * k);
                    }
                }
            }
        }
        Ok(VectorValuedForm::from_parts(&self.ctx, out))
    }

    /// `D(e_alpha)`.
    pub fn apply_frame(&self, alpha: usize) -> VectorValuedForm {
        let comps = (0..self.ctx.rank()).map(|b| self.endo[b][alpha].clone()).collect();
        VectorValuedForm::from_parts(&self.ctx, comps)
    }

    /// Graded commutator `[A, B] = AB - (-1)^{|A||B|} BA`.
    pub fn commutator(&self, other: &Derivation) -> Result<Derivation> {
        self.check_context(&other.ctx)?;
        let s = sign(self.parity() * other.parity() == 1);
        let mut symbol = BTreeMap::new();
        for g in 0..self.ctx.num_generators() {
            let a = self.apply_poly(&other.coefficient(g))?;
            let b = other.apply_poly(&self.coefficient(g))?;
            let c = &a - &b.scale(&s);
            if !c.is_zero() {
                symbol.insert(g, c);
            }
        }
        let r = self.ctx.rank();
        let mut endo = vec![vec![GradedPoly::zero(&self.ctx); r]; r];
        if self.has_endo() || other.has_endo() {
            for alpha in 0..r {
                let ab = self.apply(&other.apply_frame(alpha))?;
                let ba = other.apply(&self.apply_frame(alpha))?;
                let v = ab.sub(&ba.scale(&s));
                for (beta, row) in endo.iter_mut().enumerate() {
                    row[alpha] = v.component(beta).clone();
                }
            }
        }
        Ok(Derivation::from_parts_unchecked(
            &self.ctx,
            self.form_degree + other.form_degree,
            self.degree + other.degree,
            symbol,
            endo,
        ))
    }

    fn same_shape(&self, other: &Derivation) -> Result<()> {
        self.check_context(&other.ctx)?;
        let both_zero = self.is_zero() || other.is_zero();
        if !both_zero && (self.form_degree != other.form_degree || self.degree != other.degree) {
            return Err(Error::InvalidDegree(format!(
                "cannot add derivations of bidegrees ({}, {}) and ({}, {})",
                self.form_degree, self.degree, other.form_degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Derivation) -> Result<Derivation> {
        self.same_shape(other)?;
        let (f, n) = if self.is_zero() {
            (other.form_degree, other.degree)
        } else {
            (self.form_degree, self.degree)
        };
        let mut symbol = self.symbol.clone();
        for (g, c) in &other.symbol {
            let slot = symbol.entry(*g).or_insert_with(|| GradedPoly::zero(&self.ctx));
            *slot = &*slot + c;
        }
        let endo = self
            .endo
            .iter()
            .zip(&other.endo)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| a + b).collect())
            .collect();
        Ok(Derivation::from_parts_unchecked(&self.ctx, f, n, symbol, endo))
    }

    pub fn neg(&self) -> Derivation {
        self.scale(&rat(-1))
    }

    pub fn try_sub(&self, other: &Derivation) -> Result<Derivation> {
        self.try_add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Derivation {
        Derivation::from_parts_unchecked(
            &self.ctx,
            self.form_degree,
            self.degree,
            self.symbol.iter().map(|(g, p)| (*g, p.scale(c))).collect(),
            self.endo.iter().map(|row| row.iter().map(|p| p.scale(c)).collect()).collect(),
        )
    }

    /// Left multiple `f D` by a homogeneous scalar form `f`.
    pub fn left_mul(&self, f: &GradedPoly) -> Result<Derivation> {
        self.check_context(f.context())?;
        let (df, dn) = match f.bidegree() {
            Homogeneity::Zero => return Ok(Derivation::zero(&self.ctx, self.form_degree, self.degree)),
            Homogeneity::Mixed => {
                return Err(Error::Inhomogeneous(format!("multiplier `{f}`")))
            }
            Homogeneity::Homogeneous(b) => (b.form_degree as i32, b.internal_degree as i32),
        };
        Ok(Derivation::from_parts_unchecked(
            &self.ctx,
            self.form_degree + df,
            self.degree + dn,
            self.symbol.iter().map(|(g, p)| (*g, f * p)).collect(),
            self.endo.iter().map(|row| row.iter().map(|p| f * p).collect()).collect(),
        ))
    }

    /// Restriction of the symbol to coordinates (the underlying vector field
    /// on the graded manifold), keeping the frame action.
    pub fn coordinate_part(&self) -> Derivation {
        let nc = self.ctx.num_coords();
        Derivation::from_parts_unchecked(
            &self.ctx,
            self.form_degree,
            self.degree,
            self.symbol.iter().filter(|(g, _)| **g < nc).map(|(g, p)| (*g, p.clone())).collect(),
            self.endo.clone(),
        )
    }

    /// First nonzero coefficient, labelled by generator or frame entry.
    pub fn first_nonzero(&self) -> Option<(String, GradedPoly)> {
        if let Some((g, p)) = self.symbol.iter().next() {
            return Some((format!("d/d{}", self.ctx.generator(*g).name), p.clone()));
        }
        for (beta, row) in self.endo.iter().enumerate() {
            for (alpha, p) in row.iter().enumerate() {
                if !p.is_zero() {
                    return Some((
                        format!("{} -> {}", frame_label(&self.ctx, alpha), frame_label(&self.ctx, beta)),
                        p.clone(),
                    ));
                }
            }
        }
        None
    }

    /// Transports the derivation to a context with the same generator names.
    pub fn transport(&self, target: &Arc<GradedContext>) -> Result<Derivation> {
        let mut symbol = BTreeMap::new();
        for (g, p) in &self.symbol {
            let j = target.require(&self.ctx.generator(*g).name)?;
            symbol.insert(j, p.transport(target)?);
        }
        if target.rank() != self.ctx.rank() {
            return Err(Error::FrameMismatch("frames differ in rank".into()));
        }
        let endo = self
            .endo
            .iter()
            .map(|row| row.iter().map(|p| p.transport(target)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Derivation::new(target, self.form_degree, self.degree, symbol, Some(endo))
    }
}

pub(crate) fn zero_endo(ctx: &Arc<GradedContext>) -> Vec<Vec<GradedPoly>> {
    let r = ctx.rank();
    vec![vec![GradedPoly::zero(ctx); r]; r]
}

fn frame_label(ctx: &GradedContext, alpha: usize) -> String {
    ctx.frame_names().get(alpha).cloned().unwrap_or_else(|| "1".to_string())
}

/// Multiplies every odd monomial by -1.
pub(crate) fn koszul_twist(p: &GradedPoly) -> GradedPoly {
    let ctx = p.context();
    let terms: Terms = p
        .terms()
        .iter()
        .map(|(m, c)| {
            if monomial_parity(ctx, m) == 1 {
                (m.clone(), -c)
            } else {
                (m.clone(), c.clone())
            }
        })
        .collect();
    GradedPoly::from_terms(ctx.clone(), terms)
}

impl PartialEq for Derivation {
    fn eq(&self, other: &Self) -> bool {
        if !contexts_compatible(&self.ctx, &other.ctx) {
            return false;
        }
        if self.is_zero() && other.is_zero() {
            return true;
        }
        self.form_degree == other.form_degree
            && self.degree == other.degree
            && self.symbol == other.symbol
            && self.endo == other.endo
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Derivation({self})")
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (g, p) in &self.symbol {
            parts.push(format!("({p})*d/d{}", self.ctx.generator(*g).name));
        }
        for (beta, row) in self.endo.iter().enumerate() {
            for (alpha, p) in row.iter().enumerate() {
                if !p.is_zero() {
                    parts.push(format!(
                        "[{} -> ({p})*{}]",
                        frame_label(&self.ctx, alpha),
                        frame_label(&self.ctx, beta)
                    ));
                }
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}
