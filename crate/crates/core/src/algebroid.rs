//! Degree one NQ structures: Lie algebroids in a frame, their homological
//! vector fields and derivations, and the Chevalley-Eilenberg differential.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::context::GradedContext;
use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::form::VectorValuedForm;
use crate::poly::{ratio, GradedPoly};

/// Context of `A[1] x_M E`: base coordinates, one degree one fiber
/// coordinate per element of the frame of `A`, and the frame of `E`.
pub fn algebroid_context<S: AsRef<str>>(
    base: &[S],
    a_frame: &[S],
    e_frame: &[S],
) -> Result<Arc<GradedContext>> {
    let mut b = GradedContext::builder();
    for x in base {
        b = b.base(x.as_ref());
    }
    for a in a_frame {
        b = b.fiber(a.as_ref(), 1);
    }
    for e in e_frame {
        b = b.frame(e.as_ref());
    }
    b.build()
}

pub(crate) fn require_degree_one(ctx: &GradedContext) -> Result<()> {
    if ctx.fiber_coords().iter().all(|(_, d)| *d == 1) {
        Ok(())
    } else {
        Err(Error::UnsupportedContext("expected a degree one context A[1]".into()))
    }
}

/// Anchor, structure functions and optional representation of a Lie
/// algebroid `A` in a frame `e_a`, written in an `A[1]` context whose fiber
/// coordinates are dual to the frame.
#[derive(Clone)]
pub struct AlgebroidData {
    ctx: Arc<GradedContext>,
    /// `anchor[a][i] = rho^i_a`.
    anchor: Vec<Vec<GradedPoly>>,
    /// `structure[a][b][c] = c^c_{ab}`, with `[[e_a, e_b]] = c^c_{ab} e_c`.
    structure: Vec<Vec<Vec<GradedPoly>>>,
    /// `representation[a][beta][alpha] = theta^beta_{a alpha}`, with
    /// `nabla_{e_a} e_alpha = theta^beta_{a alpha} e_beta`.
    representation: Option<Vec<Vec<Vec<GradedPoly>>>>,
}

impl AlgebroidData {
    /// Zero (abelian) data in a degree one context.
    pub fn abelian(ctx: &Arc<GradedContext>) -> Result<Self> {
        require_degree_one(ctx)?;
        let r = ctx.num_fiber();
        let m = ctx.num_base();
        let z = GradedPoly::zero(ctx);
        Ok(AlgebroidData {
            ctx: ctx.clone(),
            anchor: vec![vec![z.clone(); m]; r],
            structure: vec![vec![vec![z.clone(); r]; r]; r],
            representation: if ctx.has_frame() {
                let e = ctx.frame_names().len();
                Some(vec![vec![vec![z; e]; e]; r])
            } else {
                None
            },
        })
    }

    /// Full constructor; checks shapes, base dependence and antisymmetry.
    pub fn new(
        ctx: &Arc<GradedContext>,
        anchor: Vec<Vec<GradedPoly>>,
        structure: Vec<Vec<Vec<GradedPoly>>>,
        representation: Option<Vec<Vec<Vec<GradedPoly>>>>,
    ) -> Result<Self> {
        require_degree_one(ctx)?;
        let r = ctx.num_fiber();
        let m = ctx.num_base();
        let e = ctx.frame_names().len();
        let shape_err = |what: &str| Error::FrameMismatch(format!("{what} has the wrong shape"));
        if anchor.len() != r || anchor.iter().any(|row| row.len() != m) {
            return Err(shape_err("anchor"));
        }
        if structure.len() != r
            || structure.iter().any(|p| p.len() != r || p.iter().any(|q| q.len() != r))
        {
            return Err(shape_err("structure functions"));
        }
        if let Some(rep) = &representation {
            if rep.len() != r || rep.iter().any(|p| p.len() != e || p.iter().any(|q| q.len() != e)) {
                return Err(shape_err("representation"));
            }
        }
        let all = anchor
            .iter()
            .flatten()
            .chain(structure.iter().flatten().flatten())
            .chain(representation.iter().flatten().flatten().flatten());
        for p in all {
            if !p.is_base_function() {
                return Err(Error::InvalidDegree(format!(
                    "coefficient `{p}` must be a function on the base"
                )));
            }
        }
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    if !(&structure[a][b][c] + &structure[b][a][c]).is_zero() {
                        return Err(Error::FrameMismatch(format!(
                            "structure functions are not antisymmetric in ({}, {})",
                            ctx.fiber_coords()[a].0,
                            ctx.fiber_coords()[b].0
                        )));
                    }
                }
            }
        }
        Ok(AlgebroidData { ctx: ctx.clone(), anchor, structure, representation })
    }

    /// The tangent algebroid of the base in the coordinate frame. The
    /// context must have as many fiber coordinates as base coordinates.
    pub fn tangent(ctx: &Arc<GradedContext>) -> Result<Self> {
        let mut a = Self::abelian(ctx)?;
        if ctx.num_fiber() != ctx.num_base() {
            return Err(Error::FrameMismatch("tangent algebroid needs rank = dim M".into()));
        }
        for i in 0..ctx.num_base() {
            a.anchor[i][i] = GradedPoly::one(ctx);
        }
        Ok(a)
    }

    pub fn context(&self) -> &Arc<GradedContext> {
        &self.ctx
    }

    pub fn rank(&self) -> usize {
        self.ctx.num_fiber()
    }

    pub fn frame_names(&self) -> Vec<String> {
        self.ctx.fiber_coords().iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn anchor(&self, a: usize, i: usize) -> &GradedPoly {
        &self.anchor[a][i]
    }

    pub fn structure(&self, a: usize, b: usize, c: usize) -> &GradedPoly {
        &self.structure[a][b][c]
    }

    pub fn representation(&self) -> Option<&Vec<Vec<Vec<GradedPoly>>>> {
        self.representation.as_ref()
    }

    pub fn theta(&self, a: usize, beta: usize, alpha: usize) -> GradedPoly {
        match &self.representation {
            Some(r) => r[a][beta][alpha].clone(),
            None => GradedPoly::zero(&self.ctx),
        }
    }

    pub fn set_anchor(&mut self, a: usize, i: usize, p: GradedPoly) {
        self.anchor[a][i] = p;
    }

    /// Sets `c^c_{ab}` and `c^c_{ba} = -c^c_{ab}`.
    pub fn set_structure(&mut self, a: usize, b: usize, c: usize, p: GradedPoly) {
        self.structure[b][a][c] = -&p;
        self.structure[a][b][c] = p;
    }

    pub fn set_theta(&mut self, a: usize, beta: usize, alpha: usize, p: GradedPoly) {
        let e = self.ctx.frame_names().len();
        let r = self.rank();
        let z = GradedPoly::zero(&self.ctx);
        let rep = self.representation.get_or_insert_with(|| vec![vec![vec![z; e]; e]; r]);
        rep[a][beta][alpha] = p;
    }

    /// `rho(e_a)` as a vector field on the base (coefficients per base coordinate).
    pub fn anchor_row(&self, a: usize) -> &[GradedPoly] {
        &self.anchor[a]
    }

    /// `rho(e_a)` as a degree zero vector field with trivial frame action.
    pub fn anchor_field(&self, a: usize) -> Derivation {
        let coeffs: Vec<(usize, GradedPoly)> = self.anchor[a]
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(i, p)| (self.ctx.base_index(i), p.clone()))
            .collect();
        Derivation::vector_field(&self.ctx, 0, &coeffs, None).expect("anchor coefficients are base functions")
    }

    /// `rho(e_a)` acting on frame elements through `nabla_{e_a}`.
    pub fn connection_field(&self, a: usize) -> Derivation {
        let e = self.ctx.rank();
        let endo: Vec<Vec<GradedPoly>> = (0..e)
            .map(|beta| (0..e).map(|alpha| if self.ctx.has_frame() { self.theta(a, beta, alpha) } else { GradedPoly::zero(&self.ctx) }).collect())
            .collect();
        self.anchor_field(a).with_endo(endo).expect("endo has frame size")
    }

    /// The frame element `e_a` as the degree -1 field `d/dxi^a`.
    pub fn frame_field(&self, a: usize) -> Derivation {
        Derivation::coordinate_field(&self.ctx, self.ctx.fiber_index(a))
    }

    /// `[[e_a, e_b]]` as a degree -1 field.
    pub fn bracket_field(&self, a: usize, b: usize) -> Derivation {
        let coeffs: Vec<(usize, GradedPoly)> = (0..self.rank())
            .filter(|&c| !self.structure[a][b][c].is_zero())
            .map(|c| (self.ctx.fiber_index(c), self.structure[a][b][c].clone()))
            .collect();
        Derivation::vector_field(&self.ctx, -1, &coeffs, None).expect("structure functions are base functions")
    }

    /// Applies `rho(e_a)` to a base function.
    pub fn anchor_apply(&self, a: usize, f: &GradedPoly) -> GradedPoly {
        let mut acc = GradedPoly::zero(&self.ctx);
        for (i, r) in self.anchor[a].iter().enumerate() {
            if !r.is_zero() {
                acc = &acc + &(r * &f.partial(self.ctx.base_index(i)));
            }
        }
        acc
    }

    /// Moves the data to a context with the same names.
    pub fn transport(&self, target: &Arc<GradedContext>) -> Result<Self> {
        let tr = |p: &GradedPoly| p.transport(target);
        let anchor = self
            .anchor
            .iter()
            .map(|row| row.iter().map(tr).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let structure = self
            .structure
            .iter()
            .map(|p| p.iter().map(|q| q.iter().map(tr).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let representation = match &self.representation {
            Some(rep) if target.has_frame() => Some(
                rep.iter()
                    .map(|p| p.iter().map(|q| q.iter().map(tr).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?,
            ),
            _ => None,
        };
        Self::new(target, anchor, structure, representation)
    }
}

impl PartialEq for AlgebroidData {
    fn eq(&self, other: &Self) -> bool {
        let zero_rep = |r: &Option<Vec<Vec<Vec<GradedPoly>>>>| {
            r.as_ref().map_or(true, |v| v.iter().flatten().flatten().all(GradedPoly::is_zero))
        };
        let reps_equal = match (&self.representation, &other.representation) {
            (Some(a), Some(b)) => a == b,
            (a, b) => zero_rep(a) && zero_rep(b),
        };
        self.ctx.same_layout(&other.ctx)
            && self.anchor == other.anchor
            && self.structure == other.structure
            && reps_equal
    }
}

impl fmt::Debug for AlgebroidData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AlgebroidData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.frame_names();
        writeln!(f, "algebroid of rank {}", self.rank())?;
        for (a, row) in self.anchor.iter().enumerate() {
            for (i, p) in row.iter().enumerate() {
                if !p.is_zero() {
                    writeln!(f, "  anchor {} {} = {p}", names[a], self.ctx.base_names()[i])?;
                }
            }
        }
        for a in 0..self.rank() {
            for b in a + 1..self.rank() {
                for c in 0..self.rank() {
                    let p = &self.structure[a][b][c];
                    if !p.is_zero() {
                        writeln!(f, "  bracket {} {} {} = {p}", names[a], names[b], names[c])?;
                    }
                }
            }
        }
        if let Some(rep) = &self.representation {
            let fr = self.ctx.frame_names();
            for (a, m) in rep.iter().enumerate() {
                for (beta, row) in m.iter().enumerate() {
                    for (alpha, p) in row.iter().enumerate() {
                        if !p.is_zero() {
                            writeln!(f, "  rep {} {} {} = {p}", names[a], fr[alpha], fr[beta])?;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// `Q = rho^i_a xi^a d/dx^i - 1/2 c^c_{ab} xi^a xi^b d/dxi^c`.
pub fn build_homological_vf(a: &AlgebroidData) -> Result<Derivation> {
    let ctx = &a.ctx;
    let r = a.rank();
    let mut coeffs: BTreeMap<usize, GradedPoly> = BTreeMap::new();
    let xi = |k: usize| GradedPoly::generator(ctx, ctx.fiber_index(k));
    for b in 0..r {
        for i in 0..ctx.num_base() {
            let rho = &a.anchor[b][i];
            if !rho.is_zero() {
                let slot = coeffs.entry(ctx.base_index(i)).or_insert_with(|| GradedPoly::zero(ctx));
                *slot = &*slot + &(rho * &xi(b));
            }
        }
    }
    let half = ratio(-1, 2);
    for p in 0..r {
        for q in 0..r {
            for c in 0..r {
                let s = &a.structure[p][q][c];
                if !s.is_zero() {
                    let term = (s * &(&xi(p) * &xi(q))).scale(&half);
                    let slot = coeffs.entry(ctx.fiber_index(c)).or_insert_with(|| GradedPoly::zero(ctx));
                    *slot = &*slot + &term;
                }
            }
        }
    }
    let list: Vec<_> = coeffs.into_iter().collect();
    Derivation::vector_field(ctx, 1, &list, None)
}

/// The homological derivation of `A[1] x_M E` with frame action
/// `Q(e_alpha) = xi^a theta^beta_{a alpha} e_beta`.
pub fn build_homological_derivation(a: &AlgebroidData) -> Result<Derivation> {
    let ctx = &a.ctx;
    if !ctx.has_frame() {
        return Err(Error::FrameMismatch("a representation needs a frame".into()));
    }
    let q = build_homological_vf(a)?;
    let e = ctx.frame_names().len();
    let mut endo = vec![vec![GradedPoly::zero(ctx); e]; e];
    for k in 0..a.rank() {
        let xi = GradedPoly::generator(ctx, ctx.fiber_index(k));
        for (beta, row) in endo.iter_mut().enumerate() {
            for (alpha, slot) in row.iter_mut().enumerate() {
                let t = a.theta(k, beta, alpha);
                if !t.is_zero() {
                    *slot = &*slot + &(&xi * &t);
                }
            }
        }
    }
    q.with_endo(endo)
}

/// Result of `[Q, Q] = 0` with the first nonzero coefficient when it fails.
#[derive(Debug, Clone)]
pub struct HomologicalCheck {
    pub homological: bool,
    pub witness: Option<(String, GradedPoly)>,
}

pub fn check_homological(q: &Derivation) -> Result<HomologicalCheck> {
    if q.form_degree() != 0 || q.degree() != 1 {
        return Err(Error::WrongDegree { expected: 1, found: q.degree() + q.form_degree() });
    }
    let qq = q.commutator(q)?;
    let witness = qq.first_nonzero();
    Ok(HomologicalCheck { homological: witness.is_none(), witness })
}

/// Recovers anchor, bracket and representation from a homological `Q`.
pub fn extract_algebroid(q: &Derivation) -> Result<AlgebroidData> {
    let ctx = q.context();
    require_degree_one(ctx)?;
    let check = check_homological(q)?;
    if let Some((loc, p)) = check.witness {
        return Err(Error::NotHomological(format!("[Q,Q] has coefficient `{p}` at {loc}")));
    }
    let mut a = AlgebroidData::abelian(ctx)?;
    let r = a.rank();
    let fields: Vec<Derivation> = (0..r)
        .map(|k| Derivation::coordinate_field(ctx, ctx.fiber_index(k)))
        .collect();
    for (k, x) in fields.iter().enumerate() {
        let qx = q.commutator(x)?;
        for i in 0..ctx.num_base() {
            a.anchor[k][i] = qx.coefficient(ctx.base_index(i));
        }
        for (l, y) in fields.iter().enumerate() {
            let b = qx.commutator(y)?;
            for c in 0..r {
                a.structure[k][l][c] = b.coefficient(ctx.fiber_index(c));
            }
        }
        if ctx.has_frame() {
            for alpha in 0..ctx.frame_names().len() {
                let v = qx.apply(&VectorValuedForm::frame_element(ctx, alpha))?;
                for beta in 0..ctx.frame_names().len() {
                    a.set_theta(k, beta, alpha, v.component(beta).clone());
                }
            }
        }
    }
    Ok(a)
}

/// An alternating E-valued form on the frame of `A`, given by its values on
/// increasing index tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct CochainValues {
    pub arity: usize,
    /// Sorted index tuple -> components along the frame of `E`.
    pub values: BTreeMap<Vec<usize>, Vec<GradedPoly>>,
}

fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
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

/// Sorts an index tuple, returning the permutation sign, or `None` on repeats.
fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut v = idx.to_vec();
    let mut neg = false;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                neg = !neg;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, neg))
}

impl CochainValues {
    pub fn zero(arity: usize) -> Self {
        CochainValues { arity, values: BTreeMap::new() }
    }

    /// Value on an arbitrary index tuple using antisymmetry.
    pub fn value(&self, ctx: &Arc<GradedContext>, idx: &[usize]) -> Vec<GradedPoly> {
        let r = ctx.rank();
        match sort_with_sign(idx) {
            None => vec![GradedPoly::zero(ctx); r],
            Some((sorted, neg)) => match self.values.get(&sorted) {
                None => vec![GradedPoly::zero(ctx); r],
                Some(v) => v.iter().map(|p| if neg { -p } else { p.clone() }).collect(),
            },
        }
    }

    /// The E-valued function `sum_I phi_I xi^I` on `A[1]`.
    pub fn to_form(&self, ctx: &Arc<GradedContext>) -> VectorValuedForm {
        let mut acc = VectorValuedForm::zero(ctx);
        for (idx, comps) in &self.values {
            let mut mono = GradedPoly::one(ctx);
            for &a in idx {
                mono = &mono * &GradedPoly::generator(ctx, ctx.fiber_index(a));
            }
            let comps: Vec<GradedPoly> = comps.iter().map(|c| c * &mono).collect();
            acc = acc.add(&VectorValuedForm::new(ctx, comps).expect("component count"));
        }
        acc
    }

    /// Reads the coefficients of a function of fiber degree `arity`.
    pub fn from_form(ctx: &Arc<GradedContext>, w: &VectorValuedForm, arity: usize) -> Result<Self> {
        let mut values = BTreeMap::new();
        let r = ctx.num_fiber();
        for idx in increasing_tuples(r, arity) {
            let mut comps = Vec::new();
            let mut any = false;
            for c in w.components() {
                let mut p = c.clone();
                for &a in idx.iter().rev() {
                    p = p.partial(ctx.fiber_index(a));
                }
                // strip the remaining fiber dependence (there is none for the right arity)
                any |= !p.is_zero();
                comps.push(p);
            }
            if any {
                values.insert(idx, comps);
            }
        }
        Ok(CochainValues { arity, values })
    }
}

/// The Chevalley-Eilenberg differential of an E-valued cochain.
pub fn chevalley_eilenberg(a: &AlgebroidData, phi: &CochainValues) -> Result<CochainValues> {
    let ctx = &a.ctx;
    let r = a.rank();
    for idx in phi.values.keys() {
        if idx.len() != phi.arity {
            return Err(Error::ArityMismatch(format!(
                "value on {idx:?} in a cochain of arity {}",
                phi.arity
            )));
        }
        if idx.iter().any(|&i| i >= r) {
            return Err(Error::ArityMismatch(format!("index out of range in {idx:?}")));
        }
        if phi.values[idx].len() != ctx.rank() {
            return Err(Error::FrameMismatch("cochain values have the wrong number of components".into()));
        }
    }
    let k = phi.arity;
    let e = ctx.rank();
    let mut out = BTreeMap::new();
    for xs in increasing_tuples(r, k + 1) {
        let mut acc = vec![GradedPoly::zero(ctx); e];
        for i in 0..=k {
            let rest: Vec<usize> = xs.iter().enumerate().filter(|(p, _)| *p != i).map(|(_, v)| *v).collect();
            let s = phi.value(ctx, &rest);
            let cov = covariant_along(a, xs[i], &s);
            let sign = i % 2 == 1;
            for (slot, v) in acc.iter_mut().zip(cov) {
                *slot = if sign { &*slot - &v } else { &*slot + &v };
            }
        }
        for i in 0..=k {
            for j in i + 1..=k {
                let rest: Vec<usize> = xs
                    .iter()
                    .enumerate()
                    .filter(|(p, _)| *p != i && *p != j)
                    .map(|(_, v)| *v)
                    .collect();
                let sign = (i + j) % 2 == 1;
                for c in 0..r {
                    let cij = &a.structure[xs[i]][xs[j]][c];
                    if cij.is_zero() {
                        continue;
                    }
                    let mut args = vec![c];
                    args.extend(&rest);
                    let v = phi.value(ctx, &args);
                    for (slot, vv) in acc.iter_mut().zip(v) {
                        let t = cij * &vv;
                        *slot = if sign { &*slot - &t } else { &*slot + &t };
                    }
                }
            }
        }
        if acc.iter().any(|p| !p.is_zero()) {
            out.insert(xs, acc);
        }
    }
    Ok(CochainValues { arity: k + 1, values: out })
}

/// `nabla_{e_a} s` for a section `s` of `E` given by frame components.
fn covariant_along(a: &AlgebroidData, k: usize, s: &[GradedPoly]) -> Vec<GradedPoly> {
    let ctx = &a.ctx;
    let e = s.len();
    let mut out: Vec<GradedPoly> = s.iter().map(|c| a.anchor_apply(k, c)).collect();
    if ctx.has_frame() {
        for alpha in 0..e {
            if s[alpha].is_zero() {
                continue;
            }
            for (beta, slot) in out.iter_mut().enumerate() {
                let t = a.theta(k, beta, alpha);
                if !t.is_zero() {
                    *slot = &*slot + &(&s[alpha] * &t);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tangent_algebroid_is_de_rham() {
        let ctx = algebroid_context(&["x", "y"], &["a1", "a2"], &[]).unwrap();
        let a = AlgebroidData::tangent(&ctx).unwrap();
        let q = build_homological_vf(&a).unwrap();
        assert_eq!(q.coefficient(0), GradedPoly::var(&ctx, "a1").unwrap());
        assert_eq!(q.coefficient(1), GradedPoly::var(&ctx, "a2").unwrap());
        assert!(q.coefficient(2).is_zero());
        assert!(check_homological(&q).unwrap().homological);
        assert_eq!(extract_algebroid(&q).unwrap(), a);
    }

    #[test]
    fn abelian_gives_zero() {
        let ctx = algebroid_context(&["x"], &["a"], &[]).unwrap();
        let a = AlgebroidData::abelian(&ctx).unwrap();
        let q = build_homological_vf(&a).unwrap();
        assert!(q.is_zero());
        assert_eq!(extract_algebroid(&q).unwrap(), a);
    }
}
