//! Forms with values in the auxiliary bundle of a context.

use std::fmt;
use std::sync::Arc;

use crate::context::GradedContext;
use crate::error::{Error, Result};
use crate::poly::{contexts_compatible, Bidegree, GradedPoly, Homogeneity, Rational};

/// An element of Ω(𝓜, E): one polynomial component per frame element. Scalar
/// contexts (empty frame) have a single implicit component.
#[derive(Clone)]
pub struct VectorValuedForm {
    ctx: Arc<GradedContext>,
    components: Vec<GradedPoly>,
}

impl PartialEq for VectorValuedForm {
    fn eq(&self, other: &Self) -> bool {
        contexts_compatible(&self.ctx, &other.ctx) && self.components == other.components
    }
}

impl Eq for VectorValuedForm {}

impl fmt::Debug for VectorValuedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorValuedForm({self})")
    }
}

impl VectorValuedForm {
    pub fn new(ctx: &Arc<GradedContext>, components: Vec<GradedPoly>) -> Result<Self> {
        if components.len() != ctx.rank() {
            return Err(Error::FrameMismatch(format!(
                "expected {} components, found {}",
                ctx.rank(),
                components.len()
            )));
        }
        for c in &components {
            if !contexts_compatible(c.context(), ctx) {
                return Err(Error::ContextMismatch);
            }
        }
        Ok(VectorValuedForm { ctx: ctx.clone(), components })
    }

    pub(crate) fn from_parts(ctx: &Arc<GradedContext>, components: Vec<GradedPoly>) -> Self {
        debug_assert_eq!(components.len(), ctx.rank());
        VectorValuedForm { ctx: ctx.clone(), components }
    }

    pub fn zero(ctx: &Arc<GradedContext>) -> Self {
        VectorValuedForm {
            ctx: ctx.clone(),
            components: vec![GradedPoly::zero(ctx); ctx.rank()],
        }
    }

    /// A scalar form; in a framed context it is placed along the first frame
    /// element only when the frame has rank one.
    pub fn scalar(p: GradedPoly) -> Result<Self> {
        let ctx = p.context().clone();
        if ctx.rank() != 1 {
            return Err(Error::FrameMismatch(format!(
                "scalar form in a context of rank {}",
                ctx.rank()
            )));
        }
        Ok(VectorValuedForm { ctx, components: vec![p] })
    }

    /// The frame element `e_alpha` as a degree zero form.
    pub fn frame_element(ctx: &Arc<GradedContext>, alpha: usize) -> Self {
        let mut f = Self::zero(ctx);
        f.components[alpha] = GradedPoly::one(ctx);
        f
    }

    /// `p e_alpha`.
    pub fn along(p: GradedPoly, alpha: usize) -> Self {
        let ctx = p.context().clone();
        let mut f = Self::zero(&ctx);
        f.components[alpha] = p;
        f
    }

    pub fn context(&self) -> &Arc<GradedContext> {
        &self.ctx
    }

    pub fn components(&self) -> &[GradedPoly] {
        &self.components
    }

    pub fn component(&self, alpha: usize) -> &GradedPoly {
        &self.components[alpha]
    }

    pub fn into_components(self) -> Vec<GradedPoly> {
        self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(GradedPoly::is_zero)
    }

    pub fn bidegree(&self) -> Homogeneity {
        let mut found = Homogeneity::Zero;
        for c in &self.components {
            match (found, c.bidegree()) {
                (_, Homogeneity::Mixed) => return Homogeneity::Mixed,
                (_, Homogeneity::Zero) => {}
                (Homogeneity::Zero, h) => found = h,
                (Homogeneity::Homogeneous(a), Homogeneity::Homogeneous(b)) if a != b => {
                    return Homogeneity::Mixed
                }
                _ => {}
            }
        }
        found
    }

    /// Bidegree of a homogeneous form; zero forms report `None`.
    pub fn homogeneous_bidegree(&self) -> Result<Option<Bidegree>> {
        match self.bidegree() {
            Homogeneity::Zero => Ok(None),
            Homogeneity::Homogeneous(b) => Ok(Some(b)),
            Homogeneity::Mixed => Err(Error::Inhomogeneous(format!("form `{self}` is not homogeneous"))),
        }
    }

    fn check(&self, other: &VectorValuedForm) -> Result<()> {
        if contexts_compatible(&self.ctx, &other.ctx) && self.components.len() == other.components.len() {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn try_add(&self, other: &VectorValuedForm) -> Result<VectorValuedForm> {
        self.check(other)?;
        Ok(VectorValuedForm {
            ctx: self.ctx.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &VectorValuedForm) -> Result<VectorValuedForm> {
        self.try_add(&other.neg())
    }

    pub fn add(&self, other: &VectorValuedForm) -> VectorValuedForm {
        self.try_add(other).expect("context mismatch in form addition")
    }

    pub fn sub(&self, other: &VectorValuedForm) -> VectorValuedForm {
        self.try_sub(other).expect("context mismatch in form subtraction")
    }

    pub fn neg(&self) -> VectorValuedForm {
        VectorValuedForm {
            ctx: self.ctx.clone(),
            components: self.components.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> VectorValuedForm {
        VectorValuedForm {
            ctx: self.ctx.clone(),
            components: self.components.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// Left multiplication `f ω` by a scalar form.
    pub fn left_mul(&self, f: &GradedPoly) -> Result<VectorValuedForm> {
        let components = self
            .components
            .iter()
            .map(|c| f.try_mul(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorValuedForm { ctx: self.ctx.clone(), components })
    }

    pub fn restrict_to_base(&self) -> VectorValuedForm {
        VectorValuedForm {
            ctx: self.ctx.clone(),
            components: self.components.iter().map(GradedPoly::restrict_to_base).collect(),
        }
    }

    pub fn transport(&self, target: &Arc<GradedContext>) -> Result<VectorValuedForm> {
        if target.rank() != self.ctx.rank() {
            return Err(Error::FrameMismatch("frames differ in rank".into()));
        }
        let components = self
            .components
            .iter()
            .map(|c| c.transport(target))
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorValuedForm { ctx: target.clone(), components })
    }

    /// First nonzero component, as `(frame index, polynomial)`.
    pub fn first_nonzero(&self) -> Option<(usize, &GradedPoly)> {
        self.components.iter().enumerate().find(|(_, c)| !c.is_zero())
    }
}

impl fmt::Display for VectorValuedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.ctx.has_frame() {
            return write!(f, "{}", self.components[0]);
        }
        let mut first = true;
        for (alpha, c) in self.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*{}", self.ctx.frame_names()[alpha])?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
