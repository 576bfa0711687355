//! Coordinate charts of non-negatively graded manifolds.
//!
//! A [`GradedContext`] fixes the generators of the bigraded algebra of forms:
//! base coordinates (internal degree 0), fiber coordinates (positive internal
//! degree), and the differential of every coordinate. It also carries the
//! frame of an auxiliary vector bundle `E` generated in degree zero, together
//! with an optional flat connection written in that frame.
//!
//! Generators are laid out in one global order: base coordinates, fiber
//! coordinates, base differentials, fiber differentials, each in declaration
//! order. Normal forms and printed reports follow this order.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly::{GradedPoly, Terms};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    Base,
    Fiber,
    BaseDifferential,
    FiberDifferential,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub kind: GeneratorKind,
    pub form_degree: u32,
    pub internal_degree: u32,
}

impl Generator {
    pub fn total_degree(&self) -> u32 {
        self.form_degree + self.internal_degree
    }

    pub fn is_odd(&self) -> bool {
        self.total_degree() % 2 == 1
    }

    pub fn is_differential(&self) -> bool {
        matches!(
            self.kind,
            GeneratorKind::BaseDifferential | GeneratorKind::FiberDifferential
        )
    }
}

/// Display name of the differential of a coordinate.
pub fn differential_name(coord: &str) -> String {
    format!("d({coord})")
}

#[derive(Debug, Clone, Default)]
pub struct ContextBuilder {
    base: Vec<String>,
    fiber: Vec<(String, u32)>,
    frame: Vec<String>,
}

impl ContextBuilder {
    pub fn base(mut self, name: impl Into<String>) -> Self {
        self.base.push(name.into());
        self
    }

    pub fn bases<S: Into<String>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        self.base.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn fiber(mut self, name: impl Into<String>, degree: u32) -> Self {
        self.fiber.push((name.into(), degree));
        self
    }

    pub fn frame(mut self, name: impl Into<String>) -> Self {
        self.frame.push(name.into());
        self
    }

    pub fn frames<S: Into<String>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        self.frame.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn build(self) -> Result<Arc<GradedContext>> {
        let mut seen = HashSet::new();
        let mut generators = Vec::new();
        for name in &self.base {
            check_identifier(name)?;
            generators.push(Generator {
                name: name.clone(),
                kind: GeneratorKind::Base,
                form_degree: 0,
                internal_degree: 0,
            });
        }
        for (name, degree) in &self.fiber {
            check_identifier(name)?;
            if *degree == 0 {
                return Err(Error::InvalidDegree(format!(
                    "fiber coordinate `{name}` must have positive degree"
                )));
            }
            generators.push(Generator {
                name: name.clone(),
                kind: GeneratorKind::Fiber,
                form_degree: 0,
                internal_degree: *degree,
            });
        }
        let coords = generators.len();
        for i in 0..coords {
            let g = &generators[i];
            let kind = if g.kind == GeneratorKind::Base {
                GeneratorKind::BaseDifferential
            } else {
                GeneratorKind::FiberDifferential
            };
            let dg = Generator {
                name: differential_name(&g.name),
                kind,
                form_degree: 1,
                internal_degree: g.internal_degree,
            };
            generators.push(dg);
        }
        for g in &generators {
            if !seen.insert(g.name.clone()) {
                return Err(Error::DuplicateName(g.name.clone()));
            }
        }
        for f in &self.frame {
            check_identifier(f)?;
            if !seen.insert(f.clone()) {
                return Err(Error::DuplicateName(f.clone()));
            }
        }
        Ok(Arc::new(GradedContext {
            base: self.base,
            fiber: self.fiber,
            frame: self.frame,
            generators,
            connection: BTreeMap::new(),
        }))
    }
}

fn check_identifier(name: &str) -> Result<()> {
    let mut chars = name.chars();
    let ok = match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        }
        _ => false,
    };
    if !ok || name == "d" {
        return Err(Error::InvalidDegree(format!("`{name}` is not a valid name")));
    }
    Ok(())
}

/// The coordinate chart of an N-manifold together with an auxiliary frame.
#[derive(Debug, Clone)]
pub struct GradedContext {
    base: Vec<String>,
    fiber: Vec<(String, u32)>,
    frame: Vec<String>,
    generators: Vec<Generator>,
    /// (base coordinate, source frame index, target frame index) -> coefficient.
    connection: BTreeMap<(usize, usize, usize), Terms>,
}

impl GradedContext {
    pub fn builder() -> ContextBuilder {
        ContextBuilder::default()
    }

    pub fn base_names(&self) -> &[String] {
        &self.base
    }

    pub fn fiber_coords(&self) -> &[(String, u32)] {
        &self.fiber
    }

    pub fn frame_names(&self) -> &[String] {
        &self.frame
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, idx: usize) -> &Generator {
        &self.generators[idx]
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn num_base(&self) -> usize {
        self.base.len()
    }

    pub fn num_fiber(&self) -> usize {
        self.fiber.len()
    }

    /// Number of coordinates (base and fiber); differentials follow them.
    pub fn num_coords(&self) -> usize {
        self.base.len() + self.fiber.len()
    }

    /// Generator index of the `i`-th base coordinate.
    pub fn base_index(&self, i: usize) -> usize {
        i
    }

    /// Generator index of the `a`-th fiber coordinate.
    pub fn fiber_index(&self, a: usize) -> usize {
        self.base.len() + a
    }

    /// Generator index of the differential of coordinate `coord`.
    pub fn differential_index(&self, coord: usize) -> usize {
        debug_assert!(coord < self.num_coords());
        self.num_coords() + coord
    }

    pub fn coordinate_indices(&self) -> std::ops::Range<usize> {
        0..self.num_coords()
    }

    pub fn fiber_indices(&self) -> std::ops::Range<usize> {
        self.base.len()..self.num_coords()
    }

    /// Highest fiber degree (the degree of the N-manifold).
    pub fn degree(&self) -> u32 {
        self.fiber.iter().map(|(_, d)| *d).max().unwrap_or(0)
    }

    /// Rank of the value bundle. A context without frame carries scalar
    /// forms, modelled as a single implicit trivial frame element.
    pub fn rank(&self) -> usize {
        self.frame.len().max(1)
    }

    pub fn has_frame(&self) -> bool {
        !self.frame.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn frame_index(&self, name: &str) -> Result<usize> {
        self.frame
            .iter()
            .position(|f| f == name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn base_position(&self, name: &str) -> Result<usize> {
        self.base
            .iter()
            .position(|b| b == name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn fiber_position(&self, name: &str) -> Result<usize> {
        self.fiber
            .iter()
            .position(|(f, _)| f == name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    /// Contexts share a layout when their generators and frame coincide; the
    /// connection is not part of the layout.
    pub fn same_layout(&self, other: &GradedContext) -> bool {
        self.base == other.base && self.fiber == other.fiber && self.frame == other.frame
    }

    pub fn has_connection(&self) -> bool {
        !self.connection.is_empty()
    }

    /// Christoffel coefficient: `d_nabla e_alpha` contains `d(x^i) * gamma * e_beta`.
    pub fn connection_coefficient(
        self: &Arc<Self>,
        base: usize,
        alpha: usize,
        beta: usize,
    ) -> GradedPoly {
        match self.connection.get(&(base, alpha, beta)) {
            Some(terms) => GradedPoly::from_terms(self.clone(), terms.clone()),
            None => GradedPoly::zero(self),
        }
    }

    /// Returns a copy of this context carrying the given connection. Entries
    /// are `(base coordinate, source frame element, target frame element,
    /// coefficient)`; coefficients must be functions on the base. The
    /// connection must be flat.
    pub fn with_connection(
        self: &Arc<Self>,
        entries: &[(String, String, String, GradedPoly)],
    ) -> Result<Arc<GradedContext>> {
        let mut next = (**self).clone();
        next.connection.clear();
        for (base, alpha, beta, coeff) in entries {
            if !coeff.context().same_layout(self) {
                return Err(Error::ContextMismatch);
            }
            if !coeff.is_base_function() {
                return Err(Error::InvalidDegree(format!(
                    "connection coefficient `{coeff}` must be a function on the base"
                )));
            }
            let key = (
                self.base_position(base)?,
                self.frame_index(alpha)?,
                self.frame_index(beta)?,
            );
            let slot = next.connection.entry(key).or_default();
            crate::poly::add_terms_into(slot, coeff.terms());
            if slot.is_empty() {
                next.connection.remove(&key);
            }
        }
        let next = Arc::new(next);
        crate::cartan::check_flat(&next)?;
        Ok(next)
    }

    /// Connection entries as `(base, source, target, coefficient)` in
    /// canonical order.
    pub fn connection_entries(self: &Arc<Self>) -> Vec<(usize, usize, usize, GradedPoly)> {
        self.connection
            .iter()
            .map(|(&(i, a, b), t)| (i, a, b, GradedPoly::from_terms(self.clone(), t.clone())))
            .collect()
    }
}

impl PartialEq for GradedContext {
    fn eq(&self, other: &Self) -> bool {
        self.same_layout(other) && self.connection == other.connection
    }
}
