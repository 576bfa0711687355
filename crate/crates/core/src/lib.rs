//! Exact symbolic calculus on non-negatively graded manifolds: bigraded
//! polynomial algebra, vector valued Cartan calculus, Spencer data of
//! vector valued forms, degree one NQ structures, and classifiers for
//! the geometric structures they encode.

pub mod algebroid;
pub mod cartan;
pub mod classifiers;
pub mod context;
pub mod derivation;
pub mod error;
pub mod form;
pub mod poly;
pub mod random;
pub mod spencer;

pub use context::GradedContext;
pub use derivation::Derivation;
pub use error::{Error, Result};
pub use form::VectorValuedForm;
pub use poly::{Bidegree, GradedPoly, Homogeneity, Rational};
