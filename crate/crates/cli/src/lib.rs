//! Manifest driven front end for `nqcalc-core`.

pub mod error;
pub mod expr;
pub mod manifest;
pub mod output;
pub mod run;

pub use error::{ManifestError, Pos};
pub use expr::parse_expression;
pub use manifest::{parse_manifest, Manifest};
pub use run::{run, RunOptions, RunReport, Verdict};
