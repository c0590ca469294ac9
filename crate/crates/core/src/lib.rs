//! Modality-parametric lifting of single-world programs to many worlds at
//! once.
//!
//! Values become sets of labelled variants; a [`labels::LabelAlgebra`]
//! says how labels intersect and combine. [`lifting`] applies ordinary
//! functions across argument cross products, [`eval`] interprets whole
//! programs over modal inputs, and [`oracle`] enumerates worlds one at a time
//! for comparison.

pub mod bindings;
pub mod driver;
pub mod eval;
pub mod labels;
pub mod lang;
pub mod lifting;
pub mod modal;
pub mod oracle;
pub mod value;

pub use value::{ErrorKind, Value};
