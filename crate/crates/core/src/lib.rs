//! Finite groupoids, self-similar actions, their products and quotients,
//! and Fell bundles over them, with exhaustive law checkers.

pub mod algebra;
pub mod construct;
pub mod dr;
pub mod dsl;
pub mod equiv;
pub mod fell;
pub mod fixtures;
pub mod groupoid;
pub mod perm;
pub mod report;
pub mod ssa;

/// Dense element id inside one groupoid.
pub type Id = usize;

pub use groupoid::{iso_check, FiniteGroupoid, GroupoidMorphism, Isomorphism, StructureError};
pub use report::{CheckResult, Status, ValidationReport, Witness};
pub use ssa::{LeftAction, RightAction};
