//! Fell bundles over finite groupoids, self-similar actions on them, and
//! the imprimitivity bimodule between the two product bundles.

pub mod action;
pub mod bimodule;
pub mod coord;
pub mod examples;
pub mod linalg;
pub mod matrix;
pub mod product;

pub use action::{check_fell_left_action, check_fell_right_action, FellLeftAction, FellRightAction};
pub use bimodule::{build_bimodule, check_bc, quotient_fell_actions, verify_bimodule, BimoduleWitness, FellSetting, QuotientActions};
pub use coord::{saturation_coords, structure_constant_identity, validate_coords, CoordBundle};
pub use linalg::{CMat, CVec, Tol, C64};
pub use matrix::{crossed_product_bundle, line_bundle, saturation, validate_fell, FellBundle};
pub use product::{product_bundle_left, product_bundle_right, quotient_bundle_left, quotient_bundle_right, ProductBundle, QuotientBundle};

use crate::construct::OrbitError;
use crate::equiv::EquivError;
use crate::groupoid::StructureError;
use crate::report::{ValidationReport, Witness};

#[derive(Debug, thiserror::Error)]
pub enum FellError {
    #[error("shape mismatch: {0:?}")]
    Shape(Witness),
    #[error("not closed: {0:?}")]
    Closure(Witness),
    #[error("not positive: {0:?}")]
    NotPositive(Witness),
    #[error("precondition failed: {0:?}")]
    Precondition(Witness),
    #[error("not unique: {0:?}")]
    Uniqueness(Witness),
    #[error("hypotheses fail:\n{0}")]
    Assumption(ValidationReport),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Equiv(#[from] EquivError),
}
