//! Spectral differential forms on tori, symplectic operators, and the functionals,
//! flows and classification built on them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod domain;
pub mod error;
pub mod form;
pub mod gauge;
pub mod metric;
pub mod symplectic;
pub mod presets;
pub mod cone;
pub mod functionals;
pub mod flows;
pub mod classification;
pub mod scene;
pub mod verify;
