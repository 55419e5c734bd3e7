//! Nonlocal formulation of free-surface water waves with constant vorticity.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod field;
pub mod global;
pub mod harmonic;
pub mod hierarchy;
pub mod kinematics;
pub mod linear;
pub mod soliton;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{Error, Result};
pub use field::{make_grid, ComplexField, Field, Grid, Primitive, Wavevector};
