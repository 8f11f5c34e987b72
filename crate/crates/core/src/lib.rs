//! Bounds and simulation for the state-dependent delay equation
//! `u'(t) = mu u(t) + sigma u(t - a - c u(t))`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
mod io_util;
pub mod model;
pub mod quadrature;
pub mod razumikhin;
pub mod roots;
pub mod sdde;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use io_util::write_atomic;
pub use model::{
    boundary_sigma, classify_region, derived_constants, stability_boundary_point,
    DerivedConstants, Params, RegionLabel,
};
pub use razumikhin::{BoundPair, GasVerdict, IterationTrace, LimitBounds, Order};
pub use sdde::{Behaviour, HistoryFunction, Trajectory};
pub use sweep::{GridSpec, SweepRow};
