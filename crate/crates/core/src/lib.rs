//! Structural equation models with explicit control-flow variables.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: signatures, equations, evaluation, interventions and causal
//!   formulas over finite ranges.
//! - [`control`]: the control/data partition of a model, bottom-propagation
//!   checks and the actual control flow of a situation.
//! - [`engines`]: cause enumeration (sufficient, restricted sufficient,
//!   control-flow-preserving sufficient, actual, restricted actual and
//!   control-flow-preserving necessary causes), minimal antichains and the
//!   sufficient/necessary duality transform.
//! - [`dsl`]: the `.causal` text format.
//! - [`bench`]: the literature benchmark runner and its reports.

pub mod bench;
pub mod control;
pub mod dsl;
pub mod engines;
pub mod error;
pub mod model;

pub use error::{EngineError, ValidationError};

/// Default bound on the number of points a single quantifier may enumerate.
pub const DEFAULT_SEARCH_LIMIT: u64 = 1 << 20;
