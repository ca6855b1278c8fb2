//! Frustration, isoperimetric and spectral computations on magnetic graphs:
//! weighted graphs whose oriented edges carry a unit complex signature from
//! a cyclic group `S¹ₖ` or the full circle `S¹`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod families;
pub mod functional;
pub mod gauge;
pub mod graph;
pub mod group;
pub mod io;
pub mod isoperimetry;
pub mod spectral;

pub use error::{Error, Result};
pub use functional::VertexFunction;
pub use gauge::{frustration, FrustrationMode, FrustrationResult};
pub use graph::{Balance, CutReport, Edge, MagneticGraph, SwitchingAssignment, VertexSet};
pub use group::{Group, GroupElement};
pub use isoperimetry::{cheeger_constant, isoperimetric_constant, Dimension, IsoperimetricResult, IsoperimetryOptions};
pub use spectral::{SignatureMode, Tolerances};
