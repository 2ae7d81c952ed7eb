//! Horizontal (sub-Riemannian) geometry of surfaces in the first Heisenberg
//! group: horizontal normals, characteristic loci, horizontal mean curvature
//! and the horizontal flow, together with builders for straight ruled
//! surfaces, horizontal tangent developables and generalised cylinders.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod builders;
pub mod curvature;
pub mod error;
pub mod flow;
pub mod heis;
pub mod horizontal;
pub mod locus;
pub mod numdiff;
pub mod patch;
pub mod report;
pub mod rng;
pub mod verify;

pub use error::{GeomError, Result};
pub use heis::{FrameVector, HorizontalVec, Point3};
pub use patch::{jacobians, Domain, Jacobians, Jet2, SurfaceHandle};
