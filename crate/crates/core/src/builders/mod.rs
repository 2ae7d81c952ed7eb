//! Constructors for the surface families used throughout the crate.

pub mod catalog;
pub mod curve;
pub mod ruled;
pub mod spec_file;
pub mod surfaces;

pub use curve::{AngleField, CurveSpec, Series, Term, TermKind};
pub use ruled::{build_straight_ruled, lambda_to_plane, plane_flow_patch, RuledSpec};
pub use surfaces::{build_cylinder, build_graph, build_tangent_developable, BivariatePoly, Monomial};
pub use catalog::{catalog_get, catalog_get_on, CATALOG_NAMES, H_MINIMAL_NAMES};
pub use spec_file::SurfaceSpec;
