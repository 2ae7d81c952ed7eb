//! JSON surface-spec files.
//!
//! ```json
//! { "type": "ruled",
//!   "curve": { "x": [], "y": [{"kind": "poly", "coeff": 1.0, "k_or_m": 1}],
//!              "t": [{"kind": "poly", "coeff": 1.0, "k_or_m": 2}] },
//!   "theta": [{"kind": "poly", "coeff": 0.7853981633974483, "k_or_m": 0}],
//!   "domain": { "u": [-1.0, 1.0], "v": [-1.0, 1.0] } }
//! ```
//!
//! `developable` and `cylinder` take `curve` and `domain`; `graph` takes a
//! list `f` of monomials `{coeff, px, py}`; `catalog` takes `name` and an
//! optional `domain`.

use serde::de::IgnoredAny;
use serde::{Deserialize, Serialize};

use crate::builders::catalog::{catalog_get, catalog_get_on};
use crate::builders::curve::{AngleField, CurveSpec};
use crate::builders::ruled::{build_straight_ruled, RuledSpec};
use crate::builders::surfaces::{build_cylinder, build_graph, build_tangent_developable, BivariatePoly};
use crate::error::{GeomError, Result};
use crate::patch::{Domain, SurfaceHandle};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SurfaceSpec {
    Ruled { curve: CurveSpec, theta: AngleField, domain: Domain },
    Developable { curve: CurveSpec, domain: Domain },
    Cylinder { curve: CurveSpec, domain: Domain },
    Graph { f: BivariatePoly, domain: Domain },
    Catalog {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        domain: Option<Domain>,
    },
}

impl SurfaceSpec {
    /// Parses a spec, reporting syntax and shape errors with their position.
    ///
    /// The tag is read first and the body is then parsed straight from the
    /// text, so errors inside the body keep their line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let head: Head = parse(text)?;
        Ok(match head.kind {
            Kind::Ruled => {
                let b: RuledBody = parse(text)?;
                SurfaceSpec::Ruled { curve: b.curve, theta: b.theta, domain: b.domain }
            }
            Kind::Developable => {
                let b: CurveBody = parse(text)?;
                SurfaceSpec::Developable { curve: b.curve, domain: b.domain }
            }
            Kind::Cylinder => {
                let b: CurveBody = parse(text)?;
                SurfaceSpec::Cylinder { curve: b.curve, domain: b.domain }
            }
            Kind::Graph => {
                let b: GraphBody = parse(text)?;
                SurfaceSpec::Graph { f: b.f, domain: b.domain }
            }
            Kind::Catalog => {
                let b: CatalogBody = parse(text)?;
                SurfaceSpec::Catalog { name: b.name, domain: b.domain }
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialises")
    }

    pub fn build(&self) -> Result<SurfaceHandle> {
        match self {
            SurfaceSpec::Ruled { curve, theta, domain } => build_straight_ruled(&RuledSpec {
                curve: curve.clone(),
                theta: theta.clone(),
                s_range: domain.u,
                v_range: domain.v,
            }),
            SurfaceSpec::Developable { curve, domain } => {
                build_tangent_developable(curve, domain.u, domain.v)
            }
            SurfaceSpec::Cylinder { curve, domain } => build_cylinder(curve, domain.u, domain.v),
            SurfaceSpec::Graph { f, domain } => {
                check_domain(domain)?;
                validate_poly(f)?;
                Ok(build_graph("graph", f.clone().into_graph_fn(), *domain))
            }
            SurfaceSpec::Catalog { name, domain: None } => catalog_get(name),
            SurfaceSpec::Catalog { name, domain: Some(d) } => {
                check_domain(d)?;
                catalog_get_on(name, *d)
            }
        }
    }

    /// The ruled spec behind a `ruled` file, for `η` and `λ` queries.
    pub fn as_ruled(&self) -> Option<RuledSpec> {
        match self {
            SurfaceSpec::Ruled { curve, theta, domain } => Some(RuledSpec {
                curve: curve.clone(),
                theta: theta.clone(),
                s_range: domain.u,
                v_range: domain.v,
            }),
            _ => None,
        }
    }
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| GeomError::Parse { line: e.line(), column: e.column(), msg: e.to_string() })
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Ruled,
    Developable,
    Cylinder,
    Graph,
    Catalog,
}

#[derive(Deserialize)]
struct Head {
    #[serde(rename = "type")]
    kind: Kind,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RuledBody {
    #[serde(rename = "type")]
    _kind: IgnoredAny,
    curve: CurveSpec,
    theta: AngleField,
    domain: Domain,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveBody {
    #[serde(rename = "type")]
    _kind: IgnoredAny,
    curve: CurveSpec,
    domain: Domain,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphBody {
    #[serde(rename = "type")]
    _kind: IgnoredAny,
    f: BivariatePoly,
    domain: Domain,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogBody {
    #[serde(rename = "type")]
    _kind: IgnoredAny,
    name: String,
    #[serde(default)]
    domain: Option<Domain>,
}

fn check_domain(d: &Domain) -> Result<()> {
    for (name, r) in [("u", d.u), ("v", d.v)] {
        if !(r[0].is_finite() && r[1].is_finite() && r[0] < r[1]) {
            return Err(GeomError::InvalidSpec(format!("{name} range {r:?} is empty or not finite")));
        }
    }
    Ok(())
}

fn validate_poly(f: &BivariatePoly) -> Result<()> {
    for m in &f.0 {
        if !m.coeff.is_finite() || m.px > 6 || m.py > 6 {
            return Err(GeomError::InvalidSpec(format!("bad monomial {m:?}")));
        }
    }
    Ok(())
}
