//! Named example surfaces with analytic jets.

use std::f64::consts::{FRAC_PI_4, TAU};

use crate::builders::curve::{AngleField, CurveSpec, Series, Term};
use crate::builders::ruled::{build_straight_ruled, plane_flow_patch, RuledSpec};
use crate::builders::surfaces::{build_cylinder, build_tangent_developable, build_graph, BivariatePoly};
use crate::error::{GeomError, Result};
use crate::patch::{Domain, Jet2, SurfaceHandle};

/// Catalog names. `cylinder` also accepts a radius, as in `cylinder(2.5)`.
pub const CATALOG_NAMES: [&str; 7] = [
    "paraboloid",
    "cone_lower",
    "vertical_plane_x0",
    "plane_t0",
    "plane_flow_patch",
    "cylinder",
    "circle_lift_developable",
];

/// Catalog surfaces whose horizontal mean curvature vanishes.
pub const H_MINIMAL_NAMES: [&str; 5] =
    ["paraboloid", "vertical_plane_x0", "plane_t0", "plane_flow_patch", "circle_lift_developable"];

/// `γ = (0, s, s²)` ruled by `(X + Y)/√2`, whose image is `t = y² − x²`.
pub fn paraboloid_spec() -> RuledSpec {
    RuledSpec {
        curve: CurveSpec::new(
            Series::default(),
            Series::new(vec![Term::poly(1.0, 1)]),
            Series::new(vec![Term::poly(1.0, 2)]),
        ),
        theta: AngleField::constant(FRAC_PI_4),
        s_range: [-1.0, 1.0],
        v_range: [-1.0, 1.0],
    }
}

/// Default parameter domain of a catalog surface.
pub fn default_domain(name: &str) -> Result<Domain> {
    let (base, _) = split_name(name)?;
    Ok(match base {
        "paraboloid" | "vertical_plane_x0" | "plane_t0" => Domain::new([-1.0, 1.0], [-1.0, 1.0]),
        "cone_lower" => Domain::new([-2.0, -0.25], [0.0, TAU]),
        "plane_flow_patch" => Domain::new([0.0, TAU], [0.5, 1.5]),
        "cylinder" => Domain::new([0.0, TAU], [-1.0, 1.0]),
        "circle_lift_developable" => Domain::new([0.0, TAU], [0.2, 1.5]),
        _ => unreachable!(),
    })
}

/// Looks up a catalog surface on its default domain.
pub fn catalog_get(name: &str) -> Result<SurfaceHandle> {
    catalog_get_on(name, default_domain(name)?)
}

/// Looks up a catalog surface on a caller-chosen domain.
pub fn catalog_get_on(name: &str, domain: Domain) -> Result<SurfaceHandle> {
    let (base, radius) = split_name(name)?;
    let handle = match base {
        "paraboloid" => build_straight_ruled(&RuledSpec {
            s_range: domain.u,
            v_range: domain.v,
            ..paraboloid_spec()
        })?,
        "cone_lower" => {
            if domain.u[1] >= 0.0 {
                return Err(GeomError::InvalidSpec("cone_lower needs u < 0".into()));
            }
            SurfaceHandle::new("cone_lower", domain, |u, v| {
                let (s, c) = v.sin_cos();
                Jet2 {
                    value: [u * c, u * s, u],
                    du: [c, s, 1.0],
                    dv: [-u * s, u * c, 0.0],
                    duu: [0.0; 3],
                    duv: [-s, c, 0.0],
                    dvv: [-u * c, -u * s, 0.0],
                }
            })
        }
        "vertical_plane_x0" => SurfaceHandle::new("vertical_plane_x0", domain, |u, v| Jet2 {
            value: [0.0, u, v],
            du: [0.0, 1.0, 0.0],
            dv: [0.0, 0.0, 1.0],
            ..Default::default()
        }),
        "plane_t0" => build_graph("plane_t0", BivariatePoly::default().into_graph_fn(), domain),
        "plane_flow_patch" => {
            let theta = AngleField(Series::new(vec![Term::poly(1.0, 1)]));
            plane_flow_patch(&theta, domain)
        }
        "cylinder" => build_cylinder(&CurveSpec::circle(radius), domain.u, domain.v)?,
        "circle_lift_developable" => {
            build_tangent_developable(&CurveSpec::unit_circle_lift(), domain.u, domain.v)?
        }
        _ => unreachable!(),
    };
    Ok(handle.renamed(name))
}

/// Splits `cylinder(R)` into its base name and radius; other names carry
/// radius 1.
fn split_name(name: &str) -> Result<(&str, f64)> {
    let unknown = || GeomError::UnknownName(name.to_string());
    let (base, radius) = match name.split_once('(') {
        Some((base, rest)) => {
            let r: f64 = rest.strip_suffix(')').ok_or_else(unknown)?.trim().parse().map_err(|_| unknown())?;
            if base != "cylinder" || !(r.is_finite() && r > 0.0) {
                return Err(unknown());
            }
            (base, r)
        }
        None => (name, 1.0),
    };
    if !CATALOG_NAMES.contains(&base) {
        return Err(unknown());
    }
    Ok((base, radius))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::horizontal::{default_eps_char, induced_form, is_characteristic};

    #[test]
    fn every_name_resolves() {
        for name in CATALOG_NAMES {
            let h = catalog_get(name).unwrap();
            assert_eq!(h.name(), name);
            h.check_regular(21).unwrap();
        }
        assert_eq!(catalog_get("cylinder(2.5)").unwrap().point(0.0, 0.0).unwrap().x, 2.5);
    }

    #[test]
    fn unknown_names() {
        for bad in ["sphere", "cylinder(", "cylinder(-1)", "cone_lower(2)", "cylinder(x)", ""] {
            assert_eq!(catalog_get(bad).unwrap_err(), GeomError::UnknownName(bad.to_string()));
        }
    }

    #[test]
    fn paraboloid_locus_is_x_plus_y_zero() {
        let h = catalog_get("paraboloid").unwrap();
        for k in 0..=20 {
            let v = -0.7 + 0.07 * k as f64;
            let s = -std::f64::consts::SQRT_2 * v;
            let j = h.eval_jet2(s, v).unwrap();
            assert!(is_characteristic(&j, default_eps_char(&j)).characteristic);
            let p = j.point();
            assert!((p.x + p.y).abs() < 1e-8);
            assert!((p.t - (p.y * p.y - p.x * p.x)).abs() < 1e-14);
        }
    }

    #[test]
    fn cone_has_no_characteristic_points() {
        let h = catalog_get("cone_lower").unwrap();
        let dom = h.domain();
        for i in 0..31 {
            for k in 0..31 {
                let j = h.eval_jet2(dom.lattice(31, 31, i, k).0, dom.lattice(31, 31, i, k).1).unwrap();
                assert!(!is_characteristic(&j, default_eps_char(&j)).characteristic);
            }
        }
        assert!(catalog_get_on("cone_lower", Domain::new([-1.0, 0.5], [0.0, 1.0])).is_err());
    }

    #[test]
    fn vertical_plane_form_is_dv() {
        let h = catalog_get("vertical_plane_x0").unwrap();
        let f = induced_form(&h.eval_jet2(0.3, -0.8).unwrap());
        assert_eq!((f.p_u, f.p_v), (0.0, 1.0));
    }
}
