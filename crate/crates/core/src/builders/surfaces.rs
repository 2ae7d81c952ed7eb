//! Horizontal tangent developables, generalised cylinders and graphs.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::builders::curve::{CurveJet, CurveSpec, DirectionJet};
use crate::builders::ruled::{check_range, ruled_handle, samples, EPS_LINE, REGULARITY_GRID};
use crate::error::{GeomError, Result};
use crate::patch::{Domain, Jet2, SurfaceHandle, EPS_REG};

/// Tolerance on horizontality and unit speed of developable base curves.
pub const EPS_CURVE: f64 = 1e-10;

const SAMPLES: usize = 129;

/// `|(ẍ, ÿ, 2(y ẍ − x ÿ))|`, the curvature of a unit-speed horizontal curve.
pub fn horizontal_curve_kappa(c: &CurveJet) -> f64 {
    let [x, y, _] = c.d[0];
    let [xdd, ydd, _] = c.d[2];
    let z = 2.0 * (y * xdd - x * ydd);
    (xdd * xdd + ydd * ydd + z * z).sqrt()
}

/// Facts established while building a tangent developable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DevelopableCheck {
    pub max_horizontality_defect: f64,
    pub max_speed_deviation: f64,
    pub min_kappa: f64,
}

/// Samples the preconditions of a tangent developable over `s_range`.
pub fn check_developable_curve(curve: &CurveSpec, s_range: [f64; 2]) -> DevelopableCheck {
    let mut out = DevelopableCheck {
        max_horizontality_defect: 0.0,
        max_speed_deviation: 0.0,
        min_kappa: f64::INFINITY,
    };
    for s in samples(s_range, SAMPLES) {
        let c = curve.jet(s);
        out.max_horizontality_defect = out.max_horizontality_defect.max(c.horizontality_defect().abs());
        out.max_speed_deviation = out.max_speed_deviation.max((c.planar_speed() - 1.0).abs());
        out.min_kappa = out.min_kappa.min(horizontal_curve_kappa(&c));
    }
    out
}

/// Horizontal tangent developable `σ(s, v) = γ(s) + v γ̇(s)` of a horizontal
/// curve of unit horizontal speed. The range of `v` must exclude 0.
pub fn build_tangent_developable(
    curve: &CurveSpec,
    s_range: [f64; 2],
    v_range: [f64; 2],
) -> Result<SurfaceHandle> {
    curve.validate()?;
    check_range("s", s_range)?;
    check_range("v", v_range)?;
    let check = check_developable_curve(curve, s_range);
    if check.max_horizontality_defect > EPS_CURVE {
        return Err(GeomError::NotHorizontal { residual: check.max_horizontality_defect, tol: EPS_CURVE });
    }
    if check.max_speed_deviation > EPS_CURVE {
        return Err(GeomError::NotUnitSpeed { deviation: check.max_speed_deviation });
    }
    if check.min_kappa <= EPS_LINE {
        return Err(GeomError::StraightLine { kappa: check.min_kappa });
    }
    if v_range[0] <= 0.0 && v_range[1] >= 0.0 {
        return Err(GeomError::ZeroInRange { v_min: v_range[0], v_max: v_range[1] });
    }
    let (c1, c2) = (curve.clone(), curve.clone());
    let handle = ruled_handle(
        "developable",
        Domain::new(s_range, v_range),
        move |s| c1.jet(s),
        move |s| {
            // V = γ̇, unit by the speed check
            let d = c2.jet(s).d;
            DirectionJet { a: [d[1][0], d[2][0], d[3][0]], b: [d[1][1], d[2][1], d[3][1]] }
        },
    );
    handle.check_regular(REGULARITY_GRID)?;
    Ok(handle)
}

/// Generalised cylinder over a plane profile, `σ(u, v) = (x(u), y(u), v)`.
///
/// The profile parameter comes first so that, with the patch orientation,
/// `ν^h = (ẏ X − ẋ Y)/|π̇|` and `H^h` is the signed curvature of the profile.
/// The `t` series of `profile` is ignored.
pub fn build_cylinder(
    profile: &CurveSpec,
    u_range: [f64; 2],
    height_range: [f64; 2],
) -> Result<SurfaceHandle> {
    profile.validate()?;
    check_range("u", u_range)?;
    check_range("height", height_range)?;
    for s in samples(u_range, SAMPLES) {
        if !(profile.jet(s).planar_speed() > EPS_REG) {
            return Err(GeomError::NotRegularProfile { s });
        }
    }
    let profile = profile.clone();
    Ok(SurfaceHandle::new("cylinder", Domain::new(u_range, height_range), move |u, v| {
        let c = profile.jet(u).d;
        Jet2 {
            value: [c[0][0], c[0][1], v],
            du: [c[1][0], c[1][1], 0.0],
            dv: [0.0, 0.0, 1.0],
            duu: [c[2][0], c[2][1], 0.0],
            duv: [0.0; 3],
            dvv: [0.0; 3],
        }
    }))
}

/// Value and derivatives `[f, f_x, f_y, f_xx, f_xy, f_yy]` of a function of
/// the plane.
pub type GraphFn = Arc<dyn Fn(f64, f64) -> [f64; 6] + Send + Sync>;

/// Graph `σ(u, v) = (u, v, f(u, v))` over `domain`.
pub fn build_graph(name: &str, f: GraphFn, domain: Domain) -> SurfaceHandle {
    SurfaceHandle::new(name, domain, move |u, v| {
        let [val, fx, fy, fxx, fxy, fyy] = f(u, v);
        Jet2 {
            value: [u, v, val],
            du: [1.0, 0.0, fx],
            dv: [0.0, 1.0, fy],
            duu: [0.0, 0.0, fxx],
            duv: [0.0, 0.0, fxy],
            dvv: [0.0, 0.0, fyy],
        }
    })
}

/// `coeff · x^px · y^py`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub coeff: f64,
    pub px: u32,
    pub py: u32,
}

/// Polynomial in two variables, for graph surfaces read from spec files.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BivariatePoly(pub Vec<Monomial>);

impl BivariatePoly {
    /// `[f, f_x, f_y, f_xx, f_xy, f_yy]`.
    pub fn jet(&self, x: f64, y: f64) -> [f64; 6] {
        // n-th derivative of s^p as (falling factorial, remaining power)
        fn d(p: u32, n: u32, s: f64) -> f64 {
            if n > p {
                return 0.0;
            }
            let fall: f64 = (0..n).map(|k| (p - k) as f64).product();
            fall * s.powi((p - n) as i32)
        }
        let mut out = [0.0; 6];
        for m in &self.0 {
            let orders = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];
            for (slot, (nx, ny)) in out.iter_mut().zip(orders) {
                *slot += m.coeff * d(m.px, nx, x) * d(m.py, ny, y);
            }
        }
        out
    }

    pub fn into_graph_fn(self) -> GraphFn {
        Arc::new(move |x, y| self.jet(x, y))
    }
}
