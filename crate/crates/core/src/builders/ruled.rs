//! Straight ruled surfaces `σ(s, v) = γ(s) + v V(s)` with `V = a X + b Y`
//! a unit horizontal field along `γ`:
//!
//! ```text
//! σ(s, v) = (x + v a, y + v b, t + 2v (y a − x b))
//! ```
//!
//! On such a patch `ω_Σ = η ds` with
//!
//! ```text
//! η = ṫ + 2(x ẏ − y ẋ) + 4v (a ẏ − b ẋ) + 2v² (a ḃ − b ȧ)
//! ```
//!
//! so the characteristic locus is the zero set of `η` and the leaves of the
//! horizontal flow are the rulings `s = const`.

use crate::builders::curve::{AngleField, CurveJet, CurveSpec, DirectionJet};
use crate::error::{GeomError, Result};
use crate::horizontal::{default_eps_char, induced_form};
use crate::patch::{Domain, Jet2, SurfaceHandle};

/// Tolerance for "identically zero" tests on sampled curve quantities.
pub const EPS_LINE: f64 = 1e-10;

/// Lattice size for regularity checks of built patches.
pub(crate) const REGULARITY_GRID: usize = 21;

const SAMPLES: usize = 65;

/// A straight ruled surface: base curve, ruling angle and parameter ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct RuledSpec {
    pub curve: CurveSpec,
    pub theta: AngleField,
    pub s_range: [f64; 2],
    pub v_range: [f64; 2],
}

impl RuledSpec {
    pub fn domain(&self) -> Domain {
        Domain::new(self.s_range, self.v_range)
    }

    fn validate(&self) -> Result<()> {
        self.curve.validate()?;
        self.theta.validate()?;
        check_range("s", self.s_range)?;
        check_range("v", self.v_range)
    }
}

pub(crate) fn check_range(name: &str, r: [f64; 2]) -> Result<()> {
    if !(r[0].is_finite() && r[1].is_finite() && r[0] < r[1]) {
        return Err(GeomError::InvalidSpec(format!("{name} range {r:?} is empty or not finite")));
    }
    Ok(())
}

pub(crate) fn samples(r: [f64; 2], n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| r[0] + (r[1] - r[0]) * k as f64 / (n - 1) as f64)
}

/// 2-jet of `γ(s) + v V(s)` from the jets of the curve and the direction.
pub fn ruled_jet(c: &CurveJet, d: &DirectionJet, v: f64) -> Jet2 {
    let [x, y, _] = c.d[0];
    let [xd, yd, td] = c.d[1];
    let [xdd, ydd, tdd] = c.d[2];
    let [a, ad, add] = d.a;
    let [b, bd, bdd] = d.b;
    // g = y a − x b and its derivatives
    let g = y * a - x * b;
    let gd = yd * a + y * ad - xd * b - x * bd;
    let gdd = ydd * a + 2.0 * yd * ad + y * add - xdd * b - 2.0 * xd * bd - x * bdd;
    Jet2 {
        value: [x + v * a, y + v * b, c.d[0][2] + 2.0 * v * g],
        du: [xd + v * ad, yd + v * bd, td + 2.0 * v * gd],
        dv: [a, b, 2.0 * g],
        duu: [xdd + v * add, ydd + v * bdd, tdd + 2.0 * v * gdd],
        duv: [ad, bd, 2.0 * gd],
        dvv: [0.0; 3],
    }
}

/// `η(s, v)` from the jets of the curve and the direction.
pub fn eta(c: &CurveJet, d: &DirectionJet, v: f64) -> f64 {
    let [x, y, _] = c.d[0];
    let [xd, yd, td] = c.d[1];
    td + 2.0 * (x * yd - y * xd) + 4.0 * v * (d.a[0] * yd - d.b[0] * xd) + 2.0 * v * v * d.turning()
}

pub fn eval_eta(spec: &RuledSpec, s: f64, v: f64) -> f64 {
    eta(&spec.curve.jet(s), &spec.theta.direction(s), v)
}

/// Ruled patch from arbitrary curve and direction jets, without checks.
pub(crate) fn ruled_handle<C, D>(name: &str, domain: Domain, curve: C, dir: D) -> SurfaceHandle
where
    C: Fn(f64) -> CurveJet + Send + Sync + 'static,
    D: Fn(f64) -> DirectionJet + Send + Sync + 'static,
{
    SurfaceHandle::new(name, domain, move |s, v| ruled_jet(&curve(s), &dir(s), v))
}

/// Builds the straight ruled surface of `spec`.
///
/// Fails with `DegenerateRuling` when `η` vanishes on every sample (the
/// projected curve is a straight line and the ruling is tangent to it), and
/// with `NotRegular` when `σ_s × σ_v` degenerates on the sample lattice.
pub fn build_straight_ruled(spec: &RuledSpec) -> Result<SurfaceHandle> {
    spec.validate()?;
    let max_eta = samples(spec.s_range, SAMPLES)
        .flat_map(|s| samples(spec.v_range, 17).map(move |v| (s, v)))
        .map(|(s, v)| eval_eta(spec, s, v).abs())
        .fold(0.0, f64::max);
    if max_eta <= EPS_LINE {
        return Err(GeomError::DegenerateRuling);
    }
    let (curve, theta) = (spec.curve.clone(), spec.theta.clone());
    let handle = ruled_handle(
        "ruled",
        spec.domain(),
        move |s| curve.jet(s),
        move |s| theta.direction(s),
    );
    handle.check_regular(REGULARITY_GRID)?;
    Ok(handle)
}

/// The plane patch `σ̃(s, v) = (a(s) v, b(s) v, 0)`, ruled by lines through
/// the origin in the directions of `theta`.
pub fn plane_flow_patch(theta: &AngleField, domain: Domain) -> SurfaceHandle {
    let theta = theta.clone();
    ruled_handle(
        "plane_flow_patch",
        domain,
        |_| CurveJet { d: [[0.0; 3]; 4] },
        move |s| theta.direction(s),
    )
}

/// Contactomorphism factor `λ = 2v² (a ḃ − b ȧ) / η` between the ruled patch
/// and the plane patch `(a v, b v, 0)` over the same parameters.
pub fn lambda_to_plane(spec: &RuledSpec, s: f64, v: f64) -> Result<f64> {
    let max_turning = samples(spec.s_range, SAMPLES)
        .map(|s| spec.theta.direction(s).turning().abs())
        .fold(0.0, f64::max);
    if max_turning <= EPS_LINE {
        return Err(GeomError::ConstantRulingDirection);
    }
    let (c, d) = (spec.curve.jet(s), spec.theta.direction(s));
    let e = eta(&c, &d, v);
    let eps = default_eps_char(&ruled_jet(&c, &d, v));
    if !(e.abs() >= eps) {
        return Err(GeomError::CharacteristicPoint { norm: e.abs(), eps });
    }
    Ok(2.0 * v * v * d.turning() / e)
}

/// `max` over both coefficients of `|ω_plane − λ ω_ruled|` at `(s, v)`, with
/// both forms pulled back from their patches.
pub fn pullback_residual(spec: &RuledSpec, s: f64, v: f64) -> Result<f64> {
    let lambda = lambda_to_plane(spec, s, v)?;
    let ruled = ruled_jet(&spec.curve.jet(s), &spec.theta.direction(s), v);
    let plane = plane_flow_patch(&spec.theta, spec.domain()).eval_jet2(s, v)?;
    let (wr, wp) = (induced_form(&ruled), induced_form(&plane));
    Ok((wp.p_u - lambda * wr.p_u).abs().max((wp.p_v - lambda * wr.p_v).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::curve::{Series, Term};
    use crate::horizontal::{flow_direction, horizontal_normal, is_characteristic};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, SQRT_2};

    fn paraboloid() -> RuledSpec {
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

    fn lift_with_spinning_ruling() -> RuledSpec {
        RuledSpec {
            curve: CurveSpec::unit_circle_lift(),
            theta: AngleField(Series::new(vec![Term::poly(1.0, 1)])),
            s_range: [0.0, 6.0],
            v_range: [0.2, 1.0],
        }
    }

    #[test]
    fn paraboloid_parametrisation() {
        let h = build_straight_ruled(&paraboloid()).unwrap();
        let p = h.point(1.0, 0.0).unwrap();
        assert_eq!(p.to_array(), [0.0, 1.0, 1.0]);
        for &(s, v) in &[(0.3, -0.7), (-0.9, 0.4), (0.5, 0.5)] {
            let p = h.point(s, v).unwrap();
            assert!((p.x - v * FRAC_1_SQRT_2).abs() < 1e-15);
            assert!((p.y - (s + v * FRAC_1_SQRT_2)).abs() < 1e-15);
            assert!((p.t - (s * s + SQRT_2 * s * v)).abs() < 1e-14);
            assert!((p.t - (p.y * p.y - p.x * p.x)).abs() < 1e-14);
            let e = eval_eta(&paraboloid(), s, v);
            assert!((e - (2.0 * s + 2.0 * SQRT_2 * v)).abs() < 1e-14);
        }
    }

    #[test]
    fn form_and_normal_match_eta() {
        let spec = lift_with_spinning_ruling();
        let h = build_straight_ruled(&spec).unwrap();
        for &(s, v) in &[(0.5, 0.3), (2.0, 0.9), (4.4, 0.5)] {
            let j = h.eval_jet2(s, v).unwrap();
            let e = eval_eta(&spec, s, v);
            let f = induced_form(&j);
            assert!((f.p_u - e).abs() <= 1e-12 * (1.0 + e.abs()));
            assert!(f.p_v.abs() <= 1e-12);
            assert!((horizontal_normal(&j).norm - e.abs()).abs() <= 1e-12 * e.abs());
            let dir = flow_direction(&j, 1e-9).unwrap();
            assert!(dir.beta.abs() < 1e-12 && dir.du.abs() < 1e-12);
        }
    }

    #[test]
    fn horizontal_base_curve_is_characteristic() {
        let spec = RuledSpec {
            curve: CurveSpec::unit_circle_lift(),
            theta: AngleField::constant(0.3),
            s_range: [0.0, 3.0],
            v_range: [-0.5, 0.5],
        };
        let h = build_straight_ruled(&spec).unwrap();
        for k in 0..10 {
            let s = 0.3 * k as f64;
            assert!(eval_eta(&spec, s, 0.0).abs() < 1e-14);
            let j = h.eval_jet2(s, 0.0).unwrap();
            assert!(is_characteristic(&j, default_eps_char(&j)).characteristic);
        }
    }

    #[test]
    fn tangent_ruling_over_straight_line_is_degenerate() {
        // horizontal line through the origin in direction (1, 0): t ≡ 0
        let spec = RuledSpec {
            curve: CurveSpec::new(Series::new(vec![Term::poly(1.0, 1)]), Series::default(), Series::default()),
            theta: AngleField::constant(0.0),
            s_range: [0.0, 1.0],
            v_range: [-1.0, 1.0],
        };
        assert_eq!(build_straight_ruled(&spec).unwrap_err(), GeomError::DegenerateRuling);
        let flipped = RuledSpec { theta: AngleField::constant(std::f64::consts::PI), ..spec };
        assert_eq!(build_straight_ruled(&flipped).unwrap_err(), GeomError::DegenerateRuling);
    }

    #[test]
    fn lambda_examples() {
        let spec = lift_with_spinning_ruling();
        for &(s, v) in &[(0.5, 0.3), (2.0, 0.9), (5.0, 0.25)] {
            assert!(pullback_residual(&spec, s, v).unwrap() <= 1e-10);
        }
        let at_zero = RuledSpec { v_range: [-1.0, 1.0], ..spec.clone() };
        // η(s, 0) = 0 for the horizontal lift, so λ is undefined on the curve
        assert!(matches!(lambda_to_plane(&at_zero, 1.0, 0.0), Err(GeomError::CharacteristicPoint { .. })));
        let off_curve = RuledSpec {
            curve: CurveSpec::new(Series::new(vec![Term::cos(1.0, 1)]), Series::new(vec![Term::sin(1.0, 1)]), Series::new(vec![Term::poly(1.0, 1)])),
            ..at_zero
        };
        assert_eq!(lambda_to_plane(&off_curve, 1.0, 0.0).unwrap(), 0.0);
        assert_eq!(lambda_to_plane(&paraboloid(), 0.5, 0.5), Err(GeomError::ConstantRulingDirection));
    }

    #[test]
    fn plane_patch_leaves_are_rays() {
        let theta = AngleField(Series::new(vec![Term::poly(1.0, 1)]));
        let h = plane_flow_patch(&theta, Domain::new([0.0, 6.0], [0.5, 1.5]));
        let j = h.eval_jet2(1.0, 1.0).unwrap();
        assert_eq!(j.value[2], 0.0);
        let dir = flow_direction(&j, 1e-9).unwrap();
        assert!(dir.du.abs() < 1e-15);
    }
}
