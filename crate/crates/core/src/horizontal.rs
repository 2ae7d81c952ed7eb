//! Horizontal normal, characteristic points, the induced contact form and
//! the direction field of the horizontal flow.
//!
//! For a patch `σ = (x, y, t)` the horizontal normal is
//!
//! ```text
//! N^h = (∂(y,t) + 2y ∂(x,y)) X + (∂(t,x) − 2x ∂(x,y)) Y
//! ```
//!
//! and a point is characteristic exactly when `N^h = 0`. Away from such
//! points the kernel of the pulled-back contact form `ω_Σ = p_u du + p_v dv`
//! is spanned by `JV = β ∂_u − α ∂_v` with `(α, β) = (p_u, p_v) / |N^h|`,
//! whose pushforward is the unit horizontal vector `Jν^h`.

use crate::error::{GeomError, Result};
use crate::heis::{frame_to_euclidean, FrameVector, HorizontalVec, Point3};
use crate::patch::{Jet2, T, X, Y};

/// Scale factor of the default characteristic threshold.
pub const EPS_CHAR_SCALE: f64 = 1e-9;

/// Scale-aware characteristic threshold `scale · (1 + |d1|)`.
pub fn eps_char_scaled(j: &Jet2, scale: f64) -> f64 {
    scale * (1.0 + j.d1_norm())
}

/// Default characteristic threshold `1e-9 · (1 + |d1|)`.
pub fn default_eps_char(j: &Jet2) -> f64 {
    eps_char_scaled(j, EPS_CHAR_SCALE)
}

/// Threshold on `|N^h|` below which a point counts as characteristic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CharThreshold {
    /// `scale · (1 + |d1|)`, invariant under rescaling of the patch.
    Scaled(f64),
    Absolute(f64),
}

impl Default for CharThreshold {
    fn default() -> Self {
        CharThreshold::Scaled(EPS_CHAR_SCALE)
    }
}

impl CharThreshold {
    pub fn eval(&self, j: &Jet2) -> f64 {
        match *self {
            CharThreshold::Scaled(scale) => eps_char_scaled(j, scale),
            CharThreshold::Absolute(eps) => eps,
        }
    }

    /// The same rule multiplied by `k`.
    pub fn times(&self, k: f64) -> CharThreshold {
        match *self {
            CharThreshold::Scaled(s) => CharThreshold::Scaled(s * k),
            CharThreshold::Absolute(e) => CharThreshold::Absolute(e * k),
        }
    }
}

/// Frame coefficients of `N^h` at the base point of a jet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizontalNormal {
    pub n1: f64,
    pub n2: f64,
    pub norm: f64,
    pub base: Point3,
}

impl HorizontalNormal {
    pub fn as_vec(&self) -> HorizontalVec {
        HorizontalVec::new(self.n1, self.n2, self.base)
    }

    /// `N^h` as a Euclidean vector, `(n1, n2, 2y n1 − 2x n2)`.
    pub fn to_euclidean(&self) -> [f64; 3] {
        frame_to_euclidean(&FrameVector::new(self.n1, self.n2, 0.0, self.base))
    }
}

pub fn horizontal_normal(j: &Jet2) -> HorizontalNormal {
    let [x, y, _] = j.value;
    let jxy = j.jac(X, Y);
    let n1 = j.jac(Y, T) + 2.0 * y * jxy;
    let n2 = j.jac(T, X) - 2.0 * x * jxy;
    HorizontalNormal { n1, n2, norm: n1.hypot(n2), base: j.point() }
}

/// Parameter gradient of `N^h`: `[[∂_u n1, ∂_v n1], [∂_u n2, ∂_v n2]]`.
///
/// Uses the second partials of the jet.
pub fn normal_gradient(j: &Jet2) -> [[f64; 2]; 2] {
    let [x, y, _] = j.value;
    let jxy = j.jac(X, Y);
    let (yt_u, yt_v) = j.jac_grad(Y, T);
    let (tx_u, tx_v) = j.jac_grad(T, X);
    let (xy_u, xy_v) = j.jac_grad(X, Y);
    [
        [
            yt_u + 2.0 * j.du[Y] * jxy + 2.0 * y * xy_u,
            yt_v + 2.0 * j.dv[Y] * jxy + 2.0 * y * xy_v,
        ],
        [
            tx_u - 2.0 * j.du[X] * jxy - 2.0 * x * xy_u,
            tx_v - 2.0 * j.dv[X] * jxy - 2.0 * x * xy_v,
        ],
    ]
}

/// `ν^h = N^h / |N^h|`, taken with the orientation of the patch.
pub fn unit_horizontal_normal(j: &Jet2, eps_char: f64) -> Result<HorizontalVec> {
    let n = horizontal_normal(j);
    if !(n.norm >= eps_char) {
        return Err(GeomError::CharacteristicPoint { norm: n.norm, eps: eps_char });
    }
    Ok(HorizontalVec::new(n.n1 / n.norm, n.n2 / n.norm, n.base))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicTest {
    pub characteristic: bool,
    pub norm: f64,
}

pub fn is_characteristic(j: &Jet2, eps_char: f64) -> CharacteristicTest {
    let norm = horizontal_normal(j).norm;
    CharacteristicTest { characteristic: !(norm >= eps_char), norm }
}

/// Coefficients of `ω_Σ = p_u du + p_v dv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InducedFormCoeffs {
    pub p_u: f64,
    pub p_v: f64,
}

impl InducedFormCoeffs {
    /// `ω_Σ` applied to the parameter vector `(du, dv)`.
    pub fn apply(&self, du: f64, dv: f64) -> f64 {
        self.p_u * du + self.p_v * dv
    }
}

pub fn induced_form(j: &Jet2) -> InducedFormCoeffs {
    let [x, y, _] = j.value;
    InducedFormCoeffs {
        p_u: j.du[T] + 2.0 * x * j.du[Y] - 2.0 * y * j.du[X],
        p_v: j.dv[T] + 2.0 * x * j.dv[Y] - 2.0 * y * j.dv[X],
    }
}

/// Parameter-space components of `JV`, with the `α`, `β` they come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowDirection {
    pub du: f64,
    pub dv: f64,
    pub alpha: f64,
    pub beta: f64,
}

pub fn flow_direction(j: &Jet2, eps_char: f64) -> Result<FlowDirection> {
    let n = horizontal_normal(j);
    if !(n.norm >= eps_char) {
        return Err(GeomError::CharacteristicPoint { norm: n.norm, eps: eps_char });
    }
    let form = induced_form(j);
    let alpha = form.p_u / n.norm;
    let beta = form.p_v / n.norm;
    Ok(FlowDirection { du: beta, dv: -alpha, alpha, beta })
}

/// Frame coefficients of `σ_*(du ∂_u + dv ∂_v)`.
pub fn pushforward(j: &Jet2, du: f64, dv: f64) -> FrameVector {
    let w = [
        du * j.du[X] + dv * j.dv[X],
        du * j.du[Y] + dv * j.dv[Y],
        du * j.du[T] + dv * j.dv[T],
    ];
    FrameVector::from_euclidean(j.point(), w)
}

/// `(α, β)` from `ν^h` when `∂(x,y) ≠ 0`:
/// `α = −(ν1 x_u + ν2 y_u)/D`, `β = −(ν1 x_v + ν2 y_v)/D`.
pub fn alpha_beta_planar(j: &Jet2, nu: &HorizontalVec) -> Option<(f64, f64)> {
    let d = j.jac(X, Y);
    if d == 0.0 {
        return None;
    }
    Some((
        -(nu.h1 * j.du[X] + nu.h2 * j.du[Y]) / d,
        -(nu.h1 * j.dv[X] + nu.h2 * j.dv[Y]) / d,
    ))
}

/// Euclidean dot product `N · N^h`, with `N = σ_u × σ_v`.
pub fn normal_compatibility(j: &Jet2) -> f64 {
    let n = j.euclidean_normal();
    let nh = horizontal_normal(j).to_euclidean();
    n[0] * nh[0] + n[1] * nh[1] + n[2] * nh[2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heis::{contact_eval, j_rotate};
    use proptest::prelude::*;

    fn vertical_plane(u: f64, v: f64) -> Jet2 {
        Jet2 { value: [0.0, u, v], du: [0.0, 1.0, 0.0], dv: [0.0, 0.0, 1.0], ..Default::default() }
    }

    fn plane_t0(u: f64, v: f64) -> Jet2 {
        Jet2 { value: [u, v, 0.0], du: [1.0, 0.0, 0.0], dv: [0.0, 1.0, 0.0], ..Default::default() }
    }

    fn cone(u: f64, v: f64) -> Jet2 {
        let (s, c) = v.sin_cos();
        Jet2 {
            value: [u * c, u * s, u],
            du: [c, s, 1.0],
            dv: [-u * s, u * c, 0.0],
            duu: [0.0; 3],
            duv: [-s, c, 0.0],
            dvv: [-u * c, -u * s, 0.0],
        }
    }

    /// Unit-speed circle profile in the first parameter, height in the second.
    fn unit_cylinder(u: f64, v: f64) -> Jet2 {
        let (s, c) = u.sin_cos();
        Jet2 {
            value: [c, s, v],
            du: [-s, c, 0.0],
            dv: [0.0, 0.0, 1.0],
            duu: [-c, -s, 0.0],
            ..Default::default()
        }
    }

    /// Polynomial patch with every second partial populated.
    fn poly_patch(c: &[f64; 9], u: f64, v: f64) -> Jet2 {
        let x = u + c[0] * v + c[1] * u * u;
        let y = v + c[2] * u * v + c[3] * v * v;
        let t = c[4] * u + c[5] * v + c[6] * u * u + c[7] * u * v + c[8] * v * v;
        Jet2 {
            value: [x, y, t],
            du: [1.0 + 2.0 * c[1] * u, c[2] * v, c[4] + 2.0 * c[6] * u + c[7] * v],
            dv: [c[0], 1.0 + c[2] * u + 2.0 * c[3] * v, c[5] + c[7] * u + 2.0 * c[8] * v],
            duu: [2.0 * c[1], 0.0, 2.0 * c[6]],
            duv: [0.0, c[2], c[7]],
            dvv: [0.0, 2.0 * c[3], 2.0 * c[8]],
        }
    }

    #[test]
    fn vertical_plane_normal_is_x() {
        let j = vertical_plane(0.4, -1.0);
        let n = horizontal_normal(&j);
        assert_eq!((n.n1, n.n2), (1.0, 0.0));
        let nu = unit_horizontal_normal(&j, default_eps_char(&j)).unwrap();
        assert_eq!((nu.h1, nu.h2), (1.0, 0.0));
        let f = induced_form(&j);
        assert_eq!((f.p_u, f.p_v), (0.0, 1.0));
        assert_eq!(normal_compatibility(&j), 1.0);
    }

    #[test]
    fn plane_t0_form_and_locus() {
        let j = plane_t0(0.3, -0.2);
        let f = induced_form(&j);
        assert_eq!((f.p_u, f.p_v), (0.4, 0.6));
        let n = horizontal_normal(&j);
        assert_eq!((n.n1, n.n2), (-0.4, -0.6));
        assert!(is_characteristic(&plane_t0(0.0, 0.0), 1e-9).characteristic);
        let origin = plane_t0(0.0, 0.0);
        assert_eq!(normal_compatibility(&origin), 0.0);
        assert!(matches!(
            flow_direction(&origin, 1e-9),
            Err(GeomError::CharacteristicPoint { .. })
        ));
    }

    #[test]
    fn cone_normal_matches_closed_form() {
        let j = cone(-1.0, 0.0);
        let nu = unit_horizontal_normal(&j, default_eps_char(&j)).unwrap();
        let r5 = 5f64.sqrt();
        assert!((nu.h1 - 1.0 / r5).abs() < 1e-15 && (nu.h2 + 2.0 / r5).abs() < 1e-15);
        for &(u, v) in &[(-0.5, 0.3), (-1.7, 2.0), (-2.0, 6.0)] {
            let j = cone(u, v);
            let nu = unit_horizontal_normal(&j, default_eps_char(&j)).unwrap();
            let w = (1.0 + 4.0 * u * u).sqrt();
            assert!((nu.h1 - (v.cos() - 2.0 * u * v.sin()) / w).abs() < 1e-14);
            assert!((nu.h2 - (v.sin() + 2.0 * u * v.cos()) / w).abs() < 1e-14);
            assert!(!is_characteristic(&j, default_eps_char(&j)).characteristic);
        }
    }

    #[test]
    fn cylinder_normal_and_flow() {
        let j = unit_cylinder(0.7, 0.1);
        let nu = unit_horizontal_normal(&j, 1e-9).unwrap();
        // ν^h = ẏ X − ẋ Y for the unit-speed profile
        let (xd, yd) = (j.du[0], j.du[1]);
        assert!((nu.h1 - yd).abs() < 1e-15 && (nu.h2 + xd).abs() < 1e-15);
        let dir = flow_direction(&j, 1e-9).unwrap();
        let push = pushforward(&j, dir.du, dir.dv);
        // Jν^h = ẋ X + ẏ Y: the leaf is the horizontal lift of the profile
        assert!((push.a1 - xd).abs() < 1e-14 && (push.a2 - yd).abs() < 1e-14);
        assert!(push.a3.abs() < 1e-14);
    }

    #[test]
    fn graph_characteristic_where_gradient_matches() {
        // f = −2xy + c: f_x = −2y, f_y = −2x, so N^h = (4y, 0) vanishes on y = 0
        let graph = |u: f64, v: f64| Jet2 {
            value: [u, v, 3.0 - 2.0 * u * v],
            du: [1.0, 0.0, -2.0 * v],
            dv: [0.0, 1.0, -2.0 * u],
            duv: [0.0, 0.0, -2.0],
            ..Default::default()
        };
        assert!(is_characteristic(&graph(0.8, 0.0), 1e-9).characteristic);
        assert!(!is_characteristic(&graph(0.8, 0.1), 1e-9).characteristic);
    }

    fn coeffs() -> impl Strategy<Value = [f64; 9]> {
        prop::array::uniform9(-1.0..1.0f64)
    }

    proptest! {
        #[test]
        fn compatibility_identity(c in coeffs(), u in -0.4..0.4f64, v in -0.4..0.4f64) {
            let j = poly_patch(&c, u, v);
            let n = horizontal_normal(&j);
            let expect = n.n1 * n.n1 + n.n2 * n.n2;
            prop_assert!((normal_compatibility(&j) - expect).abs() <= 1e-10 * (1.0 + expect));
        }

        #[test]
        fn flow_direction_spans_kernel(c in coeffs(), u in -0.4..0.4f64, v in -0.4..0.4f64) {
            let j = poly_patch(&c, u, v);
            let eps = default_eps_char(&j);
            prop_assume!(horizontal_normal(&j).norm > 1e-6);
            let dir = flow_direction(&j, eps).unwrap();
            let form = induced_form(&j);
            prop_assert!(form.apply(dir.du, dir.dv).abs() <= 1e-12 * (1.0 + form.p_u.abs() + form.p_v.abs()));
            let push = pushforward(&j, dir.du, dir.dv);
            prop_assert!(contact_eval(j.point(), frame_to_euclidean(&push)).abs() <= 1e-10);
            let nu = unit_horizontal_normal(&j, eps).unwrap();
            let jnu = j_rotate(&nu);
            prop_assert!((push.a1 - jnu.h1).abs() <= 1e-10);
            prop_assert!((push.a2 - jnu.h2).abs() <= 1e-10);
            prop_assert!((push.horizontal().norm() - 1.0).abs() <= 1e-10);
            if let Some((a, b)) = alpha_beta_planar(&j, &nu) {
                if j.jac(X, Y).abs() > 1e-3 {
                    prop_assert!((a - dir.alpha).abs() <= 1e-8 * (1.0 + a.abs()));
                    prop_assert!((b - dir.beta).abs() <= 1e-8 * (1.0 + b.abs()));
                }
            }
        }

        #[test]
        fn normal_gradient_matches_differences(c in coeffs(), u in -0.4..0.4f64, v in -0.4..0.4f64) {
            let g = normal_gradient(&poly_patch(&c, u, v));
            let h = 1e-6;
            let n = |u, v| { let n = horizontal_normal(&poly_patch(&c, u, v)); [n.n1, n.n2] };
            let (pu, mu, pv, mv) = (n(u + h, v), n(u - h, v), n(u, v + h), n(u, v - h));
            for k in 0..2 {
                prop_assert!((g[k][0] - (pu[k] - mu[k]) / (2.0 * h)).abs() < 1e-6);
                prop_assert!((g[k][1] - (pv[k] - mv[k]) / (2.0 * h)).abs() < 1e-6);
            }
        }

        #[test]
        fn unit_normal_invariant_under_orientation_preserving_affine(
            c in coeffs(), u in -0.3..0.3f64, v in -0.3..0.3f64,
            a in 0.5..2.0f64, b in -0.5..0.5f64, d in 0.5..2.0f64,
        ) {
            let j = poly_patch(&c, u, v);
            prop_assume!(horizontal_normal(&j).norm > 1e-6);
            let lin = [[a, b], [0.0, d]];
            let jr = j.compose_affine(lin);
            let (n0, n1) = (horizontal_normal(&j), horizontal_normal(&jr));
            let det = a * d;
            prop_assert!((n1.n1 - det * n0.n1).abs() <= 1e-12 * (1.0 + n1.n1.abs()));
            let (nu0, nu1) = (unit_horizontal_normal(&j, 0.0).unwrap(), unit_horizontal_normal(&jr, 0.0).unwrap());
            prop_assert!((nu0.h1 - nu1.h1).abs() <= 1e-10 && (nu0.h2 - nu1.h2).abs() <= 1e-10);
        }
    }
}
