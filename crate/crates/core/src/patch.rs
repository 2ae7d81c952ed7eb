//! Surface patches as 2-jet evaluators over rectangular parameter domains.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::heis::Point3;

/// Lower bound on `|σ_u × σ_v|` below which a patch counts as singular.
pub const EPS_REG: f64 = 1e-8;

/// Value, first and second partials of a patch `(u, v) ↦ (x, y, t)`.
///
/// Each array is indexed `[x, y, t]`. The mixed partial is stored once.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet2 {
    pub value: [f64; 3],
    pub du: [f64; 3],
    pub dv: [f64; 3],
    pub duu: [f64; 3],
    pub duv: [f64; 3],
    pub dvv: [f64; 3],
}

/// The three parameter Jacobians `∂(y,t)`, `∂(t,x)`, `∂(x,y)` over `∂(u,v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobians {
    pub yt: f64,
    pub tx: f64,
    pub xy: f64,
}

pub(crate) const X: usize = 0;
pub(crate) const Y: usize = 1;
pub(crate) const T: usize = 2;

impl Jet2 {
    pub fn point(&self) -> Point3 {
        Point3::from_array(self.value)
    }

    /// Frobenius norm of the first derivatives.
    pub fn d1_norm(&self) -> f64 {
        self.du.iter().chain(self.dv.iter()).map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        [self.value, self.du, self.dv, self.duu, self.duv, self.dvv]
            .iter()
            .flatten()
            .all(|c| c.is_finite())
    }

    /// `∂(a, b)/∂(u, v)` for coordinate indices `a`, `b`.
    pub(crate) fn jac(&self, a: usize, b: usize) -> f64 {
        self.du[a] * self.dv[b] - self.dv[a] * self.du[b]
    }

    /// `(∂_u, ∂_v)` of `∂(a, b)/∂(u, v)`; needs the second partials.
    pub(crate) fn jac_grad(&self, a: usize, b: usize) -> (f64, f64) {
        let d_u = self.duu[a] * self.dv[b] + self.du[a] * self.duv[b]
            - self.duv[a] * self.du[b]
            - self.dv[a] * self.duu[b];
        let d_v = self.duv[a] * self.dv[b] + self.du[a] * self.dvv[b]
            - self.dvv[a] * self.du[b]
            - self.dv[a] * self.duv[b];
        (d_u, d_v)
    }

    /// Euclidean normal `σ_u × σ_v`.
    pub fn euclidean_normal(&self) -> [f64; 3] {
        [self.jac(Y, T), self.jac(T, X), self.jac(X, Y)]
    }

    pub fn regularity(&self) -> f64 {
        let n = self.euclidean_normal();
        (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt()
    }

    /// Jet of `σ ∘ A` where `(u, v) = lin · (ũ, ṽ) + shift`.
    pub fn compose_affine(&self, lin: [[f64; 2]; 2]) -> Jet2 {
        let [[a, b], [c, d]] = lin;
        let mut out = Jet2 { value: self.value, ..Default::default() };
        for i in 0..3 {
            out.du[i] = a * self.du[i] + c * self.dv[i];
            out.dv[i] = b * self.du[i] + d * self.dv[i];
            out.duu[i] = a * a * self.duu[i] + 2.0 * a * c * self.duv[i] + c * c * self.dvv[i];
            out.duv[i] =
                a * b * self.duu[i] + (a * d + b * c) * self.duv[i] + c * d * self.dvv[i];
            out.dvv[i] = b * b * self.duu[i] + 2.0 * b * d * self.duv[i] + d * d * self.dvv[i];
        }
        out
    }
}

/// `(∂(y,t), ∂(t,x), ∂(x,y))` of a jet.
pub fn jacobians(j: &Jet2) -> Jacobians {
    Jacobians { yt: j.jac(Y, T), tx: j.jac(T, X), xy: j.jac(X, Y) }
}

/// Closed rectangle `[u_min, u_max] × [v_min, v_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain {
    pub u: [f64; 2],
    pub v: [f64; 2],
}

impl Domain {
    pub fn new(u: [f64; 2], v: [f64; 2]) -> Self {
        Self { u, v }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        u >= self.u[0] && u <= self.u[1] && v >= self.v[0] && v <= self.v[1]
    }

    pub fn u_span(&self) -> f64 {
        self.u[1] - self.u[0]
    }

    pub fn v_span(&self) -> f64 {
        self.v[1] - self.v[0]
    }

    /// Node `(i, j)` of an `nu × nv` lattice covering the closed rectangle.
    pub fn lattice(&self, nu: usize, nv: usize, i: usize, j: usize) -> (f64, f64) {
        let lerp = |r: [f64; 2], k: usize, n: usize| {
            if n <= 1 {
                0.5 * (r[0] + r[1])
            } else {
                r[0] + (r[1] - r[0]) * k as f64 / (n - 1) as f64
            }
        };
        (lerp(self.u, i, nu), lerp(self.v, j, nv))
    }

    /// Same lattice with the boundary rows and columns dropped.
    pub fn interior_lattice(&self, n: usize, i: usize, j: usize) -> (f64, f64) {
        let lerp = |r: [f64; 2], k: usize| r[0] + (r[1] - r[0]) * (k + 1) as f64 / (n + 1) as f64;
        (lerp(self.u, i), lerp(self.v, j))
    }
}

type JetFn = dyn Fn(f64, f64) -> Result<Jet2> + Send + Sync;

/// An immutable surface patch: a domain plus a 2-jet evaluator.
#[derive(Clone)]
pub struct SurfaceHandle {
    name: String,
    domain: Domain,
    jet: Arc<JetFn>,
}

impl fmt::Debug for SurfaceHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceHandle")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl SurfaceHandle {
    /// Wraps an analytic jet evaluator.
    pub fn new<F>(name: impl Into<String>, domain: Domain, jet: F) -> Self
    where
        F: Fn(f64, f64) -> Jet2 + Send + Sync + 'static,
    {
        Self::new_fallible(name, domain, move |u, v| Ok(jet(u, v)))
    }

    pub fn new_fallible<F>(name: impl Into<String>, domain: Domain, jet: F) -> Self
    where
        F: Fn(f64, f64) -> Result<Jet2> + Send + Sync + 'static,
    {
        Self { name: name.into(), domain, jet: Arc::new(jet) }
    }

    /// Wraps a value-only map; derivatives come from [`fd_jet2`].
    pub fn from_value_map<F>(name: impl Into<String>, domain: Domain, map: F) -> Self
    where
        F: Fn(f64, f64) -> [f64; 3] + Send + Sync + 'static,
    {
        Self::new_fallible(name, domain, move |u, v| {
            fd_jet2(&map, &domain, u, v, default_fd_step(u, v))
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn eval_jet2(&self, u: f64, v: f64) -> Result<Jet2> {
        if !self.domain.contains(u, v) {
            return Err(GeomError::OutOfDomain { u, v });
        }
        (self.jet)(u, v)
    }

    pub fn point(&self, u: f64, v: f64) -> Result<Point3> {
        self.eval_jet2(u, v).map(|j| j.point())
    }

    /// Checks `|σ_u × σ_v| > EPS_REG` on an `n × n` interior lattice.
    pub fn check_regular(&self, n: usize) -> Result<()> {
        for i in 0..n {
            for j in 0..n {
                let (u, v) = self.domain.interior_lattice(n, i, j);
                let cross = self.eval_jet2(u, v)?.regularity();
                if !(cross > EPS_REG) {
                    return Err(GeomError::NotRegular { u, v, cross });
                }
            }
        }
        Ok(())
    }

    /// The patch `σ̃(ũ, ṽ) = σ(lin · (ũ, ṽ) + shift)` on `domain`.
    ///
    /// Points of `domain` mapping outside the original domain evaluate to
    /// `OutOfDomain`.
    pub fn reparametrize_affine(
        &self,
        lin: [[f64; 2]; 2],
        shift: [f64; 2],
        domain: Domain,
    ) -> SurfaceHandle {
        let inner = self.clone();
        SurfaceHandle::new_fallible(format!("{}∘affine", self.name), domain, move |s, r| {
            let u = lin[0][0] * s + lin[0][1] * r + shift[0];
            let v = lin[1][0] * s + lin[1][1] * r + shift[1];
            inner.eval_jet2(u, v).map(|j| j.compose_affine(lin))
        })
    }
}

/// Default finite-difference step: `max(1e-4, ε^{1/3} · max(1, |u|, |v|))`.
pub fn default_fd_step(u: f64, v: f64) -> f64 {
    let scale = 1f64.max(u.abs()).max(v.abs());
    1e-4f64.max(f64::EPSILON.cbrt() * scale)
}

/// One-axis stencil: offsets with first- and second-derivative weights.
struct Stencil {
    offsets: Vec<f64>,
    w1: Vec<f64>,
    w2: Vec<f64>,
}

impl Stencil {
    /// Central where it fits, second-order one-sided otherwise.
    fn for_axis(x: f64, range: [f64; 2], h: f64) -> Stencil {
        if x - h >= range[0] && x + h <= range[1] {
            Stencil {
                offsets: vec![-h, 0.0, h],
                w1: vec![-0.5 / h, 0.0, 0.5 / h],
                w2: vec![1.0 / (h * h), -2.0 / (h * h), 1.0 / (h * h)],
            }
        } else {
            let dir = if x + 3.0 * h <= range[1] { 1.0 } else { -1.0 };
            Stencil {
                offsets: (0..4).map(|k| dir * h * k as f64).collect(),
                w1: [-1.5, 2.0, -0.5, 0.0].iter().map(|w| dir * w / h).collect(),
                w2: [2.0, -5.0, 4.0, -1.0].iter().map(|w| w / (h * h)).collect(),
            }
        }
    }
}

fn axpy(acc: &mut [f64; 3], w: f64, f: [f64; 3]) {
    for (a, x) in acc.iter_mut().zip(f) {
        *a += w * x;
    }
}

/// 2-jet of a value-only map by finite differences with step `h`.
///
/// Central differences are used wherever the stencil fits in `domain`;
/// near an edge the stencil turns one-sided. The step is clipped to a third
/// of the domain span.
pub fn fd_jet2<F>(map: &F, domain: &Domain, u: f64, v: f64, h: f64) -> Result<Jet2>
where
    F: Fn(f64, f64) -> [f64; 3] + ?Sized,
{
    if !domain.contains(u, v) || !(h > 0.0) {
        return Err(GeomError::OutOfDomain { u, v });
    }
    let hu = h.min(domain.u_span() / 3.0);
    let hv = h.min(domain.v_span() / 3.0);
    if !(hu > 0.0 && hv > 0.0) {
        return Err(GeomError::OutOfDomain { u, v });
    }
    let su = Stencil::for_axis(u, domain.u, hu);
    let sv = Stencil::for_axis(v, domain.v, hv);

    let mut jet = Jet2 { value: map(u, v), ..Default::default() };
    for (k, du) in su.offsets.iter().enumerate() {
        let f = map(u + du, v);
        axpy(&mut jet.du, su.w1[k], f);
        axpy(&mut jet.duu, su.w2[k], f);
    }
    for (k, dv) in sv.offsets.iter().enumerate() {
        let f = map(u, v + dv);
        axpy(&mut jet.dv, sv.w1[k], f);
        axpy(&mut jet.dvv, sv.w2[k], f);
    }
    for (a, du) in su.offsets.iter().enumerate() {
        if su.w1[a] == 0.0 {
            continue;
        }
        for (b, dv) in sv.offsets.iter().enumerate() {
            if sv.w1[b] == 0.0 {
                continue;
            }
            let f = map(u + du, v + dv);
            axpy(&mut jet.duv, su.w1[a] * sv.w1[b], f);
        }
    }
    if !jet.is_finite() {
        return Err(GeomError::OutOfDomain { u, v });
    }
    Ok(jet)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone_value(u: f64, v: f64) -> [f64; 3] {
        [u * v.cos(), u * v.sin(), u]
    }

    fn cone_jet(u: f64, v: f64) -> Jet2 {
        let (s, c) = v.sin_cos();
        Jet2 {
            value: cone_value(u, v),
            du: [c, s, 1.0],
            dv: [-u * s, u * c, 0.0],
            duu: [0.0; 3],
            duv: [-s, c, 0.0],
            dvv: [-u * c, -u * s, 0.0],
        }
    }

    fn max_diff(a: &Jet2, b: &Jet2) -> (f64, f64) {
        let d1 = a.du.iter().chain(&a.dv).zip(b.du.iter().chain(&b.dv));
        let d2 = a.duu.iter().chain(&a.duv).chain(&a.dvv).zip(b.duu.iter().chain(&b.duv).chain(&b.dvv));
        (
            d1.map(|(x, y)| (x - y).abs()).fold(0.0, f64::max),
            d2.map(|(x, y)| (x - y).abs()).fold(0.0, f64::max),
        )
    }

    #[test]
    fn vertical_plane_jet() {
        let dom = Domain::new([-1.0, 1.0], [-1.0, 1.0]);
        let s = SurfaceHandle::new("x0", dom, |u, v| Jet2 {
            value: [0.0, u, v],
            du: [0.0, 1.0, 0.0],
            dv: [0.0, 0.0, 1.0],
            ..Default::default()
        });
        let j = s.eval_jet2(0.3, -0.2).unwrap();
        assert_eq!(j.du, [0.0, 1.0, 0.0]);
        assert_eq!(j.dv, [0.0, 0.0, 1.0]);
        assert_eq!(j.duu, [0.0; 3]);
        let jac = jacobians(&j);
        assert_eq!((jac.yt, jac.tx, jac.xy), (1.0, 0.0, 0.0));
        assert!(matches!(s.eval_jet2(2.0, 0.0), Err(GeomError::OutOfDomain { .. })));
    }

    #[test]
    fn cone_jet_at_minus_one() {
        let j = cone_jet(-1.0, 0.0);
        assert_eq!(j.value, [-1.0, 0.0, -1.0]);
        assert_eq!(j.du, [1.0, 0.0, 1.0]);
        assert_eq!(j.dv, [0.0, -1.0, 0.0]);
    }

    #[test]
    fn fd_exact_on_linear_and_quadratic() {
        let dom = Domain::new([-2.0, 2.0], [-2.0, 2.0]);
        let lin = |u: f64, v: f64| [2.0 * u - v, 0.5 * v, u + 3.0 * v + 1.0];
        let j = fd_jet2(&lin, &dom, 0.4, -0.3, 1e-3).unwrap();
        assert!((j.du[0] - 2.0).abs() < 1e-8 && (j.dv[2] - 3.0).abs() < 1e-8);
        assert!(j.duu.iter().chain(&j.duv).chain(&j.dvv).all(|c| c.abs() < 1e-8));

        let quad = |u: f64, v: f64| [u * u, u * v, v * v];
        for &(u, v) in &[(0.3, 0.7), (-2.0, 2.0), (1.99999, -1.5)] {
            let j = fd_jet2(&quad, &dom, u, v, 1e-3).unwrap();
            assert!((j.duu[0] - 2.0).abs() < 1e-6, "{:?}", j.duu);
            assert!((j.duv[1] - 1.0).abs() < 1e-6, "{:?}", j.duv);
            assert!((j.dvv[2] - 2.0).abs() < 1e-6, "{:?}", j.dvv);
        }
    }

    #[test]
    fn fd_matches_analytic_cone() {
        let dom = Domain::new([-2.0, -0.25], [0.0, std::f64::consts::TAU]);
        for &(u, v) in &[(-1.0, 0.5), (-0.5, 3.0), (-1.7, 5.9)] {
            let fd = fd_jet2(&cone_value, &dom, u, v, 1e-4).unwrap();
            let (e1, e2) = max_diff(&fd, &cone_jet(u, v));
            assert!(e1 < 1e-6 && e2 < 1e-6, "{e1} {e2}");
        }
    }

    #[test]
    fn fd_converges_quadratically() {
        let dom = Domain::new([-2.0, -0.25], [0.0, 6.0]);
        let (u, v) = (-1.2, 2.3);
        let errs: Vec<f64> = [1e-2, 1e-3]
            .iter()
            .map(|&h| max_diff(&fd_jet2(&cone_value, &dom, u, v, h).unwrap(), &cone_jet(u, v)).0)
            .collect();
        // O(h²): one decade in h buys two decades in error
        let slope = (errs[0] / errs[1]).log10();
        assert!((slope - 2.0).abs() < 0.2, "slope {slope}");
        let e4 = max_diff(&fd_jet2(&cone_value, &dom, u, v, 1e-4).unwrap(), &cone_jet(u, v)).0;
        assert!(e4 < errs[1]);
    }

    #[test]
    fn fd_rejects_outside() {
        let dom = Domain::new([0.0, 1.0], [0.0, 1.0]);
        let f = |u: f64, v: f64| [u, v, 0.0];
        assert!(fd_jet2(&f, &dom, 1.5, 0.5, 1e-4).is_err());
    }

    #[test]
    fn swapping_parameters_negates_jacobians() {
        let j = cone_jet(-0.8, 1.1);
        let swapped = j.compose_affine([[0.0, 1.0], [1.0, 0.0]]);
        let (a, b) = (jacobians(&j), jacobians(&swapped));
        assert_eq!((a.yt, a.tx, a.xy), (-b.yt, -b.tx, -b.xy));
    }

    #[test]
    fn affine_reparametrization_scales_jacobians_by_det() {
        let lin = [[1.3, 0.4], [-0.2, 0.9]];
        let det = lin[0][0] * lin[1][1] - lin[0][1] * lin[1][0];
        let j = cone_jet(-1.3, 0.7);
        let (a, b) = (jacobians(&j), jacobians(&j.compose_affine(lin)));
        for (x, y) in [(a.yt, b.yt), (a.tx, b.tx), (a.xy, b.xy)] {
            assert!((y - det * x).abs() <= 1e-12 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn affine_handle_maps_domain() {
        let dom = Domain::new([-2.0, -0.25], [0.0, 6.0]);
        let cone = SurfaceHandle::new("cone", dom, cone_jet);
        let re = cone.reparametrize_affine(
            [[2.0, 0.0], [0.0, 1.0]],
            [0.0, 0.0],
            Domain::new([-1.0, -0.125], [0.0, 6.0]),
        );
        let p = re.point(-0.5, 1.0).unwrap();
        assert_eq!(p, cone.point(-1.0, 1.0).unwrap());
        // (−0.1, 0) maps to u = −0.2, outside the cone domain
        assert!(matches!(re.eval_jet2(-0.1, 0.0), Err(GeomError::OutOfDomain { .. })));
    }
}
