//! Group structure of the first Heisenberg group in global coordinates
//! `(x, y, t)`, with the left-invariant frame
//!
//! ```text
//! X = ∂x + 2y ∂t,   Y = ∂y − 2x ∂t,   T = ∂t
//! ```
//!
//! and the contact form `ω = dt + 2(x dy − y dx)`, whose kernel is spanned
//! by `X` and `Y`.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// A point of the Heisenberg group.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0.0, y: 0.0, t: 0.0 };

    pub const fn new(x: f64, y: f64, t: f64) -> Self {
        Self { x, y, t }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.t]
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.t.is_finite()
    }

    /// Projection to the complex plane `C = {t = 0}`.
    pub fn project(&self) -> [f64; 2] {
        [self.x, self.y]
    }
}

/// A tangent vector `a1 X + a2 Y + a3 T` at `base`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameVector {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub base: Point3,
}

impl FrameVector {
    pub const fn new(a1: f64, a2: f64, a3: f64, base: Point3) -> Self {
        Self { a1, a2, a3, base }
    }

    pub const fn x(base: Point3) -> Self {
        Self::new(1.0, 0.0, 0.0, base)
    }

    pub const fn y(base: Point3) -> Self {
        Self::new(0.0, 1.0, 0.0, base)
    }

    pub const fn t(base: Point3) -> Self {
        Self::new(0.0, 0.0, 1.0, base)
    }

    /// Frame coefficients of a Euclidean tangent vector `w` at `base`.
    pub fn from_euclidean(base: Point3, w: [f64; 3]) -> Self {
        // w = a1 (1,0,2y) + a2 (0,1,−2x) + a3 (0,0,1)
        let a3 = w[2] - 2.0 * base.y * w[0] + 2.0 * base.x * w[1];
        Self::new(w[0], w[1], a3, base)
    }

    /// Horizontal part `a1 X + a2 Y`.
    pub fn horizontal(&self) -> HorizontalVec {
        HorizontalVec::new(self.a1, self.a2, self.base)
    }

    pub fn coeffs(&self) -> [f64; 3] {
        [self.a1, self.a2, self.a3]
    }
}

/// A horizontal vector `h1 X + h2 Y` at `base`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizontalVec {
    pub h1: f64,
    pub h2: f64,
    pub base: Point3,
}

impl HorizontalVec {
    pub const fn new(h1: f64, h2: f64, base: Point3) -> Self {
        Self { h1, h2, base }
    }

    /// Sub-Riemannian norm; `X` and `Y` are orthonormal.
    pub fn norm(&self) -> f64 {
        self.h1.hypot(self.h2)
    }

    pub fn dot(&self, other: &HorizontalVec) -> Result<f64> {
        if self.base != other.base {
            return Err(GeomError::BaseMismatch);
        }
        Ok(self.h1 * other.h1 + self.h2 * other.h2)
    }

    pub fn to_frame(&self) -> FrameVector {
        FrameVector::new(self.h1, self.h2, 0.0, self.base)
    }
}

/// `(x, y, t) * (x', y', t') = (x + x', y + y', t + t' + 2(y x' − x y'))`.
pub fn group_mul(p: Point3, q: Point3) -> Point3 {
    Point3::new(
        p.x + q.x,
        p.y + q.y,
        p.t + q.t + 2.0 * (p.y * q.x - p.x * q.y),
    )
}

pub fn group_inv(p: Point3) -> Point3 {
    Point3::new(-p.x, -p.y, -p.t)
}

/// Korányi gauge `((x² + y²)² + t²)^{1/4}`.
pub fn koranyi_gauge(p: Point3) -> f64 {
    let r2 = p.x * p.x + p.y * p.y;
    r2.hypot(p.t).sqrt()
}

/// Korányi–Cygan distance `|p⁻¹ * q|`.
pub fn kc_distance(p: Point3, q: Point3) -> f64 {
    koranyi_gauge(group_mul(group_inv(p), q))
}

/// Euclidean components of a frame vector.
pub fn frame_to_euclidean(v: &FrameVector) -> [f64; 3] {
    let FrameVector { a1, a2, a3, base } = *v;
    [a1, a2, a3 + 2.0 * base.y * a1 - 2.0 * base.x * a2]
}

/// `ω_p(w) = w_t + 2x w_y − 2y w_x` for a Euclidean tangent vector `w`.
pub fn contact_eval(p: Point3, w: [f64; 3]) -> f64 {
    w[2] + 2.0 * p.x * w[1] - 2.0 * p.y * w[0]
}

/// Formal cross product in the `{X, Y, T}` frame.
///
/// Satisfies `X ∧ Y = T`, `Y ∧ T = X`, `T ∧ X = Y`.
pub fn h_wedge(a: &FrameVector, b: &FrameVector) -> Result<FrameVector> {
    if a.base != b.base {
        return Err(GeomError::BaseMismatch);
    }
    Ok(FrameVector::new(
        a.a2 * b.a3 - a.a3 * b.a2,
        a.a3 * b.a1 - a.a1 * b.a3,
        a.a1 * b.a2 - a.a2 * b.a1,
        a.base,
    ))
}

/// Complex structure on the horizontal bundle: `JX = Y`, `JY = −X`.
pub fn j_rotate(v: &HorizontalVec) -> HorizontalVec {
    HorizontalVec::new(-v.h2, v.h1, v.base)
}
