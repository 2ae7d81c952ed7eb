//! Curves and angle fields written as finite sums of monomials and
//! trigonometric terms, so their jets are available in closed form.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// Highest monomial degree accepted in a term.
pub const MAX_DEGREE: i32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermKind {
    Poly,
    Cos,
    Sin,
}

/// `coeff · s^k`, `coeff · cos(m s)` or `coeff · sin(m s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub kind: TermKind,
    pub coeff: f64,
    pub k_or_m: i32,
}

impl Term {
    pub const fn poly(coeff: f64, k: i32) -> Self {
        Self { kind: TermKind::Poly, coeff, k_or_m: k }
    }

    pub const fn cos(coeff: f64, m: i32) -> Self {
        Self { kind: TermKind::Cos, coeff, k_or_m: m }
    }

    pub const fn sin(coeff: f64, m: i32) -> Self {
        Self { kind: TermKind::Sin, coeff, k_or_m: m }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.coeff.is_finite() {
            return Err(GeomError::InvalidSpec(format!("non-finite coefficient in {self:?}")));
        }
        if self.kind == TermKind::Poly && !(0..=MAX_DEGREE).contains(&self.k_or_m) {
            return Err(GeomError::InvalidSpec(format!(
                "monomial degree {} outside 0..={MAX_DEGREE}",
                self.k_or_m
            )));
        }
        Ok(())
    }

    /// Value and first three derivatives at `s`.
    pub fn jet(&self, s: f64) -> [f64; 4] {
        let c = self.coeff;
        match self.kind {
            TermKind::Poly => {
                let k = self.k_or_m;
                let mut out = [0.0; 4];
                let mut factor = 1.0;
                for (n, slot) in out.iter_mut().enumerate() {
                    let p = k - n as i32;
                    if p < 0 {
                        break;
                    }
                    *slot = c * factor * s.powi(p);
                    factor *= p as f64;
                }
                out
            }
            TermKind::Cos | TermKind::Sin => {
                let m = self.k_or_m as f64;
                let (sn, cs) = (m * s).sin_cos();
                let cyc = if self.kind == TermKind::Cos { [cs, -sn, -cs, sn] } else { [sn, cs, -sn, -cs] };
                [c * cyc[0], c * m * cyc[1], c * m * m * cyc[2], c * m * m * m * cyc[3]]
            }
        }
    }
}

/// A sum of [`Term`]s.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Series(pub Vec<Term>);

impl Series {
    pub fn new(terms: Vec<Term>) -> Self {
        Self(terms)
    }

    pub fn constant(c: f64) -> Self {
        Self(vec![Term::poly(c, 0)])
    }

    pub fn validate(&self) -> Result<()> {
        self.0.iter().try_for_each(Term::validate)
    }

    /// Value and first three derivatives.
    pub fn jet(&self, s: f64) -> [f64; 4] {
        self.0.iter().fold([0.0; 4], |mut acc, t| {
            let j = t.jet(s);
            for k in 0..4 {
                acc[k] += j[k];
            }
            acc
        })
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.jet(s)[0]
    }
}

/// Jet of a space curve: `d[n]` is the `n`-th derivative of `(x, y, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveJet {
    pub d: [[f64; 3]; 4],
}

impl CurveJet {
    pub fn pos(&self) -> [f64; 3] {
        self.d[0]
    }

    /// `ṫ − 2(y ẋ − x ẏ)`: zero exactly when the curve is horizontal.
    pub fn horizontality_defect(&self) -> f64 {
        let [x, y, _] = self.d[0];
        let [xd, yd, td] = self.d[1];
        td - 2.0 * (y * xd - x * yd)
    }

    /// Speed of the projection to the plane.
    pub fn planar_speed(&self) -> f64 {
        self.d[1][0].hypot(self.d[1][1])
    }

    /// `ẋ ÿ − ẏ ẍ`.
    pub fn planar_turning(&self) -> f64 {
        self.d[1][0] * self.d[2][1] - self.d[1][1] * self.d[2][0]
    }
}

/// A curve `s ↦ (x(s), y(s), t(s))`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub x: Series,
    pub y: Series,
    #[serde(default)]
    pub t: Series,
}

impl CurveSpec {
    pub fn new(x: Series, y: Series, t: Series) -> Self {
        Self { x, y, t }
    }

    pub fn validate(&self) -> Result<()> {
        self.x.validate()?;
        self.y.validate()?;
        self.t.validate()
    }

    pub fn jet(&self, s: f64) -> CurveJet {
        let (x, y, t) = (self.x.jet(s), self.y.jet(s), self.t.jet(s));
        let mut d = [[0.0; 3]; 4];
        for n in 0..4 {
            d[n] = [x[n], y[n], t[n]];
        }
        CurveJet { d }
    }

    /// Horizontal lift of the unit circle, `(cos s, sin s, −2s)`.
    pub fn unit_circle_lift() -> Self {
        Self::new(
            Series::new(vec![Term::cos(1.0, 1)]),
            Series::new(vec![Term::sin(1.0, 1)]),
            Series::new(vec![Term::poly(-2.0, 1)]),
        )
    }

    /// Circle of radius `r` in the plane `t = 0`, parametrised by angle.
    pub fn circle(r: f64) -> Self {
        Self::new(
            Series::new(vec![Term::cos(r, 1)]),
            Series::new(vec![Term::sin(r, 1)]),
            Series::default(),
        )
    }
}

/// Jet of a unit horizontal direction `a X + b Y`, `a² + b² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionJet {
    /// `a, ȧ, ä`.
    pub a: [f64; 3],
    /// `b, ḃ, b̈`.
    pub b: [f64; 3],
}

impl DirectionJet {
    /// `a ḃ − b ȧ`.
    pub fn turning(&self) -> f64 {
        self.a[0] * self.b[1] - self.b[0] * self.a[1]
    }
}

/// Ruling direction `(cos θ(s), sin θ(s))`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AngleField(pub Series);

impl AngleField {
    pub fn constant(theta: f64) -> Self {
        Self(Series::constant(theta))
    }

    pub fn validate(&self) -> Result<()> {
        self.0.validate()
    }

    pub fn direction(&self, s: f64) -> DirectionJet {
        let [th, th1, th2, _] = self.0.jet(s);
        let (sn, cs) = th.sin_cos();
        DirectionJet {
            a: [cs, -sn * th1, -cs * th1 * th1 - sn * th2],
            b: [sn, cs * th1, -sn * th1 * th1 + cs * th2],
        }
    }
}
