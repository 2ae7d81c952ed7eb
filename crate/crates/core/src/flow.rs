//! Horizontal flow: leaves of the Legendrian foliation of a surface,
//! horizontality residuals and Carnot–Carathéodory length of sampled curves.
//!
//! Leaves solve `u̇ = β, v̇ = −α` in parameter space. Their pushforward is
//! the unit horizontal field `Jν^h`, so the integration parameter is the
//! horizontal arc length.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::heis::{contact_eval, Point3};
use crate::horizontal::{flow_direction, horizontal_normal, CharThreshold};
use crate::numdiff::derivatives_at;
use crate::patch::SurfaceHandle;

/// Stop rule default: ten times the default characteristic threshold.
pub const STOP_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    DomainExit,
    CharacteristicProximity,
    StepLimit,
}

/// A leaf of the horizontal flow, ordered from the backward end to the
/// forward end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowTrace {
    pub params: Vec<[f64; 2]>,
    pub points: Vec<Point3>,
    /// Horizontal arc length from the first sample.
    pub arc: Vec<f64>,
    /// Index of the seed within the trace.
    pub seed_index: usize,
    pub backward_stop: StopReason,
    pub forward_stop: StopReason,
}

impl FlowTrace {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(arc, point)` pairs, the input of [`horizontality_residual`] and
    /// [`cc_length`].
    pub fn samples(&self) -> Vec<(f64, Point3)> {
        self.arc.iter().copied().zip(self.points.iter().copied()).collect()
    }

    /// Projection of the leaf to the complex plane.
    pub fn projected(&self) -> Vec<[f64; 2]> {
        self.points.iter().map(|p| p.project()).collect()
    }

    /// Stop reason of whichever direction ended first for a non-trivial
    /// cause; `StepLimit` when both ran out of steps.
    pub fn stop_reason(&self) -> StopReason {
        match (self.backward_stop, self.forward_stop) {
            (StopReason::StepLimit, f) => f,
            (b, _) => b,
        }
    }
}

enum Halt {
    Domain,
    Characteristic,
}

/// Unit-speed flow field at `(u, v)` with the stop rules applied.
fn field(s: &SurfaceHandle, u: f64, v: f64, stop: CharThreshold) -> std::result::Result<[f64; 2], Halt> {
    let j = s.eval_jet2(u, v).map_err(|_| Halt::Domain)?;
    if !j.is_finite() {
        return Err(Halt::Domain);
    }
    let eps = stop.eval(&j);
    if horizontal_normal(&j).norm < eps {
        return Err(Halt::Characteristic);
    }
    let d = flow_direction(&j, eps).map_err(|_| Halt::Characteristic)?;
    Ok([d.du, d.dv])
}

/// One classical fourth-order Runge–Kutta step of signed length `h`.
///
/// A stage pointing against the first one means the field flipped across a
/// characteristic curve inside the step.
fn rk4_step(s: &SurfaceHandle, p: [f64; 2], h: f64, stop: CharThreshold) -> std::result::Result<[f64; 2], Halt> {
    let k1 = field(s, p[0], p[1], stop)?;
    let stage = |k: [f64; 2], c: f64| -> std::result::Result<[f64; 2], Halt> {
        let k_next = field(s, p[0] + c * h * k[0], p[1] + c * h * k[1], stop)?;
        if k_next[0] * k1[0] + k_next[1] * k1[1] <= 0.0 {
            return Err(Halt::Characteristic);
        }
        Ok(k_next)
    };
    let k2 = stage(k1, 0.5)?;
    let k3 = stage(k2, 0.5)?;
    let k4 = stage(k3, 1.0)?;
    let next = [
        p[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        p[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ];
    if !s.domain().contains(next[0], next[1]) {
        return Err(Halt::Domain);
    }
    Ok(next)
}

fn trace_one_way(
    s: &SurfaceHandle,
    seed: [f64; 2],
    h: f64,
    max_steps: usize,
    stop: CharThreshold,
) -> (Vec<[f64; 2]>, StopReason) {
    let mut out = Vec::new();
    let mut p = seed;
    for _ in 0..max_steps {
        match rk4_step(s, p, h, stop) {
            Ok(next) => {
                out.push(next);
                p = next;
            }
            Err(Halt::Domain) => return (out, StopReason::DomainExit),
            Err(Halt::Characteristic) => return (out, StopReason::CharacteristicProximity),
        }
    }
    (out, StopReason::StepLimit)
}

/// Integrates the leaf through `(u0, v0)` in both directions with fixed step
/// `ds`, at most `max_steps` per direction.
///
/// Tracing stops at the domain boundary, when `|N^h|` drops below the
/// `stop` threshold, or when the field reverses within a step.
pub fn integrate_flow(
    s: &SurfaceHandle,
    u0: f64,
    v0: f64,
    ds: f64,
    max_steps: usize,
    stop: CharThreshold,
) -> Result<FlowTrace> {
    let j = s.eval_jet2(u0, v0)?;
    let eps = stop.eval(&j);
    flow_direction(&j, eps)?;

    let (mut back, backward_stop) = trace_one_way(s, [u0, v0], -ds, max_steps, stop);
    let (fwd, forward_stop) = trace_one_way(s, [u0, v0], ds, max_steps, stop);
    back.reverse();
    let seed_index = back.len();
    let mut params = back;
    params.push([u0, v0]);
    params.extend(fwd);

    let points = params
        .iter()
        .map(|p| s.point(p[0], p[1]))
        .collect::<Result<Vec<_>>>()?;
    let arc = (0..params.len()).map(|k| k as f64 * ds.abs()).collect();
    Ok(FlowTrace { params, points, arc, seed_index, backward_stop, forward_stop })
}

/// Default flow stop rule, `10 ε_char`.
pub fn default_stop() -> CharThreshold {
    CharThreshold::default().times(STOP_FACTOR)
}

fn check_samples(samples: &[(f64, Point3)]) -> Result<()> {
    if samples.len() < 3 {
        return Err(GeomError::TooFewSamples { needed: 3, got: samples.len() });
    }
    Ok(())
}

/// Derivative of a sampled curve at every sample, by five-point differences.
pub fn sample_velocities(samples: &[(f64, Point3)]) -> Vec<[f64; 3]> {
    let tau: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let comps: Vec<Vec<f64>> = (0..3)
        .map(|c| samples.iter().map(|s| s.1.to_array()[c]).collect())
        .collect();
    (0..samples.len())
        .map(|i| {
            let mut d = [0.0; 3];
            for c in 0..3 {
                d[c] = derivatives_at(&tau, &comps[c], i).0;
            }
            d
        })
        .collect()
}

/// `max |ω(γ̇)|` over the samples of a curve, `γ̇` taken with respect to the
/// sample parameter.
pub fn horizontality_residual(samples: &[(f64, Point3)]) -> Result<f64> {
    check_samples(samples)?;
    let vel = sample_velocities(samples);
    Ok(samples
        .iter()
        .zip(&vel)
        .map(|((_, p), w)| contact_eval(*p, *w).abs())
        .fold(0.0, f64::max))
}

/// Carnot–Carathéodory length `∫ |π̇|` of a horizontal sampled curve.
///
/// Fails with `NotHorizontal` if the horizontality residual exceeds `tol`.
pub fn cc_length(samples: &[(f64, Point3)], tol: f64) -> Result<f64> {
    let residual = horizontality_residual(samples)?;
    if residual > tol {
        return Err(GeomError::NotHorizontal { residual, tol });
    }
    let speed: Vec<f64> = sample_velocities(samples).iter().map(|w| w[0].hypot(w[1])).collect();
    Ok(samples
        .windows(2)
        .zip(speed.windows(2))
        .map(|(s, v)| 0.5 * (s[1].0 - s[0].0) * (v[0] + v[1]))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patch::{Domain, Jet2};
    use std::f64::consts::{PI, TAU};

    fn circle_lift(n: usize, turns: f64) -> Vec<(f64, Point3)> {
        (0..=n)
            .map(|k| {
                let s = turns * TAU * k as f64 / n as f64;
                (s, Point3::new(s.cos(), s.sin(), -2.0 * s))
            })
            .collect()
    }

    fn unit_cylinder() -> SurfaceHandle {
        SurfaceHandle::new("cyl", Domain::new([-10.0, 10.0], [-50.0, 50.0]), |u, v| {
            let (s, c) = u.sin_cos();
            Jet2 {
                value: [c, s, v],
                du: [-s, c, 0.0],
                dv: [0.0, 0.0, 1.0],
                duu: [-c, -s, 0.0],
                ..Default::default()
            }
        })
    }

    #[test]
    fn residual_examples() {
        let vertical: Vec<_> = (0..10).map(|k| (k as f64 * 0.1, Point3::new(0.0, 0.0, k as f64 * 0.1))).collect();
        assert!((horizontality_residual(&vertical).unwrap() - 1.0).abs() < 1e-12);
        assert!(horizontality_residual(&circle_lift(1000, 1.0)).unwrap() <= 1e-8);
        assert!(matches!(
            horizontality_residual(&vertical[..2]),
            Err(GeomError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn cc_length_examples() {
        let len = cc_length(&circle_lift(1000, 1.0), 1e-6).unwrap();
        assert!((len - TAU).abs() < 1e-6, "{len}");

        // lift of the segment from (0.2, −0.1) in direction (0.6, 0.8), length 3
        let (x0, y0) = (0.2, -0.1);
        let seg: Vec<_> = (0..=50)
            .map(|k| {
                let s = 3.0 * k as f64 / 50.0;
                let (x, y) = (x0 + 0.6 * s, y0 + 0.8 * s);
                // ṫ = 2(y ẋ − x ẏ) = 2(0.6 y0 − 0.8 x0) is constant along the line
                (s, Point3::new(x, y, 2.0 * (0.6 * y0 - 0.8 * x0) * s))
            })
            .collect();
        assert!((cc_length(&seg, 1e-8).unwrap() - 3.0).abs() < 1e-8);

        let constant: Vec<_> = (0..5).map(|k| (k as f64, Point3::new(1.0, 2.0, 3.0))).collect();
        assert!(cc_length(&constant, 1e-12).unwrap().abs() < 1e-12);

        let vertical: Vec<_> = (0..10).map(|k| (k as f64, Point3::new(0.0, 0.0, k as f64))).collect();
        assert!(matches!(cc_length(&vertical, 1e-6), Err(GeomError::NotHorizontal { .. })));
    }

    #[test]
    fn cylinder_leaf_is_circle_lift() {
        let s = unit_cylinder();
        let trace = integrate_flow(&s, 0.3, 0.0, 1e-3, 3000, default_stop()).unwrap();
        assert_eq!(trace.stop_reason(), StopReason::StepLimit);
        assert_eq!(trace.len(), 6001);
        for p in &trace.points {
            assert!((p.x.hypot(p.y) - 1.0).abs() < 1e-12);
        }
        let samples = trace.samples();
        assert!(horizontality_residual(&samples).unwrap() <= 1e-6);
        let len = cc_length(&samples, 1e-6).unwrap();
        assert!((len - 6.0).abs() <= 6.0 * 1e-6, "{len}");
        // forward direction runs counterclockwise
        let seed = trace.points[trace.seed_index];
        let next = trace.points[trace.seed_index + 1];
        assert!(seed.x * next.y - seed.y * next.x > 0.0);
    }

    #[test]
    fn leaf_stops_at_domain_edge() {
        let s = SurfaceHandle::new("x0", Domain::new([-1.0, 1.0], [-1.0, 1.0]), |u, v| Jet2 {
            value: [0.0, u, v],
            du: [0.0, 1.0, 0.0],
            dv: [0.0, 0.0, 1.0],
            ..Default::default()
        });
        let trace = integrate_flow(&s, 0.0, 0.5, 0.01, 1000, default_stop()).unwrap();
        assert_eq!(trace.backward_stop, StopReason::DomainExit);
        assert_eq!(trace.forward_stop, StopReason::DomainExit);
        assert!(trace.params.iter().all(|p| (p[1] - 0.5).abs() < 1e-15));
        assert!((199..=201).contains(&trace.len()));
    }

    #[test]
    fn seed_on_locus_is_rejected() {
        let s = SurfaceHandle::new("t0", Domain::new([-1.0, 1.0], [-1.0, 1.0]), |u, v| Jet2 {
            value: [u, v, 0.0],
            du: [1.0, 0.0, 0.0],
            dv: [0.0, 1.0, 0.0],
            ..Default::default()
        });
        assert!(matches!(
            integrate_flow(&s, 0.0, 0.0, 0.01, 10, default_stop()),
            Err(GeomError::CharacteristicPoint { .. })
        ));
        // radial leaves run into the origin
        let trace = integrate_flow(&s, 0.5 * PI.cos() * 0.5, 0.25, 0.01, 1000, default_stop()).unwrap();
        assert_eq!(trace.stop_reason(), StopReason::CharacteristicProximity);
    }
}
