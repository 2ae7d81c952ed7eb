//! Horizontal mean curvature `H^h = X ν1 + Y ν2`.
//!
//! Two independent routes are provided. The local route works in one patch
//! from the parameter derivatives of `ν^h`:
//!
//! ```text
//! H^h = (∂(ν1, y) + ∂(x, ν2)) / ∂(x, y)
//! ```
//!
//! and, where `∂(x, y)` vanishes, from the derivative of `ν^h` along the
//! flow direction, `H^h = ν1 Jν(ν2) − ν2 Jν(ν1)`. Both expressions agree
//! wherever `∂(x, y) ≠ 0`. The oracle route integrates the leaf of the
//! horizontal flow, projects it to the plane and measures the signed
//! curvature of the projection.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::flow::{integrate_flow, FlowTrace};
use crate::horizontal::{
    horizontal_normal, induced_form, normal_gradient, unit_horizontal_normal, CharThreshold,
};
use crate::numdiff::{derivatives_at, fornberg_weights};
use crate::patch::{Jet2, SurfaceHandle, X, Y};

/// Switch between the Jacobian quotient and the flow-direction form.
pub const EPS_J: f64 = 1e-10;

/// Full-accuracy claims need `|N^h|` at least this multiple of `ε_char`.
pub const NEAR_CHAR_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurvatureMethod {
    /// `(∂(ν1, y) + ∂(x, ν2)) / ∂(x, y)`.
    LocalFormula,
    /// `ν1 Jν(ν2) − ν2 Jν(ν1)`, used where `|∂(x, y)| < ε_J`.
    FlowDirection,
    /// Signed curvature of the projected flow leaf.
    FlowOracle,
}

/// How the parameter derivatives of `ν^h` are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NuDerivatives {
    /// Chain rule through the second partials of the jet.
    #[default]
    Exact,
    /// Central differences of `ν^h` with step `1e-5 · span` per axis.
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureOptions {
    pub eps_char: CharThreshold,
    pub eps_j: f64,
    pub nu_derivatives: NuDerivatives,
}

impl Default for CurvatureOptions {
    fn default() -> Self {
        Self { eps_char: CharThreshold::default(), eps_j: EPS_J, nu_derivatives: NuDerivatives::Exact }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureSample {
    pub u: f64,
    pub v: f64,
    pub h: f64,
    pub method: CurvatureMethod,
    /// `|N^h|` at the sample.
    pub normal_norm: f64,
    /// `|N^h| < 100 ε_char`: the value is computed but poorly conditioned.
    pub near_characteristic: bool,
}

/// `ν^h` and its parameter gradient `[[ν1_u, ν1_v], [ν2_u, ν2_v]]`.
fn nu_with_gradient_exact(j: &Jet2, eps: f64) -> Result<([f64; 2], [[f64; 2]; 2])> {
    let nu = unit_horizontal_normal(j, eps)?;
    let norm = horizontal_normal(j).norm;
    let g = normal_gradient(j);
    let nu = [nu.h1, nu.h2];
    let mut grad = [[0.0; 2]; 2];
    for d in 0..2 {
        // derivative of N/|N|: (N' − ν (ν·N')) / |N|
        let proj = nu[0] * g[0][d] + nu[1] * g[1][d];
        for c in 0..2 {
            grad[c][d] = (g[c][d] - nu[c] * proj) / norm;
        }
    }
    Ok((nu, grad))
}

fn nu_at(s: &SurfaceHandle, u: f64, v: f64, eps_char: CharThreshold) -> Result<[f64; 2]> {
    let j = s.eval_jet2(u, v)?;
    let nu = unit_horizontal_normal(&j, eps_char.eval(&j))?;
    Ok([nu.h1, nu.h2])
}

/// Derivative along one axis: central where it fits, else one-sided.
fn axis_derivative(
    x: f64,
    range: [f64; 2],
    h: f64,
    f: impl Fn(f64) -> Result<[f64; 2]>,
) -> Result<[f64; 2]> {
    let nodes: Vec<f64> = if x - h >= range[0] && x + h <= range[1] {
        vec![x - h, x, x + h]
    } else if x + 2.0 * h <= range[1] {
        vec![x, x + h, x + 2.0 * h]
    } else {
        vec![x - 2.0 * h, x - h, x]
    };
    let w = fornberg_weights(x, &nodes, 1);
    let mut d = [0.0; 2];
    for (k, &node) in nodes.iter().enumerate() {
        if w[1][k] == 0.0 {
            continue;
        }
        let val = f(node)?;
        d[0] += w[1][k] * val[0];
        d[1] += w[1][k] * val[1];
    }
    Ok(d)
}

fn nu_with_gradient_fd(
    s: &SurfaceHandle,
    u: f64,
    v: f64,
    eps_char: CharThreshold,
) -> Result<([f64; 2], [[f64; 2]; 2])> {
    let dom = s.domain();
    let nu = nu_at(s, u, v, eps_char)?;
    let du = axis_derivative(u, dom.u, 1e-5 * dom.u_span(), |x| nu_at(s, x, v, eps_char))?;
    let dv = axis_derivative(v, dom.v, 1e-5 * dom.v_span(), |y| nu_at(s, u, y, eps_char))?;
    Ok((nu, [[du[0], dv[0]], [du[1], dv[1]]]))
}

/// `H^h` from `ν^h` and its parameter gradient at a jet.
fn curvature_from_gradient(
    j: &Jet2,
    nu: [f64; 2],
    grad: [[f64; 2]; 2],
    eps_j: f64,
) -> (f64, CurvatureMethod) {
    let d = j.jac(X, Y);
    if d.abs() >= eps_j {
        // ∂(ν1, y) + ∂(x, ν2)
        let num = grad[0][0] * j.dv[Y] - grad[0][1] * j.du[Y] + j.du[X] * grad[1][1]
            - j.dv[X] * grad[1][0];
        (num / d, CurvatureMethod::LocalFormula)
    } else {
        let norm = horizontal_normal(j).norm;
        let form = induced_form(j);
        let (alpha, beta) = (form.p_u / norm, form.p_v / norm);
        let along = |c: usize| beta * grad[c][0] - alpha * grad[c][1];
        (nu[0] * along(1) - nu[1] * along(0), CurvatureMethod::FlowDirection)
    }
}

/// Local horizontal mean curvature from an analytic jet (chain-rule path).
pub fn mean_curvature_jet(j: &Jet2, eps_char: f64, eps_j: f64) -> Result<f64> {
    let (nu, grad) = nu_with_gradient_exact(j, eps_char)?;
    Ok(curvature_from_gradient(j, nu, grad, eps_j).0)
}

const ROUNDOFF_PROBES: u64 = 4;

/// An H-minimality claim is checked at a node only if `tol` exceeds this
/// multiple of the node's [`curvature_roundoff`].
pub const ROUNDOFF_MARGIN: f64 = 10.0;

/// `j` with every entry scaled by `1 ± ε_mach`, signs drawn from `pattern`.
fn ulp_perturbed(j: &Jet2, pattern: u64) -> Jet2 {
    let mut out = *j;
    let mut k = 0u64;
    for arr in [&mut out.value, &mut out.du, &mut out.dv, &mut out.duu, &mut out.duv, &mut out.dvv] {
        for c in arr.iter_mut() {
            let mut z = ((pattern << 8) | k).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            z ^= z >> 29;
            z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
            *c *= if z >> 63 == 1 { 1.0 + f64::EPSILON } else { 1.0 - f64::EPSILON };
            k += 1;
        }
    }
    out
}

/// Roundoff floor of [`mean_curvature_jet`]: the largest change of `H^h`
/// under relative perturbations of the jet by one machine epsilon.
///
/// Near the characteristic locus the direction of `N^h` is only known to
/// about `ε_mach / |N^h|`, and differentiating `ν^h` amplifies this again,
/// so the floor grows like `|N^h|⁻²`.
pub fn curvature_roundoff(j: &Jet2, eps_char: f64, eps_j: f64) -> Result<f64> {
    let h0 = mean_curvature_jet(j, eps_char, eps_j)?;
    let mut spread = 0.0f64;
    for p in 0..ROUNDOFF_PROBES {
        let h = mean_curvature_jet(&ulp_perturbed(j, p), eps_char, eps_j)?;
        spread = spread.max((h - h0).abs());
    }
    Ok(spread)
}

/// Horizontal mean curvature at `(u, v)` by the local route.
pub fn mean_curvature_local(
    s: &SurfaceHandle,
    u: f64,
    v: f64,
    opts: &CurvatureOptions,
) -> Result<CurvatureSample> {
    let j = s.eval_jet2(u, v)?;
    let eps = opts.eps_char.eval(&j);
    let normal_norm = horizontal_normal(&j).norm;
    let (nu, grad) = match opts.nu_derivatives {
        NuDerivatives::Exact => nu_with_gradient_exact(&j, eps)?,
        NuDerivatives::FiniteDifference => nu_with_gradient_fd(s, u, v, opts.eps_char)?,
    };
    let (h, method) = curvature_from_gradient(&j, nu, grad, opts.eps_j);
    Ok(CurvatureSample {
        u,
        v,
        h,
        method,
        normal_norm,
        near_characteristic: normal_norm < NEAR_CHAR_FACTOR * eps,
    })
}

/// Signed curvature `(ẋ ÿ − ẏ ẍ) / (ẋ² + ẏ²)^{3/2}` of a plane curve;
/// positive for counterclockwise turning.
pub fn signed_curvature_plane(d1: [f64; 2], d2: [f64; 2]) -> Result<f64> {
    let speed2 = d1[0] * d1[0] + d1[1] * d1[1];
    if !(speed2 > 0.0) {
        return Err(GeomError::ZeroSpeed);
    }
    Ok((d1[0] * d2[1] - d1[1] * d2[0]) / (speed2 * speed2.sqrt()))
}

/// Signed curvature of the projection of a leaf at sample `i`.
pub fn projected_curvature_at(trace: &FlowTrace, i: usize) -> Result<f64> {
    let xs: Vec<f64> = trace.points.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = trace.points.iter().map(|p| p.y).collect();
    let (x1, x2) = derivatives_at(&trace.arc, &xs, i);
    let (y1, y2) = derivatives_at(&trace.arc, &ys, i);
    signed_curvature_plane([x1, y1], [x2, y2])
}

/// Horizontal mean curvature at `(u, v)` as the signed curvature of the
/// projected flow leaf, traced `n_steps` of length `ds` each way.
pub fn mean_curvature_flow_oracle(
    s: &SurfaceHandle,
    u: f64,
    v: f64,
    ds: f64,
    n_steps: usize,
    eps_char: CharThreshold,
) -> Result<CurvatureSample> {
    let j = s.eval_jet2(u, v)?;
    let eps = eps_char.eval(&j);
    let normal_norm = horizontal_normal(&j).norm;
    let trace = integrate_flow(s, u, v, ds, n_steps, eps_char.times(crate::flow::STOP_FACTOR))?;
    if trace.len() < 5 {
        return Err(GeomError::FlowEscapedDomain);
    }
    let h = projected_curvature_at(&trace, trace.seed_index)?;
    Ok(CurvatureSample {
        u,
        v,
        h,
        method: CurvatureMethod::FlowOracle,
        normal_norm,
        near_characteristic: normal_norm < NEAR_CHAR_FACTOR * eps,
    })
}

/// Outcome of an H-minimality scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HMinimalReport {
    pub grid: [usize; 2],
    pub tol: f64,
    pub evaluated: usize,
    pub skipped_characteristic: usize,
    pub skipped_near_characteristic: usize,
    /// Nodes whose roundoff floor cannot resolve `tol`.
    pub skipped_ill_conditioned: usize,
    pub max_abs_h: f64,
    /// `(u, v)` where `max_abs_h` is attained.
    pub argmax: Option<[f64; 2]>,
    pub pass: bool,
}

/// Scans a `nu × nv` lattice over the closed domain and compares `max |H^h|`
/// with `tol`. Characteristic and near-characteristic nodes are skipped, and
/// so are nodes where `ROUNDOFF_MARGIN` times the roundoff floor of `H^h`
/// exceeds `tol`.
pub fn is_h_minimal(
    s: &SurfaceHandle,
    grid: [usize; 2],
    tol: f64,
    opts: &CurvatureOptions,
) -> HMinimalReport {
    let dom = s.domain();
    let samples: Vec<Option<(CurvatureSample, bool)>> = (0..grid[0] * grid[1])
        .into_par_iter()
        .map(|k| {
            let (u, v) = dom.lattice(grid[0], grid[1], k / grid[1], k % grid[1]);
            let c = mean_curvature_local(s, u, v, opts).ok()?;
            let j = s.eval_jet2(u, v).ok()?;
            let floor = curvature_roundoff(&j, opts.eps_char.eval(&j), opts.eps_j).unwrap_or(f64::INFINITY);
            Some((c, ROUNDOFF_MARGIN * floor > tol))
        })
        .collect();
    let mut report = HMinimalReport {
        grid,
        tol,
        evaluated: 0,
        skipped_characteristic: 0,
        skipped_near_characteristic: 0,
        skipped_ill_conditioned: 0,
        max_abs_h: 0.0,
        argmax: None,
        pass: true,
    };
    for sample in samples {
        match sample {
            None => report.skipped_characteristic += 1,
            Some((c, _)) if c.near_characteristic => report.skipped_near_characteristic += 1,
            Some((_, true)) => report.skipped_ill_conditioned += 1,
            Some((c, false)) => {
                report.evaluated += 1;
                if !(c.h.abs() <= report.max_abs_h) {
                    report.max_abs_h = c.h.abs();
                    report.argmax = Some([c.u, c.v]);
                }
            }
        }
    }
    report.pass = report.max_abs_h <= tol;
    report
}
