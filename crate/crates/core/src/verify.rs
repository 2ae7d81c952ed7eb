//! Verification suites: numerical checks with their worst observed error.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::builders::catalog::{catalog_get, catalog_get_on, paraboloid_spec, CATALOG_NAMES, H_MINIMAL_NAMES};
use crate::builders::curve::{AngleField, CurveSpec, Series, Term};
use crate::builders::ruled::{build_straight_ruled, eval_eta, pullback_residual, ruled_jet, RuledSpec};
use crate::builders::surfaces::{check_developable_curve, build_tangent_developable};
use crate::curvature::{
    is_h_minimal, mean_curvature_flow_oracle, mean_curvature_jet, mean_curvature_local, CurvatureOptions, EPS_J,
    NEAR_CHAR_FACTOR,
};
use crate::error::GeomError;
use crate::flow::{default_stop, integrate_flow};
use crate::heis::{
    contact_eval, frame_to_euclidean, group_mul, h_wedge, kc_distance, FrameVector, Point3,
};
use crate::horizontal::{
    flow_direction, horizontal_normal, induced_form, normal_compatibility, pushforward, unit_horizontal_normal,
    CharThreshold,
};
use crate::locus::{find_locus, DEFAULT_REFINE};
use crate::numdiff::derivatives_at;
use crate::patch::{Domain, Jet2, SurfaceHandle};
use crate::rng::Lcg64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Core,
    Examples,
    Minimal,
    All,
}

impl FromStr for Suite {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self, GeomError> {
        match s {
            "core" => Ok(Suite::Core),
            "examples" => Ok(Suite::Examples),
            "minimal" => Ok(Suite::Minimal),
            "all" => Ok(Suite::All),
            _ => Err(GeomError::InvalidSpec(format!("unknown suite `{s}`"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Suite::Core => "core",
            Suite::Examples => "examples",
            Suite::Minimal => "minimal",
            Suite::All => "all",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Worst observed error, or the relevant extreme statistic.
    pub max_error: f64,
    pub tol: f64,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn new(name: &str, max_error: f64, tol: f64, samples: usize) -> Self {
        Self { name: name.into(), pass: max_error <= tol, max_error, tol, samples, note: None }
    }

    fn failed(name: &str, note: String) -> Self {
        Self { name: name.into(), pass: false, max_error: f64::NAN, tol: 0.0, samples: 0, note: Some(note) }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    fn require(mut self, ok: bool, why: &str) -> Self {
        if !ok {
            self.pass = false;
            self.note = Some(why.into());
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<Check>,
}

/// Runs a suite. Random draws come from [`Lcg64`] seeded with `seed`.
pub fn run_suite(suite: Suite, seed: u64) -> VerifyReport {
    let mut checks = Vec::new();
    if matches!(suite, Suite::Core | Suite::All) {
        checks.extend(core_checks(seed));
    }
    if matches!(suite, Suite::Examples | Suite::All) {
        checks.extend(example_checks(seed));
    }
    if matches!(suite, Suite::Minimal | Suite::All) {
        checks.extend(minimal_checks(seed));
    }
    let pass = checks.iter().all(|c| c.pass);
    VerifyReport { suite, seed, pass, checks }
}

pub const CORE_SAMPLES: usize = 10_000;

fn max_abs(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |m, x| if x.abs() > m || x.is_nan() { x.abs() } else { m })
}

fn random_point(r: &mut Lcg64, scale: f64) -> Point3 {
    Point3::new(r.uniform(-scale, scale), r.uniform(-scale, scale), r.uniform(-scale, scale))
}

/// Jet of a random quadratic map `(u, v) ↦ (x, y, t)` at a random point.
pub fn random_quadratic_jet(r: &mut Lcg64) -> Jet2 {
    let mut jet = Jet2::default();
    let (u, v) = (r.uniform(-1.0, 1.0), r.uniform(-1.0, 1.0));
    for k in 0..3 {
        let c: Vec<f64> = (0..6).map(|_| r.uniform(-1.0, 1.0)).collect();
        jet.value[k] = c[0] + c[1] * u + c[2] * v + c[3] * u * u + c[4] * u * v + c[5] * v * v;
        jet.du[k] = c[1] + 2.0 * c[3] * u + c[4] * v;
        jet.dv[k] = c[2] + c[4] * u + 2.0 * c[5] * v;
        jet.duu[k] = 2.0 * c[3];
        jet.duv[k] = c[4];
        jet.dvv[k] = 2.0 * c[5];
    }
    jet
}

/// Group, frame, contact and normal identities over random samples.
pub fn core_checks(seed: u64) -> Vec<Check> {
    let mut r = Lcg64::new(seed);
    let n = CORE_SAMPLES;
    let mut assoc = 0.0f64;
    let mut invariance = 0.0f64;
    let mut contact = 0.0f64;
    for _ in 0..n {
        let (p, q, g) = (random_point(&mut r, 2.0), random_point(&mut r, 2.0), random_point(&mut r, 2.0));
        let a = group_mul(group_mul(p, q), g).to_array();
        let b = group_mul(p, group_mul(q, g)).to_array();
        assoc = assoc.max(max_abs((0..3).map(|k| (a[k] - b[k]) / (1.0 + b[k].abs()))));
        let (d0, d1) = (kc_distance(p, q), kc_distance(group_mul(g, p), group_mul(g, q)));
        invariance = invariance.max((d1 - d0).abs() / (1.0 + d0));
        for w in [FrameVector::x(p), FrameVector::y(p)] {
            contact = contact.max(contact_eval(p, frame_to_euclidean(&w)).abs() / (1.0 + p.x.abs() + p.y.abs()));
        }
    }
    let o = Point3::new(0.3, -1.2, 0.7);
    let wedge = |a: FrameVector, b: FrameVector| h_wedge(&a, &b).map(|w| w.coeffs()).unwrap_or([f64::NAN; 3]);
    let clock = [
        (wedge(FrameVector::x(o), FrameVector::y(o)), [0.0, 0.0, 1.0]),
        (wedge(FrameVector::y(o), FrameVector::t(o)), [1.0, 0.0, 0.0]),
        (wedge(FrameVector::t(o), FrameVector::x(o)), [0.0, 1.0, 0.0]),
    ];
    let clock_err = max_abs(clock.iter().flat_map(|(got, want)| (0..3).map(move |k| got[k] - want[k])));

    let mut compat = 0.0f64;
    let mut kernel = 0.0f64;
    let mut j_nu = 0.0f64;
    let mut reparam_nu = 0.0f64;
    let mut reparam_h = 0.0f64;
    let mut used = 0;
    let opts = CurvatureOptions::default();
    for _ in 0..n {
        let j = random_quadratic_jet(&mut r);
        let nh = horizontal_normal(&j);
        let sq = nh.n1 * nh.n1 + nh.n2 * nh.n2;
        compat = compat.max((normal_compatibility(&j) - sq).abs() / (1.0 + sq));
        let eps = opts.eps_char.eval(&j);
        if nh.norm < NEAR_CHAR_FACTOR * eps * 1e3 || j.regularity() < 1e-3 {
            continue;
        }
        used += 1;
        let Ok(dir) = flow_direction(&j, eps) else { continue };
        let f = induced_form(&j);
        kernel = kernel.max(f.apply(dir.du, dir.dv).abs() / (f.p_u.abs() + f.p_v.abs()));
        let push = pushforward(&j, dir.du, dir.dv);
        if let Ok(nu) = unit_horizontal_normal(&j, eps) {
            j_nu = j_nu.max((push.a1 + nu.h2).abs().max((push.a2 - nu.h1).abs()).max(push.a3.abs()));
        }
        // orientation-preserving and reversing linear changes of parameter
        let mut lin = [[r.uniform(-2.0, 2.0), r.uniform(-2.0, 2.0)], [r.uniform(-2.0, 2.0), r.uniform(-2.0, 2.0)]];
        let det = lin[0][0] * lin[1][1] - lin[0][1] * lin[1][0];
        if det.abs() < 0.1 {
            lin = [[1.0, 0.5], [0.0, -1.0]];
        }
        let det = lin[0][0] * lin[1][1] - lin[0][1] * lin[1][0];
        let k = j.compose_affine(lin);
        let sign = det.signum();
        let (nu0, nu1) = (unit_horizontal_normal(&j, eps), unit_horizontal_normal(&k, opts.eps_char.eval(&k)));
        let (h0, h1) = (mean_curvature_jet(&j, eps, EPS_J), mean_curvature_jet(&k, opts.eps_char.eval(&k), EPS_J));
        match (nu0, nu1, h0, h1) {
            (Ok(a), Ok(b), Ok(h0), Ok(h1)) => {
                reparam_nu = reparam_nu.max((a.h1 * sign - b.h1).abs().max((a.h2 * sign - b.h2).abs()));
                reparam_h = reparam_h.max((h0 * sign - h1).abs() / (1.0 + h0.abs()));
            }
            _ => reparam_nu = f64::NAN,
        }
    }
    vec![
        Check::new("core/group-associativity", assoc, 1e-14, n),
        Check::new("core/left-invariance", invariance, 1e-12, n),
        Check::new("core/contact-kills-frame", contact, 1e-14, 2 * n),
        Check::new("core/clock-rule", clock_err, 0.0, 3),
        Check::new("core/normal-compatibility", compat, 1e-12, n),
        Check::new("core/form-kills-flow", kernel, 1e-12, used),
        Check::new("core/flow-is-j-nu", j_nu, 1e-10, used),
        Check::new("core/reparam-nu", reparam_nu, 1e-10, used),
        Check::new("core/reparam-h", reparam_h, 1e-8, used),
    ]
}

fn cone_closed_form(u: f64, v: f64) -> (f64, [f64; 2]) {
    let w = (1.0 + 4.0 * u * u).sqrt();
    let (s, c) = v.sin_cos();
    (1.0 / (u * w * w * w), [(c - 2.0 * u * s) / w, (s + 2.0 * u * c) / w])
}

/// Closed-form example surfaces.
pub fn example_checks(seed: u64) -> Vec<Check> {
    let opts = CurvatureOptions::default();
    let mut out = Vec::new();

    let grid = 101;
    let mut cyl = 0.0f64;
    for radius in [0.5, 1.0, 2.0, 5.0] {
        let s = catalog_get(&format!("cylinder({radius})")).expect("catalog cylinder");
        let dom = s.domain();
        for i in 0..grid {
            for j in 0..grid {
                let (u, v) = dom.lattice(grid, grid, i, j);
                cyl = cyl.max(match mean_curvature_local(&s, u, v, &opts) {
                    Ok(c) => (c.h - 1.0 / radius).abs(),
                    Err(_) => f64::INFINITY,
                });
            }
        }
    }
    out.push(Check::new("examples/cylinder-curvature", cyl, 1e-10, 4 * grid * grid));

    let cone = catalog_get_on("cone_lower", Domain::new([-2.0, -0.5], [0.0, TAU])).expect("cone");
    let (mut cone_h, mut cone_nu) = (0.0f64, 0.0f64);
    for i in 0..grid {
        for j in 0..grid {
            let (u, v) = cone.domain().lattice(grid, grid, i, j);
            let (h, nu) = cone_closed_form(u, v);
            let jet = cone.eval_jet2(u, v).expect("cone jet");
            match (mean_curvature_local(&cone, u, v, &opts), unit_horizontal_normal(&jet, opts.eps_char.eval(&jet))) {
                (Ok(c), Ok(n)) => {
                    cone_h = cone_h.max((c.h - h).abs());
                    cone_nu = cone_nu.max((n.h1 - nu[0]).abs().max((n.h2 - nu[1]).abs()));
                }
                _ => cone_h = f64::INFINITY,
            }
        }
    }
    out.push(Check::new("examples/cone-curvature", cone_h, 1e-10, grid * grid));
    out.push(Check::new("examples/cone-normal", cone_nu, 1e-10, grid * grid));

    let para = catalog_get("paraboloid").expect("paraboloid");
    let locus = find_locus(&para, [50, 50], DEFAULT_REFINE);
    let off = max_abs(locus.points().map(|p| p.point.x + p.point.y));
    out.push(
        Check::new("examples/paraboloid-locus", off, 1e-6, locus.len()).require(!locus.is_empty(), "no locus found"),
    );
    let mut para_h = 0.0f64;
    let mut used = 0;
    for i in 0..grid {
        for j in 0..grid {
            let (u, v) = para.domain().lattice(grid, grid, i, j);
            let jet = para.eval_jet2(u, v).expect("paraboloid jet");
            if horizontal_normal(&jet).norm >= 1e-4 {
                used += 1;
                para_h = para_h.max(mean_curvature_local(&para, u, v, &opts).map_or(f64::INFINITY, |c| c.h.abs()));
            }
        }
    }
    out.push(Check::new("examples/paraboloid-minimal", para_h, 1e-8, used));

    out.push(ruled_form_identity(seed));
    out.extend(contact_factor_checks(seed));
    out.extend(developable_checks());
    out
}

/// Random straight ruled spec over `[-1, 1]²`. With `turning` the ruling
/// angle moves at rate at least 0.3.
pub fn random_ruled_spec(r: &mut Lcg64, turning: bool) -> RuledSpec {
    let series = |r: &mut Lcg64| {
        let mut terms = vec![Term::poly(r.uniform(-1.0, 1.0), r.int(0, 3)), Term::poly(r.uniform(-1.0, 1.0), 1)];
        let m = r.int(1, 2);
        terms.push(if r.next_f64() < 0.5 { Term::cos(r.uniform(-0.5, 0.5), m) } else { Term::sin(r.uniform(-0.5, 0.5), m) });
        Series::new(terms)
    };
    let curve = CurveSpec::new(series(r), series(r), series(r));
    let rate = if turning {
        let m = r.uniform(0.3, 1.0);
        if r.next_f64() < 0.5 { -m } else { m }
    } else {
        r.uniform(-1.0, 1.0)
    };
    let theta = AngleField(Series::new(vec![
        Term::poly(r.uniform(0.0, TAU), 0),
        Term::poly(rate, 1),
        Term::sin(r.uniform(-0.2, 0.2), r.int(1, 2)),
    ]));
    RuledSpec { curve, theta, s_range: [-1.0, 1.0], v_range: [-1.0, 1.0] }
}

/// Draws until a spec builds; returns the spec, its handle and the number
/// of rejected draws.
pub fn draw_ruled(r: &mut Lcg64, turning: bool) -> (RuledSpec, SurfaceHandle, usize) {
    let mut rejected = 0;
    loop {
        let spec = random_ruled_spec(r, turning);
        match build_straight_ruled(&spec) {
            Ok(h) => return (spec, h, rejected),
            Err(_) => rejected += 1,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// `(p_s, p_v) = (η, 0)` and `|N^h| = |η|` for ruled patches.
pub fn ruled_form_identity(seed: u64) -> Check {
    let mut r = Lcg64::new(seed ^ 0x7);
    let mut worst = 0.0f64;
    let mut specs: Vec<RuledSpec> = vec![paraboloid_spec()];
    specs.extend((0..99).map(|_| draw_ruled(&mut r, false).0));
    let per = 100;
    for spec in &specs {
        for _ in 0..per {
            let (s, v) = (r.uniform(-1.0, 1.0), r.uniform(-1.0, 1.0));
            let j = ruled_jet(&spec.curve.jet(s), &spec.theta.direction(s), v);
            let eta = eval_eta(spec, s, v);
            let f = induced_form(&j);
            let n = horizontal_normal(&j).norm;
            worst = worst.max(rel(f.p_u, eta)).max(rel(f.p_v, 0.0)).max(rel(n, eta.abs()));
        }
    }
    Check::new("examples/ruled-form-identity", worst, 1e-10, specs.len() * per)
}

/// Contactomorphism factor to the plane patch, and the coordinate-plane map.
pub fn contact_factor_checks(seed: u64) -> Vec<Check> {
    let mut r = Lcg64::new(seed ^ 0x8);
    let mut worst = 0.0f64;
    let mut used = 0;
    let mut specs = vec![RuledSpec {
        curve: CurveSpec::unit_circle_lift(),
        theta: AngleField(Series::new(vec![Term::poly(1.0, 1)])),
        s_range: [0.0, 6.0],
        v_range: [-1.0, 1.0],
    }];
    specs.extend((0..19).map(|_| draw_ruled(&mut r, true).0));
    for spec in &specs {
        for _ in 0..50 {
            let s = r.uniform(spec.s_range[0], spec.s_range[1]);
            let v = r.uniform(spec.v_range[0], spec.v_range[1]);
            match pullback_residual(spec, s, v) {
                Ok(res) => {
                    used += 1;
                    worst = worst.max(res);
                }
                Err(GeomError::CharacteristicPoint { .. }) => {}
                Err(e) => return vec![Check::failed("examples/contact-factor", e.to_string())],
            }
        }
    }
    let lambda = Check::new("examples/contact-factor", worst, 1e-10, used);

    // (0, u, v) ↦ (u v, u, 0) pulls ω back to −2u² dv; ω on the plane is dv
    let plane = catalog_get("vertical_plane_x0").expect("plane");
    let target = SurfaceHandle::new("t0-image", plane.domain(), |u, v| Jet2 {
        value: [u * v, u, 0.0],
        du: [v, 1.0, 0.0],
        dv: [u, 0.0, 0.0],
        duv: [1.0, 0.0, 0.0],
        ..Default::default()
    });
    let mut ratio_err = 0.0f64;
    let mut n = 0;
    for _ in 0..1000 {
        let (u, v) = (r.uniform(-1.0, 1.0), r.uniform(-1.0, 1.0));
        if u.abs() < 1e-3 {
            continue;
        }
        n += 1;
        let w = induced_form(&plane.eval_jet2(u, v).expect("plane"));
        let wt = induced_form(&target.eval_jet2(u, v).expect("target"));
        ratio_err = ratio_err.max((wt.p_v / w.p_v + 2.0 * u * u).abs()).max(wt.p_u.abs());
    }
    vec![lambda, Check::new("examples/plane-map-ratio", ratio_err, 1e-10, n)]
}

/// Tangent developable of the unit-circle lift.
pub fn developable_checks() -> Vec<Check> {
    let curve = CurveSpec::unit_circle_lift();
    let facts = check_developable_curve(&curve, [0.0, TAU]);
    let kappa = Check::new("examples/developable-curve", (facts.min_kappa - 1.0).abs(), 1e-10, 1)
        .require(facts.max_horizontality_defect <= 1e-10, "not horizontal")
        .require(facts.max_speed_deviation <= 1e-10, "not unit speed");
    let minimal = match build_tangent_developable(&curve, [0.0, TAU], [0.2, 1.5]) {
        Ok(s) => {
            let rep = is_h_minimal(&s, [101, 101], 1e-8, &CurvatureOptions::default());
            Check::new("examples/developable-minimal", rep.max_abs_h, 1e-8, rep.evaluated)
                .require(rep.skipped_characteristic == 0, "unexpected characteristic points")
        }
        Err(e) => Check::failed("examples/developable-minimal", e.to_string()),
    };
    vec![kappa, minimal]
}

/// Random ruled surfaces, straight leaves and the flow-curvature oracle.
pub fn minimal_checks(seed: u64) -> Vec<Check> {
    vec![random_ruled_minimal(seed), leaf_straightness(), oracle_agreement(seed)]
}

pub const RANDOM_SPECS: usize = 100;

/// `max |H^h|` over non-characteristic lattices of random ruled surfaces.
pub fn random_ruled_minimal(seed: u64) -> Check {
    let mut r = Lcg64::new(seed);
    let opts = CurvatureOptions::default();
    let (mut worst, mut evaluated, mut rejected) = (0.0f64, 0, 0);
    let mut skipped = [0usize; 3];
    for _ in 0..RANDOM_SPECS {
        let (_, s, rej) = draw_ruled(&mut r, false);
        rejected += rej;
        let rep = is_h_minimal(&s, [41, 41], 1e-8, &opts);
        worst = worst.max(rep.max_abs_h);
        evaluated += rep.evaluated;
        skipped[0] += rep.skipped_characteristic;
        skipped[1] += rep.skipped_near_characteristic;
        skipped[2] += rep.skipped_ill_conditioned;
    }
    Check::new("minimal/random-ruled", worst, 1e-8, evaluated).with_note(format!(
        "{RANDOM_SPECS} specs, {rejected} rejected draws; skipped nodes: {} characteristic, {} near, {} roundoff-limited",
        skipped[0], skipped[1], skipped[2]
    ))
}

/// Largest `|π''|` along projected leaves, by five-point differences in arc length.
pub fn leaf_bending(s: &SurfaceHandle, seeds: usize, ds: f64, steps: usize) -> (f64, usize) {
    let dom = s.domain();
    let (mut worst, mut leaves) = (0.0f64, 0);
    for i in 0..seeds {
        for j in 0..seeds {
            let (u, v) = dom.interior_lattice(seeds, i, j);
            let Ok(trace) = integrate_flow(s, u, v, ds, steps, default_stop()) else { continue };
            if trace.len() < 5 {
                continue;
            }
            leaves += 1;
            let xs: Vec<f64> = trace.points.iter().map(|p| p.x).collect();
            let ys: Vec<f64> = trace.points.iter().map(|p| p.y).collect();
            for k in 0..trace.len() {
                let (_, x2) = derivatives_at(&trace.arc, &xs, k);
                let (_, y2) = derivatives_at(&trace.arc, &ys, k);
                worst = worst.max(x2.hypot(y2));
            }
        }
    }
    (worst, leaves)
}

pub fn leaf_straightness() -> Check {
    let (mut worst, mut leaves) = (0.0f64, 0);
    for name in H_MINIMAL_NAMES {
        let s = catalog_get(name).expect("catalog");
        let (w, n) = leaf_bending(&s, 6, 0.01, 300);
        worst = worst.max(w);
        leaves += n;
    }
    Check::new("minimal/straight-leaves", worst, 1e-4, leaves)
}

pub const ORACLE_POINTS: usize = 200;

/// `|H_local − κ_s(projected leaf)|` at random interior points of every
/// catalog surface.
pub fn oracle_agreement(seed: u64) -> Check {
    let mut r = Lcg64::new(seed ^ 0x6);
    let opts = CurvatureOptions::default();
    let (mut worst, mut n, mut skipped) = (0.0f64, 0, 0);
    let names = CATALOG_NAMES.iter().map(|s| s.to_string()).chain(["cylinder(0.5)".into(), "cylinder(5)".into()]);
    for name in names {
        let s = catalog_get(&name).expect("catalog");
        let dom = s.domain();
        let mut got = 0;
        let mut tries = 0;
        while got < ORACLE_POINTS && tries < 20 * ORACLE_POINTS {
            tries += 1;
            let u = r.uniform(dom.u[0], dom.u[1]);
            let v = r.uniform(dom.v[0], dom.v[1]);
            let Ok(local) = mean_curvature_local(&s, u, v, &opts) else {
                skipped += 1;
                continue;
            };
            if local.near_characteristic {
                skipped += 1;
                continue;
            }
            match mean_curvature_flow_oracle(&s, u, v, 1e-3, 4, CharThreshold::default()) {
                Ok(o) => {
                    worst = worst.max((o.h - local.h).abs());
                    got += 1;
                }
                Err(_) => skipped += 1,
            }
        }
        if got < ORACLE_POINTS {
            return Check::failed("minimal/flow-oracle", format!("{name}: only {got} usable points"));
        }
        n += got;
    }
    Check::new("minimal/flow-oracle", worst, 1e-3, n).with_note(format!("{skipped} draws skipped"))
}
