use heisflow_core::builders::catalog_get;
use heisflow_core::flow::{cc_length, default_stop, horizontality_residual, integrate_flow, StopReason};
use heisflow_core::SurfaceHandle;

/// Forward end of the leaf through `(u0, v0)` after arc length `len`.
fn endpoint(s: &SurfaceHandle, u0: f64, v0: f64, len: f64, ds: f64) -> [f64; 2] {
    let steps = (len / ds).round() as usize;
    let tr = integrate_flow(s, u0, v0, ds, steps, default_stop()).unwrap();
    assert_eq!(tr.forward_stop, StopReason::StepLimit);
    *tr.params.last().unwrap()
}

#[test]
fn step_halving_shows_fourth_order() {
    let s = catalog_get("cone_lower").unwrap();
    let ends: Vec<[f64; 2]> = [0.1, 0.05, 0.025].iter().map(|&ds| endpoint(&s, -1.0, 1.0, 0.8, ds)).collect();
    let gap = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).hypot(a[1] - b[1]);
    let (e1, e2) = (gap(ends[0], ends[1]), gap(ends[1], ends[2]));
    let order = (e1 / e2).log2();
    assert!((3.5..4.6).contains(&order), "observed order {order} ({e1:e}, {e2:e})");
}

#[test]
fn cone_leaves_are_horizontal_with_unit_speed() {
    let s = catalog_get("cone_lower").unwrap();
    let tr = integrate_flow(&s, -1.0, 2.0, 1e-3, 400, default_stop()).unwrap();
    let samples = tr.samples();
    assert!(horizontality_residual(&samples).unwrap() < 1e-6);
    let len = cc_length(&samples, 1e-6).unwrap();
    let arc = tr.arc.last().unwrap();
    assert!((len - arc).abs() < 1e-6 * arc, "{len} vs {arc}");
}

#[test]
fn ruling_leaf_runs_into_the_locus() {
    // Paraboloid rulings are leaves; the locus crosses s = 0.3 at v = -0.3/sqrt 2.
    let s = catalog_get("paraboloid").unwrap();
    let tr = integrate_flow(&s, 0.3, 0.1, 1e-2, 1000, default_stop()).unwrap();
    assert!(tr.params.iter().all(|p| (p[0] - 0.3).abs() < 1e-12));
    let mut stops = [tr.backward_stop, tr.forward_stop];
    stops.sort_by_key(|r| *r as u8);
    assert_eq!(stops, [StopReason::DomainExit, StopReason::CharacteristicProximity]);
    let vs = tr.params.iter().map(|p| p[1]);
    let (lo, hi) = vs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    assert!((lo + 0.3 / 2f64.sqrt()).abs() < 2e-2, "stopped at v = {lo}");
    assert!(hi > 1.0 - 1e-2);
}
