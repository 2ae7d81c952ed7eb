//! Characteristic locus detection: lattice scan plus bisection along edges.
//!
//! Along each lattice edge from `p0` to `p1` the scalar `g = N^h(p) · N^h(p0)`
//! starts positive. A sign change is refined by bisection and kept only if
//! `|N^h|` at the refined point is at most [`LOCUS_TOL`], which discards
//! edges where `N^h` merely rotates.

use serde::Serialize;

use crate::heis::Point3;
use crate::horizontal::horizontal_normal;
use crate::patch::SurfaceHandle;

/// Acceptance bound on `|N^h|` for a refined locus point.
pub const LOCUS_TOL: f64 = 1e-8;

/// Default number of bisection steps per edge.
pub const DEFAULT_REFINE: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocusPoint {
    pub u: f64,
    pub v: f64,
    pub point: Point3,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Locus {
    pub grid: [usize; 2],
    pub refine: usize,
    pub polylines: Vec<Vec<LocusPoint>>,
}

impl Locus {
    pub fn points(&self) -> impl Iterator<Item = &LocusPoint> {
        self.polylines.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.polylines.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn normal_at(s: &SurfaceHandle, u: f64, v: f64) -> Option<[f64; 2]> {
    let n = horizontal_normal(&s.eval_jet2(u, v).ok()?);
    Some([n.n1, n.n2])
}

fn locus_point(s: &SurfaceHandle, u: f64, v: f64) -> Option<LocusPoint> {
    let j = s.eval_jet2(u, v).ok()?;
    let norm = horizontal_normal(&j).norm;
    (norm <= LOCUS_TOL).then(|| LocusPoint { u, v, point: j.point(), norm })
}

fn refine_edge(s: &SurfaceHandle, a: (f64, f64), b: (f64, f64), iters: usize) -> Option<LocusPoint> {
    let n0 = normal_at(s, a.0, a.1)?;
    let g = |t: f64| {
        let n = normal_at(s, a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))?;
        Some(n[0] * n0[0] + n[1] * n0[1])
    };
    if !(g(1.0)? < 0.0) {
        return None;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid)?;
        if gm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if gm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // keep whichever bracket end has the smaller normal
    let best = [lo, hi, 0.5 * (lo + hi)]
        .into_iter()
        .filter_map(|t| {
            let (u, v) = (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
            let n = normal_at(s, u, v)?;
            Some((n[0].hypot(n[1]), u, v))
        })
        .min_by(|x, y| x.0.total_cmp(&y.0))?;
    locus_point(s, best.1, best.2)
}

/// Characteristic points on an `nu × nv` lattice over the closed domain,
/// chained into polylines in parameter space.
pub fn find_locus(s: &SurfaceHandle, grid: [usize; 2], refine: usize) -> Locus {
    let [nu, nv] = grid;
    let dom = s.domain();
    let node = |i: usize, j: usize| dom.lattice(nu, nv, i, j);
    let mut found = Vec::new();
    let is_char_node: Vec<bool> = (0..nu * nv)
        .map(|k| {
            let (u, v) = node(k / nv, k % nv);
            match locus_point(s, u, v) {
                Some(p) => {
                    found.push(p);
                    true
                }
                None => false,
            }
        })
        .collect();
    for i in 0..nu {
        for j in 0..nv {
            for (di, dj) in [(1, 0), (0, 1)] {
                let (i2, j2) = (i + di, j + dj);
                if i2 >= nu || j2 >= nv || is_char_node[i * nv + j] || is_char_node[i2 * nv + j2] {
                    continue;
                }
                if let Some(p) = refine_edge(s, node(i, j), node(i2, j2), refine) {
                    found.push(p);
                }
            }
        }
    }
    let du = dom.u_span() / (nu.max(2) - 1) as f64;
    let dv = dom.v_span() / (nv.max(2) - 1) as f64;
    Locus { grid, refine, polylines: chain(found, du, dv) }
}

/// Greedy nearest-neighbour chaining; neighbours farther apart than about
/// one lattice cell start a new polyline.
fn chain(mut pts: Vec<LocusPoint>, du: f64, dv: f64) -> Vec<Vec<LocusPoint>> {
    let dist = |a: &LocusPoint, b: &LocusPoint| ((a.u - b.u) / du).hypot((a.v - b.v) / dv);
    let link = 1.5;
    pts.sort_by(|a, b| a.u.total_cmp(&b.u).then(a.v.total_cmp(&b.v)));
    let mut lines = Vec::new();
    while !pts.is_empty() {
        let mut line = std::collections::VecDeque::from([pts.remove(0)]);
        loop {
            let ends = [*line.front().unwrap(), *line.back().unwrap()];
            let best = pts
                .iter()
                .enumerate()
                .flat_map(|(k, p)| ends.iter().enumerate().map(move |(e, end)| (dist(p, end), k, e)))
                .min_by(|a, b| a.0.total_cmp(&b.0));
            match best {
                Some((d, k, e)) if d <= link => {
                    let p = pts.remove(k);
                    if e == 0 {
                        line.push_front(p);
                    } else {
                        line.push_back(p);
                    }
                }
                _ => break,
            }
        }
        lines.push(line.into());
    }
    lines
}
