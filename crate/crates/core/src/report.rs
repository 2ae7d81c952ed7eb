//! Lattice evaluation of normals and curvature, with JSON and CSV export.
//!
//! Rows are ordered with `v` varying fastest. Every float is written with 17
//! significant digits, so files read back bit-exactly.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{mean_curvature_local, CurvatureOptions};
use crate::error::{GeomError, Result};
use crate::horizontal::{horizontal_normal, is_characteristic, unit_horizontal_normal};
use crate::patch::{SurfaceHandle, EPS_REG};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub u: f64,
    pub v: f64,
    pub x: f64,
    pub y: f64,
    pub t: f64,
    /// Unit horizontal normal and curvature; absent at characteristic cells.
    pub nu1: Option<f64>,
    pub nu2: Option<f64>,
    pub h: Option<f64>,
    pub norm_nh: f64,
    #[serde(rename = "char")]
    pub char_flag: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    /// Over all cells with a curvature value.
    pub max_abs_h: f64,
    /// Over cells that are not near-characteristic.
    pub max_abs_h_conditioned: f64,
    pub char_count: usize,
    pub near_char_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub surface: String,
    pub grid: [usize; 2],
    pub rows: Vec<GridRow>,
    pub summary: GridSummary,
}

pub const CSV_HEADER: [&str; 10] = ["u", "v", "x", "y", "t", "nu1", "nu2", "h", "norm_nh", "char"];

/// Evaluates an `nu × nv` lattice over the closed domain of `s`.
pub fn evaluate_grid(s: &SurfaceHandle, grid: [usize; 2], opts: &CurvatureOptions) -> Result<GridReport> {
    let [nu, nv] = grid;
    if nu == 0 || nv == 0 {
        return Err(GeomError::InvalidSpec(format!("empty grid {nu}x{nv}")));
    }
    let dom = s.domain();
    let cells: Vec<Result<(GridRow, bool)>> = (0..nu)
        .into_par_iter()
        .flat_map_iter(|i| (0..nv).map(move |j| (i, j)))
        .map(|(i, j)| {
            let (u, v) = dom.lattice(nu, nv, i, j);
            let jet = s.eval_jet2(u, v)?;
            let cross = jet.regularity();
            if !(cross > EPS_REG) {
                return Err(GeomError::NotRegular { u, v, cross });
            }
            let eps = opts.eps_char.eval(&jet);
            let p = jet.point();
            let char_flag = is_characteristic(&jet, eps).characteristic;
            let (nu_h, h, near) = if char_flag {
                (None, None, false)
            } else {
                let nu_h = unit_horizontal_normal(&jet, eps)?;
                let c = mean_curvature_local(s, u, v, opts)?;
                (Some(nu_h), Some(c.h), c.near_characteristic)
            };
            let row = GridRow {
                u,
                v,
                x: p.x,
                y: p.y,
                t: p.t,
                nu1: nu_h.map(|n| n.h1),
                nu2: nu_h.map(|n| n.h2),
                h,
                norm_nh: horizontal_normal(&jet).norm,
                char_flag,
            };
            Ok((row, near))
        })
        .collect();
    let mut rows = Vec::with_capacity(nu * nv);
    let mut summary = GridSummary { max_abs_h: 0.0, max_abs_h_conditioned: 0.0, char_count: 0, near_char_count: 0 };
    for cell in cells {
        let (row, near) = cell?;
        summary.char_count += row.char_flag as usize;
        summary.near_char_count += near as usize;
        if let Some(h) = row.h {
            summary.max_abs_h = summary.max_abs_h.max(h.abs());
            if !near {
                summary.max_abs_h_conditioned = summary.max_abs_h_conditioned.max(h.abs());
            }
        }
        rows.push(row);
    }
    Ok(GridReport { surface: s.name().to_string(), grid, rows, summary })
}

/// Writes floats as `d.ddddddddddddddddde±x`.
struct Sci;

impl serde_json::ser::Formatter for Sci {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{}", fmt_f64(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

/// Serialises any value as JSON with 17-digit floats.
pub fn to_json_sci<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sci);
    value.serialize(&mut ser).expect("in-memory serialisation");
    out.push(b'\n');
    out
}

impl GridReport {
    pub fn to_json(&self) -> Vec<u8> {
        to_json_sci(self)
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory csv");
        let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                fmt_f64(r.u),
                fmt_f64(r.v),
                fmt_f64(r.x),
                fmt_f64(r.y),
                fmt_f64(r.t),
                opt(r.nu1),
                opt(r.nu2),
                opt(r.h),
                fmt_f64(r.norm_nh),
                r.char_flag.to_string(),
            ])
            .expect("in-memory csv");
        }
        w.into_inner().expect("in-memory csv")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes).map_err(|e| GeomError::Parse {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })
    }
}

/// Reads rows written by [`GridReport::to_csv`].
pub fn rows_from_csv(bytes: &[u8]) -> Result<Vec<GridRow>> {
    let mut reader = csv::Reader::from_reader(bytes);
    reader
        .deserialize()
        .map(|r| {
            r.map_err(|e: csv::Error| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                GeomError::Parse { line, column: 0, msg: e.to_string() }
            })
        })
        .collect()
}
