//! File writers. Numbers are written with 17 significant digits so outputs
//! round-trip and identical runs produce identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use segregation::functional::{EnergyBreakdown, JpSequence};
use segregation::grid::Dim;
use segregation::membrane::NodeClass;
use segregation::{Field, Grid, RateTable, SolverState};

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn coords(grid: &Grid, k: usize, line: &mut String) {
    let p = grid.position(k);
    match grid.dim() {
        Dim::One => write!(line, "{}", num(p[0])),
        Dim::Two => write!(line, "{},{}", num(p[0]), num(p[1])),
    }
    .unwrap();
}

fn coord_header(grid: &Grid) -> &'static str {
    match grid.dim() {
        Dim::One => "x",
        Dim::Two => "x,y",
    }
}

fn write(path: &Path, text: String) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// One row per node in storage order (x fastest).
pub fn field_csv(field: &Field) -> String {
    let grid = field.grid();
    let mut out = format!("{},value\n", coord_header(grid));
    for k in 0..grid.len() {
        coords(grid, k, &mut out);
        writeln!(out, ",{}", num(field[k])).unwrap();
    }
    out
}

pub fn write_field(path: &Path, field: &Field) -> Result<()> {
    write(path, field_csv(field))
}

pub fn write_energy(path: &Path, energy: &[EnergyBreakdown<f64>]) -> Result<()> {
    let mut out = String::from("sweep,total,quadratic,drive1,drive2,boundary\n");
    for (sweep, e) in energy.iter().enumerate() {
        writeln!(
            out,
            "{sweep},{},{},{},{},{}",
            num(e.total),
            num(e.quadratic),
            num(e.drive1),
            num(e.drive2),
            num(e.boundary)
        )
        .unwrap();
    }
    write(path, out)
}

pub fn write_jp(path: &Path, jp: &JpSequence<f64>) -> Result<()> {
    let mut out = String::from("p,sweep,node,value,delta\n");
    writeln!(out, "0,0,,{},", num(jp.initial)).unwrap();
    for t in &jp.terms {
        writeln!(
            out,
            "{},{},{},{},{}",
            t.p,
            t.sweep,
            t.coord,
            num(t.value),
            num(t.delta)
        )
        .unwrap();
    }
    write(path, out)
}

pub fn write_free_boundary(path: &Path, state: &SolverState, nodes: &[usize]) -> Result<()> {
    let grid = state.u1.grid();
    let mut out = format!("{},class\n", coord_header(grid));
    for &k in nodes {
        coords(grid, k, &mut out);
        writeln!(
            out,
            ",{}",
            NodeClass::of(state.u1[k] - state.u2[k]).as_str()
        )
        .unwrap();
    }
    write(path, out)
}

pub fn write_rates(path: &Path, table: &RateTable) -> Result<()> {
    write(path, rates_csv(table))
}

pub fn rates_csv(table: &RateTable) -> String {
    let mut out = String::from("n,h,err_u1,err_u2,err_v,observed_order\n");
    for (i, r) in table.rows.iter().enumerate() {
        let order = match r.order {
            Some(p) => num(p),
            None if i == 0 => String::new(),
            None => "saturated".into(),
        };
        writeln!(
            out,
            "{},{},{},{},{},{order}",
            r.n,
            num(r.h),
            num(r.errors.u1),
            num(r.errors.u2),
            num(r.errors.v)
        )
        .unwrap();
    }
    out
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(path, text)
}
