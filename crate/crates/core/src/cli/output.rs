//! CSV and JSON artifacts of a run.
//!
//! Numbers are written with Rust's `{:e}` formatting: scientific notation with
//! the shortest digit string that parses back to the same `f64`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::constitutive::SettlingParams;
use crate::scheme::{derived_fields, CaseCounters, CflReport, Variant};
use crate::simulator::{mass_balance_audit, AuditReport, RunRecord, StageRecord};

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

pub fn profiles_header(r: &RunRecord) -> Vec<String> {
    let mut h = vec!["t_s".to_string(), "z_m".to_string()];
    h.extend(r.particulate_names.iter().cloned());
    h.extend(r.soluble_names.iter().cloned());
    h.push("X".into());
    h.push("W".into());
    h
}

pub fn series_header(r: &RunRecord) -> Vec<String> {
    let mut h = vec!["t_s".to_string()];
    for (prefix, names) in [
        ("Ce_", &r.particulate_names),
        ("Se_", &r.soluble_names),
        ("Cu_", &r.particulate_names),
        ("Su_", &r.soluble_names),
    ] {
        h.extend(names.iter().map(|n| format!("{prefix}{n}")));
    }
    h
}

/// One row per snapshot and cell, cells top to bottom at their midpoints.
pub fn write_profiles<W: Write>(w: W, r: &RunRecord, params: &SettlingParams) -> io::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(profiles_header(r))?;
    let h = r.h();
    for snap in &r.snapshots {
        let (x, wl) = derived_fields(&snap.state, params);
        let t = num(snap.t);
        for j in 1..=r.cells {
            let mut row = Vec::with_capacity(4 + r.particulate_names.len() + r.soluble_names.len());
            row.push(t.clone());
            row.push(num((j as f64 - 0.5) * h));
            row.extend(snap.state.c(j).iter().map(|&v| num(v)));
            row.extend(snap.state.s(j).iter().map(|&v| num(v)));
            row.push(num(x[j - 1]));
            row.push(num(wl[j - 1]));
            out.write_record(&row)?;
        }
    }
    out.flush()
}

pub fn write_series<W: Write>(w: W, r: &RunRecord) -> io::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(series_header(r))?;
    for b in &r.series {
        let row: Vec<String> = std::iter::once(b.t)
            .chain(b.c_e.iter().chain(&b.s_e).chain(&b.c_u).chain(&b.s_u).copied())
            .map(num)
            .collect();
        out.write_record(&row)?;
    }
    out.flush()
}

/// Contents of `audit.json`. Wall-clock time is left out so that repeated
/// runs produce identical files.
#[derive(Debug, Serialize)]
pub struct Audit<'a> {
    pub name: &'a str,
    pub variant: Variant,
    pub cells: usize,
    pub h_m: f64,
    pub tau_s: f64,
    pub cfl: &'a CflReport,
    pub cfl_dominant: String,
    pub cfl_margin: f64,
    pub surface_cases: &'a CaseCounters,
    pub snapshots: usize,
    pub particulates: &'a [String],
    pub solubles: &'a [String],
    pub stages: &'a [StageRecord],
    pub closure: AuditReport,
}

pub fn audit(r: &RunRecord) -> Audit<'_> {
    Audit {
        name: &r.name,
        variant: r.variant,
        cells: r.cells,
        h_m: r.h(),
        tau_s: r.tau,
        cfl: &r.cfl,
        cfl_dominant: r.cfl.dominant.to_string(),
        cfl_margin: r.cfl.margin(r.tau),
        surface_cases: &r.counters,
        snapshots: r.snapshots.len(),
        particulates: &r.particulate_names,
        solubles: &r.soluble_names,
        stages: &r.stages,
        closure: mass_balance_audit(r),
    }
}

/// Writes `profiles.csv`, `boundary_series.csv` and `audit.json` into `dir`.
pub fn write_run(dir: &Path, r: &RunRecord, params: &SettlingParams) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    write_profiles(BufWriter::new(File::create(dir.join("profiles.csv"))?), r, params)?;
    write_series(BufWriter::new(File::create(dir.join("boundary_series.csv"))?), r)?;
    let mut f = BufWriter::new(File::create(dir.join("audit.json"))?);
    serde_json::to_writer_pretty(&mut f, &audit(r))?;
    f.write_all(b"\n")?;
    f.flush()
}

/// One row of a convergence table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub cells: usize,
    pub value: f64,
    /// Previous value divided by this one.
    pub ratio: Option<f64>,
}

pub const CONVERGENCE_HEADER: [&str; 3] = ["N", "value", "ratio"];

pub fn write_convergence<W: Write>(w: W, rows: &[ConvergenceRow]) -> io::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(CONVERGENCE_HEADER)?;
    for r in rows {
        out.write_record([r.cells.to_string(), num(r.value), r.ratio.map(num).unwrap_or_default()])?;
    }
    out.flush()
}
