//! CSV and JSON writers. CSV quoting follows RFC 4180 (through the csv
//! crate); JSON keeps struct field order, so both are byte-stable.

use super::convergence::StudyOutput;
use super::verify::{DimRow, Verification};
use crate::error::{Error, Result};
use crate::spectra::FriedrichsRecord;
use serde::Serialize;
use std::io::Write;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format {s:?} (csv or json)"))),
        }
    }
}

fn num(x: f64) -> String {
    x.to_string()
}

pub fn write_json<T: Serialize, W: Write>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Records and slopes in one table. Record rows leave `quantity` and `slope`
/// empty; slope rows carry the fitted p window as `p` (for example `6-10`)
/// and leave the error columns empty.
pub fn write_study_csv<W: Write>(study: &StudyOutput, out: W) -> Result<()> {
    let timed = study.records.iter().any(|r| r.wall_time.is_some());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["kind", "operator", "field", "norm", "s", "p", "error", "best", "ratio", "stability", "flagged", "quantity", "slope"];
    if timed {
        header.push("wall_time");
    }
    w.write_record(&header)?;
    for r in &study.records {
        let mut row = vec![
            "record".to_string(),
            r.operator.clone(),
            r.field.clone(),
            r.norm.clone(),
            num(r.s),
            r.p.to_string(),
            num(r.error),
            num(r.best),
            num(r.ratio),
            num(r.stability),
            r.flagged.to_string(),
            String::new(),
            String::new(),
        ];
        if timed {
            row.push(r.wall_time.map(num).unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    for s in &study.slopes {
        let mut row = vec![
            "slope".to_string(),
            s.operator.clone(),
            s.field.clone(),
            s.norm.clone(),
            num(s.s),
            format!("{}-{}", s.p_from, s.p_to),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            s.quantity.clone(),
            num(s.slope),
        ];
        if timed {
            row.push(String::new());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns p, space, dim, closed_form, match.
pub fn write_dims_csv<W: Write>(rows: &[DimRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Dimension rows are reported as check lines too, so the CSV form lists
/// only the check lines (name, measured, threshold, pass).
pub fn write_verification_csv<W: Write>(v: &Verification, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for l in &v.report.lines {
        w.serialize(l)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_friedrichs_json<W: Write>(records: &[FriedrichsRecord], out: W) -> Result<()> {
    write_json(&records, out)
}
