//! CSV diagnostics series and the late-time distance side file.
//!
//! Every value is printed with 17 significant digits so a series parses
//! back to the same bits. Rows are flushed as they are written; any
//! prefix of the file is itself a valid series.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use dyrl_core::diagnostics::{r_label, DiagnosticsRecord, SeriesLayout, TailSample};
use dyrl_core::solver::System;

use crate::error::CliError;

pub const SERIES_FILE: &str = "series.csv";
pub const TAIL_FILE: &str = "tail.csv";
pub const CONFIG_FILE: &str = "config.toml";

pub fn fmt_value(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_value(s: &str) -> Option<f64> {
    s.trim().parse().ok()
}

fn parse_r(s: &str) -> Option<f64> {
    parse_value(&s.replace('p', "."))
}

pub struct SeriesWriter {
    path: PathBuf,
    out: csv::Writer<File>,
    layout: SeriesLayout,
    rows: usize,
}

impl SeriesWriter {
    pub fn create(path: &Path, layout: SeriesLayout) -> Result<SeriesWriter, CliError> {
        let file = File::create(path).map_err(CliError::io(format!("creating {}", path.display())))?;
        let mut w = SeriesWriter {
            path: path.to_path_buf(),
            out: csv::Writer::from_writer(file),
            layout,
            rows: 0,
        };
        let header = w.layout.columns();
        w.write_row(&header)?;
        Ok(w)
    }

    fn write_row<S: AsRef<[u8]>>(&mut self, row: &[S]) -> Result<(), CliError> {
        let ctx = || format!("writing {}", self.path.display());
        self.out
            .write_record(row)
            .map_err(|e| CliError::Io {
                context: ctx(),
                source: e.into(),
            })?;
        self.out.flush().map_err(CliError::io(ctx()))
    }

    pub fn append(&mut self, rec: &DiagnosticsRecord) -> Result<(), CliError> {
        let row: Vec<String> = self.layout.row(rec).into_iter().map(fmt_value).collect();
        self.write_row(&row)?;
        self.rows += 1;
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
}

fn series_error(path: &Path, reason: impl Into<String>) -> CliError {
    CliError::Series {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// Reads a series written for `system`.
pub fn read_series(path: &Path, system: System) -> Result<(SeriesLayout, Vec<DiagnosticsRecord>), CliError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| series_error(path, e.to_string()))?;
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| series_error(path, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let layout = SeriesLayout::from_header(system, &header).map_err(|e| series_error(path, e.to_string()))?;
    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| series_error(path, e.to_string()))?;
        let values = row
            .iter()
            .map(|s| parse_value(s).ok_or_else(|| series_error(path, format!("row {}: bad number `{s}`", i + 1))))
            .collect::<Result<Vec<f64>, CliError>>()?;
        records.push(layout.record(&values).map_err(|e| series_error(path, format!("row {}: {e}", i + 1)))?);
    }
    Ok((layout, records))
}

pub fn write_tail(path: &Path, samples: &[TailSample]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io {
        context: format!("writing {}", path.display()),
        source: e.into(),
    };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["t", "r", "distance"]).map_err(io)?;
    for s in samples {
        w.write_record([fmt_value(s.t), r_label(s.r), fmt_value(s.distance)])
            .map_err(io)?;
    }
    w.flush().map_err(CliError::io(format!("writing {}", path.display())))
}

pub fn read_tail(path: &Path) -> Result<Vec<TailSample>, CliError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| series_error(path, e.to_string()))?;
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| series_error(path, e.to_string()))?;
        let bad = || series_error(path, format!("bad tail row {:?}", row));
        if row.len() != 3 {
            return Err(bad());
        }
        out.push(TailSample {
            t: parse_value(&row[0]).ok_or_else(bad)?,
            r: parse_r(&row[1]).ok_or_else(bad)?,
            distance: parse_value(&row[2]).ok_or_else(bad)?,
        });
    }
    Ok(out)
}

/// Creates or truncates `path` with `text`.
pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    let mut f = File::create(path).map_err(CliError::io(format!("creating {}", path.display())))?;
    f.write_all(text.as_bytes())
        .map_err(CliError::io(format!("writing {}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_round_trip_bitwise() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, f64::INFINITY, f64::MIN_POSITIVE] {
            assert_eq!(parse_value(&fmt_value(x)).unwrap().to_bits(), x.to_bits());
        }
        assert!(parse_value(&fmt_value(f64::NAN)).unwrap().is_nan());
    }

    #[test]
    fn tail_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join(TAIL_FILE);
        let s = vec![
            TailSample { t: 0.5, r: 2.0, distance: 1e-3 },
            TailSample { t: 0.5, r: f64::INFINITY, distance: 2e-3 },
            TailSample { t: 0.6, r: 2.5, distance: 0.0 },
        ];
        write_tail(&p, &s).unwrap();
        assert_eq!(read_tail(&p).unwrap(), s);
    }
}
