//! Published reference spectra (two tables, six parameter columns).
//!
//! The values are kept as printed, in `data/golden_tables.csv`, together with
//! annotations for cells where the published methods disagree with each other.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::potential::PotentialParams;

pub const GOLDEN_CSV: &str = include_str!("../data/golden_tables.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Aim,
    Ppsm,
    Hdm,
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "AIM" => Ok(Method::Aim),
            "PPSM" => Ok(Method::Ppsm),
            "HDM" => Ok(Method::Hdm),
            other => Err(format!("unknown method {other:?}")),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Aim => "AIM",
            Method::Ppsm => "PPSM",
            Method::Hdm => "HDM",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Note {
    /// AIM and HDM disagree far beyond either method's error.
    KnownDiscrepancy,
    AimHdmMismatch,
    HdmPpsmMismatch,
}

impl FromStr for Note {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "known-discrepancy" => Ok(Note::KnownDiscrepancy),
            "aim-hdm-mismatch" => Ok(Note::AimHdmMismatch),
            "hdm-ppsm-mismatch" => Ok(Note::HdmPpsmMismatch),
            other => Err(format!("unknown note {other:?}")),
        }
    }
}

impl fmt::Display for Note {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Note::KnownDiscrepancy => "known-discrepancy",
            Note::AimHdmMismatch => "aim-hdm-mismatch",
            Note::HdmPpsmMismatch => "hdm-ppsm-mismatch",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub table: u8,
    pub v0: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub n: usize,
    pub method: Method,
    pub value: f64,
    /// The value exactly as printed.
    pub text: String,
    pub note: Option<Note>,
}

/// One parameter column of a table.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub table: u8,
    pub v0: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub cells: Vec<Cell>,
}

impl Column {
    pub fn params(&self) -> PotentialParams {
        PotentialParams::s_wave(self.v0, self.lambda, self.gamma).expect("golden parameters are valid")
    }

    /// Values of one method ordered by n.
    pub fn values(&self, method: Method) -> Vec<f64> {
        let mut cells: Vec<&Cell> = self.cells.iter().filter(|c| c.method == method).collect();
        cells.sort_by_key(|c| c.n);
        cells.iter().map(|c| c.value).collect()
    }

    pub fn cell(&self, n: usize, method: Method) -> Option<&Cell> {
        self.cells.iter().find(|c| c.n == n && c.method == method)
    }

    pub fn levels(&self) -> usize {
        self.cells.iter().map(|c| c.n + 1).max().unwrap_or(0)
    }

    pub fn label(&self) -> String {
        match self.table {
            1 => format!("gamma={}", self.gamma),
            _ => format!("V0={}", self.v0),
        }
    }
}

fn field<T: FromStr>(line: usize, name: &str, s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::GoldenData {
        line,
        msg: format!("bad {name}: {s:?}"),
    })
}

pub fn parse(text: &str) -> Result<Vec<Cell>> {
    let mut out = Vec::new();
    let mut header_seen = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        if !header_seen {
            if l != "table,v0,lambda,gamma,n,method,value,note" {
                return Err(Error::GoldenData {
                    line,
                    msg: format!("unexpected header {l:?}"),
                });
            }
            header_seen = true;
            continue;
        }
        let f: Vec<&str> = l.split(',').collect();
        if f.len() != 8 {
            return Err(Error::GoldenData {
                line,
                msg: format!("expected 8 fields, found {}", f.len()),
            });
        }
        let method = f[5].parse().map_err(|msg| Error::GoldenData { line, msg })?;
        let note = match f[7].trim() {
            "" => None,
            s => Some(s.parse().map_err(|msg| Error::GoldenData { line, msg })?),
        };
        out.push(Cell {
            table: field(line, "table", f[0])?,
            v0: field(line, "v0", f[1])?,
            lambda: field(line, "lambda", f[2])?,
            gamma: field(line, "gamma", f[3])?,
            n: field(line, "n", f[4])?,
            method,
            value: field(line, "value", f[6])?,
            text: f[6].trim().to_string(),
            note,
        });
    }
    if !header_seen {
        return Err(Error::GoldenData {
            line: 0,
            msg: "missing header".into(),
        });
    }
    Ok(out)
}

/// Cells grouped into columns, in file order.
pub fn group(cells: Vec<Cell>) -> Vec<Column> {
    let mut cols: Vec<Column> = Vec::new();
    for c in cells {
        let same =
            |col: &Column| col.table == c.table && col.v0 == c.v0 && col.lambda == c.lambda && col.gamma == c.gamma;
        match cols.iter_mut().find(|col| same(col)) {
            Some(col) => col.cells.push(c),
            None => cols.push(Column {
                table: c.table,
                v0: c.v0,
                lambda: c.lambda,
                gamma: c.gamma,
                cells: vec![c],
            }),
        }
    }
    cols
}

/// The embedded tables.
pub fn columns() -> Vec<Column> {
    group(parse(GOLDEN_CSV).expect("embedded golden data parses"))
}
