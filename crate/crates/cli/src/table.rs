//! Numeric CSV tables with a fixed 12-significant-digit format.

use std::io::{Read, Write};

use thiserror::Error;

pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("row {row} has {got} cells, header has {want}")]
    Arity { row: usize, got: usize, want: usize },
    #[error("cell `{0}` is not a number")]
    BadCell(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Header plus rows of optional numbers; `None` renders as an empty cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<Option<f64>>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<Option<f64>>] {
        &self.rows
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) -> Result<(), TableError> {
        if row.len() != self.header.len() {
            return Err(TableError::Arity {
                row: self.rows.len(),
                got: row.len(),
                want: self.header.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn push_values(&mut self, row: &[f64]) -> Result<(), TableError> {
        self.push(row.iter().copied().map(Some).collect())
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<(), TableError> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|c| c.map(format_number).unwrap_or_default()))?;
        }
        out.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self, TableError> {
        let mut rdr = csv::ReaderBuilder::new().from_reader(r);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
        let mut table = CsvTable::new(header);
        for rec in rdr.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|cell| {
                    if cell.is_empty() {
                        Ok(None)
                    } else {
                        cell.parse::<f64>()
                            .map(Some)
                            .map_err(|_| TableError::BadCell(cell.to_owned()))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            table.push(row)?;
        }
        Ok(table)
    }
}

/// `%.12g`: 12 significant digits, fixed notation for exponents in
/// `[-4, 12)`, trailing zeros removed.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let p = SIGNIFICANT_DIGITS - 1;
    let sci = format!("{v:.p$e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (p as i32 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_owned()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
