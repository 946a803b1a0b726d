//! CSV in and out. Every file has a header row; numbers are written with 17
//! significant digits so they read back exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{CliError, CliResult};

/// Numeric table: header plus rows of equal width.
#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn read_table(path: &Path) -> CliResult<Table> {
    let where_ = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::input(format!("{where_}: {e}")))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::input(format!("{where_}: {e}")))?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        // data rows count from 2: the header is line 1
        let line = i + 2;
        let record = record.map_err(|e| CliError::input(format!("{where_}, row {line}: {e}")))?;
        let row = record
            .iter()
            .enumerate()
            .map(|(j, field)| match field.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(CliError::input(format!(
                    "{where_}, row {line}, column {}: cannot parse {field:?} as a finite number",
                    j + 1
                ))),
            })
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::input(format!("{where_}: no data rows")));
    }
    Ok(Table { header, rows })
}

pub fn read_vector(path: &Path) -> CliResult<DVector<f64>> {
    let t = read_table(path)?;
    if t.header.len() != 1 {
        return Err(CliError::input(format!(
            "{}: expected one column, found {}",
            path.display(),
            t.header.len()
        )));
    }
    Ok(DVector::from_iterator(t.rows.len(), t.rows.into_iter().map(|r| r[0])))
}

pub fn read_matrix(path: &Path) -> CliResult<DMatrix<f64>> {
    let t = read_table(path)?;
    let p = t.header.len();
    Ok(DMatrix::from_row_iterator(
        t.rows.len(),
        p,
        t.rows.into_iter().flatten(),
    ))
}

pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NA".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

/// Writes a header then rows of already-formatted cells.
pub struct CsvOut {
    out: BufWriter<File>,
}

impl CsvOut {
    pub fn create(path: &Path, header: &[String]) -> CliResult<Self> {
        let file = File::create(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let mut out = CsvOut {
            out: BufWriter::new(file),
        };
        out.line(header)?;
        Ok(out)
    }

    pub fn line<S: AsRef<str>>(&mut self, cells: &[S]) -> CliResult<()> {
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                self.out.write_all(b",")?;
            }
            self.out.write_all(c.as_ref().as_bytes())?;
        }
        self.out.write_all(b"\n")?;
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.out.flush()?;
        Ok(())
    }
}

pub fn write_vector(path: &Path, name: &str, v: &[f64]) -> CliResult<()> {
    let mut out = CsvOut::create(path, &[name.to_owned()])?;
    for x in v {
        out.line(&[fmt_f64(*x)])?;
    }
    out.finish()
}

pub fn write_matrix(path: &Path, prefix: &str, m: &DMatrix<f64>) -> CliResult<()> {
    let header: Vec<String> = (1..=m.ncols()).map(|j| format!("{prefix}{j}")).collect();
    let mut out = CsvOut::create(path, &header)?;
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        out.line(&cells)?;
    }
    out.finish()
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}
