//! CSV ingestion and emission.
//!
//! Numbers are written with 17 significant digits so that every `f64`
//! survives a write/read cycle bit for bit.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::mahalanobis::DataMatrix;
use crate::numerics::Matrix;

pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    pub log2: bool,
    /// Header name of a non-numeric column holding group tags.
    pub label_column: Option<String>,
}

/// Read a CSV with one header row and one observation per line.
pub fn ingest(path: impl AsRef<Path>, options: &IngestOptions) -> Result<DataMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ingest_reader(file, options)
}

pub fn ingest_reader<R: Read>(reader: R, options: &IngestOptions) -> Result<DataMatrix> {
    Ok(ingest_with_header(reader, options)?.0)
}

/// Like [`ingest_reader`], also returning the names of the numeric columns.
pub fn ingest_with_header<R: Read>(
    reader: R,
    options: &IngestOptions,
) -> Result<(DataMatrix, Vec<String>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse {
            row: 0,
            col: 0,
            message: e.to_string(),
        })?
        .clone();
    let label_idx = match &options.label_column {
        Some(name) => Some(
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Parse {
                    row: 0,
                    col: 0,
                    message: format!("label column '{name}' not found in header"),
                })?,
        ),
        None => None,
    };
    let names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(j, _)| Some(*j) != label_idx)
        .map(|(_, h)| h.to_string())
        .collect();

    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut rows = 0;
    for (r, record) in rdr.records().enumerate() {
        // 1-based line numbers, header on line 1
        let line = r + 2;
        let record = record.map_err(|e| Error::Parse {
            row: line,
            col: 0,
            message: e.to_string(),
        })?;
        for (j, cell) in record.iter().enumerate() {
            if Some(j) == label_idx {
                labels.push(cell.to_string());
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row: line,
                col: j + 1,
                message: format!("'{cell}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row: line,
                    col: j + 1,
                    message: format!("'{cell}' is not finite"),
                });
            }
            let v = if options.log2 {
                if v <= 0.0 {
                    return Err(Error::Domain {
                        row: line,
                        col: j + 1,
                        message: format!("log2 of non-positive value {cell}"),
                    });
                }
                v.log2()
            } else {
                v
            };
            values.push(v);
        }
        rows += 1;
    }
    if rows == 0 || names.is_empty() {
        return Err(Error::Parse {
            row: 1,
            col: 0,
            message: "no numeric data".into(),
        });
    }
    let x = Matrix::from_row_slice(rows, names.len(), &values);
    let data = if label_idx.is_some() {
        DataMatrix::with_labels(x, labels)?
    } else {
        DataMatrix::new(x)?
    };
    Ok((data, names))
}

/// Read a headerless-or-headed numeric CSV (e.g. a target configuration).
pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    Ok(ingest(path, &IngestOptions::default())?.into_matrix())
}

pub fn write_matrix<W: Write>(out: W, header: &[String], rows: &Matrix) -> Result<()> {
    write_table(out, header, None, rows)
}

/// Emit a matrix as CSV, optionally with a leading label column.
pub fn write_table<W: Write>(
    out: W,
    header: &[String],
    labels: Option<(&str, &[String])>,
    rows: &Matrix,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut head: Vec<&str> = Vec::new();
    if let Some((name, _)) = labels {
        head.push(name);
    }
    head.extend(header.iter().map(String::as_str));
    w.write_record(&head).map_err(csv_io)?;
    for i in 0..rows.nrows() {
        let mut rec: Vec<String> = Vec::with_capacity(head.len());
        if let Some((_, l)) = labels {
            rec.push(l[i].clone());
        }
        rec.extend(rows.row(i).iter().map(|&v| format_number(v)));
        w.write_record(&rec).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

/// Write a dataset in the format [`ingest`] reads back.
pub fn emit<W: Write>(out: W, x: &DataMatrix, names: &[String], label_column: &str) -> Result<()> {
    match x.labels() {
        Some(labels) => write_table(out, names, Some((label_column, labels)), x.matrix()),
        None => write_table(out, names, None, x.matrix()),
    }
}

pub fn default_names(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|j| format!("{prefix}{j}")).collect()
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}
