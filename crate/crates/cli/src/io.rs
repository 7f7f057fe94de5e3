// SPDX-License-Identifier: MIT OR Apache-2.0

//! CSV and JSON file handling.

use crate::error::{CliError, CliResult};
use npmojo_core::TimeSeries;
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

/// What to do with empty or `NA`/`NaN` cells.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Impute {
    /// Reject the file.
    #[default]
    None,
    /// Carry the last observed value forward (backward for a leading gap).
    Locf,
}

fn is_missing(cell: &str) -> bool {
    matches!(
        cell.trim().to_ascii_lowercase().as_str(),
        "" | "na" | "nan" | "null"
    )
}

/// Parses a numeric matrix, rows = time, columns = dimensions.
pub fn parse_csv<R: Read>(reader: R, header: bool, impute: Impute) -> CliResult<TimeSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<Option<f64>>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::input(format!("CSV: {e}")))?;
        let line = i + 1 + usize::from(header);
        let row = rec
            .iter()
            .enumerate()
            .map(|(j, cell)| {
                if is_missing(cell) {
                    return Ok(None);
                }
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(Some(v)),
                    _ => Err(CliError::input(format!(
                        "line {line}, column {}: '{cell}' is not a finite number",
                        j + 1
                    ))),
                }
            })
            .collect::<CliResult<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::input("CSV contains no data rows"));
    }
    let p = rows[0].len();
    let mut values = Vec::with_capacity(rows.len() * p);
    for j in 0..p {
        if impute == Impute::Locf && rows.iter().all(|r| r[j].is_none()) {
            return Err(CliError::input(format!("column {} has no observed values", j + 1)));
        }
    }
    let mut last: Vec<Option<f64>> = (0..p)
        .map(|j| rows.iter().find_map(|r| r[j]))
        .collect();
    for (i, row) in rows.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            match (cell, impute) {
                (Some(v), _) => {
                    last[j] = Some(*v);
                    values.push(*v);
                }
                (None, Impute::Locf) => values.push(last[j].expect("column has a value")),
                (None, Impute::None) => {
                    return Err(CliError::input(format!(
                        "missing value at row {}, column {}; use --impute locf to fill",
                        i + 1,
                        j + 1
                    )))
                }
            }
        }
    }
    Ok(TimeSeries::new(values, rows.len(), p)?)
}

pub fn read_csv(path: &Path, header: bool, impute: Impute) -> CliResult<TimeSeries> {
    let file = File::open(path)
        .map_err(|e| CliError::input(format!("cannot open {}: {e}", path.display())))?;
    parse_csv(file, header, impute)
}

/// Writes rows with the shortest round-trip float representation.
pub fn write_csv(path: &Path, ts: &TimeSeries) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
    for row in ts.rows() {
        w.write_record(row.iter().map(|v| format!("{v:?}")))
            .map_err(|e| CliError::input(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable document");
    s.push('\n');
    s
}

/// Writes to `path`, or to stdout when it is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => {
            let mut f = BufWriter::new(File::create(p)?);
            f.write_all(text.as_bytes())?;
            f.flush()?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

pub fn read_json(path: &Path) -> CliResult<serde_json::Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_dims() {
        let ts = parse_csv("a,b\n1,2\n3,4.5\n".as_bytes(), true, Impute::None).unwrap();
        assert_eq!((ts.len(), ts.dim()), (2, 2));
        assert_eq!(ts.row(1), &[3.0, 4.5]);
    }

    #[test]
    fn rejects_text_and_ragged_rows() {
        assert!(matches!(
            parse_csv("1\nx\n".as_bytes(), false, Impute::None),
            Err(CliError::Input(_))
        ));
        assert!(matches!(
            parse_csv("1,2\n3\n".as_bytes(), false, Impute::None),
            Err(CliError::Input(_))
        ));
        assert!(parse_csv("".as_bytes(), false, Impute::None).is_err());
    }

    #[test]
    fn missing_values() {
        let text = "NA\n1\nnan\n3\n";
        assert!(parse_csv(text.as_bytes(), false, Impute::None).is_err());
        let ts = parse_csv(text.as_bytes(), false, Impute::Locf).unwrap();
        assert_eq!(ts.values(), &[1.0, 1.0, 1.0, 3.0]);
    }
}
