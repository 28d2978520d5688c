//! CSV datasets: header row, `label` and `group` columns in {0,1}, every
//! other column a numeric feature in header order.

use std::fs;
use std::io::Write;
use std::path::Path;

use fairfront_core::Dataset;

use crate::error::{Error, Result};
use crate::fmt_f64;

pub fn load_csv(path: &Path) -> Result<Dataset> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let parse_err = |row: usize, column: &str, message: String| Error::CsvParse {
        path: path.to_path_buf(),
        row,
        column: column.to_string(),
        message,
    };
    let headers = reader
        .headers()
        .map_err(|e| parse_err(1, "", e.to_string()))?
        .clone();
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);
    let label_col = find("label").ok_or_else(|| parse_err(1, "label", "missing column".into()))?;
    let group_col = find("group").ok_or_else(|| parse_err(1, "group", "missing column".into()))?;
    let feature_cols: Vec<usize> = (0..headers.len())
        .filter(|&c| c != label_col && c != group_col)
        .collect();
    if feature_cols.is_empty() {
        return Err(parse_err(1, "", "no feature columns".into()));
    }

    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut groups = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let row = e.position().map_or(0, |p| p.line() as usize);
            parse_err(row, "", e.to_string())
        })?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        let binary = |col: usize| -> Result<u8> {
            let name = &headers[col];
            match record.get(col).map(str::trim) {
                Some("0") => Ok(0),
                Some("1") => Ok(1),
                Some(other) => Err(parse_err(row, name, format!("expected 0 or 1, got {other:?}"))),
                None => Err(parse_err(row, name, "missing value".into())),
            }
        };
        labels.push(binary(label_col)?);
        groups.push(binary(group_col)?);
        for &c in &feature_cols {
            let cell = record.get(c).map(str::trim).unwrap_or("");
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_err(row, &headers[c], format!("not a number: {cell:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(row, &headers[c], format!("not finite: {cell:?}")));
            }
            features.push(v);
        }
    }
    if labels.is_empty() {
        return Err(Error::Dataset(format!("{}: no data rows", path.display())));
    }
    Ok(Dataset::new(features, feature_cols.len(), labels, groups)?)
}

/// Writes `label,group,f0,f1,...` with shortest round-trip float formatting.
pub fn write_csv(d: &Dataset, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str("label,group");
    for j in 0..d.input_dim() {
        out.push_str(&format!(",f{j}"));
    }
    out.push('\n');
    for i in 0..d.len() {
        out.push_str(&format!("{},{}", d.labels()[i], d.groups()[i]));
        for &v in d.row(i) {
            out.push(',');
            out.push_str(&fmt_f64(v));
        }
        out.push('\n');
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}
