use std::path::Path;

use crate::error::{Error, Result};

/// Reads one value per row from a CSV file. An optional first row `x` is
/// treated as a header. Values must lie in the open interval `(0, 1)`; errors
/// name the 1-based row.
pub fn ingest_dataset(path: &Path) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Dataset {
                path: path.to_path_buf(),
                row: 0,
                message: format!("{other:?}"),
            },
        })?;
    let err = |row: usize, message: String| Error::Dataset {
        path: path.to_path_buf(),
        row,
        message,
    };
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| err(row, e.to_string()))?;
        if rec.len() != 1 {
            return Err(err(row, format!("expected one value, found {} fields", rec.len())));
        }
        let field = &rec[0];
        if row == 1 && field == "x" {
            continue;
        }
        let v: f64 = field
            .parse()
            .map_err(|_| err(row, format!("`{field}` is not a number")))?;
        if !(v > 0.0 && v < 1.0) {
            return Err(err(row, format!("{v} is outside (0, 1)")));
        }
        out.push(v);
    }
    if out.is_empty() {
        log::warn!("{}: dataset is empty", path.display());
    } else {
        log::info!("{}: read {} values", path.display(), out.len());
    }
    Ok(out)
}
