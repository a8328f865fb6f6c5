//! CSV ingestion and atomic file output.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// A CSV column, by header name or 0-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSpec {
    Name(String),
    Index(usize),
}

impl std::str::FromStr for ColumnSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Parameter("empty column name".into()));
        }
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnSpec::Index(i),
            Err(_) => ColumnSpec::Name(s.to_string()),
        })
    }
}

const LABEL_NAMES: [&str; 4] = ["date", "time", "timestamp", "datetime"];

/// Read one numeric column of a comma-separated file.
///
/// A header is assumed when the first row does not parse as a number in the
/// value column. Without `column`, the last column is used. With a header, a
/// column named `date`, `time`, `timestamp` or `datetime` supplies labels.
pub fn ingest_csv(path: &Path, column: Option<&ColumnSpec>) -> Result<TimeSeries> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_csv(&text, column)
}

/// [`ingest_csv`] on in-memory text.
pub fn parse_csv(text: &str, column: Option<&ColumnSpec>) -> Result<TimeSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<(u64, csv::StringRecord)> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Input(format!("malformed CSV: {e}")))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(str::is_empty) {
            continue;
        }
        rows.push((line, rec));
    }
    let Some((_, first)) = rows.first() else {
        return Err(Error::Input("file has no rows".into()));
    };
    let width = first.len();

    let name_index = |name: &str, header: &csv::StringRecord| header.iter().position(|h| h == name);
    let header_names = |rec: &csv::StringRecord| -> bool {
        let idx = match column {
            Some(ColumnSpec::Index(i)) => *i,
            Some(ColumnSpec::Name(_)) => return true,
            None => width - 1,
        };
        rec.get(idx).is_some_and(|v| v.parse::<f64>().is_err())
    };
    let has_header = header_names(first);

    let value_col = match column {
        None => width - 1,
        Some(ColumnSpec::Index(i)) if *i < width => *i,
        Some(ColumnSpec::Index(i)) => {
            return Err(Error::Input(format!(
                "column {i} does not exist; the file has {width}"
            )))
        }
        Some(ColumnSpec::Name(name)) => name_index(name, first)
            .ok_or_else(|| Error::Input(format!("no column named `{name}` in the header")))?,
    };
    let label_col = if has_header {
        first
            .iter()
            .position(|h| LABEL_NAMES.contains(&h.to_ascii_lowercase().as_str()))
            .filter(|&c| c != value_col)
    } else {
        None
    };

    let body = if has_header { &rows[1..] } else { &rows[..] };
    let mut values = Vec::with_capacity(body.len());
    let mut labels = Vec::new();
    for (line, rec) in body {
        let cell = rec.get(value_col).unwrap_or("");
        let v: f64 = cell.parse().map_err(|_| {
            Error::Input(format!(
                "row {line}, column {}: cannot parse `{cell}` as a number",
                value_col + 1
            ))
        })?;
        if !v.is_finite() {
            return Err(Error::Input(format!(
                "row {line}, column {}: value `{cell}` is not finite",
                value_col + 1
            )));
        }
        values.push(v);
        if let Some(c) = label_col {
            labels.push(rec.get(c).unwrap_or("").to_string());
        }
    }
    if values.len() < crate::series::MIN_LEN {
        return Err(Error::Input(format!(
            "need at least {} data rows, found {}",
            crate::series::MIN_LEN,
            values.len()
        )));
    }
    match label_col {
        Some(_) => TimeSeries::with_labels(values, labels),
        None => TimeSeries::new(values),
    }
}

/// Write `contents` to a sibling temporary file, then rename it over `path`,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(|e| Error::Io(format!("writing {}: {e}", path.display())))
}
