//! Versioned CSV tables shared by every exported artifact.
//!
//! Each file starts with a line `# cnstn-<kind> v<major>.<minor>` followed by
//! an ordinary CSV header and numeric rows. Readers accept any minor version
//! of the major version they understand.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub const TABLE_MAJOR: u32 = 1;
pub const TABLE_MINOR: u32 = 0;

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing or malformed version line, expected `# cnstn-{0} v<major>.<minor>`")]
    MissingVersion(String),
    #[error("unsupported {kind} table version {major}.{minor} (reader understands {TABLE_MAJOR}.x)")]
    UnsupportedVersion { kind: String, major: u32, minor: u32 },
    #[error("unexpected columns {found:?}, expected {expected:?}")]
    Columns { found: Vec<String>, expected: Vec<String> },
    #[error("bad number {0:?}")]
    Number(String),
}

pub fn write_table(
    path: &Path,
    kind: &str,
    columns: &[String],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> Result<(), TableError> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "# cnstn-{kind} v{TABLE_MAJOR}.{TABLE_MINOR}")?;
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(columns)?;
    for row in rows {
        writer.write_record(row.iter().map(|v| format!("{v:e}")))?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a table written by [`write_table`], returning its columns and rows.
pub fn read_table(path: &Path, kind: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), TableError> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let (major, minor) = parse_version(first.trim(), kind)
        .ok_or_else(|| TableError::MissingVersion(kind.to_string()))?;
    if major != TABLE_MAJOR {
        return Err(TableError::UnsupportedVersion { kind: kind.to_string(), major, minor });
    }
    let mut csv_reader = csv::Reader::from_reader(reader);
    let columns: Vec<String> = csv_reader.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in csv_reader.records() {
        let record = record?;
        let row = record
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|_| TableError::Number(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok((columns, rows))
}

fn parse_version(line: &str, kind: &str) -> Option<(u32, u32)> {
    let rest = line.strip_prefix(&format!("# cnstn-{kind} v"))?;
    let (major, minor) = rest.split_once('.')?;
    Some((major.parse().ok()?, minor.parse().ok()?))
}

pub(crate) fn check_columns(found: &[String], expected: &[String]) -> Result<(), TableError> {
    if found != expected {
        return Err(TableError::Columns { found: found.to_vec(), expected: expected.to_vec() });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_version_gate() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let cols = vec!["a".to_string(), "b".to_string()];
        write_table(&path, "demo", &cols, vec![vec![1.0, 0.1], vec![-2.5, 1e-300]]).unwrap();
        let (c, rows) = read_table(&path, "demo").unwrap();
        assert_eq!(c, cols);
        assert_eq!(rows, vec![vec![1.0, 0.1], vec![-2.5, 1e-300]]);

        let text = std::fs::read_to_string(&path).unwrap().replace("v1.0", "v2.0");
        std::fs::write(&path, text).unwrap();
        assert!(matches!(read_table(&path, "demo"), Err(TableError::UnsupportedVersion { major: 2, .. })));
        assert!(matches!(read_table(&path, "other"), Err(TableError::MissingVersion(_))));
    }
}
