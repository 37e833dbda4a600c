//! File-backed stage tables.
//!
//! Every stage persists its output as a UTF-8 CSV table (RFC-4180 quoting,
//! LF line endings, mandatory header row) so each stage is independently
//! re-runnable and the intermediate state is diff-able. Writes are atomic
//! (temp file + rename) and row order is deterministic, so the same logical
//! table always serializes to byte-identical files.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

/// Declared name and column schema of one stage table.
#[derive(Debug, Clone, Copy)]
pub struct TableSpec {
    pub name: &'static str,
    pub columns: &'static [&'static str],
}

pub const PROFILES: TableSpec = TableSpec {
    name: "profiles",
    columns: &["orcid_id"],
};

pub const WORKS: TableSpec = TableSpec {
    name: "works",
    columns: &["orcid_id", "put_code", "work_type", "doi", "source", "pub_year"],
};

pub const AFFILIATIONS: TableSpec = TableSpec {
    name: "affiliations",
    columns: &["orcid_id", "section", "country", "role_title", "start_year", "end_year"],
};

pub const DATASETS: TableSpec = TableSpec {
    name: "datasets",
    columns: &["orcid_id", "put_code", "doi", "repository", "source", "scenario"],
};

pub const PRODUCERS: TableSpec = TableSpec {
    name: "producers",
    columns: &["orcid_id", "n_datasets"],
};

pub const COUNTRY_LINKS: TableSpec = TableSpec {
    name: "country_links",
    columns: &["orcid_id", "country", "is_producer"],
};

pub const CAREERS: TableSpec = TableSpec {
    name: "careers",
    columns: &["orcid_id", "phd_start_year", "first_dataset_year", "first_article_year"],
};

pub const DISCIPLINES: TableSpec = TableSpec {
    name: "disciplines",
    columns: &["orcid_id", "matched_articles", "modal_domain", "tied", "weights"],
};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("table `{name}`: {reason}")]
    Schema { name: String, reason: String },
    #[error("missing table `{name}`: {path} not found (run the stage that produces it first)")]
    MissingTable { name: String, path: PathBuf },
}

impl StoreError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        StoreError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Path of a stage table inside an output directory.
pub fn table_path(dir: &Path, spec: &TableSpec) -> PathBuf {
    dir.join(format!("{}.csv", spec.name))
}

/// Write `contents` to `path` atomically via a temp file in the same
/// directory followed by a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), StoreError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| StoreError::io(dir, e))?;
    let mut tmp = tempfile::Builder::new()
        .prefix(".tmp-table-")
        .tempfile_in(dir)
        .map_err(|e| StoreError::io(path, e))?;
    tmp.write_all(contents).map_err(|e| StoreError::io(path, e))?;
    tmp.flush().map_err(|e| StoreError::io(path, e))?;
    tmp.persist(path)
        .map_err(|e| StoreError::io(path, e.error))?;
    Ok(())
}

/// Serialize a table to CSV bytes: header row, then rows sorted by the key
/// columns (the schema leads with the primary key, so a full-row sort gives
/// the declared order).
pub fn table_bytes(spec: &TableSpec, mut rows: Vec<Vec<String>>) -> Result<Vec<u8>, StoreError> {
    for row in &rows {
        if row.len() != spec.columns.len() {
            return Err(StoreError::Schema {
                name: spec.name.to_string(),
                reason: format!(
                    "row has {} fields, schema declares {}",
                    row.len(),
                    spec.columns.len()
                ),
            });
        }
    }
    rows.sort_unstable();
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer
        .write_record(spec.columns)
        .map_err(|e| schema_err(spec, e))?;
    for row in &rows {
        writer.write_record(row).map_err(|e| schema_err(spec, e))?;
    }
    writer
        .into_inner()
        .map_err(|e| StoreError::Schema {
            name: spec.name.to_string(),
            reason: e.to_string(),
        })
}

fn schema_err(spec: &TableSpec, e: csv::Error) -> StoreError {
    StoreError::Schema {
        name: spec.name.to_string(),
        reason: e.to_string(),
    }
}

/// Write a stage table into `dir`, returning the file path.
pub fn write_table(
    dir: &Path,
    spec: &TableSpec,
    rows: Vec<Vec<String>>,
) -> Result<PathBuf, StoreError> {
    let path = table_path(dir, spec);
    let bytes = table_bytes(spec, rows)?;
    write_atomic(&path, &bytes)?;
    Ok(path)
}

/// Read a stage table back; the header must match the declared schema
/// exactly.
pub fn read_table(dir: &Path, spec: &TableSpec) -> Result<Vec<Vec<String>>, StoreError> {
    let path = table_path(dir, spec);
    if !path.exists() {
        return Err(StoreError::MissingTable {
            name: spec.name.to_string(),
            path,
        });
    }
    let file = File::open(&path).map_err(|e| StoreError::io(&path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let header = reader
        .headers()
        .map_err(|e| schema_err(spec, e))?
        .iter()
        .map(str::to_owned)
        .collect::<Vec<_>>();
    if header != spec.columns {
        return Err(StoreError::Schema {
            name: spec.name.to_string(),
            reason: format!(
                "header mismatch: found {:?}, expected {:?}",
                header, spec.columns
            ),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| schema_err(spec, e))?;
        if record.len() != spec.columns.len() {
            return Err(StoreError::Schema {
                name: spec.name.to_string(),
                reason: format!(
                    "row has {} fields, schema declares {}",
                    record.len(),
                    spec.columns.len()
                ),
            });
        }
        rows.push(record.iter().map(str::to_owned).collect());
    }
    Ok(rows)
}

/// Empty cell for an absent optional value.
pub fn opt_cell<T: ToString>(value: Option<T>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// Parse a cell written by [`opt_cell`] back into an optional value.
pub fn cell_opt(cell: &str) -> Option<&str> {
    if cell.is_empty() {
        None
    } else {
        Some(cell)
    }
}

/// Parse an optional integer cell, rejecting garbage loudly.
pub fn cell_opt_year(spec: &TableSpec, cell: &str) -> Result<Option<i32>, StoreError> {
    match cell_opt(cell) {
        None => Ok(None),
        Some(s) => s.parse::<i32>().map(Some).map_err(|_| StoreError::Schema {
            name: spec.name.to_string(),
            reason: format!("invalid year cell {s:?}"),
        }),
    }
}
