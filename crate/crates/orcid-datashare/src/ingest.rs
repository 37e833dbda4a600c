//! Streaming ingestion of the ORCID public data file.
//!
//! The public file ships as a tar.gz of per-record XML summaries (one file
//! per iD); a plain directory of `.xml` files is accepted for fixtures.
//! Records are yielded lazily through a bounded channel, so memory stays
//! proportional to the largest single record regardless of archive size.
//! Individual records that fail to parse are counted, logged, and skipped —
//! a multi-million-record run never dies on one irregular record.

use std::collections::HashMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::{sync_channel, Receiver};
use std::sync::Mutex;

use quick_xml::events::Event;
use quick_xml::Reader;
use rayon::iter::{ParallelBridge, ParallelIterator};
use thiserror::Error;

use crate::model::{
    is_valid_orcid_id, normalize_doi, AffiliationRecord, AffiliationSection, ProfileRecord,
    WorkRecord,
};

/// Counters for one ingestion run; `records_parsed + records_failed`
/// always equals `records_seen`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IngestStats {
    pub records_seen: u64,
    pub records_parsed: u64,
    pub records_failed: u64,
    pub bytes_read: u64,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: not a gzip tar archive or directory ({reason})")]
    NotAnArchive { path: PathBuf, reason: String },
    #[error("worker pool: {0}")]
    WorkerPool(String),
}

impl IngestError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        IngestError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("malformed record: {0}")]
    MalformedRecord(String),
    #[error("record has no ORCID iD")]
    MissingOrcidId,
}

/// One undecoded record pulled from the archive.
#[derive(Debug, Clone)]
pub struct RawRecord {
    /// Archive member path or file path; usually contains the iD.
    pub path_hint: Option<String>,
    pub bytes: Vec<u8>,
}

enum StreamInner {
    Dir(std::vec::IntoIter<PathBuf>),
    Tar(Receiver<Result<RawRecord, IngestError>>),
}

/// Lazy stream of raw records from an archive or fixture directory.
pub struct RecordStream {
    inner: StreamInner,
}

impl Iterator for RecordStream {
    type Item = Result<RawRecord, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        match &mut self.inner {
            StreamInner::Dir(paths) => {
                let path = paths.next()?;
                Some(
                    std::fs::read(&path)
                        .map(|bytes| RawRecord {
                            path_hint: Some(path.to_string_lossy().into_owned()),
                            bytes,
                        })
                        .map_err(|e| IngestError::io(&path, e)),
                )
            }
            StreamInner::Tar(rx) => rx.recv().ok(),
        }
    }
}

const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];

// Bounded queue between the sequential reader and the parsing workers.
const STREAM_DEPTH: usize = 64;

/// Open an archive (gzip tar) or fixture directory as a record stream.
///
/// Directory mode enumerates `.xml` files in sorted path order. Tar mode
/// reads members sequentially on a background thread; only regular `.xml`
/// members count as records.
pub fn open_archive(path: &Path) -> Result<RecordStream, IngestError> {
    if path.is_dir() {
        let mut files: Vec<PathBuf> = walkdir::WalkDir::new(path)
            .sort_by_file_name()
            .into_iter()
            .filter_map(|entry| entry.ok())
            .filter(|entry| entry.file_type().is_file())
            .map(|entry| entry.into_path())
            .filter(|p| p.extension().map(|ext| ext == "xml").unwrap_or(false))
            .collect();
        files.sort_unstable();
        return Ok(RecordStream {
            inner: StreamInner::Dir(files.into_iter()),
        });
    }

    let mut file = std::fs::File::open(path).map_err(|e| IngestError::io(path, e))?;
    let mut magic = [0u8; 2];
    match file.read_exact(&mut magic) {
        Ok(()) if magic == GZIP_MAGIC => {}
        Ok(_) => {
            return Err(IngestError::NotAnArchive {
                path: path.to_path_buf(),
                reason: "bad gzip magic".to_string(),
            })
        }
        Err(_) => {
            return Err(IngestError::NotAnArchive {
                path: path.to_path_buf(),
                reason: "too short for a gzip header".to_string(),
            })
        }
    }
    use std::io::Seek;
    file.rewind().map_err(|e| IngestError::io(path, e))?;

    let (tx, rx) = sync_channel(STREAM_DEPTH);
    let archive_path = path.to_path_buf();
    std::thread::spawn(move || {
        let decoder = flate2::read::GzDecoder::new(std::io::BufReader::new(file));
        let mut archive = tar::Archive::new(decoder);
        let entries = match archive.entries() {
            Ok(entries) => entries,
            Err(e) => {
                let _ = tx.send(Err(IngestError::io(&archive_path, e)));
                return;
            }
        };
        for entry in entries {
            let mut entry = match entry {
                Ok(entry) => entry,
                Err(e) => {
                    let _ = tx.send(Err(IngestError::io(&archive_path, e)));
                    return;
                }
            };
            if !entry.header().entry_type().is_file() {
                continue;
            }
            let member = entry
                .path()
                .map(|p| p.to_string_lossy().into_owned())
                .unwrap_or_default();
            if !member.ends_with(".xml") {
                continue;
            }
            let mut bytes = Vec::with_capacity(entry.size() as usize);
            if let Err(e) = entry.read_to_end(&mut bytes) {
                let _ = tx.send(Err(IngestError::io(&archive_path, e)));
                return;
            }
            if tx
                .send(Ok(RawRecord {
                    path_hint: Some(member),
                    bytes,
                }))
                .is_err()
            {
                return; // stream consumer dropped
            }
        }
    });
    Ok(RecordStream {
        inner: StreamInner::Tar(rx),
    })
}

#[derive(Default)]
struct WorkBuilder {
    put_code: Option<String>,
    work_type: String,
    doi: Option<String>,
    ext_id_type: String,
    ext_id_value: String,
    source_name: Option<String>,
    pub_year: Option<String>,
}

#[derive(Default)]
struct AffiliationBuilder {
    section: Option<AffiliationSection>,
    country: Option<String>,
    role_title: Option<String>,
    start_year: Option<String>,
    end_year: Option<String>,
}

fn path_ends_with(path: &[String], suffix: &[&str]) -> bool {
    path.len() >= suffix.len()
        && path[path.len() - suffix.len()..]
            .iter()
            .zip(suffix)
            .all(|(a, b)| a == b)
}

fn parse_year(text: &str) -> Option<i32> {
    let year: i32 = text.trim().parse().ok()?;
    (1900..=2100).contains(&year).then_some(year)
}

fn non_empty(value: Option<String>) -> Option<String> {
    value.map(|v| v.trim().to_string()).filter(|v| !v.is_empty())
}

/// Parse one record summary document into a [`ProfileRecord`].
///
/// Extracts the iD, every work summary (type, first `doi`-typed external
/// identifier normalized, source display name, publication year), and every
/// employment and education/qualification summary (country, role title,
/// start/end years). Unknown elements are skipped without error.
pub fn parse_record(bytes: &[u8]) -> Result<ProfileRecord, ParseError> {
    let mut reader = Reader::from_reader(bytes);
    reader.config_mut().trim_text(true);

    let mut buf = Vec::with_capacity(1024);
    let mut path: Vec<String> = Vec::with_capacity(12);
    let mut orcid_id: Option<String> = None;
    let mut work: Option<WorkBuilder> = None;
    let mut affiliation: Option<AffiliationBuilder> = None;
    let mut works = Vec::new();
    let mut affiliations = Vec::new();

    loop {
        match reader.read_event_into(&mut buf) {
            Ok(Event::Start(e)) => {
                let local = String::from_utf8_lossy(e.local_name().as_ref()).into_owned();
                match local.as_str() {
                    "work-summary" => {
                        let mut builder = WorkBuilder::default();
                        for attr in e.attributes().flatten() {
                            if attr.key.as_ref() == b"put-code" {
                                builder.put_code =
                                    Some(String::from_utf8_lossy(&attr.value).into_owned());
                            }
                        }
                        work = Some(builder);
                    }
                    "employment-summary" => {
                        affiliation = Some(AffiliationBuilder {
                            section: Some(AffiliationSection::Employment),
                            ..Default::default()
                        });
                    }
                    "education-summary" | "qualification-summary" => {
                        affiliation = Some(AffiliationBuilder {
                            section: Some(AffiliationSection::EducationQualification),
                            ..Default::default()
                        });
                    }
                    _ => {}
                }
                path.push(local);
            }
            Ok(Event::End(_)) => {
                let Some(closed) = path.pop() else {
                    return Err(ParseError::MalformedRecord("unbalanced end tag".into()));
                };
                match closed.as_str() {
                    "work-summary" => {
                        if let Some(builder) = work.take() {
                            works.push(WorkRecord {
                                put_code: builder
                                    .put_code
                                    .unwrap_or_else(|| format!("#{}", works.len())),
                                work_type: builder.work_type.trim().to_string(),
                                doi: builder.doi,
                                source_name: non_empty(builder.source_name),
                                pub_year: builder.pub_year.as_deref().and_then(parse_year),
                            });
                        }
                    }
                    "employment-summary" | "education-summary" | "qualification-summary" => {
                        if let Some(builder) = affiliation.take() {
                            let mut start = builder.start_year.as_deref().and_then(parse_year);
                            let mut end = builder.end_year.as_deref().and_then(parse_year);
                            if let (Some(s), Some(e)) = (start, end) {
                                // dirty data: keep the pair ordered
                                if s > e {
                                    (start, end) = (Some(e), Some(s));
                                }
                            }
                            affiliations.push(AffiliationRecord {
                                section: builder.section.expect("set on open"),
                                country: non_empty(builder.country),
                                role_title: non_empty(builder.role_title),
                                start_year: start,
                                end_year: end,
                            });
                        }
                    }
                    "external-id" => {
                        if let Some(builder) = work.as_mut() {
                            if builder.doi.is_none()
                                && builder.ext_id_type.trim().eq_ignore_ascii_case("doi")
                            {
                                builder.doi = normalize_doi(&builder.ext_id_value).ok();
                            }
                            builder.ext_id_type.clear();
                            builder.ext_id_value.clear();
                        }
                    }
                    _ => {}
                }
            }
            Ok(Event::Text(e)) => {
                let text = e
                    .unescape()
                    .map_err(|e| ParseError::MalformedRecord(e.to_string()))?;
                if path_ends_with(&path, &["orcid-identifier", "path"]) {
                    orcid_id.get_or_insert_with(String::new).push_str(&text);
                } else if let Some(builder) = work.as_mut() {
                    if path_ends_with(&path, &["work-summary", "type"]) {
                        builder.work_type.push_str(&text);
                    } else if path_ends_with(&path, &["source", "source-name"]) {
                        builder
                            .source_name
                            .get_or_insert_with(String::new)
                            .push_str(&text);
                    } else if path_ends_with(&path, &["publication-date", "year"]) {
                        builder
                            .pub_year
                            .get_or_insert_with(String::new)
                            .push_str(&text);
                    } else if path_ends_with(&path, &["external-id", "external-id-type"]) {
                        builder.ext_id_type.push_str(&text);
                    } else if path_ends_with(&path, &["external-id", "external-id-value"]) {
                        builder.ext_id_value.push_str(&text);
                    }
                } else if let Some(builder) = affiliation.as_mut() {
                    if path_ends_with(&path, &["role-title"]) {
                        builder
                            .role_title
                            .get_or_insert_with(String::new)
                            .push_str(&text);
                    } else if path_ends_with(&path, &["start-date", "year"]) {
                        builder
                            .start_year
                            .get_or_insert_with(String::new)
                            .push_str(&text);
                    } else if path_ends_with(&path, &["end-date", "year"]) {
                        builder
                            .end_year
                            .get_or_insert_with(String::new)
                            .push_str(&text);
                    } else if path_ends_with(&path, &["organization", "address", "country"]) {
                        builder
                            .country
                            .get_or_insert_with(String::new)
                            .push_str(&text);
                    }
                }
            }
            Ok(Event::Eof) => break,
            Ok(_) => {}
            Err(e) => return Err(ParseError::MalformedRecord(e.to_string())),
        }
        buf.clear();
    }

    let orcid_id = orcid_id
        .map(|id| id.trim().to_string())
        .filter(|id| !id.is_empty())
        .ok_or(ParseError::MissingOrcidId)?;
    if !is_valid_orcid_id(&orcid_id) {
        return Err(ParseError::MalformedRecord(format!(
            "invalid ORCID iD {orcid_id:?}"
        )));
    }
    Ok(ProfileRecord {
        orcid_id,
        works,
        affiliations,
    })
}

/// One skipped record: the iD recovered from the member path (or `?`) and
/// the reason.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RecordFailure {
    pub orcid_hint: String,
    pub reason: String,
}

/// Scan a member path for something shaped like an ORCID iD.
fn orcid_from_path(path: &str) -> Option<String> {
    let bytes = path.as_bytes();
    if bytes.len() < 19 {
        return None;
    }
    (0..=bytes.len() - 19).rev().find_map(|i| {
        std::str::from_utf8(&bytes[i..i + 19])
            .ok()
            .filter(|s| is_valid_orcid_id(s))
            .map(str::to_string)
    })
}

/// Outcome of [`ingest`]: counters plus the sorted failure log lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestOutcome {
    pub stats: IngestStats,
    pub failures: Vec<RecordFailure>,
}

/// Stream an archive through `workers` parsing threads, offering every
/// parsed record to `sink` exactly once.
///
/// Per-record parse failures are counted and skipped; stream-level I/O
/// errors abort. The sink is called from worker threads in no particular
/// order — downstream aggregation must be order-independent.
pub fn ingest<S>(archive: &Path, workers: usize, sink: S) -> Result<IngestOutcome, IngestError>
where
    S: Fn(ProfileRecord) + Sync,
{
    let stream = open_archive(archive)?;
    let seen = AtomicU64::new(0);
    let parsed = AtomicU64::new(0);
    let bytes_read = AtomicU64::new(0);
    let failures: Mutex<Vec<RecordFailure>> = Mutex::new(Vec::new());

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| IngestError::WorkerPool(e.to_string()))?;

    pool.install(|| {
        stream.par_bridge().try_for_each(|item| {
            let raw = item?;
            seen.fetch_add(1, Ordering::Relaxed);
            bytes_read.fetch_add(raw.bytes.len() as u64, Ordering::Relaxed);
            match parse_record(&raw.bytes) {
                Ok(profile) => {
                    parsed.fetch_add(1, Ordering::Relaxed);
                    sink(profile);
                }
                Err(e) => {
                    let orcid_hint = raw
                        .path_hint
                        .as_deref()
                        .and_then(orcid_from_path)
                        .unwrap_or_else(|| "?".to_string());
                    failures.lock().unwrap().push(RecordFailure {
                        orcid_hint,
                        reason: e.to_string(),
                    });
                }
            }
            Ok(())
        })
    })?;

    let mut failures = failures.into_inner().unwrap();
    failures.sort_unstable();
    let seen = seen.load(Ordering::Relaxed);
    let parsed = parsed.load(Ordering::Relaxed);
    Ok(IngestOutcome {
        stats: IngestStats {
            records_seen: seen,
            records_parsed: parsed,
            records_failed: seen - parsed,
            bytes_read: bytes_read.load(Ordering::Relaxed),
        },
        failures,
    })
}

/// Render the malformed-record log: one tab-separated line per failure.
pub fn failure_log_bytes(failures: &[RecordFailure]) -> Vec<u8> {
    let mut out = String::new();
    for failure in failures {
        out.push_str(&failure.orcid_hint);
        out.push('\t');
        out.push_str(&failure.reason);
        out.push('\n');
    }
    out.into_bytes()
}

/// Collect every profile of an archive into a map keyed by iD.
///
/// Convenience wrapper over [`ingest`] for fixture-scale corpora; the
/// 7M-record case should stream through `ingest` directly.
pub fn collect_profiles(
    archive: &Path,
    workers: usize,
) -> Result<(HashMap<String, ProfileRecord>, IngestOutcome), IngestError> {
    let profiles: Mutex<HashMap<String, ProfileRecord>> = Mutex::new(HashMap::new());
    let outcome = ingest(archive, workers, |profile| {
        profiles
            .lock()
            .unwrap()
            .insert(profile.orcid_id.clone(), profile);
    })?;
    Ok((profiles.into_inner().unwrap(), outcome))
}
