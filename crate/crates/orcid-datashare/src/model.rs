//! Shared domain types and canonical normalization routines used by every
//! pipeline stage.
//!
//! All types here are immutable after construction and safe to move between
//! worker threads; the normalization functions are pure.

use thiserror::Error;

/// Canonical display name for the DataCite crediting source.
pub const DATACITE: &str = "DataCite";

/// One researcher's parsed ORCID record summary.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProfileRecord {
    /// 16-digit iD with hyphens, e.g. `0000-0001-9162-8992`.
    pub orcid_id: String,
    pub works: Vec<WorkRecord>,
    pub affiliations: Vec<AffiliationRecord>,
}

/// One entry from a profile's works list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WorkRecord {
    /// Opaque token, unique within a profile.
    pub put_code: String,
    /// Free string from the record, e.g. `data-set` or `journal-article`.
    pub work_type: String,
    /// Normalized DOI (see [`normalize_doi`]), when one was present.
    pub doi: Option<String>,
    /// Display name of the crediting client, e.g. `DataCite`.
    pub source_name: Option<String>,
    pub pub_year: Option<i32>,
}

/// Which profile section an affiliation came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AffiliationSection {
    Employment,
    EducationQualification,
}

impl AffiliationSection {
    pub fn as_str(self) -> &'static str {
        match self {
            AffiliationSection::Employment => "employment",
            AffiliationSection::EducationQualification => "education-qualification",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "employment" => Some(AffiliationSection::Employment),
            "education-qualification" => Some(AffiliationSection::EducationQualification),
            _ => None,
        }
    }
}

/// One employment or education/qualification entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffiliationRecord {
    pub section: AffiliationSection,
    /// Organization country as recorded; usually an ISO-3166 alpha-2 code,
    /// but dirty values are preserved verbatim (see [`is_valid_country_code`]).
    pub country: Option<String>,
    pub role_title: Option<String>,
    pub start_year: Option<i32>,
    /// Absent means ongoing.
    pub end_year: Option<i32>,
}

/// Repositories identifiable from text strings inside dataset DOIs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RepositoryLabel {
    Zenodo,
    Dryad,
    Figshare,
    Unknown,
}

impl RepositoryLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RepositoryLabel::Zenodo => "zenodo",
            RepositoryLabel::Dryad => "dryad",
            RepositoryLabel::Figshare => "figshare",
            RepositoryLabel::Unknown => "unknown",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "zenodo" => Some(RepositoryLabel::Zenodo),
            "dryad" => Some(RepositoryLabel::Dryad),
            "figshare" => Some(RepositoryLabel::Figshare),
            "unknown" => Some(RepositoryLabel::Unknown),
            _ => None,
        }
    }

    /// True for the three named repositories, false for `Unknown`.
    pub fn is_known(self) -> bool {
        self != RepositoryLabel::Unknown
    }
}

/// The repository × source combinations that decide analysis scope.
///
/// A dataset is in scope when the repository is one of the three named ones
/// or the crediting source is DataCite; everything else is excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scenario {
    /// Repository is Zenodo/Dryad/Figshare and the source is DataCite.
    RepoViaDataCite,
    /// Repository is Zenodo/Dryad/Figshare but the source is not DataCite.
    RepoOtherSource,
    /// Source is DataCite but the repository is none of the three.
    DataCiteOnly,
    Excluded,
}

impl Scenario {
    /// Short code used in CSV output: `A`, `B`, `C`, or `excluded`.
    pub fn code(self) -> &'static str {
        match self {
            Scenario::RepoViaDataCite => "A",
            Scenario::RepoOtherSource => "B",
            Scenario::DataCiteOnly => "C",
            Scenario::Excluded => "excluded",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "A" => Some(Scenario::RepoViaDataCite),
            "B" => Some(Scenario::RepoOtherSource),
            "C" => Some(Scenario::DataCiteOnly),
            "excluded" => Some(Scenario::Excluded),
            _ => None,
        }
    }

    pub fn in_scope(self) -> bool {
        self != Scenario::Excluded
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DoiError {
    #[error("empty DOI string")]
    EmptyInput,
    #[error("not a DOI: {0:?}")]
    NotADoi(String),
}

const DOI_PREFIXES: [&str; 5] = [
    "https://doi.org/",
    "http://doi.org/",
    "https://dx.doi.org/",
    "http://dx.doi.org/",
    "doi:",
];

/// Normalize a raw DOI string to the lowercase bare form starting with `10.`.
///
/// Strips surrounding whitespace and leading resolver URLs / `doi:` schemes.
/// DOIs are case-insensitive, so the whole string is lowercased to make
/// deduplication exact. Idempotent over its own output.
pub fn normalize_doi(raw: &str) -> Result<String, DoiError> {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Err(DoiError::EmptyInput);
    }
    let mut doi = trimmed.to_lowercase();
    loop {
        let mut stripped = false;
        for prefix in DOI_PREFIXES {
            if let Some(rest) = doi.strip_prefix(prefix) {
                doi = rest.trim_start().to_string();
                stripped = true;
            }
        }
        if !stripped {
            break;
        }
    }
    if doi.starts_with("10.") {
        Ok(doi)
    } else {
        Err(DoiError::NotADoi(trimmed.to_string()))
    }
}

/// Canonicalize a work's crediting source display name.
///
/// Trims and case-folds; the `datacite` key maps to the canonical
/// [`DATACITE`] spelling, any other key is returned folded. Absent or blank
/// input passes through as `None`.
pub fn normalize_source(raw: Option<&str>) -> Option<String> {
    let key = raw?.trim().to_lowercase();
    if key.is_empty() {
        None
    } else if key == "datacite" {
        Some(DATACITE.to_string())
    } else {
        Some(key)
    }
}

/// True when the source display name folds to DataCite.
pub fn is_datacite(source: Option<&str>) -> bool {
    matches!(source, Some(s) if s.trim().eq_ignore_ascii_case("datacite"))
}

/// Shape check for an ORCID iD: `####-####-####-###X` where `X` is a digit
/// or `X`. Checksum validation is out of scope.
pub fn is_valid_orcid_id(id: &str) -> bool {
    let bytes = id.as_bytes();
    if bytes.len() != 19 {
        return false;
    }
    for (i, &b) in bytes.iter().enumerate() {
        match i {
            4 | 9 | 14 => {
                if b != b'-' {
                    return false;
                }
            }
            18 => {
                if !b.is_ascii_digit() && b != b'X' {
                    return false;
                }
            }
            _ => {
                if !b.is_ascii_digit() {
                    return false;
                }
            }
        }
    }
    true
}

/// Fold a work-type string for matching: lowercase with hyphens and spaces
/// removed, so `data-set`, `DATASET`, and `data set` all become `dataset`.
pub fn fold_work_type(raw: &str) -> String {
    raw.chars()
        .filter(|c| *c != '-' && *c != ' ')
        .flat_map(char::to_lowercase)
        .collect()
}

/// Fold free text for keyword scanning: lowercase, punctuation replaced with
/// spaces, whitespace runs collapsed. `Ph.D. candidate` becomes
/// `ph d candidate`.
pub fn fold_text(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut pending_space = false;
    for c in raw.chars() {
        if c.is_alphanumeric() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.extend(c.to_lowercase());
        } else {
            pending_space = true;
        }
    }
    out
}

/// The officially assigned ISO 3166-1 alpha-2 codes.
const ISO_3166_ALPHA2: &[&str] = &[
    "AD", "AE", "AF", "AG", "AI", "AL", "AM", "AO", "AQ", "AR", "AS", "AT", "AU", "AW", "AX",
    "AZ", "BA", "BB", "BD", "BE", "BF", "BG", "BH", "BI", "BJ", "BL", "BM", "BN", "BO", "BQ",
    "BR", "BS", "BT", "BV", "BW", "BY", "BZ", "CA", "CC", "CD", "CF", "CG", "CH", "CI", "CK",
    "CL", "CM", "CN", "CO", "CR", "CU", "CV", "CW", "CX", "CY", "CZ", "DE", "DJ", "DK", "DM",
    "DO", "DZ", "EC", "EE", "EG", "EH", "ER", "ES", "ET", "FI", "FJ", "FK", "FM", "FO", "FR",
    "GA", "GB", "GD", "GE", "GF", "GG", "GH", "GI", "GL", "GM", "GN", "GP", "GQ", "GR", "GS",
    "GT", "GU", "GW", "GY", "HK", "HM", "HN", "HR", "HT", "HU", "ID", "IE", "IL", "IM", "IN",
    "IO", "IQ", "IR", "IS", "IT", "JE", "JM", "JO", "JP", "KE", "KG", "KH", "KI", "KM", "KN",
    "KP", "KR", "KW", "KY", "KZ", "LA", "LB", "LC", "LI", "LK", "LR", "LS", "LT", "LU", "LV",
    "LY", "MA", "MC", "MD", "ME", "MF", "MG", "MH", "MK", "ML", "MM", "MN", "MO", "MP", "MQ",
    "MR", "MS", "MT", "MU", "MV", "MW", "MX", "MY", "MZ", "NA", "NC", "NE", "NF", "NG", "NI",
    "NL", "NO", "NP", "NR", "NU", "NZ", "OM", "PA", "PE", "PF", "PG", "PH", "PK", "PL", "PM",
    "PN", "PR", "PS", "PT", "PW", "PY", "QA", "RE", "RO", "RS", "RU", "RW", "SA", "SB", "SC",
    "SD", "SE", "SG", "SH", "SI", "SJ", "SK", "SL", "SM", "SN", "SO", "SR", "SS", "ST", "SV",
    "SX", "SY", "SZ", "TC", "TD", "TF", "TG", "TH", "TJ", "TK", "TL", "TM", "TN", "TO", "TR",
    "TT", "TV", "TW", "TZ", "UA", "UG", "UM", "US", "UY", "UZ", "VA", "VC", "VE", "VG", "VI",
    "VN", "VU", "WF", "WS", "YE", "YT", "ZA", "ZM", "ZW",
];

/// True when `code` is an officially assigned ISO 3166-1 alpha-2 code.
///
/// Real dumps contain dirty country values; those are preserved in the
/// tables but flagged invalid in validation summaries rather than dropped.
pub fn is_valid_country_code(code: &str) -> bool {
    ISO_3166_ALPHA2.binary_search(&code).is_ok()
}
