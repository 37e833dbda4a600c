//! Batch pipeline for studying dataset-sharing activity in ORCID public data
//! files.
//!
//! The library streams an ORCID public data file (a tar.gz of per-record XML
//! summaries, or a plain directory of XML files), identifies dataset-typed
//! works, labels them by repository (Zenodo, Dryad, Figshare) and crediting
//! source (DataCite vs. other), and derives researcher-level indicators:
//! country links, discipline attribution, and academic-age cohorts.
//!
//! Everything is organized as independently re-runnable stages that persist
//! CSV tables between steps:
//!
//! 1. [`ingest`] — stream the archive into profile/work/affiliation tables
//! 2. [`classify`] — dataset identification, repository/source scenarios, dedup
//! 3. [`affiliation`] — most-recent country resolution and link tables
//! 4. [`career`] — PhD start detection and first-output cohort records
//! 5. [`discipline`] — fractional domain attribution from a DOI→category map
//! 6. [`report`] — the indicator report families (overview counts, source
//!    overlap, country, discipline, cohort)
//!
//! The [`pipeline`] module orchestrates the stages; the `orcid-datashare`
//! binary is a thin subcommand wrapper around it. See the crate `examples/`
//! directory for one runnable example per capability:
//!
//! ```bash
//! cargo run -p orcid-datashare --example ingest_archive
//! cargo run -p orcid-datashare --example classify_datasets
//! cargo run -p orcid-datashare --example resolve_countries
//! cargo run -p orcid-datashare --example career_cohorts
//! cargo run -p orcid-datashare --example map_disciplines
//! cargo run -p orcid-datashare --example build_reports
//! cargo run -p orcid-datashare --example full_pipeline
//! ```

pub mod affiliation;
pub mod career;
pub mod classify;
pub mod discipline;
pub mod fixtures;
pub mod ingest;
pub mod model;
pub mod pipeline;
pub mod report;
pub mod store;

pub use model::{
    normalize_doi, normalize_source, AffiliationRecord, AffiliationSection, DoiError,
    ProfileRecord, RepositoryLabel, Scenario, WorkRecord,
};
