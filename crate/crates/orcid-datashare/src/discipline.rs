//! Fractional discipline attribution from a user-supplied DOI→category
//! mapping rolled up to high-level domains.
//!
//! Disciplinary information is not in the records themselves, so producers
//! are matched through their journal-article DOIs against an external
//! mapping file (two CSVs: `doi,categories` with `;`-separated categories,
//! and `category,domain`). Each matched article distributes one unit of
//! credit equally across its categories' domains; the modal domain is the
//! weight argmax with deterministic alphabetical tie-breaking.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::{fold_work_type, normalize_doi, ProfileRecord};

/// Validated DOI→categories and category→domain mapping.
#[derive(Debug, Clone, Default)]
pub struct CategoryMap {
    doi_categories: BTreeMap<String, Vec<String>>,
    category_domain: BTreeMap<String, String>,
}

#[derive(Debug, Error)]
pub enum MapError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {reason}")]
    Schema { path: PathBuf, reason: String },
    #[error("category {category:?} has no domain row")]
    UnknownDomain { category: String },
}

impl CategoryMap {
    /// An empty map: every lookup misses.
    pub fn empty() -> Self {
        CategoryMap::default()
    }

    pub fn categories_of(&self, doi: &str) -> Option<&[String]> {
        self.doi_categories.get(doi).map(Vec::as_slice)
    }

    pub fn domain_of(&self, category: &str) -> Option<&str> {
        self.category_domain.get(category).map(String::as_str)
    }

    pub fn domains(&self) -> BTreeSet<&str> {
        self.category_domain.values().map(String::as_str).collect()
    }

    pub fn mapped_dois(&self) -> usize {
        self.doi_categories.len()
    }
}

fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), MapError> {
    let file = std::fs::File::open(path).map_err(|e| MapError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let schema_err = |reason: String| MapError::Schema {
        path: path.to_path_buf(),
        reason,
    };
    let header = reader
        .headers()
        .map_err(|e| schema_err(e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| schema_err(e.to_string()))?;
        rows.push(record.iter().map(str::to_owned).collect());
    }
    Ok((header, rows))
}

/// Load and validate the two mapping files.
///
/// Every category referenced by the DOI section must have a domain row;
/// DOIs are normalized on load so matching is exact afterwards.
pub fn load_category_map(doi_map: &Path, domain_map: &Path) -> Result<CategoryMap, MapError> {
    let schema_err = |path: &Path, reason: String| MapError::Schema {
        path: path.to_path_buf(),
        reason,
    };

    let (header, rows) = read_csv(domain_map)?;
    if header != ["category", "domain"] {
        return Err(schema_err(
            domain_map,
            format!("expected header category,domain; found {header:?}"),
        ));
    }
    let mut category_domain = BTreeMap::new();
    for row in rows {
        let category = row[0].trim().to_string();
        let domain = row[1].trim().to_string();
        if category.is_empty() || domain.is_empty() {
            return Err(schema_err(domain_map, format!("blank field in row {row:?}")));
        }
        if let Some(previous) = category_domain.insert(category.clone(), domain.clone()) {
            if previous != domain {
                return Err(schema_err(
                    domain_map,
                    format!("category {category:?} mapped to both {previous:?} and {domain:?}"),
                ));
            }
        }
    }

    let (header, rows) = read_csv(doi_map)?;
    if header != ["doi", "categories"] {
        return Err(schema_err(
            doi_map,
            format!("expected header doi,categories; found {header:?}"),
        ));
    }
    let mut doi_categories: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for row in rows {
        let doi = normalize_doi(&row[0])
            .map_err(|e| schema_err(doi_map, format!("bad DOI {:?}: {e}", row[0])))?;
        let categories: Vec<String> = row[1]
            .split(';')
            .map(str::trim)
            .filter(|c| !c.is_empty())
            .map(str::to_owned)
            .collect();
        if categories.is_empty() {
            return Err(schema_err(doi_map, format!("no categories for DOI {doi:?}")));
        }
        for category in &categories {
            if !category_domain.contains_key(category) {
                return Err(MapError::UnknownDomain {
                    category: category.clone(),
                });
            }
        }
        let entry = doi_categories.entry(doi).or_default();
        entry.extend(categories);
        entry.sort_unstable();
        entry.dedup();
    }

    Ok(CategoryMap {
        doi_categories,
        category_domain,
    })
}

/// Fractional domain attribution of one researcher.
#[derive(Debug, Clone, PartialEq)]
pub struct DisciplineProfile {
    pub orcid_id: String,
    /// Distinct journal-article DOIs found in the map.
    pub matched_articles: u64,
    /// Domain weights summing to 1 when at least one article matched.
    pub weights: BTreeMap<String, f64>,
    pub modal_domain: Option<String>,
    /// True when several domains share the maximal weight; the assignment
    /// then falls to the alphabetically first of them.
    pub tied: bool,
}

/// Distinct journal-article DOIs on a profile, sorted.
pub fn article_dois(profile: &ProfileRecord) -> Vec<String> {
    let mut dois: Vec<String> = profile
        .works
        .iter()
        .filter(|w| fold_work_type(&w.work_type) == "journalarticle")
        .filter_map(|w| w.doi.clone())
        .collect();
    dois.sort_unstable();
    dois.dedup();
    dois
}

/// Distribute one unit of credit per matched article equally across its
/// categories' domains: an article in `k` categories contributes
/// `1/(matched_articles * k)` per category.
pub fn fractional_weights(profile: &ProfileRecord, map: &CategoryMap) -> DisciplineProfile {
    let dois = article_dois(profile);
    let matched_dois: Vec<&String> = dois
        .iter()
        .filter(|doi| map.categories_of(doi).is_some())
        .collect();
    let matched_articles = matched_dois.len() as u64;

    let mut weights: BTreeMap<String, f64> = BTreeMap::new();
    if matched_articles > 0 {
        let per_article = 1.0 / matched_articles as f64;
        for doi in &matched_dois {
            let categories = map.categories_of(doi).expect("filtered on membership");
            let per_category = per_article / categories.len() as f64;
            for category in categories {
                let domain = map
                    .domain_of(category)
                    .expect("validated on load: every category has a domain");
                *weights.entry(domain.to_string()).or_insert(0.0) += per_category;
            }
        }
    }

    let mut modal_domain = None;
    let mut tied = false;
    let mut best = f64::NEG_INFINITY;
    for (domain, weight) in &weights {
        if *weight > best {
            best = *weight;
            modal_domain = Some(domain.clone());
            tied = false;
        } else if *weight == best {
            tied = true;
        }
    }

    DisciplineProfile {
        orcid_id: profile.orcid_id.clone(),
        matched_articles,
        weights,
        modal_domain,
        tied,
    }
}

/// Producer counts and percentages by modal domain, over producers with at
/// least one matched article.
pub fn discipline_distribution(
    producers: &[DisciplineProfile],
) -> BTreeMap<String, (u64, f64)> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for profile in producers {
        if profile.matched_articles == 0 {
            continue;
        }
        if let Some(domain) = &profile.modal_domain {
            *counts.entry(domain.clone()).or_insert(0) += 1;
        }
    }
    let total: u64 = counts.values().sum();
    counts
        .into_iter()
        .map(|(domain, count)| {
            let percent = count as f64 / total as f64 * 100.0;
            (domain, (count, percent))
        })
        .collect()
}
