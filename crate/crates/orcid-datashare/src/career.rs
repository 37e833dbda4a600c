//! Academic-age extraction: PhD start detection from free-text education
//! entries and time-to-first-output statistics by PhD cohort.
//!
//! PhD status is free text in the records, so detection scans folded
//! education/qualification role titles against an English keyword lexicon.
//! First outputs are the earliest dated in-scope dataset and the earliest
//! dated journal article; a researcher counts toward a cohort only when the
//! first output falls inside the forward-looking window after PhD start.

use std::io::BufRead;
use std::path::Path;

use crate::classify::{classify, is_dataset};
use crate::model::{fold_text, fold_work_type, AffiliationRecord, AffiliationSection, ProfileRecord};

/// Built-in English PhD status keywords, matched against folded role titles.
pub const DEFAULT_PHD_KEYWORDS: &[&str] = &["phd", "ph d", "dphil", "doctorate", "doctoral"];

/// Keyword lexicon for PhD status detection. Terms are folded on load, so a
/// lexicon file may contain `Ph.D.` and still match.
#[derive(Debug, Clone)]
pub struct PhdLexicon {
    terms: Vec<String>,
}

impl Default for PhdLexicon {
    fn default() -> Self {
        Self::from_terms(DEFAULT_PHD_KEYWORDS.iter().copied())
    }
}

impl PhdLexicon {
    pub fn from_terms<'a>(terms: impl IntoIterator<Item = &'a str>) -> Self {
        let mut folded: Vec<String> = terms
            .into_iter()
            .map(fold_text)
            .filter(|t| !t.is_empty())
            .collect();
        folded.sort_unstable();
        folded.dedup();
        PhdLexicon { terms: folded }
    }

    /// Load a one-term-per-line lexicon file. Blank lines are skipped.
    pub fn from_file(path: &Path) -> std::io::Result<Self> {
        let file = std::fs::File::open(path)?;
        let mut terms = Vec::new();
        for line in std::io::BufReader::new(file).lines() {
            terms.push(line?);
        }
        Ok(Self::from_terms(terms.iter().map(String::as_str)))
    }

    pub fn matches(&self, role_title: &str) -> bool {
        let folded = fold_text(role_title);
        self.terms.iter().any(|t| folded.contains(t.as_str()))
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }
}

/// Detect the PhD start year from education/qualification role titles.
///
/// Returns the earliest start year among matching entries; entries that
/// match but carry no start year cannot contribute one.
pub fn detect_phd_start(affiliations: &[AffiliationRecord], lexicon: &PhdLexicon) -> Option<i32> {
    affiliations
        .iter()
        .filter(|aff| aff.section == AffiliationSection::EducationQualification)
        .filter(|aff| {
            aff.role_title
                .as_deref()
                .map(|t| lexicon.matches(t))
                .unwrap_or(false)
        })
        .filter_map(|aff| aff.start_year)
        .min()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    Dataset,
    JournalArticle,
}

/// Year of the researcher's first output of the given kind, if any is dated.
///
/// Datasets count only when in scope (scenarios A/B/C); journal articles are
/// works whose folded type is `journal-article`.
pub fn first_output_year(profile: &ProfileRecord, kind: OutputKind) -> Option<i32> {
    profile
        .works
        .iter()
        .filter(|work| match kind {
            OutputKind::Dataset => {
                is_dataset(work)
                    && classify(work, &profile.orcid_id)
                        .map(|c| c.in_scope)
                        .unwrap_or(false)
            }
            OutputKind::JournalArticle => fold_work_type(&work.work_type) == "journalarticle",
        })
        .filter_map(|work| work.pub_year)
        .min()
}

/// Per-researcher career milestones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CareerRecord {
    pub orcid_id: String,
    pub phd_start_year: Option<i32>,
    pub first_dataset_year: Option<i32>,
    pub first_article_year: Option<i32>,
}

pub fn career_record(profile: &ProfileRecord, lexicon: &PhdLexicon) -> CareerRecord {
    CareerRecord {
        orcid_id: profile.orcid_id.clone(),
        phd_start_year: detect_phd_start(&profile.affiliations, lexicon),
        first_dataset_year: first_output_year(profile, OutputKind::Dataset),
        first_article_year: first_output_year(profile, OutputKind::JournalArticle),
    }
}

/// Window eligibility per output kind: the years from PhD start to the
/// first output, present only when `0 <= delta <= window`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Eligibility {
    pub dataset_delta: Option<u32>,
    pub article_delta: Option<u32>,
}

fn eligible_delta(phd_start: Option<i32>, first: Option<i32>, window: u32) -> Option<u32> {
    let delta = i64::from(first?) - i64::from(phd_start?);
    if delta >= 0 && delta <= i64::from(window) {
        Some(delta as u32)
    } else {
        None
    }
}

/// Apply the forward-looking publication window. Outputs predating the PhD
/// start are excluded, not clamped.
pub fn window_filter(career: &CareerRecord, window: u32) -> Eligibility {
    assert!(window >= 1, "window must be >= 1");
    Eligibility {
        dataset_delta: eligible_delta(career.phd_start_year, career.first_dataset_year, window),
        article_delta: eligible_delta(career.phd_start_year, career.first_article_year, window),
    }
}

/// Aggregated time-to-first-output for one PhD start cohort.
#[derive(Debug, Clone, PartialEq)]
pub struct CohortStat {
    pub cohort_year: i32,
    pub n_dataset: u64,
    pub mean_years_to_dataset: Option<f64>,
    pub n_article: u64,
    pub mean_years_to_article: Option<f64>,
}

/// Per-cohort means of the eligible deltas, separately for datasets and
/// journal articles. Cohorts with no eligible researchers report count 0
/// and an absent mean.
pub fn cohort_stats(
    careers: &[CareerRecord],
    cohort_range: (i32, i32),
    window: u32,
) -> Vec<CohortStat> {
    let (first_year, last_year) = cohort_range;
    assert!(first_year <= last_year, "cohort range must be well-ordered");
    (first_year..=last_year)
        .map(|cohort_year| {
            let mut dataset_sum = 0u64;
            let mut n_dataset = 0u64;
            let mut article_sum = 0u64;
            let mut n_article = 0u64;
            for career in careers {
                if career.phd_start_year != Some(cohort_year) {
                    continue;
                }
                let eligibility = window_filter(career, window);
                if let Some(delta) = eligibility.dataset_delta {
                    dataset_sum += u64::from(delta);
                    n_dataset += 1;
                }
                if let Some(delta) = eligibility.article_delta {
                    article_sum += u64::from(delta);
                    n_article += 1;
                }
            }
            CohortStat {
                cohort_year,
                n_dataset,
                mean_years_to_dataset: mean(dataset_sum, n_dataset),
                n_article,
                mean_years_to_article: mean(article_sum, n_article),
            }
        })
        .collect()
}

fn mean(sum: u64, count: u64) -> Option<f64> {
    if count == 0 {
        None
    } else {
        Some(sum as f64 / count as f64)
    }
}

/// How the dataset-eligible population splits around the cohort range.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EraBreakdown {
    pub pre_count: u64,
    pub in_range_count: u64,
    pub post_count: u64,
    pub pre_share: Option<f64>,
    pub in_range_share: Option<f64>,
    pub post_share: Option<f64>,
}

impl EraBreakdown {
    pub fn total(&self) -> u64 {
        self.pre_count + self.in_range_count + self.post_count
    }
}

/// Split the dataset-eligible researchers (known PhD start, first dataset
/// within the window) into before / inside / after the cohort range. Shares
/// sum to 1 over a non-empty population and are absent otherwise.
pub fn era_breakdown(
    careers: &[CareerRecord],
    cohort_range: (i32, i32),
    window: u32,
) -> EraBreakdown {
    let (first_year, last_year) = cohort_range;
    assert!(first_year <= last_year, "cohort range must be well-ordered");
    let mut breakdown = EraBreakdown::default();
    for career in careers {
        let Some(phd_year) = career.phd_start_year else {
            continue;
        };
        if window_filter(career, window).dataset_delta.is_none() {
            continue;
        }
        if phd_year < first_year {
            breakdown.pre_count += 1;
        } else if phd_year <= last_year {
            breakdown.in_range_count += 1;
        } else {
            breakdown.post_count += 1;
        }
    }
    let total = breakdown.total();
    if total > 0 {
        breakdown.pre_share = Some(breakdown.pre_count as f64 / total as f64);
        breakdown.in_range_share = Some(breakdown.in_range_count as f64 / total as f64);
        breakdown.post_share = Some(breakdown.post_count as f64 / total as f64);
    }
    breakdown
}
