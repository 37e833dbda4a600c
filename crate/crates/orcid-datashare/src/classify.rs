//! Dataset identification, repository labeling, source attribution, scenario
//! assignment, and deduplication.
//!
//! A work is a dataset when its folded work type matches `dataset`/`datasets`
//! (the record schema stores `data-set`). Repositories are recognized from
//! text strings inside the normalized DOI. The scenario partitions every
//! (repository, source) combination:
//!
//! * `A` — repository is Zenodo/Dryad/Figshare and the source is DataCite
//! * `B` — repository is Zenodo/Dryad/Figshare, source is not DataCite
//! * `C` — source is DataCite but the repository is none of the three
//! * excluded — everything else
//!
//! In-scope datasets are exactly those in scenarios A, B, or C.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{
    fold_work_type, is_datacite, normalize_source, ProfileRecord, RepositoryLabel, Scenario,
    WorkRecord,
};

/// Scope decision for one dataset-typed work.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetClassification {
    pub orcid_id: String,
    pub put_code: String,
    pub doi: Option<String>,
    pub repository: RepositoryLabel,
    /// Canonical source display name, when the record had one.
    pub source: Option<String>,
    pub source_is_datacite: bool,
    pub scenario: Scenario,
    pub in_scope: bool,
}

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("work {put_code} of {orcid_id} is not dataset-typed (work type {work_type:?})")]
    NotADataset {
        orcid_id: String,
        put_code: String,
        work_type: String,
    },
}

/// True iff the work's folded type is `dataset` or `datasets`.
pub fn is_dataset(work: &WorkRecord) -> bool {
    matches!(fold_work_type(&work.work_type).as_str(), "dataset" | "datasets")
}

/// Recognize a repository from its DOI text string.
///
/// Checks run in the fixed order zenodo, dryad, figshare; first match wins.
/// Works without a DOI cannot be attributed to a repository.
pub fn repository_of(doi: Option<&str>) -> RepositoryLabel {
    let Some(doi) = doi else {
        return RepositoryLabel::Unknown;
    };
    if doi.contains("zenodo") {
        RepositoryLabel::Zenodo
    } else if doi.contains("dryad") {
        RepositoryLabel::Dryad
    } else if doi.contains("figshare") {
        RepositoryLabel::Figshare
    } else {
        RepositoryLabel::Unknown
    }
}

/// Assign the repository/source scenario to a dataset-typed work.
pub fn classify(work: &WorkRecord, owner: &str) -> Result<DatasetClassification, ClassifyError> {
    if !is_dataset(work) {
        return Err(ClassifyError::NotADataset {
            orcid_id: owner.to_string(),
            put_code: work.put_code.clone(),
            work_type: work.work_type.clone(),
        });
    }
    let repository = repository_of(work.doi.as_deref());
    let source_is_datacite = is_datacite(work.source_name.as_deref());
    let scenario = match (repository.is_known(), source_is_datacite) {
        (true, true) => Scenario::RepoViaDataCite,
        (true, false) => Scenario::RepoOtherSource,
        (false, true) => Scenario::DataCiteOnly,
        (false, false) => Scenario::Excluded,
    };
    Ok(DatasetClassification {
        orcid_id: owner.to_string(),
        put_code: work.put_code.clone(),
        doi: work.doi.clone(),
        repository,
        source: normalize_source(work.source_name.as_deref()),
        source_is_datacite,
        scenario,
        in_scope: scenario.in_scope(),
    })
}

/// Cross-profile identity of a dataset: the normalized DOI when present,
/// otherwise the (profile, put-code) pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DatasetKey {
    Doi(String),
    ProfileWork(String, String),
}

pub fn dataset_key(c: &DatasetClassification) -> DatasetKey {
    match &c.doi {
        Some(doi) => DatasetKey::Doi(doi.clone()),
        None => DatasetKey::ProfileWork(c.orcid_id.clone(), c.put_code.clone()),
    }
}

/// Output of [`dedupe`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DedupResult {
    /// One deterministic representative per dataset key, ordered by key.
    pub distinct: Vec<DatasetClassification>,
    /// Per researcher, the number of distinct datasets on their profile.
    pub per_researcher: BTreeMap<String, u64>,
}

/// Deduplicate classifications on dataset identity.
///
/// The same DOI appearing in two profiles counts once in the distinct set
/// but still contributes to both researchers' counts. Among duplicates the
/// representative is the smallest (orcid_id, put_code) pair, which makes the
/// result independent of input order.
pub fn dedupe(classifications: &[DatasetClassification]) -> DedupResult {
    let mut representatives: BTreeMap<DatasetKey, &DatasetClassification> = BTreeMap::new();
    let mut researcher_keys: BTreeMap<&str, BTreeSet<DatasetKey>> = BTreeMap::new();
    for c in classifications {
        let key = dataset_key(c);
        researcher_keys
            .entry(c.orcid_id.as_str())
            .or_default()
            .insert(key.clone());
        representatives
            .entry(key)
            .and_modify(|best| {
                if (c.orcid_id.as_str(), c.put_code.as_str())
                    < (best.orcid_id.as_str(), best.put_code.as_str())
                {
                    *best = c;
                }
            })
            .or_insert(c);
    }
    DedupResult {
        distinct: representatives.into_values().cloned().collect(),
        per_researcher: researcher_keys
            .into_iter()
            .map(|(orcid, keys)| (orcid.to_string(), keys.len() as u64))
            .collect(),
    }
}

/// In-scope dataset table plus producer table.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScopeSelection {
    /// Deduped in-scope classifications, ordered by dataset key.
    pub datasets: Vec<DatasetClassification>,
    /// Researchers with at least one in-scope dataset, with their distinct
    /// in-scope dataset counts.
    pub producers: BTreeMap<String, u64>,
}

/// Classify every dataset-typed work of every profile.
pub fn classify_all<'a>(
    profiles: impl IntoIterator<Item = &'a ProfileRecord>,
) -> Vec<DatasetClassification> {
    profiles
        .into_iter()
        .flat_map(|profile| {
            profile
                .works
                .iter()
                .filter(|w| is_dataset(w))
                .map(|w| classify(w, &profile.orcid_id).expect("filtered on is_dataset"))
        })
        .collect()
}

/// Select in-scope datasets and the researchers producing them.
pub fn select_in_scope<'a>(
    profiles: impl IntoIterator<Item = &'a ProfileRecord>,
) -> ScopeSelection {
    select_in_scope_from(classify_all(profiles))
}

/// Same as [`select_in_scope`] but starting from precomputed classifications.
pub fn select_in_scope_from(classifications: Vec<DatasetClassification>) -> ScopeSelection {
    let in_scope: Vec<DatasetClassification> =
        classifications.into_iter().filter(|c| c.in_scope).collect();
    let deduped = dedupe(&in_scope);
    ScopeSelection {
        datasets: deduped.distinct,
        producers: deduped.per_researcher,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn work(put_code: &str, work_type: &str, doi: Option<&str>, source: Option<&str>) -> WorkRecord {
        WorkRecord {
            put_code: put_code.to_string(),
            work_type: work_type.to_string(),
            doi: doi.map(str::to_string),
            source_name: source.map(str::to_string),
            pub_year: None,
        }
    }

    fn dataset(put_code: &str, doi: Option<&str>, source: Option<&str>) -> WorkRecord {
        work(put_code, "data-set", doi, source)
    }

    #[test]
    fn is_dataset_examples() {
        assert!(is_dataset(&work("1", "data-set", None, None)));
        assert!(is_dataset(&work("1", "DATASET", None, None)));
        assert!(is_dataset(&work("1", "data set", None, None)));
        assert!(is_dataset(&work("1", "datasets", None, None)));
        assert!(!is_dataset(&work("1", "journal-article", None, None)));
        assert!(!is_dataset(&work("1", "", None, None)));
    }

    #[test]
    fn repository_examples() {
        assert_eq!(repository_of(Some("10.5281/zenodo.1206163")), RepositoryLabel::Zenodo);
        assert_eq!(repository_of(Some("10.5061/dryad.9c50s/20")), RepositoryLabel::Dryad);
        assert_eq!(repository_of(Some("10.6084/m9.figshare.9988322")), RepositoryLabel::Figshare);
        assert_eq!(repository_of(Some("10.7910/dvn/xyz")), RepositoryLabel::Unknown);
        assert_eq!(repository_of(None), RepositoryLabel::Unknown);
        // fixed check order: zenodo wins on a contrived multi-label string
        assert_eq!(repository_of(Some("10.1/dryad.zenodo")), RepositoryLabel::Zenodo);
    }

    #[test]
    fn classify_scenarios() {
        let a = classify(&dataset("1", Some("10.5281/zenodo.1"), Some("DataCite")), "x").unwrap();
        assert_eq!(a.scenario, Scenario::RepoViaDataCite);
        assert!(a.in_scope);

        let b = classify(
            &dataset("2", Some("10.5061/dryad.1"), Some("ResearcherPortal")),
            "x",
        )
        .unwrap();
        assert_eq!(b.scenario, Scenario::RepoOtherSource);
        assert!(b.in_scope);

        let c = classify(&dataset("3", Some("10.7910/dvn/xyz"), Some("DataCite")), "x").unwrap();
        assert_eq!(c.scenario, Scenario::DataCiteOnly);
        assert!(c.in_scope);

        let excluded =
            classify(&dataset("4", Some("10.7910/dvn/xyz"), Some("Crossref")), "x").unwrap();
        assert_eq!(excluded.scenario, Scenario::Excluded);
        assert!(!excluded.in_scope);
    }

    #[test]
    fn classify_rejects_non_dataset() {
        let err = classify(&work("9", "journal-article", None, None), "x").unwrap_err();
        assert!(matches!(err, ClassifyError::NotADataset { .. }));
    }

    #[test]
    fn doiless_dataset_in_scope_only_via_datacite() {
        let c = classify(&dataset("1", None, Some("DataCite")), "x").unwrap();
        assert_eq!(c.scenario, Scenario::DataCiteOnly);
        let excluded = classify(&dataset("2", None, Some("manual entry")), "x").unwrap();
        assert_eq!(excluded.scenario, Scenario::Excluded);
    }

    // Exhaustive scenario partition over repository × source.
    #[test]
    fn scenario_truth_table() {
        let dois = [
            Some("10.5281/zenodo.1"),
            Some("10.5061/dryad.1"),
            Some("10.6084/m9.figshare.1"),
            Some("10.7910/dvn/1"),
        ];
        let sources = [Some("DataCite"), Some("Crossref"), None];
        for doi in dois {
            for source in sources {
                let c = classify(&dataset("1", doi, source), "x").unwrap();
                let repo_known = c.repository.is_known();
                let datacite = is_datacite(source);
                let expected = match (repo_known, datacite) {
                    (true, true) => Scenario::RepoViaDataCite,
                    (true, false) => Scenario::RepoOtherSource,
                    (false, true) => Scenario::DataCiteOnly,
                    (false, false) => Scenario::Excluded,
                };
                assert_eq!(c.scenario, expected);
                assert_eq!(c.in_scope, repo_known || datacite);
                assert_eq!(c.in_scope, c.scenario.in_scope());
            }
        }
    }

    fn classification(orcid: &str, put_code: &str, doi: Option<&str>) -> DatasetClassification {
        classify(&dataset(put_code, doi, Some("DataCite")), orcid).unwrap()
    }

    #[test]
    fn dedupe_same_doi_same_profile() {
        let input = vec![
            classification("0000-0000-0000-0001", "1", Some("10.5281/zenodo.9")),
            classification("0000-0000-0000-0001", "2", Some("10.5281/zenodo.9")),
        ];
        let result = dedupe(&input);
        assert_eq!(result.distinct.len(), 1);
        assert_eq!(result.per_researcher.len(), 1);
        assert_eq!(result.per_researcher["0000-0000-0000-0001"], 1);
    }

    #[test]
    fn dedupe_same_doi_two_profiles() {
        let input = vec![
            classification("0000-0000-0000-0001", "1", Some("10.5281/zenodo.9")),
            classification("0000-0000-0000-0002", "7", Some("10.5281/zenodo.9")),
        ];
        let result = dedupe(&input);
        assert_eq!(result.distinct.len(), 1);
        assert_eq!(result.per_researcher.len(), 2);
        // representative is the smallest (orcid, put_code)
        assert_eq!(result.distinct[0].orcid_id, "0000-0000-0000-0001");
    }

    #[test]
    fn dedupe_empty() {
        let result = dedupe(&[]);
        assert!(result.distinct.is_empty());
        assert!(result.per_researcher.is_empty());
    }

    #[test]
    fn dedupe_doiless_keyed_per_work() {
        let input = vec![
            classification("0000-0000-0000-0001", "1", None),
            classification("0000-0000-0000-0001", "2", None),
        ];
        let result = dedupe(&input);
        assert_eq!(result.distinct.len(), 2);
        assert_eq!(result.per_researcher["0000-0000-0000-0001"], 2);
    }

    fn profile(orcid: &str, works: Vec<WorkRecord>) -> ProfileRecord {
        ProfileRecord {
            orcid_id: orcid.to_string(),
            works,
            affiliations: vec![],
        }
    }

    #[test]
    fn select_in_scope_counts_producers() {
        // 10 profiles, 4 with in-scope datasets
        let profiles = vec![
            profile("0000-0000-0000-0001", vec![dataset("1", Some("10.5281/zenodo.1"), Some("DataCite"))]),
            profile("0000-0000-0000-0002", vec![dataset("1", Some("10.5061/dryad.2"), Some("Other"))]),
            profile("0000-0000-0000-0003", vec![dataset("1", Some("10.7910/dvn/3"), Some("DataCite"))]),
            // scenarios A and C on one profile: one producer, both datasets retained
            profile(
                "0000-0000-0000-0004",
                vec![
                    dataset("1", Some("10.6084/m9.figshare.4"), Some("DataCite")),
                    dataset("2", Some("10.7910/dvn/4"), Some("DataCite")),
                ],
            ),
            // excluded only: not a producer
            profile("0000-0000-0000-0005", vec![dataset("1", Some("10.7910/dvn/5"), Some("Crossref"))]),
            profile("0000-0000-0000-0006", vec![work("1", "journal-article", Some("10.1000/6"), None)]),
            profile("0000-0000-0000-0007", vec![]),
            profile("0000-0000-0000-0008", vec![]),
            profile("0000-0000-0000-0009", vec![]),
            profile("0000-0000-0000-0010", vec![]),
        ];
        let selection = select_in_scope(&profiles);
        assert_eq!(selection.producers.len(), 4);
        assert!(!selection.producers.contains_key("0000-0000-0000-0005"));
        assert_eq!(selection.producers["0000-0000-0000-0004"], 2);
        assert_eq!(selection.datasets.len(), 5);
    }

    fn arbitrary_classification() -> impl Strategy<Value = DatasetClassification> {
        (
            0..5u32,
            0..8u32,
            prop_oneof![Just(None), (0..6u32).prop_map(Some)],
            prop_oneof![
                Just(Some("DataCite")),
                Just(Some("Crossref")),
                Just(None)
            ],
        )
            .prop_map(|(owner, put_code, doi, source)| {
                let doi_string = doi.map(|d| format!("10.5281/zenodo.{d}"));
                classify(
                    &WorkRecord {
                        put_code: put_code.to_string(),
                        work_type: "data-set".to_string(),
                        doi: doi_string,
                        source_name: source.map(str::to_string),
                        pub_year: None,
                    },
                    &format!("0000-0000-0000-{owner:04}"),
                )
                .unwrap()
            })
    }

    proptest! {
        #[test]
        fn dedupe_permutation_invariant_and_idempotent(
            mut input in proptest::collection::vec(arbitrary_classification(), 0..30)
        ) {
            let forward = dedupe(&input);
            input.reverse();
            let backward = dedupe(&input);
            prop_assert_eq!(&forward, &backward);

            let again = dedupe(&forward.distinct);
            prop_assert_eq!(&again.distinct, &forward.distinct);

            // distinct count never exceeds raw count; producers never exceed profiles
            prop_assert!(forward.distinct.len() <= input.len());
            let owners: BTreeSet<_> = input.iter().map(|c| c.orcid_id.clone()).collect();
            prop_assert!(forward.per_researcher.len() <= owners.len());
        }
    }
}
