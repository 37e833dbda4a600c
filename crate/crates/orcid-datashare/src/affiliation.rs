//! Country resolution from employment and education/qualification entries.
//!
//! Both affiliation sections are merged into one dated-country table per
//! researcher; the researcher is then linked to the country (or countries)
//! of their most recent entries. An absent end date means the position is
//! ongoing and therefore most recent; entries with no dates at all rank
//! below any dated entry and only count when nothing dated exists.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{is_valid_country_code, ProfileRecord};

/// One merged affiliation entry that carries a country.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatedCountry {
    pub country: String,
    pub start_year: Option<i32>,
    pub end_year: Option<i32>,
    /// False when the country value is not an assigned ISO-3166 alpha-2
    /// code; such entries are kept but surfaced in validation summaries.
    pub valid_code: bool,
}

/// Merge employment and education/qualification entries, keeping only those
/// with a country. Dirty country codes are retained and flagged.
pub fn merge_affiliations(profile: &ProfileRecord) -> Vec<DatedCountry> {
    profile
        .affiliations
        .iter()
        .filter_map(|aff| {
            let country = aff.country.as_deref()?.trim();
            if country.is_empty() {
                return None;
            }
            Some(DatedCountry {
                country: country.to_string(),
                start_year: aff.start_year,
                end_year: aff.end_year,
                valid_code: is_valid_country_code(country),
            })
        })
        .collect()
}

/// Recency key: ongoing (no end date) sorts above any ended entry, later
/// end years above earlier ones, ties broken by later start year.
fn recency_key(entry: &DatedCountry) -> (i64, i64) {
    let end = entry.end_year.map(i64::from).unwrap_or(i64::MAX);
    let start = entry.start_year.map(i64::from).unwrap_or(i64::MIN);
    (end, start)
}

fn is_dated(entry: &DatedCountry) -> bool {
    entry.start_year.is_some() || entry.end_year.is_some()
}

/// The countries of a researcher's most recent affiliations.
///
/// All entries sharing the maximal recency key contribute, so a researcher
/// may map to several countries. Order of the input never matters.
pub fn most_recent_countries(entries: &[DatedCountry]) -> BTreeSet<String> {
    let dated: Vec<&DatedCountry> = entries.iter().filter(|e| is_dated(e)).collect();
    let pool: Vec<&DatedCountry> = if dated.is_empty() {
        entries.iter().collect()
    } else {
        let best = dated.iter().map(|e| recency_key(e)).max().unwrap();
        dated.into_iter().filter(|e| recency_key(e) == best).collect()
    };
    pool.into_iter().map(|e| e.country.clone()).collect()
}

/// Researcher→country link tables over producers and over every profile.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CountryLinks {
    /// Distinct (orcid_id, country) pairs for producers.
    pub producer_links: BTreeSet<(String, String)>,
    /// Distinct (orcid_id, country) pairs over every profile.
    pub all_links: BTreeSet<(String, String)>,
    /// Merged country-bearing affiliation rows over every profile, before
    /// recency resolution. Reported alongside the distinct link counts.
    pub raw_affiliation_rows: u64,
    /// Same, restricted to producers.
    pub raw_producer_affiliation_rows: u64,
    /// Affiliation rows whose country value is not an assigned ISO-3166
    /// alpha-2 code.
    pub invalid_country_rows: u64,
}

/// Build the two link tables from a profile stream.
pub fn build_country_links<'a>(
    profiles: impl IntoIterator<Item = &'a ProfileRecord>,
    producers: &BTreeSet<String>,
) -> CountryLinks {
    let mut links = CountryLinks::default();
    for profile in profiles {
        let merged = merge_affiliations(profile);
        let is_producer = producers.contains(&profile.orcid_id);
        links.raw_affiliation_rows += merged.len() as u64;
        links.invalid_country_rows += merged.iter().filter(|e| !e.valid_code).count() as u64;
        if is_producer {
            links.raw_producer_affiliation_rows += merged.len() as u64;
        }
        for country in most_recent_countries(&merged) {
            if is_producer {
                links
                    .producer_links
                    .insert((profile.orcid_id.clone(), country.clone()));
            }
            links.all_links.insert((profile.orcid_id.clone(), country));
        }
    }
    links
}

/// Researchers per country, from a distinct link table.
pub fn country_counts(links: &BTreeSet<(String, String)>) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for (_, country) in links {
        *counts.entry(country.clone()).or_insert(0) += 1;
    }
    counts
}

/// Distinct researchers appearing in a link table.
pub fn linked_researchers(links: &BTreeSet<(String, String)>) -> u64 {
    links
        .iter()
        .map(|(orcid, _)| orcid.as_str())
        .collect::<BTreeSet<_>>()
        .len() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AffiliationRecord, AffiliationSection};
    use proptest::prelude::*;

    fn aff(
        section: AffiliationSection,
        country: Option<&str>,
        start: Option<i32>,
        end: Option<i32>,
    ) -> AffiliationRecord {
        AffiliationRecord {
            section,
            country: country.map(str::to_string),
            role_title: None,
            start_year: start,
            end_year: end,
        }
    }

    fn entry(country: &str, start: Option<i32>, end: Option<i32>) -> DatedCountry {
        DatedCountry {
            country: country.to_string(),
            start_year: start,
            end_year: end,
            valid_code: is_valid_country_code(country),
        }
    }

    fn profile(orcid: &str, affiliations: Vec<AffiliationRecord>) -> ProfileRecord {
        ProfileRecord {
            orcid_id: orcid.to_string(),
            works: vec![],
            affiliations,
        }
    }

    #[test]
    fn merge_unions_both_sections() {
        let p = profile(
            "0000-0000-0000-0001",
            vec![
                aff(AffiliationSection::Employment, Some("NL"), Some(2010), None),
                aff(AffiliationSection::Employment, Some("ES"), Some(2005), Some(2010)),
                aff(AffiliationSection::EducationQualification, Some("ES"), Some(2000), Some(2005)),
            ],
        );
        assert_eq!(merge_affiliations(&p).len(), 3);
    }

    #[test]
    fn merge_drops_countryless_entries() {
        let p = profile(
            "0000-0000-0000-0001",
            vec![
                aff(AffiliationSection::Employment, None, Some(2010), None),
                aff(AffiliationSection::EducationQualification, Some("  "), None, None),
            ],
        );
        assert!(merge_affiliations(&p).is_empty());
    }

    #[test]
    fn merge_keeps_invalid_code_flagged() {
        let p = profile(
            "0000-0000-0000-0001",
            vec![aff(AffiliationSection::Employment, Some("XX"), Some(2012), None)],
        );
        let merged = merge_affiliations(&p);
        assert_eq!(merged.len(), 1);
        assert!(!merged[0].valid_code);
    }

    #[test]
    fn ongoing_beats_ended() {
        let entries = vec![entry("NL", Some(2010), Some(2018)), entry("ES", Some(2016), None)];
        let expected: BTreeSet<String> = ["ES".to_string()].into();
        assert_eq!(most_recent_countries(&entries), expected);
    }

    #[test]
    fn equal_end_years_tie_to_both_countries() {
        let entries = vec![entry("NL", None, Some(2019)), entry("ES", None, Some(2019))];
        let expected: BTreeSet<String> = ["ES".to_string(), "NL".to_string()].into();
        assert_eq!(most_recent_countries(&entries), expected);
    }

    #[test]
    fn later_start_breaks_end_tie() {
        let entries = vec![entry("NL", Some(2014), Some(2019)), entry("ES", Some(2016), Some(2019))];
        let expected: BTreeSet<String> = ["ES".to_string()].into();
        assert_eq!(most_recent_countries(&entries), expected);
    }

    #[test]
    fn empty_entries_give_empty_set() {
        assert!(most_recent_countries(&[]).is_empty());
    }

    #[test]
    fn undated_entries_rank_below_dated() {
        let entries = vec![entry("NL", Some(2010), Some(2018)), entry("ES", None, None)];
        let expected: BTreeSet<String> = ["NL".to_string()].into();
        assert_eq!(most_recent_countries(&entries), expected);
    }

    #[test]
    fn undated_entries_count_when_nothing_dated() {
        let entries = vec![entry("ES", None, None), entry("NL", None, None)];
        let expected: BTreeSet<String> = ["ES".to_string(), "NL".to_string()].into();
        assert_eq!(most_recent_countries(&entries), expected);
    }

    #[test]
    fn link_tables_count_distinct_researchers() {
        // 5 profiles (3 producers); NL: 3 total / 2 producers, ES: 2 / 1
        let profiles = vec![
            profile("0000-0000-0000-0001", vec![aff(AffiliationSection::Employment, Some("NL"), Some(2015), None)]),
            profile(
                "0000-0000-0000-0002",
                vec![
                    aff(AffiliationSection::Employment, Some("NL"), None, Some(2019)),
                    aff(AffiliationSection::EducationQualification, Some("ES"), None, Some(2019)),
                ],
            ),
            profile("0000-0000-0000-0003", vec![aff(AffiliationSection::Employment, Some("NL"), Some(2012), None)]),
            profile("0000-0000-0000-0004", vec![aff(AffiliationSection::EducationQualification, Some("ES"), Some(2010), None)]),
            profile("0000-0000-0000-0005", vec![]),
        ];
        let producers: BTreeSet<String> = [
            "0000-0000-0000-0001".to_string(),
            "0000-0000-0000-0002".to_string(),
            "0000-0000-0000-0004".to_string(),
        ]
        .into();
        let links = build_country_links(&profiles, &producers);

        let all = country_counts(&links.all_links);
        assert_eq!(all["NL"], 3);
        assert_eq!(all["ES"], 2);
        let prod = country_counts(&links.producer_links);
        assert_eq!(prod["NL"], 2);
        assert_eq!(prod["ES"], 2);

        // profile 2 is one producer in two countries, counted once per country
        assert_eq!(linked_researchers(&links.producer_links), 3);
        assert_eq!(links.raw_affiliation_rows, 5);
        assert_eq!(links.raw_producer_affiliation_rows, 4);
    }

    #[test]
    fn producer_without_country_in_neither_table() {
        let profiles = vec![profile("0000-0000-0000-0001", vec![])];
        let producers: BTreeSet<String> = ["0000-0000-0000-0001".to_string()].into();
        let links = build_country_links(&profiles, &producers);
        assert!(links.producer_links.is_empty());
        assert!(links.all_links.is_empty());
    }

    #[test]
    fn producer_counts_bounded_by_totals() {
        let profiles = vec![
            profile("0000-0000-0000-0001", vec![aff(AffiliationSection::Employment, Some("NL"), Some(2015), None)]),
            profile("0000-0000-0000-0002", vec![aff(AffiliationSection::Employment, Some("NL"), Some(2015), None)]),
        ];
        let producers: BTreeSet<String> = ["0000-0000-0000-0001".to_string()].into();
        let links = build_country_links(&profiles, &producers);
        for (country, n) in country_counts(&links.producer_links) {
            assert!(n <= country_counts(&links.all_links)[&country]);
        }
    }

    fn arbitrary_entry() -> impl Strategy<Value = DatedCountry> {
        (
            prop_oneof![Just("NL"), Just("ES"), Just("DE"), Just("XX")],
            proptest::option::of(1990..2020i32),
            proptest::option::of(1990..2020i32),
        )
            .prop_map(|(country, start, end)| entry(country, start, end))
    }

    proptest! {
        #[test]
        fn most_recent_is_permutation_invariant(
            mut entries in proptest::collection::vec(arbitrary_entry(), 0..12)
        ) {
            let forward = most_recent_countries(&entries);
            entries.reverse();
            prop_assert_eq!(most_recent_countries(&entries), forward);
        }

        #[test]
        fn dropping_non_producers_keeps_producer_links(
            countries in proptest::collection::vec(
                prop_oneof![Just("NL"), Just("ES"), Just("DE")], 2..8
            )
        ) {
            let profiles: Vec<ProfileRecord> = countries
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    profile(
                        &format!("0000-0000-0000-{i:04}"),
                        vec![aff(AffiliationSection::Employment, Some(c), Some(2015), None)],
                    )
                })
                .collect();
            // every even profile is a producer
            let producers: BTreeSet<String> = profiles
                .iter()
                .step_by(2)
                .map(|p| p.orcid_id.clone())
                .collect();
            let full = build_country_links(&profiles, &producers);
            let only_producers: Vec<ProfileRecord> = profiles
                .iter()
                .filter(|p| producers.contains(&p.orcid_id))
                .cloned()
                .collect();
            let reduced = build_country_links(&only_producers, &producers);
            prop_assert_eq!(full.producer_links, reduced.producer_links);
        }
    }
}
