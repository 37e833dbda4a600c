//! Synthetic record corpora for examples, tests, and scale runs.
//!
//! A [`RecordSketch`] is a declarative description of one profile; it
//! renders to record-summary XML in the public-data-file layout and can be
//! written out as a fixture directory or a tar.gz archive. Sketches are
//! plain data, so test oracles can recount them directly without going
//! through the parser or the pipeline.

use std::io::Write;
use std::path::Path;

use crate::model::AffiliationSection;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkSketch {
    pub put_code: String,
    pub work_type: String,
    /// Raw identifier value as it would appear in the record (may carry a
    /// resolver prefix or uppercase letters).
    pub doi: Option<String>,
    pub source: Option<String>,
    pub pub_year: Option<i32>,
}

impl WorkSketch {
    pub fn new(put_code: &str, work_type: &str) -> Self {
        WorkSketch {
            put_code: put_code.to_string(),
            work_type: work_type.to_string(),
            doi: None,
            source: None,
            pub_year: None,
        }
    }

    pub fn doi(mut self, doi: &str) -> Self {
        self.doi = Some(doi.to_string());
        self
    }

    pub fn source(mut self, source: &str) -> Self {
        self.source = Some(source.to_string());
        self
    }

    pub fn year(mut self, year: i32) -> Self {
        self.pub_year = Some(year);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffiliationSketch {
    pub section: AffiliationSection,
    /// Education entries render as `qualification-summary` when set.
    pub as_qualification: bool,
    pub country: Option<String>,
    pub role_title: Option<String>,
    pub start_year: Option<i32>,
    pub end_year: Option<i32>,
}

impl AffiliationSketch {
    pub fn employment() -> Self {
        AffiliationSketch {
            section: AffiliationSection::Employment,
            as_qualification: false,
            country: None,
            role_title: None,
            start_year: None,
            end_year: None,
        }
    }

    pub fn education() -> Self {
        AffiliationSketch {
            section: AffiliationSection::EducationQualification,
            ..Self::employment()
        }
    }

    /// Render as a qualification entry (same section as education).
    pub fn qualification() -> Self {
        AffiliationSketch {
            as_qualification: true,
            ..Self::education()
        }
    }

    pub fn country(mut self, country: &str) -> Self {
        self.country = Some(country.to_string());
        self
    }

    pub fn role(mut self, role: &str) -> Self {
        self.role_title = Some(role.to_string());
        self
    }

    pub fn start(mut self, year: i32) -> Self {
        self.start_year = Some(year);
        self
    }

    pub fn end(mut self, year: i32) -> Self {
        self.end_year = Some(year);
        self
    }
}

/// Declarative description of one synthetic profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordSketch {
    pub orcid_id: String,
    pub works: Vec<WorkSketch>,
    pub affiliations: Vec<AffiliationSketch>,
}

impl RecordSketch {
    pub fn new(orcid_id: &str) -> Self {
        RecordSketch {
            orcid_id: orcid_id.to_string(),
            works: Vec::new(),
            affiliations: Vec::new(),
        }
    }

    pub fn work(mut self, work: WorkSketch) -> Self {
        self.works.push(work);
        self
    }

    pub fn affiliation(mut self, affiliation: AffiliationSketch) -> Self {
        self.affiliations.push(affiliation);
        self
    }

    /// Render the record-summary XML for this sketch.
    pub fn to_xml(&self) -> String {
        let mut body = String::new();

        let employments: Vec<&AffiliationSketch> = self
            .affiliations
            .iter()
            .filter(|a| a.section == AffiliationSection::Employment)
            .collect();
        let educations: Vec<&AffiliationSketch> = self
            .affiliations
            .iter()
            .filter(|a| a.section == AffiliationSection::EducationQualification && !a.as_qualification)
            .collect();
        let qualifications: Vec<&AffiliationSketch> = self
            .affiliations
            .iter()
            .filter(|a| a.section == AffiliationSection::EducationQualification && a.as_qualification)
            .collect();

        push_affiliation_section(&mut body, "employments", "employment", &employments);
        push_affiliation_section(&mut body, "educations", "education", &educations);
        push_affiliation_section(&mut body, "qualifications", "qualification", &qualifications);

        if !self.works.is_empty() {
            body.push_str("    <activities:works>\n");
            for work in &self.works {
                push_work_group(&mut body, work);
            }
            body.push_str("    </activities:works>\n");
        }

        format!(
            r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<record:record xmlns:record="http://www.orcid.org/ns/record" xmlns:common="http://www.orcid.org/ns/common" xmlns:person="http://www.orcid.org/ns/person" xmlns:activities="http://www.orcid.org/ns/activities" xmlns:work="http://www.orcid.org/ns/work" xmlns:education="http://www.orcid.org/ns/education" xmlns:employment="http://www.orcid.org/ns/employment" xmlns:qualification="http://www.orcid.org/ns/qualification" path="/{id}">
  <common:orcid-identifier>
    <common:uri>https://orcid.org/{id}</common:uri>
    <common:path>{id}</common:path>
    <common:host>orcid.org</common:host>
  </common:orcid-identifier>
  <person:person path="/{id}/person"/>
  <activities:activities-summary path="/{id}/activities">
{body}  </activities:activities-summary>
</record:record>
"#,
            id = xml_escape(&self.orcid_id),
            body = body,
        )
    }

    /// Archive member path in the public-file layout: the last three iD
    /// characters name the shard directory.
    pub fn member_path(&self) -> String {
        let shard = &self.orcid_id[self.orcid_id.len().saturating_sub(3)..];
        format!("summaries/{shard}/{}.xml", self.orcid_id)
    }
}

fn xml_escape(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for c in raw.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn push_date(body: &mut String, element: &str, year: Option<i32>) {
    if let Some(year) = year {
        body.push_str(&format!(
            "            <common:{element}><common:year>{year}</common:year></common:{element}>\n"
        ));
    }
}

fn push_affiliation_section(
    body: &mut String,
    plural: &str,
    kind: &str,
    entries: &[&AffiliationSketch],
) {
    if entries.is_empty() {
        return;
    }
    body.push_str(&format!("    <activities:{plural}>\n"));
    for entry in entries {
        body.push_str("      <activities:affiliation-group>\n");
        body.push_str(&format!("        <{kind}:{kind}-summary>\n"));
        if let Some(role) = &entry.role_title {
            body.push_str(&format!(
                "            <common:role-title>{}</common:role-title>\n",
                xml_escape(role)
            ));
        }
        push_date(body, "start-date", entry.start_year);
        push_date(body, "end-date", entry.end_year);
        body.push_str("            <common:organization>\n");
        body.push_str("              <common:name>Synthetic Organization</common:name>\n");
        body.push_str("              <common:address>\n");
        body.push_str("                <common:city>Sample City</common:city>\n");
        if let Some(country) = &entry.country {
            body.push_str(&format!(
                "                <common:country>{}</common:country>\n",
                xml_escape(country)
            ));
        }
        body.push_str("              </common:address>\n");
        body.push_str("            </common:organization>\n");
        body.push_str(&format!("        </{kind}:{kind}-summary>\n"));
        body.push_str("      </activities:affiliation-group>\n");
    }
    body.push_str(&format!("    </activities:{plural}>\n"));
}

fn push_work_group(body: &mut String, work: &WorkSketch) {
    body.push_str("      <activities:group>\n");
    // group-level identifiers mirror the real layout; the parser must take
    // the ones inside the summary
    if let Some(doi) = &work.doi {
        body.push_str("        <common:external-ids>\n");
        body.push_str("          <common:external-id>\n");
        body.push_str("            <common:external-id-type>doi</common:external-id-type>\n");
        body.push_str(&format!(
            "            <common:external-id-value>{}</common:external-id-value>\n",
            xml_escape(doi)
        ));
        body.push_str("          </common:external-id>\n");
        body.push_str("        </common:external-ids>\n");
    }
    body.push_str(&format!(
        "        <work:work-summary put-code=\"{}\">\n",
        xml_escape(&work.put_code)
    ));
    if let Some(source) = &work.source {
        body.push_str(&format!(
            "          <common:source><common:source-name>{}</common:source-name></common:source>\n",
            xml_escape(source)
        ));
    }
    if let Some(doi) = &work.doi {
        body.push_str("          <common:external-ids>\n");
        body.push_str("            <common:external-id>\n");
        body.push_str("              <common:external-id-type>doi</common:external-id-type>\n");
        body.push_str(&format!(
            "              <common:external-id-value>{}</common:external-id-value>\n",
            xml_escape(doi)
        ));
        body.push_str("              <common:external-id-relationship>self</common:external-id-relationship>\n");
        body.push_str("            </common:external-id>\n");
        body.push_str("          </common:external-ids>\n");
    }
    if let Some(year) = work.pub_year {
        body.push_str(&format!(
            "          <common:publication-date><common:year>{year}</common:year></common:publication-date>\n"
        ));
    }
    body.push_str(&format!(
        "          <work:type>{}</work:type>\n",
        xml_escape(&work.work_type)
    ));
    body.push_str("        </work:work-summary>\n");
    body.push_str("      </activities:group>\n");
}

/// Write one `.xml` file per sketch into `dir` (fixture-directory mode).
pub fn write_dir_corpus(dir: &Path, records: &[RecordSketch]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for record in records {
        std::fs::write(
            dir.join(format!("{}.xml", record.orcid_id)),
            record.to_xml(),
        )?;
    }
    Ok(())
}

/// Write raw members (path, bytes) into a tar.gz archive, in the given
/// order. Headers are fixed, so identical inputs give identical bytes.
pub fn write_tar_members(path: &Path, members: &[(String, Vec<u8>)]) -> std::io::Result<()> {
    let file = std::fs::File::create(path)?;
    let encoder = flate2::write::GzEncoder::new(file, flate2::Compression::fast());
    let mut builder = tar::Builder::new(encoder);
    for (member_path, bytes) in members {
        append_member(&mut builder, member_path, bytes)?;
    }
    builder.into_inner()?.finish()?.sync_all()?;
    Ok(())
}

fn append_member<W: Write>(
    builder: &mut tar::Builder<W>,
    member_path: &str,
    bytes: &[u8],
) -> std::io::Result<()> {
    let mut header = tar::Header::new_gnu();
    header.set_size(bytes.len() as u64);
    header.set_mode(0o644);
    header.set_mtime(0);
    header.set_cksum();
    builder.append_data(&mut header, member_path, bytes)
}

/// Write sketches into a tar.gz archive, members in sketch order.
pub fn write_tar_corpus(path: &Path, records: &[RecordSketch]) -> std::io::Result<()> {
    let members: Vec<(String, Vec<u8>)> = records
        .iter()
        .map(|r| (r.member_path(), r.to_xml().into_bytes()))
        .collect();
    write_tar_members(path, &members)
}

/// Stream `count` minimal records straight into a tar.gz archive without
/// materializing them, for scale testing.
pub fn write_scale_archive(path: &Path, count: u64) -> std::io::Result<()> {
    let file = std::fs::File::create(path)?;
    let encoder = flate2::write::GzEncoder::new(file, flate2::Compression::fast());
    let mut builder = tar::Builder::new(encoder);
    for i in 0..count {
        let record = RecordSketch::new(&scale_orcid_id(i));
        append_member(
            &mut builder,
            &record.member_path(),
            record.to_xml().as_bytes(),
        )?;
    }
    builder.into_inner()?.finish()?.sync_all()?;
    Ok(())
}

/// Deterministic valid-shaped iD for the `i`-th scale record.
pub fn scale_orcid_id(i: u64) -> String {
    let digits = format!("{i:016}");
    format!(
        "{}-{}-{}-{}",
        &digits[0..4],
        &digits[4..8],
        &digits[8..12],
        &digits[12..16]
    )
}

/// A small corpus exercising every classification path; used by the
/// runnable examples.
pub fn demo_corpus() -> Vec<RecordSketch> {
    vec![
        RecordSketch::new("0000-0000-9000-0001")
            .work(
                WorkSketch::new("1", "data-set")
                    .doi("https://doi.org/10.5281/ZENODO.1206163")
                    .source("DataCite")
                    .year(2016),
            )
            .work(
                WorkSketch::new("2", "journal-article")
                    .doi("10.1000/article.1")
                    .source("Crossref")
                    .year(2014),
            )
            .affiliation(
                AffiliationSketch::education()
                    .country("ES")
                    .role("PhD candidate")
                    .start(2012)
                    .end(2016),
            )
            .affiliation(AffiliationSketch::employment().country("NL").start(2016)),
        RecordSketch::new("0000-0000-9000-0002")
            .work(
                WorkSketch::new("1", "data-set")
                    .doi("doi:10.5061/dryad.9c50s/20")
                    .source("ResearcherPortal")
                    .year(2015),
            )
            .affiliation(AffiliationSketch::employment().country("GB").start(2010)),
        RecordSketch::new("0000-0000-9000-0003")
            .work(
                WorkSketch::new("1", "data-set")
                    .doi("10.7910/dvn/demo1")
                    .source("DataCite")
                    .year(2018),
            )
            .affiliation(
                AffiliationSketch::qualification()
                    .country("US")
                    .role("Doctoral researcher")
                    .start(2014),
            ),
        RecordSketch::new("0000-0000-9000-0004")
            .work(
                WorkSketch::new("1", "data-set")
                    .doi("10.7910/dvn/demo2")
                    .source("Crossref")
                    .year(2017),
            )
            .affiliation(AffiliationSketch::employment().country("DE").start(2011)),
        RecordSketch::new("0000-0000-9000-0005")
            .work(
                WorkSketch::new("1", "data-set")
                    .doi("10.6084/m9.figshare.9988322")
                    .source("DataCite")
                    .year(2019),
            )
            .work(
                WorkSketch::new("2", "journal-article")
                    .doi("10.1000/article.2")
                    .year(2016),
            )
            .affiliation(
                AffiliationSketch::education()
                    .country("CA")
                    .role("PhD student")
                    .start(2015),
            ),
        RecordSketch::new("0000-0000-9000-0006"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_record;
    use crate::model::AffiliationSection;

    #[test]
    fn sketch_round_trips_through_parser() {
        let sketch = RecordSketch::new("0000-0000-9000-0001")
            .work(
                WorkSketch::new("42", "data-set")
                    .doi("10.5281/zenodo.77")
                    .source("DataCite")
                    .year(2017),
            )
            .affiliation(
                AffiliationSketch::education()
                    .country("ES")
                    .role("PhD candidate")
                    .start(2012),
            )
            .affiliation(AffiliationSketch::employment().country("NL").start(2016).end(2019));
        let profile = parse_record(sketch.to_xml().as_bytes()).unwrap();
        assert_eq!(profile.orcid_id, "0000-0000-9000-0001");
        assert_eq!(profile.works.len(), 1);
        assert_eq!(profile.works[0].put_code, "42");
        assert_eq!(profile.works[0].doi.as_deref(), Some("10.5281/zenodo.77"));
        assert_eq!(profile.works[0].pub_year, Some(2017));
        assert_eq!(profile.affiliations.len(), 2);
        assert_eq!(
            profile.affiliations[0].section,
            AffiliationSection::EducationQualification
        );
        assert_eq!(profile.affiliations[1].end_year, Some(2019));
    }

    #[test]
    fn qualification_renders_to_qualification_summary() {
        let sketch = RecordSketch::new("0000-0000-9000-0002")
            .affiliation(AffiliationSketch::qualification().country("US").role("DPhil").start(2013));
        let xml = sketch.to_xml();
        assert!(xml.contains("<qualification:qualification-summary>"));
        let profile = parse_record(xml.as_bytes()).unwrap();
        assert_eq!(
            profile.affiliations[0].section,
            AffiliationSection::EducationQualification
        );
    }

    #[test]
    fn scale_ids_are_valid_and_distinct() {
        assert_eq!(scale_orcid_id(0), "0000-0000-0000-0000");
        assert_eq!(scale_orcid_id(1234567), "0000-0000-0123-4567");
        assert!(crate::model::is_valid_orcid_id(&scale_orcid_id(999_999)));
    }
}
