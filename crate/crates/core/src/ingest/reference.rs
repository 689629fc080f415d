use std::fmt;

use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use super::bibtex::RawEntry;
use super::names::{delatex, detect_self_citation, parse_author_list, PersonName};
use super::taxonomy::VenueTaxonomy;
use crate::record::Record;

pub const ATTR_VENUE_TYPE: &str = "venue_type";
pub const ATTR_VENUE_NAME: &str = "venue_name";
pub const ATTR_DOMAIN: &str = "domain";
pub const ATTR_SUBDOMAIN: &str = "subdomain";
pub const ATTR_YEAR: &str = "year";
pub const ATTR_CITATION_COUNT: &str = "citation_count";
pub const ATTR_SELF_CITATION: &str = "self_citation";

pub const MIN_YEAR: i32 = 1000;
pub const MAX_YEAR: i32 = 3000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum VenueType {
    Proceedings,
    Journal,
    Book,
    #[default]
    Other,
}

impl VenueType {
    pub fn as_str(self) -> &'static str {
        match self {
            VenueType::Proceedings => "proceedings",
            VenueType::Journal => "journal",
            VenueType::Book => "book",
            VenueType::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Option<VenueType> {
        match s.trim().to_ascii_lowercase().as_str() {
            "proceedings" => Some(VenueType::Proceedings),
            "journal" => Some(VenueType::Journal),
            "book" => Some(VenueType::Book),
            "other" => Some(VenueType::Other),
            _ => None,
        }
    }

    /// Venue type asserted by a BibTeX entry kind.
    pub fn from_entry_kind(kind: &str) -> VenueType {
        match kind {
            "article" => VenueType::Journal,
            "inproceedings" | "conference" | "proceedings" => VenueType::Proceedings,
            "book" | "inbook" | "incollection" => VenueType::Book,
            _ => VenueType::Other,
        }
    }
}

impl fmt::Display for VenueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One cited work.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRecord {
    pub id: String,
    #[serde(default)]
    pub title: String,
    #[serde(default, deserialize_with = "deserialize_authors")]
    pub authors: Vec<PersonName>,
    #[serde(default)]
    pub year: Option<i32>,
    #[serde(default)]
    pub venue_name: String,
    #[serde(default, deserialize_with = "deserialize_venue_type")]
    pub venue_type: VenueType,
    #[serde(default)]
    pub domain: Option<String>,
    #[serde(default)]
    pub subdomain: Option<String>,
    #[serde(default)]
    pub citation_count: Option<u64>,
    #[serde(default)]
    pub self_citation: Option<bool>,
}

impl ReferenceRecord {
    pub fn new(id: impl Into<String>) -> Self {
        ReferenceRecord {
            id: id.into(),
            title: String::new(),
            authors: Vec::new(),
            year: None,
            venue_name: String::new(),
            venue_type: VenueType::Other,
            domain: None,
            subdomain: None,
            citation_count: None,
            self_citation: None,
        }
    }
}

impl Record for ReferenceRecord {
    fn id(&self) -> &str {
        &self.id
    }

    fn label(&self) -> &str {
        &self.title
    }

    fn year(&self) -> Option<i32> {
        self.year
    }

    fn authors(&self) -> &[PersonName] {
        &self.authors
    }

    fn citation_count(&self) -> Option<u64> {
        self.citation_count
    }

    fn self_citation(&self) -> Option<bool> {
        self.self_citation
    }

    fn category(&self, attribute: &str) -> Option<String> {
        match attribute {
            ATTR_VENUE_TYPE => Some(self.venue_type.as_str().to_string()),
            ATTR_VENUE_NAME if !self.venue_name.is_empty() => Some(self.venue_name.clone()),
            ATTR_DOMAIN => self.domain.clone(),
            ATTR_SUBDOMAIN => self.subdomain.clone(),
            ATTR_SELF_CITATION => self.self_citation.map(|b| if b { "yes" } else { "no" }.to_string()),
            _ => None,
        }
    }

    fn numeric(&self, attribute: &str) -> Option<f64> {
        match attribute {
            ATTR_YEAR => self.year.map(f64::from),
            ATTR_CITATION_COUNT => self.citation_count.map(|c| c as f64),
            _ => None,
        }
    }
}

/// The paper whose reference list is summarised.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CitingPaper {
    pub title: String,
    pub authors: Vec<PersonName>,
    pub references: Vec<ReferenceRecord>,
}

impl CitingPaper {
    /// Fills every absent self-citation flag from the citing author list.
    /// Does nothing when the citing authors are unknown.
    pub fn derive_self_citations(&mut self) {
        if self.authors.is_empty() {
            return;
        }
        for r in &mut self.references {
            if r.self_citation.is_none() {
                r.self_citation = Some(detect_self_citation(&r.authors, &self.authors));
            }
        }
    }
}

/// Maps a parsed entry to a record. Never fails; each missing piece of
/// information is reported in the returned warnings instead.
pub fn to_reference_record(entry: &RawEntry, taxonomy: &VenueTaxonomy) -> (ReferenceRecord, Vec<String>) {
    let mut warnings = Vec::new();
    let mut record = ReferenceRecord::new(entry.cite_key.clone());

    record.title = entry.field("title").map(clean_text).unwrap_or_default();
    if record.title.is_empty() {
        warnings.push("missing title".to_string());
    }

    if let Some(field) = entry.field("author").or_else(|| entry.field("editor")) {
        let (names, rejected) = parse_author_list(field);
        record.authors = names;
        for r in rejected {
            warnings.push(format!("unparseable author name `{r}`"));
        }
    }
    if record.authors.is_empty() {
        warnings.push("missing authors".to_string());
    }

    match entry.field("year").map(parse_year) {
        Some(Some(y)) => record.year = Some(y),
        Some(None) => warnings.push(format!("invalid year `{}`", entry.field("year").unwrap_or_default())),
        None => warnings.push("missing year".to_string()),
    }

    record.venue_name = venue_field(entry).map(clean_text).unwrap_or_default();
    if record.venue_name.is_empty() {
        warnings.push("missing venue".to_string());
    }

    let class = taxonomy.classify(&record.venue_name);
    record.venue_type = match VenueType::from_entry_kind(&entry.entry_kind) {
        VenueType::Other => class.venue_type.unwrap_or(VenueType::Other),
        asserted => asserted,
    };
    record.domain = class.domain;
    record.subdomain = class.subdomain;

    let count_field = entry.field("citation_count").or_else(|| entry.field("citations"));
    match count_field.map(|c| c.trim().parse::<u64>()) {
        Some(Ok(c)) => record.citation_count = Some(c),
        Some(Err(_)) => warnings.push("invalid citation count".to_string()),
        None => warnings.push("missing citation count".to_string()),
    }

    (record, warnings)
}

fn venue_field(entry: &RawEntry) -> Option<&str> {
    let preferred: &[&str] = match entry.entry_kind.as_str() {
        "article" => &["journal"],
        "inproceedings" | "conference" | "incollection" => &["booktitle"],
        "proceedings" => &["title"],
        "book" | "inbook" => &["publisher", "series"],
        _ => &[],
    };
    const FALLBACK: [&str; 6] = ["journal", "booktitle", "publisher", "howpublished", "school", "institution"];
    preferred
        .iter()
        .chain(FALLBACK.iter())
        .find_map(|f| entry.field(f).filter(|v| !v.trim().is_empty()))
}

fn parse_year(raw: &str) -> Option<i32> {
    let digits: String = raw
        .chars()
        .skip_while(|c| !c.is_ascii_digit())
        .take_while(char::is_ascii_digit)
        .collect();
    if digits.len() != 4 {
        return None;
    }
    let y: i32 = digits.parse().ok()?;
    (MIN_YEAR..=MAX_YEAR).contains(&y).then_some(y)
}

fn clean_text(s: &str) -> String {
    delatex(s).split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AuthorInput {
    Text(String),
    Parts {
        family: String,
        #[serde(default)]
        given: String,
    },
}

fn deserialize_authors<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<PersonName>, D::Error> {
    let raw: Vec<AuthorInput> = Vec::deserialize(d)?;
    raw.into_iter()
        .map(|a| match a {
            AuthorInput::Text(s) => {
                PersonName::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("author `{s}` has no family name")))
            }
            AuthorInput::Parts { family, given } if !family.trim().is_empty() => Ok(PersonName::new(family, given)),
            AuthorInput::Parts { .. } => Err(serde::de::Error::custom("author with empty family name")),
        })
        .collect()
}

fn deserialize_venue_type<'de, D: Deserializer<'de>>(d: D) -> Result<VenueType, D::Error> {
    let raw: Option<String> = Option::deserialize(d)?;
    // unknown spellings map to `other`
    Ok(raw.and_then(|s| VenueType::parse(&s)).unwrap_or(VenueType::Other))
}

#[derive(Debug, Error)]
#[error("line {line}: {message}")]
pub struct RecordFileError {
    pub line: usize,
    pub message: String,
}

#[derive(Deserialize)]
struct CitingHeader {
    #[serde(default)]
    title: String,
    #[serde(default, deserialize_with = "deserialize_authors")]
    authors: Vec<PersonName>,
}

/// Parses a line-delimited record file: one JSON object per line carrying
/// [`ReferenceRecord`] fields by name. An optional line of the form
/// `{"citing": {"title": ..., "authors": [...]}}` describes the citing
/// paper. Blank lines and lines starting with `#` are skipped.
pub fn parse_record_lines(text: &str) -> Result<CitingPaper, RecordFileError> {
    let mut paper = CitingPaper::default();
    let mut seen = std::collections::HashSet::new();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let err = |message: String| RecordFileError { line: line_no, message };
        let value: serde_json::Value = serde_json::from_str(trimmed).map_err(|e| err(e.to_string()))?;
        if let Some(citing) = value.get("citing") {
            let header: CitingHeader = serde_json::from_value(citing.clone()).map_err(|e| err(e.to_string()))?;
            paper.title = header.title;
            paper.authors = header.authors;
            continue;
        }
        let mut record: ReferenceRecord = serde_json::from_value(value).map_err(|e| err(e.to_string()))?;
        if record.id.trim().is_empty() {
            return Err(err("empty id".into()));
        }
        if let Some(y) = record.year {
            if !(MIN_YEAR..=MAX_YEAR).contains(&y) {
                return Err(err(format!("year {y} outside [{MIN_YEAR}, {MAX_YEAR}]")));
            }
        }
        if !seen.insert(record.id.clone()) {
            return Err(err(format!("duplicate id `{}`", record.id)));
        }
        record.title = record.title.trim().to_string();
        paper.references.push(record);
    }
    Ok(paper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::bibtex::parse_bibtex;

    fn entry(src: &str) -> RawEntry {
        parse_bibtex(src).unwrap().remove(0)
    }

    #[test]
    fn article_maps_to_journal() {
        let (r, warnings) = to_reference_record(
            &entry("@article{a1, title={T}, author={John Smith}, year={2014}, journal={J. of AI}}"),
            &VenueTaxonomy::default(),
        );
        assert_eq!(r.venue_type, VenueType::Journal);
        assert_eq!(r.year, Some(2014));
        assert_eq!(r.venue_name, "J. of AI");
        assert_eq!(r.authors[0].normalized_key, "smith.j");
        assert_eq!(warnings, ["missing citation count"]);
    }

    #[test]
    fn misc_without_venue_is_other() {
        let (r, warnings) = to_reference_record(&entry("@misc{m1, title={X}}"), &VenueTaxonomy::default());
        assert_eq!(r.venue_type, VenueType::Other);
        assert_eq!(r.venue_name, "");
        assert_eq!(r.year, None);
        assert!(warnings.contains(&"missing venue".to_string()));
        assert!(warnings.contains(&"missing year".to_string()));
    }

    #[test]
    fn taxonomy_fills_domain() {
        let tax = VenueTaxonomy::parse("acl\tproceedings\tcomputing-science\tcomputational-linguistics\n").unwrap();
        let (r, _) = to_reference_record(&entry("@inproceedings{p, booktitle={Proceedings of ACL}}"), &tax);
        assert_eq!(r.venue_type, VenueType::Proceedings);
        assert_eq!(r.domain.as_deref(), Some("computing-science"));
        assert_eq!(r.subdomain.as_deref(), Some("computational-linguistics"));
    }

    #[test]
    fn entry_kind_beats_taxonomy_type() {
        let tax = VenueTaxonomy::parse("~workshop\tproceedings\tcs\t-\n").unwrap();
        let (r, _) = to_reference_record(&entry("@article{a, journal={Workshop Letters}}"), &tax);
        assert_eq!(r.venue_type, VenueType::Journal);
        let (r, _) = to_reference_record(&entry("@misc{m, howpublished={Workshop on X}}"), &tax);
        assert_eq!(r.venue_type, VenueType::Proceedings);
    }

    #[test]
    fn years_and_counts() {
        let tax = VenueTaxonomy::default();
        let (r, _) = to_reference_record(&entry("@misc{m, year={c. 1999a}, citations={42}}"), &tax);
        assert_eq!((r.year, r.citation_count), (Some(1999), Some(42)));
        let (r, w) = to_reference_record(&entry("@misc{m, year={99}}"), &tax);
        assert_eq!(r.year, None);
        assert!(w.iter().any(|w| w.starts_with("invalid year")));
        let (r, _) = to_reference_record(&entry("@misc{m, year={4000}}"), &tax);
        assert_eq!(r.year, None);
    }

    #[test]
    fn record_lines() {
        let text = r#"
{"citing": {"title": "Citing", "authors": ["Jane Doe", {"family": "Smith", "given": "J."}]}}
{"id": "r1", "title": "A", "authors": ["John Smith"], "year": 2010, "venue_type": "journal", "citation_count": 12}
# comment
{"id": "r2", "title": "B", "authors": ["Kim Lee"], "venue_type": "workshop"}
"#;
        let mut paper = parse_record_lines(text).unwrap();
        assert_eq!(paper.authors.len(), 2);
        assert_eq!(paper.references.len(), 2);
        assert_eq!(paper.references[1].venue_type, VenueType::Other);
        paper.derive_self_citations();
        assert_eq!(paper.references[0].self_citation, Some(true));
        assert_eq!(paper.references[1].self_citation, Some(false));
    }

    #[test]
    fn record_line_errors() {
        assert_eq!(parse_record_lines("{\"id\": \"a\", \"year\": 99}").unwrap_err().line, 1);
        assert_eq!(parse_record_lines("{\"id\":\"a\"}\n{\"id\":\"a\"}").unwrap_err().line, 2);
        assert!(parse_record_lines("not json").is_err());
        assert!(parse_record_lines("{\"id\":\"a\",\"authors\":[\"\"]}").is_err());
    }
}
