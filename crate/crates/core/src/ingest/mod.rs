//! Getting references in: BibTeX and record-file parsing, venue
//! classification, citation-count enrichment, self-citation detection.

pub mod bibtex;
pub mod enrich;
pub mod names;
pub mod reference;
pub mod taxonomy;

pub use bibtex::{parse_bibtex, parse_bibtex_lenient, to_bibtex, BibError, BibWarning, ParseOutcome, RawEntry};
pub use enrich::{
    enrich_citation_counts, Cache, CitationProvider, CitationQuery, EnrichReport, HttpProvider, NullProvider,
    ProviderError, StaticProvider,
};
pub use names::{detect_self_citation, parse_author_list, PersonName};
pub use reference::{
    parse_record_lines, to_reference_record, CitingPaper, RecordFileError, ReferenceRecord, VenueType,
};
pub use taxonomy::{TaxonomyError, VenueTaxonomy};

/// Taxonomy shipped with the crate, used when none is configured.
pub const DEFAULT_TAXONOMY: &str = include_str!("../../data/taxonomy.tsv");

pub fn default_taxonomy() -> VenueTaxonomy {
    VenueTaxonomy::parse(DEFAULT_TAXONOMY).expect("bundled taxonomy parses")
}

/// Records parsed from one BibTeX source, with everything that went wrong.
#[derive(Debug, Default)]
pub struct BibImport {
    pub records: Vec<ReferenceRecord>,
    pub errors: Vec<BibError>,
    /// `(cite key, message)` pairs from parsing and record mapping.
    pub warnings: Vec<(String, String)>,
}

/// Parses `text` leniently and maps every good entry to a record.
pub fn import_bibtex(text: &str, taxonomy: &VenueTaxonomy) -> BibImport {
    let outcome = parse_bibtex_lenient(text);
    let mut import = BibImport {
        errors: outcome.errors,
        warnings: outcome.warnings.into_iter().map(|w| (w.cite_key, w.message)).collect(),
        ..Default::default()
    };
    for entry in &outcome.entries {
        let (record, warnings) = to_reference_record(entry, taxonomy);
        import
            .warnings
            .extend(warnings.into_iter().map(|w| (entry.cite_key.clone(), w)));
        import.records.push(record);
    }
    import
}
