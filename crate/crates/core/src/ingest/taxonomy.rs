//! Venue classification rules.
//!
//! A taxonomy file is a tab-separated table, one rule per line:
//!
//! ```text
//! pattern <TAB> venue_type <TAB> domain <TAB> subdomain
//! ```
//!
//! `-` (or an empty column) leaves a column unset. Lines starting with `#`
//! and blank lines are ignored. A plain pattern matches whole words of the
//! venue name, case-insensitively (`acl` matches "Proceedings of ACL" but not
//! "Oracle"); a pattern prefixed with `~` matches any substring. The first
//! matching rule wins.

use thiserror::Error;

use super::VenueType;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    Keyword(Vec<String>),
    Substring(String),
}

impl Pattern {
    pub fn parse(raw: &str) -> Pattern {
        match raw.strip_prefix('~') {
            Some(sub) => Pattern::Substring(sub.to_lowercase()),
            None => Pattern::Keyword(words(raw)),
        }
    }

    pub fn matches(&self, venue: &str) -> bool {
        match self {
            Pattern::Substring(sub) => !sub.is_empty() && venue.to_lowercase().contains(sub.as_str()),
            Pattern::Keyword(kw) => {
                if kw.is_empty() {
                    return false;
                }
                let venue_words = words(venue);
                venue_words.windows(kw.len()).any(|w| w == kw.as_slice())
            }
        }
    }
}

fn words(s: &str) -> Vec<String> {
    s.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaxonomyRule {
    pub pattern: Pattern,
    pub venue_type: Option<VenueType>,
    pub domain: Option<String>,
    pub subdomain: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Classification {
    pub venue_type: Option<VenueType>,
    pub domain: Option<String>,
    pub subdomain: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VenueTaxonomy {
    pub rules: Vec<TaxonomyRule>,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("taxonomy line {line}: {message}")]
pub struct TaxonomyError {
    pub line: usize,
    pub message: String,
}

impl VenueTaxonomy {
    pub fn parse(text: &str) -> Result<VenueTaxonomy, TaxonomyError> {
        let mut rules = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            if cols.len() != 4 {
                return Err(TaxonomyError {
                    line: line_no,
                    message: format!("expected 4 tab-separated columns, found {}", cols.len()),
                });
            }
            if cols[0].is_empty() {
                return Err(TaxonomyError { line: line_no, message: "empty pattern".into() });
            }
            let venue_type = match opt(cols[1]) {
                None => None,
                Some(t) => Some(VenueType::parse(t).ok_or_else(|| TaxonomyError {
                    line: line_no,
                    message: format!("unknown venue type `{t}`"),
                })?),
            };
            rules.push(TaxonomyRule {
                pattern: Pattern::parse(cols[0]),
                venue_type,
                domain: opt(cols[2]).map(str::to_string),
                subdomain: opt(cols[3]).map(str::to_string),
            });
        }
        Ok(VenueTaxonomy { rules })
    }

    /// The first matching rule's columns, or the all-unset default.
    pub fn classify(&self, venue_name: &str) -> Classification {
        self.rules
            .iter()
            .find(|r| r.pattern.matches(venue_name))
            .map(|r| Classification {
                venue_type: r.venue_type,
                domain: r.domain.clone(),
                subdomain: r.subdomain.clone(),
            })
            .unwrap_or_default()
    }
}

fn opt(col: &str) -> Option<&str> {
    match col {
        "" | "-" => None,
        s => Some(s),
    }
}
