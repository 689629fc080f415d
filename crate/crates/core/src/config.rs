//! Summary configuration: which attributes are described and how.
//!
//! Defaults reflect what readers of reference lists ask for: venue type,
//! domain and subdomain, publication year and self-citation, with citation
//! count as the implicit dominating column.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::reference::{
    ATTR_CITATION_COUNT, ATTR_DOMAIN, ATTR_SELF_CITATION, ATTR_SUBDOMAIN, ATTR_VENUE_TYPE, ATTR_YEAR,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[default]
    Refset,
    Prodset,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Refset => "refset",
            Algorithm::Prodset => "prodset",
        }
    }

    /// Label used when two summaries are shown side by side.
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Refset => "[refSet]",
            Algorithm::Prodset => "[prodSet]",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "refset" => Ok(Algorithm::Refset),
            "prodset" => Ok(Algorithm::Prodset),
            _ => Err(ConfigError::Invalid(format!("unknown algorithm `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributeKind {
    Categorical,
    Continuous,
    /// Yes/no attribute reported as a share.
    Flag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    /// Fused with the introductory total.
    Lead,
    Listed,
    /// Described together with each group's top record.
    Grouping,
    /// Fused into the year/self-citation paragraph.
    Combined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub name: String,
    pub kind: AttributeKind,
    pub role: Role,
}

impl AttributeSpec {
    pub fn new(name: &str, kind: AttributeKind, role: Role) -> Self {
        AttributeSpec { name: name.to_string(), kind, role }
    }
}

/// Proportion cut-offs: `Most` from `most` up, `LargeProportion` from
/// `large` up, `Some` below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuantifierThresholds {
    pub most: f64,
    pub large: f64,
}

impl Default for QuantifierThresholds {
    fn default() -> Self {
        QuantifierThresholds { most: 0.5, large: 0.2 }
    }
}

/// Relative-difference bands for subset/superset comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ComparisonBands {
    /// Below this, medians count as the same.
    pub same: f64,
    /// Up to and including this, the difference is slight.
    pub slight: f64,
}

impl Default for ComparisonBands {
    fn default() -> Self {
        ComparisonBands { same: 0.02, slight: 0.15 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum AuthorScoring {
    /// Sum of citation counts over the author's references.
    #[default]
    Sum,
    /// Highest single citation count among the author's references.
    Max,
}

/// Domain words slotted into templates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Wording {
    /// Plural noun for the records, e.g. "references" or "TVs".
    pub noun: String,
    /// Name of the dominating column in prose, e.g. "price".
    pub dominating_label: String,
    /// Symbol written before dominating values, e.g. "£".
    pub unit: String,
    pub higher: String,
    pub lower: String,
}

impl Default for Wording {
    fn default() -> Self {
        Wording {
            noun: "references".into(),
            dominating_label: "citation count".into(),
            unit: String::new(),
            higher: "more cited".into(),
            lower: "less cited".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryConfig {
    pub algorithm: Algorithm,
    pub attributes: Vec<AttributeSpec>,
    pub dominating: Option<String>,
    pub author_k: usize,
    pub author_scoring: AuthorScoring,
    pub quantifiers: QuantifierThresholds,
    pub comparison: ComparisonBands,
    /// Show citation counts next to top publications and authors.
    pub show_counts: bool,
    pub wording: Wording,
    pub template_pack: Option<PathBuf>,
}

pub const DEFAULT_AUTHOR_K: usize = 7;

impl SummaryConfig {
    pub fn refset_default() -> Self {
        use AttributeKind::*;
        use Role::*;
        SummaryConfig {
            algorithm: Algorithm::Refset,
            attributes: vec![
                AttributeSpec::new(ATTR_VENUE_TYPE, Categorical, Lead),
                AttributeSpec::new(ATTR_DOMAIN, Categorical, Listed),
                AttributeSpec::new(ATTR_SUBDOMAIN, Categorical, Grouping),
                AttributeSpec::new(ATTR_YEAR, Continuous, Combined),
                AttributeSpec::new(ATTR_SELF_CITATION, Flag, Combined),
            ],
            dominating: Some(ATTR_CITATION_COUNT.to_string()),
            author_k: DEFAULT_AUTHOR_K,
            author_scoring: AuthorScoring::Sum,
            quantifiers: QuantifierThresholds::default(),
            comparison: ComparisonBands::default(),
            show_counts: true,
            wording: Wording::default(),
            template_pack: None,
        }
    }

    /// The product-set layout applied to references, with citation count
    /// standing in for price.
    pub fn prodset_default() -> Self {
        use AttributeKind::*;
        SummaryConfig {
            algorithm: Algorithm::Prodset,
            attributes: vec![
                AttributeSpec::new(ATTR_VENUE_TYPE, Categorical, Role::Listed),
                AttributeSpec::new(ATTR_DOMAIN, Categorical, Role::Listed),
                AttributeSpec::new(ATTR_SUBDOMAIN, Categorical, Role::Listed),
            ],
            ..SummaryConfig::refset_default()
        }
    }

    pub fn default_for(algorithm: Algorithm) -> Self {
        match algorithm {
            Algorithm::Refset => SummaryConfig::refset_default(),
            Algorithm::Prodset => SummaryConfig::prodset_default(),
        }
    }

    pub fn attribute(&self, name: &str) -> Option<&AttributeSpec> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn with_role(&self, role: Role) -> impl Iterator<Item = &AttributeSpec> {
        self.attributes.iter().filter(move |a| a.role == role)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let q = self.quantifiers;
        if !(0.0 < q.large && q.large < q.most && q.most <= 1.0) {
            return Err(ConfigError::Invalid(format!(
                "quantifier thresholds must satisfy 0 < large < most <= 1 (got large={}, most={})",
                q.large, q.most
            )));
        }
        let b = self.comparison;
        if !(0.0 <= b.same && b.same < b.slight) || !b.slight.is_finite() {
            return Err(ConfigError::Invalid(format!(
                "comparison bands must satisfy 0 <= same < slight (got same={}, slight={})",
                b.same, b.slight
            )));
        }
        if self.author_k == 0 {
            return Err(ConfigError::Invalid("author list size k must be at least 1".into()));
        }
        let mut names = BTreeSet::new();
        for a in &self.attributes {
            if a.name.trim().is_empty() {
                return Err(ConfigError::Invalid("attribute with empty name".into()));
            }
            if !names.insert(a.name.as_str()) {
                return Err(ConfigError::Invalid(format!("attribute `{}` declared twice", a.name)));
            }
        }
        match self.algorithm {
            Algorithm::Refset => self.validate_refset(),
            Algorithm::Prodset => self.validate_prodset(),
        }
    }

    fn validate_refset(&self) -> Result<(), ConfigError> {
        let leads: Vec<_> = self.with_role(Role::Lead).collect();
        if leads.len() != 1 {
            return Err(ConfigError::Invalid(format!(
                "refset needs exactly one lead attribute, found {}",
                leads.len()
            )));
        }
        for a in &self.attributes {
            let ok = match a.role {
                Role::Lead | Role::Grouping => a.kind == AttributeKind::Categorical,
                Role::Listed => a.kind != AttributeKind::Flag,
                Role::Combined => a.kind != AttributeKind::Categorical,
            };
            if !ok {
                return Err(ConfigError::Invalid(format!(
                    "attribute `{}`: kind {:?} cannot take role {:?}",
                    a.name, a.kind, a.role
                )));
            }
        }
        let combined_continuous = self
            .with_role(Role::Combined)
            .filter(|a| a.kind == AttributeKind::Continuous)
            .count();
        let combined_flags = self.with_role(Role::Combined).filter(|a| a.kind == AttributeKind::Flag).count();
        if combined_continuous > 1 || combined_flags > 1 {
            return Err(ConfigError::Invalid(
                "refset combines at most one continuous and one flag attribute".into(),
            ));
        }
        Ok(())
    }

    fn validate_prodset(&self) -> Result<(), ConfigError> {
        if self.dominating.as_deref().is_none_or(|d| d.trim().is_empty()) {
            return Err(ConfigError::Invalid("prodset needs a dominating attribute".into()));
        }
        for a in &self.attributes {
            if a.role != Role::Listed || a.kind != AttributeKind::Categorical {
                return Err(ConfigError::Invalid(format!(
                    "prodset attributes must be categorical and listed; `{}` is {:?}/{:?}",
                    a.name, a.kind, a.role
                )));
            }
            if Some(&a.name) == self.dominating.as_ref() {
                return Err(ConfigError::Invalid(format!("`{}` is the dominating attribute", a.name)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config file {path}: {message}")]
    Parse { path: PathBuf, message: String },
}

/// Per-algorithm attribute override in a config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSection {
    pub attributes: Option<Vec<AttributeSpec>>,
}

/// A TOML config file. Every key is optional; present keys override the
/// defaults of the selected algorithm.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub algorithm: Option<Algorithm>,
    pub dominating: Option<String>,
    pub author_k: Option<usize>,
    pub author_scoring: Option<AuthorScoring>,
    pub quantifiers: Option<QuantifierThresholds>,
    pub comparison: Option<ComparisonBands>,
    pub show_counts: Option<bool>,
    pub wording: Option<Wording>,
    pub template_pack: Option<PathBuf>,
    pub taxonomy: Option<PathBuf>,
    pub refset: Option<AlgorithmSection>,
    pub prodset: Option<AlgorithmSection>,
}

impl ConfigFile {
    pub fn parse(text: &str, path: PathBuf) -> Result<ConfigFile, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse { path, message: e.to_string() })
    }

    pub fn load(path: &std::path::Path) -> Result<ConfigFile, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        ConfigFile::parse(&text, path.to_path_buf())
    }

    /// Defaults for `algorithm` with this file's values laid over them.
    pub fn apply(&self, algorithm: Algorithm) -> SummaryConfig {
        let mut config = SummaryConfig::default_for(algorithm);
        let section = match algorithm {
            Algorithm::Refset => &self.refset,
            Algorithm::Prodset => &self.prodset,
        };
        if let Some(attrs) = section.as_ref().and_then(|s| s.attributes.clone()) {
            config.attributes = attrs;
        }
        if let Some(d) = &self.dominating {
            config.dominating = Some(d.clone());
        }
        if let Some(k) = self.author_k {
            config.author_k = k;
        }
        if let Some(s) = self.author_scoring {
            config.author_scoring = s;
        }
        if let Some(q) = self.quantifiers {
            config.quantifiers = q;
        }
        if let Some(c) = self.comparison {
            config.comparison = c;
        }
        if let Some(s) = self.show_counts {
            config.show_counts = s;
        }
        if let Some(w) = &self.wording {
            config.wording = w.clone();
        }
        if let Some(p) = &self.template_pack {
            config.template_pack = Some(p.clone());
        }
        config
    }
}
