//! Statistics behind both summary algorithms.

pub mod compare;
pub mod ranking;
pub mod stats;

use std::fmt::Write as _;

use thiserror::Error;

use crate::config::{Algorithm, AttributeKind, Role, SummaryConfig};

pub use compare::{
    classify_difference, compare_values, feature_importance, subset_vs_superset, ComparisonResult, Direction,
    FeatureImportance, ImportanceScore, Magnitude,
};
pub use ranking::{prominence_order, top_authors, top_reference_per_group, AuthorScore, GroupTop, GroupTopEntry};
pub use stats::{
    categorical_distribution, continuous_summary, dominating_shape, flag_share, median, quantifier_for,
    quantifier_with, self_citation_share, CategoricalDistribution, CategoryShare, ContinuousSummary, Quantifier,
};

use crate::record::Record;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("empty set")]
    EmptySet,
    #[error("attribute fully absent: {0}")]
    FullyAbsent(String),
    #[error("proportion {0} outside (0, 1]")]
    Domain(f64),
    #[error("dominating attribute `{0}` is present on fewer than 2 records")]
    InsufficientDominating(String),
    #[error("attribute `{attribute}`: {source}")]
    Attribute {
        attribute: String,
        #[source]
        source: Box<ProfileError>,
    },
}

impl ProfileError {
    fn on(self, attribute: &str) -> ProfileError {
        ProfileError::Attribute { attribute: attribute.to_string(), source: Box::new(self) }
    }
}

/// Everything computed about one record set.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SetProfile {
    pub total: usize,
    pub distributions: Vec<CategoricalDistribution>,
    pub continuous: Vec<ContinuousSummary>,
    /// Configured continuous attributes absent from every record.
    pub missing: Vec<String>,
    pub dominating_shape: Option<ContinuousSummary>,
    pub group_tops: Vec<GroupTop>,
    pub top_authors: Vec<AuthorScore>,
    pub importance: Option<FeatureImportance>,
    pub comparisons: Vec<ComparisonResult>,
    pub self_citation_share: Option<f64>,
}

impl SetProfile {
    pub fn distribution(&self, attribute: &str) -> Option<&CategoricalDistribution> {
        self.distributions.iter().find(|d| d.attribute == attribute)
    }

    pub fn continuous(&self, attribute: &str) -> Option<&ContinuousSummary> {
        self.continuous.iter().find(|c| c.attribute == attribute)
    }

    pub fn group_top(&self, attribute: &str) -> Option<&GroupTop> {
        self.group_tops.iter().find(|g| g.group_attribute == attribute)
    }

    pub fn comparisons_for<'a>(&'a self, attribute: &'a str) -> impl Iterator<Item = &'a ComparisonResult> + 'a {
        self.comparisons.iter().filter(move |c| c.attribute == attribute)
    }

    /// Line-oriented dump, one fact per line, stable across runs.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "total\t{}", self.total);
        for d in &self.distributions {
            let _ = writeln!(w, "distribution\t{}\ttotal={}", d.attribute, d.total);
            for e in &d.entries {
                let _ = writeln!(
                    w,
                    "  value\t{}\tcount={}\tproportion={}\tbucket={}",
                    e.value, e.count, e.proportion, e.bucket
                );
            }
        }
        for c in &self.continuous {
            let _ = writeln!(w, "continuous\t{}", summary_text(c));
        }
        for m in &self.missing {
            let _ = writeln!(w, "missing\t{m}");
        }
        if let Some(s) = &self.dominating_shape {
            let _ = writeln!(w, "dominating\t{}", summary_text(s));
        }
        for g in &self.group_tops {
            let _ = writeln!(w, "group_top\t{}", g.group_attribute);
            for e in &g.entries {
                let _ = writeln!(
                    w,
                    "  group\t{}\tshare={}\tbucket={}\ttop={}\tcount={}\ttitle={}",
                    e.group_value,
                    e.share,
                    e.bucket,
                    e.top_reference,
                    opt(e.top_count),
                    e.top_title
                );
            }
        }
        for a in &self.top_authors {
            let _ = writeln!(
                w,
                "author\t{}\tname={}\tscore={}\tpapers={}\tcounted={}",
                a.author.normalized_key,
                a.author.display(),
                a.score,
                a.paper_count,
                a.counted
            );
        }
        if let Some(imp) = &self.importance {
            for s in &imp.ranking {
                let _ = writeln!(w, "importance\t{}\t{}", s.attribute, s.score);
            }
        }
        for c in &self.comparisons {
            let _ = writeln!(
                w,
                "comparison\t{}\t{}\tsubset={}\tsuperset={}\tdirection={}\tmagnitude={}",
                c.attribute, c.feature_value, c.subset_median, c.superset_median, c.direction, c.magnitude
            );
        }
        if let Some(s) = self.self_citation_share {
            let _ = writeln!(w, "self_citation_share\t{s}");
        }
        out
    }
}

fn summary_text(s: &ContinuousSummary) -> String {
    format!("{}\tcount={}\tmin={}\tmax={}\tmedian={}", s.attribute, s.count, s.min, s.max, s.median)
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

/// Runs every statistic the configured algorithm needs.
///
/// refset computes distributions, continuous summaries, per-group top
/// records, the author list and the self-citation share. prodset computes
/// distributions, the dominating shape, importance and subset comparisons.
/// Continuous attributes absent everywhere are listed in
/// [`SetProfile::missing`] rather than failing the run.
pub fn build_profile<R: Record>(records: &[R], config: &SummaryConfig) -> Result<SetProfile, ProfileError> {
    if records.is_empty() {
        return Err(ProfileError::EmptySet);
    }
    let thresholds = &config.quantifiers;
    let mut profile = SetProfile { total: records.len(), ..Default::default() };

    for spec in &config.attributes {
        let name = spec.name.as_str();
        match spec.kind {
            AttributeKind::Categorical => {
                profile
                    .distributions
                    .push(categorical_distribution(records, name, thresholds).map_err(|e| e.on(name))?);
                if config.algorithm == Algorithm::Refset && spec.role == Role::Grouping {
                    profile
                        .group_tops
                        .push(top_reference_per_group(records, name, thresholds).map_err(|e| e.on(name))?);
                }
            }
            AttributeKind::Continuous => match continuous_summary(records, name) {
                Ok(s) => profile.continuous.push(s),
                Err(ProfileError::FullyAbsent(_)) => profile.missing.push(name.to_string()),
                Err(e) => return Err(e.on(name)),
            },
            AttributeKind::Flag => {
                profile.self_citation_share = flag_share(records, name).map_err(|e| e.on(name))?;
            }
        }
    }

    match config.algorithm {
        Algorithm::Refset => {
            profile.top_authors = top_authors(records, config.author_k, config.author_scoring);
        }
        Algorithm::Prodset => {
            let Some(dominating) = config.dominating.as_deref() else {
                return Ok(profile);
            };
            profile.dominating_shape = match dominating_shape(records, dominating) {
                Ok(s) => Some(s),
                Err(ProfileError::FullyAbsent(_)) => None,
                Err(e) => return Err(e.on(dominating)),
            };
            let listed: Vec<&str> = config.with_role(Role::Listed).map(|a| a.name.as_str()).collect();
            profile.importance = match feature_importance(records, dominating, &listed) {
                Ok(imp) => Some(imp),
                Err(ProfileError::InsufficientDominating(_)) => None,
                Err(e) => return Err(e.on(dominating)),
            };
            if profile.dominating_shape.is_some() {
                for name in &listed {
                    let results = compare_values(records, name, dominating, &config.comparison).map_err(|e| e.on(name))?;
                    profile.comparisons.extend(results);
                }
            }
        }
    }
    Ok(profile)
}
