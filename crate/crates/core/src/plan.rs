//! Document planning with fixed schemata.
//!
//! A schema is an ordered recipe of message types. The refset schema is
//! intro (total + lead attribute), listed attributes, per-group top records,
//! the year/self-citation fusion and finally the author list. The prodset
//! schema opens with the dominating column's range and median and then lists
//! each feature, most influential first, with its superset comparison.
//! Messages carry profile fragments only; wording is chosen later.

use std::fmt::Write as _;

use thiserror::Error;

use crate::config::{Algorithm, AttributeKind, Role, SummaryConfig};
use crate::profile::{
    AuthorScore, CategoricalDistribution, ComparisonResult, ContinuousSummary, GroupTop, SetProfile,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MessageKind {
    IntroWithLeadAttribute,
    CategoricalQuant,
    ContinuousRange,
    CombinedYearSelfCite,
    GroupTopList,
    AuthorList,
    DominatingShape,
    FeatureWithComparison,
}

impl MessageKind {
    pub const ALL: [MessageKind; 8] = [
        MessageKind::IntroWithLeadAttribute,
        MessageKind::CategoricalQuant,
        MessageKind::ContinuousRange,
        MessageKind::CombinedYearSelfCite,
        MessageKind::GroupTopList,
        MessageKind::AuthorList,
        MessageKind::DominatingShape,
        MessageKind::FeatureWithComparison,
    ];
}

#[derive(Debug, Clone, PartialEq)]
pub enum Message {
    IntroWithLeadAttribute { total: usize, lead: CategoricalDistribution },
    CategoricalQuant(CategoricalDistribution),
    ContinuousRange(ContinuousSummary),
    CombinedYearSelfCite { year: Option<ContinuousSummary>, self_citation_share: Option<f64> },
    GroupTopList { distribution: CategoricalDistribution, tops: GroupTop },
    AuthorList { authors: Vec<AuthorScore>, k: usize },
    DominatingShape { total: usize, shape: ContinuousSummary },
    FeatureWithComparison { distribution: CategoricalDistribution, comparisons: Vec<ComparisonResult> },
}

impl Message {
    pub fn kind(&self) -> MessageKind {
        match self {
            Message::IntroWithLeadAttribute { .. } => MessageKind::IntroWithLeadAttribute,
            Message::CategoricalQuant(_) => MessageKind::CategoricalQuant,
            Message::ContinuousRange(_) => MessageKind::ContinuousRange,
            Message::CombinedYearSelfCite { .. } => MessageKind::CombinedYearSelfCite,
            Message::GroupTopList { .. } => MessageKind::GroupTopList,
            Message::AuthorList { .. } => MessageKind::AuthorList,
            Message::DominatingShape { .. } => MessageKind::DominatingShape,
            Message::FeatureWithComparison { .. } => MessageKind::FeatureWithComparison,
        }
    }

    /// Attributes whose data this message carries.
    pub fn attributes(&self) -> Vec<&str> {
        match self {
            Message::IntroWithLeadAttribute { lead, .. } => vec![&lead.attribute],
            Message::CategoricalQuant(d) => vec![&d.attribute],
            Message::ContinuousRange(s) | Message::DominatingShape { shape: s, .. } => vec![&s.attribute],
            Message::CombinedYearSelfCite { year, .. } => year.iter().map(|y| y.attribute.as_str()).collect(),
            Message::GroupTopList { distribution, .. } => vec![&distribution.attribute],
            Message::AuthorList { .. } => vec![],
            Message::FeatureWithComparison { distribution, .. } => vec![&distribution.attribute],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Paragraph {
    pub label: String,
    pub messages: Vec<Message>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DocumentPlan {
    pub algorithm: Algorithm,
    pub paragraphs: Vec<Paragraph>,
}

impl DocumentPlan {
    pub fn empty(algorithm: Algorithm) -> Self {
        DocumentPlan { algorithm, paragraphs: Vec::new() }
    }

    pub fn messages(&self) -> impl Iterator<Item = &Message> {
        self.paragraphs.iter().flat_map(|p| p.messages.iter())
    }

    /// Indented outline of paragraphs and messages with their key figures.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "plan\t{}", self.algorithm);
        for (i, p) in self.paragraphs.iter().enumerate() {
            let _ = writeln!(out, "paragraph\t{}\t{}", i + 1, p.label);
            for m in &p.messages {
                let _ = writeln!(out, "  {}", message_text(m));
            }
        }
        out
    }
}

fn dist_text(d: &CategoricalDistribution) -> String {
    d.entries
        .iter()
        .map(|e| format!("{}={}/{}", e.value, e.count, e.bucket))
        .collect::<Vec<_>>()
        .join(",")
}

fn message_text(m: &Message) -> String {
    match m {
        Message::IntroWithLeadAttribute { total, lead } => {
            format!("IntroWithLeadAttribute\ttotal={total}\t{}\t{}", lead.attribute, dist_text(lead))
        }
        Message::CategoricalQuant(d) => format!("CategoricalQuant\t{}\t{}", d.attribute, dist_text(d)),
        Message::ContinuousRange(s) => {
            format!("ContinuousRange\t{}\tmin={}\tmax={}\tmedian={}", s.attribute, s.min, s.max, s.median)
        }
        Message::CombinedYearSelfCite { year, self_citation_share } => {
            let year = year
                .as_ref()
                .map_or("-".to_string(), |s| format!("{}:{}..{}~{}", s.attribute, s.min, s.max, s.median));
            let share = self_citation_share.map_or("-".to_string(), |s| s.to_string());
            format!("CombinedYearSelfCite\tyear={year}\tself_citation_share={share}")
        }
        Message::GroupTopList { distribution, tops } => {
            let tops = tops
                .entries
                .iter()
                .map(|e| format!("{}->{}({})", e.group_value, e.top_reference, e.top_count.map_or("-".into(), |c| c.to_string())))
                .collect::<Vec<_>>()
                .join(",");
            format!("GroupTopList\t{}\t{}\t{}", distribution.attribute, dist_text(distribution), tops)
        }
        Message::AuthorList { authors, k } => {
            let names = authors
                .iter()
                .map(|a| format!("{}={}", a.author.normalized_key, a.score))
                .collect::<Vec<_>>()
                .join(",");
            format!("AuthorList\tk={k}\t{names}")
        }
        Message::DominatingShape { total, shape: s } => {
            format!("DominatingShape\ttotal={total}\t{}\tmin={}\tmax={}\tmedian={}", s.attribute, s.min, s.max, s.median)
        }
        Message::FeatureWithComparison { distribution, comparisons } => {
            let cmp = comparisons
                .iter()
                .map(|c| format!("{}:{}/{}({} vs {})", c.feature_value, c.direction, c.magnitude, c.subset_median, c.superset_median))
                .collect::<Vec<_>>()
                .join(",");
            format!("FeatureWithComparison\t{}\t{}\t{}", distribution.attribute, dist_text(distribution), cmp)
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlanError {
    #[error("profile lacks required fragment: {0}")]
    MissingFragment(String),
    #[error("no record carries a value for the dominating attribute `{0}`")]
    NoDominatingValues(String),
}

pub fn build_plan(profile: &SetProfile, config: &SummaryConfig) -> Result<DocumentPlan, PlanError> {
    match config.algorithm {
        Algorithm::Refset => build_refset_plan(profile, config),
        Algorithm::Prodset => build_prodset_plan(profile, config),
    }
}

fn distribution<'a>(profile: &'a SetProfile, name: &str) -> Result<&'a CategoricalDistribution, PlanError> {
    profile
        .distribution(name)
        .ok_or_else(|| PlanError::MissingFragment(format!("distribution of `{name}`")))
}

/// Paragraphs: intro fused with the lead attribute, listed attributes,
/// grouping attributes with their top records, the combined year and
/// self-citation paragraph, and the author list last. Middle paragraphs
/// follow attribute declaration order; the citation-count shape is never
/// planned. Paragraphs without data are skipped.
pub fn build_refset_plan(profile: &SetProfile, config: &SummaryConfig) -> Result<DocumentPlan, PlanError> {
    let lead = config
        .with_role(Role::Lead)
        .next()
        .ok_or_else(|| PlanError::MissingFragment("lead attribute".into()))?;
    let mut paragraphs = vec![Paragraph {
        label: "intro".into(),
        messages: vec![Message::IntroWithLeadAttribute {
            total: profile.total,
            lead: distribution(profile, &lead.name)?.clone(),
        }],
    }];

    let mut combined_done = false;
    for spec in &config.attributes {
        let name = spec.name.as_str();
        match (spec.role, spec.kind) {
            (Role::Lead, _) => {}
            (Role::Listed, AttributeKind::Categorical) => {
                let d = distribution(profile, name)?;
                if !d.is_all_unknown() {
                    paragraphs.push(Paragraph { label: name.into(), messages: vec![Message::CategoricalQuant(d.clone())] });
                }
            }
            (Role::Listed, _) => match profile.continuous(name) {
                Some(s) => paragraphs.push(Paragraph { label: name.into(), messages: vec![Message::ContinuousRange(s.clone())] }),
                None if profile.missing.iter().any(|m| m == name) => {}
                None => return Err(PlanError::MissingFragment(format!("summary of `{name}`"))),
            },
            (Role::Grouping, _) => {
                let d = distribution(profile, name)?;
                let tops = profile
                    .group_top(name)
                    .ok_or_else(|| PlanError::MissingFragment(format!("group tops of `{name}`")))?;
                if !tops.entries.is_empty() {
                    paragraphs.push(Paragraph {
                        label: name.into(),
                        messages: vec![Message::GroupTopList { distribution: d.clone(), tops: tops.clone() }],
                    });
                }
            }
            (Role::Combined, _) if combined_done => {}
            (Role::Combined, _) => {
                combined_done = true;
                let year = config
                    .with_role(Role::Combined)
                    .find(|a| a.kind == AttributeKind::Continuous)
                    .and_then(|a| profile.continuous(&a.name))
                    .cloned();
                let share = if config.with_role(Role::Combined).any(|a| a.kind == AttributeKind::Flag) {
                    profile.self_citation_share
                } else {
                    None
                };
                if year.is_some() || share.is_some() {
                    paragraphs.push(Paragraph {
                        label: "year_selfcite".into(),
                        messages: vec![Message::CombinedYearSelfCite { year, self_citation_share: share }],
                    });
                }
            }
        }
    }

    if !profile.top_authors.is_empty() {
        paragraphs.push(Paragraph {
            label: "authors".into(),
            messages: vec![Message::AuthorList { authors: profile.top_authors.clone(), k: config.author_k }],
        });
    }
    Ok(DocumentPlan { algorithm: Algorithm::Refset, paragraphs })
}

/// Paragraphs: the dominating column's range and median, then one
/// paragraph per listed attribute in importance order (declaration order
/// when importance could not be computed).
pub fn build_prodset_plan(profile: &SetProfile, config: &SummaryConfig) -> Result<DocumentPlan, PlanError> {
    let dominating = config.dominating.clone().unwrap_or_default();
    let shape = profile
        .dominating_shape
        .clone()
        .ok_or_else(|| PlanError::NoDominatingValues(dominating.clone()))?;
    let mut paragraphs = vec![Paragraph { label: "dominating".into(), messages: vec![Message::DominatingShape { total: profile.total, shape }] }];

    let mut listed: Vec<(usize, &str)> = config
        .with_role(Role::Listed)
        .enumerate()
        .map(|(i, a)| (i, a.name.as_str()))
        .collect();
    if let Some(importance) = &profile.importance {
        listed.sort_by_key(|(i, name)| (importance.position(name).unwrap_or(usize::MAX), *i));
    }
    for (_, name) in listed {
        let d = distribution(profile, name)?;
        if d.is_all_unknown() {
            continue;
        }
        let comparisons = profile.comparisons_for(name).cloned().collect();
        paragraphs.push(Paragraph {
            label: name.into(),
            messages: vec![Message::FeatureWithComparison { distribution: d.clone(), comparisons }],
        });
    }
    Ok(DocumentPlan { algorithm: Algorithm::Prodset, paragraphs })
}
