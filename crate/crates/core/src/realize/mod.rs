//! Template realisation of document plans.

pub mod format;
pub mod template;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::{SummaryConfig, Wording};
use crate::ingest::reference::ATTR_YEAR;
use crate::plan::{DocumentPlan, Message};
use crate::profile::{
    AuthorScore, CategoricalDistribution, ComparisonResult, ContinuousSummary, Direction, GroupTop, Quantifier,
};
use crate::record::UNKNOWN;

pub use format::{aggregate_list, format_number, format_percentage, format_year, round_decimal};
pub use template::{RealizeError, TemplateError, TemplatePack};

pub const DEFAULT_PACK: &str = include_str!("../../data/default.pack");

/// Sections every pack must define.
pub const REQUIRED_SECTIONS: &[&str] = &[
    "intro",
    "phrase",
    "quant.most.first",
    "quant.most.subsequent",
    "quant.large.first",
    "quant.large.subsequent",
    "quant.some.first",
    "quant.some.subsequent",
    "continuous",
    "combined.year_selfcite",
    "combined.year",
    "combined.selfcite",
    "group_top.counted",
    "group_top.plain",
    "group_top.uncounted",
    "citations",
    "author_list.counted",
    "author_list.uncounted",
    "author_item.counted",
    "author_item.plain",
    "dominating_shape",
    "comparison.higher",
    "comparison.lower",
    "comparison.same",
];

#[derive(Debug, Error)]
pub enum PackLoadError {
    #[error("cannot read template pack {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Template(#[from] TemplateError),
}

impl TemplatePack {
    pub fn builtin() -> TemplatePack {
        TemplatePack::parse(DEFAULT_PACK).expect("built-in template pack parses")
    }

    /// Parses a pack and checks it defines every required section.
    pub fn parse_complete(text: &str) -> Result<TemplatePack, TemplateError> {
        let pack = TemplatePack::parse(text)?;
        pack.require(REQUIRED_SECTIONS)?;
        Ok(pack)
    }

    pub fn load(path: &Path) -> Result<TemplatePack, PackLoadError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| PackLoadError::Read { path: path.to_path_buf(), source })?;
        Ok(TemplatePack::parse_complete(&text)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    First,
    Subsequent,
}

impl Position {
    fn key(self) -> &'static str {
        match self {
            Position::First => "first",
            Position::Subsequent => "subsequent",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealizeOptions {
    pub wording: Wording,
    /// Whether citation counts appear in the text.
    pub show_counts: bool,
}

impl Default for RealizeOptions {
    fn default() -> Self {
        RealizeOptions { wording: Wording::default(), show_counts: true }
    }
}

impl From<&SummaryConfig> for RealizeOptions {
    fn from(config: &SummaryConfig) -> Self {
        RealizeOptions { wording: config.wording.clone(), show_counts: config.show_counts }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RealizedSummary {
    pub paragraphs: Vec<String>,
    pub full_text: String,
}

impl RealizedSummary {
    pub fn from_paragraphs(paragraphs: Vec<String>) -> RealizedSummary {
        let full_text = paragraphs.join("\n\n");
        RealizedSummary { paragraphs, full_text }
    }
}

/// Renders `plan` with `pack`, one string per plan paragraph.
pub fn realize(plan: &DocumentPlan, pack: &TemplatePack, options: &RealizeOptions) -> Result<RealizedSummary, RealizeError> {
    Realizer::new(pack, options).realize(plan)
}

pub struct Realizer<'a> {
    pack: &'a TemplatePack,
    options: &'a RealizeOptions,
}

impl<'a> Realizer<'a> {
    pub fn new(pack: &'a TemplatePack, options: &'a RealizeOptions) -> Self {
        Realizer { pack, options }
    }

    pub fn realize(&self, plan: &DocumentPlan) -> Result<RealizedSummary, RealizeError> {
        let mut paragraphs = Vec::with_capacity(plan.paragraphs.len());
        for paragraph in &plan.paragraphs {
            let mut sentences = Vec::new();
            for message in &paragraph.messages {
                sentences.extend(self.message(message)?);
            }
            let text = sentences.join(" ");
            let text = text.lines().map(str::trim_end).collect::<Vec<_>>().join("\n");
            paragraphs.push(text.trim().to_string());
        }
        Ok(RealizedSummary::from_paragraphs(paragraphs))
    }

    pub fn message(&self, message: &Message) -> Result<Vec<String>, RealizeError> {
        match message {
            Message::IntroWithLeadAttribute { total, lead } => {
                let total_s = total.to_string();
                let kinds: &[&str] = if *total == 1 { &["intro.one", "intro"] } else { &["intro"] };
                let mut out = vec![self.pack.render_first(kinds, &[("total", &total_s), ("noun", self.noun())])?];
                out.extend(self.distribution(lead)?);
                Ok(out)
            }
            Message::CategoricalQuant(d) => self.distribution(d),
            Message::ContinuousRange(s) => Ok(vec![self.continuous(s)?]),
            Message::CombinedYearSelfCite { year, self_citation_share } => {
                Ok(vec![self.combined(year.as_ref(), *self_citation_share)?])
            }
            Message::GroupTopList { distribution, tops } => {
                let mut out = self.distribution(distribution)?;
                out.extend(self.group_tops(tops)?);
                Ok(out)
            }
            Message::AuthorList { authors, .. } => Ok(vec![self.authors(authors)?]),
            Message::DominatingShape { total, shape } => Ok(vec![self.dominating_shape(*total, shape)?]),
            Message::FeatureWithComparison { distribution, comparisons } => {
                self.feature_with_comparison(distribution, comparisons)
            }
        }
    }

    fn noun(&self) -> &str {
        &self.options.wording.noun
    }

    fn conjunction(&self) -> &str {
        self.pack.lexicon("conjunction").unwrap_or("and")
    }

    /// Surface form of an attribute value.
    pub fn lexicalize(&self, attribute: &str, value: &str) -> String {
        if let Some(word) = self.pack.lexicon(&format!("{attribute}.{value}")) {
            return word.to_string();
        }
        if value == UNKNOWN {
            if let Some(word) = self.pack.lexicon(UNKNOWN) {
                return word.to_string();
            }
        }
        value.replace(['-', '_'], " ")
    }

    fn attribute_label(&self, attribute: &str) -> String {
        self.pack
            .lexicon(&format!("attribute.{attribute}"))
            .map_or_else(|| attribute.replace('_', " "), str::to_string)
    }

    /// Prepositional phrase for a value, e.g. "from journals".
    pub fn phrase(&self, attribute: &str, value: &str) -> Result<String, RealizeError> {
        let word = self.lexicalize(attribute, value);
        let specific = format!("phrase.{attribute}.{value}");
        let general = format!("phrase.{attribute}");
        self.pack.render_first(&[&specific, &general, "phrase"], &[("value", &word)])
    }

    /// One quantified sentence for `value` of `attribute`.
    pub fn quantifier_sentence(
        &self,
        bucket: Quantifier,
        attribute: &str,
        value: &str,
        percentage: &str,
        position: Position,
    ) -> Result<String, RealizeError> {
        let phrase = self.phrase(attribute, value)?;
        let specific = format!("quant.{}.{}.{}", attribute, bucket.key(), position.key());
        let general = format!("quant.{}.{}", bucket.key(), position.key());
        self.pack.render_first(
            &[&specific, &general],
            &[("noun", self.noun()), ("phrase", &phrase), ("pct", percentage), ("value", &self.lexicalize(attribute, value))],
        )
    }

    fn distribution(&self, d: &CategoricalDistribution) -> Result<Vec<String>, RealizeError> {
        d.entries
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let position = if i == 0 { Position::First } else { Position::Subsequent };
                self.quantifier_sentence(e.bucket, &d.attribute, &e.value, &format_percentage(e.proportion)?, position)
            })
            .collect()
    }

    fn value_text(attribute: &str, v: f64) -> String {
        if attribute == ATTR_YEAR {
            format_year(v)
        } else {
            format_number(v)
        }
    }

    fn continuous(&self, s: &ContinuousSummary) -> Result<String, RealizeError> {
        let min = Self::value_text(&s.attribute, s.min);
        let max = Self::value_text(&s.attribute, s.max);
        let median = Self::value_text(&s.attribute, s.median);
        let label = self.attribute_label(&s.attribute);
        let kinds: &[&str] = if s.min == s.max { &["continuous.same", "continuous"] } else { &["continuous"] };
        self.pack.render_first(
            kinds,
            &[("attribute", &label), ("noun", self.noun()), ("min", &min), ("max", &max), ("median", &median)],
        )
    }

    fn combined(&self, year: Option<&ContinuousSummary>, share: Option<f64>) -> Result<String, RealizeError> {
        let share = share.map(format_percentage).transpose()?;
        let share = share.as_deref().unwrap_or_default();
        let noun = self.noun();
        match year {
            Some(y) => {
                let min = format_year(y.min);
                let max = format_year(y.max);
                let median = format_year(y.median);
                let base = if share.is_empty() { "combined.year" } else { "combined.year_selfcite" };
                let same = format!("{base}.same");
                let kinds: Vec<&str> = if y.min == y.max { vec![&same, base] } else { vec![base] };
                self.pack.render_first(
                    &kinds,
                    &[("noun", noun), ("min", &min), ("max", &max), ("median", &median), ("share", share)],
                )
            }
            None => self.pack.render("combined.selfcite", &[("noun", noun), ("share", share)]),
        }
    }

    fn citations(&self, n: u64) -> Result<String, RealizeError> {
        let n_s = n.to_string();
        let kinds: &[&str] = if n == 1 { &["citations.one", "citations"] } else { &["citations"] };
        self.pack.render_first(kinds, &[("n", &n_s)])
    }

    fn group_tops(&self, tops: &GroupTop) -> Result<Vec<String>, RealizeError> {
        tops.entries
            .iter()
            .map(|e| {
                let group = self.lexicalize(&tops.group_attribute, &e.group_value);
                let title = if e.top_title.is_empty() { &e.top_reference } else { &e.top_title };
                match e.top_count {
                    Some(n) if self.options.show_counts => {
                        let citations = self.citations(n)?;
                        self.pack.render(
                            "group_top.counted",
                            &[("group", &group), ("title", title), ("citations", &citations), ("count", &n.to_string())],
                        )
                    }
                    Some(_) => self.pack.render("group_top.plain", &[("group", &group), ("title", title)]),
                    None => self.pack.render("group_top.uncounted", &[("group", &group), ("title", title)]),
                }
            })
            .collect()
    }

    fn authors(&self, authors: &[AuthorScore]) -> Result<String, RealizeError> {
        let items = authors
            .iter()
            .map(|a| {
                let name = a.author.display();
                if a.counted && self.options.show_counts {
                    let citations = self.citations(a.score)?;
                    self.pack.render("author_item.counted", &[("name", &name), ("citations", &citations)])
                } else {
                    self.pack.render("author_item.plain", &[("name", &name)])
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let base = if authors.iter().any(|a| a.counted) { "author_list.counted" } else { "author_list.uncounted" };
        let one = format!("{base}.one");
        let kinds: Vec<&str> = if authors.len() == 1 { vec![&one, base] } else { vec![base] };
        let n = authors.len().to_string();
        self.pack.render_first(&kinds, &[("n", &n), ("authors", &aggregate_list(&items, self.conjunction()))])
    }

    fn unit_value(&self, v: f64) -> String {
        format!("{}{}", self.options.wording.unit, format_number(v))
    }

    fn dominating_shape(&self, total: usize, s: &ContinuousSummary) -> Result<String, RealizeError> {
        let kinds: &[&str] = if s.min == s.max { &["dominating_shape.same", "dominating_shape"] } else { &["dominating_shape"] };
        self.pack.render_first(
            kinds,
            &[
                ("dominating", &self.options.wording.dominating_label),
                ("noun", self.noun()),
                ("total", &total.to_string()),
                ("min", &self.unit_value(s.min)),
                ("max", &self.unit_value(s.max)),
                ("median", &self.unit_value(s.median)),
            ],
        )
    }

    /// Sentence comparing one value's subset against the whole set.
    pub fn comparison_sentence(&self, c: &ComparisonResult) -> Result<String, RealizeError> {
        let phrase = self.phrase(&c.attribute, &c.feature_value)?;
        let wording = &self.options.wording;
        let comparative = match c.direction {
            Direction::Higher => wording.higher.as_str(),
            Direction::Lower => wording.lower.as_str(),
            Direction::Same => "",
        };
        let magnitude_key = format!("magnitude.{}", c.magnitude.key());
        let magnitude = self.pack.lexicon(&magnitude_key).unwrap_or(c.magnitude.key());
        let kind = format!("comparison.{}", c.direction.key());
        let text = self.pack.render(
            &kind,
            &[
                ("phrase", &phrase),
                ("magnitude", magnitude),
                ("comparative", comparative),
                ("dominating", &wording.dominating_label),
                ("subset", &self.unit_value(c.subset_median)),
                ("superset", &self.unit_value(c.superset_median)),
            ],
        )?;
        Ok(text.split_whitespace().collect::<Vec<_>>().join(" "))
    }

    fn feature_with_comparison(
        &self,
        d: &CategoricalDistribution,
        comparisons: &[ComparisonResult],
    ) -> Result<Vec<String>, RealizeError> {
        let mut out = Vec::new();
        for (i, e) in d.entries.iter().enumerate() {
            let position = if i == 0 { Position::First } else { Position::Subsequent };
            out.push(self.quantifier_sentence(e.bucket, &d.attribute, &e.value, &format_percentage(e.proportion)?, position)?);
            if let Some(c) = comparisons.iter().find(|c| c.feature_value == e.value) {
                out.push(self.comparison_sentence(c)?);
            }
        }
        Ok(out)
    }
}
