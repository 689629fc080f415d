use std::collections::BTreeMap;
use std::fmt;

use crate::config::ComparisonBands;
use crate::record::{Record, UNKNOWN};

use super::stats::median;
use super::ProfileError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Higher,
    Lower,
    Same,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Magnitude {
    Same,
    Slightly,
    Much,
}

impl Direction {
    pub fn key(self) -> &'static str {
        match self {
            Direction::Higher => "higher",
            Direction::Lower => "lower",
            Direction::Same => "same",
        }
    }
}

impl Magnitude {
    pub fn key(self) -> &'static str {
        match self {
            Magnitude::Same => "same",
            Magnitude::Slightly => "slightly",
            Magnitude::Much => "much",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// How the records with one attribute value compare to the whole set on
/// the dominating column.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonResult {
    pub attribute: String,
    pub feature_value: String,
    pub subset_median: f64,
    pub superset_median: f64,
    pub direction: Direction,
    pub magnitude: Magnitude,
}

/// Classifies the relative difference `(sub - sup) / |sup|` into bands.
/// A zero superset median with a non-zero subset median is always `Much`.
pub fn classify_difference(subset_median: f64, superset_median: f64, bands: &ComparisonBands) -> (Direction, Magnitude) {
    let diff = subset_median - superset_median;
    if superset_median == 0.0 {
        return if diff == 0.0 {
            (Direction::Same, Magnitude::Same)
        } else if diff > 0.0 {
            (Direction::Higher, Magnitude::Much)
        } else {
            (Direction::Lower, Magnitude::Much)
        };
    }
    let r = diff / superset_median.abs();
    if r.abs() < bands.same {
        return (Direction::Same, Magnitude::Same);
    }
    let direction = if r > 0.0 { Direction::Higher } else { Direction::Lower };
    let magnitude = if r.abs() <= bands.slight { Magnitude::Slightly } else { Magnitude::Much };
    (direction, magnitude)
}

fn dominating_values<'a, R: Record + 'a>(records: impl IntoIterator<Item = &'a R>, dominating: &str) -> Vec<f64> {
    records.into_iter().filter_map(|r| r.numeric(dominating)).collect()
}

/// Compares the dominating-column median of `subset` against `superset`.
pub fn subset_vs_superset<R: Record>(
    attribute: &str,
    feature_value: &str,
    subset: &[&R],
    superset: &[R],
    dominating: &str,
    bands: &ComparisonBands,
) -> Result<ComparisonResult, ProfileError> {
    let mut sub = dominating_values(subset.iter().copied(), dominating);
    let mut sup = dominating_values(superset, dominating);
    let subset_median = median(&mut sub).ok_or_else(|| ProfileError::FullyAbsent(dominating.to_string()))?;
    let superset_median = median(&mut sup).ok_or_else(|| ProfileError::FullyAbsent(dominating.to_string()))?;
    let (direction, magnitude) = classify_difference(subset_median, superset_median, bands);
    Ok(ComparisonResult {
        attribute: attribute.to_string(),
        feature_value: feature_value.to_string(),
        subset_median,
        superset_median,
        direction,
        magnitude,
    })
}

/// One comparison per known value of `attribute` whose records carry at
/// least one dominating value, in value order.
pub fn compare_values<R: Record>(
    records: &[R],
    attribute: &str,
    dominating: &str,
    bands: &ComparisonBands,
) -> Result<Vec<ComparisonResult>, ProfileError> {
    let mut groups: BTreeMap<String, Vec<&R>> = BTreeMap::new();
    for r in records {
        if let Some(v) = r.category(attribute) {
            groups.entry(v).or_default().push(r);
        }
    }
    groups
        .into_iter()
        .filter(|(_, members)| members.iter().any(|r| r.numeric(dominating).is_some()))
        .map(|(value, members)| subset_vs_superset(attribute, &value, &members, records, dominating, bands))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceScore {
    pub attribute: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureImportance {
    /// Sorted by score descending, then attribute name ascending.
    pub ranking: Vec<ImportanceScore>,
}

impl FeatureImportance {
    pub fn position(&self, attribute: &str) -> Option<usize> {
        self.ranking.iter().position(|s| s.attribute == attribute)
    }
}

/// Scores each candidate by how far apart its categories sit on the
/// dominating column: the spread of per-category medians divided by the
/// overall range. Only records with a dominating value take part; absent
/// categories form their own `unknown` category; categories with fewer than
/// two records are left out of the spread.
pub fn feature_importance<R: Record>(
    records: &[R],
    dominating: &str,
    candidates: &[&str],
) -> Result<FeatureImportance, ProfileError> {
    let present: Vec<&R> = records.iter().filter(|r| r.numeric(dominating).is_some()).collect();
    if present.len() < 2 {
        return Err(ProfileError::InsufficientDominating(dominating.to_string()));
    }
    let all = dominating_values(present.iter().copied(), dominating);
    let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;

    let mut ranking: Vec<ImportanceScore> = candidates
        .iter()
        .map(|&attribute| {
            let mut by_value: BTreeMap<String, Vec<f64>> = BTreeMap::new();
            for r in &present {
                let v = r.category(attribute).unwrap_or_else(|| UNKNOWN.to_string());
                by_value.entry(v).or_default().extend(r.numeric(dominating));
            }
            let medians: Vec<f64> = by_value
                .into_values()
                .filter(|vals| vals.len() >= 2)
                .filter_map(|mut vals| median(&mut vals))
                .collect();
            let score = if range > 0.0 && medians.len() >= 2 {
                let top = medians.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let bottom = medians.iter().copied().fold(f64::INFINITY, f64::min);
                (top - bottom) / range
            } else {
                0.0
            };
            ImportanceScore { attribute: attribute.to_string(), score }
        })
        .collect();
    ranking.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.attribute.cmp(&b.attribute)));
    Ok(FeatureImportance { ranking })
}
