use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::config::{AuthorScoring, QuantifierThresholds};
use crate::ingest::PersonName;
use crate::record::Record;

use super::stats::{quantifier_with, Quantifier};
use super::ProfileError;

#[derive(Debug, Clone, PartialEq)]
pub struct GroupTopEntry {
    pub group_value: String,
    pub share: f64,
    pub bucket: Quantifier,
    pub top_reference: String,
    pub top_title: String,
    pub top_count: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupTop {
    pub group_attribute: String,
    /// Sorted by share descending, then group value ascending.
    pub entries: Vec<GroupTopEntry>,
}

/// Orders records best-first: higher citation count, then present before
/// absent count, then earlier year (present before absent), then title, then id.
pub fn prominence_order<R: Record>(a: &R, b: &R) -> Ordering {
    fn absent_last<T: Ord>(a: Option<T>, b: Option<T>, ascending: bool) -> Ordering {
        match (a, b) {
            (Some(x), Some(y)) if ascending => x.cmp(&y),
            (Some(x), Some(y)) => y.cmp(&x),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        }
    }
    absent_last(a.citation_count(), b.citation_count(), false)
        .then_with(|| absent_last(a.year(), b.year(), true))
        .then_with(|| a.label().cmp(b.label()))
        .then_with(|| a.id().cmp(b.id()))
}

/// For every observed value of `group_attribute`, the record with the
/// highest citation count. Records without the attribute form no group.
pub fn top_reference_per_group<R: Record>(
    records: &[R],
    group_attribute: &str,
    thresholds: &QuantifierThresholds,
) -> Result<GroupTop, ProfileError> {
    if records.is_empty() {
        return Err(ProfileError::EmptySet);
    }
    let mut groups: BTreeMap<String, Vec<&R>> = BTreeMap::new();
    for r in records {
        if let Some(value) = r.category(group_attribute) {
            groups.entry(value).or_default().push(r);
        }
    }
    let total = records.len() as f64;
    let mut entries = groups
        .into_iter()
        .map(|(group_value, members)| {
            let top = members
                .iter()
                .copied()
                .min_by(|a, b| prominence_order(*a, *b))
                .expect("groups are non-empty");
            let share = members.len() as f64 / total;
            Ok(GroupTopEntry {
                bucket: quantifier_with(share, thresholds)?,
                share,
                top_reference: top.id().to_string(),
                top_title: top.label().to_string(),
                top_count: top.citation_count(),
                group_value,
            })
        })
        .collect::<Result<Vec<_>, ProfileError>>()?;
    entries.sort_by(|a, b| b.share.total_cmp(&a.share).then_with(|| a.group_value.cmp(&b.group_value)));
    Ok(GroupTop { group_attribute: group_attribute.to_string(), entries })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthorScore {
    pub author: PersonName,
    pub score: u64,
    pub paper_count: usize,
    /// Whether any of the author's references carried a citation count.
    pub counted: bool,
}

/// Authors ranked by citation score, at most `k` of them.
///
/// Authors are identified by normalized key; a reference counts once per
/// author even if the name repeats in its list. Absent counts contribute 0.
/// The displayed name is the variant with the longest given name (then the
/// alphabetically first), so the result does not depend on record order.
pub fn top_authors<R: Record>(records: &[R], k: usize, scoring: AuthorScoring) -> Vec<AuthorScore> {
    struct Tally<'a> {
        name: &'a PersonName,
        score: u64,
        papers: usize,
        counted: bool,
    }
    let mut tally: BTreeMap<&str, Tally> = BTreeMap::new();
    for r in records {
        let count = r.citation_count();
        let mut seen: Vec<&str> = Vec::new();
        for name in r.authors() {
            let key = name.normalized_key.as_str();
            if seen.contains(&key) {
                continue;
            }
            seen.push(key);
            let t = tally.entry(key).or_insert(Tally { name, score: 0, papers: 0, counted: false });
            if better_display(name, t.name) {
                t.name = name;
            }
            t.papers += 1;
            if let Some(c) = count {
                t.counted = true;
                t.score = match scoring {
                    AuthorScoring::Sum => t.score + c,
                    AuthorScoring::Max => t.score.max(c),
                };
            }
        }
    }
    let mut scores: Vec<AuthorScore> = tally
        .into_values()
        .map(|t| AuthorScore { author: t.name.clone(), score: t.score, paper_count: t.papers, counted: t.counted })
        .collect();
    scores.sort_by(|a, b| {
        b.score
            .cmp(&a.score)
            .then_with(|| b.paper_count.cmp(&a.paper_count))
            .then_with(|| a.author.normalized_key.cmp(&b.author.normalized_key))
    });
    scores.truncate(k);
    scores
}

fn better_display(candidate: &PersonName, current: &PersonName) -> bool {
    let c = candidate.given.chars().count();
    let k = current.given.chars().count();
    c > k || (c == k && candidate.display() < current.display())
}
