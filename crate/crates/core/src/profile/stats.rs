use std::collections::BTreeMap;
use std::fmt;

use crate::config::QuantifierThresholds;
use crate::record::{Record, UNKNOWN};

use super::ProfileError;

/// Vague quantity word for a proportion. Ordered `Some < LargeProportion < Most`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    Some,
    LargeProportion,
    Most,
}

impl Quantifier {
    /// Template selector for this bucket.
    pub fn key(self) -> &'static str {
        match self {
            Quantifier::Most => "most",
            Quantifier::LargeProportion => "large",
            Quantifier::Some => "some",
        }
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Bucket for `proportion` under the default 0.5 / 0.2 cut-offs.
pub fn quantifier_for(proportion: f64) -> Result<Quantifier, ProfileError> {
    quantifier_with(proportion, &QuantifierThresholds::default())
}

pub fn quantifier_with(proportion: f64, t: &QuantifierThresholds) -> Result<Quantifier, ProfileError> {
    if !(proportion > 0.0 && proportion <= 1.0) {
        return Err(ProfileError::Domain(proportion));
    }
    Ok(if proportion >= t.most {
        Quantifier::Most
    } else if proportion >= t.large {
        Quantifier::LargeProportion
    } else {
        Quantifier::Some
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryShare {
    pub value: String,
    pub count: usize,
    pub proportion: f64,
    pub bucket: Quantifier,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalDistribution {
    pub attribute: String,
    /// Sorted by proportion descending, then value ascending.
    pub entries: Vec<CategoryShare>,
    pub total: usize,
}

impl CategoricalDistribution {
    /// True when every record lacked the attribute.
    pub fn is_all_unknown(&self) -> bool {
        self.entries.iter().all(|e| e.value == UNKNOWN)
    }

    pub fn get(&self, value: &str) -> Option<&CategoryShare> {
        self.entries.iter().find(|e| e.value == value)
    }
}

pub fn categorical_distribution<R: Record>(
    records: &[R],
    attribute: &str,
    thresholds: &QuantifierThresholds,
) -> Result<CategoricalDistribution, ProfileError> {
    if records.is_empty() {
        return Err(ProfileError::EmptySet);
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for r in records {
        let value = r.category(attribute).unwrap_or_else(|| UNKNOWN.to_string());
        *counts.entry(value).or_default() += 1;
    }
    let total = records.len();
    let mut entries = counts
        .into_iter()
        .map(|(value, count)| {
            let proportion = count as f64 / total as f64;
            Ok(CategoryShare { value, count, proportion, bucket: quantifier_with(proportion, thresholds)? })
        })
        .collect::<Result<Vec<_>, ProfileError>>()?;
    // counts share a denominator, so ordering by count is ordering by proportion
    entries.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.value.cmp(&b.value)));
    Ok(CategoricalDistribution { attribute: attribute.to_string(), entries, total })
}

/// Range and median of one numeric attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousSummary {
    pub attribute: String,
    pub min: f64,
    pub max: f64,
    pub median: f64,
    /// Number of records where the attribute is present.
    pub count: usize,
}

pub fn continuous_summary<R: Record>(records: &[R], attribute: &str) -> Result<ContinuousSummary, ProfileError> {
    if records.is_empty() {
        return Err(ProfileError::EmptySet);
    }
    let mut values: Vec<f64> = records.iter().filter_map(|r| r.numeric(attribute)).collect();
    let median = median(&mut values).ok_or_else(|| ProfileError::FullyAbsent(attribute.to_string()))?;
    Ok(ContinuousSummary {
        attribute: attribute.to_string(),
        min: values[0],
        max: values[values.len() - 1],
        median,
        count: values.len(),
    })
}

/// The dominating column's range and median.
pub fn dominating_shape<R: Record>(records: &[R], dominating: &str) -> Result<ContinuousSummary, ProfileError> {
    continuous_summary(records, dominating)
}

/// Sorts `values` and returns the median (midpoint of the central pair for
/// even lengths), or `None` for an empty slice.
pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

/// Fraction of records whose self-citation flag is set.
pub fn self_citation_share<R: Record>(records: &[R]) -> Result<f64, ProfileError> {
    if records.is_empty() {
        return Err(ProfileError::EmptySet);
    }
    let hits = records.iter().filter(|r| r.self_citation() == Some(true)).count();
    Ok(hits as f64 / records.len() as f64)
}

/// Fraction of records whose `attribute` reads `yes`; `None` when no record
/// carries the attribute at all.
pub fn flag_share<R: Record>(records: &[R], attribute: &str) -> Result<Option<f64>, ProfileError> {
    if records.is_empty() {
        return Err(ProfileError::EmptySet);
    }
    let values: Vec<String> = records.iter().filter_map(|r| r.category(attribute)).collect();
    if values.is_empty() {
        return Ok(None);
    }
    let hits = values.iter().filter(|v| v.as_str() == "yes").count();
    Ok(Some(hits as f64 / records.len() as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::Item;

    fn items(attr: &str, values: &[&str]) -> Vec<Item> {
        values
            .iter()
            .enumerate()
            .map(|(i, v)| Item::new(format!("i{i}")).with_category(attr, v))
            .collect()
    }

    fn numbers(attr: &str, values: &[f64]) -> Vec<Item> {
        values
            .iter()
            .enumerate()
            .map(|(i, v)| Item::new(format!("i{i}")).with_number(attr, *v))
            .collect()
    }

    #[test]
    fn quantifier_examples() {
        assert_eq!(quantifier_for(0.55).unwrap(), Quantifier::Most);
        assert_eq!(quantifier_for(0.30).unwrap(), Quantifier::LargeProportion);
        assert_eq!(quantifier_for(0.15).unwrap(), Quantifier::Some);
        assert_eq!(quantifier_for(0.50).unwrap(), Quantifier::Most);
        assert_eq!(quantifier_for(0.20).unwrap(), Quantifier::LargeProportion);
        assert_eq!(quantifier_for(1.0).unwrap(), Quantifier::Most);
        assert!(quantifier_for(0.0).is_err());
        assert!(quantifier_for(-0.1).is_err());
        assert!(quantifier_for(1.01).is_err());
        assert!(quantifier_for(f64::NAN).is_err());
    }

    #[test]
    fn distribution_55_30_15() {
        let mut values = vec!["proceedings"; 11];
        values.extend(["journal"; 6]);
        values.extend(["book"; 3]);
        let d = categorical_distribution(&items("venue_type", &values), "venue_type", &Default::default()).unwrap();
        let got: Vec<_> = d.entries.iter().map(|e| (e.value.as_str(), e.count, e.bucket)).collect();
        assert_eq!(
            got,
            [
                ("proceedings", 11, Quantifier::Most),
                ("journal", 6, Quantifier::LargeProportion),
                ("book", 3, Quantifier::Some)
            ]
        );
        assert!((d.entries[0].proportion - 0.55).abs() < 1e-12);
        assert!((d.entries[1].proportion - 0.30).abs() < 1e-12);
        assert!((d.entries[2].proportion - 0.15).abs() < 1e-12);
    }

    #[test]
    fn distribution_single_and_even_split() {
        let d = categorical_distribution(&items("a", &["x", "x"]), "a", &Default::default()).unwrap();
        assert_eq!(d.entries.len(), 1);
        assert_eq!(d.entries[0].proportion, 1.0);
        assert_eq!(d.entries[0].bucket, Quantifier::Most);

        let d = categorical_distribution(&items("a", &["d", "b", "c", "a"]), "a", &Default::default()).unwrap();
        let order: Vec<_> = d.entries.iter().map(|e| e.value.as_str()).collect();
        assert_eq!(order, ["a", "b", "c", "d"]);
        assert!(d.entries.iter().all(|e| e.bucket == Quantifier::LargeProportion));
    }

    #[test]
    fn distribution_absent_is_unknown_and_empty_errors() {
        let recs = vec![Item::new("a").with_category("k", "x"), Item::new("b")];
        let d = categorical_distribution(&recs, "k", &Default::default()).unwrap();
        assert!(d.get(UNKNOWN).is_some());
        assert!(!d.is_all_unknown());
        assert_eq!(
            categorical_distribution::<Item>(&[], "k", &Default::default()).unwrap_err(),
            ProfileError::EmptySet
        );
    }

    #[test]
    fn continuous_examples() {
        let s = continuous_summary(&numbers("year", &[2014.0, 2015.0, 2015.0]), "year").unwrap();
        assert_eq!((s.min, s.max, s.median, s.count), (2014.0, 2015.0, 2015.0, 3));
        let s = continuous_summary(&numbers("year", &[2010.0]), "year").unwrap();
        assert_eq!((s.min, s.max, s.median), (2010.0, 2010.0, 2010.0));
        let s = continuous_summary(&numbers("year", &[2014.0, 2012.0]), "year").unwrap();
        assert_eq!(s.median, 2013.0);
        assert_eq!(
            continuous_summary(&[Item::new("a")], "year").unwrap_err(),
            ProfileError::FullyAbsent("year".into())
        );
    }

    #[test]
    fn dominating_shape_examples() {
        let s = dominating_shape(&numbers("price", &[450.0, 475.0, 500.0]), "price").unwrap();
        assert_eq!((s.min, s.max, s.median), (450.0, 500.0, 475.0));
        let s = dominating_shape(&numbers("c", &[10.0; 4]), "c").unwrap();
        assert_eq!((s.min, s.max, s.median), (10.0, 10.0, 10.0));
        // frozen from a sort-and-pick oracle: sorted [0,1,5,100], centre pair (1,5)
        let s = dominating_shape(&numbers("c", &[100.0, 0.0, 5.0, 1.0]), "c").unwrap();
        assert_eq!((s.min, s.max, s.median), (0.0, 100.0, 3.0));
    }

    #[test]
    fn flag_share_absent_vs_zero() {
        let none = vec![Item::new("a"), Item::new("b")];
        assert_eq!(flag_share(&none, "self_citation").unwrap(), None);
        let zero = items("self_citation", &["no", "no"]);
        assert_eq!(flag_share(&zero, "self_citation").unwrap(), Some(0.0));
    }
}
