//! Shared test support: random record sets and brute-force oracles that
//! recompute every statistic without calling into the profile module.

#![allow(dead_code)]

use std::path::PathBuf;

use proptest::prelude::*;
use refsum::config::{AuthorScoring, QuantifierThresholds, SummaryConfig};
use refsum::ingest::{PersonName, ReferenceRecord, VenueType};
use refsum::profile::{build_profile, Quantifier, SetProfile};
use refsum::{Item, Record};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

const NAMES: &[(&str, &str)] = &[
    ("Smith", "John"),
    ("Smith", "J."),
    ("Smith", "Jane"),
    ("Ng", "Andrew"),
    ("Garcia", "Maria"),
    ("Garcia", ""),
    ("Okafor", "Chidi"),
    ("Lee", "Min"),
];
const TITLES: &[&str] = &["Alpha", "Beta", "Gamma", "Delta", "Epsilon"];
const DOMAINS: &[&str] = &["cs", "ling", "psych"];
const SUBDOMAINS: &[&str] = &["nlg", "ml", "ir", "hci"];

fn opt<T: std::fmt::Debug + Clone + 'static>(s: impl Strategy<Value = T> + 'static) -> BoxedStrategy<Option<T>> {
    prop_oneof![1 => Just(None), 4 => s.prop_map(Some)].boxed()
}

pub fn reference_strategy() -> impl Strategy<Value = ReferenceRecord> {
    (
        0..TITLES.len(),
        prop::collection::vec(0..NAMES.len(), 0..4),
        opt(1990i32..2000),
        0..4usize,
        opt(0..DOMAINS.len()),
        opt(0..SUBDOMAINS.len()),
        opt(0u64..50),
        opt(any::<bool>()),
    )
        .prop_map(|(title, authors, year, venue, domain, subdomain, count, selfcite)| {
            let mut r = ReferenceRecord::new("");
            r.title = TITLES[title].to_string();
            r.authors = authors.into_iter().map(|i| PersonName::new(NAMES[i].0, NAMES[i].1)).collect();
            r.year = year;
            r.venue_type = [VenueType::Proceedings, VenueType::Journal, VenueType::Book, VenueType::Other][venue];
            r.domain = domain.map(|d| DOMAINS[d].to_string());
            r.subdomain = subdomain.map(|s| SUBDOMAINS[s].to_string());
            r.citation_count = count;
            r.self_citation = selfcite;
            r
        })
}

/// Between 1 and `max` references with ids `r0`, `r1`, ...
pub fn reference_set(max: usize) -> impl Strategy<Value = Vec<ReferenceRecord>> {
    prop::collection::vec(reference_strategy(), 1..=max).prop_map(|mut v| {
        for (i, r) in v.iter_mut().enumerate() {
            r.id = format!("r{i}");
        }
        v
    })
}

/// Items with a real-valued `price` and two categorical features.
pub fn item_set(max: usize) -> impl Strategy<Value = Vec<Item>> {
    prop::collection::vec((opt(0.0f64..1000.0), opt(0..3usize), 0..2usize), 1..=max).prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (price, colour, size))| {
                let mut item = Item::new(format!("i{i}")).with_category("size", ["small", "large"][size]);
                if let Some(p) = price {
                    item = item.with_number("price", p);
                }
                if let Some(c) = colour {
                    item = item.with_category("colour", ["red", "green", "blue"][c]);
                }
                item
            })
            .collect()
    })
}

// ---- oracles ----

/// k-th smallest (0-based) by counting, without sorting.
pub fn kth(values: &[f64], k: usize) -> f64 {
    for &v in values {
        let below = values.iter().filter(|&&x| x < v).count();
        let at_or_below = values.iter().filter(|&&x| x <= v).count();
        if below <= k && k < at_or_below {
            return v;
        }
    }
    unreachable!("k out of range")
}

pub fn oracle_median(values: &[f64]) -> Option<f64> {
    let n = values.len();
    if n == 0 {
        return None;
    }
    Some(if n % 2 == 1 { kth(values, n / 2) } else { (kth(values, n / 2 - 1) + kth(values, n / 2)) / 2.0 })
}

pub fn oracle_range(values: &[f64]) -> Option<(f64, f64)> {
    let min = values.iter().copied().reduce(|a, b| if b < a { b } else { a })?;
    let max = values.iter().copied().reduce(|a, b| if b > a { b } else { a })?;
    Some((min, max))
}

pub fn oracle_bucket(p: f64, t: &QuantifierThresholds) -> Quantifier {
    if p >= t.most {
        Quantifier::Most
    } else if p >= t.large {
        Quantifier::LargeProportion
    } else {
        Quantifier::Some
    }
}

/// `(value, count)` pairs, most frequent first, ties by value.
pub fn oracle_distribution<R: Record>(records: &[R], attribute: &str) -> Vec<(String, usize)> {
    let values: Vec<String> = records.iter().map(|r| r.category(attribute).unwrap_or_else(|| "unknown".into())).collect();
    let mut distinct: Vec<String> = Vec::new();
    for v in &values {
        if !distinct.contains(v) {
            distinct.push(v.clone());
        }
    }
    let mut out: Vec<(String, usize)> =
        distinct.into_iter().map(|d| (d.clone(), values.iter().filter(|v| **v == d).count())).collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    out
}

/// `(key, score, papers)` for the top `k` authors.
pub fn oracle_top_authors(records: &[ReferenceRecord], k: usize, scoring: AuthorScoring) -> Vec<(String, u64, usize)> {
    let mut keys: Vec<String> = records.iter().flat_map(|r| r.authors.iter().map(|a| a.normalized_key.clone())).collect();
    keys.sort();
    keys.dedup();
    let mut rows: Vec<(String, u64, usize)> = keys
        .into_iter()
        .map(|key| {
            let mine: Vec<&ReferenceRecord> =
                records.iter().filter(|r| r.authors.iter().any(|a| a.normalized_key == key)).collect();
            let counts = mine.iter().map(|r| r.citation_count.unwrap_or(0));
            let score = match scoring {
                AuthorScoring::Sum => counts.sum(),
                AuthorScoring::Max => counts.max().unwrap_or(0),
            };
            (key, score, mine.len())
        })
        .collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then(b.2.cmp(&a.2)).then(a.0.cmp(&b.0)));
    rows.truncate(k);
    rows
}

/// `(group, top id, member count)`, largest group first.
pub fn oracle_group_tops(records: &[ReferenceRecord]) -> Vec<(String, String, usize)> {
    let mut groups: Vec<String> = records.iter().filter_map(|r| r.subdomain.clone()).collect();
    groups.sort();
    groups.dedup();
    let mut out: Vec<(String, String, usize)> = groups
        .into_iter()
        .map(|g| {
            let members: Vec<&ReferenceRecord> = records.iter().filter(|r| r.subdomain.as_deref() == Some(&g)).collect();
            // rank key: count present and high first, then year present and low, then title, then id
            let best = members
                .iter()
                .min_by_key(|r| {
                    (
                        r.citation_count.is_none(),
                        std::cmp::Reverse(r.citation_count.unwrap_or(0)),
                        r.year.is_none(),
                        r.year.unwrap_or(0),
                        r.title.clone(),
                        r.id.clone(),
                    )
                })
                .unwrap();
            (g, best.id.clone(), members.len())
        })
        .collect();
    out.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)));
    out
}

pub fn oracle_self_citation_share(records: &[ReferenceRecord]) -> Option<f64> {
    let flagged = records.iter().filter(|r| r.self_citation.is_some()).count();
    let yes = records.iter().filter(|r| r.self_citation == Some(true)).count();
    (flagged > 0).then(|| yes as f64 / records.len() as f64)
}

/// Spread of per-category medians over the overall range.
pub fn oracle_importance<R: Record>(records: &[R], dominating: &str, attribute: &str) -> Option<f64> {
    let present: Vec<&R> = records.iter().filter(|r| r.numeric(dominating).is_some()).collect();
    if present.len() < 2 {
        return None;
    }
    let all: Vec<f64> = present.iter().map(|r| r.numeric(dominating).unwrap()).collect();
    let (lo, hi) = oracle_range(&all).unwrap();
    let cat = |r: &R| r.category(attribute).unwrap_or_else(|| "unknown".into());
    let mut cats: Vec<String> = present.iter().map(|r| cat(r)).collect();
    cats.sort();
    cats.dedup();
    let medians: Vec<f64> = cats
        .iter()
        .filter_map(|c| {
            let vals: Vec<f64> = present.iter().filter(|r| &cat(r) == c).map(|r| r.numeric(dominating).unwrap()).collect();
            if vals.len() >= 2 {
                oracle_median(&vals)
            } else {
                None
            }
        })
        .collect();
    if hi - lo == 0.0 || medians.len() < 2 {
        return Some(0.0);
    }
    let (mlo, mhi) = oracle_range(&medians).unwrap();
    Some((mhi - mlo) / (hi - lo))
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn values_of<R: Record>(records: &[R], attribute: &str) -> Vec<f64> {
    records.iter().filter_map(|r| r.numeric(attribute)).collect()
}

/// Checks a refset and a prodset profile of `records` against the oracles.
/// All data here is integer-valued, so comparisons are exact.
pub fn check_reference_profile(records: &[ReferenceRecord]) -> Result<(), String> {
    let refset = SummaryConfig::refset_default();
    let prodset = SummaryConfig::prodset_default();
    let p = build_profile(records, &refset).map_err(|e| e.to_string())?;
    let q = build_profile(records, &prodset).map_err(|e| e.to_string())?;

    ensure(p.total == records.len(), || "total".into())?;
    check_continuous(&p, records, "year")?;
    match oracle_median(&values_of(records, "citation_count")) {
        Some(m) => {
            let shape = q.dominating_shape.as_ref().ok_or("dominating shape missing")?;
            let (lo, hi) = oracle_range(&values_of(records, "citation_count")).unwrap();
            ensure((shape.min, shape.max, shape.median) == (lo, hi, m), || format!("dominating shape {shape:?}"))?;
        }
        None => ensure(q.dominating_shape.is_none(), || "dominating shape should be absent".into())?,
    }
    for attr in ["venue_type", "domain", "subdomain"] {
        check_distribution(&p, records, attr, &refset.quantifiers)?;
    }

    for scoring in [AuthorScoring::Sum, AuthorScoring::Max] {
        let mut config = refset.clone();
        config.author_scoring = scoring;
        let got: Vec<(String, u64, usize)> = build_profile(records, &config)
            .map_err(|e| e.to_string())?
            .top_authors
            .iter()
            .map(|a| (a.author.normalized_key.clone(), a.score, a.paper_count))
            .collect();
        let want = oracle_top_authors(records, 7, scoring);
        ensure(got == want, || format!("top authors ({scoring:?}): got {got:?}, want {want:?}"))?;
    }

    let got: Vec<(String, String, usize)> = p
        .group_top("subdomain")
        .ok_or("group tops missing")?
        .entries
        .iter()
        .map(|e| (e.group_value.clone(), e.top_reference.clone(), (e.share * records.len() as f64).round() as usize))
        .collect();
    let want = oracle_group_tops(records);
    ensure(got == want, || format!("group tops: got {got:?}, want {want:?}"))?;
    for e in &p.group_top("subdomain").unwrap().entries {
        let n = want.iter().find(|w| w.0 == e.group_value).unwrap().2;
        ensure(e.share == n as f64 / records.len() as f64, || "group share".into())?;
    }

    let want = oracle_self_citation_share(records);
    ensure(p.self_citation_share == want, || format!("self-citation share {:?} vs {want:?}", p.self_citation_share))?;

    check_importance(&q, records, "citation_count", &["venue_type", "domain", "subdomain"], 0.0)
}

/// Same checks on real-valued items, to within `1e-9`.
pub fn check_item_profile(items: &[Item]) -> Result<(), String> {
    let config = item_config();
    let q = build_profile(items, &config).map_err(|e| e.to_string())?;
    let prices = values_of(items, "price");
    match (oracle_range(&prices), oracle_median(&prices)) {
        (Some((lo, hi)), Some(m)) => {
            let s = q.dominating_shape.as_ref().ok_or("dominating shape missing")?;
            ensure(
                (s.min - lo).abs() <= 1e-9 && (s.max - hi).abs() <= 1e-9 && (s.median - m).abs() <= 1e-9,
                || format!("price shape {s:?} vs {lo} {hi} {m}"),
            )?;
        }
        _ => ensure(q.dominating_shape.is_none(), || "dominating shape should be absent".into())?,
    }
    for attr in ["colour", "size"] {
        check_distribution(&q, items, attr, &config.quantifiers)?;
    }
    check_importance(&q, items, "price", &["colour", "size"], 1e-9)
}

pub fn item_config() -> SummaryConfig {
    use refsum::config::{AttributeKind, AttributeSpec, Role};
    let mut config = SummaryConfig::prodset_default();
    config.dominating = Some("price".into());
    config.attributes = vec![
        AttributeSpec::new("colour", AttributeKind::Categorical, Role::Listed),
        AttributeSpec::new("size", AttributeKind::Categorical, Role::Listed),
    ];
    config
}

fn check_continuous(p: &SetProfile, records: &[ReferenceRecord], attr: &str) -> Result<(), String> {
    let vals = values_of(records, attr);
    match (oracle_range(&vals), oracle_median(&vals)) {
        (Some((lo, hi)), Some(m)) => {
            let s = p.continuous(attr).ok_or_else(|| format!("{attr} summary missing"))?;
            ensure((s.min, s.max, s.median, s.count) == (lo, hi, m, vals.len()), || format!("{attr}: {s:?}"))
        }
        _ => ensure(p.missing.iter().any(|m| m == attr), || format!("{attr} should be missing")),
    }
}

fn check_distribution<R: Record>(
    p: &SetProfile,
    records: &[R],
    attr: &str,
    t: &QuantifierThresholds,
) -> Result<(), String> {
    let d = p.distribution(attr).ok_or_else(|| format!("{attr} distribution missing"))?;
    let got: Vec<(String, usize)> = d.entries.iter().map(|e| (e.value.clone(), e.count)).collect();
    let want = oracle_distribution(records, attr);
    ensure(got == want, || format!("{attr}: got {got:?}, want {want:?}"))?;
    for e in &d.entries {
        let prop = e.count as f64 / records.len() as f64;
        ensure(e.proportion == prop, || format!("{attr} proportion"))?;
        ensure(e.bucket == oracle_bucket(prop, t), || format!("{attr} bucket for {prop}"))?;
    }
    Ok(())
}

fn check_importance<R: Record>(
    q: &SetProfile,
    records: &[R],
    dominating: &str,
    attrs: &[&str],
    tolerance: f64,
) -> Result<(), String> {
    match &q.importance {
        None => ensure(oracle_importance(records, dominating, attrs[0]).is_none(), || "importance missing".into()),
        Some(imp) => {
            for attr in attrs {
                let want = oracle_importance(records, dominating, attr).unwrap();
                let got = imp.ranking.iter().find(|s| s.attribute == *attr).ok_or("importance entry missing")?.score;
                ensure((got - want).abs() <= tolerance, || format!("importance {attr}: {got} vs {want}"))?;
            }
            let sorted = imp.ranking.windows(2).all(|w| w[0].score >= w[1].score);
            ensure(sorted, || "importance not sorted".into())
        }
    }
}

// ---- fixtures and invariance checks ----

/// References from a JSON-lines fixture with self-citations derived.
pub fn load_refs(name: &str) -> Vec<ReferenceRecord> {
    let mut paper = refsum::ingest::parse_record_lines(&read_fixture(name)).unwrap();
    paper.derive_self_citations();
    paper.references
}

pub fn load_items(name: &str) -> Vec<Item> {
    read_fixture(name)
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Item::from_json(&serde_json::from_str(l).unwrap()).unwrap())
        .collect()
}

/// `n` deterministic permutations of `items`.
pub fn shuffles<T: Clone + std::fmt::Debug + 'static>(items: &[T], n: usize) -> Vec<Vec<T>> {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;
    let mut runner = TestRunner::deterministic();
    let strategy = Just(items.to_vec()).prop_shuffle();
    (0..n).map(|_| strategy.new_tree(&mut runner).unwrap().current()).collect()
}

/// Buckets never decrease as the proportion grows, on a 0.001 grid.
pub fn check_quantifier_monotonicity() -> Result<(), String> {
    use refsum::profile::quantifier_for;
    ensure(quantifier_for(0.0).is_err(), || "0 should be rejected".into())?;
    let t = QuantifierThresholds::default();
    let mut previous = Quantifier::Some;
    for i in 1..=1000 {
        let p = i as f64 / 1000.0;
        let q = quantifier_for(p).map_err(|e| e.to_string())?;
        ensure(q >= previous, || format!("bucket dropped at {p}"))?;
        ensure(q == oracle_bucket(p, &t), || format!("bucket at {p}"))?;
        previous = q;
    }
    Ok(())
}

fn full_text<R: Record>(records: &[R], config: &SummaryConfig) -> Result<String, String> {
    let profile = build_profile(records, config).map_err(|e| e.to_string())?;
    let plan = refsum::plan::build_plan(&profile, config).map_err(|e| e.to_string())?;
    let summary = refsum::realize::realize(
        &plan,
        &refsum::realize::TemplatePack::builtin(),
        &refsum::realize::RealizeOptions::from(config),
    )
    .map_err(|e| e.to_string())?;
    Ok(format!("{}\n{}\n{}", profile.to_text(), plan.to_text(), summary.full_text))
}

/// Profile, plan and text are unchanged by `n` reorderings of the fixture.
pub fn check_permutation_invariance(records: &[ReferenceRecord], n: usize) -> Result<(), String> {
    let configs = [SummaryConfig::refset_default(), SummaryConfig::prodset_default()];
    let baseline: Vec<String> = configs.iter().map(|c| full_text(records, c)).collect::<Result<_, _>>()?;
    for (i, shuffled) in shuffles(records, n).iter().enumerate() {
        for (config, want) in configs.iter().zip(&baseline) {
            let got = full_text(shuffled, config)?;
            ensure(&got == want, || format!("shuffle {i} changed the {} output", config.algorithm))?;
        }
    }
    Ok(())
}

/// Everything ordinal a profile says about the dominating column.
fn ordinal_view(p: &SetProfile) -> String {
    let mut out = String::new();
    if let Some(imp) = &p.importance {
        let order: Vec<&str> = imp.ranking.iter().map(|s| s.attribute.as_str()).collect();
        out.push_str(&format!("importance {order:?}\n"));
    }
    for c in &p.comparisons {
        out.push_str(&format!("cmp {} {} {} {}\n", c.attribute, c.feature_value, c.direction, c.magnitude));
    }
    for g in &p.group_tops {
        for e in &g.entries {
            out.push_str(&format!("group {} {} {}\n", g.group_attribute, e.group_value, e.top_reference));
        }
    }
    let authors: Vec<&str> = p.top_authors.iter().map(|a| a.author.normalized_key.as_str()).collect();
    out.push_str(&format!("authors {authors:?}\n"));
    out
}

fn reference_ordinals(records: &[ReferenceRecord]) -> Result<String, String> {
    let a = build_profile(records, &SummaryConfig::refset_default()).map_err(|e| e.to_string())?;
    let b = build_profile(records, &SummaryConfig::prodset_default()).map_err(|e| e.to_string())?;
    Ok(format!("{}{}", ordinal_view(&a), ordinal_view(&b)))
}

/// Scaling citation counts (doubled first so 0.5 stays integral) or item
/// prices by each `c` leaves every ordinal output unchanged.
pub fn check_scaling_invariance(
    records: &[ReferenceRecord],
    items: &[Item],
    config: &SummaryConfig,
    factors: &[f64],
) -> Result<(), String> {
    let base: Vec<ReferenceRecord> = records
        .iter()
        .cloned()
        .map(|mut r| {
            r.citation_count = r.citation_count.map(|c| c * 2);
            r
        })
        .collect();
    let want = reference_ordinals(&base)?;
    let want_items = ordinal_view(&build_profile(items, config).map_err(|e| e.to_string())?);
    for &c in factors {
        let scaled: Vec<ReferenceRecord> = base
            .iter()
            .cloned()
            .map(|mut r| {
                r.citation_count = r.citation_count.map(|n| {
                    let v = n as f64 * c;
                    assert_eq!(v.fract(), 0.0);
                    v as u64
                });
                r
            })
            .collect();
        ensure(reference_ordinals(&scaled)? == want, || format!("references changed under scaling by {c}"))?;
        let scaled_items: Vec<Item> = items
            .iter()
            .cloned()
            .map(|mut it| {
                if let Some(p) = it.numbers.get_mut("price") {
                    *p *= c;
                }
                it
            })
            .collect();
        let got = ordinal_view(&build_profile(&scaled_items, config).map_err(|e| e.to_string())?);
        ensure(got == want_items, || format!("items changed under scaling by {c}"))?;
    }
    Ok(())
}

pub fn tv_config() -> SummaryConfig {
    refsum::config::ConfigFile::load(&fixture("tv.toml")).unwrap().apply(refsum::Algorithm::Prodset)
}
