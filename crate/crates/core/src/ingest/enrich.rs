//! Citation-count enrichment.
//!
//! Counts come from a [`CitationProvider`] and are memoised in a [`Cache`].
//! The cache file holds one record per line,
//! `key <TAB> count <TAB> unix-seconds`, where the key hashes the normalised
//! title, first-author family name and year, and `count` is `-` for a cached
//! not-found answer. The file is append-only; a later line for the same key
//! supersedes earlier ones.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{mpsc, Mutex};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};
use thiserror::Error;

use super::ReferenceRecord;

pub const CACHE_FILE: &str = "citations.tsv";
pub const DEFAULT_CONCURRENCY: usize = 4;

/// What a provider is asked to resolve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CitationQuery {
    pub title: String,
    pub family: Option<String>,
    pub year: Option<i32>,
}

impl CitationQuery {
    pub fn for_record(record: &ReferenceRecord) -> CitationQuery {
        CitationQuery {
            title: record.title.clone(),
            family: record.authors.first().map(|a| a.family.clone()),
            year: record.year,
        }
    }

    pub fn cache_key(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(normalize_title(&self.title).as_bytes());
        hasher.update([0x1f]);
        hasher.update(self.family.as_deref().unwrap_or("").to_lowercase().as_bytes());
        hasher.update([0x1f]);
        hasher.update(self.year.map(|y| y.to_string()).unwrap_or_default().as_bytes());
        hasher.finalize()[..16].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Lowercased alphanumeric words joined by single spaces.
pub fn normalize_title(title: &str) -> String {
    title
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProviderError {
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("malformed response: {0}")]
    Malformed(String),
}

pub trait CitationProvider: Send + Sync {
    /// `Ok(None)` means the provider does not know the work.
    fn lookup(&self, query: &CitationQuery) -> Result<Option<u64>, ProviderError>;

    /// Whether a not-found answer is worth remembering.
    fn caches_misses(&self) -> bool {
        true
    }
}

/// Offline mode: knows nothing, remembers nothing.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullProvider;

impl CitationProvider for NullProvider {
    fn lookup(&self, _query: &CitationQuery) -> Result<Option<u64>, ProviderError> {
        Ok(None)
    }

    fn caches_misses(&self) -> bool {
        false
    }
}

/// Fixed title → count table, loaded from `title <TAB> count` lines.
#[derive(Debug, Default, Clone)]
pub struct StaticProvider {
    counts: HashMap<String, u64>,
}

impl StaticProvider {
    pub fn new<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: AsRef<str>,
    {
        StaticProvider {
            counts: pairs.into_iter().map(|(t, c)| (normalize_title(t.as_ref()), c)).collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut pairs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (title, count) = line
                .rsplit_once('\t')
                .ok_or_else(|| format!("line {}: expected `title<TAB>count`", n + 1))?;
            let count = count
                .trim()
                .parse::<u64>()
                .map_err(|e| format!("line {}: {e}", n + 1))?;
            pairs.push((title.to_string(), count));
        }
        Ok(StaticProvider::new(pairs))
    }
}

impl CitationProvider for StaticProvider {
    fn lookup(&self, query: &CitationQuery) -> Result<Option<u64>, ProviderError> {
        Ok(self.counts.get(&normalize_title(&query.title)).copied())
    }
}

/// Client for a Semantic-Scholar-compatible title match endpoint:
/// `GET {base}/paper/search/match?query=<title>&fields=title,year,citationCount`.
pub struct HttpProvider {
    base_url: String,
    agent: ureq::Agent,
}

pub const DEFAULT_ENDPOINT: &str = "https://api.semanticscholar.org/graph/v1";

impl HttpProvider {
    pub fn new(base_url: impl Into<String>, timeout: Duration) -> Self {
        HttpProvider {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            agent: ureq::AgentBuilder::new().timeout(timeout).build(),
        }
    }
}

impl CitationProvider for HttpProvider {
    fn lookup(&self, query: &CitationQuery) -> Result<Option<u64>, ProviderError> {
        let url = format!("{}/paper/search/match", self.base_url);
        let response = self
            .agent
            .get(&url)
            .query("query", &query.title)
            .query("fields", "title,year,citationCount")
            .call();
        let body: serde_json::Value = match response {
            Ok(r) => {
                let text = r.into_string().map_err(|e| ProviderError::Transport(e.to_string()))?;
                serde_json::from_str(&text).map_err(|e| ProviderError::Malformed(e.to_string()))?
            }
            Err(ureq::Error::Status(404, _)) => return Ok(None),
            Err(e) => return Err(ProviderError::Transport(e.to_string())),
        };
        let Some(best) = body.get("data").and_then(|d| d.get(0)) else {
            return Ok(None);
        };
        // a match from a different year is treated as a different work
        if let (Some(want), Some(got)) = (query.year, best.get("year").and_then(|y| y.as_i64())) {
            if i64::from(want) != got {
                return Ok(None);
            }
        }
        match best.get("citationCount") {
            Some(v) => v
                .as_u64()
                .map(Some)
                .ok_or_else(|| ProviderError::Malformed(format!("citationCount `{v}`"))),
            None => Ok(None),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CacheEntry {
    pub count: Option<u64>,
    pub fetched_at: u64,
}

/// In-memory view of the cache file; writes are serialised.
pub struct Cache {
    entries: Mutex<HashMap<String, CacheEntry>>,
    file: Option<Mutex<File>>,
    path: Option<PathBuf>,
}

impl Cache {
    pub fn in_memory() -> Cache {
        Cache { entries: Mutex::new(HashMap::new()), file: None, path: None }
    }

    /// Opens (creating if needed) `dir/citations.tsv`. Unreadable lines are
    /// skipped.
    pub fn open(dir: &Path) -> io::Result<Cache> {
        fs::create_dir_all(dir)?;
        let path = dir.join(CACHE_FILE);
        let mut entries = HashMap::new();
        if path.exists() {
            for line in fs::read_to_string(&path)?.lines() {
                if let Some((key, entry)) = parse_cache_line(line) {
                    entries.insert(key, entry);
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Cache { entries: Mutex::new(entries), file: Some(Mutex::new(file)), path: Some(path) })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, key: &str) -> Option<CacheEntry> {
        self.entries.lock().unwrap().get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn put(&self, key: &str, count: Option<u64>) -> io::Result<()> {
        let fetched_at = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let entry = CacheEntry { count, fetched_at };
        if let Some(file) = &self.file {
            let count = count.map_or_else(|| "-".to_string(), |c| c.to_string());
            let mut file = file.lock().unwrap();
            writeln!(file, "{key}\t{count}\t{fetched_at}")?;
        }
        self.entries.lock().unwrap().insert(key.to_string(), entry);
        Ok(())
    }
}

fn parse_cache_line(line: &str) -> Option<(String, CacheEntry)> {
    let mut cols = line.split('\t');
    let key = cols.next()?.trim();
    let count = match cols.next()?.trim() {
        "-" => None,
        c => Some(c.parse().ok()?),
    };
    let fetched_at = cols.next()?.trim().parse().ok()?;
    if key.is_empty() {
        return None;
    }
    Some((key.to_string(), CacheEntry { count, fetched_at }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnrichFailure {
    pub id: String,
    pub message: String,
}

/// Hit/miss tally of one enrichment pass.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EnrichReport {
    /// Records that already carried a count and were left alone.
    pub preset: usize,
    pub cache_hits: usize,
    pub fetched: usize,
    pub not_found: usize,
    pub failures: Vec<EnrichFailure>,
}

impl std::fmt::Display for EnrichReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "enrichment: {} preset, {} cache hits, {} fetched, {} not found, {} failed",
            self.preset,
            self.cache_hits,
            self.fetched,
            self.not_found,
            self.failures.len()
        )
    }
}

enum Outcome {
    Preset,
    CacheHit(Option<u64>),
    Fetched(Option<u64>),
    Failed(String),
}

/// Fills absent citation counts from `cache`, falling back to `provider`.
///
/// Up to `concurrency` lookups run at once. Output order always matches
/// input order. Provider failures leave the count absent and are listed in
/// the report; they never abort the pass.
pub fn enrich_citation_counts(
    mut records: Vec<ReferenceRecord>,
    provider: &dyn CitationProvider,
    cache: &Cache,
    concurrency: usize,
) -> (Vec<ReferenceRecord>, EnrichReport) {
    let outcomes = lookup_all(&records, provider, cache, concurrency.max(1));
    let mut report = EnrichReport::default();
    for (record, outcome) in records.iter_mut().zip(outcomes) {
        match outcome {
            Outcome::Preset => report.preset += 1,
            Outcome::CacheHit(count) => {
                report.cache_hits += 1;
                if count.is_none() {
                    report.not_found += 1;
                }
                record.citation_count = count;
            }
            Outcome::Fetched(count) => {
                if count.is_some() {
                    report.fetched += 1;
                } else {
                    report.not_found += 1;
                }
                record.citation_count = count;
            }
            Outcome::Failed(message) => report.failures.push(EnrichFailure { id: record.id.clone(), message }),
        }
    }
    (records, report)
}

fn lookup_one(record: &ReferenceRecord, provider: &dyn CitationProvider, cache: &Cache) -> Outcome {
    if record.citation_count.is_some() {
        return Outcome::Preset;
    }
    let query = CitationQuery::for_record(record);
    let key = query.cache_key();
    if let Some(hit) = cache.get(&key) {
        return Outcome::CacheHit(hit.count);
    }
    if query.title.trim().is_empty() {
        return Outcome::Fetched(None);
    }
    match provider.lookup(&query) {
        Ok(count) => {
            if count.is_some() || provider.caches_misses() {
                if let Err(e) = cache.put(&key, count) {
                    return Outcome::Failed(format!("cache write: {e}"));
                }
            }
            Outcome::Fetched(count)
        }
        Err(e) => Outcome::Failed(e.to_string()),
    }
}

fn lookup_all(
    records: &[ReferenceRecord],
    provider: &dyn CitationProvider,
    cache: &Cache,
    concurrency: usize,
) -> Vec<Outcome> {
    if concurrency == 1 || records.len() < 2 {
        return records.iter().map(|r| lookup_one(r, provider, cache)).collect();
    }
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();
    std::thread::scope(|scope| {
        for _ in 0..concurrency.min(records.len()) {
            let tx = tx.clone();
            let next = &next;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(record) = records.get(i) else { break };
                if tx.send((i, lookup_one(record, provider, cache))).is_err() {
                    break;
                }
            });
        }
    });
    drop(tx);
    let mut slots: Vec<Option<Outcome>> = (0..records.len()).map(|_| None).collect();
    for (i, outcome) in rx {
        slots[i] = Some(outcome);
    }
    slots.into_iter().map(|o| o.expect("every index is looked up")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::AtomicUsize;

    fn rec(id: &str, title: &str) -> ReferenceRecord {
        let mut r = ReferenceRecord::new(id);
        r.title = title.to_string();
        r
    }

    struct Counting<P> {
        inner: P,
        calls: AtomicUsize,
    }

    impl<P: CitationProvider> CitationProvider for Counting<P> {
        fn lookup(&self, q: &CitationQuery) -> Result<Option<u64>, ProviderError> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            self.inner.lookup(q)
        }
    }

    struct Failing;

    impl CitationProvider for Failing {
        fn lookup(&self, q: &CitationQuery) -> Result<Option<u64>, ProviderError> {
            if q.title.contains("bad") {
                Err(ProviderError::Transport("connection reset".into()))
            } else {
                Ok(Some(1))
            }
        }
    }

    #[test]
    fn cache_hit_skips_provider() {
        let cache = Cache::in_memory();
        let r = rec("a", "Cached Work");
        cache.put(&CitationQuery::for_record(&r).cache_key(), Some(120)).unwrap();
        let provider = Counting { inner: StaticProvider::new([("Cached Work", 5)]), calls: AtomicUsize::new(0) };
        let (out, report) = enrich_citation_counts(vec![r], &provider, &cache, 4);
        assert_eq!(out[0].citation_count, Some(120));
        assert_eq!(provider.calls.load(Ordering::SeqCst), 0);
        assert_eq!(report.cache_hits, 1);
    }

    #[test]
    fn not_found_stays_absent() {
        let cache = Cache::in_memory();
        let (out, report) = enrich_citation_counts(vec![rec("a", "Unknown")], &StaticProvider::default(), &cache, 1);
        assert_eq!(out[0].citation_count, None);
        assert_eq!(report.not_found, 1);
    }

    #[test]
    fn mock_round_trip_fills_cache() {
        let cache = Cache::in_memory();
        let r = rec("a", "T");
        let key = CitationQuery::for_record(&r).cache_key();
        let (out, report) = enrich_citation_counts(vec![r], &StaticProvider::new([("T", 17)]), &cache, 2);
        assert_eq!(out[0].citation_count, Some(17));
        assert_eq!(cache.get(&key).unwrap().count, Some(17));
        assert_eq!(report.fetched, 1);
    }

    #[test]
    fn failures_are_soft_and_ordered() {
        let records: Vec<_> = (0..12)
            .map(|i| rec(&format!("r{i}"), if i % 5 == 0 { "bad one" } else { "good" }))
            .map(|mut r| {
                r.year = Some(2000 + r.id[1..].parse::<i32>().unwrap());
                r
            })
            .collect();
        let ids: Vec<_> = records.iter().map(|r| r.id.clone()).collect();
        let (out, report) = enrich_citation_counts(records, &Failing, &Cache::in_memory(), 4);
        assert_eq!(out.iter().map(|r| r.id.clone()).collect::<Vec<_>>(), ids);
        let failed: Vec<_> = report.failures.iter().map(|f| f.id.as_str()).collect();
        assert_eq!(failed, ["r0", "r5", "r10"]);
        assert!(out[0].citation_count.is_none());
        assert_eq!(out[1].citation_count, Some(1));
    }

    #[test]
    fn null_provider_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        let (out, _) = enrich_citation_counts(vec![rec("a", "T")], &NullProvider, &cache, 4);
        assert!(out[0].citation_count.is_none());
        assert_eq!(fs::read_to_string(dir.path().join(CACHE_FILE)).unwrap(), "");
    }

    #[test]
    fn cache_file_persists_and_is_idempotent() {
        let dir = tempfile::tempdir().unwrap();
        let provider = StaticProvider::new([("Alpha", 3)]);
        let records = vec![rec("a", "Alpha"), rec("b", "Beta")];
        let first = {
            let cache = Cache::open(dir.path()).unwrap();
            enrich_citation_counts(records.clone(), &provider, &cache, 2).0
        };
        let before = fs::read_to_string(dir.path().join(CACHE_FILE)).unwrap();
        assert_eq!(before.lines().count(), 2);
        let cache = Cache::open(dir.path()).unwrap();
        assert_eq!(cache.len(), 2);
        let (second, report) = enrich_citation_counts(first.clone(), &provider, &cache, 2);
        assert_eq!(first, second);
        assert_eq!(report.cache_hits + report.preset, 2);
        assert_eq!(fs::read_to_string(dir.path().join(CACHE_FILE)).unwrap(), before);
    }

    #[test]
    fn cache_key_normalises_title() {
        let a = CitationQuery { title: "Deep  Learning!".into(), family: Some("LeCun".into()), year: Some(2015) };
        let b = CitationQuery { title: "deep learning".into(), family: Some("lecun".into()), year: Some(2015) };
        assert_eq!(a.cache_key(), b.cache_key());
        let c = CitationQuery { year: Some(2016), ..b };
        assert_ne!(a.cache_key(), c.cache_key());
    }
}
