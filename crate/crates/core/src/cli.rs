//! The `refsum` command line.
//!
//! Exit codes: 0 success, 1 input or parse error, 2 configuration error,
//! 3 planning or realisation error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::config::{Algorithm, ConfigFile, SummaryConfig};
use crate::ingest::enrich::{DEFAULT_CONCURRENCY, DEFAULT_ENDPOINT};
use crate::ingest::{
    default_taxonomy, enrich_citation_counts, import_bibtex, parse_author_list, parse_record_lines, Cache,
    CitationProvider, CitingPaper, HttpProvider, ReferenceRecord, StaticProvider, VenueTaxonomy,
};
use crate::plan::build_plan;
use crate::profile::build_profile;
use crate::realize::{realize, RealizeOptions, TemplatePack};
use crate::record::{Item, Record};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_PLAN: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "refsum", version, about = "Natural-language overviews of reference lists")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Summarise one input set with one algorithm.
    Summarize {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        provider: ProviderArgs,
        #[command(flatten)]
        render: RenderArgs,
        /// Summary algorithm; defaults to the config file's, then refset.
        #[arg(long, value_enum)]
        algo: Option<AlgoArg>,
    },
    /// Summarise one input set with two algorithms, labelled.
    Compare {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        provider: ProviderArgs,
        #[command(flatten)]
        render: RenderArgs,
        #[arg(long, value_enum, default_value = "refset")]
        first: AlgoArg,
        #[arg(long, value_enum, default_value = "prodset")]
        second: AlgoArg,
    },
    /// Fill the citation-count cache without summarising.
    Enrich {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        provider: ProviderArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Refset,
    Prodset,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Refset => Algorithm::Refset,
            AlgoArg::Prodset => Algorithm::Prodset,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProviderMode {
    Mock,
    Http,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Summary,
    Plan,
    Profile,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// BibTeX (.bib) or line-delimited JSON (.jsonl, .ndjson) files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Read JSON lines as generic items instead of references.
    #[arg(long)]
    pub items: bool,
    /// Venue taxonomy file (tab-separated).
    #[arg(long)]
    pub taxonomy: Option<PathBuf>,
    /// Author of the citing paper, for self-citation detection. Repeatable.
    #[arg(long = "citing-author")]
    pub citing_authors: Vec<String>,
    /// Report malformed entries as warnings instead of failing.
    #[arg(long)]
    pub skip_invalid: bool,
}

#[derive(Debug, Args)]
pub struct ProviderArgs {
    #[arg(long, value_enum, default_value = "off")]
    pub provider: ProviderMode,
    /// Tab-separated `title<TAB>count` file for the mock provider.
    #[arg(long)]
    pub mock_file: Option<PathBuf>,
    #[arg(long, default_value = DEFAULT_ENDPOINT)]
    pub endpoint: String,
    /// Directory holding the citation-count cache.
    #[arg(long, env = "REFSUM_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_CONCURRENCY)]
    pub concurrency: usize,
    /// HTTP timeout in seconds.
    #[arg(long, default_value_t = 10)]
    pub timeout: u64,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Template pack file.
    #[arg(long)]
    pub templates: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "summary")]
    pub emit: Emit,
    #[arg(long)]
    pub markdown: bool,
    /// Number of authors listed.
    #[arg(long)]
    pub k: Option<usize>,
    /// Symbol written before dominating values.
    #[arg(long)]
    pub unit: Option<String>,
    /// Plural noun for the records.
    #[arg(long)]
    pub noun: Option<String>,
    /// Dominating numeric attribute.
    #[arg(long)]
    pub dominating: Option<String>,
    /// Lowest proportion worded as "most".
    #[arg(long)]
    pub most_threshold: Option<f64>,
    /// Lowest proportion worded as "a large proportion".
    #[arg(long)]
    pub large_threshold: Option<f64>,
    /// Relative difference below which medians count as the same.
    #[arg(long)]
    pub same_band: Option<f64>,
    /// Relative difference up to which medians differ "slightly".
    #[arg(long)]
    pub slight_band: Option<f64>,
    /// Leave citation counts out of the text.
    #[arg(long)]
    pub no_counts: bool,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }

    fn config(message: impl Into<String>) -> Self {
        Failure { code: EXIT_CONFIG, message: message.into() }
    }

    fn plan(message: impl Into<String>) -> Self {
        Failure { code: EXIT_PLAN, message: message.into() }
    }
}

/// Collects warnings and prints them grouped by message.
#[derive(Default)]
struct Warnings {
    by_message: BTreeMap<String, Vec<String>>,
}

impl Warnings {
    fn add(&mut self, key: &str, message: &str) {
        self.by_message.entry(message.to_string()).or_default().push(key.to_string());
    }

    fn flush(&self, err: &mut dyn Write) {
        for (message, keys) in &self.by_message {
            let shown: Vec<&str> = keys.iter().take(5).map(String::as_str).collect();
            let more = if keys.len() > shown.len() { format!(", +{} more", keys.len() - shown.len()) } else { String::new() };
            let _ = writeln!(err, "warning: {message} ({}: {}{more})", keys.len(), shown.join(", "));
        }
    }
}

enum Loaded {
    References(Vec<ReferenceRecord>),
    Items(Vec<Item>),
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let mut warnings = Warnings::default();
    let result = execute(cli, out, err, &mut warnings);
    warnings.flush(err);
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write, warnings: &mut Warnings) -> Result<(), Failure> {
    match cli.command {
        Command::Summarize { input, provider, render, algo } => {
            let file = load_config_file(render.config.as_deref())?;
            let algorithm = algo.map(Algorithm::from).or(file.algorithm).unwrap_or_default();
            let config = build_config(&file, algorithm, &render)?;
            let pack = load_pack(&render, &config)?;
            let records = load_records(&input, &file, &provider, err, warnings)?;
            let text = emit(&records, &config, &pack, render.emit)?;
            write_out(out, &text)
        }
        Command::Compare { input, provider, render, first, second } => {
            let file = load_config_file(render.config.as_deref())?;
            let records = load_records(&input, &file, &provider, err, warnings)?;
            let mut sections = Vec::new();
            for algo in [first, second] {
                let config = build_config(&file, algo.into(), &render)?;
                let pack = load_pack(&render, &config)?;
                let body = emit(&records, &config, &pack, render.emit)?;
                let label = config.algorithm.label();
                let heading = if render.markdown { format!("## {label}") } else { label.to_string() };
                sections.push(format!("{heading}\n\n{}", body.trim_end()));
            }
            write_out(out, &sections.join("\n\n"))
        }
        Command::Enrich { input, provider } => {
            let file = ConfigFile::default();
            match load_records(&input, &file, &provider, err, warnings)? {
                Loaded::References(records) => {
                    let counted = records.iter().filter(|r| r.citation_count.is_some()).count();
                    write_out(out, &format!("{counted} of {} references have citation counts", records.len()))
                }
                Loaded::Items(_) => Err(Failure::config("enrich works on references, not items")),
            }
        }
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    let text = text.trim_end();
    writeln!(out, "{text}").map_err(|e| Failure::input(format!("cannot write output: {e}")))
}

fn load_config_file(path: Option<&Path>) -> Result<ConfigFile, Failure> {
    match path {
        Some(p) => ConfigFile::load(p).map_err(|e| Failure::config(e.to_string())),
        None => Ok(ConfigFile::default()),
    }
}

fn build_config(file: &ConfigFile, algorithm: Algorithm, render: &RenderArgs) -> Result<SummaryConfig, Failure> {
    let mut config = file.apply(algorithm);
    if let Some(k) = render.k {
        config.author_k = k;
    }
    if let Some(u) = &render.unit {
        config.wording.unit = u.clone();
    }
    if let Some(n) = &render.noun {
        config.wording.noun = n.clone();
    }
    if let Some(d) = &render.dominating {
        config.dominating = Some(d.clone());
    }
    if let Some(v) = render.most_threshold {
        config.quantifiers.most = v;
    }
    if let Some(v) = render.large_threshold {
        config.quantifiers.large = v;
    }
    if let Some(v) = render.same_band {
        config.comparison.same = v;
    }
    if let Some(v) = render.slight_band {
        config.comparison.slight = v;
    }
    if render.no_counts {
        config.show_counts = false;
    }
    if let Some(t) = &render.templates {
        config.template_pack = Some(t.clone());
    }
    config.validate().map_err(|e| Failure::config(e.to_string()))?;
    Ok(config)
}

fn load_pack(render: &RenderArgs, config: &SummaryConfig) -> Result<TemplatePack, Failure> {
    match render.templates.as_ref().or(config.template_pack.as_ref()) {
        Some(path) => TemplatePack::load(path).map_err(|e| Failure::config(e.to_string())),
        None => Ok(TemplatePack::builtin()),
    }
}

fn load_taxonomy(input: &InputArgs, file: &ConfigFile) -> Result<VenueTaxonomy, Failure> {
    match input.taxonomy.as_ref().or(file.taxonomy.as_ref()) {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::config(format!("cannot read taxonomy {}: {e}", path.display())))?;
            VenueTaxonomy::parse(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))
        }
        None => Ok(default_taxonomy()),
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn is_bibtex(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("bib"))
}

fn load_records(
    input: &InputArgs,
    file: &ConfigFile,
    provider_args: &ProviderArgs,
    err: &mut dyn Write,
    warnings: &mut Warnings,
) -> Result<Loaded, Failure> {
    if input.items {
        return load_items(input).map(Loaded::Items);
    }
    let taxonomy = load_taxonomy(input, file)?;
    let mut records = Vec::new();
    let mut citing_authors = Vec::new();
    for path in &input.inputs {
        let text = read_input(path)?;
        if is_bibtex(path) {
            let import = import_bibtex(&text, &taxonomy);
            for e in &import.errors {
                if input.skip_invalid {
                    warnings.add(e.cite_key(), &format!("skipped malformed entry: {e}"));
                } else {
                    return Err(Failure::input(format!("{}: {e}", path.display())));
                }
            }
            for (key, message) in &import.warnings {
                warnings.add(key, message);
            }
            records.extend(import.records);
        } else {
            let paper = parse_record_lines(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            citing_authors.extend(paper.authors);
            records.extend(paper.references);
        }
    }
    for name in &input.citing_authors {
        let (names, rejected) = parse_author_list(name);
        citing_authors.extend(names);
        for r in rejected {
            warnings.add("--citing-author", &format!("unparsed author name `{r}`"));
        }
    }
    if records.is_empty() {
        return Err(Failure::input("no records in input"));
    }
    let mut paper = CitingPaper { title: String::new(), authors: citing_authors, references: records };
    paper.derive_self_citations();
    let records = enrich(paper.references, provider_args, err)?;
    Ok(Loaded::References(records))
}

fn load_items(input: &InputArgs) -> Result<Vec<Item>, Failure> {
    let mut items = Vec::new();
    for path in &input.inputs {
        let text = read_input(path)?;
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let value: Value = serde_json::from_str(line)
                .map_err(|e| Failure::input(format!("{}:{}: {e}", path.display(), n + 1)))?;
            let item = Item::from_json(&value).ok_or_else(|| {
                Failure::input(format!("{}:{}: expected an object with an `id`", path.display(), n + 1))
            })?;
            items.push(item);
        }
    }
    if items.is_empty() {
        return Err(Failure::input("no records in input"));
    }
    Ok(items)
}

fn enrich(records: Vec<ReferenceRecord>, args: &ProviderArgs, err: &mut dyn Write) -> Result<Vec<ReferenceRecord>, Failure> {
    let provider: Box<dyn CitationProvider> = match args.provider {
        ProviderMode::Off => return Ok(records),
        ProviderMode::Mock => {
            let path = args.mock_file.as_ref().ok_or_else(|| Failure::config("--provider mock needs --mock-file"))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
            Box::new(StaticProvider::parse(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?)
        }
        ProviderMode::Http => Box::new(HttpProvider::new(args.endpoint.clone(), Duration::from_secs(args.timeout))),
    };
    let cache = match &args.cache_dir {
        Some(dir) => Cache::open(dir).map_err(|e| Failure::config(format!("cannot open cache {}: {e}", dir.display())))?,
        None => Cache::in_memory(),
    };
    let (records, report) = enrich_citation_counts(records, provider.as_ref(), &cache, args.concurrency);
    let _ = writeln!(err, "{report}");
    for f in &report.failures {
        let _ = writeln!(err, "warning: lookup failed for {}: {}", f.id, f.message);
    }
    Ok(records)
}

fn emit(records: &Loaded, config: &SummaryConfig, pack: &TemplatePack, mode: Emit) -> Result<String, Failure> {
    match records {
        Loaded::References(r) => emit_for(r, config, pack, mode),
        Loaded::Items(r) => emit_for(r, config, pack, mode),
    }
}

fn emit_for<R: Record>(records: &[R], config: &SummaryConfig, pack: &TemplatePack, mode: Emit) -> Result<String, Failure> {
    let profile = build_profile(records, config).map_err(|e| Failure::plan(e.to_string()))?;
    if mode == Emit::Profile {
        return Ok(profile.to_text());
    }
    let plan = build_plan(&profile, config).map_err(|e| Failure::plan(e.to_string()))?;
    if mode == Emit::Plan {
        return Ok(plan.to_text());
    }
    let summary = realize(&plan, pack, &RealizeOptions::from(config)).map_err(|e| Failure::plan(e.to_string()))?;
    Ok(summary.full_text)
}
