//! A small BibTeX reader.
//!
//! Covers the subset of the format found in real-world reference lists:
//! `@kind{key, field = value, ...}` entries (braces or parentheses as
//! delimiters), brace- and quote-delimited values with nested braces, bare
//! numbers, `@string` macros with `#` concatenation, and skipped `@comment`
//! and `@preamble` blocks. Text between entries is ignored, as BibTeX does.
//!
//! Field values are stored with internal whitespace collapsed to single
//! spaces and the outer delimiters removed. Inner braces are kept verbatim so
//! that [`to_bibtex`] can write an entry back out unchanged.

use std::collections::HashMap;
use std::fmt::Write as _;

use indexmap::IndexMap;
use thiserror::Error;

/// One `@kind{key, ...}` block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEntry {
    /// Lowercased entry type, e.g. `article`.
    pub entry_kind: String,
    pub cite_key: String,
    /// Lowercased field name to value, in source order.
    pub fields: IndexMap<String, String>,
}

impl RawEntry {
    pub fn field(&self, name: &str) -> Option<&str> {
        self.fields.get(name).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BibError {
    #[error("unbalanced braces at byte {offset} in entry `{cite_key}`")]
    Unbalanced { offset: usize, cite_key: String },
    #[error("syntax error at byte {offset} in entry `{cite_key}`: {message}")]
    Syntax {
        offset: usize,
        cite_key: String,
        message: String,
    },
    #[error("duplicate cite key `{cite_key}` at bytes {first} and {second}")]
    DuplicateKey {
        cite_key: String,
        first: usize,
        second: usize,
    },
}

impl BibError {
    pub fn cite_key(&self) -> &str {
        match self {
            BibError::Unbalanced { cite_key, .. }
            | BibError::Syntax { cite_key, .. }
            | BibError::DuplicateKey { cite_key, .. } => cite_key,
        }
    }
}

/// Non-fatal observations made while parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BibWarning {
    pub offset: usize,
    pub cite_key: String,
    pub message: String,
}

impl std::fmt::Display for BibWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (entry `{}`, byte {})", self.message, self.cite_key, self.offset)
    }
}

/// Result of a recovering parse: every well-formed entry plus every error.
#[derive(Debug, Clone, Default)]
pub struct ParseOutcome {
    pub entries: Vec<RawEntry>,
    pub errors: Vec<BibError>,
    pub warnings: Vec<BibWarning>,
}

/// Parses `text`, failing on the first malformed entry.
pub fn parse_bibtex(text: &str) -> Result<Vec<RawEntry>, BibError> {
    let outcome = parse_bibtex_lenient(text);
    match outcome.errors.into_iter().next() {
        Some(err) => Err(err),
        None => Ok(outcome.entries),
    }
}

/// Parses `text`, skipping malformed entries and collecting their errors.
///
/// After an error the reader resynchronises at the next `@` that starts a
/// line, so one broken entry does not hide the ones after it.
pub fn parse_bibtex_lenient(text: &str) -> ParseOutcome {
    let mut parser = Parser::new(text);
    let mut outcome = ParseOutcome::default();
    let mut seen: HashMap<String, usize> = HashMap::new();

    while let Some(at) = parser.next_at() {
        match parser.block(at) {
            Ok(Block::Entry(entry)) => {
                let key = entry.cite_key.clone();
                if let Some(&first) = seen.get(&key) {
                    outcome.errors.push(BibError::DuplicateKey {
                        cite_key: key,
                        first,
                        second: at,
                    });
                } else {
                    seen.insert(key, at);
                    outcome.entries.push(entry);
                }
            }
            Ok(Block::Skipped) => {}
            Err(err) => {
                outcome.errors.push(err);
                parser.resync();
            }
        }
    }
    outcome.warnings = parser.warnings;
    outcome
}

/// Writes entries back out as BibTeX, every value brace-delimited.
pub fn to_bibtex(entries: &[RawEntry]) -> String {
    let mut out = String::new();
    for (i, entry) in entries.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "@{}{{{},", entry.entry_kind, entry.cite_key);
        for (name, value) in &entry.fields {
            let _ = writeln!(out, "  {name} = {{{value}}},");
        }
        out.push_str("}\n");
    }
    out
}

enum Block {
    Entry(RawEntry),
    Skipped,
}

const MONTHS: [(&str, &str); 12] = [
    ("jan", "January"),
    ("feb", "February"),
    ("mar", "March"),
    ("apr", "April"),
    ("may", "May"),
    ("jun", "June"),
    ("jul", "July"),
    ("aug", "August"),
    ("sep", "September"),
    ("oct", "October"),
    ("nov", "November"),
    ("dec", "December"),
];

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    macros: HashMap<String, String>,
    warnings: Vec<BibWarning>,
    // key of the entry being read, for error messages
    current_key: String,
}

fn is_ident_byte(b: u8) -> bool {
    !b.is_ascii_whitespace() && !matches!(b, b'{' | b'}' | b'(' | b')' | b',' | b'=' | b'"' | b'#' | b'@')
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        let macros = MONTHS
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        Parser {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            macros,
            warnings: Vec::new(),
            current_key: String::new(),
        }
    }

    fn next_at(&mut self) -> Option<usize> {
        let rel = self.src[self.pos..].find('@')?;
        self.pos += rel;
        Some(self.pos)
    }

    /// Moves to the next `@` at the start of a line (ignoring indentation).
    fn resync(&mut self) {
        let mut i = self.pos.max(1);
        while i < self.bytes.len() {
            if self.bytes[i] == b'@' {
                let line_start = self.src[..i].rfind('\n').map_or(0, |n| n + 1);
                if self.src[line_start..i].trim().is_empty() {
                    self.pos = i;
                    return;
                }
            }
            i += 1;
        }
        self.pos = self.bytes.len();
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn syntax(&self, message: impl Into<String>) -> BibError {
        BibError::Syntax {
            offset: self.pos,
            cite_key: self.current_key.clone(),
            message: message.into(),
        }
    }

    fn unbalanced(&self, offset: usize) -> BibError {
        BibError::Unbalanced {
            offset,
            cite_key: self.current_key.clone(),
        }
    }

    fn warn(&mut self, message: String) {
        self.warnings.push(BibWarning {
            offset: self.pos,
            cite_key: self.current_key.clone(),
            message,
        });
    }

    fn ident(&mut self) -> &'a str {
        let start = self.pos;
        while matches!(self.peek(), Some(b) if is_ident_byte(b)) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn expect(&mut self, byte: u8, what: &str) -> Result<(), BibError> {
        self.skip_ws();
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            let found = match self.peek() {
                Some(b) => format!("`{}`", b as char),
                None => "end of input".to_string(),
            };
            Err(self.syntax(format!("expected {what}, found {found}")))
        }
    }

    fn block(&mut self, at: usize) -> Result<Block, BibError> {
        self.pos = at + 1;
        self.current_key.clear();
        let kind = self.ident().to_ascii_lowercase();
        if kind.is_empty() {
            return Err(self.syntax("expected entry type after `@`"));
        }
        self.skip_ws();
        let close = match self.peek() {
            Some(b'{') => b'}',
            Some(b'(') => b')',
            _ => return Err(self.syntax("expected `{` or `(` after entry type")),
        };
        let open_at = self.pos;
        self.pos += 1;

        match kind.as_str() {
            "comment" | "preamble" => {
                self.skip_balanced(open_at, close)?;
                Ok(Block::Skipped)
            }
            "string" => {
                self.skip_ws();
                let name = self.ident().to_ascii_lowercase();
                if name.is_empty() {
                    return Err(self.syntax("expected macro name"));
                }
                self.expect(b'=', "`=`")?;
                let value = self.value()?;
                self.expect(close, "end of @string")?;
                self.macros.insert(name, value);
                Ok(Block::Skipped)
            }
            _ => self.entry(kind, close, open_at).map(Block::Entry),
        }
    }

    /// Skips to the delimiter matching the one at `open_at`.
    fn skip_balanced(&mut self, open_at: usize, close: u8) -> Result<(), BibError> {
        let open = self.bytes[open_at];
        let mut depth = 1usize;
        while let Some(b) = self.peek() {
            self.pos += 1;
            if b == open {
                depth += 1;
            } else if b == close {
                depth -= 1;
                if depth == 0 {
                    return Ok(());
                }
            }
        }
        Err(self.unbalanced(open_at))
    }

    fn entry(&mut self, kind: String, close: u8, open_at: usize) -> Result<RawEntry, BibError> {
        self.skip_ws();
        let key_start = self.pos;
        while matches!(self.peek(), Some(b) if !b.is_ascii_whitespace() && b != b',' && b != close && b != b'{' && b != b'}')
        {
            self.pos += 1;
        }
        let key = self.src[key_start..self.pos].to_string();
        if key.is_empty() {
            return Err(self.syntax("missing cite key"));
        }
        self.current_key = key.clone();

        let mut fields: IndexMap<String, String> = IndexMap::new();
        self.skip_ws();
        match self.peek() {
            Some(b',') => self.pos += 1,
            Some(b) if b == close => {
                self.pos += 1;
                return Ok(RawEntry { entry_kind: kind, cite_key: key, fields });
            }
            None => return Err(self.unbalanced(open_at)),
            _ => return Err(self.syntax("expected `,` after cite key")),
        }

        loop {
            self.skip_ws();
            match self.peek() {
                None => return Err(self.unbalanced(open_at)),
                Some(b) if b == close => {
                    self.pos += 1;
                    break;
                }
                _ => {}
            }
            let name = self.ident().to_ascii_lowercase();
            if name.is_empty() {
                return Err(self.syntax("expected field name"));
            }
            self.expect(b'=', "`=` after field name")?;
            let value = self.value()?;
            if fields.contains_key(&name) {
                self.warn(format!("duplicate field `{name}`; later value kept"));
                // later duplicate overwrites but keeps its original position
            }
            fields.insert(name, value);

            self.skip_ws();
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b) if b == close => {
                    self.pos += 1;
                    break;
                }
                None => return Err(self.unbalanced(open_at)),
                _ => return Err(self.syntax("expected `,` or end of entry after field value")),
            }
        }
        Ok(RawEntry { entry_kind: kind, cite_key: key, fields })
    }

    /// A value: pieces joined by `#`.
    fn value(&mut self) -> Result<String, BibError> {
        let mut out = String::new();
        loop {
            self.skip_ws();
            let piece = match self.peek() {
                Some(b'{') => self.braced()?,
                Some(b'"') => self.quoted()?,
                Some(b) if b.is_ascii_digit() => {
                    let start = self.pos;
                    while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
                        self.pos += 1;
                    }
                    self.src[start..self.pos].to_string()
                }
                Some(b) if is_ident_byte(b) => {
                    let name = self.ident().to_ascii_lowercase();
                    match self.macros.get(&name) {
                        Some(v) => v.clone(),
                        None => {
                            self.warn(format!("undefined macro `{name}` expands to empty"));
                            String::new()
                        }
                    }
                }
                _ => return Err(self.syntax("expected field value")),
            };
            out.push_str(&piece);
            self.skip_ws();
            if self.peek() == Some(b'#') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(collapse_ws(&out))
    }

    fn braced(&mut self) -> Result<String, BibError> {
        let open_at = self.pos;
        self.pos += 1;
        let start = self.pos;
        let mut depth = 1usize;
        while let Some(b) = self.peek() {
            match b {
                b'{' => depth += 1,
                b'}' => {
                    depth -= 1;
                    if depth == 0 {
                        let inner = self.src[start..self.pos].to_string();
                        self.pos += 1;
                        return Ok(inner);
                    }
                }
                // an `@` at line start inside a value means the closing brace went missing
                b'@' if self.at_line_start() => return Err(self.unbalanced(open_at)),
                _ => {}
            }
            self.pos += 1;
        }
        Err(self.unbalanced(open_at))
    }

    fn quoted(&mut self) -> Result<String, BibError> {
        let open_at = self.pos;
        self.pos += 1;
        let start = self.pos;
        let mut depth = 0usize;
        while let Some(b) = self.peek() {
            match b {
                b'{' => depth += 1,
                b'}' => {
                    if depth == 0 {
                        return Err(self.unbalanced(self.pos));
                    }
                    depth -= 1;
                }
                b'"' if depth == 0 => {
                    let inner = self.src[start..self.pos].to_string();
                    self.pos += 1;
                    return Ok(inner);
                }
                b'@' if self.at_line_start() => return Err(self.unbalanced(open_at)),
                _ => {}
            }
            self.pos += 1;
        }
        Err(self.unbalanced(open_at))
    }

    fn at_line_start(&self) -> bool {
        let line_start = self.src[..self.pos].rfind('\n').map_or(0, |n| n + 1);
        self.src[line_start..self.pos].trim().is_empty()
    }
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}
