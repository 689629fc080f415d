//! Template packs.
//!
//! A pack is a plain-text file of sections. A header line `[kind.variant]`
//! opens a section; the following non-blank lines, joined by single spaces,
//! form its template. Placeholders are written `{name}`; `{{` and `}}` are
//! literal braces. The special `[lexicon]` section holds `key = value` lines
//! used to word attribute values (`venue_type.journal = journals`). Lines
//! starting with `#` are comments.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TemplateError {
    #[error("template pack line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("template pack is missing sections: {}", .0.join(", "))]
    Incomplete(Vec<String>),
}

#[derive(Debug, Error, PartialEq)]
pub enum RealizeError {
    #[error("no template for `{kind}`")]
    MissingTemplate { kind: String },
    #[error("template `{kind}` uses unknown slot `{slot}`")]
    MissingSlot { kind: String, slot: String },
    #[error("template `{kind}` is malformed: {message}")]
    BadTemplate { kind: String, message: String },
    #[error("value {0} is not a proportion in [0, 1]")]
    OutOfRange(f64),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TemplatePack {
    templates: BTreeMap<String, String>,
    lexicon: BTreeMap<String, String>,
}

impl TemplatePack {
    pub fn parse(text: &str) -> Result<TemplatePack, TemplateError> {
        let mut pack = TemplatePack::default();
        let mut current: Option<(String, Vec<String>)> = None;
        let mut in_lexicon = false;

        let flush = |pack: &mut TemplatePack, current: &mut Option<(String, Vec<String>)>| {
            if let Some((name, lines)) = current.take() {
                pack.templates.insert(name, lines.join(" "));
            }
        };

        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(header) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                flush(&mut pack, &mut current);
                let header = header.trim();
                if header.is_empty() || header.contains(char::is_whitespace) {
                    return Err(TemplateError::Syntax { line: line_no, message: format!("bad section name `{header}`") });
                }
                if header == "lexicon" {
                    in_lexicon = true;
                } else {
                    in_lexicon = false;
                    if pack.templates.contains_key(header) {
                        return Err(TemplateError::Syntax {
                            line: line_no,
                            message: format!("section `{header}` defined twice"),
                        });
                    }
                    current = Some((header.to_string(), Vec::new()));
                }
                continue;
            }
            if in_lexicon {
                let (key, value) = line.split_once('=').ok_or_else(|| TemplateError::Syntax {
                    line: line_no,
                    message: "lexicon lines look like `key = value`".into(),
                })?;
                pack.lexicon.insert(key.trim().to_string(), value.trim().to_string());
                continue;
            }
            match current.as_mut() {
                Some((name, lines)) => {
                    check_placeholders(line).map_err(|message| TemplateError::Syntax {
                        line: line_no,
                        message: format!("in `{name}`: {message}"),
                    })?;
                    lines.push(line.to_string());
                }
                None => {
                    return Err(TemplateError::Syntax { line: line_no, message: "text outside any section".into() })
                }
            }
        }
        flush(&mut pack, &mut current);
        Ok(pack)
    }

    pub fn get(&self, kind: &str) -> Option<&str> {
        self.templates.get(kind).map(String::as_str)
    }

    pub fn has(&self, kind: &str) -> bool {
        self.templates.contains_key(kind)
    }

    pub fn lexicon(&self, key: &str) -> Option<&str> {
        self.lexicon.get(key).map(String::as_str)
    }

    pub fn sections(&self) -> impl Iterator<Item = &str> {
        self.templates.keys().map(String::as_str)
    }

    /// Fails listing every name in `required` that has no section.
    pub fn require(&self, required: &[&str]) -> Result<(), TemplateError> {
        let missing: Vec<String> = required.iter().filter(|k| !self.has(k)).map(|k| k.to_string()).collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(TemplateError::Incomplete(missing))
        }
    }

    /// Renders the first of `kinds` that exists.
    pub fn render_first(&self, kinds: &[&str], slots: &[(&str, &str)]) -> Result<String, RealizeError> {
        let kind = kinds
            .iter()
            .find(|k| self.has(k))
            .ok_or_else(|| RealizeError::MissingTemplate { kind: kinds.last().copied().unwrap_or_default().to_string() })?;
        self.render(kind, slots)
    }

    pub fn render(&self, kind: &str, slots: &[(&str, &str)]) -> Result<String, RealizeError> {
        let template = self.get(kind).ok_or_else(|| RealizeError::MissingTemplate { kind: kind.to_string() })?;
        substitute(template, slots).map_err(|e| match e {
            SubstError::Slot(slot) => RealizeError::MissingSlot { kind: kind.to_string(), slot },
            SubstError::Syntax(message) => RealizeError::BadTemplate { kind: kind.to_string(), message },
        })
    }
}

enum SubstError {
    Slot(String),
    Syntax(String),
}

fn check_placeholders(template: &str) -> Result<(), String> {
    match substitute_with(template, |_| Some(String::new())) {
        Ok(_) => Ok(()),
        Err(SubstError::Syntax(m)) => Err(m),
        Err(SubstError::Slot(s)) => Err(format!("bad slot `{s}`")),
    }
}

fn substitute(template: &str, slots: &[(&str, &str)]) -> Result<String, SubstError> {
    substitute_with(template, |name| slots.iter().find(|(k, _)| *k == name).map(|(_, v)| v.to_string()))
}

fn substitute_with(template: &str, lookup: impl Fn(&str) -> Option<String>) -> Result<String, SubstError> {
    let mut out = String::with_capacity(template.len());
    let mut chars = template.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        match c {
            '{' if chars.peek().map(|(_, c)| *c) == Some('{') => {
                chars.next();
                out.push('{');
            }
            '}' if chars.peek().map(|(_, c)| *c) == Some('}') => {
                chars.next();
                out.push('}');
            }
            '{' => {
                let rest = &template[i + 1..];
                let end = rest.find('}').ok_or_else(|| SubstError::Syntax("unclosed `{`".into()))?;
                let name = &rest[..end];
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(SubstError::Syntax(format!("bad placeholder `{{{name}}}`")));
                }
                out.push_str(&lookup(name).ok_or_else(|| SubstError::Slot(name.to_string()))?);
                for _ in 0..name.chars().count() + 1 {
                    chars.next();
                }
            }
            '}' => return Err(SubstError::Syntax("stray `}`".into())),
            _ => out.push(c),
        }
    }
    Ok(out)
}
