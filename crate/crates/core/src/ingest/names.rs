use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

/// An author name split into family and given parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PersonName {
    pub family: String,
    pub given: String,
    pub normalized_key: String,
}

impl PersonName {
    pub fn new(family: impl Into<String>, given: impl Into<String>) -> Self {
        let family = family.into();
        let given = given.into();
        let normalized_key = normalized_key(&family, &given);
        PersonName { family, given, normalized_key }
    }

    /// Parses one name in any of the usual bibliography forms:
    /// `First Last`, `Last, First`, `Last, Jr, First`, or `{Corporate Name}`.
    ///
    /// Returns `None` when no family name can be found.
    pub fn parse(raw: &str) -> Option<PersonName> {
        let raw = raw.trim();
        let parts = split_top_level(raw, ',');
        let (family, given) = match parts.len() {
            0 => return None,
            1 => {
                let words = split_words(parts[0]);
                let (last, rest) = words.split_last()?;
                (last.to_string(), rest.join(" "))
            }
            2 => (parts[0].to_string(), parts[1].to_string()),
            _ => (parts[0].to_string(), parts[2..].join(" ")),
        };
        let family = clean(&family);
        let given = clean(&given);
        if family.is_empty() {
            return None;
        }
        Some(PersonName::new(family, given))
    }

    /// `Given Family`, or just the family name when no given name is known.
    pub fn display(&self) -> String {
        if self.given.is_empty() {
            self.family.clone()
        } else {
            format!("{} {}", self.given, self.family)
        }
    }
}

/// Lowercased family name plus the first initial of the given name,
/// e.g. `smith.j`. Without a given name it is the family name alone.
pub fn normalized_key(family: &str, given: &str) -> String {
    let family = family.trim().to_lowercase();
    match given.trim().chars().find(|c| c.is_alphabetic()) {
        Some(initial) => format!("{family}.{}", initial.to_lowercase()),
        None => family,
    }
}

/// Splits a BibTeX `author` field on ` and ` outside braces. A trailing
/// `and others` is dropped.
pub fn parse_author_list(field: &str) -> (Vec<PersonName>, Vec<String>) {
    let mut names = Vec::new();
    let mut rejected = Vec::new();
    for chunk in split_on_and(field) {
        let chunk = chunk.trim();
        if chunk.is_empty() || chunk.eq_ignore_ascii_case("others") {
            continue;
        }
        match PersonName::parse(chunk) {
            Some(name) => names.push(name),
            None => rejected.push(chunk.to_string()),
        }
    }
    (names, rejected)
}

/// True iff the two author lists share a normalized key.
pub fn detect_self_citation(reference_authors: &[PersonName], citing_authors: &[PersonName]) -> bool {
    if citing_authors.is_empty() {
        return false;
    }
    let citing: BTreeSet<&str> = citing_authors.iter().map(|p| p.normalized_key.as_str()).collect();
    reference_authors
        .iter()
        .any(|p| citing.contains(p.normalized_key.as_str()))
}

fn split_on_and(field: &str) -> Vec<&str> {
    let bytes = field.as_bytes();
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'{' => depth += 1,
            b'}' => depth -= 1,
            b if depth == 0 && b.is_ascii_whitespace() => {
                let rest = &field[i..];
                let trimmed = rest.trim_start();
                let lead = rest.len() - trimmed.len();
                if trimmed.len() > 3
                    && trimmed[..3].eq_ignore_ascii_case("and")
                    && trimmed.as_bytes()[3].is_ascii_whitespace()
                {
                    out.push(&field[start..i]);
                    i += lead + 3;
                    start = i;
                    continue;
                }
            }
            _ => {}
        }
        i += 1;
    }
    out.push(&field[start..]);
    out
}

fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '{' => depth += 1,
            '}' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(s[start..i].trim());
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out.retain(|p| !p.is_empty());
    out
}

/// Whitespace-separated words, treating a braced group as one word.
fn split_words(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start: Option<usize> = None;
    for (i, c) in s.char_indices() {
        match c {
            '{' => depth += 1,
            '}' => depth -= 1,
            _ => {}
        }
        if c.is_whitespace() && depth == 0 {
            if let Some(st) = start.take() {
                out.push(&s[st..i]);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        out.push(&s[st..]);
    }
    out
}

fn clean(s: &str) -> String {
    let text = delatex(s);
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

// accent command -> (base letter, combined letter)
const ACCENTS: &[(char, &[(char, char)])] = &[
    ('"', &[('a', 'ä'), ('o', 'ö'), ('u', 'ü'), ('e', 'ë'), ('i', 'ï'), ('A', 'Ä'), ('O', 'Ö'), ('U', 'Ü')]),
    ('\'', &[('a', 'á'), ('e', 'é'), ('i', 'í'), ('o', 'ó'), ('u', 'ú'), ('y', 'ý'), ('c', 'ć'), ('n', 'ń'), ('s', 'ś'), ('E', 'É'), ('A', 'Á')]),
    ('`', &[('a', 'à'), ('e', 'è'), ('i', 'ì'), ('o', 'ò'), ('u', 'ù'), ('E', 'È')]),
    ('^', &[('a', 'â'), ('e', 'ê'), ('i', 'î'), ('o', 'ô'), ('u', 'û')]),
    ('~', &[('a', 'ã'), ('n', 'ñ'), ('o', 'õ'), ('N', 'Ñ')]),
    ('c', &[('c', 'ç'), ('C', 'Ç'), ('s', 'ş')]),
    ('v', &[('c', 'č'), ('s', 'š'), ('z', 'ž'), ('r', 'ř'), ('e', 'ě'), ('C', 'Č'), ('S', 'Š'), ('Z', 'Ž')]),
];

const SYMBOLS: &[(&str, &str)] = &[
    ("ss", "ß"),
    ("o", "ø"),
    ("O", "Ø"),
    ("aa", "å"),
    ("AA", "Å"),
    ("ae", "æ"),
    ("AE", "Æ"),
    ("l", "ł"),
    ("L", "Ł"),
    ("i", "ı"),
];

/// Replaces a fixed table of common LaTeX escapes (accents, `\&`, `--`)
/// with their Unicode forms and strips remaining grouping braces.
pub fn delatex(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::with_capacity(s.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '\\' if i + 1 < chars.len() => {
                let cmd = chars[i + 1];
                let letter_cmd = cmd.is_alphabetic() && chars.get(i + 2).is_some_and(|c| c.is_alphabetic());
                let accent = if letter_cmd { None } else { ACCENTS.iter().find(|(a, _)| *a == cmd) };
                if let Some((_, table)) = accent {
                    // \"a, \"{a}, \c c, \c{c}
                    let mut j = i + 2;
                    if cmd.is_alphabetic() {
                        while j < chars.len() && chars[j] == ' ' {
                            j += 1;
                        }
                    }
                    let (base, end) = if chars.get(j) == Some(&'{') {
                        match (chars.get(j + 1), chars.get(j + 2)) {
                            (Some(b), Some('}')) => (Some(*b), j + 3),
                            _ => (None, j),
                        }
                    } else {
                        (chars.get(j).copied(), j + 1)
                    };
                    if let Some(base) = base {
                        if let Some((_, combined)) = table.iter().find(|(b, _)| *b == base) {
                            out.push(*combined);
                            i = end;
                            continue;
                        }
                    }
                    if !cmd.is_alphabetic() {
                        // unknown accent on this letter: keep the letter
                        i += 2;
                        continue;
                    }
                }
                if matches!(cmd, '&' | '%' | '$' | '#' | '_' | '{' | '}') {
                    out.push(cmd);
                    i += 2;
                    continue;
                }
                let word: String = chars[i + 1..].iter().take_while(|c| c.is_ascii_alphabetic()).collect();
                if let Some((_, sym)) = SYMBOLS.iter().find(|(w, _)| *w == word) {
                    out.push_str(sym);
                    i += 1 + word.chars().count();
                    if chars.get(i) == Some(&' ') {
                        i += 1;
                    }
                    continue;
                }
                // unknown command: drop it, keep its argument
                i += 1 + word.chars().count();
            }
            '{' | '}' => i += 1,
            '-' if chars.get(i + 1) == Some(&'-') => {
                if chars.get(i + 2) == Some(&'-') {
                    out.push('—');
                    i += 3;
                } else {
                    out.push('–');
                    i += 2;
                }
            }
            '~' => {
                out.push(' ');
                i += 1;
            }
            _ => {
                out.push(c);
                i += 1;
            }
        }
    }
    out
}
