//! Noise-tolerant parser for the BibTeX subset emitted by reference managers.
//!
//! Supported: `@kind{key, name = {value}, name = "value", name = 123}` with
//! nested braces inside values, and the `@kind(...)` delimiter variant.
//! `@string`, `@preamble`, `@comment` and `#` concatenation are skipped with a
//! warning. Text between entries is skipped with a warning when it is not
//! whitespace. The parser never fails: anything it cannot recover becomes a
//! [`ParseWarning`].

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// One parsed metadata entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BibEntry {
    /// Lowercased entry type (`article`, `inproceedings`, ...).
    pub kind: String,
    pub cite_key: String,
    /// Lowercased field name to whitespace-collapsed value.
    pub fields: BTreeMap<String, String>,
}

impl BibEntry {
    pub fn field(&self, name: &str) -> Option<&str> {
        self.fields.get(name).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WarningKind {
    /// Non-whitespace text outside of any entry.
    SkippedText,
    /// `@string`, `@preamble` or `@comment`.
    UnsupportedEntry(String),
    /// A value uses `#` concatenation.
    Concatenation,
    /// An entry reused a cite key seen earlier in the same input.
    DuplicateKey(String),
    /// An entry that could not be parsed; the text up to the next `@` is skipped.
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseWarning {
    /// Byte offset in the (lossily decoded) input.
    pub offset: usize,
    pub kind: WarningKind,
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            WarningKind::SkippedText => write!(f, "offset {}: skipped text outside entries", self.offset),
            WarningKind::UnsupportedEntry(kind) => {
                write!(f, "offset {}: unsupported @{kind} skipped", self.offset)
            }
            WarningKind::Concatenation => {
                write!(f, "offset {}: '#' concatenation unsupported, entry skipped", self.offset)
            }
            WarningKind::DuplicateKey(key) => {
                write!(f, "offset {}: duplicate cite key '{key}', entry skipped", self.offset)
            }
            WarningKind::Malformed(reason) => write!(f, "offset {}: malformed entry: {reason}", self.offset),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseOutcome {
    pub entries: Vec<BibEntry>,
    pub warnings: Vec<ParseWarning>,
}

/// Parses bytes that may not be valid UTF-8; invalid sequences are replaced.
pub fn parse_bibtex_bytes(input: &[u8]) -> ParseOutcome {
    parse_bibtex(&String::from_utf8_lossy(input))
}

pub fn parse_bibtex(input: &str) -> ParseOutcome {
    let bytes = input.as_bytes();
    let mut out = ParseOutcome::default();
    let mut seen_keys = HashSet::new();
    let mut pos = 0;
    let mut gap_start = 0;

    loop {
        let at = find_byte(bytes, b'@', pos);
        let gap_end = at.unwrap_or(bytes.len());
        if !input[gap_start..gap_end].trim().is_empty() {
            out.warnings.push(ParseWarning { offset: gap_start, kind: WarningKind::SkippedText });
        }
        let Some(at) = at else { break };

        match parse_entry(input, at) {
            Ok(Parsed::Entry(entry, end)) => {
                if seen_keys.insert(entry.cite_key.clone()) {
                    out.entries.push(entry);
                } else {
                    out.warnings.push(ParseWarning {
                        offset: at,
                        kind: WarningKind::DuplicateKey(entry.cite_key),
                    });
                }
                pos = end;
                gap_start = end;
            }
            Ok(Parsed::Skipped(kind, end)) => {
                out.warnings.push(ParseWarning { offset: at, kind });
                pos = end;
                gap_start = end;
            }
            Err(reason) => {
                out.warnings.push(ParseWarning { offset: at, kind: WarningKind::Malformed(reason) });
                let resume = find_byte(bytes, b'@', at + 1).unwrap_or(bytes.len());
                pos = resume;
                gap_start = resume;
            }
        }
    }
    out
}

/// Writes entries in the canonical form accepted by [`parse_bibtex`].
pub fn write_bibtex(entries: &[BibEntry]) -> String {
    let mut out = String::new();
    for entry in entries {
        out.push('@');
        out.push_str(&entry.kind);
        out.push('{');
        out.push_str(&entry.cite_key);
        for (name, value) in &entry.fields {
            out.push_str(",\n  ");
            out.push_str(name);
            out.push_str(" = {");
            out.push_str(value);
            out.push('}');
        }
        out.push_str("\n}\n\n");
    }
    out
}

enum Parsed {
    Entry(BibEntry, usize),
    Skipped(WarningKind, usize),
}

fn find_byte(bytes: &[u8], needle: u8, from: usize) -> Option<usize> {
    bytes.get(from..)?.iter().position(|&b| b == needle).map(|i| i + from)
}

fn is_ident_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b':' | b'.' | b'+' | b'/')
}

fn is_key_byte(b: u8) -> bool {
    !b.is_ascii_whitespace() && !matches!(b, b'{' | b'}' | b'(' | b')' | b',' | b'=' | b'"' | b'#' | b'%' | b'@')
}

fn skip_ws(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && bytes[i].is_ascii_whitespace() {
        i += 1;
    }
    i
}

fn parse_entry(input: &str, at: usize) -> Result<Parsed, String> {
    let bytes = input.as_bytes();
    let kind_start = at + 1;
    let mut i = kind_start;
    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
        i += 1;
    }
    if i == kind_start {
        return Err("missing entry type after '@'".into());
    }
    let kind = input[kind_start..i].to_ascii_lowercase();
    i = skip_ws(bytes, i);
    let close = match bytes.get(i) {
        Some(b'{') => b'}',
        Some(b'(') => b')',
        _ => return Err(format!("expected '{{' or '(' after @{kind}")),
    };
    let open = i;
    let end = entry_extent(bytes, open, close)?;
    let after = end + 1;

    if matches!(kind.as_str(), "string" | "preamble" | "comment") {
        return Ok(Parsed::Skipped(WarningKind::UnsupportedEntry(kind), after));
    }

    let body = &input[open + 1..end];
    match parse_body(body) {
        Ok((cite_key, fields)) => Ok(Parsed::Entry(BibEntry { kind, cite_key, fields }, after)),
        Err(BodyError::Concatenation) => Ok(Parsed::Skipped(WarningKind::Concatenation, after)),
        Err(BodyError::Malformed(reason)) => Err(reason),
    }
}

/// Finds the byte index of the delimiter closing the entry opened at `open`.
///
/// An `@` at the start of a line while braces are still open means the entry
/// never re-balanced; it is reported as malformed so the next entry survives.
fn entry_extent(bytes: &[u8], open: usize, close: u8) -> Result<usize, String> {
    let mut depth: usize = 0;
    let mut in_quote = false;
    let mut line_start = false;
    let mut i = open + 1;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b'@' if line_start => return Err("unbalanced braces before next entry".into()),
            b'{' => depth += 1,
            b'}' if close == b'}' && depth == 0 => return Ok(i),
            b'}' => {
                if depth == 0 {
                    return Err("unbalanced closing brace".into());
                }
                depth -= 1;
            }
            b'"' if close == b')' && depth == 0 => in_quote = !in_quote,
            b')' if close == b')' && depth == 0 && !in_quote => return Ok(i),
            _ => {}
        }
        if b == b'\n' {
            line_start = true;
        } else if !b.is_ascii_whitespace() {
            line_start = false;
        }
        i += 1;
    }
    Err("unterminated entry".into())
}

enum BodyError {
    Concatenation,
    Malformed(String),
}

impl From<&str> for BodyError {
    fn from(s: &str) -> Self {
        BodyError::Malformed(s.to_owned())
    }
}

fn parse_body(body: &str) -> Result<(String, BTreeMap<String, String>), BodyError> {
    let bytes = body.as_bytes();
    let mut i = skip_ws(bytes, 0);
    let key_start = i;
    while i < bytes.len() && is_key_byte(bytes[i]) {
        i += 1;
    }
    let cite_key = body[key_start..i].to_owned();
    if cite_key.is_empty() {
        return Err("empty cite key".into());
    }
    i = skip_ws(bytes, i);
    let mut fields = BTreeMap::new();
    match bytes.get(i) {
        None => return Ok((cite_key, fields)),
        Some(b',') => i += 1,
        Some(_) => return Err("invalid character in cite key".into()),
    }

    loop {
        i = skip_ws(bytes, i);
        while bytes.get(i) == Some(&b',') {
            i = skip_ws(bytes, i + 1);
        }
        if i >= bytes.len() {
            break;
        }
        let name_start = i;
        while i < bytes.len() && is_ident_byte(bytes[i]) {
            i += 1;
        }
        if i == name_start {
            return Err("expected field name".into());
        }
        let name = body[name_start..i].to_ascii_lowercase();
        i = skip_ws(bytes, i);
        if bytes.get(i) != Some(&b'=') {
            return Err(BodyError::Malformed(format!("expected '=' after field '{name}'")));
        }
        i = skip_ws(bytes, i + 1);
        let (raw, next) = parse_value(body, i)?;
        i = skip_ws(bytes, next);
        match bytes.get(i) {
            Some(b'#') => return Err(BodyError::Concatenation),
            None | Some(b',') => {}
            Some(_) => return Err(BodyError::Malformed(format!("unexpected text after field '{name}'"))),
        }
        if fields.contains_key(&name) {
            return Err(BodyError::Malformed(format!("duplicate field '{name}'")));
        }
        fields.insert(name, collapse_whitespace(raw));
    }
    Ok((cite_key, fields))
}

fn parse_value(body: &str, start: usize) -> Result<(&str, usize), BodyError> {
    let bytes = body.as_bytes();
    match bytes.get(start) {
        Some(b'{') => {
            let mut depth = 0usize;
            for (offset, &b) in bytes[start..].iter().enumerate() {
                match b {
                    b'{' => depth += 1,
                    b'}' => {
                        depth -= 1;
                        if depth == 0 {
                            let end = start + offset;
                            return Ok((&body[start + 1..end], end + 1));
                        }
                    }
                    _ => {}
                }
            }
            Err("unterminated braced value".into())
        }
        Some(b'"') => {
            let mut depth = 0usize;
            for (offset, &b) in bytes[start + 1..].iter().enumerate() {
                match b {
                    b'{' => depth += 1,
                    b'}' => {
                        if depth == 0 {
                            return Err("unbalanced brace in quoted value".into());
                        }
                        depth -= 1;
                    }
                    b'"' if depth == 0 => {
                        let end = start + 1 + offset;
                        return Ok((&body[start + 1..end], end + 1));
                    }
                    _ => {}
                }
            }
            Err("unterminated quoted value".into())
        }
        Some(_) => {
            let mut i = start;
            while i < bytes.len() && is_ident_byte(bytes[i]) {
                i += 1;
            }
            if i == start {
                return Err("expected field value".into());
            }
            Ok((&body[start..i], i))
        }
        None => Err("missing field value".into()),
    }
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fields(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn empty_input_yields_nothing() {
        let out = parse_bibtex("");
        assert!(out.entries.is_empty());
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn single_entry() {
        let out = parse_bibtex("@article{k1, title={A}, year={2001}}");
        assert!(out.warnings.is_empty());
        assert_eq!(
            out.entries,
            vec![BibEntry {
                kind: "article".into(),
                cite_key: "k1".into(),
                fields: fields(&[("title", "A"), ("year", "2001")]),
            }]
        );
    }

    #[test]
    fn garbage_around_entry_gives_two_warnings() {
        let out = parse_bibtex("garbage @article{k1, title={A}} garbage");
        assert_eq!(out.entries.len(), 1);
        assert_eq!(out.warnings.len(), 2);
        assert!(out.warnings.iter().all(|w| w.kind == WarningKind::SkippedText));
    }

    #[test]
    fn value_forms_and_nesting() {
        let out = parse_bibtex(
            "@InProceedings(K2,\n  Title = \"On {B}ayes\",\n  YEAR = 1999,\n  note = {a {b {c}} d}\n)",
        );
        assert!(out.warnings.is_empty(), "{:?}", out.warnings);
        let e = &out.entries[0];
        assert_eq!(e.kind, "inproceedings");
        assert_eq!(e.cite_key, "K2");
        assert_eq!(e.fields, fields(&[("title", "On {B}ayes"), ("year", "1999"), ("note", "a {b {c}} d")]));
    }

    #[test]
    fn unsupported_forms_are_skipped() {
        let out = parse_bibtex(
            "@string{acm = {ACM}}\n@preamble{\"x\"}\n@article{c, journal = acm # {Press}}\n@misc{d, title={T}}",
        );
        assert_eq!(out.entries.len(), 1);
        assert_eq!(out.entries[0].cite_key, "d");
        let kinds: Vec<_> = out.warnings.iter().map(|w| w.kind.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                WarningKind::UnsupportedEntry("string".into()),
                WarningKind::UnsupportedEntry("preamble".into()),
                WarningKind::Concatenation,
            ]
        );
    }

    #[test]
    fn unbalanced_entry_does_not_swallow_the_next() {
        let out = parse_bibtex("@article{a, title={Broken {value}\n@article{b, title={Fine}}");
        assert_eq!(out.entries.len(), 1);
        assert_eq!(out.entries[0].cite_key, "b");
        assert!(matches!(out.warnings[0].kind, WarningKind::Malformed(_)));
    }

    #[test]
    fn braces_rebalancing_later_recover_the_entry() {
        let out = parse_bibtex("@article{a, title={Open {brace}, year={2001}}}\n");
        assert_eq!(out.entries.len(), 1);
        assert_eq!(out.entries[0].field("title"), Some("Open {brace}, year={2001}"));
    }

    #[test]
    fn duplicate_field_rejects_entry_and_duplicate_key_is_skipped() {
        let out = parse_bibtex("@article{a, title={X}, TITLE={Y}}\n@article{b, title={Z}}\n@book{b, title={W}}");
        assert_eq!(out.entries.len(), 1);
        assert_eq!(out.entries[0].field("title"), Some("Z"));
        assert_eq!(out.warnings.len(), 2);
        assert_eq!(out.warnings[1].kind, WarningKind::DuplicateKey("b".into()));
    }

    #[test]
    fn at_sign_inside_value_is_kept() {
        let out = parse_bibtex("@misc{m, note={mail me@example.org}}");
        assert_eq!(out.entries[0].field("note"), Some("mail me@example.org"));
    }

    #[test]
    fn whitespace_is_collapsed() {
        let out = parse_bibtex("@misc{m, title={  Two\n\t lines  }}");
        assert_eq!(out.entries[0].field("title"), Some("Two lines"));
    }

    #[test]
    fn written_form_reparses() {
        let src = "@article{k, title={A {B} c}, year=2001, author=\"X and Y\"}";
        let first = parse_bibtex(src).entries;
        let again = parse_bibtex(&write_bibtex(&first));
        assert!(again.warnings.is_empty());
        assert_eq!(again.entries, first);
    }
}
