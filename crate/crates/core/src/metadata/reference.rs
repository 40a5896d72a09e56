//! Heuristic title and year extraction from raw reference strings.
//!
//! Good enough to recompute a dedup key for references that follow the usual
//! `Authors. Title. Venue, year.` or `Authors (year). "Title." Venue.`
//! layouts. Italicized segments are taken to be venues.

use super::dedup::extract_year;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedReference {
    pub title: Option<String>,
    pub year: Option<i32>,
}

const ITALIC_MARKERS: &[&str] = &["\\textit", "\\emph", "\\em ", "\\it ", "*", "_"];

pub fn extract_reference(raw: &str) -> ExtractedReference {
    let year = extract_year(raw);
    let title = quoted_title(raw).or_else(|| segment_title(raw, year));
    ExtractedReference { title, year }
}

fn has_letters(s: &str) -> bool {
    s.chars().any(char::is_alphabetic)
}

fn quoted_title(raw: &str) -> Option<String> {
    let pairs: [(&str, &str); 3] = [("\"", "\""), ("\u{201c}", "\u{201d}"), ("``", "''")];
    let mut best: Option<&str> = None;
    for (open, close) in pairs {
        let mut rest = raw;
        while let Some(start) = rest.find(open) {
            let after = &rest[start + open.len()..];
            let Some(end) = after.find(close) else { break };
            let inner = after[..end].trim();
            if has_letters(inner) && best.is_none_or(|b| inner.chars().count() > b.chars().count()) {
                best = Some(inner);
            }
            rest = &after[end + close.len()..];
        }
    }
    best.map(|t| t.trim_end_matches(['.', ',', ';']).to_owned())
}

/// Splits on sentence punctuation followed by whitespace.
fn split_segments(raw: &str) -> Vec<&str> {
    let mut segments = Vec::new();
    let mut start = 0;
    let mut chars = raw.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '?' | '!') {
            let at_end = chars.peek().is_none();
            let before_space = chars.peek().is_some_and(|(_, n)| n.is_whitespace());
            if at_end || before_space {
                segments.push(raw[start..i].trim());
                start = i + c.len_utf8();
            }
        }
    }
    if start < raw.len() {
        segments.push(raw[start..].trim());
    }
    segments
}

/// A segment ending in a lone capital letter is an author initial.
fn looks_like_author_part(segment: &str) -> bool {
    segment
        .split_whitespace()
        .last()
        .is_some_and(|w| {
            let w = w.trim_matches(|c: char| !c.is_alphanumeric());
            w.chars().count() == 1 && w.chars().all(char::is_uppercase)
        })
}

fn strip_year(segment: &str, year: Option<i32>) -> String {
    let Some(year) = year else { return segment.to_owned() };
    let year = year.to_string();
    let words: Vec<&str> = segment.split_whitespace().collect();
    let is_year = |w: &str| w.trim_matches(|c: char| !c.is_ascii_digit()) == year && w.chars().filter(char::is_ascii_digit).count() == 4;
    let mut lo = 0;
    let mut hi = words.len();
    while lo < hi && is_year(words[lo]) {
        lo += 1;
    }
    while hi > lo && is_year(words[hi - 1]) {
        hi -= 1;
    }
    words[lo..hi].join(" ")
}

fn remove_parenthesized_year(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut rest = raw;
    while let Some(open) = rest.find('(') {
        let after = &rest[open + 1..];
        match after.find(')') {
            Some(close) if extract_year(&after[..close]).is_some() && after[..close].trim().len() <= 6 => {
                out.push_str(&rest[..open]);
                rest = &after[close + 1..];
            }
            _ => {
                out.push_str(&rest[..=open]);
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

fn segment_title(raw: &str, year: Option<i32>) -> Option<String> {
    let cleaned = remove_parenthesized_year(raw);
    let segments = split_segments(&cleaned);
    let window: &[&str] = if segments.len() >= 3 { &segments[1..segments.len() - 1] } else { &segments };
    let usable = |s: &&&str| {
        has_letters(s) && !ITALIC_MARKERS.iter().any(|m| s.contains(m))
    };
    let mut candidates: Vec<&str> = window.iter().filter(usable).filter(|s| !looks_like_author_part(s)).copied().collect();
    if candidates.is_empty() {
        candidates = segments.iter().filter(usable).copied().collect();
    }
    let mut best: Option<String> = None;
    for candidate in candidates {
        let stripped = strip_year(candidate, year);
        if has_letters(&stripped) && best.as_ref().is_none_or(|b| stripped.chars().count() > b.chars().count()) {
            best = Some(stripped);
        }
    }
    best
}
