use std::fmt;

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use super::MetadataError;

/// An author name as written in metadata plus its comparison form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorName {
    pub raw: String,
    pub normalized: String,
}

impl fmt::Display for AuthorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.normalized)
    }
}

/// Accent commands made of a single symbol: `\"a`, `\'{e}`.
const SYMBOL_ACCENTS: &[char] = &['"', '\'', '`', '^', '~', '=', '.'];

/// Accent commands made of a letter: `\c{c}`, `\v s`.
const LETTER_ACCENTS: &[&str] = &["c", "v", "u", "H", "k", "r", "d", "b", "t"];

/// Escapes that stand for a letter of their own.
const SPECIAL_LETTERS: &[(&str, &str)] = &[
    ("ss", "ss"),
    ("o", "o"),
    ("O", "o"),
    ("aa", "a"),
    ("AA", "a"),
    ("ae", "ae"),
    ("AE", "ae"),
    ("oe", "oe"),
    ("OE", "oe"),
    ("l", "l"),
    ("L", "l"),
    ("i", "i"),
    ("j", "j"),
];

/// Replaces the supported LaTeX escapes with their base letters and drops
/// any other control sequence name. Braces are left in place.
pub fn fold_latex(input: &str) -> String {
    let chars: Vec<char> = input.chars().collect();
    let mut out = String::with_capacity(input.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c != '\\' {
            out.push(c);
            i += 1;
            continue;
        }
        i += 1;
        let Some(&next) = chars.get(i) else { break };
        if SYMBOL_ACCENTS.contains(&next) {
            i = take_accented(&chars, i + 1, &mut out);
        } else if next.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphabetic() {
                i += 1;
            }
            let name: String = chars[start..i].iter().collect();
            if let Some((_, letters)) = SPECIAL_LETTERS.iter().find(|(cmd, _)| *cmd == name) {
                out.push_str(letters);
            } else if LETTER_ACCENTS.contains(&name.as_str()) {
                while i < chars.len() && chars[i] == ' ' {
                    i += 1;
                }
                i = take_accented(&chars, i, &mut out);
            }
        } else {
            // `\&`, `\{` and friends: keep the escaped character.
            out.push(next);
            i += 1;
        }
    }
    out
}

/// Copies the accented base letter at `i`, which may be wrapped in braces.
fn take_accented(chars: &[char], i: usize, out: &mut String) -> usize {
    if chars.get(i) == Some(&'{') {
        if let (Some(&base), Some('}')) = (chars.get(i + 1), chars.get(i + 2)) {
            out.push(base);
            return i + 3;
        }
        return i;
    }
    if let Some(&base) = chars.get(i) {
        if base.is_alphabetic() {
            out.push(base);
            return i + 1;
        }
    }
    i
}

/// Lowercases, strips diacritics and maps ligature letters to ASCII pairs.
pub fn fold_diacritics(input: &str) -> String {
    let mut out = String::with_capacity(input.len());
    for c in input.to_lowercase().nfd() {
        if is_combining_mark(c) {
            continue;
        }
        match c {
            'ß' => out.push_str("ss"),
            'æ' => out.push_str("ae"),
            'œ' => out.push_str("oe"),
            'ø' => out.push('o'),
            'ł' => out.push('l'),
            'đ' => out.push('d'),
            'ð' => out.push('d'),
            'þ' => out.push_str("th"),
            'ı' => out.push('i'),
            _ => out.push(c),
        }
    }
    out
}

/// Normalizes an author name: escapes and diacritics folded, lowercase,
/// `Last, First` reordered to `first last`, whitespace collapsed.
pub fn normalize_author(raw: &str) -> Result<AuthorName, MetadataError> {
    let folded = fold_diacritics(&fold_latex(raw));
    let cleaned: String = folded
        .chars()
        .filter(|c| !matches!(c, '{' | '}' | '\\'))
        .map(|c| if c == '~' || c.is_whitespace() { ' ' } else { c })
        .collect();

    let parts: Vec<&str> = cleaned.split(',').map(str::trim).filter(|p| !p.is_empty()).collect();
    let ordered = match parts.as_slice() {
        [] => String::new(),
        [single] => (*single).to_owned(),
        [last, middle @ .., first] => {
            let mut words = vec![*first, *last];
            words.extend(middle.iter().copied());
            words.join(" ")
        }
    };
    let normalized = ordered.split_whitespace().collect::<Vec<_>>().join(" ");
    if normalized.is_empty() {
        return Err(MetadataError::EmptyName);
    }
    Ok(AuthorName { raw: raw.trim().to_owned(), normalized })
}

/// Splits a BibTeX `author` field on ` and ` and normalizes each name.
/// Empty names and `others` are dropped.
pub fn split_authors(field: &str) -> Vec<AuthorName> {
    let mut names = Vec::new();
    let mut rest = field;
    loop {
        let (name, tail) = match find_and(rest) {
            Some((start, end)) => (&rest[..start], Some(&rest[end..])),
            None => (rest, None),
        };
        if let Ok(author) = normalize_author(name) {
            if author.normalized != "others" {
                names.push(author);
            }
        }
        match tail {
            Some(t) => rest = t,
            None => break,
        }
    }
    names
}

/// Byte range of the first ` and ` separator at brace depth zero.
fn find_and(s: &str) -> Option<(usize, usize)> {
    let bytes = s.as_bytes();
    let mut depth = 0usize;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'{' => depth += 1,
            b'}' => depth = depth.saturating_sub(1),
            b if depth == 0 && b.is_ascii_whitespace() => {
                let word = i + 1;
                if bytes.len() >= word + 4
                    && bytes[word..word + 3].eq_ignore_ascii_case(b"and")
                    && bytes[word + 3].is_ascii_whitespace()
                {
                    return Some((i, word + 4));
                }
            }
            _ => {}
        }
        i += 1;
    }
    None
}
