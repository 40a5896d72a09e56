//! `manifest.tsv`: one `stage, input_hash, output_hash, duration_ms` row
//! per pipeline stage, in stage order, no header.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::pipeline::Stage;

pub const MANIFEST_FILE: &str = "manifest.tsv";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestLine {
    pub stage: Stage,
    pub input_hash: String,
    pub output_hash: String,
    pub duration_ms: u128,
}

/// Hash over labelled byte strings; labels keep `("ab", "c")` apart from
/// `("a", "bc")`.
#[derive(Default)]
pub struct HashBuilder(Sha256);

impl HashBuilder {
    pub fn part(&mut self, label: &str, bytes: &[u8]) -> &mut Self {
        self.0.update((label.len() as u64).to_be_bytes());
        self.0.update(label.as_bytes());
        self.0.update((bytes.len() as u64).to_be_bytes());
        self.0.update(bytes);
        self
    }

    pub fn finish(&mut self) -> String {
        hex::encode(std::mem::take(&mut self.0).finalize())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Output hash of a file-producing stage: SHA-256 over `name\tsha256(file)\n`
/// rows in the given order.
pub fn files_hash(dir: &Path, names: &[&str]) -> Option<String> {
    let mut listing = String::new();
    for name in names {
        let bytes = fs::read(dir.join(name)).ok()?;
        listing.push_str(&format!("{name}\t{}\n", sha256_hex(&bytes)));
    }
    Some(sha256_hex(listing.as_bytes()))
}

pub fn read_manifest(dir: &Path) -> BTreeMap<Stage, ManifestLine> {
    let Ok(text) = fs::read_to_string(dir.join(MANIFEST_FILE)) else { return BTreeMap::new() };
    text.lines()
        .filter_map(|line| {
            let cols: Vec<&str> = line.split('\t').collect();
            let [stage, input, output, ms] = cols.as_slice() else { return None };
            let stage: Stage = stage.parse().ok()?;
            Some((
                stage,
                ManifestLine {
                    stage,
                    input_hash: (*input).to_owned(),
                    output_hash: (*output).to_owned(),
                    duration_ms: ms.parse().ok()?,
                },
            ))
        })
        .collect()
}

pub fn write_manifest(dir: &Path, lines: &BTreeMap<Stage, ManifestLine>) -> Result<(), CliError> {
    let mut text = String::new();
    for l in lines.values() {
        text.push_str(&format!("{}\t{}\t{}\t{}\n", l.stage, l.input_hash, l.output_hash, l.duration_ms));
    }
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, text).map_err(|e| CliError::io(path, e))
}
