//! Record framing: 4-byte big-endian payload length, payload, 4-byte
//! big-endian CRC32 of the payload.

use std::fs::{File, OpenOptions};
use std::io::{Read, Write};
use std::path::Path;

use super::{EditEvent, StoreError};

pub fn encode_record(payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(payload.len() + 8);
    out.extend_from_slice(&(payload.len() as u32).to_be_bytes());
    out.extend_from_slice(payload);
    out.extend_from_slice(&crc32fast::hash(payload).to_be_bytes());
    out
}

#[derive(Debug)]
pub struct DecodedLog {
    pub events: Vec<EditEvent>,
    /// CRC of each record, by position.
    pub crcs: Vec<u32>,
    /// Length of the well-formed prefix in bytes.
    pub valid_len: u64,
    /// Bytes after the last complete record (an interrupted append).
    pub torn_tail: u64,
}

/// Decodes a whole log. A trailing partial record is reported, not an error;
/// a complete record with a bad checksum, undecodable payload or out-of-order
/// revision is `CorruptLog` carrying the revision it should have had.
pub fn decode_log(bytes: &[u8]) -> Result<DecodedLog, StoreError> {
    let mut events = Vec::new();
    let mut crcs = Vec::new();
    let mut pos = 0usize;
    while pos < bytes.len() {
        let revision = events.len() as u64 + 1;
        let rest = &bytes[pos..];
        if rest.len() < 4 {
            break;
        }
        let len = u32::from_be_bytes(rest[..4].try_into().unwrap()) as usize;
        if rest.len() < len + 8 {
            break;
        }
        let payload = &rest[4..4 + len];
        let stored = u32::from_be_bytes(rest[4 + len..8 + len].try_into().unwrap());
        if crc32fast::hash(payload) != stored {
            return Err(StoreError::CorruptLog(revision));
        }
        let event: EditEvent = serde_json::from_slice(payload).map_err(|_| StoreError::CorruptLog(revision))?;
        if event.revision != revision {
            return Err(StoreError::CorruptLog(revision));
        }
        events.push(event);
        crcs.push(stored);
        pos += len + 8;
    }
    Ok(DecodedLog { events, crcs, valid_len: pos as u64, torn_tail: (bytes.len() - pos) as u64 })
}

pub fn read_log(path: &Path) -> Result<DecodedLog, StoreError> {
    let mut bytes = Vec::new();
    match File::open(path) {
        Ok(mut f) => {
            f.read_to_end(&mut bytes).map_err(|e| StoreError::io(path, e))?;
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
        Err(e) => return Err(StoreError::io(path, e)),
    }
    decode_log(&bytes)
}

/// Opens the log for appending, cutting off any torn tail first.
pub fn open_for_append(path: &Path, valid_len: u64) -> Result<File, StoreError> {
    let file = OpenOptions::new().create(true).read(true).write(true).truncate(false).open(path).map_err(|e| StoreError::io(path, e))?;
    let actual = file.metadata().map_err(|e| StoreError::io(path, e))?.len();
    if actual != valid_len {
        file.set_len(valid_len).map_err(|e| StoreError::io(path, e))?;
        file.sync_all().map_err(|e| StoreError::io(path, e))?;
    }
    Ok(file)
}

/// Writes one record and waits for it to reach the disk.
pub fn append_record(file: &mut File, path: &Path, event: &EditEvent) -> Result<u32, StoreError> {
    use std::io::{Seek, SeekFrom};
    let payload = serde_json::to_vec(event).expect("events serialize");
    let record = encode_record(&payload);
    file.seek(SeekFrom::End(0)).map_err(|e| StoreError::io(path, e))?;
    file.write_all(&record).map_err(|e| StoreError::io(path, e))?;
    file.sync_data().map_err(|e| StoreError::io(path, e))?;
    Ok(crc32fast::hash(&payload))
}
