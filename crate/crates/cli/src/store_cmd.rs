use std::fs;
use std::io::Write;
use std::path::Path;

use scitype_core::formats::parse_papers;
use scitype_core::metadata::{make_dedup_key, PaperExport};
use scitype_core::store::{import_state, Action, Actor, EditRequest, OntologyState, Store};
use scitype_core::TypeId;

use crate::error::CliError;

pub fn export(store: &Path, at: Option<u64>) -> Result<String, CliError> {
    let store = Store::open_read_only(store).map_err(CliError::failed)?;
    let state = store.state_at(at).map_err(CliError::failed)?;
    Ok(state.export_text())
}

/// Loads an exported state into a store, whose catalog is set from
/// `papers` first. Prints the resulting content hash.
pub fn import(store: &Path, export_file: &Path, papers: Option<&Path>) -> Result<String, CliError> {
    let text = fs::read_to_string(export_file).map_err(|e| CliError::io(export_file, e))?;
    let state = OntologyState::parse_export(&text).map_err(CliError::failed)?;
    let mut store = Store::open(store).map_err(CliError::failed)?;
    if let Some(p) = papers {
        let text = fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
        store.set_catalog(parse_papers(&text).map_err(CliError::failed)?).map_err(CliError::failed)?;
    }
    let appended = import_state(&mut store, &state).map_err(CliError::failed)?;
    println!("imported {appended} events, head {}", store.head());
    Ok(store.state().content_hash())
}

const LOOP_PAPERS: usize = 8;

fn loop_paper(i: usize) -> PaperExport {
    let title = format!("Append loop paper {i}");
    PaperExport {
        paper_id: format!("loop-{i}").into(),
        dedup_key: make_dedup_key(&title, None).expect("non-empty title"),
        kind: "misc".into(),
        fields: [("title".to_owned(), title)].into_iter().collect(),
        authors: Vec::new(),
        cited_paper_ids: Vec::new(),
        unresolved_refs: Vec::new(),
    }
}

/// Appends `count` type edits, printing `ack <revision>` once each one is on
/// disk. Used by the crash-recovery harness.
pub fn append_loop(dir: &Path, count: u64) -> Result<(), CliError> {
    let mut store = Store::open(dir).map_err(CliError::failed)?;
    if store.papers().is_empty() {
        store.set_catalog((0..LOOP_PAPERS).map(loop_paper).collect()).map_err(CliError::failed)?;
    }
    let stdout = std::io::stdout();
    for name in ["loop-a", "loop-b"] {
        if !store.state().types.contains_key(&TypeId::from(name)) {
            let action = Action::CreateType { type_id: name.into(), description: format!("{name} papers") };
            let rev = store
                .append(EditRequest { actor: Actor::Machine, expected_revision: store.head(), action })
                .map_err(CliError::failed)?;
            writeln!(stdout.lock(), "ack {rev}").map_err(|e| CliError::io("stdout", e))?;
        }
    }
    for i in 0..count {
        let head = store.head();
        let action = Action::SetType {
            paper_id: format!("loop-{}", head as usize % LOOP_PAPERS).into(),
            type_id: if head % 2 == 0 { "loop-a" } else { "loop-b" }.into(),
            confidence: (i % 1000) as f64 / 1000.0,
            suppressed: false,
        };
        let rev = store
            .append(EditRequest { actor: Actor::user("loop"), expected_revision: head, action })
            .map_err(CliError::failed)?;
        let mut out = stdout.lock();
        writeln!(out, "ack {rev}").and_then(|_| out.flush()).map_err(|e| CliError::io("stdout", e))?;
    }
    Ok(())
}
