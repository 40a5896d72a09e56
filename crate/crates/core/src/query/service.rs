//! Transport-independent request handling. An HTTP adapter maps requests onto
//! [`ApiRequest`] and writes back the [`ApiResponse`].

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, RwLock};

use percent_encoding::percent_decode_str;
use serde::Deserialize;
use serde_json::{json, Value};

use super::{low_confidence_queue, Candidate, Catalog, QueryError, QueueFilter, Retrainer};
use crate::store::{Action, EditEvent, EditRequest, OntologyState, Store, StoreError};
use crate::{PaperId, TypeId};

pub const DEFAULT_LIMIT: usize = 100;
/// Per-paper type similarities, one JSON object per line.
pub const CANDIDATES_FILE: &str = "candidates.jsonl";
/// Concepts and cover edges of the lattice.
pub const LATTICE_FILE: &str = "lattice.json";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Method {
    Get,
    Post,
    Other(String),
}

impl Method {
    pub fn parse(s: &str) -> Self {
        match s.to_ascii_uppercase().as_str() {
            "GET" => Self::Get,
            "POST" => Self::Post,
            other => Self::Other(other.to_owned()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ApiRequest {
    pub method: Method,
    /// Path without the query string, still percent-encoded.
    pub path: String,
    /// Raw query string without the leading `?`.
    pub query: String,
    pub body: Vec<u8>,
}

impl ApiRequest {
    pub fn get(path_and_query: &str) -> Self {
        let (path, query) = path_and_query.split_once('?').unwrap_or((path_and_query, ""));
        Self { method: Method::Get, path: path.into(), query: query.into(), body: Vec::new() }
    }

    pub fn post(path: &str, body: impl Into<Vec<u8>>) -> Self {
        Self { method: Method::Post, path: path.into(), query: String::new(), body: body.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Json(Value),
    Text(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiResponse {
    pub status: u16,
    pub body: Body,
}

impl ApiResponse {
    fn ok(v: Value) -> Self {
        Self { status: 200, body: Body::Json(v) }
    }

    fn error(status: u16, kind: &str, message: impl std::fmt::Display) -> Self {
        Self { status, body: Body::Json(json!({ "error": kind, "message": message.to_string() })) }
    }

    fn not_found(message: impl std::fmt::Display) -> Self {
        Self::error(404, "not_found", message)
    }

    fn bad_request(message: impl std::fmt::Display) -> Self {
        Self::error(400, "bad_request", message)
    }

    pub fn json(&self) -> Option<&Value> {
        match &self.body {
            Body::Json(v) => Some(v),
            Body::Text(_) => None,
        }
    }
}

#[derive(Deserialize)]
struct CandidateLine {
    paper_id: PaperId,
    candidates: Vec<Candidate>,
}

/// Parses `candidates.jsonl` content.
pub fn parse_candidates(text: &str) -> Result<BTreeMap<PaperId, Vec<Candidate>>, String> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let parsed: CandidateLine = serde_json::from_str(line).map_err(|e| format!("line {}: {e}", i + 1))?;
        out.insert(parsed.paper_id, parsed.candidates);
    }
    Ok(out)
}

/// Serializes candidates in the `candidates.jsonl` layout.
pub fn candidates_text(candidates: &BTreeMap<PaperId, Vec<Candidate>>) -> String {
    let mut out = String::new();
    for (paper_id, c) in candidates {
        out.push_str(&json!({ "paper_id": paper_id, "candidates": c }).to_string());
        out.push('\n');
    }
    out
}

/// The service: one writer behind a mutex, readers work from the latest
/// published state and never wait for an append in progress.
pub struct Service {
    writer: Mutex<Store>,
    view: RwLock<Arc<OntologyState>>,
    catalog: Catalog,
    candidates: BTreeMap<PaperId, Vec<Candidate>>,
    lattice: Option<Value>,
    retrainer: Option<Retrainer>,
}

struct Page {
    offset: usize,
    limit: usize,
}

type Params = BTreeMap<String, String>;

impl Service {
    /// Wraps an opened store, picking up the candidate and lattice sidecar
    /// files from the store directory when present.
    pub fn new(store: Store) -> Result<Self, String> {
        let dir = store.dir().to_owned();
        let candidates = match std::fs::read_to_string(dir.join(CANDIDATES_FILE)) {
            Ok(text) => parse_candidates(&text).map_err(|e| format!("{CANDIDATES_FILE}: {e}"))?,
            Err(_) => BTreeMap::new(),
        };
        let lattice = match std::fs::read_to_string(dir.join(LATTICE_FILE)) {
            Ok(text) => Some(serde_json::from_str(&text).map_err(|e| format!("{LATTICE_FILE}: {e}"))?),
            Err(_) => None,
        };
        let catalog = Catalog::from_exports(store.papers().iter().cloned());
        Ok(Self {
            view: RwLock::new(store.published()),
            writer: Mutex::new(store),
            catalog,
            candidates,
            lattice,
            retrainer: None,
        })
    }

    pub fn with_retrainer(mut self, retrainer: Retrainer) -> Self {
        self.retrainer = Some(retrainer);
        self
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn state(&self) -> Arc<OntologyState> {
        Arc::clone(&self.view.read().expect("view lock"))
    }

    pub fn handle(&self, req: &ApiRequest) -> ApiResponse {
        let segments: Vec<String> = req
            .path
            .split('/')
            .filter(|s| !s.is_empty())
            .map(|s| percent_decode_str(s).decode_utf8_lossy().into_owned())
            .collect();
        let params: Params = form_urlencoded::parse(req.query.as_bytes()).into_owned().collect();
        let seg: Vec<&str> = segments.iter().map(String::as_str).collect();

        let get = req.method == Method::Get;
        let post = req.method == Method::Post;
        let route = match seg.as_slice() {
            ["papers", id] if get => self.paper(id),
            ["types"] if get => self.types(&params),
            ["types", id, "papers"] if get => self.type_papers(id, &params),
            ["types", id, "authors"] if get => self.type_authors(id, &params),
            ["queue", "low-confidence"] if get => self.queue(&params),
            ["stats", "h-index", author] if get => self.h_index(author),
            ["stats", "citation-age"] if get => Ok(ApiResponse::ok(json!(self.catalog.citation_age_profile()))),
            ["stats", "report"] if get => Ok(ApiResponse::ok(json!(self.catalog.report()))),
            ["lattice"] if get => Ok(match &self.lattice {
                Some(l) => ApiResponse::ok(l.clone()),
                None => ApiResponse::not_found("no lattice has been loaded"),
            }),
            ["revisions"] if get => self.revisions(&params),
            ["export"] if get => self.export(&params),
            ["edits"] if post => Ok(self.edit(&req.body)),
            ["retrain"] if post => Ok(self.retrain()),
            ["papers", _]
            | ["types"]
            | ["types", _, "papers" | "authors"]
            | ["queue", "low-confidence"]
            | ["stats", "h-index", _]
            | ["stats", "citation-age" | "report"]
            | ["lattice" | "revisions" | "export" | "edits" | "retrain"] => {
                Ok(ApiResponse::error(405, "method_not_allowed", format!("{:?} not allowed on {}", req.method, req.path)))
            }
            _ => Ok(ApiResponse::not_found(format!("no route for {}", req.path))),
        };
        route.unwrap_or_else(|e| e)
    }

    fn page(params: &Params) -> Result<Page, ApiResponse> {
        let num = |key: &str, default: usize| match params.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| ApiResponse::bad_request(format!("{key} must be a non-negative integer"))),
        };
        Ok(Page { offset: num("offset", 0)?, limit: num("limit", DEFAULT_LIMIT)? })
    }

    fn paged<T: serde::Serialize>(items: Vec<T>, page: &Page) -> ApiResponse {
        let total = items.len();
        let slice: Vec<T> = items.into_iter().skip(page.offset).take(page.limit).collect();
        ApiResponse::ok(json!({ "items": slice, "total": total, "offset": page.offset, "limit": page.limit }))
    }

    fn known_type(state: &OntologyState, id: &str) -> Result<TypeId, ApiResponse> {
        let t = TypeId::from(id);
        if state.types.contains_key(&t) {
            Ok(t)
        } else {
            Err(ApiResponse::not_found(format!("unknown type {id}")))
        }
    }

    fn paper(&self, id: &str) -> Result<ApiResponse, ApiResponse> {
        let pid = PaperId::from(id);
        let record = self.catalog.get(&pid).ok_or_else(|| ApiResponse::not_found(format!("unknown paper {id}")))?;
        let state = self.state();
        Ok(ApiResponse::ok(json!({
            "paper_id": pid,
            "title": record.title(),
            "year": record.year(),
            "authors": record.authors.iter().map(|a| &a.normalized).collect::<Vec<_>>(),
            "abstract": record.abstract_text,
            "cited_paper_ids": record.cited_paper_ids,
            "cited_by_count": self.catalog.citation_count(&pid),
            "assignment": state.assignments.get(&pid),
            "candidates": self.candidates.get(&pid),
            "head_revision": state.head_revision,
        })))
    }

    fn types(&self, params: &Params) -> Result<ApiResponse, ApiResponse> {
        let page = Self::page(params)?;
        let state = self.state();
        let mut counts: BTreeMap<&TypeId, usize> = BTreeMap::new();
        for a in state.assignments.values() {
            *counts.entry(&a.type_id).or_insert(0) += 1;
        }
        let items: Vec<Value> = state
            .types
            .values()
            .map(|t| json!({
                "type_id": t.type_id,
                "description": t.description,
                "paper_count": counts.get(&t.type_id).copied().unwrap_or(0),
            }))
            .collect();
        Ok(Self::paged(items, &page))
    }

    fn type_papers(&self, id: &str, params: &Params) -> Result<ApiResponse, ApiResponse> {
        let page = Self::page(params)?;
        let state = self.state();
        let t = Self::known_type(&state, id)?;
        let items: Vec<_> = state.assignments.values().filter(|a| a.type_id == t).collect();
        Ok(Self::paged(items, &page))
    }

    fn type_authors(&self, id: &str, params: &Params) -> Result<ApiResponse, ApiResponse> {
        let page = Self::page(params)?;
        let state = self.state();
        let t = Self::known_type(&state, id)?;
        let items = self.catalog.authors_with_material(&state, &t).map_err(|e| ApiResponse::not_found(e))?;
        Ok(Self::paged(items, &page))
    }

    fn queue(&self, params: &Params) -> Result<ApiResponse, ApiResponse> {
        let page = Self::page(params)?;
        let state = self.state();
        let type_id = match params.get("type") {
            Some(t) => Some(Self::known_type(&state, t)?),
            None => None,
        };
        let max_confidence = match params.get("max_confidence") {
            Some(v) => Some(v.parse::<f64>().map_err(|_| ApiResponse::bad_request("max_confidence must be a number"))?),
            None => None,
        };
        let items = low_confidence_queue(&state, &self.catalog, &self.candidates, &QueueFilter { type_id, max_confidence });
        Ok(Self::paged(items, &page))
    }

    fn h_index(&self, author: &str) -> Result<ApiResponse, ApiResponse> {
        let h = self.catalog.h_index(author).map_err(|e| ApiResponse::not_found(e))?;
        let papers = self.catalog.author_papers(author).map_err(|e| ApiResponse::not_found(e))?;
        Ok(ApiResponse::ok(json!({ "author": author, "h_index": h, "papers": papers.len() })))
    }

    fn revisions(&self, params: &Params) -> Result<ApiResponse, ApiResponse> {
        let page = Self::page(params)?;
        let from: u64 = match params.get("from") {
            Some(v) => v.parse().map_err(|_| ApiResponse::bad_request("from must be a revision number"))?,
            None => 1,
        };
        let paper = params.get("paper").map(|p| PaperId::from(p.as_str()));
        let store = self.writer.lock().expect("store lock");
        let events = store.events();
        let touches = |e: &EditEvent, p: &PaperId| -> bool {
            fn direct(a: &Action, p: &PaperId) -> bool {
                match a {
                    Action::SetType { paper_id, .. } => paper_id == p,
                    Action::SetCitationType { from_paper_id, to_paper_id, .. } => from_paper_id == p || to_paper_id == p,
                    _ => false,
                }
            }
            let mut action = &e.action;
            // Follow revert chains back to the edit they undo.
            while let Action::Revert { target } = action {
                match events.get(*target as usize - 1) {
                    Some(t) => action = &t.action,
                    None => return false,
                }
            }
            direct(action, p)
        };
        let items: Vec<&EditEvent> = events
            .iter()
            .filter(|e| e.revision >= from)
            .filter(|e| paper.as_ref().is_none_or(|p| touches(e, p)))
            .collect();
        Ok(Self::paged(items, &page))
    }

    fn export(&self, params: &Params) -> Result<ApiResponse, ApiResponse> {
        let at = match params.get("at") {
            Some(v) => Some(v.parse::<u64>().map_err(|_| ApiResponse::bad_request("at must be a revision number"))?),
            None => None,
        };
        let state = match at {
            None => self.state().as_ref().clone(),
            Some(r) => self.writer.lock().expect("store lock").state_at(Some(r)).map_err(store_error)?,
        };
        Ok(ApiResponse { status: 200, body: Body::Text(state.export_text()) })
    }

    fn edit(&self, body: &[u8]) -> ApiResponse {
        let request: EditRequest = match serde_json::from_slice(body) {
            Ok(r) => r,
            Err(e) => return ApiResponse::bad_request(format!("edit body: {e}")),
        };
        let mut store = self.writer.lock().expect("store lock");
        match store.append(request) {
            Ok(revision) => {
                self.publish(&store);
                ApiResponse::ok(json!({ "revision": revision, "head_revision": revision }))
            }
            Err(e) => store_error(e),
        }
    }

    fn retrain(&self) -> ApiResponse {
        let Some(retrainer) = &self.retrainer else {
            return ApiResponse::not_found("retraining is not configured for this service");
        };
        let mut store = self.writer.lock().expect("store lock");
        let result = retrainer.run(&mut store);
        self.publish(&store);
        match result {
            Ok(outcome) => ApiResponse::ok(json!(outcome)),
            Err(QueryError::Store(e)) => store_error(e),
            Err(e) => ApiResponse::error(422, "retrain_failed", e),
        }
    }

    fn publish(&self, store: &Store) {
        *self.view.write().expect("view lock") = store.published();
    }
}

fn store_error(e: StoreError) -> ApiResponse {
    match e {
        StoreError::Conflict { expected, head } => ApiResponse {
            status: 409,
            body: Body::Json(json!({
                "error": "conflict",
                "message": format!("expected revision {expected} but head is {head}; re-read and retry"),
                "head_revision": head,
            })),
        },
        StoreError::InvalidEdit(m) => ApiResponse::error(400, "invalid_edit", m),
        StoreError::RevisionOutOfRange { .. } => ApiResponse::bad_request(e),
        other => ApiResponse::error(500, "store_error", other),
    }
}
