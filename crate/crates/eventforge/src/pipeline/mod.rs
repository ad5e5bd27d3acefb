//! The extraction pipeline: document in, event graph out.
//!
//! A run walks the document chunk by chunk — spot names, assemble
//! context (mode-dependent), build the prompt, call the backend,
//! parse its answer with the recovering Turtle parser — then merges
//! every surviving triple into one graph and finishes with location
//! enrichment. One bad chunk never aborts a document: backend
//! failures and parse errors are recorded per chunk in the
//! [`RunReport`] and the rest of the run continues.
//!
//! Mode rules are strict. `Base` performs zero network and zero
//! enrichment work — the whole run is local. `KnowledgeEnhanced` adds
//! cached knowledge-graph queries and the enrichment cascade.
//! `RagEnhanced` additionally requires a [`Retriever`] and prepends
//! retrieved passages to the prompt context.

pub mod backend;
pub mod cache;
pub mod chunk;
pub mod config;
pub mod enrich;
pub mod gazetteer;
pub mod prompt;
pub mod retrieve;
pub mod spot;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::event::{EventGraph, DEFAULT_EVENT_NS, DEFAULT_EVENT_PREFIX};
use crate::turtle::{parse_turtle_recovering, Document, Name, XSD_NS};

pub use backend::{BackendError, LlmBackend, MockBackend, ScriptedBackend};
pub use cache::{cached_query, cache_key, NoNetwork, QueryCache, QueryError, StaticTransport, TokenBucket, Transport};
pub use chunk::{chunk_text, reconstruct, Chunk, ChunkError};
pub use config::{ConfigError, Endpoints, ExtractionConfig, Mode};
pub use enrich::{conceptnet_context, enrich_location, Enrichment, KnowledgeClients, QueryStats};
pub use gazetteer::{Gazetteer, GazetteerError, Place};
pub use prompt::build_prompt;
pub use retrieve::{Retriever, TokenCosineRetriever};
pub use spot::spot_entities;

// ===== Reports =====

/// What happened to one chunk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChunkReport {
    pub index: usize,
    /// Typed subjects parsed out of this chunk's response.
    pub events: usize,
    pub parse_errors: Vec<String>,
    /// Backend failure, if the chunk never produced a response.
    pub backend_error: Option<String>,
}

/// Run-level accounting: per-chunk outcomes plus query statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub mode: String,
    pub backend: String,
    pub chunk_count: usize,
    pub event_count: usize,
    pub parse_error_count: usize,
    pub failed_chunks: usize,
    pub chunks: Vec<ChunkReport>,
    pub stats: QueryStats,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Chunking(#[from] ChunkError),
    #[error("rag-enhanced mode requires a retriever")]
    RetrieverRequired,
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Gazetteer(#[from] GazetteerError),
}

// ===== Helpers =====

/// Model responses usually omit prefix declarations (the prompt's
/// OUTPUT FORMAT shows bare prefixed names), so the canonical ste/xsd
/// bindings are prepended unless the response declares its own.
fn ensure_prefixes(body: &str) -> String {
    if body.contains("@prefix") {
        body.to_string()
    } else {
        format!(
            "@prefix {}: <{}> .\n@prefix xsd: <{}> .\n\n{}",
            DEFAULT_EVENT_PREFIX, DEFAULT_EVENT_NS, XSD_NS, body
        )
    }
}

fn count_typed_subjects(doc: &Document) -> usize {
    let rdf_type = Name::rdf_type();
    doc.triples
        .iter()
        .filter(|t| t.predicate == rdf_type)
        .map(|t| &t.subject)
        .collect::<BTreeSet<_>>()
        .len()
}

// ===== The pipeline =====

/// Run extraction over a whole document.
///
/// The returned graph merges every chunk's surviving events (the
/// collector runs in chunk order, so output is deterministic for a
/// deterministic backend); the report carries per-chunk errors and
/// the query statistics accumulated in `clients`.
pub fn run_pipeline(
    doc: &str,
    config: &ExtractionConfig,
    backend: &dyn LlmBackend,
    retriever: Option<&dyn Retriever>,
    clients: &KnowledgeClients,
) -> Result<(EventGraph, RunReport), PipelineError> {
    config.validate()?;
    if matches!(config.mode, Mode::RagEnhanced { .. }) && retriever.is_none() {
        return Err(PipelineError::RetrieverRequired);
    }

    let mut chunks = chunk_text(doc, config)?;
    let mut merged = Document::new();
    let mut chunk_reports = Vec::with_capacity(chunks.len());

    for chunk in &mut chunks {
        let (entities, locations) = spot_entities(chunk, &clients.gazetteer);
        chunk.entities = entities;
        chunk.locations = locations;

        let context = match &config.mode {
            Mode::Base => None,
            Mode::KnowledgeEnhanced => conceptnet_context(&chunk.entities, clients),
            Mode::RagEnhanced { k } => {
                let passages: Vec<String> = retriever
                    .expect("checked above")
                    .top_k(&chunk.text, *k)
                    .into_iter()
                    .map(|(passage, _)| passage)
                    .collect();
                let mut parts = Vec::new();
                if !passages.is_empty() {
                    parts.push(passages.join("\n"));
                }
                if let Some(knowledge) = conceptnet_context(&chunk.entities, clients) {
                    parts.push(knowledge);
                }
                if parts.is_empty() {
                    None
                } else {
                    Some(parts.join("\n\n"))
                }
            }
        };

        let prompt = build_prompt(chunk, context.as_deref());
        let response = match backend.complete(&prompt) {
            Ok(response) => response,
            Err(error) => {
                log::warn!("chunk {} backend failure: {}", chunk.index, error);
                chunk_reports.push(ChunkReport {
                    index: chunk.index,
                    events: 0,
                    parse_errors: Vec::new(),
                    backend_error: Some(error.to_string()),
                });
                continue;
            }
        };

        let (parsed, errors) = parse_turtle_recovering(&ensure_prefixes(&response));
        chunk_reports.push(ChunkReport {
            index: chunk.index,
            events: count_typed_subjects(&parsed),
            parse_errors: errors.iter().map(ToString::to_string).collect(),
            backend_error: None,
        });
        merged.prefixes.extend(parsed.prefixes);
        merged.triples.extend(parsed.triples);
    }

    let mut graph = EventGraph::from_document(&merged);

    // Location enrichment: knowledge modes only, and only where the
    // model left coordinates unset.
    if config.mode.uses_knowledge() {
        for event in &mut graph.events {
            if event.latitude.is_some() && event.longitude.is_some() {
                continue;
            }
            let Some(name) = event.location.clone() else {
                continue;
            };
            if let Some(found) = enrich_location(&name, config, clients) {
                event.latitude = Some(found.latitude);
                event.longitude = Some(found.longitude);
                if event.country.is_none() {
                    event.country = found.country;
                }
                if event.region.is_none() {
                    event.region = found.region;
                }
                event.location_source = Some(found.source);
            }
        }
    }

    let report = RunReport {
        mode: config.mode.label(),
        backend: backend.name().to_string(),
        chunk_count: chunks.len(),
        event_count: graph.events.len(),
        parse_error_count: chunk_reports.iter().map(|c| c.parse_errors.len()).sum(),
        failed_chunks: chunk_reports
            .iter()
            .filter(|c| c.backend_error.is_some())
            .count(),
        chunks: chunk_reports,
        stats: clients.stats(),
    };
    Ok((graph, report))
}
