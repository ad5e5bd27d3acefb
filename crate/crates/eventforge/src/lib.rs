//! eventforge: a toolkit for historical-event knowledge bases.
//!
//! The crate reads and writes a compact Turtle dialect, lifts triples
//! into typed event records, normalizes BC/AD time expressions, checks
//! ontology classes for coherence, derives causal relations, extracts
//! events from narrative text through a retrieval-augmented pipeline,
//! scores the resulting knowledge bases, and translates them into Coq
//! developments whose theorems are checked by computation.

pub mod causal;
pub mod coqgen;
pub mod event;
pub mod geo;
pub mod metrics;
pub mod ontology;
pub mod pipeline;
pub mod temporal;
pub mod turtle;
