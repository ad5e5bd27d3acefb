//! Context retrieval for RAG-enhanced extraction.
//!
//! The contract is deliberately small: index a corpus once, then ask
//! for the top-k passages for a query. The default implementation is
//! a token-frequency cosine scorer — fully deterministic and
//! dependency-free, so tests and demos never need a neural embedder.
//! A real vector store (or any other similarity machinery) can plug
//! in behind the same trait.

use std::collections::BTreeMap;

/// A similarity retriever over a fixed corpus.
///
/// `top_k` must be deterministic, return at most `k` items drawn from
/// the indexed corpus, and order them by non-increasing score.
pub trait Retriever: Send + Sync {
    fn top_k(&self, query: &str, k: usize) -> Vec<(String, f64)>;
}

/// Lowercased alphanumeric-run term frequencies.
fn term_frequencies(text: &str) -> BTreeMap<String, f64> {
    let mut counts: BTreeMap<String, f64> = BTreeMap::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            current.extend(c.to_lowercase());
        } else if !current.is_empty() {
            *counts.entry(std::mem::take(&mut current)).or_default() += 1.0;
        }
    }
    if !current.is_empty() {
        *counts.entry(current).or_default() += 1.0;
    }
    counts
}

fn norm(v: &BTreeMap<String, f64>) -> f64 {
    v.values().map(|x| x * x).sum::<f64>().sqrt()
}

fn cosine(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let dot: f64 = a
        .iter()
        .filter_map(|(term, x)| b.get(term).map(|y| x * y))
        .sum();
    let denominator = norm(a) * norm(b);
    if denominator == 0.0 {
        0.0
    } else {
        dot / denominator
    }
}

/// Deterministic bag-of-words cosine retriever.
pub struct TokenCosineRetriever {
    passages: Vec<(String, BTreeMap<String, f64>)>,
}

impl TokenCosineRetriever {
    /// Index a corpus of passages.
    pub fn index<I, S>(corpus: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let passages = corpus
            .into_iter()
            .map(|passage| {
                let passage = passage.into();
                let tf = term_frequencies(&passage);
                (passage, tf)
            })
            .collect();
        TokenCosineRetriever { passages }
    }
}

impl Retriever for TokenCosineRetriever {
    fn top_k(&self, query: &str, k: usize) -> Vec<(String, f64)> {
        let query_tf = term_frequencies(query);
        let mut scored: Vec<(usize, f64)> = self
            .passages
            .iter()
            .enumerate()
            .map(|(i, (_, tf))| (i, cosine(&query_tf, tf)))
            .filter(|(_, score)| *score > 0.0)
            .collect();
        // Ties break on corpus order, so results are reproducible.
        scored.sort_by(|(ia, sa), (ib, sb)| sb.total_cmp(sa).then(ia.cmp(ib)));
        scored
            .into_iter()
            .take(k)
            .map(|(i, score)| (self.passages[i].0.clone(), score))
            .collect()
    }
}
