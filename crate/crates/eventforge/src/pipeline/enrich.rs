//! Location enrichment and knowledge-context assembly.
//!
//! Coordinates are resolved by a cascade of sources tried strictly in
//! order — local gazetteer, then Wikidata, then DBpedia — stopping at
//! the first one that yields a coordinate pair. Network sources go
//! through the shared cache and per-endpoint rate limiters; the local
//! gazetteer never touches the network. Every attempted source is
//! recorded in an attempt log so tests can assert the order.
//!
//! ConceptNet is separate: it contributes related-term lines to the
//! prompt's retrieved-context block rather than coordinates.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use super::cache::{cached_query, CachedResponse, NoNetwork, QueryCache, QueryError, TokenBucket, Transport};
use super::config::ExtractionConfig;
use super::gazetteer::Gazetteer;

/// SPARQL / REST query templates; `{name}` is substituted.
const WIKIDATA_TEMPLATE: &str = include_str!("../../data/sparql/wikidata_coords.rq");
const DBPEDIA_TEMPLATE: &str = include_str!("../../data/sparql/dbpedia_coords.rq");
const CONCEPTNET_TEMPLATE: &str = include_str!("../../data/sparql/conceptnet_related.txt");

/// A resolved location: coordinates, optional administrative fields,
/// and which source supplied them.
#[derive(Debug, Clone, PartialEq)]
pub struct Enrichment {
    pub latitude: f64,
    pub longitude: f64,
    pub country: Option<String>,
    pub region: Option<String>,
    pub source: String,
}

/// Aggregate counters for one pipeline run.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct QueryStats {
    pub cache_hits: u64,
    /// Successful network fetches per endpoint name.
    pub network_calls: BTreeMap<String, u64>,
    /// Cache misses encountered while offline.
    pub offline_misses: u64,
    /// Queries that failed after retries (or offline misses).
    pub failed_queries: u64,
}

/// Shared access to every external knowledge source: the local
/// gazetteer plus rate-limited, cached endpoint clients.
pub struct KnowledgeClients {
    pub gazetteer: Gazetteer,
    cache: QueryCache,
    transport: Arc<dyn Transport>,
    limiters: BTreeMap<String, TokenBucket>,
    endpoints: BTreeMap<String, String>,
    offline: bool,
    stats: Mutex<QueryStats>,
    attempts: Mutex<Vec<String>>,
}

impl KnowledgeClients {
    /// Wire up clients for a config. The gazetteer comes from
    /// `lacrimalit_path` (builtin copy when the path is empty), and
    /// `transport` supplies the network layer — [`NoNetwork`] unless
    /// the caller has something better.
    pub fn from_config(
        config: &ExtractionConfig,
        transport: Arc<dyn Transport>,
        offline: bool,
    ) -> Result<Self, super::gazetteer::GazetteerError> {
        let gazetteer = if config.lacrimalit_path.is_empty() {
            Gazetteer::builtin()
        } else {
            Gazetteer::from_file(&config.lacrimalit_path)?
        };
        Ok(KnowledgeClients::new(config, gazetteer, transport, offline))
    }

    pub fn new(
        config: &ExtractionConfig,
        gazetteer: Gazetteer,
        transport: Arc<dyn Transport>,
        offline: bool,
    ) -> Self {
        let endpoints: BTreeMap<String, String> = [
            ("wikidata", config.endpoints.wikidata.clone()),
            ("dbpedia", config.endpoints.dbpedia.clone()),
            ("conceptnet", config.endpoints.conceptnet.clone()),
        ]
        .into_iter()
        .map(|(name, url)| (name.to_string(), url))
        .collect();
        let limiters = endpoints
            .keys()
            .map(|name| (name.clone(), TokenBucket::new(config.rate_limit_per_sec)))
            .collect();
        KnowledgeClients {
            gazetteer,
            cache: QueryCache::new(&config.cache_dir),
            transport,
            limiters,
            endpoints,
            offline,
            stats: Mutex::new(QueryStats::default()),
            attempts: Mutex::new(Vec::new()),
        }
    }

    /// A hermetic client set: builtin gazetteer, no network.
    pub fn offline_defaults(config: &ExtractionConfig) -> Self {
        KnowledgeClients::new(config, Gazetteer::builtin(), Arc::new(NoNetwork), false)
    }

    pub fn stats(&self) -> QueryStats {
        self.stats.lock().unwrap().clone()
    }

    /// Sources tried so far, in order ("lacrimalit", "wikidata", ...).
    pub fn attempts(&self) -> Vec<String> {
        self.attempts.lock().unwrap().clone()
    }

    fn record_attempt(&self, source: &str) {
        self.attempts.lock().unwrap().push(source.to_string());
    }

    /// One cached, rate-limited query against a named endpoint.
    pub fn query(&self, endpoint_name: &str, query: &str) -> Result<CachedResponse, QueryError> {
        let url = self
            .endpoints
            .get(endpoint_name)
            .expect("endpoint names are fixed at construction");
        let limiter = &self.limiters[endpoint_name];
        let result = cached_query(url, query, &self.cache, limiter, &*self.transport, self.offline);
        let mut stats = self.stats.lock().unwrap();
        match &result {
            Ok(response) if response.from_cache => stats.cache_hits += 1,
            Ok(_) => *stats.network_calls.entry(endpoint_name.to_string()).or_default() += 1,
            Err(QueryError::OfflineMiss { .. }) => {
                stats.offline_misses += 1;
                stats.failed_queries += 1;
            }
            Err(_) => stats.failed_queries += 1,
        }
        result
    }
}

// ===== Response parsing =====

/// `"Point(lon lat)"` (WKT, longitude first) -> (lat, lon).
fn parse_wkt_point(value: &str) -> Option<(f64, f64)> {
    let inner = value.trim().strip_prefix("Point(")?.strip_suffix(')')?;
    let mut parts = inner.split_whitespace();
    let lon: f64 = parts.next()?.parse().ok()?;
    let lat: f64 = parts.next()?.parse().ok()?;
    Some((lat, lon))
}

fn parse_wikidata_coords(body: &str) -> Option<(f64, f64)> {
    let v: serde_json::Value = serde_json::from_str(body).ok()?;
    let value = v["results"]["bindings"][0]["coord"]["value"].as_str()?;
    parse_wkt_point(value)
}

fn json_number(v: &serde_json::Value) -> Option<f64> {
    v.as_f64().or_else(|| v.as_str()?.parse().ok())
}

fn parse_dbpedia_coords(body: &str) -> Option<(f64, f64)> {
    let v: serde_json::Value = serde_json::from_str(body).ok()?;
    let binding = &v["results"]["bindings"][0];
    let lat = json_number(&binding["lat"]["value"])?;
    let lon = json_number(&binding["long"]["value"])?;
    Some((lat, lon))
}

fn parse_conceptnet_terms(body: &str) -> Vec<String> {
    let Ok(v) = serde_json::from_str::<serde_json::Value>(body) else {
        return Vec::new();
    };
    let mut terms = Vec::new();
    if let Some(edges) = v["edges"].as_array() {
        for edge in edges {
            if let Some(label) = edge["end"]["label"].as_str() {
                let label = label.to_string();
                if !terms.contains(&label) {
                    terms.push(label);
                }
            }
        }
    }
    terms.truncate(5);
    terms
}

fn plausible(lat: f64, lon: f64) -> bool {
    lat.is_finite() && lon.is_finite() && (-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon)
}

/// Escape a name for embedding in a quoted SPARQL literal.
fn sparql_escape(name: &str) -> String {
    name.replace('\\', "\\\\").replace('"', "\\\"")
}

// ===== The cascade =====

/// Resolve coordinates for a place name.
///
/// Tries lacrimalit → wikidata → dbpedia, returning the first hit;
/// `None` when every source fails (the caller keeps the textual
/// location and leaves coordinates unset).
pub fn enrich_location(
    name: &str,
    _config: &ExtractionConfig,
    clients: &KnowledgeClients,
) -> Option<Enrichment> {
    if name.trim().is_empty() {
        return None;
    }

    clients.record_attempt("lacrimalit");
    if let Some(place) = clients.gazetteer.lookup(name) {
        return Some(Enrichment {
            latitude: place.latitude,
            longitude: place.longitude,
            country: Some(place.country.clone()).filter(|s| !s.is_empty()),
            region: Some(place.region.clone()).filter(|s| !s.is_empty()),
            source: "lacrimalit".to_string(),
        });
    }

    clients.record_attempt("wikidata");
    let query = WIKIDATA_TEMPLATE.replace("{name}", &sparql_escape(name));
    if let Ok(response) = clients.query("wikidata", &query) {
        if let Some((lat, lon)) = parse_wikidata_coords(&response.body) {
            if plausible(lat, lon) {
                return Some(Enrichment {
                    latitude: lat,
                    longitude: lon,
                    country: None,
                    region: None,
                    source: "wikidata".to_string(),
                });
            }
        }
    }

    clients.record_attempt("dbpedia");
    let query = DBPEDIA_TEMPLATE.replace("{name}", &sparql_escape(name));
    if let Ok(response) = clients.query("dbpedia", &query) {
        if let Some((lat, lon)) = parse_dbpedia_coords(&response.body) {
            if plausible(lat, lon) {
                return Some(Enrichment {
                    latitude: lat,
                    longitude: lon,
                    country: None,
                    region: None,
                    source: "dbpedia".to_string(),
                });
            }
        }
    }

    None
}

/// Fold ConceptNet related terms for the first few entities into a
/// knowledge-context block (one `name: term, term` line per entity).
/// Entities whose queries fail are skipped; `None` when nothing came
/// back.
pub fn conceptnet_context(entities: &[String], clients: &KnowledgeClients) -> Option<String> {
    let mut lines = Vec::new();
    for entity in entities.iter().take(3) {
        let slug: String = entity
            .to_lowercase()
            .chars()
            .map(|c| if c.is_alphanumeric() { c } else { '_' })
            .collect();
        let query = CONCEPTNET_TEMPLATE
            .lines()
            .find(|line| !line.trim_start().starts_with('#') && !line.trim().is_empty())
            .unwrap_or_default()
            .replace("{name}", &slug);
        let Ok(response) = clients.query("conceptnet", &query) else {
            continue;
        };
        let terms = parse_conceptnet_terms(&response.body);
        if !terms.is_empty() {
            lines.push(format!("{}: {}", entity, terms.join(", ")));
        }
    }
    if lines.is_empty() {
        None
    } else {
        Some(lines.join("\n"))
    }
}
