//! Python bindings for the eventforge core.
//!
//! Design notes:
//!
//! - Every Python object owns an independent clone of the underlying
//!   Rust value. Nothing is shared across the boundary, so there is no
//!   aliasing to reason about and the GIL story stays trivial.
//! - The bindings never touch the network. `extract` runs with the
//!   no-network transport and the offline flag set, exactly like the
//!   CLI under `EVENTFORGE_OFFLINE=1`: knowledge and RAG modes enrich
//!   from the built-in gazetteer and any previously warmed cache, and
//!   cache misses are counted in the run report rather than fetched.
//! - Errors cross the boundary as `ValueError` (bad input, failed
//!   emission) or `IOError` (filesystem), carrying the Rust error's
//!   display text.

use std::path::PathBuf;
use std::sync::Arc;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use eventforge::causal::{self, CausalConfig};
use eventforge::coqgen;
use eventforge::event as ev;
use eventforge::geo;
use eventforge::metrics;
use eventforge::ontology::{validate_graph, ValidationConfig};
use eventforge::pipeline::{
    run_pipeline, ExtractionConfig, KnowledgeClients, MockBackend, Mode, NoNetwork, Retriever,
    TokenCosineRetriever,
};
use eventforge::temporal;

// ===== Events =====

/// One historical event with its ten-property schema.
#[pyclass(module = "eventforge_py", name = "Event", skip_from_py_object)]
#[derive(Clone)]
pub struct PyEvent {
    inner: ev::Event,
}

#[pymethods]
impl PyEvent {
    #[getter]
    fn id(&self) -> String {
        self.inner.id.clone()
    }

    /// Class local names, in document order; these match the class
    /// names reported by `EventGraph.validate`.
    #[getter]
    fn classes(&self) -> Vec<String> {
        self.inner
            .classes
            .iter()
            .map(|c| c.local_text().to_string())
            .collect()
    }

    #[getter]
    fn event_type(&self) -> Option<String> {
        self.inner.event_type.clone()
    }

    #[getter]
    fn agent(&self) -> Option<String> {
        self.inner.agent.clone()
    }

    /// The time literal as written in the source.
    #[getter]
    fn time_raw(&self) -> Option<String> {
        self.inner.time_raw.clone()
    }

    /// Normalized time, rendered for display; None when the raw text
    /// did not normalize.
    #[getter]
    fn time(&self) -> Option<String> {
        self.inner.time.as_ref().map(|t| t.to_string())
    }

    #[getter]
    fn location(&self) -> Option<String> {
        self.inner.location.clone()
    }

    #[getter]
    fn latitude(&self) -> Option<f64> {
        self.inner.latitude
    }

    #[getter]
    fn longitude(&self) -> Option<f64> {
        self.inner.longitude
    }

    #[getter]
    fn country(&self) -> Option<String> {
        self.inner.country.clone()
    }

    #[getter]
    fn region(&self) -> Option<String> {
        self.inner.region.clone()
    }

    #[getter]
    fn location_source(&self) -> Option<String> {
        self.inner.location_source.clone()
    }

    #[getter]
    fn result(&self) -> Option<String> {
        self.inner.result.clone()
    }

    /// Fraction of the ten schema properties that are present.
    fn completeness(&self) -> f64 {
        self.inner.completeness()
    }

    /// Start year of the normalized time (negative for BC).
    fn year(&self) -> Option<i32> {
        self.inner.time.as_ref().and_then(|t| t.start_year())
    }

    /// True when the event is dated and starts before year zero.
    fn is_bc(&self) -> bool {
        temporal::is_bc_event(&self.inner)
    }

    /// Property local names outside the ten-property schema.
    fn extra_keys(&self) -> Vec<String> {
        self.inner.extras.keys().cloned().collect()
    }

    /// Objects recorded under an extra property, rendered as text.
    fn extra_values(&self, key: &str) -> Vec<String> {
        self.inner
            .extras
            .get(key)
            .map(|(_, objects)| objects.iter().map(|o| o.to_string()).collect())
            .unwrap_or_default()
    }

    fn __repr__(&self) -> String {
        format!(
            "Event(id={:?}, completeness={:.1})",
            self.inner.id,
            self.inner.completeness()
        )
    }
}

// ===== Validation and metrics reports =====

/// Verdict for one event class found in a graph.
#[pyclass(module = "eventforge_py", name = "ClassAssessment", skip_from_py_object)]
#[derive(Clone)]
pub struct PyClassAssessment {
    /// Class local name.
    #[pyo3(get)]
    pub class_name: String,
    /// "standard", "discovered-valid", or "suspect".
    #[pyo3(get)]
    pub verdict: String,
    #[pyo3(get)]
    pub bearer_count: usize,
    /// Indicator tokens found in the class name.
    #[pyo3(get)]
    pub indicators: Vec<String>,
    /// Fraction of bearers with a resolved time.
    #[pyo3(get)]
    pub time_ratio: f64,
    /// Fraction of bearers with a non-blank agent.
    #[pyo3(get)]
    pub agent_ratio: f64,
    /// Fraction of bearers with a location name or coordinates.
    #[pyo3(get)]
    pub location_ratio: f64,
    /// How many of the three coherence checks met the threshold.
    #[pyo3(get)]
    pub checks_passed: usize,
}

#[pymethods]
impl PyClassAssessment {
    fn __repr__(&self) -> String {
        format!(
            "ClassAssessment(class_name={:?}, verdict={:?}, bearer_count={})",
            self.class_name, self.verdict, self.bearer_count
        )
    }
}

/// Quality measurements over one extracted graph.
#[pyclass(module = "eventforge_py", name = "GraphMetrics", skip_from_py_object)]
#[derive(Clone)]
pub struct PyGraphMetrics {
    #[pyo3(get)]
    pub event_count: usize,
    #[pyo3(get)]
    pub mean_completeness: f64,
    /// Fraction of events carrying both coordinates.
    #[pyo3(get)]
    pub coordinate_coverage: f64,
    /// Mean great-circle error against gold coordinates, when gold
    /// locations were supplied and matched.
    #[pyo3(get)]
    pub coordinate_error_km: Option<f64>,
    #[pyo3(get)]
    pub duplicate_ids: usize,
    #[pyo3(get)]
    pub parse_error_count: usize,
    #[pyo3(get)]
    pub suspect_class_count: usize,
}

#[pymethods]
impl PyGraphMetrics {
    fn __repr__(&self) -> String {
        format!(
            "GraphMetrics(event_count={}, mean_completeness={:.3}, coordinate_coverage={:.3})",
            self.event_count, self.mean_completeness, self.coordinate_coverage
        )
    }
}

fn wrap_metrics(m: metrics::GraphMetrics) -> PyGraphMetrics {
    PyGraphMetrics {
        event_count: m.event_count,
        mean_completeness: m.mean_completeness,
        coordinate_coverage: m.coordinate_coverage,
        coordinate_error_km: m.coordinate_error_km,
        duplicate_ids: m.duplicate_ids,
        parse_error_count: m.parse_error_count,
        suspect_class_count: m.suspect_class_count,
    }
}

// ===== Graphs =====

/// An event knowledge base, loadable from and serializable to Turtle.
#[pyclass(module = "eventforge_py", name = "EventGraph", skip_from_py_object)]
#[derive(Clone)]
pub struct PyEventGraph {
    inner: ev::EventGraph,
}

impl PyEventGraph {
    fn assessments(&self) -> PyResult<Vec<eventforge::ontology::ClassReport>> {
        validate_graph(&self.inner, &ValidationConfig::default())
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

#[pymethods]
impl PyEventGraph {
    /// Parse Turtle text strictly; raises ValueError on the first
    /// syntax error.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        ev::EventGraph::load(text)
            .map(|inner| PyEventGraph { inner })
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// Parse Turtle text with recovery: malformed statements are
    /// skipped and returned as error strings alongside the graph.
    #[staticmethod]
    fn parse_recovering(text: &str) -> (Self, Vec<String>) {
        let (inner, errors) = ev::EventGraph::load_recovering(text);
        (
            PyEventGraph { inner },
            errors.iter().map(|e| e.to_string()).collect(),
        )
    }

    /// Read and strictly parse a Turtle file.
    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PyIOError::new_err(format!("{}: {}", path, e)))?;
        Self::parse(&text)
    }

    /// Serialize back to canonical Turtle.
    fn to_turtle(&self) -> String {
        self.inner.to_turtle()
    }

    fn __len__(&self) -> usize {
        self.inner.events.len()
    }

    fn event_ids(&self) -> Vec<String> {
        self.inner.events.iter().map(|e| e.id.clone()).collect()
    }

    fn events(&self) -> Vec<PyEvent> {
        self.inner
            .events
            .iter()
            .map(|e| PyEvent { inner: e.clone() })
            .collect()
    }

    /// Look up one event by id.
    fn get(&self, id: &str) -> Option<PyEvent> {
        self.inner
            .event(id)
            .map(|e| PyEvent { inner: e.clone() })
    }

    /// Structural defects recorded while lifting, as (event_id,
    /// description) pairs.
    fn defects(&self) -> Vec<(String, String)> {
        self.inner
            .defects
            .iter()
            .map(|d| (d.event_id.clone(), d.kind.to_string()))
            .collect()
    }

    /// Assess every class appearing in the graph.
    fn validate(&self) -> PyResult<Vec<PyClassAssessment>> {
        Ok(self
            .assessments()?
            .into_iter()
            .map(|r| PyClassAssessment {
                class_name: r.class,
                verdict: r.verdict.to_string(),
                bearer_count: r.bearer_count,
                indicators: r.indicators,
                time_ratio: r.time_ratio,
                agent_ratio: r.agent_ratio,
                location_ratio: r.location_ratio,
                checks_passed: r.checks_passed,
            })
            .collect())
    }

    /// Ordered pairs (earlier, later) where the earlier event may have
    /// caused the later one.
    fn causal_pairs(&self) -> Vec<(String, String)> {
        let config = CausalConfig::default();
        let mut pairs = Vec::new();
        for e1 in &self.inner.events {
            for e2 in &self.inner.events {
                if e1.id != e2.id && causal::may_have_caused(e1, e2, &config) {
                    pairs.push((e1.id.clone(), e2.id.clone()));
                }
            }
        }
        pairs
    }

    /// Cascading-causation triples (a, b, c), sorted by id.
    fn cascades(&self) -> Vec<(String, String, String)> {
        causal::find_cascades(&self.inner, &CausalConfig::default())
    }

    /// Emit the graph as a Coq source file and return its text.
    #[pyo3(signature = (include_suspect = false))]
    fn to_coq(&self, include_suspect: bool) -> PyResult<String> {
        let reports = self.assessments()?;
        let config = coqgen::CoqgenConfig {
            include_suspect,
            ..Default::default()
        };
        coqgen::emit_file(&self.inner, &reports, &CausalConfig::default(), &config)
            .map(|artifact| artifact.source_text)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// Score the graph. `gold` is an optional list of
    /// (location_name, latitude, longitude) reference coordinates;
    /// names match case-insensitively.
    #[pyo3(signature = (gold = None))]
    fn metrics(&self, gold: Option<Vec<(String, f64, f64)>>) -> PyResult<PyGraphMetrics> {
        let reports = self.assessments()?;
        let gold_locations = gold.map(|entries| {
            let mut locations = metrics::GoldLocations::default();
            for (name, lat, lon) in &entries {
                locations.insert(name, *lat, *lon);
            }
            locations
        });
        Ok(wrap_metrics(metrics::score(
            &self.inner,
            &[],
            &reports,
            gold_locations.as_ref(),
        )))
    }

    fn __repr__(&self) -> String {
        format!(
            "EventGraph({} events, {} defects)",
            self.inner.events.len(),
            self.inner.defects.len()
        )
    }
}

// ===== Functions =====

/// Strict interval precedence: true when `a` is fully dated and ends
/// before `b` begins.
#[pyfunction]
fn event_before(a: &PyEvent, b: &PyEvent) -> bool {
    temporal::event_before(&a.inner, &b.inner)
}

/// Causal heuristic over a pair of events, with default thresholds.
#[pyfunction]
fn may_have_caused(a: &PyEvent, b: &PyEvent) -> bool {
    causal::may_have_caused(&a.inner, &b.inner, &CausalConfig::default())
}

/// Shared-context heuristic over a pair of events, with default
/// thresholds.
#[pyfunction]
fn same_historical_context(a: &PyEvent, b: &PyEvent) -> bool {
    causal::same_historical_context(&a.inner, &b.inner, &CausalConfig::default())
}

/// Great-circle distance between two coordinate pairs, in kilometers.
#[pyfunction]
fn haversine_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    geo::haversine_km(lat1, lon1, lat2, lon2)
}

/// Start year of a time expression (negative for BC), or None when
/// the text does not normalize.
#[pyfunction]
fn parse_year(text: &str) -> Option<i32> {
    temporal::parse_time(text).start_year()
}

fn mode_from_str(mode: &str, k: usize) -> PyResult<Mode> {
    match mode {
        "base" => Ok(Mode::Base),
        "knowledge" => Ok(Mode::KnowledgeEnhanced),
        "rag" => Ok(Mode::RagEnhanced { k }),
        other => Err(PyValueError::new_err(format!(
            "unknown mode {:?} (expected \"base\", \"knowledge\", or \"rag\")",
            other
        ))),
    }
}

/// Run the extraction pipeline over a document with the deterministic
/// built-in backend. Returns the extracted graph and the run report as
/// a JSON string.
///
/// `mode` is "base", "knowledge", or "rag"; RAG mode requires
/// `rag_corpus`, a list of passages to retrieve from. `cache_dir`
/// points at a query cache previously warmed by the CLI; it is only
/// ever read.
#[pyfunction]
#[pyo3(signature = (text, mode = "base", k = 4, rag_corpus = None, cache_dir = None))]
fn extract(
    text: &str,
    mode: &str,
    k: usize,
    rag_corpus: Option<Vec<String>>,
    cache_dir: Option<String>,
) -> PyResult<(PyEventGraph, String)> {
    let mut config = ExtractionConfig {
        mode: mode_from_str(mode, k)?,
        ..ExtractionConfig::default()
    };
    if let Some(dir) = cache_dir {
        config.cache_dir = PathBuf::from(dir);
    }
    let retriever = match (&config.mode, rag_corpus) {
        (Mode::RagEnhanced { .. }, Some(passages)) => Some(TokenCosineRetriever::index(&passages)),
        (Mode::RagEnhanced { .. }, None) => {
            return Err(PyValueError::new_err(
                "rag mode requires rag_corpus, a list of passages",
            ))
        }
        _ => None,
    };
    let clients = KnowledgeClients::from_config(&config, Arc::new(NoNetwork), true)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let (graph, report) = run_pipeline(
        text,
        &config,
        &MockBackend,
        retriever.as_ref().map(|r| r as &dyn Retriever),
        &clients,
    )
    .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((PyEventGraph { inner: graph }, report.to_json()))
}

// ===== Module =====

#[pymodule]
fn eventforge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyEvent>()?;
    m.add_class::<PyEventGraph>()?;
    m.add_class::<PyClassAssessment>()?;
    m.add_class::<PyGraphMetrics>()?;
    m.add_function(wrap_pyfunction!(event_before, m)?)?;
    m.add_function(wrap_pyfunction!(may_have_caused, m)?)?;
    m.add_function(wrap_pyfunction!(same_historical_context, m)?)?;
    m.add_function(wrap_pyfunction!(haversine_km, m)?)?;
    m.add_function(wrap_pyfunction!(parse_year, m)?)?;
    m.add_function(wrap_pyfunction!(extract, m)?)?;
    Ok(())
}

// ===== Tests =====
