//! Extraction run configuration.
//!
//! Configuration lives in one UTF-8 `key = value` file with a section
//! per concern (TOML syntax). Everything has a default, so an empty
//! file — or no file — is a valid Base-mode configuration.

use std::path::{Path, PathBuf};

use serde::Deserialize;

// ===== Modes =====

/// Extraction strategy. `Base` is fully hermetic: no knowledge
/// sources, no retrieval, no enrichment. `KnowledgeEnhanced` adds the
/// knowledge-graph clients and location enrichment. `RagEnhanced`
/// additionally assembles top-k retrieved context into the prompt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    Base,
    KnowledgeEnhanced,
    RagEnhanced { k: usize },
}

impl Mode {
    pub fn label(&self) -> String {
        match self {
            Mode::Base => "base".to_string(),
            Mode::KnowledgeEnhanced => "knowledge-enhanced".to_string(),
            Mode::RagEnhanced { k } => format!("rag-enhanced(k={})", k),
        }
    }

    pub fn uses_knowledge(&self) -> bool {
        !matches!(self, Mode::Base)
    }
}

/// Knowledge endpoint URLs; keys double as rate-limiter identities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Endpoints {
    pub wikidata: String,
    pub dbpedia: String,
    pub conceptnet: String,
}

impl Default for Endpoints {
    fn default() -> Self {
        Endpoints {
            wikidata: "https://query.wikidata.org/sparql".to_string(),
            dbpedia: "https://dbpedia.org/sparql".to_string(),
            conceptnet: "https://api.conceptnet.io".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionConfig {
    pub mode: Mode,
    pub chunk_size_chars: usize,
    pub chunk_overlap_chars: usize,
    /// Sampling temperature for the backend. Runs are only
    /// reproducible at 0, so any other value is rejected.
    pub temperature: f64,
    pub endpoints: Endpoints,
    /// Gazetteer file path; empty selects the built-in copy.
    pub lacrimalit_path: String,
    /// Requests per second allowed against each endpoint.
    pub rate_limit_per_sec: f64,
    pub cache_dir: PathBuf,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            mode: Mode::Base,
            chunk_size_chars: 4000,
            chunk_overlap_chars: 200,
            temperature: 0.0,
            endpoints: Endpoints::default(),
            lacrimalit_path: String::new(),
            rate_limit_per_sec: 5.0,
            cache_dir: PathBuf::from(".eventforge-cache"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config syntax error: {0}")]
    Syntax(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl ExtractionConfig {
    /// Parse a config file and validate it.
    pub fn from_file(path: impl AsRef<Path>) -> Result<ExtractionConfig, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        ExtractionConfig::from_str_validated(&text)
    }

    /// Parse config text (`key = value` with sections) and validate.
    pub fn from_str_validated(text: &str) -> Result<ExtractionConfig, ConfigError> {
        let shape: FileShape =
            toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        let config = shape.into_config()?;
        config.validate()?;
        Ok(config)
    }

    /// Check the invariants that parsing alone cannot express.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.chunk_size_chars == 0 {
            return Err(ConfigError::Invalid("chunk_size_chars must be positive".into()));
        }
        if self.chunk_overlap_chars >= self.chunk_size_chars {
            return Err(ConfigError::Invalid(format!(
                "chunk_overlap_chars ({}) must be smaller than chunk_size_chars ({})",
                self.chunk_overlap_chars, self.chunk_size_chars
            )));
        }
        if self.temperature != 0.0 {
            return Err(ConfigError::Invalid(
                "temperature is fixed at 0 for reproducible runs".into(),
            ));
        }
        if !(self.rate_limit_per_sec > 0.0) {
            return Err(ConfigError::Invalid("rate_limit_per_sec must be positive".into()));
        }
        if let Mode::RagEnhanced { k } = self.mode {
            if k < 1 {
                return Err(ConfigError::Invalid("rag k must be at least 1".into()));
            }
        }
        Ok(())
    }
}

// ===== File shape =====

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileShape {
    #[serde(default)]
    extraction: ExtractionSection,
    #[serde(default)]
    endpoints: EndpointsSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtractionSection {
    mode: Option<String>,
    k: Option<usize>,
    chunk_size_chars: Option<usize>,
    chunk_overlap_chars: Option<usize>,
    temperature: Option<f64>,
    lacrimalit_path: Option<String>,
    rate_limit_per_sec: Option<f64>,
    cache_dir: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct EndpointsSection {
    wikidata: Option<String>,
    dbpedia: Option<String>,
    conceptnet: Option<String>,
}

impl FileShape {
    fn into_config(self) -> Result<ExtractionConfig, ConfigError> {
        let mut config = ExtractionConfig::default();
        let section = self.extraction;
        if let Some(mode) = section.mode.as_deref() {
            config.mode = match mode {
                "base" => Mode::Base,
                "knowledge" => Mode::KnowledgeEnhanced,
                "rag" => Mode::RagEnhanced {
                    k: section.k.unwrap_or(4),
                },
                other => {
                    return Err(ConfigError::Invalid(format!(
                        "unknown mode '{}' (expected base, knowledge, or rag)",
                        other
                    )))
                }
            };
        }
        if let Some(v) = section.chunk_size_chars {
            config.chunk_size_chars = v;
        }
        if let Some(v) = section.chunk_overlap_chars {
            config.chunk_overlap_chars = v;
        }
        if let Some(v) = section.temperature {
            config.temperature = v;
        }
        if let Some(v) = section.lacrimalit_path {
            config.lacrimalit_path = v;
        }
        if let Some(v) = section.rate_limit_per_sec {
            config.rate_limit_per_sec = v;
        }
        if let Some(v) = section.cache_dir {
            config.cache_dir = PathBuf::from(v);
        }
        if let Some(v) = self.endpoints.wikidata {
            config.endpoints.wikidata = v;
        }
        if let Some(v) = self.endpoints.dbpedia {
            config.endpoints.dbpedia = v;
        }
        if let Some(v) = self.endpoints.conceptnet {
            config.endpoints.conceptnet = v;
        }
        Ok(config)
    }
}
