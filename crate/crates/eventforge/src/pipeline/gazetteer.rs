//! The local place gazetteer (LACRIMALit-style data).
//!
//! A small tab-separated file of ancient-world places with
//! coordinates and modern country / historical region. It seeds both
//! entity spotting (location classification) and the first stage of
//! the location-enrichment cascade. A copy ships inside the binary so
//! every mode works without any files on disk.

use std::collections::BTreeMap;
use std::path::Path;

/// The checked-in gazetteer, embedded at build time.
const BUILTIN: &str = include_str!("../../data/lacrimalit.tsv");

#[derive(Debug, Clone, PartialEq)]
pub struct Place {
    pub name: String,
    pub latitude: f64,
    pub longitude: f64,
    pub country: String,
    pub region: String,
}

#[derive(Debug, thiserror::Error)]
pub enum GazetteerError {
    #[error("cannot read gazetteer {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("gazetteer line {line}: {reason}")]
    BadLine { line: usize, reason: String },
}

/// Case-insensitive name -> place lookup.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    places: BTreeMap<String, Place>,
}

impl Gazetteer {
    /// The embedded copy of the data file.
    pub fn builtin() -> Gazetteer {
        Gazetteer::from_str(BUILTIN).expect("embedded gazetteer is well-formed")
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Gazetteer, GazetteerError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| GazetteerError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Gazetteer::from_str(&text)
    }

    /// Parse tab-separated `name lat lon country region` lines; blank
    /// lines and `#` comments are skipped.
    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str) -> Result<Gazetteer, GazetteerError> {
        let mut places = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            if fields.len() != 5 {
                return Err(GazetteerError::BadLine {
                    line: line_no,
                    reason: format!("expected 5 tab-separated fields, got {}", fields.len()),
                });
            }
            let parse = |s: &str, what: &str| -> Result<f64, GazetteerError> {
                s.parse::<f64>().map_err(|_| GazetteerError::BadLine {
                    line: line_no,
                    reason: format!("bad {what} '{s}'"),
                })
            };
            let place = Place {
                name: fields[0].to_string(),
                latitude: parse(fields[1], "latitude")?,
                longitude: parse(fields[2], "longitude")?,
                country: fields[3].to_string(),
                region: fields[4].to_string(),
            };
            places.insert(place.name.to_lowercase(), place);
        }
        Ok(Gazetteer { places })
    }

    /// Build from bare names (no coordinates); handy for tests.
    pub fn from_names<I: IntoIterator<Item = S>, S: Into<String>>(names: I) -> Gazetteer {
        let mut places = BTreeMap::new();
        for name in names {
            let name = name.into();
            places.insert(
                name.to_lowercase(),
                Place {
                    name,
                    latitude: 0.0,
                    longitude: 0.0,
                    country: String::new(),
                    region: String::new(),
                },
            );
        }
        Gazetteer { places }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.places.contains_key(&name.to_lowercase())
    }

    pub fn lookup(&self, name: &str) -> Option<&Place> {
        self.places.get(&name.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.places.len()
    }

    pub fn is_empty(&self) -> bool {
        self.places.is_empty()
    }

    /// All canonical place names, sorted.
    pub fn names(&self) -> Vec<&str> {
        self.places.values().map(|p| p.name.as_str()).collect()
    }
}
