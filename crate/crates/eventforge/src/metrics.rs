//! Quantitative scoring of extracted event graphs and side-by-side
//! comparison of multiple runs.
//!
//! A run is judged on mechanical measures only: how many events
//! survived parsing, how fully each one is described, how often
//! coordinates are present, how far those coordinates sit from a
//! trusted gold set, and how many structural problems (duplicate ids,
//! parse errors, suspect classes) the run produced. [`score`] computes
//! those for one graph; [`compare`] renders any number of scored runs
//! as an aligned text table plus a CSV with identical numbers.
//!
//! Design notes:
//! - Scoring never fails. An empty graph scores zeros, a missing gold
//!   set simply leaves `coordinate_error_km` unset, and defects are
//!   data to count, not errors to raise.
//! - Coordinate error is averaged only over events that carry both
//!   coordinates and whose location name appears in the gold set
//!   (case-insensitive); grading an event against a place the gold
//!   set does not know would be noise, not signal.
//! - The CSV prints floats with shortest round-trip formatting, so
//!   re-parsing a report reproduces the exact numbers. The text table
//!   rounds for human eyes instead.
//! - Deliberately *not* measured: whether an event is a hallucination.
//!   That judgment stays with a human reader; the closest proxies here
//!   are `coordinate_error_km` and `suspect_class_count`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::event::{DefectKind, EventGraph};
use crate::geo::haversine_km;
use crate::ontology::{suspect_count, ClassReport};
use crate::turtle::ParseError;

// ===== Metrics =====

/// Measures of one extraction run over one graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphMetrics {
    /// Events in the lifted graph (renamed duplicates included).
    pub event_count: usize,
    /// Mean fraction of the ten schema properties present per event;
    /// 0.0 for an empty graph.
    pub mean_completeness: f64,
    /// Fraction of events carrying both latitude and longitude; 0.0
    /// for an empty graph.
    pub coordinate_coverage: f64,
    /// Mean great-circle distance (km) from each event's coordinates
    /// to the gold coordinates of its location. Only events with both
    /// coordinates and a location named in the gold set participate;
    /// `None` when no gold set was given or nothing matched.
    pub coordinate_error_km: Option<f64>,
    /// Subject blocks that reused an already-taken event id.
    pub duplicate_ids: usize,
    /// Statements the parser had to skip.
    pub parse_error_count: usize,
    /// Event classes judged suspect by ontology validation.
    pub suspect_class_count: usize,
}

// ===== Gold locations =====

/// Trusted coordinates for known place names, loaded from delimited
/// text (`name<TAB>lat<TAB>lon`, commas also accepted). Lookup is
/// case-insensitive.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GoldLocations {
    entries: BTreeMap<String, (f64, f64)>,
}

/// Problems reading a gold-locations file.
#[derive(Debug, Error)]
pub enum GoldError {
    #[error("cannot read gold file: {0}")]
    Io(#[from] std::io::Error),
    #[error("gold line {line}: {reason}")]
    BadLine { line: usize, reason: String },
}

impl GoldLocations {
    pub fn new() -> Self {
        GoldLocations::default()
    }

    pub fn from_file(path: &Path) -> Result<GoldLocations, GoldError> {
        GoldLocations::from_str_checked(&std::fs::read_to_string(path)?)
    }

    /// Parse delimited text: one `name, lat, lon` entry per line,
    /// separated by tabs or commas. Blank lines and `#` comments are
    /// skipped. Out-of-range coordinates are rejected — a gold set
    /// with impossible values would poison every score drawn from it.
    pub fn from_str_checked(text: &str) -> Result<GoldLocations, GoldError> {
        let mut gold = GoldLocations::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = if trimmed.contains('\t') {
                trimmed.split('\t').map(str::trim).collect()
            } else {
                trimmed.split(',').map(str::trim).collect()
            };
            if fields.len() != 3 {
                return Err(GoldError::BadLine {
                    line,
                    reason: format!("expected 3 fields (name, lat, lon), got {}", fields.len()),
                });
            }
            let name = fields[0];
            if name.is_empty() {
                return Err(GoldError::BadLine {
                    line,
                    reason: "empty place name".to_string(),
                });
            }
            let lat: f64 = fields[1].parse().map_err(|_| GoldError::BadLine {
                line,
                reason: format!("bad latitude \"{}\"", fields[1]),
            })?;
            let lon: f64 = fields[2].parse().map_err(|_| GoldError::BadLine {
                line,
                reason: format!("bad longitude \"{}\"", fields[2]),
            })?;
            if !(-90.0..=90.0).contains(&lat) {
                return Err(GoldError::BadLine {
                    line,
                    reason: format!("latitude {} out of range", lat),
                });
            }
            if !(-180.0..=180.0).contains(&lon) {
                return Err(GoldError::BadLine {
                    line,
                    reason: format!("longitude {} out of range", lon),
                });
            }
            gold.insert(name, lat, lon);
        }
        Ok(gold)
    }

    pub fn insert(&mut self, name: &str, lat: f64, lon: f64) {
        self.entries.insert(name.to_lowercase(), (lat, lon));
    }

    pub fn lookup(&self, name: &str) -> Option<(f64, f64)> {
        self.entries.get(&name.to_lowercase()).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

// ===== Scoring =====

/// Score one graph. Pure, never fails, and insensitive to event
/// order: everything is a count or a mean over the event multiset.
pub fn score(
    graph: &EventGraph,
    parse_errors: &[ParseError],
    classifications: &[ClassReport],
    gold: Option<&GoldLocations>,
) -> GraphMetrics {
    let event_count = graph.events.len();

    let mean_completeness = if event_count == 0 {
        0.0
    } else {
        graph.events.iter().map(|e| e.completeness()).sum::<f64>() / event_count as f64
    };

    let with_coords = graph
        .events
        .iter()
        .filter(|e| e.latitude.is_some() && e.longitude.is_some())
        .count();
    let coordinate_coverage = if event_count == 0 {
        0.0
    } else {
        with_coords as f64 / event_count as f64
    };

    let coordinate_error_km = gold.and_then(|gold| {
        let mut total = 0.0;
        let mut graded = 0usize;
        for event in &graph.events {
            let (Some(lat), Some(lon)) = (event.latitude, event.longitude) else {
                continue;
            };
            let Some((gold_lat, gold_lon)) = event.location.as_deref().and_then(|n| gold.lookup(n))
            else {
                continue;
            };
            total += haversine_km(lat, lon, gold_lat, gold_lon);
            graded += 1;
        }
        (graded > 0).then(|| total / graded as f64)
    });

    let duplicate_ids = graph
        .defects
        .iter()
        .filter(|d| matches!(d.kind, DefectKind::DuplicateId { .. }))
        .count();

    GraphMetrics {
        event_count,
        mean_completeness,
        coordinate_coverage,
        coordinate_error_km,
        duplicate_ids,
        parse_error_count: parse_errors.len(),
        suspect_class_count: suspect_count(classifications),
    }
}

// ===== Comparison report =====

/// Rendered comparison of scored runs: a human-readable table and a
/// machine-readable CSV carrying the same rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    /// Aligned plain-text table, one data row per run.
    pub text: String,
    /// CSV with a header row; floats keep full round-trip precision.
    pub csv: String,
}

const CSV_HEADER: &str = "label,event_count,mean_completeness,coordinate_coverage,\
                          coordinate_error_km,duplicate_ids,parse_error_count,suspect_class_count";

/// Quote a CSV field when it contains a delimiter, quote, or newline.
fn csv_field(value: &str) -> String {
    if value.contains(',') || value.contains('"') || value.contains('\n') {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

/// Shortest decimal that parses back to exactly the same f64.
fn csv_f64(value: f64) -> String {
    format!("{}", value)
}

/// Render runs side by side, preserving the given order and labels.
/// An empty slice yields header-only output.
pub fn compare(runs: &[(String, GraphMetrics)]) -> ComparisonReport {
    // CSV first: exact numbers, one line per run.
    let mut csv = String::new();
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    for (label, m) in runs {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            csv_field(label),
            m.event_count,
            csv_f64(m.mean_completeness),
            csv_f64(m.coordinate_coverage),
            m.coordinate_error_km.map(csv_f64).unwrap_or_default(),
            m.duplicate_ids,
            m.parse_error_count,
            m.suspect_class_count,
        );
    }

    // Text table: rounded values, columns sized to content.
    let headers = [
        "run",
        "events",
        "completeness",
        "coverage",
        "err-km",
        "dup-ids",
        "parse-errs",
        "suspect",
    ];
    let rows: Vec<[String; 8]> = runs
        .iter()
        .map(|(label, m)| {
            [
                label.clone(),
                m.event_count.to_string(),
                format!("{:.3}", m.mean_completeness),
                format!("{:.3}", m.coordinate_coverage),
                m.coordinate_error_km
                    .map(|v| format!("{:.1}", v))
                    .unwrap_or_else(|| "-".to_string()),
                m.duplicate_ids.to_string(),
                m.parse_error_count.to_string(),
                m.suspect_class_count.to_string(),
            ]
        })
        .collect();
    let widths: Vec<usize> = headers
        .iter()
        .enumerate()
        .map(|(i, h)| {
            rows.iter()
                .map(|r| r[i].len())
                .chain(std::iter::once(h.len()))
                .max()
                .unwrap_or(0)
        })
        .collect();

    let mut text = String::new();
    let render = |cells: &[String]| -> String {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            if i == 0 {
                // Run labels read left-aligned; numbers right-aligned.
                let _ = write!(line, "{:<width$}", cell, width = widths[i]);
            } else {
                let _ = write!(line, "{:>width$}", cell, width = widths[i]);
            }
        }
        line.trim_end().to_string()
    };
    let header_cells: Vec<String> = headers.iter().map(|h| h.to_string()).collect();
    text.push_str(&render(&header_cells));
    text.push('\n');
    let dashes: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    text.push_str(&render(&dashes));
    text.push('\n');
    for row in &rows {
        text.push_str(&render(row));
        text.push('\n');
    }

    ComparisonReport { text, csv }
}

// ===== Tests =====
