//! Validation of event classes, including ones a retrieval-augmented
//! extractor invented on its own.
//!
//! Every class is judged by local name:
//! - **Standard**: on the accepted-classes list (case-sensitive).
//! - **DiscoveredValid**: not on the list, but the name contains at
//!   least one event-kind indicator token ("War", "Migration", ...)
//!   and the events bearing the class are coherent: of the three
//!   checks (resolved time, named agent, location information), at
//!   least two must each hold for at least 80% of bearers. Both knobs
//!   are configurable.
//! - **Suspect**: everything else — no indicator in the name, or
//!   bearers too sparse to trust.
//!
//! Name tokens come from splitting on underscores, hyphens, and
//! camel-case boundaries, so "ET_MigrationEvent" yields ET, Migration,
//! Event. A discovered class with no bearers at all cannot be assessed
//! and is an error rather than a silent verdict.

use std::collections::{BTreeMap, BTreeSet};

use crate::event::{Event, EventGraph};

/// Accepted event classes, embedded as a newline-separated list.
const STANDARD_CLASSES: &str = include_str!("../data/standard_classes.txt");
/// Event-kind indicator tokens, embedded the same way.
const INDICATOR_LEXICON: &str = include_str!("../data/indicator_lexicon.txt");

fn parse_word_list(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

// ===== Configuration =====

#[derive(Debug, Clone)]
pub struct ValidationConfig {
    /// Class local names accepted as-is.
    pub standard_classes: BTreeSet<String>,
    /// Tokens that mark a name as event-like (compared case-insensitively).
    pub indicators: Vec<String>,
    /// Fraction of bearers that must pass a check for it to count.
    pub coherence_threshold: f64,
    /// How many of the three checks must pass.
    pub required_checks: usize,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            standard_classes: parse_word_list(STANDARD_CLASSES).into_iter().collect(),
            indicators: parse_word_list(INDICATOR_LEXICON),
            coherence_threshold: 0.8,
            required_checks: 2,
        }
    }
}

// ===== Verdicts =====

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Standard,
    DiscoveredValid,
    Suspect,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Standard => "standard",
            Verdict::DiscoveredValid => "discovered-valid",
            Verdict::Suspect => "suspect",
        };
        f.write_str(s)
    }
}

/// Assessment of one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassReport {
    /// Local name of the class.
    pub class: String,
    pub verdict: Verdict,
    pub bearer_count: usize,
    /// Indicator tokens found in the name.
    pub indicators: Vec<String>,
    /// Fraction of bearers with a resolved time.
    pub time_ratio: f64,
    /// Fraction of bearers with a non-blank agent.
    pub agent_ratio: f64,
    /// Fraction of bearers with a location name or coordinate pair.
    pub location_ratio: f64,
    /// How many of the three checks met the threshold.
    pub checks_passed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidationError {
    #[error("class '{0}' has no bearer events to assess")]
    EmptyBearers(String),
}

// ===== Name tokenization =====

/// Split a class name into tokens on underscores, hyphens, and
/// camel-case boundaries. An uppercase run followed by a lowercase
/// letter breaks before its last capital ("HTTPServer" -> HTTP,
/// Server).
pub fn split_name_tokens(name: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for part in name.split(['_', '-']) {
        let chars: Vec<char> = part.chars().collect();
        let mut current = String::new();
        for (i, &c) in chars.iter().enumerate() {
            if !current.is_empty() {
                let prev = chars[i - 1];
                let rising = c.is_uppercase() && !prev.is_uppercase();
                let acronym_end = c.is_uppercase()
                    && prev.is_uppercase()
                    && chars.get(i + 1).is_some_and(|n| n.is_lowercase());
                if rising || acronym_end {
                    tokens.push(std::mem::take(&mut current));
                }
            }
            current.push(c);
        }
        if !current.is_empty() {
            tokens.push(current);
        }
    }
    tokens
}

/// Indicator tokens contained in a class name, in lexicon order.
pub fn matched_indicators(name: &str, config: &ValidationConfig) -> Vec<String> {
    let tokens: Vec<String> = split_name_tokens(name)
        .into_iter()
        .map(|t| t.to_lowercase())
        .collect();
    config
        .indicators
        .iter()
        .filter(|ind| tokens.iter().any(|t| *t == ind.to_lowercase()))
        .cloned()
        .collect()
}

// ===== Coherence checks =====

fn has_resolved_time(e: &Event) -> bool {
    e.time.as_ref().is_some_and(|t| t.is_resolved())
}

fn has_agent(e: &Event) -> bool {
    e.agent.as_deref().is_some_and(|s| !s.trim().is_empty())
}

fn has_location_info(e: &Event) -> bool {
    e.location.as_deref().is_some_and(|s| !s.trim().is_empty())
        || (e.latitude.is_some() && e.longitude.is_some())
}

fn ratio(bearers: &[&Event], check: impl Fn(&Event) -> bool) -> f64 {
    if bearers.is_empty() {
        return 0.0;
    }
    bearers.iter().filter(|e| check(e)).count() as f64 / bearers.len() as f64
}

// ===== Classification =====

/// Judge one class given the events that bear it.
pub fn classify_class(
    class: &str,
    bearers: &[&Event],
    config: &ValidationConfig,
) -> Result<ClassReport, ValidationError> {
    let indicators = matched_indicators(class, config);
    let mut report = ClassReport {
        class: class.to_string(),
        verdict: Verdict::Suspect,
        bearer_count: bearers.len(),
        indicators,
        time_ratio: 0.0,
        agent_ratio: 0.0,
        location_ratio: 0.0,
        checks_passed: 0,
    };

    if config.standard_classes.contains(class) {
        report.verdict = Verdict::Standard;
        report.time_ratio = ratio(bearers, has_resolved_time);
        report.agent_ratio = ratio(bearers, has_agent);
        report.location_ratio = ratio(bearers, has_location_info);
        return Ok(report);
    }

    if bearers.is_empty() {
        return Err(ValidationError::EmptyBearers(class.to_string()));
    }

    report.time_ratio = ratio(bearers, has_resolved_time);
    report.agent_ratio = ratio(bearers, has_agent);
    report.location_ratio = ratio(bearers, has_location_info);
    report.checks_passed = [report.time_ratio, report.agent_ratio, report.location_ratio]
        .iter()
        .filter(|r| **r >= config.coherence_threshold)
        .count();

    if !report.indicators.is_empty() && report.checks_passed >= config.required_checks {
        report.verdict = Verdict::DiscoveredValid;
    }
    Ok(report)
}

/// Judge every class appearing in a graph. Reports come back sorted
/// by class name.
pub fn validate_graph(
    graph: &EventGraph,
    config: &ValidationConfig,
) -> Result<Vec<ClassReport>, ValidationError> {
    let mut bearers: BTreeMap<String, Vec<&Event>> = BTreeMap::new();
    for event in &graph.events {
        let mut locals: Vec<&str> = event.classes.iter().map(|c| c.local_text()).collect();
        locals.sort_unstable();
        locals.dedup();
        for local in locals {
            bearers.entry(local.to_string()).or_default().push(event);
        }
    }
    bearers
        .iter()
        .map(|(class, events)| classify_class(class, events, config))
        .collect()
}

/// Number of suspect classes in a report list.
pub fn suspect_count(reports: &[ClassReport]) -> usize {
    reports
        .iter()
        .filter(|r| r.verdict == Verdict::Suspect)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::EventGraph;

    fn coherent_event(id: &str) -> Event {
        let mut e = Event::new(id);
        e.agent = Some("Pericles".to_string());
        e.time_raw = Some("431 BC".to_string());
        e.time = Some(crate::temporal::parse_time("431 BC"));
        e.location = Some("Athens".to_string());
        e
    }

    fn degenerate_event(id: &str) -> Event {
        // No agent, unresolvable time, no location.
        let mut e = Event::new(id);
        e.time_raw = Some("time period".to_string());
        e.time = Some(crate::temporal::parse_time("time period"));
        e
    }

    #[test]
    fn standard_class_is_standard_regardless_of_bearers() {
        let config = ValidationConfig::default();
        let report = classify_class("SocietalEvent", &[], &config).unwrap();
        assert_eq!(report.verdict, Verdict::Standard);
        let bad = degenerate_event("E1");
        let report = classify_class("SocietalEvent", &[&bad], &config).unwrap();
        assert_eq!(report.verdict, Verdict::Standard);
    }

    #[test]
    fn discovered_class_with_indicator_and_coherent_bearers_is_valid() {
        let config = ValidationConfig::default();
        let e1 = coherent_event("E1");
        let e2 = coherent_event("E2");
        let report = classify_class("ET_MigrationEvent", &[&e1, &e2], &config).unwrap();
        assert_eq!(report.verdict, Verdict::DiscoveredValid);
        assert_eq!(report.indicators, vec!["Migration".to_string()]);
        assert_eq!(report.checks_passed, 3);
    }

    #[test]
    fn indicator_without_coherence_is_suspect() {
        let config = ValidationConfig::default();
        let bad = degenerate_event("E1");
        let report = classify_class("WarEvent", &[&bad], &config).unwrap();
        assert_eq!(report.verdict, Verdict::Suspect);
        assert_eq!(report.indicators, vec!["War".to_string()]);
        assert_eq!(report.checks_passed, 0);
    }

    #[test]
    fn coherence_without_indicator_is_suspect() {
        let config = ValidationConfig::default();
        let e1 = coherent_event("E1");
        let report = classify_class("FooThing", &[&e1], &config).unwrap();
        assert_eq!(report.verdict, Verdict::Suspect);
        assert!(report.indicators.is_empty());
    }

    #[test]
    fn two_of_three_checks_suffice() {
        let config = ValidationConfig::default();
        // Agent and time but no location anywhere.
        let mut e = coherent_event("E1");
        e.location = None;
        let report = classify_class("SiegeEvent", &[&e], &config).unwrap();
        assert_eq!(report.checks_passed, 2);
        assert_eq!(report.verdict, Verdict::DiscoveredValid);
    }

    #[test]
    fn threshold_is_per_check() {
        let config = ValidationConfig::default();
        // 3 of 4 bearers coherent: 0.75 < 0.8 on every check.
        let good: Vec<Event> = (0..3).map(|i| coherent_event(&format!("E{}", i))).collect();
        let bad = degenerate_event("E9");
        let mut bearers: Vec<&Event> = good.iter().collect();
        bearers.push(&bad);
        let report = classify_class("PlagueEvent", &bearers, &config).unwrap();
        assert_eq!(report.verdict, Verdict::Suspect);
        // 4 of 5 is exactly 0.8 and passes.
        let more: Vec<Event> = (0..4).map(|i| coherent_event(&format!("E{}", i))).collect();
        let mut bearers: Vec<&Event> = more.iter().collect();
        bearers.push(&bad);
        let report = classify_class("PlagueEvent", &bearers, &config).unwrap();
        assert_eq!(report.verdict, Verdict::DiscoveredValid);
    }

    #[test]
    fn empty_bearers_for_discovered_class_is_an_error() {
        let config = ValidationConfig::default();
        let err = classify_class("WarEvent", &[], &config).unwrap_err();
        assert_eq!(err, ValidationError::EmptyBearers("WarEvent".to_string()));
    }

    #[test]
    fn splits_underscores_and_camel_case() {
        assert_eq!(
            split_name_tokens("ET_MigrationEvent"),
            vec!["ET", "Migration", "Event"]
        );
        assert_eq!(split_name_tokens("WarEvent"), vec!["War", "Event"]);
        assert_eq!(split_name_tokens("HTTPServer"), vec!["HTTP", "Server"]);
        assert_eq!(split_name_tokens("plague-year"), vec!["plague", "year"]);
        assert_eq!(split_name_tokens(""), Vec::<String>::new());
    }

    #[test]
    fn indicator_matching_is_token_exact() {
        let config = ValidationConfig::default();
        // "Warfare" contains "war" as a substring but not as a token.
        assert!(matched_indicators("WarfareEvent", &config).is_empty());
        assert_eq!(matched_indicators("warEvent", &config), vec!["War"]);
    }

    #[test]
    fn validates_whole_graph_sorted_by_class() {
        let src = "@prefix ste: <http://example.org/ste#> .\n\
                   @prefix dbp: <http://dbpedia.org/ontology/> .\n\
                   ste:E1 a ste:Event, dbp:SocietalEvent ;\n\
                       ste:hasAgent \"Pericles\" ;\n\
                       ste:hasTime \"431 BC\" ;\n\
                       ste:hasLocation \"Athens\" .\n\
                   ste:E2 a ste:ET_MigrationEvent ;\n\
                       ste:hasAgent \"Dorians\" ;\n\
                       ste:hasTime \"1100 BC\" ;\n\
                       ste:hasLocation \"Peloponnese\" .\n\
                   ste:E3 a ste:WarEvent .\n";
        let graph = EventGraph::load(src).unwrap();
        let reports = validate_graph(&graph, &ValidationConfig::default()).unwrap();
        let summary: Vec<(&str, Verdict)> = reports
            .iter()
            .map(|r| (r.class.as_str(), r.verdict))
            .collect();
        assert_eq!(
            summary,
            vec![
                ("ET_MigrationEvent", Verdict::DiscoveredValid),
                ("Event", Verdict::Standard),
                ("SocietalEvent", Verdict::Standard),
                ("WarEvent", Verdict::Suspect),
            ]
        );
        assert_eq!(suspect_count(&reports), 1);
    }
}
