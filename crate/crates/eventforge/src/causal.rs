//! Causal predicates over event graphs: pairwise plausible causation,
//! shared historical context, and three-event cascading causation.
//!
//! These are deliberately simple, pure textual heuristics — the value
//! is in the five-conjunct *structure* of cascading causation (which
//! the Coq translation re-expresses and re-proves), not in the
//! cleverness of the pairwise test. `may_have_caused` requires strict
//! temporal precedence plus textual evidence: a plain mention linking
//! the two events' descriptions (agent or location of one appearing in
//! the other's result/type/agent text, in either direction), or a
//! causal cue word in the earlier event's result whose clause names
//! the later event's location or agent. `same_historical_context`
//! requires geographic closeness (distance within a radius, or equal
//! region or country) plus, when both events are dated, start years
//! within a window.

use crate::event::{natural_cmp, Event, EventGraph};
use crate::geo::haversine_km;
use crate::temporal::event_before;

/// Default causal cue terms for [`CausalConfig`].
pub const DEFAULT_CAUSAL_LEXICON: [&str; 7] = [
    "caused",
    "led to",
    "resulted in",
    "because",
    "consequence",
    "provoked",
    "in response",
];

/// Tunable parameters for the causal predicates.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalConfig {
    /// Cue terms whose trailing clause is searched for participants.
    pub causal_lexicon: Vec<String>,
    /// Great-circle distance bound for shared context, in km.
    pub context_radius_km: f64,
    /// Start years may differ by at most this many years.
    pub context_year_window: i64,
}

impl Default for CausalConfig {
    fn default() -> Self {
        CausalConfig {
            causal_lexicon: DEFAULT_CAUSAL_LEXICON
                .iter()
                .map(|s| s.to_string())
                .collect(),
            context_radius_km: 300.0,
            context_year_window: 30,
        }
    }
}

impl CausalConfig {
    /// Check the config invariants: positive radius, non-negative
    /// window.
    pub fn validate(&self) -> Result<(), String> {
        if !(self.context_radius_km > 0.0) {
            return Err(format!(
                "context_radius_km must be positive, got {}",
                self.context_radius_km
            ));
        }
        if self.context_year_window < 0 {
            return Err(format!(
                "context_year_window must be non-negative, got {}",
                self.context_year_window
            ));
        }
        Ok(())
    }
}

// ===== Text utilities =====

/// Lowercased alphanumeric word tokens of a text.
pub fn tokens(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// True iff every token of `name` occurs as a token of `text` (and
/// `name` has at least one token).
pub fn mentions(text: &str, name: &str) -> bool {
    let name_tokens = tokens(name);
    if name_tokens.is_empty() {
        return false;
    }
    let text_tokens = tokens(text);
    name_tokens.iter().all(|n| text_tokens.contains(n))
}

/// The clause following each occurrence of `cue` in `text`, cut at the
/// next `.` or `;`. Matching is case-insensitive.
fn cue_clauses<'a>(text: &'a str, cue: &str) -> Vec<&'a str> {
    let haystack = text.to_lowercase();
    let needle = cue.to_lowercase();
    if needle.is_empty() {
        return Vec::new();
    }
    let mut clauses = Vec::new();
    let mut from = 0;
    while let Some(found) = haystack[from..].find(&needle) {
        let start = from + found + needle.len();
        let end = haystack[start..]
            .find(['.', ';'])
            .map(|i| start + i)
            .unwrap_or(haystack.len());
        // Offsets are valid for `text` too: lowercasing is 1:1 for the
        // ASCII cue terms and clause boundaries we search for.
        if text.is_char_boundary(start) && text.is_char_boundary(end) {
            clauses.push(&text[start..end]);
        }
        from = start;
    }
    clauses
}

// ===== Pairwise predicates =====

/// Non-blank value of an optional text field.
fn present(field: &Option<String>) -> Option<&str> {
    field.as_deref().map(str::trim).filter(|s| !s.is_empty())
}

/// Result, type, and agent of an event joined into one description.
fn description(e: &Event) -> String {
    [&e.result, &e.event_type, &e.agent]
        .iter()
        .filter_map(|f| present(f))
        .collect::<Vec<_>>()
        .join(". ")
}

/// True iff `text` mentions the agent or the location of `e`.
fn mentions_participants(text: &str, e: &Event) -> bool {
    present(&e.agent).is_some_and(|a| mentions(text, a))
        || present(&e.location).is_some_and(|l| mentions(text, l))
}

/// Plausible causation: e1 strictly precedes e2, and the texts link
/// them — one event's description names the other's agent or location,
/// or e1's result has a causal cue whose clause names e2's location or
/// agent. A heuristic over extracted text, nothing more.
pub fn may_have_caused(e1: &Event, e2: &Event, config: &CausalConfig) -> bool {
    if !event_before(e1, e2) {
        return false;
    }
    // Plain mention, either direction.
    if mentions_participants(&description(e2), e1) || mentions_participants(&description(e1), e2) {
        return true;
    }
    // Causal cue in e1's result whose clause names e2's participants.
    if let Some(result) = present(&e1.result) {
        for cue in &config.causal_lexicon {
            for clause in cue_clauses(result, cue) {
                if mentions_participants(clause, e2) {
                    return true;
                }
            }
        }
    }
    false
}

fn eq_ci(a: Option<&str>, b: Option<&str>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => x.eq_ignore_ascii_case(y),
        _ => false,
    }
}

/// Shared historical context: geographically close (within the radius
/// when both have coordinates, or equal region, or equal country) and,
/// when both events are dated, start years within the window. Events
/// with no geographic information at all never share a context.
pub fn same_historical_context(e1: &Event, e2: &Event, config: &CausalConfig) -> bool {
    let close = match (e1.latitude, e1.longitude, e2.latitude, e2.longitude) {
        (Some(lat1), Some(lon1), Some(lat2), Some(lon2)) => {
            haversine_km(lat1, lon1, lat2, lon2) <= config.context_radius_km
        }
        _ => false,
    };
    let geo = close
        || eq_ci(present(&e1.region), present(&e2.region))
        || eq_ci(present(&e1.country), present(&e2.country));
    if !geo {
        return false;
    }
    match (
        e1.time.as_ref().and_then(|t| t.start_year()),
        e2.time.as_ref().and_then(|t| t.start_year()),
    ) {
        (Some(y1), Some(y2)) => (y1 as i64 - y2 as i64).abs() <= config.context_year_window,
        _ => true,
    }
}

/// Three-event cascading causation: exactly the conjunction
/// event_before(e1,e2) ∧ may_have_caused(e1,e2) ∧ event_before(e2,e3)
/// ∧ may_have_caused(e2,e3) ∧ same_historical_context(e1,e3).
pub fn cascading_causation(e1: &Event, e2: &Event, e3: &Event, config: &CausalConfig) -> bool {
    event_before(e1, e2)
        && may_have_caused(e1, e2, config)
        && event_before(e2, e3)
        && may_have_caused(e2, e3, config)
        && same_historical_context(e1, e3, config)
}

/// All ordered event id triples of a graph satisfying
/// [`cascading_causation`], in natural id order. Exhaustive O(n³)
/// scan; fine at knowledge-base scale.
pub fn find_cascades(graph: &EventGraph, config: &CausalConfig) -> Vec<(String, String, String)> {
    let events = &graph.events;
    let mut cascades = Vec::new();
    for e1 in events {
        for e2 in events {
            if !event_before(e1, e2) || !may_have_caused(e1, e2, config) {
                continue;
            }
            for e3 in events {
                if event_before(e2, e3)
                    && may_have_caused(e2, e3, config)
                    && same_historical_context(e1, e3, config)
                {
                    cascades.push((e1.id.clone(), e2.id.clone(), e3.id.clone()));
                }
            }
        }
    }
    cascades.sort_by(|a, b| {
        natural_cmp(&a.0, &b.0)
            .then_with(|| natural_cmp(&a.1, &b.1))
            .then_with(|| natural_cmp(&a.2, &b.2))
    });
    cascades
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::temporal::parse_time;

    fn event(id: &str, time: &str) -> Event {
        let mut e = Event::new(id);
        e.time_raw = Some(time.to_string());
        e.time = Some(parse_time(time));
        e
    }

    #[test]
    fn mention_of_later_location_in_earlier_result() {
        let mut e1 = event("E1", "430 BC");
        e1.result = Some("plague spread in Athens".to_string());
        let mut e2 = event("E2", "429 BC");
        e2.location = Some("Athens".to_string());
        let config = CausalConfig::default();
        assert!(may_have_caused(&e1, &e2, &config));
        // The temporal gate is strict: same pair reversed is false.
        assert!(!may_have_caused(&e2, &e1, &config));
    }

    #[test]
    fn mention_of_earlier_agent_in_later_result() {
        let mut e1 = event("E1", "431 BC");
        e1.agent = Some("Archidamus".to_string());
        let mut e2 = event("E2", "430 BC");
        e2.result = Some("retreat of Archidamus from Attica".to_string());
        let config = CausalConfig::default();
        assert!(may_have_caused(&e1, &e2, &config));
    }

    #[test]
    fn cue_clause_scopes_the_mention() {
        let config = CausalConfig::default();
        let mut e1 = event("E1", "431 BC");
        e1.result = Some("the siege led to crowding in Athens".to_string());
        let mut e2 = event("E2", "430 BC");
        e2.location = Some("Athens".to_string());
        assert!(may_have_caused(&e1, &e2, &config));

        // The clause ends at ';': the cue's clause names famine only,
        // and no plain mention links the events either.
        let mut e3 = event("E3", "431 BC");
        e3.result = Some("drought led to famine; Corcyra was spared".to_string());
        let mut e4 = event("E4", "430 BC");
        e4.location = Some("Corcyra".to_string());
        e4.agent = Some("Corinthians".to_string());
        assert!(
            !mentions("famine", "Corcyra"),
            "clause must not leak past ';'"
        );
        // Plain mention still fires on the full text, so this pair is
        // linked; gate it out by renaming the location.
        e4.location = Some("Epidamnus".to_string());
        assert!(!may_have_caused(&e3, &e4, &config));
    }

    #[test]
    fn no_textual_link_means_no_causation() {
        let config = CausalConfig::default();
        let mut e1 = event("E1", "431 BC");
        e1.result = Some("the assembly voted because grain ran short".to_string());
        e1.agent = Some("Athenians".to_string());
        let mut e2 = event("E2", "430 BC");
        e2.location = Some("Corcyra".to_string());
        e2.agent = Some("Corinthians".to_string());
        assert!(!may_have_caused(&e1, &e2, &config));
    }

    #[test]
    fn may_have_caused_is_irreflexive() {
        let config = CausalConfig::default();
        let mut e = event("E1", "431 BC");
        e.result = Some("war caused ruin for Athens".to_string());
        e.location = Some("Athens".to_string());
        e.agent = Some("Athens".to_string());
        assert!(!may_have_caused(&e, &e, &config));
    }

    #[test]
    fn undated_events_never_cause() {
        let config = CausalConfig::default();
        let mut e1 = Event::new("E1");
        e1.result = Some("ruin came to Athens".to_string());
        let mut e2 = event("E2", "430 BC");
        e2.location = Some("Athens".to_string());
        assert!(!may_have_caused(&e1, &e2, &config));
    }

    #[test]
    fn context_by_region() {
        let config = CausalConfig::default();
        let mut e1 = event("E1", "431 BC");
        e1.region = Some("Hellas".to_string());
        let mut e2 = event("E2", "427 BC");
        e2.region = Some("hellas".to_string());
        assert!(same_historical_context(&e1, &e2, &config));
        // 500 years apart fails the window.
        let mut e3 = event("E3", "931 BC");
        e3.region = Some("Hellas".to_string());
        assert!(!same_historical_context(&e1, &e3, &config));
    }

    #[test]
    fn context_by_coordinates() {
        let config = CausalConfig::default();
        let mut e1 = event("E1", "431 BC");
        e1.latitude = Some(39.0742);
        e1.longitude = Some(21.8243);
        let mut e2 = event("E2", "430 BC");
        e2.latitude = Some(39.0742);
        e2.longitude = Some(21.8243);
        assert!(same_historical_context(&e1, &e2, &config));
        // Athens–Rome is about 1050 km, over the default radius.
        e2.latitude = Some(41.9028);
        e2.longitude = Some(12.4964);
        assert!(!same_historical_context(&e1, &e2, &config));
    }

    #[test]
    fn context_requires_some_geography() {
        let config = CausalConfig::default();
        let e1 = event("E1", "431 BC");
        let e2 = event("E2", "430 BC");
        assert!(!same_historical_context(&e1, &e2, &config));
        // One-sided geography is not enough either.
        let mut e3 = event("E3", "430 BC");
        e3.region = Some("Hellas".to_string());
        assert!(!same_historical_context(&e1, &e3, &config));
    }

    #[test]
    fn undated_events_can_share_context() {
        let config = CausalConfig::default();
        let mut e1 = Event::new("E1");
        e1.country = Some("Greece".to_string());
        let mut e2 = event("E2", "430 BC");
        e2.country = Some("Greece".to_string());
        assert!(same_historical_context(&e1, &e2, &config));
    }

    fn cascade_fixture() -> (Event, Event, Event) {
        let mut siege = event("Siege", "431 BC");
        siege.agent = Some("Archidamus".to_string());
        siege.latitude = Some(38.2200);
        siege.longitude = Some(23.2736);
        siege.result = Some("the siege led to crowding in Athens".to_string());
        let mut plague = event("Plague", "430 BC");
        plague.agent = Some("Athenians".to_string());
        plague.location = Some("Athens".to_string());
        plague.latitude = Some(37.9838);
        plague.longitude = Some(23.7275);
        plague.result = Some("the plague provoked anger against Pericles".to_string());
        let mut decline = event("Decline", "429 BC");
        decline.agent = Some("Pericles".to_string());
        decline.latitude = Some(37.9838);
        decline.longitude = Some(23.7275);
        decline.result = Some("loss of the generalship".to_string());
        (siege, plague, decline)
    }

    #[test]
    fn cascading_causation_equals_its_five_conjuncts() {
        let config = CausalConfig::default();
        let (siege, plague, decline) = cascade_fixture();
        let all = [&siege, &plague, &decline];
        for e1 in all {
            for e2 in all {
                for e3 in all {
                    let conjunction = event_before(e1, e2)
                        && may_have_caused(e1, e2, &config)
                        && event_before(e2, e3)
                        && may_have_caused(e2, e3, &config)
                        && same_historical_context(e1, e3, &config);
                    assert_eq!(
                        cascading_causation(e1, e2, e3, &config),
                        conjunction,
                        "triple ({}, {}, {})",
                        e1.id,
                        e2.id,
                        e3.id
                    );
                }
            }
        }
        assert!(cascading_causation(&siege, &plague, &decline, &config));
    }

    #[test]
    fn find_cascades_is_order_invariant() {
        let config = CausalConfig::default();
        let (siege, plague, decline) = cascade_fixture();
        let mut graph = EventGraph::new();
        graph.events = vec![siege.clone(), plague.clone(), decline.clone()];
        let found = find_cascades(&graph, &config);
        assert_eq!(
            found,
            vec![(
                "Siege".to_string(),
                "Plague".to_string(),
                "Decline".to_string()
            )]
        );
        let mut shuffled = EventGraph::new();
        shuffled.events = vec![decline, siege, plague];
        assert_eq!(find_cascades(&shuffled, &config), found);
    }

    #[test]
    fn empty_graph_has_no_cascades() {
        assert!(find_cascades(&EventGraph::new(), &CausalConfig::default()).is_empty());
    }

    #[test]
    fn config_invariants_are_checked() {
        let mut config = CausalConfig::default();
        assert!(config.validate().is_ok());
        config.context_radius_km = 0.0;
        assert!(config.validate().is_err());
        config.context_radius_km = 300.0;
        config.context_year_window = -1;
        assert!(config.validate().is_err());
    }
}
