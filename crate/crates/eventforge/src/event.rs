//! The event record model and its mapping to and from Turtle
//! documents.
//!
//! An event is a subject with an rdf:type and up to ten known
//! properties (hasType, hasAgent, hasTime, hasLocation, hasLatitude,
//! hasLongitude, hasCountry, hasRegion, hasLocationSource, hasResult).
//! Lifting a document groups triples by subject, fills those fields,
//! normalizes the time expression, validates coordinates, and records
//! every irregularity as a [`Defect`] instead of failing: a defective
//! knowledge base is still a knowledge base.
//!
//! Serialization is canonical: events sorted by natural id order,
//! classes first, known properties in a fixed order, remaining
//! properties sorted by name, coordinates always typed as xsd:double.
//! Unrecognized subjects (no rdf:type) ride along as orphan triples so
//! a round trip loses nothing.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::temporal::{parse_time, TimeSpec};
use crate::turtle::{
    self, Document, Literal, Name, Object, ParseError, Triple, XSD_NS,
};

/// The known event properties, in canonical (serialization) order.
pub const EVENT_PROPERTIES: [&str; 10] = [
    "hasType",
    "hasAgent",
    "hasTime",
    "hasLocation",
    "hasLatitude",
    "hasLongitude",
    "hasCountry",
    "hasRegion",
    "hasLocationSource",
    "hasResult",
];

/// Default prefix label for event vocabulary when a document provides
/// no hint.
pub const DEFAULT_EVENT_PREFIX: &str = "ste";
/// Namespace bound to [`DEFAULT_EVENT_PREFIX`] when absent.
pub const DEFAULT_EVENT_NS: &str = "http://example.org/ste#";

// ===== Records =====

/// One historical event.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    /// Unique id within the graph (subject local name, possibly
    /// suffixed by duplicate renaming).
    pub id: String,
    /// Prefix label the subject was written under, kept for re-rendering.
    pub prefix: String,
    /// rdf:type objects, in document order.
    pub classes: Vec<Name>,
    pub event_type: Option<String>,
    pub agent: Option<String>,
    pub time_raw: Option<String>,
    /// Normalized form of `time_raw`.
    pub time: Option<TimeSpec>,
    pub location: Option<String>,
    pub latitude: Option<f64>,
    pub longitude: Option<f64>,
    pub country: Option<String>,
    pub region: Option<String>,
    pub location_source: Option<String>,
    pub result: Option<String>,
    /// Properties outside the known ten, keyed by local name. The
    /// original predicate spelling and all objects are preserved.
    pub extras: BTreeMap<String, (Name, Vec<Object>)>,
}

impl Event {
    pub fn new(id: &str) -> Self {
        Event {
            id: id.to_string(),
            prefix: DEFAULT_EVENT_PREFIX.to_string(),
            classes: Vec::new(),
            event_type: None,
            agent: None,
            time_raw: None,
            time: None,
            location: None,
            latitude: None,
            longitude: None,
            country: None,
            region: None,
            location_source: None,
            result: None,
            extras: BTreeMap::new(),
        }
    }

    /// Text the event contributes to textual reasoning: type, agent,
    /// location, result, and any extra literal values.
    pub fn narrative_text(&self) -> String {
        let mut parts: Vec<&str> = Vec::new();
        for field in [
            &self.event_type,
            &self.agent,
            &self.location,
            &self.result,
        ] {
            if let Some(s) = field {
                parts.push(s);
            }
        }
        let mut text = parts.join(" ");
        for (_, (_, objects)) in &self.extras {
            for object in objects {
                if let Object::Literal(lit) = object {
                    text.push(' ');
                    text.push_str(&lit.lexical);
                }
            }
        }
        text
    }

    fn known_fields(&self) -> [(&'static str, Option<String>); 10] {
        [
            ("hasType", self.event_type.clone()),
            ("hasAgent", self.agent.clone()),
            ("hasTime", self.time_raw.clone()),
            ("hasLocation", self.location.clone()),
            ("hasLatitude", self.latitude.map(|v| v.to_string())),
            ("hasLongitude", self.longitude.map(|v| v.to_string())),
            ("hasCountry", self.country.clone()),
            ("hasRegion", self.region.clone()),
            ("hasLocationSource", self.location_source.clone()),
            ("hasResult", self.result.clone()),
        ]
    }

    /// Fraction of the ten known properties that are present and
    /// non-blank. 1.0 is a fully described event.
    pub fn completeness(&self) -> f64 {
        let present = self
            .known_fields()
            .iter()
            .filter(|(_, v)| v.as_deref().is_some_and(|s| !s.trim().is_empty()))
            .count();
        present as f64 / EVENT_PROPERTIES.len() as f64
    }

    /// JSON object with the id, classes, known properties (null when
    /// absent), extra properties, and completeness.
    pub fn to_json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("id".to_string(), json!(self.id));
        obj.insert(
            "classes".to_string(),
            json!(self
                .classes
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()),
        );
        obj.insert("hasType".to_string(), json!(self.event_type));
        obj.insert("hasAgent".to_string(), json!(self.agent));
        obj.insert("hasTime".to_string(), json!(self.time_raw));
        obj.insert(
            "timeNormalized".to_string(),
            match &self.time {
                Some(t) if t.is_resolved() => json!(t.to_string()),
                _ => Value::Null,
            },
        );
        obj.insert("hasLocation".to_string(), json!(self.location));
        obj.insert("hasLatitude".to_string(), json!(self.latitude));
        obj.insert("hasLongitude".to_string(), json!(self.longitude));
        obj.insert("hasCountry".to_string(), json!(self.country));
        obj.insert("hasRegion".to_string(), json!(self.region));
        obj.insert(
            "hasLocationSource".to_string(),
            json!(self.location_source),
        );
        obj.insert("hasResult".to_string(), json!(self.result));
        let extras: serde_json::Map<String, Value> = self
            .extras
            .iter()
            .map(|(local, (_, objects))| {
                let values: Vec<Value> = objects
                    .iter()
                    .map(|o| match o {
                        Object::Literal(l) => json!(l.lexical),
                        Object::Name(n) => json!(n.to_string()),
                    })
                    .collect();
                (local.clone(), Value::Array(values))
            })
            .collect();
        obj.insert("extras".to_string(), Value::Object(extras));
        obj.insert("completeness".to_string(), json!(self.completeness()));
        Value::Object(obj)
    }
}

// ===== Defects =====

/// Why a lifted graph deviates from its source document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DefectKind {
    /// Subject id already taken; this event was renamed.
    DuplicateId { renamed_to: String },
    /// A known single-valued property appeared more than once; the
    /// first value was kept.
    MultiValued { property: String },
    /// Latitude/longitude value unparseable or outside valid range;
    /// the field was cleared.
    CoordinateOutOfRange { property: String, value: String },
    /// Exactly one of latitude/longitude is present.
    LoneCoordinate,
    /// The normalized time starts at year zero, which no historical
    /// calendar contains.
    YearZero,
    /// Subject carries event properties but no rdf:type; kept as
    /// orphan triples.
    NonEventSubject,
}

impl std::fmt::Display for DefectKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DefectKind::DuplicateId { renamed_to } => {
                write!(f, "duplicate id, renamed to '{}'", renamed_to)
            }
            DefectKind::MultiValued { property } => {
                write!(f, "repeated property '{}', first value kept", property)
            }
            DefectKind::CoordinateOutOfRange { property, value } => {
                write!(f, "invalid coordinate {} = \"{}\", cleared", property, value)
            }
            DefectKind::LoneCoordinate => write!(f, "only one coordinate present"),
            DefectKind::YearZero => write!(f, "time normalizes to year zero"),
            DefectKind::NonEventSubject => {
                write!(f, "event properties on a subject with no rdf:type")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Defect {
    /// Id (or subject text, for non-events) the defect belongs to.
    pub event_id: String,
    pub kind: DefectKind,
}

// ===== Graph =====

/// A lifted knowledge base: events plus everything needed to render
/// the document back out.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventGraph {
    pub prefixes: BTreeMap<String, String>,
    /// Events in natural id order.
    pub events: Vec<Event>,
    /// Triples of subjects that are not events, in document order.
    pub orphans: Vec<Triple>,
    /// Irregularities found while lifting.
    pub defects: Vec<Defect>,
}

impl EventGraph {
    pub fn new() -> Self {
        EventGraph::default()
    }

    /// Parse Turtle text strictly and lift it.
    pub fn load(text: &str) -> Result<EventGraph, ParseError> {
        Ok(EventGraph::from_document(&turtle::parse_turtle(text)?))
    }

    /// Parse Turtle text with recovery and lift whatever survived.
    pub fn load_recovering(text: &str) -> (EventGraph, Vec<ParseError>) {
        let (doc, errors) = turtle::parse_turtle_recovering(text);
        (EventGraph::from_document(&doc), errors)
    }

    pub fn event(&self, id: &str) -> Option<&Event> {
        self.events.iter().find(|e| e.id == id)
    }

    /// Lift a parsed document into events.
    pub fn from_document(doc: &Document) -> EventGraph {
        let mut graph = EventGraph {
            prefixes: doc.prefixes.clone(),
            ..EventGraph::default()
        };

        // Group triples into contiguous subject blocks. Two separate
        // blocks naming the same subject stay separate so the second
        // one is caught as a duplicate id instead of being silently
        // merged.
        let mut grouped: Vec<(&Name, Vec<&Triple>)> = Vec::new();
        for triple in &doc.triples {
            match grouped.last_mut() {
                Some((s, ts)) if **s == triple.subject => ts.push(triple),
                _ => grouped.push((&triple.subject, vec![triple])),
            }
        }

        let mut taken_ids: Vec<String> = Vec::new();
        for (subject, triples) in &grouped {
            let has_type = triples.iter().any(|t| t.predicate == Name::rdf_type());
            if !has_type {
                let has_event_property = triples.iter().any(|t| {
                    EVENT_PROPERTIES.contains(&t.predicate.local_text())
                });
                if has_event_property {
                    graph.defects.push(Defect {
                        event_id: subject.local_text().to_string(),
                        kind: DefectKind::NonEventSubject,
                    });
                }
                graph.orphans.extend(triples.iter().map(|t| (*t).clone()));
                continue;
            }
            let mut event = lift_event(subject, triples, &mut graph.defects);
            // Duplicate ids get a "#N" suffix so every event stays
            // addressable; the defect records the rename.
            if taken_ids.contains(&event.id) {
                let mut n = 2;
                let renamed = loop {
                    let candidate = format!("{}#{}", event.id, n);
                    if !taken_ids.contains(&candidate) {
                        break candidate;
                    }
                    n += 1;
                };
                graph.defects.push(Defect {
                    event_id: event.id.clone(),
                    kind: DefectKind::DuplicateId {
                        renamed_to: renamed.clone(),
                    },
                });
                event.id = renamed;
            }
            taken_ids.push(event.id.clone());
            graph.events.push(event);
        }

        graph.events.sort_by(|a, b| natural_cmp(&a.id, &b.id));
        graph
    }

    /// Render back to a document in canonical order.
    pub fn to_document(&self) -> Document {
        let mut doc = Document {
            prefixes: self.prefixes.clone(),
            triples: Vec::new(),
        };
        let needs_xsd = self
            .events
            .iter()
            .any(|e| e.latitude.is_some() || e.longitude.is_some());
        if needs_xsd {
            doc.prefixes
                .entry("xsd".to_string())
                .or_insert_with(|| XSD_NS.to_string());
        }
        for event in &self.events {
            let subject = Name::prefixed(&event.prefix, &event.id);
            let mut push = |predicate: Name, object: Object| {
                doc.triples.push(Triple {
                    subject: subject.clone(),
                    predicate,
                    object,
                });
            };
            for class in &event.classes {
                push(Name::rdf_type(), Object::Name(class.clone()));
            }
            for (local, value) in event.known_fields() {
                let Some(value) = value else { continue };
                let literal = if local == "hasLatitude" || local == "hasLongitude" {
                    Literal::typed(&value, Name::prefixed("xsd", "double"))
                } else {
                    Literal::plain(&value)
                };
                push(
                    Name::prefixed(&event.prefix, local),
                    Object::Literal(literal),
                );
            }
            for (_, (predicate, objects)) in &event.extras {
                for object in objects {
                    push(predicate.clone(), object.clone());
                }
            }
        }
        doc.triples.extend(self.orphans.iter().cloned());
        doc
    }

    /// Canonical Turtle text for this graph.
    pub fn to_turtle(&self) -> String {
        turtle::serialize_turtle(&self.to_document())
    }

    /// JSON array of event objects.
    pub fn to_json(&self) -> Value {
        Value::Array(self.events.iter().map(Event::to_json).collect())
    }
}

/// Build one event from its subject's triples, recording defects.
fn lift_event(subject: &Name, triples: &[&Triple], defects: &mut Vec<Defect>) -> Event {
    let id = subject.local_text().to_string();
    let mut event = Event::new(&id);
    if let Name::Prefixed { prefix, .. } = subject {
        event.prefix = prefix.clone();
    }

    let mut defect = |kind: DefectKind| {
        defects.push(Defect {
            event_id: id.clone(),
            kind,
        });
    };

    for triple in triples {
        if triple.predicate == Name::rdf_type() {
            match &triple.object {
                Object::Name(class) => event.classes.push(class.clone()),
                // A literal rdf:type is nonsense; keep it as an extra
                // so nothing is dropped.
                Object::Literal(_) => {
                    let entry = event
                        .extras
                        .entry("type".to_string())
                        .or_insert_with(|| (Name::rdf_type(), Vec::new()));
                    entry.1.push(triple.object.clone());
                }
            }
            continue;
        }
        let local = triple.predicate.local_text().to_string();
        let known = EVENT_PROPERTIES.contains(&local.as_str());
        let literal = match &triple.object {
            Object::Literal(l) => Some(l.lexical.clone()),
            Object::Name(_) => None,
        };
        match (known, literal) {
            (true, Some(value)) => {
                let slot: &mut Option<String> = match local.as_str() {
                    "hasType" => &mut event.event_type,
                    "hasAgent" => &mut event.agent,
                    "hasTime" => &mut event.time_raw,
                    "hasLocation" => &mut event.location,
                    "hasCountry" => &mut event.country,
                    "hasRegion" => &mut event.region,
                    "hasLocationSource" => &mut event.location_source,
                    "hasResult" => &mut event.result,
                    "hasLatitude" | "hasLongitude" => {
                        let (slot, min, max) = if local == "hasLatitude" {
                            (&mut event.latitude, -90.0, 90.0)
                        } else {
                            (&mut event.longitude, -180.0, 180.0)
                        };
                        if slot.is_some() {
                            defect(DefectKind::MultiValued { property: local });
                        } else {
                            match value.parse::<f64>() {
                                Ok(v) if v.is_finite() && v >= min && v <= max => {
                                    *slot = Some(v);
                                }
                                _ => defect(DefectKind::CoordinateOutOfRange {
                                    property: local,
                                    value,
                                }),
                            }
                        }
                        continue;
                    }
                    _ => unreachable!("EVENT_PROPERTIES covers all known locals"),
                };
                if slot.is_some() {
                    defect(DefectKind::MultiValued { property: local });
                } else {
                    *slot = Some(value);
                }
            }
            // Known property with a name object, or any unknown
            // property: keep verbatim as an extra.
            _ => {
                let entry = event
                    .extras
                    .entry(local)
                    .or_insert_with(|| (triple.predicate.clone(), Vec::new()));
                entry.1.push(triple.object.clone());
            }
        }
    }

    event.time = event.time_raw.as_deref().map(parse_time);
    if let Some(time) = &event.time {
        if time.start_year() == Some(0) || time.latest().map(|p| p.year) == Some(0) {
            defect(DefectKind::YearZero);
        }
    }
    if event.latitude.is_some() != event.longitude.is_some() {
        defect(DefectKind::LoneCoordinate);
    }
    event
}

/// Order ids so numeric runs compare as numbers: Event2 < Event10.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let mut ac = a.chars().peekable();
    let mut bc = b.chars().peekable();
    loop {
        match (ac.peek().copied(), bc.peek().copied()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) if x.is_ascii_digit() && y.is_ascii_digit() => {
                let mut xs = String::new();
                while let Some(c) = ac.peek().copied().filter(char::is_ascii_digit) {
                    xs.push(c);
                    ac.next();
                }
                let mut ys = String::new();
                while let Some(c) = bc.peek().copied().filter(char::is_ascii_digit) {
                    ys.push(c);
                    bc.next();
                }
                let xt = xs.trim_start_matches('0');
                let yt = ys.trim_start_matches('0');
                let ord = xt
                    .len()
                    .cmp(&yt.len())
                    .then_with(|| xt.cmp(yt))
                    // Equal values: more leading zeros sorts later.
                    .then_with(|| xs.len().cmp(&ys.len()));
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            (Some(x), Some(y)) => {
                let ord = x.cmp(&y);
                if ord != Ordering::Equal {
                    return ord;
                }
                ac.next();
                bc.next();
            }
        }
    }
}
