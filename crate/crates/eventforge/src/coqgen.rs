//! Translation of event graphs into self-contained Coq source files.
//!
//! The emitted file declares an inductive `EventClass` type (one
//! constructor per accepted class), the `TimePoint` alias with
//! BC-negative years, one `Definition` per event with coordinates in
//! integer micro-degrees, boolean causal predicates, and theorems
//! proved by computation.
//!
//! Design notes:
//! - Coordinates become integer micro-degrees so all emitted
//!   arithmetic stays in `Z` and every proof is decidable; real-valued
//!   coordinates would drag in classical real analysis.
//! - `may_have_caused` and `same_historical_context` are emitted as
//!   precomputed truth tables (lookup over `(nat * nat)` pairs), not
//!   re-implementations of the Rust text heuristics: string processing
//!   in Coq adds no verification value, and the table preserves
//!   extensional behavior exactly.
//! - A soundness gate: every theorem is emitted only after the
//!   in-process evaluator confirms the claim, so `proved = true`
//!   manifest entries always carry mechanical proofs (`reflexivity`
//!   over closed terms). Claims the evaluator rejects are emitted
//!   negated, or omitted, per [`CoqgenConfig`].
//! - `cascading_causation` is stated in boolean form (five `= true`
//!   equalities joined by `/\`), with `temporal_precedes` kept as a
//!   notation alias of `event_before`; the file header comment repeats
//!   this note for readers of the generated source.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::causal::{find_cascades, may_have_caused, same_historical_context, CausalConfig};
use crate::event::{Event, EventGraph};
use crate::ontology::{ClassReport, Verdict};
use crate::temporal::{is_bc_event, TimePoint, TimeSpec};

// ===== Public types =====

#[derive(Debug, Clone)]
pub struct CoqgenConfig {
    /// Emit constructors for Suspect classes (marked by a comment).
    pub include_suspect: bool,
    /// Emit a negated theorem when a claim evaluates false; when off,
    /// false claims are omitted entirely. True claims are unaffected.
    pub negate_false_theorems: bool,
}

impl Default for CoqgenConfig {
    fn default() -> Self {
        CoqgenConfig {
            include_suspect: false,
            negate_false_theorems: true,
        }
    }
}

/// One emitted theorem: its Coq name, whether the emitted statement is
/// proved (always true under the soundness gate unless a claim was
/// omitted), and the event ids or class names it is about.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremEntry {
    pub name: String,
    pub proved: bool,
    pub about: Vec<String>,
}

/// A generated Coq development.
#[derive(Debug, Clone, PartialEq)]
pub struct CoqArtifact {
    /// Full file content.
    pub source_text: String,
    /// Every emitted identifier, in order of declaration.
    pub declared_names: Vec<String>,
    pub theorem_manifest: Vec<TheoremEntry>,
    /// (requested, actual) pairs for identifiers that had to be
    /// renamed to stay unique.
    pub renames: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoqgenError {
    #[error("class '{class}' sanitizes to constructor '{constructor}', which is already taken")]
    DuplicateConstructorName { class: String, constructor: String },
    #[error("event '{event}': {field} value {value} is not representable")]
    UnrepresentableValue {
        event: String,
        field: String,
        value: String,
    },
}

// ===== In-process evaluators (the soundness gate) =====

/// Class local names judged DiscoveredValid.
pub fn discovered_classes(reports: &[ClassReport]) -> Vec<String> {
    reports
        .iter()
        .filter(|r| r.verdict == Verdict::DiscoveredValid)
        .map(|r| r.class.clone())
        .collect()
}

/// Does this event bear any of the named classes?
fn bears_any(event: &Event, classes: &[String]) -> bool {
    event
        .classes
        .iter()
        .any(|c| classes.iter().any(|d| d == c.local_text()))
}

/// The coherence claim: every event bearing a DiscoveredValid class
/// has a resolved time and a non-blank agent. This is what the
/// generated `rag_discoveries_coherent` theorem states; the generator
/// checks it here before emitting.
pub fn discoveries_coherent(graph: &EventGraph, reports: &[ClassReport]) -> bool {
    let discovered = discovered_classes(reports);
    graph.events.iter().all(|e| {
        !bears_any(e, &discovered)
            || (e.time.as_ref().is_some_and(TimeSpec::is_resolved)
                && e.agent.as_deref().is_some_and(|a| !a.trim().is_empty()))
    })
}

/// The BC claim: at least one event is dated, and every dated event is
/// BC. `None` when nothing is dated (the theorem is then omitted as
/// vacuous).
pub fn all_dated_bc(graph: &EventGraph) -> Option<bool> {
    let dated: Vec<&Event> = graph
        .events
        .iter()
        .filter(|e| e.time.as_ref().is_some_and(TimeSpec::is_resolved))
        .collect();
    if dated.is_empty() {
        return None;
    }
    Some(dated.into_iter().all(is_bc_event))
}

// ===== Identifier hygiene =====

/// Names already taken by the fixed scaffolding of every emitted file.
const RESERVED_NAMES: [&str; 37] = [
    "EventClass",
    "event_class_eqb",
    "parent_class",
    "TimePoint",
    "tp_year",
    "tp_before",
    "Event",
    "mkEvent",
    "event_id",
    "classes",
    "event_type",
    "agent",
    "time",
    "time_end",
    "location",
    "latitude_udeg",
    "longitude_udeg",
    "country",
    "region",
    "location_source",
    "result",
    "all_events",
    "is_bc_event",
    "event_latest",
    "event_before",
    "temporal_precedes",
    "pair_inb",
    "causal_pairs",
    "context_pairs",
    "may_have_caused",
    "same_historical_context",
    "cascading_causation",
    "discovered_classes",
    "bears_discovered",
    "has_time",
    "has_agent",
    "coherent_event",
];

/// Rewrite a name so it matches `[A-Za-z_][A-Za-z0-9_]*`.
pub fn sanitize_identifier(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for c in name.chars() {
        if c.is_ascii_alphanumeric() || c == '_' {
            out.push(c);
        } else {
            out.push('_');
        }
    }
    if out.is_empty() || out.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        out.insert(0, '_');
    }
    out
}

/// Allocates unique identifiers, resolving collisions with numeric
/// suffixes and recording every rename.
struct NamePool {
    used: BTreeSet<String>,
    renames: Vec<(String, String)>,
}

impl NamePool {
    fn new() -> Self {
        NamePool {
            used: RESERVED_NAMES.iter().map(|s| s.to_string()).collect(),
            renames: Vec::new(),
        }
    }

    fn claim(&mut self, desired: &str) -> String {
        let base = sanitize_identifier(desired);
        let mut candidate = base.clone();
        let mut n = 2;
        while self.used.contains(&candidate) {
            candidate = format!("{}_{}", base, n);
            n += 1;
        }
        self.used.insert(candidate.clone());
        if candidate != desired {
            self.renames.push((desired.to_string(), candidate.clone()));
        }
        candidate
    }
}

// ===== Value rendering =====

/// Escape for a Coq string literal: double quotes are doubled.
fn coq_string(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// Render a signed integer as a Z literal usable in any position.
fn coq_z(value: i64) -> String {
    if value < 0 {
        format!("((-{})%Z)", -(value as i128))
    } else {
        format!("({}%Z)", value)
    }
}

/// Render an optional time point as `option TimePoint`.
fn coq_time(point: Option<&TimePoint>) -> String {
    match point {
        None => "None".to_string(),
        Some(p) => {
            let year = if p.year < 0 {
                format!("(-{})%Z", -(p.year as i64))
            } else {
                format!("{}%Z", p.year)
            };
            format!(
                "Some ({}, {}, {})",
                year,
                p.month.unwrap_or(0),
                p.day.unwrap_or(0)
            )
        }
    }
}

/// Degrees to integer micro-degrees.
fn micro_degrees(event: &str, field: &str, value: f64) -> Result<i64, CoqgenError> {
    let scaled = value * 1e6;
    if !scaled.is_finite() || scaled.abs() > i64::MAX as f64 {
        return Err(CoqgenError::UnrepresentableValue {
            event: event.to_string(),
            field: field.to_string(),
            value: value.to_string(),
        });
    }
    Ok(scaled.round() as i64)
}

// ===== Emission =====

struct ClassInfo {
    /// Class local name -> constructor, in declaration order.
    constructors: Vec<(String, String)>,
    /// Constructors of DiscoveredValid classes.
    discovered: Vec<String>,
}

impl ClassInfo {
    fn constructor_for(&self, local: &str) -> Option<&str> {
        self.constructors
            .iter()
            .find(|(class, _)| class == local)
            .map(|(_, ctor)| ctor.as_str())
    }
}

fn emit_types_section(
    reports: &[ClassReport],
    config: &CoqgenConfig,
    declared: &mut Vec<String>,
) -> Result<(String, ClassInfo), CoqgenError> {
    let mut constructors: Vec<(String, String)> = vec![("Event".to_string(), "EC_Event".to_string())];
    let mut suspect_ctors: BTreeSet<String> = BTreeSet::new();
    let mut discovered: Vec<String> = Vec::new();
    for report in reports {
        if report.class == "Event" {
            continue;
        }
        let included = match report.verdict {
            Verdict::Standard | Verdict::DiscoveredValid => true,
            Verdict::Suspect => config.include_suspect,
        };
        if !included {
            continue;
        }
        let ctor = format!("EC_{}", sanitize_identifier(&report.class));
        if constructors.iter().any(|(_, c)| *c == ctor) {
            return Err(CoqgenError::DuplicateConstructorName {
                class: report.class.clone(),
                constructor: ctor,
            });
        }
        if report.verdict == Verdict::Suspect {
            suspect_ctors.insert(ctor.clone());
        }
        if report.verdict == Verdict::DiscoveredValid {
            discovered.push(ctor.clone());
        }
        constructors.push((report.class.clone(), ctor));
    }

    let mut out = String::new();
    out.push_str("(* ===== Event classes ===== *)\n\n");
    out.push_str("Inductive EventClass : Type :=\n");
    for (i, (_, ctor)) in constructors.iter().enumerate() {
        let marker = if suspect_ctors.contains(ctor) {
            " (* suspect *)"
        } else {
            ""
        };
        let terminator = if i + 1 == constructors.len() { "." } else { "" };
        let _ = writeln!(out, "  | {}{}{}", ctor, marker, terminator);
    }
    out.push('\n');
    declared.push("EventClass".to_string());
    declared.extend(constructors.iter().map(|(_, c)| c.clone()));

    out.push_str("Definition event_class_eqb (a b : EventClass) : bool :=\n");
    out.push_str("  match a, b with\n");
    for (_, ctor) in &constructors {
        let _ = writeln!(out, "  | {}, {} => true", ctor, ctor);
    }
    // With a single constructor the diagonal is already exhaustive and
    // a wildcard clause would be rejected as redundant.
    if constructors.len() > 1 {
        out.push_str("  | _, _ => false\n");
    }
    out.push_str("  end.\n\n");
    declared.push("event_class_eqb".to_string());

    out.push_str(
        "(* Flat hierarchy: every accepted class specializes EC_Event. *)\n\
         Definition parent_class (c : EventClass) : option EventClass :=\n\
         \x20 match c with\n\
         \x20 | EC_Event => None\n",
    );
    if constructors.len() > 1 {
        out.push_str("  | _ => Some EC_Event\n");
    }
    out.push_str("  end.\n\n");
    declared.push("parent_class".to_string());

    out.push_str("(* ===== Time ===== *)\n\n");
    out.push_str("Definition TimePoint := (Z * nat * nat).\n\n");
    out.push_str(
        "Definition tp_year (t : TimePoint) : Z :=\n\
         \x20 match t with (y, _, _) => y end.\n\n",
    );
    out.push_str(
        "(* Strict chronological order at the finest granularity both\n\
         \x20  sides share; month or day 0 means unknown. *)\n\
         Definition tp_before (a b : TimePoint) : bool :=\n\
         \x20 match a, b with\n\
         \x20 | (ya, ma, da), (yb, mb, db) =>\n\
         \x20     if Z.ltb ya yb then true\n\
         \x20     else if Z.ltb yb ya then false\n\
         \x20     else if orb (Nat.eqb ma 0) (Nat.eqb mb 0) then false\n\
         \x20     else if Nat.ltb ma mb then true\n\
         \x20     else if Nat.ltb mb ma then false\n\
         \x20     else if orb (Nat.eqb da 0) (Nat.eqb db 0) then false\n\
         \x20     else Nat.ltb da db\n\
         \x20 end.\n\n",
    );
    declared.push("TimePoint".to_string());
    declared.push("tp_year".to_string());
    declared.push("tp_before".to_string());

    Ok((
        out,
        ClassInfo {
            constructors,
            discovered,
        },
    ))
}

struct EventsInfo {
    /// Event id -> (Coq definition name, index in all_events).
    names: BTreeMap<String, (String, usize)>,
    /// Definition names in emission order.
    order: Vec<String>,
}

fn emit_events_section(
    graph: &EventGraph,
    classes: &ClassInfo,
    pool: &mut NamePool,
    declared: &mut Vec<String>,
) -> Result<(String, EventsInfo), CoqgenError> {
    let mut out = String::new();
    out.push_str("(* ===== Events ===== *)\n\n");
    out.push_str(
        "Record Event : Type := mkEvent {\n\
         \x20 event_id : nat;\n\
         \x20 classes : list EventClass;\n\
         \x20 event_type : string;\n\
         \x20 agent : string;\n\
         \x20 time : option TimePoint;\n\
         \x20 time_end : option TimePoint;\n\
         \x20 location : string;\n\
         \x20 latitude_udeg : option Z;\n\
         \x20 longitude_udeg : option Z;\n\
         \x20 country : string;\n\
         \x20 region : string;\n\
         \x20 location_source : string;\n\
         \x20 result : string\n\
         }.\n\n",
    );
    declared.push("Event".to_string());

    let mut info = EventsInfo {
        names: BTreeMap::new(),
        order: Vec::new(),
    };

    for (index, event) in graph.events.iter().enumerate() {
        let name = pool.claim(&format!("event_{}", event.id.to_lowercase()));
        let ctors: Vec<&str> = {
            let mut seen = BTreeSet::new();
            event
                .classes
                .iter()
                .filter_map(|c| classes.constructor_for(c.local_text()))
                .filter(|c| seen.insert(c.to_string()))
                .collect()
        };
        let (start, end) = match &event.time {
            Some(TimeSpec::Point(p)) => (Some(p), None),
            Some(TimeSpec::Range { start, end }) => (Some(start), Some(end)),
            _ => (None, None),
        };
        let lat = match event.latitude {
            Some(v) => format!("Some {}", coq_z(micro_degrees(&event.id, "latitude", v)?)),
            None => "None".to_string(),
        };
        let lon = match event.longitude {
            Some(v) => format!("Some {}", coq_z(micro_degrees(&event.id, "longitude", v)?)),
            None => "None".to_string(),
        };
        let text = |v: &Option<String>| coq_string(v.as_deref().unwrap_or(""));

        let _ = writeln!(out, "Definition {} : Event := {{|", name);
        let _ = writeln!(out, "  event_id := {};", index);
        let _ = writeln!(out, "  classes := [{}];", ctors.join("; "));
        let _ = writeln!(out, "  event_type := {};", text(&event.event_type));
        let _ = writeln!(out, "  agent := {};", text(&event.agent));
        let _ = writeln!(out, "  time := {};", coq_time(start));
        let _ = writeln!(out, "  time_end := {};", coq_time(end));
        let _ = writeln!(out, "  location := {};", text(&event.location));
        let _ = writeln!(out, "  latitude_udeg := {};", lat);
        let _ = writeln!(out, "  longitude_udeg := {};", lon);
        let _ = writeln!(out, "  country := {};", text(&event.country));
        let _ = writeln!(out, "  region := {};", text(&event.region));
        let _ = writeln!(out, "  location_source := {};", text(&event.location_source));
        let _ = writeln!(out, "  result := {}", text(&event.result));
        out.push_str("|}.\n\n");

        declared.push(name.clone());
        info.names.insert(event.id.clone(), (name.clone(), index));
        info.order.push(name);
    }

    let _ = writeln!(
        out,
        "Definition all_events : list Event := [{}].\n",
        info.order.join("; ")
    );
    declared.push("all_events".to_string());

    Ok((out, info))
}

/// Render a truth table as a Coq list of nat pairs.
fn coq_pair_list(pairs: &[(usize, usize)]) -> String {
    if pairs.is_empty() {
        return "[]".to_string();
    }
    let items: Vec<String> = pairs
        .iter()
        .map(|(a, b)| format!("({}, {})", a, b))
        .collect();
    format!("[{}]", items.join("; "))
}

fn emit_predicates_section(
    graph: &EventGraph,
    causal: &CausalConfig,
    events: &EventsInfo,
    declared: &mut Vec<String>,
) -> String {
    // Precompute the pairwise truth tables over event indices.
    let mut caused: Vec<(usize, usize)> = Vec::new();
    let mut context: Vec<(usize, usize)> = Vec::new();
    for e1 in &graph.events {
        for e2 in &graph.events {
            let i = events.names[&e1.id].1;
            let j = events.names[&e2.id].1;
            if may_have_caused(e1, e2, causal) {
                caused.push((i, j));
            }
            if same_historical_context(e1, e2, causal) {
                context.push((i, j));
            }
        }
    }
    caused.sort_unstable();
    context.sort_unstable();

    let mut out = String::new();
    out.push_str("(* ===== Causal predicates ===== *)\n\n");
    out.push_str(
        "Definition is_bc_event (e : Event) : bool :=\n\
         \x20 match time e with\n\
         \x20 | Some (y, _, _) => Z.ltb y 0\n\
         \x20 | None => false\n\
         \x20 end.\n\n",
    );
    out.push_str(
        "Definition event_latest (e : Event) : option TimePoint :=\n\
         \x20 match time_end e with\n\
         \x20 | Some t => Some t\n\
         \x20 | None => time e\n\
         \x20 end.\n\n",
    );
    out.push_str(
        "(* Strict interval precedence: all of e1 is before all of e2. *)\n\
         Definition event_before (e1 e2 : Event) : bool :=\n\
         \x20 match event_latest e1, time e2 with\n\
         \x20 | Some t1, Some t2 => tp_before t1 t2\n\
         \x20 | _, _ => false\n\
         \x20 end.\n\n",
    );
    out.push_str("Notation temporal_precedes := event_before.\n\n");
    out.push_str(
        "Definition pair_inb (x y : nat) (ps : list (nat * nat)) : bool :=\n\
         \x20 existsb (fun p => andb (Nat.eqb (fst p) x) (Nat.eqb (snd p) y)) ps.\n\n",
    );
    out.push_str(
        "(* Pairwise tables computed by the extraction-side heuristics;\n\
         \x20  emitted as data so the predicates stay decidable here. *)\n",
    );
    let _ = writeln!(
        out,
        "Definition causal_pairs : list (nat * nat) :=\n  {}.\n",
        coq_pair_list(&caused)
    );
    let _ = writeln!(
        out,
        "Definition context_pairs : list (nat * nat) :=\n  {}.\n",
        coq_pair_list(&context)
    );
    out.push_str(
        "Definition may_have_caused (e1 e2 : Event) : bool :=\n\
         \x20 pair_inb (event_id e1) (event_id e2) causal_pairs.\n\n",
    );
    out.push_str(
        "Definition same_historical_context (e1 e2 : Event) : bool :=\n\
         \x20 pair_inb (event_id e1) (event_id e2) context_pairs.\n\n",
    );
    out.push_str(
        "Definition cascading_causation (e1 e2 e3 : Event) : Prop :=\n\
         \x20 event_before e1 e2 = true /\\\n\
         \x20 may_have_caused e1 e2 = true /\\\n\
         \x20 event_before e2 e3 = true /\\\n\
         \x20 may_have_caused e2 e3 = true /\\\n\
         \x20 same_historical_context e1 e3 = true.\n\n",
    );
    for name in [
        "is_bc_event",
        "event_latest",
        "event_before",
        "temporal_precedes",
        "pair_inb",
        "causal_pairs",
        "context_pairs",
        "may_have_caused",
        "same_historical_context",
        "cascading_causation",
    ] {
        declared.push(name.to_string());
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn emit_theorems_section(
    graph: &EventGraph,
    reports: &[ClassReport],
    cascades: &[(String, String, String)],
    classes: &ClassInfo,
    events: &EventsInfo,
    config: &CoqgenConfig,
    pool: &mut NamePool,
    declared: &mut Vec<String>,
    manifest: &mut Vec<TheoremEntry>,
) -> String {
    let mut out = String::new();
    out.push_str("(* ===== Theorems ===== *)\n\n");

    let _ = writeln!(
        out,
        "Definition discovered_classes : list EventClass :=\n  [{}].\n",
        classes.discovered.join("; ")
    );
    out.push_str(
        "Definition bears_discovered (e : Event) : bool :=\n\
         \x20 existsb (fun c => existsb (event_class_eqb c) discovered_classes) (classes e).\n\n",
    );
    out.push_str(
        "Definition has_time (e : Event) : bool :=\n\
         \x20 match time e with Some _ => true | None => false end.\n\n",
    );
    out.push_str(
        "Definition has_agent (e : Event) : bool :=\n\
         \x20 negb (String.eqb (agent e) \"\").\n\n",
    );
    out.push_str(
        "Definition coherent_event (e : Event) : bool :=\n\
         \x20 andb (has_time e) (has_agent e).\n\n",
    );
    for name in [
        "discovered_classes",
        "bears_discovered",
        "has_time",
        "has_agent",
        "coherent_event",
    ] {
        declared.push(name.to_string());
    }

    // Coherence of discovered classes, checked before stating.
    let discovered_names = discovered_classes(reports);
    let coherent = discoveries_coherent(graph, reports);
    if coherent {
        let name = pool.claim("rag_discoveries_coherent");
        let _ = writeln!(
            out,
            "(* Every event bearing a discovered class is dated and attributed. *)\n\
             Theorem {} :\n\
             \x20 forallb (fun e => implb (bears_discovered e) (coherent_event e))\n\
             \x20         all_events = true.\n\
             Proof. reflexivity. Qed.\n",
            name
        );
        declared.push(name.clone());
        manifest.push(TheoremEntry {
            name,
            proved: true,
            about: discovered_names,
        });
    } else if config.negate_false_theorems {
        let name = pool.claim("rag_discoveries_coherent_refuted");
        let _ = writeln!(
            out,
            "(* The coherence claim fails on this knowledge base; the\n\
             \x20  refutation is what holds. *)\n\
             Theorem {} :\n\
             \x20 forallb (fun e => implb (bears_discovered e) (coherent_event e))\n\
             \x20         all_events = false.\n\
             Proof. reflexivity. Qed.\n",
            name
        );
        declared.push(name.clone());
        manifest.push(TheoremEntry {
            name,
            proved: true,
            about: discovered_names,
        });
    }

    // One theorem per cascade found by the causal module.
    for (a, b, c) in cascades {
        let name = pool.claim(&format!(
            "cascade_{}_{}_{}",
            sanitize_identifier(&a.to_lowercase()),
            sanitize_identifier(&b.to_lowercase()),
            sanitize_identifier(&c.to_lowercase())
        ));
        let ea = &events.names[a].0;
        let eb = &events.names[b].0;
        let ec = &events.names[c].0;
        let _ = writeln!(
            out,
            "Theorem {} :\n\
             \x20 cascading_causation {} {} {}.\n\
             Proof. unfold cascading_causation. repeat split; reflexivity. Qed.\n",
            name, ea, eb, ec
        );
        declared.push(name.clone());
        manifest.push(TheoremEntry {
            name,
            proved: true,
            about: vec![a.clone(), b.clone(), c.clone()],
        });
    }

    // BC claim, only stated when some event is dated.
    if let Some(all_bc) = all_dated_bc(graph) {
        let dated_ids: Vec<String> = graph
            .events
            .iter()
            .filter(|e| e.time.as_ref().is_some_and(TimeSpec::is_resolved))
            .map(|e| e.id.clone())
            .collect();
        if all_bc {
            let name = pool.claim("all_events_bc");
            let _ = writeln!(
                out,
                "(* Every dated event in this knowledge base is BC. *)\n\
                 Theorem {} :\n\
                 \x20 forallb (fun e => implb (has_time e) (is_bc_event e)) all_events = true.\n\
                 Proof. reflexivity. Qed.\n",
                name
            );
            declared.push(name.clone());
            manifest.push(TheoremEntry {
                name,
                proved: true,
                about: dated_ids,
            });
        } else if config.negate_false_theorems {
            let name = pool.claim("all_events_bc_refuted");
            let _ = writeln!(
                out,
                "(* At least one dated event is not BC. *)\n\
                 Theorem {} :\n\
                 \x20 forallb (fun e => implb (has_time e) (is_bc_event e)) all_events = false.\n\
                 Proof. reflexivity. Qed.\n",
                name
            );
            declared.push(name.clone());
            manifest.push(TheoremEntry {
                name,
                proved: true,
                about: dated_ids,
            });
        }
    }

    out
}

/// Generate the complete Coq development for a graph.
///
/// Classifications should come from ontology validation of the same
/// graph; the causal config drives the truth tables and cascade
/// search. Output is deterministic for a given input.
pub fn emit_file(
    graph: &EventGraph,
    reports: &[ClassReport],
    causal: &CausalConfig,
    config: &CoqgenConfig,
) -> Result<CoqArtifact, CoqgenError> {
    let mut declared = Vec::new();
    let mut manifest = Vec::new();
    let mut pool = NamePool::new();

    let header = "\
(* Generated historical-event verification module.\n\
\x20  Event records, class types, and causal facts below are compiled\n\
\x20  from an event knowledge base; every theorem is closed under\n\
\x20  computation, so the proofs are mechanical.\n\n\
\x20  Note: cascading_causation is stated in boolean form (five\n\
\x20  `= true` conjuncts) rather than as bare Props, and\n\
\x20  temporal_precedes is a notation alias of event_before. *)\n\n\
Require Import ZArith.\n\
Require Import List.\n\
Require Import Coq.Strings.String.\n\
Import ListNotations.\n\
Open Scope string_scope.\n\n";

    let (types, classes) = emit_types_section(reports, config, &mut declared)?;
    let (events_text, events) = emit_events_section(graph, &classes, &mut pool, &mut declared)?;
    let predicates = emit_predicates_section(graph, causal, &events, &mut declared);
    let cascades = find_cascades(graph, causal);
    let theorems = emit_theorems_section(
        graph,
        reports,
        &cascades,
        &classes,
        &events,
        config,
        &mut pool,
        &mut declared,
        &mut manifest,
    );

    let source_text = format!("{}{}{}{}{}", header, types, events_text, predicates, theorems);
    Ok(CoqArtifact {
        source_text,
        declared_names: declared,
        theorem_manifest: manifest,
        renames: pool.renames,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::{validate_graph, ValidationConfig};

    const FIXTURE: &str = r#"@prefix ste: <http://example.org/ste#> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .

ste:Siege a ste:Event ;
    ste:hasType "siege" ;
    ste:hasAgent "Archidamus" ;
    ste:hasTime "431 BC" ;
    ste:hasLocation "Plataea" ;
    ste:hasLatitude "38.22"^^xsd:double ;
    ste:hasLongitude "23.2736"^^xsd:double ;
    ste:hasResult "the siege led to crowding in Athens" .

ste:Plague a ste:Event ;
    ste:hasType "plague" ;
    ste:hasAgent "Athenians" ;
    ste:hasTime "430 BC" ;
    ste:hasLocation "Athens" ;
    ste:hasLatitude "37.9838"^^xsd:double ;
    ste:hasLongitude "23.7275"^^xsd:double ;
    ste:hasResult "the plague provoked anger against Pericles" .

ste:Decline a ste:Event ;
    ste:hasType "political decline" ;
    ste:hasAgent "Pericles" ;
    ste:hasTime "429 BC" ;
    ste:hasLocation "Athens" ;
    ste:hasLatitude "37.9838"^^xsd:double ;
    ste:hasLongitude "23.7275"^^xsd:double ;
    ste:hasResult "loss of the generalship" .
"#;

    fn artifact_for(src: &str) -> CoqArtifact {
        let graph = EventGraph::load(src).unwrap();
        let reports = validate_graph(&graph, &ValidationConfig::default()).unwrap();
        emit_file(
            &graph,
            &reports,
            &CausalConfig::default(),
            &CoqgenConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn anchors_are_verbatim() {
        let artifact = artifact_for(FIXTURE);
        let text = &artifact.source_text;
        assert!(text.contains("Definition TimePoint := (Z * nat * nat)."));
        assert!(text.contains("| Some (y, _, _) => Z.ltb y 0"));
        assert!(text.contains("Definition cascading_causation (e1 e2 e3 : Event) : Prop :="));
        assert_eq!(text.matches(" = true /\\").count(), 4);
        assert!(text.contains("same_historical_context e1 e3 = true."));
        assert!(text.contains("Notation temporal_precedes := event_before."));
    }

    #[test]
    fn emission_is_deterministic() {
        assert_eq!(artifact_for(FIXTURE), artifact_for(FIXTURE));
    }

    #[test]
    fn declared_names_are_unique_and_present() {
        let artifact = artifact_for(FIXTURE);
        let mut seen = BTreeSet::new();
        for name in &artifact.declared_names {
            assert!(seen.insert(name.clone()), "duplicate name {}", name);
            assert!(
                artifact.source_text.contains(name),
                "name {} missing from source",
                name
            );
        }
        for entry in &artifact.theorem_manifest {
            assert!(artifact.source_text.contains(&entry.name));
        }
    }

    #[test]
    fn events_are_emitted_with_micro_degrees() {
        let artifact = artifact_for(FIXTURE);
        let text = &artifact.source_text;
        assert!(text.contains("Definition event_siege : Event := {|"));
        assert!(text.contains("latitude_udeg := Some (38220000%Z);"));
        assert!(text.contains("time := Some ((-431)%Z, 0, 0);"));
        assert!(text.contains("Definition all_events : list Event := [event_decline; event_plague; event_siege]."));
    }

    #[test]
    fn cascade_theorem_is_emitted_and_in_manifest() {
        let artifact = artifact_for(FIXTURE);
        assert!(artifact
            .source_text
            .contains("Theorem cascade_siege_plague_decline :"));
        let cascade_entries: Vec<_> = artifact
            .theorem_manifest
            .iter()
            .filter(|t| t.name.starts_with("cascade_"))
            .collect();
        assert_eq!(cascade_entries.len(), 1);
        assert!(cascade_entries[0].proved);
        assert_eq!(
            cascade_entries[0].about,
            vec!["Siege".to_string(), "Plague".to_string(), "Decline".to_string()]
        );
    }

    #[test]
    fn truth_tables_match_the_causal_module() {
        let graph = EventGraph::load(FIXTURE).unwrap();
        let config = CausalConfig::default();
        let artifact = artifact_for(FIXTURE);
        // Reconstruct expected tables: indices follow all_events order.
        let mut expected_caused = Vec::new();
        for (i, e1) in graph.events.iter().enumerate() {
            for (j, e2) in graph.events.iter().enumerate() {
                if may_have_caused(e1, e2, &config) {
                    expected_caused.push((i, j));
                }
            }
        }
        let rendered = coq_pair_list(&expected_caused);
        assert!(
            artifact.source_text.contains(&rendered),
            "expected table {} in source",
            rendered
        );
    }

    #[test]
    fn bc_theorem_present_for_bc_graph() {
        let artifact = artifact_for(FIXTURE);
        assert!(artifact.source_text.contains("Theorem all_events_bc :"));
        assert!(artifact
            .theorem_manifest
            .iter()
            .any(|t| t.name == "all_events_bc" && t.proved));
    }

    #[test]
    fn mixed_era_graph_refutes_bc_claim() {
        let src = "@prefix ste: <http://example.org/ste#> .\n\
                   ste:E1 a ste:Event ; ste:hasTime \"431 BC\" .\n\
                   ste:E2 a ste:Event ; ste:hasTime \"79 AD\" .\n";
        let artifact = artifact_for(src);
        assert!(artifact
            .source_text
            .contains("Theorem all_events_bc_refuted :"));
        // And with negation disabled, the claim disappears entirely.
        let graph = EventGraph::load(src).unwrap();
        let reports = validate_graph(&graph, &ValidationConfig::default()).unwrap();
        let artifact = emit_file(
            &graph,
            &reports,
            &CausalConfig::default(),
            &CoqgenConfig {
                negate_false_theorems: false,
                ..CoqgenConfig::default()
            },
        )
        .unwrap();
        assert!(!artifact.source_text.contains("all_events_bc"));
    }

    #[test]
    fn empty_graph_still_carries_all_anchors() {
        let artifact = artifact_for("");
        let text = &artifact.source_text;
        assert!(text.contains("Definition TimePoint := (Z * nat * nat)."));
        assert!(text.contains("Z.ltb y 0"));
        assert!(text.contains("Definition cascading_causation"));
        assert!(text.contains("Definition causal_pairs : list (nat * nat) :=\n  []."));
        assert!(text.contains("Definition all_events : list Event := []."));
        // Single-constructor match has no redundant wildcard arm.
        assert!(text.contains("| EC_Event, EC_Event => true\n  end."));
        // Vacuous coherence still holds.
        assert!(text.contains("Theorem rag_discoveries_coherent :"));
        // No dated events: the BC claim is omitted, not asserted.
        assert!(!text.contains("all_events_bc"));
    }

    #[test]
    fn suspect_classes_are_omitted_by_default_and_marked_when_included() {
        let src = "@prefix ste: <http://example.org/ste#> .\n\
                   ste:E1 a ste:WarEvent ; ste:hasTime \"time period\" .\n";
        let artifact = artifact_for(src);
        assert!(!artifact.source_text.contains("EC_WarEvent"));
        let graph = EventGraph::load(src).unwrap();
        let reports = validate_graph(&graph, &ValidationConfig::default()).unwrap();
        let artifact = emit_file(
            &graph,
            &reports,
            &CausalConfig::default(),
            &CoqgenConfig {
                include_suspect: true,
                ..CoqgenConfig::default()
            },
        )
        .unwrap();
        assert!(artifact
            .source_text
            .contains("| EC_WarEvent (* suspect *)"));
    }

    #[test]
    fn conflicting_ids_get_numeric_suffixes() {
        // Both ids sanitize to "event_id", which is also a field name.
        let src = "@prefix ste: <http://example.org/ste#> .\n\
                   ste:id a ste:Event .\n\
                   ste:i\\:d a ste:Event .\n";
        let artifact = artifact_for(src);
        assert!(artifact.source_text.contains("Definition event_id_2 : Event"));
        assert!(artifact.source_text.contains("Definition event_i_d : Event"));
        assert!(!artifact.renames.is_empty());
    }

    #[test]
    fn duplicate_constructor_names_are_an_error() {
        // Both class names are DiscoveredValid and sanitize to the
        // same constructor EC_Migration_Event.
        let src = "@prefix ste: <http://example.org/ste#> .\n\
                   ste:E1 a ste:Migration_Event ; ste:hasAgent \"Dorians\" ;\n\
                       ste:hasTime \"1100 BC\" ; ste:hasLocation \"Ionia\" .\n\
                   ste:E2 a ste:Migration-Event ; ste:hasAgent \"Dorians\" ;\n\
                       ste:hasTime \"1100 BC\" ; ste:hasLocation \"Ionia\" .\n";
        let graph = EventGraph::load(src).unwrap();
        let reports = validate_graph(&graph, &ValidationConfig::default()).unwrap();
        let err = emit_file(
            &graph,
            &reports,
            &CausalConfig::default(),
            &CoqgenConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, CoqgenError::DuplicateConstructorName { .. }));
    }

    #[test]
    fn unknown_time_becomes_none() {
        let src = "@prefix ste: <http://example.org/ste#> .\n\
                   ste:E1 a ste:Event ; ste:hasTime \"time period\" .\n";
        let artifact = artifact_for(src);
        assert!(artifact.source_text.contains("  time := None;"));
    }

    #[test]
    fn strings_with_quotes_are_escaped() {
        let src = "@prefix ste: <http://example.org/ste#> .\n\
                   ste:E1 a ste:Event ; ste:hasResult \"a \\\"decisive\\\" win\" .\n";
        let artifact = artifact_for(src);
        assert!(artifact
            .source_text
            .contains("result := \"a \"\"decisive\"\" win\""));
    }

    #[test]
    fn sanitizer_produces_valid_identifiers() {
        assert_eq!(sanitize_identifier("Event1_1"), "Event1_1");
        assert_eq!(sanitize_identifier("E1#2"), "E1_2");
        assert_eq!(sanitize_identifier("9lives"), "_9lives");
        assert_eq!(sanitize_identifier(""), "_");
        assert_eq!(sanitize_identifier("ET_MigrationEvent"), "ET_MigrationEvent");
    }
}
