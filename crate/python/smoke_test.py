#!/usr/bin/env python3
"""Build the eventforge_py extension and exercise it end to end.

Run from anywhere:

    python3 python/smoke_test.py [--release]

The script compiles the extension with cargo, stages the shared
library under a temporary directory as an importable module, and walks
through the public surface: parsing, serialization, validation, causal
reasoning, Coq emission, metrics, and a full extraction run. It exits
non-zero if any check fails.
"""

import json
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]

TRIO_TTL = """\
@prefix ste: <http://example.org/ste#> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .

ste:Siege a ste:Event ;
    ste:hasType "siege" ;
    ste:hasAgent "Archidamus" ;
    ste:hasTime "431 BC" ;
    ste:hasLocation "Athens" ;
    ste:hasLatitude "37.9838"^^xsd:double ;
    ste:hasLongitude "23.7275"^^xsd:double ;
    ste:hasCountry "Greece" ;
    ste:hasRegion "Attica" ;
    ste:hasLocationSource "lacrimalit" ;
    ste:hasResult "the country folk crowded within the walls of Athens" .

ste:Plague a ste:Event ;
    ste:hasType "plague" ;
    ste:hasAgent "Apollo" ;
    ste:hasTime "430 BC" ;
    ste:hasLocation "Athens" ;
    ste:hasLatitude "37.9838"^^xsd:double ;
    ste:hasLongitude "23.7275"^^xsd:double ;
    ste:hasCountry "Greece" ;
    ste:hasRegion "Attica" ;
    ste:hasLocationSource "lacrimalit" ;
    ste:hasResult "disease ravaged crowded Athens and broke the spirit of her people" .

ste:Decline a ste:Event ;
    ste:hasType "defeat" ;
    ste:hasAgent "Sparta" ;
    ste:hasTime "404 BC" ;
    ste:hasLocation "Athens" ;
    ste:hasLatitude "37.9838"^^xsd:double ;
    ste:hasLongitude "23.7275"^^xsd:double ;
    ste:hasCountry "Greece" ;
    ste:hasRegion "Attica" ;
    ste:hasLocationSource "lacrimalit" ;
    ste:hasResult "the long walls of Athens were pulled down and her empire passed away" .
"""

SAMPLE_TEXT = (
    "In the first year of the war Archidamus led the Peloponnesians into "
    "Attica and laid waste the country about Athens, and the people of "
    "Aegina were driven from their homes. " * 12
)


def build_extension(release: bool) -> Path:
    """Compile the extension and return the staged module directory."""
    profile = "release" if release else "debug"
    cmd = ["cargo", "build", "-p", "eventforge-py", "--features", "extension-module"]
    if release:
        cmd.append("--release")
    subprocess.run(cmd, cwd=ROOT, check=True)
    built = ROOT / "target" / profile / "libeventforge_py.so"
    if not built.exists():
        # macOS names the cdylib differently.
        built = ROOT / "target" / profile / "libeventforge_py.dylib"
    stage = Path(tempfile.mkdtemp(prefix="eventforge-py-"))
    shutil.copy2(built, stage / "eventforge_py.so")
    return stage


failures = []


def check(name: str, condition: bool, detail: str = "") -> None:
    status = "ok" if condition else "FAIL"
    suffix = f" ({detail})" if detail and not condition else ""
    print(f"smoke: {name} ... {status}{suffix}")
    if not condition:
        failures.append(name)


def main() -> int:
    stage = build_extension("--release" in sys.argv[1:])
    sys.path.insert(0, str(stage))
    import eventforge_py as ef

    print(f"smoke: imported eventforge_py {ef.__version__} from {stage}")

    # Parsing and the event schema.
    graph = ef.EventGraph.parse(TRIO_TTL)
    check("three events parse", len(graph) == 3)
    # Graphs keep events in sorted id order for deterministic output.
    check("ids survive", graph.event_ids() == ["Decline", "Plague", "Siege"])
    siege = graph.get("Siege")
    check("agent getter", siege.agent == "Archidamus")
    check("time normalizes", siege.year() == -431 and siege.is_bc())
    check("coordinates", abs(siege.latitude - 37.9838) < 1e-12)
    check("completeness", siege.completeness() == 1.0)
    check("classes", siege.classes == ["Event"])

    # Serialization round-trips byte-identically.
    canonical = graph.to_turtle()
    check(
        "round-trip is the identity",
        ef.EventGraph.parse(canonical).to_turtle() == canonical,
    )

    # Recovery keeps good statements and reports the bad one.
    broken = TRIO_TTL + "\nste:Oops ste:hasType 3.5e .\n"
    recovered, errors = ef.EventGraph.parse_recovering(broken)
    check("recovery keeps the graph", len(recovered) == 3)
    check("recovery reports errors", len(errors) >= 1, f"errors={errors}")

    # Duplicate subjects are renamed and recorded as defects.
    doubled = TRIO_TTL + "\n" + TRIO_TTL
    dup_graph = ef.EventGraph.parse(doubled)
    dup_kinds = [kind for (_, kind) in dup_graph.defects()]
    check("duplicates renamed", len(dup_graph) == 6)
    check(
        "duplicate defects recorded",
        len(dup_kinds) == 3 and all("duplicate" in k for k in dup_kinds),
        f"kinds={dup_kinds}",
    )

    # Ontology validation.
    assessments = graph.validate()
    check("one class assessed", len(assessments) == 1)
    check("Event is standard", assessments[0].verdict == "standard")
    check("bearer count", assessments[0].bearer_count == 3)

    # Temporal and causal reasoning.
    plague = graph.get("Plague")
    decline = graph.get("Decline")
    check("event_before", ef.event_before(siege, plague))
    check("event_before is strict", not ef.event_before(plague, siege))
    check("may_have_caused", ef.may_have_caused(siege, plague))
    check("same_historical_context", ef.same_historical_context(siege, decline))
    check(
        "causal pairs",
        sorted(graph.causal_pairs())
        == [("Plague", "Decline"), ("Siege", "Decline"), ("Siege", "Plague")],
    )
    check("cascade found", graph.cascades() == [("Siege", "Plague", "Decline")])
    athens_sparta = ef.haversine_km(37.9838, 23.7275, 37.0746, 22.4302)
    check("haversine sane", 100.0 < athens_sparta < 200.0, f"{athens_sparta:.1f} km")
    check("parse_year", ef.parse_year("431 BC") == -431)
    check("parse_year unknown", ef.parse_year("in the spring") is None)

    # Coq emission.
    coq = graph.to_coq()
    check(
        "Coq time anchor",
        "Definition TimePoint := (Z * nat * nat)." in coq,
    )
    check("Coq cascade theorem", "cascading_causation" in coq)
    check("Coq BC theorem", "Theorem all_events_bc" in coq)

    # Metrics, with and without gold coordinates.
    m = graph.metrics()
    check("metric counts", m.event_count == 3 and m.duplicate_ids == 0)
    check("metric coverage", abs(m.coordinate_coverage - 1.0) < 1e-12)
    check("metric completeness", abs(m.mean_completeness - 1.0) < 1e-12)
    check("no gold, no error", m.coordinate_error_km is None)
    gold = graph.metrics(gold=[("athens", 37.9838, 23.7275)])
    check(
        "gold error is zero",
        gold.coordinate_error_km is not None and gold.coordinate_error_km < 1e-9,
    )

    # Extraction end to end, base and RAG modes.
    extracted, report_json = ef.extract(SAMPLE_TEXT, mode="base")
    report = json.loads(report_json)
    check("extraction yields events", len(extracted) >= 1)
    check("report mode", report["mode"] == "base", report["mode"])
    check("report counts", report["event_count"] == len(extracted))
    check("no failed chunks", report["failed_chunks"] == 0)

    corpus = [p for p in SAMPLE_TEXT.split(". ") if p.strip()]
    _, rag_report_json = ef.extract(SAMPLE_TEXT, mode="rag", k=2, rag_corpus=corpus)
    rag_report = json.loads(rag_report_json)
    check(
        "rag report mode",
        rag_report["mode"] == "rag-enhanced(k=2)",
        rag_report["mode"],
    )

    try:
        ef.extract(SAMPLE_TEXT, mode="rag")
        check("rag without corpus raises", False)
    except ValueError:
        check("rag without corpus raises", True)

    try:
        ef.EventGraph.parse("ste:Broken ste:hasType .")
        check("strict parse raises", False)
    except ValueError:
        check("strict parse raises", True)

    if failures:
        print(f"smoke: {len(failures)} check(s) failed: {', '.join(failures)}")
        return 1
    print("smoke: all checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
