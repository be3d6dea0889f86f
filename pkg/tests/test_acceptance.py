"""Acceptance suite: each test checks one release criterion end to end and
prints a PASS line with the measured evidence."""

import json
import math
import os
import random
import re
import signal
import socket
import subprocess
import sys
import threading
import time
from types import SimpleNamespace

import httpx
import pytest
from fastapi.testclient import TestClient

from lava.catalog import Catalog
from lava.charts import ChartChoice, ChartRegistry, render_chart, validate_chart_spec
from lava.errors import EngineError
from lava.indicators import CompositeIndicatorSpec, Engine
from lava.ingest import FORMAT_LINES, ingest_batch, ingest_file
from lava.methods import (
    AnalyticsMethodDescriptor,
    MappingSet,
    MethodInput,
    default_registry,
    suggest_mappings,
    validate_mapping,
)
from lava.model import Column, ColumnType, DataTable
from lava.service import create_app
from lava.specs import spec_from_doc
from lava.store import EventStore, FilterSet, PrivacyMode, query_dataset
from lava.synth import synthesize, write_events_file

import oracles
import scenario
from test_irc import SNIPPET_RE, assert_valid_fragment
from test_store_query import brute_force, random_instance

TEXT = ColumnType.TEXT
NUMERIC = ColumnType.NUMERIC
VIEWER = "acceptance-viewer"


def ok(criterion, detail):
    print(f"\nPASS criterion {criterion}: {detail}")


@pytest.fixture(scope="module")
def seeded(tmp_path_factory):
    """The seeded dataset (synth --students 50 --materials 20 --assignments 5
    --weeks 12 --seed 7) ingested from file into a disk-backed store."""
    started = time.monotonic()
    result = synthesize(students=50, materials=20, assignments=5, weeks=12, seed=7)
    data_dir = tmp_path_factory.mktemp("acceptance-store")
    events_file = data_dir / "synthetic-events.jsonl"
    write_events_file(str(events_file), result.documents)

    store = EventStore(str(data_dir))
    report = ingest_file(str(events_file), FORMAT_LINES, store)
    assert report.rejected == 0

    secret = bytes.fromhex((data_dir / "secret.key").read_text().strip())
    engine = Engine(store, default_registry(), ChartRegistry())
    return SimpleNamespace(
        documents=result.documents,
        truth=result.truth,
        data_dir=data_dir,
        events_file=events_file,
        store=store,
        engine=engine,
        secret=secret,
        build_seconds=time.monotonic() - started,
    )


def run_scenario_indicators(engine):
    basic1 = spec_from_doc("basic", scenario.weekly_access_spec())
    basic2 = spec_from_doc("basic", scenario.points_overview_spec())
    composite = spec_from_doc("composite", scenario.most_viewed_spec())
    multilevel = spec_from_doc("multilevel", scenario.correlation_spec())
    return {
        "weekly": engine.execute_basic(basic1, VIEWER),
        "points": engine.execute_basic(basic2, VIEWER),
        "most_viewed": engine.execute_composite(composite, VIEWER),
        "correlation": engine.execute_multilevel(multilevel, VIEWER),
    }


def test_criterion_1_four_indicator_scenario(seeded):
    started = time.monotonic()
    results = run_scenario_indicators(seeded.engine)

    assert list(results["weekly"].analyzed.rows) == scenario.expected_weekly_access(seeded.documents)

    assert list(results["points"].analyzed.rows) == scenario.expected_points_overview(
        seeded.documents, seeded.secret)

    assert list(results["most_viewed"].analyzed.rows) == scenario.expected_most_viewed(
        seeded.documents, seeded.secret)

    correlation = results["correlation"].analyzed
    expected = scenario.expected_correlation_features(seeded.documents, seeded.secret)
    assert correlation.column_names == ["Entity", "Cluster", "Feature1", "Feature2"]
    assert len(correlation.rows) == len(expected) == 50
    for row, (token, views, avg_points) in zip(correlation.rows, expected):
        assert row[0] == token
        assert row[2] == views  # integer count, exact
        assert math.isclose(row[3], avg_points, rel_tol=0, abs_tol=1e-9)

    truth_by_token = scenario.planted_truth_by_token(seeded.truth, seeded.secret)
    planted = [truth_by_token[row[0]] for row in correlation.rows]
    found = correlation.column_values("Cluster")
    assert oracles.adjusted_rand_index(found, planted) == 1.0

    elapsed = seeded.build_seconds + (time.monotonic() - started)
    assert elapsed < 10.0
    ok(1, f"four worked indicators equal the raw-file scans "
          f"({len(seeded.documents)} events, {elapsed:.2f}s total)")


def test_criterion_2_query_oracle_property():
    rng = random.Random(424242)
    cases = 1000
    for _ in range(cases):
        store, events, scope, filters, requester = random_instance(rng, max_events=500)
        table = query_dataset(store, scope, filters, requester)
        got = list(zip(
            table.column_values("Event Id"),
            table.column_values("User"),
            table.column_values("Timestamp"),
        ))
        assert got == brute_force(events, store, scope, filters, requester)
    ok(2, f"query_dataset equals the linear-scan oracle on {cases}/{cases} randomized cases")


def test_criterion_3_privacy_partition_property():
    rng = random.Random(777)
    cases = 250
    for _ in range(cases):
        store, events, scope, filters, requester = random_instance(rng, max_events=200)
        def run(mode):
            f = FilterSet.build(filters.attribute_filters, filters.time_start,
                                filters.time_end, mode)
            return query_dataset(store, scope, f, requester)

        own = run(PrivacyMode.OWN_DATA_ONLY)
        others = run(PrivacyMode.EVERYONE_EXCEPT_OWN_ANONYMIZED)
        everyone = run(PrivacyMode.EVERYONE_ANONYMIZED)

        own_ids = set(own.column_values("Event Id"))
        other_ids = set(others.column_values("Event Id"))
        assert own_ids | other_ids == set(everyone.column_values("Event Id"))
        assert not own_ids & other_ids
        assert set(own.column_values("User")) <= {requester}

        # pseudonym stability and injectivity on this store's users
        again = run(PrivacyMode.EVERYONE_ANONYMIZED)
        assert again.column_values("User") == everyone.column_values("User")
        users = {e.user_id for e in store.snapshot().events}
        tokens = {u: store.pseudonym(u) for u in users}
        assert len(set(tokens.values())) == len(users)
    ok(3, f"own/others/everyone partition and stable pseudonyms on {cases} random stores")


def test_criterion_4_mapping_soundness():
    rng = random.Random(20240404)
    cases = 1000
    column_pool = [f"col{i}" for i in range(8)]
    for _ in range(cases):
        inputs = tuple(
            MethodInput(f"in{i}", rng.choice([TEXT, NUMERIC]), rng.random() < 0.5)
            for i in range(rng.randrange(1, 5))
        )
        descriptor = AnalyticsMethodDescriptor("fuzz", "fuzz", inputs, (Column("out", TEXT),))
        schema = [Column(name, rng.choice([TEXT, NUMERIC]))
                  for name in rng.sample(column_pool, rng.randrange(2, 8))]
        by_type = {TEXT: [], NUMERIC: []}
        for column in schema:
            by_type[column.type].append(column.name)

        # every constructed Text<->Numeric mismatch is rejected
        for inp in inputs:
            wrong = by_type[NUMERIC if inp.type is TEXT else TEXT]
            if wrong:
                report = validate_mapping(descriptor, schema,
                                          MappingSet.build({inp.name: rng.choice(wrong)}))
                assert "TypeMismatch" in report.codes()

        # every unbound required input is rejected
        bindable = {
            inp.name: by_type[inp.type][0] for inp in inputs if by_type[inp.type]
        }
        report = validate_mapping(descriptor, schema, MappingSet.build(bindable))
        required_unbound = [inp.name for inp in inputs
                            if inp.required and inp.name not in bindable]
        missing = {i.field for i in report.issues if i.code == "MissingRequiredInput"}
        assert missing == set(required_unbound)

        # the auto-suggestion never produces an invalid binding
        suggestion = suggest_mappings(descriptor, schema)
        report = validate_mapping(descriptor, schema, suggestion)
        assert not report.codes() & {"TypeMismatch", "UnknownColumn", "UnknownInput"}
    ok(4, f"type mismatches and unbound required inputs rejected; "
          f"suggestions sound on {cases} fuzzed descriptor/schema pairs")


def test_criterion_5_composite_law(seeded):
    rng = random.Random(55)
    engine = seeded.engine
    method_choices = [
        ("count_items", {"Items to count": "Name"}),
        ("count_n_most_occurring_items", {"Items to count": "Name"}),
        ("count_per_group", {"Group": "User"}),
    ]
    cases = 100
    for _ in range(cases):
        method_id, mapping = rng.choice(method_choices)
        parts = tuple(
            spec_from_doc("basic", {
                "name": f"part-{i}",
                "scope": {"categories": ["Learning Materials"],
                          "actions": [rng.choice(["view", "download"])]},
                "filters": {"privacy_mode": rng.choice([m.value for m in PrivacyMode])},
                "method_id": method_id,
                "mappings": mapping,
            })
            for i in range(rng.randrange(2, 5))
        )
        requester = rng.choice(["student-001", "student-002", VIEWER])
        combined = engine.execute_composite(
            CompositeIndicatorSpec("combo", parts), requester).analyzed
        expected = []
        for part in parts:
            for row in engine.execute_basic(part, requester).analyzed.rows:
                expected.append((part.name,) + row)
        assert sorted(map(repr, combined.rows)) == sorted(map(repr, expected))

    mixed_attempts = 30
    for _ in range(mixed_attempts):
        (m1, map1), (m2, map2) = rng.sample(method_choices, 2)
        parts = (
            spec_from_doc("basic", {"name": "a",
                                    "scope": {"categories": ["Learning Materials"]},
                                    "method_id": m1, "mappings": map1}),
            spec_from_doc("basic", {"name": "b",
                                    "scope": {"categories": ["Learning Materials"]},
                                    "method_id": m2, "mappings": map2}),
        )
        with pytest.raises(EngineError) as err:
            engine.execute_composite(CompositeIndicatorSpec("bad", parts), VIEWER)
        assert err.value.code == "MethodMismatch"
    ok(5, f"tagged-concatenation law held on {cases} random composites; "
          f"{mixed_attempts}/{mixed_attempts} mixed-method attempts rejected")


def test_criterion_6_multilevel_clustering(seeded):
    spec = spec_from_doc("multilevel", scenario.correlation_spec())
    truth_by_token = scenario.planted_truth_by_token(seeded.truth, seeded.secret)

    runs = [seeded.engine.execute_multilevel(spec, VIEWER) for _ in range(3)]
    for result in runs:
        labels = result.analyzed.column_values("Cluster")
        planted = [truth_by_token[e] for e in result.analyzed.column_values("Entity")]
        assert oracles.adjusted_rand_index(labels, planted) == 1.0

    payloads = [
        json.dumps({"analyzed": r.analyzed.to_doc(), "chart": r.chart},
                   sort_keys=True).encode()
        for r in runs
    ]
    assert payloads[0] == payloads[1] == payloads[2]
    ok(6, "kmeans (k=3, seed 42) recovers the planted partition with ARI 1.0; "
          "3 repeated runs byte-identical")


def test_criterion_7_chartspec_conservation(chart_registry):
    rng = random.Random(7007)
    cases = 0
    for chart_type, mapping in [
        ("bar", {"x": "Item", "y": "Count", "series": "Tag"}),
        ("stacked_area", {"x": "Item", "y": "Count", "series": "Tag"}),
        ("pie", {"label": "Item", "value": "Count"}),
    ]:
        for _ in range(120):
            rows = [
                (rng.choice("abcdef"), rng.choice(["t1", "t2", "t3"]),
                 rng.choice([rng.randrange(-50, 500), rng.random() * 100 - 20]))
                for _ in range(rng.randrange(0, 60))
            ]
            analyzed = DataTable.build(
                [("Item", "Text"), ("Tag", "Text"), ("Count", "Numeric")], rows)
            choice = ChartChoice.build("c3js", chart_type, mapping)
            spec = render_chart(chart_registry, choice, analyzed)
            assert validate_chart_spec(spec).ok
            plotted = sum(sum(s["values"]) for s in spec["series"])
            assert math.isclose(plotted, sum(r[2] for r in rows), rel_tol=0, abs_tol=1e-9)
            if not rows:
                assert spec["domain"] == []
            cases += 1
    ok(7, f"plotted totals equal column totals (±1e-9) on {cases} random tables, "
          f"0-row specs schema-valid")


def test_criterion_8_irc_contract(tmp_path):
    app = create_app(data_dir=str(tmp_path), admin_token="adm")
    headers = {"Authorization": f"Bearer {VIEWER}"}
    with TestClient(app) as client:
        docs = synthesize(students=12, materials=6, assignments=2, weeks=4, seed=7).documents
        assert client.post("/api/v1/events", json=docs, headers=headers).json()["rejected"] == 0

        saved = {}
        for kind, spec in [
            ("basic", scenario.weekly_access_spec()),
            ("basic", scenario.points_overview_spec()),
        ]:
            record = client.post("/api/v1/indicators", json={"kind": kind, "spec": spec},
                                 headers=headers)
            assert record.status_code == 201, record.text
            saved[spec["name"]] = record.json()["indicator_id"]

        part_ids = []
        for part in scenario.most_viewed_parts():
            response = client.post("/api/v1/indicators", json={"kind": "basic", "spec": part},
                                   headers=headers)
            part_ids.append(response.json()["indicator_id"])
        composite = client.post(
            "/api/v1/indicators",
            json={"kind": "composite", "spec": scenario.most_viewed_spec(part_ids)},
            headers=headers)
        saved["Most viewed learning materials"] = composite.json()["indicator_id"]

        corr_ids = []
        for part in scenario.correlation_parts():
            response = client.post("/api/v1/indicators", json={"kind": "basic", "spec": part},
                                   headers=headers)
            corr_ids.append(response.json()["indicator_id"])
        multilevel = client.post(
            "/api/v1/indicators",
            json={"kind": "multilevel", "spec": scenario.correlation_spec(corr_ids)},
            headers=headers)
        saved["Correlation"] = multilevel.json()["indicator_id"]

        kinds = {"Students weekly learning resources access": "basic",
                 "Students assignment points overview": "basic",
                 "Most viewed learning materials": "composite",
                 "Correlation": "multilevel"}
        spec_docs = {"Students weekly learning resources access": scenario.weekly_access_spec(),
                     "Students assignment points overview": scenario.points_overview_spec(),
                     "Most viewed learning materials": scenario.most_viewed_spec(part_ids),
                     "Correlation": scenario.correlation_spec(corr_ids)}

        for name, indicator_id in saved.items():
            snippet = client.get(f"/api/v1/irc/{indicator_id}").text
            assert SNIPPET_RE.match(snippet), snippet
            assert_valid_fragment(snippet)
            assert f'data-indicator-id="{indicator_id}"' in snippet
            assert VIEWER not in snippet and "Bearer" not in snippet

            preview = client.post(
                "/api/v1/preview",
                json={"kind": kinds[name], "spec": spec_docs[name]},
                headers=headers).json()
            rendered = client.get(f"/api/v1/render/{indicator_id}").json()
            assert rendered == preview["chart"], name
    ok(8, "snippets match the normative container/script format and render "
          "output equals the preview for all four indicators")


def _free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


_SERVER_CODE = """
import sys
import uvicorn
from lava.service import create_app
uvicorn.run(create_app(data_dir=sys.argv[1], admin_token="adm"),
            host="127.0.0.1", port=int(sys.argv[2]), log_level="error")
"""


def _start_server(data_dir, port):
    proc = subprocess.Popen([sys.executable, "-c", _SERVER_CODE, str(data_dir), str(port)])
    base = f"http://127.0.0.1:{port}"
    for _ in range(100):
        try:
            httpx.get(f"{base}/api/v1/health", timeout=1.0)
            return proc, base
        except httpx.TransportError:
            if proc.poll() is not None:
                raise RuntimeError("server exited early")
            time.sleep(0.1)
    proc.kill()
    raise RuntimeError("server never became ready")


def test_criterion_9_persistence_across_kill(tmp_path):
    port = _free_port()
    proc, base = _start_server(tmp_path, port)
    headers = {"Authorization": "Bearer teacher-1"}
    batch_size = 7
    documents = synthesize(students=40, materials=8, assignments=2, weeks=6, seed=13).documents

    try:
        # committed state before the crash window
        spec = scenario.weekly_access_spec()
        first = httpx.post(f"{base}/api/v1/events", json=documents[:200],
                           headers=headers, timeout=30.0)
        assert first.json()["accepted"] == 200
        record = httpx.post(f"{base}/api/v1/indicators",
                            json={"kind": "basic", "spec": spec},
                            headers=headers, timeout=30.0).json()
        indicator_id = record["indicator_id"]

        # hammer the store with small batches and SIGKILL mid-session
        stop = threading.Event()

        def pump():
            offset = 200
            with httpx.Client(timeout=10.0) as client:
                while not stop.is_set() and offset + batch_size <= len(documents):
                    try:
                        client.post(f"{base}/api/v1/events",
                                    json=documents[offset:offset + batch_size],
                                    headers=headers)
                    except httpx.TransportError:
                        return
                    offset += batch_size

        pumper = threading.Thread(target=pump)
        pumper.start()
        time.sleep(0.5)
        os.kill(proc.pid, signal.SIGKILL)
        proc.wait(timeout=10)
        stop.set()
        pumper.join(timeout=10)
    finally:
        if proc.poll() is None:
            proc.kill()

    # on-disk state at the moment of the kill
    store_after_kill = EventStore(str(tmp_path))
    catalog_after_kill = Catalog(str(tmp_path))
    store_hash = store_after_kill.content_hash()
    catalog_hash = catalog_after_kill.content_hash()
    count = len(store_after_kill)
    assert count >= 200
    assert (count - 200) % batch_size == 0  # no partial batch visible

    # restart: identical contents, indicator still renders
    port = _free_port()
    proc, base = _start_server(tmp_path, port)
    try:
        health = httpx.get(f"{base}/api/v1/health", timeout=10.0).json()
        assert health["events"] == count
        render = httpx.get(f"{base}/api/v1/render/{indicator_id}", timeout=30.0)
        assert render.status_code == 200
    finally:
        proc.terminate()
        proc.wait(timeout=10)

    assert EventStore(str(tmp_path)).content_hash() == store_hash
    assert Catalog(str(tmp_path)).content_hash() == catalog_hash
    ok(9, f"SIGKILL mid-ingest: {count} events survive, hashes identical after "
          f"restart, batches atomic (multiple of {batch_size})")


def test_criterion_10_throughput(tmp_path):
    documents = synthesize(students=1000, materials=20, assignments=5,
                           weeks=12, seed=11).documents
    assert len(documents) >= 100_000

    started = time.monotonic()
    store = EventStore(str(tmp_path))
    report = ingest_batch(documents, store)
    assert report.rejected == 0
    engine = Engine(store, default_registry(), ChartRegistry())
    results = run_scenario_indicators(engine)
    elapsed = time.monotonic() - started

    assert all(r.analyzed.rows for r in results.values())
    assert elapsed < 30.0
    ok(10, f"{len(documents)} events ingested and all four indicators executed "
           f"in {elapsed:.2f}s (< 30s)")
