import json

from lava.cli import main
from lava.store import EventStore


def test_synth_writes_files(tmp_path, capsys):
    out = tmp_path / "events.jsonl"
    truth = tmp_path / "truth.json"
    code = main(["synth", "--students", "6", "--materials", "3", "--assignments", "2",
                 "--weeks", "2", "--seed", "4", "--out", str(out),
                 "--truth-out", str(truth)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines and json.loads(lines[0])["id"] == "evt-00000001"
    assert set(json.loads(truth.read_text()).values()) <= {0, 1, 2}
    assert f"wrote {len(lines)} events" in capsys.readouterr().out


def test_ingest_into_local_store(tmp_path, capsys):
    events = tmp_path / "events.jsonl"
    data_dir = tmp_path / "data"
    main(["synth", "--students", "4", "--materials", "2", "--assignments", "1",
          "--weeks", "2", "--seed", "4", "--out", str(events)])
    code = main(["ingest", "--file", str(events), "--format", "lines",
                 "--data-dir", str(data_dir)])
    assert code == 0
    expected = len(events.read_text().splitlines())
    assert len(EventStore(str(data_dir))) == expected
    assert f"accepted={expected} rejected=0" in capsys.readouterr().out


def test_ingest_reports_rejections(tmp_path, capsys):
    events = tmp_path / "events.jsonl"
    data_dir = tmp_path / "data"
    main(["synth", "--students", "2", "--materials", "2", "--assignments", "1",
          "--weeks", "1", "--seed", "4", "--out", str(events)])
    with open(events, "a") as fh:
        fh.write("not json at all\n")
    code = main(["ingest", "--file", str(events), "--format", "lines",
                 "--data-dir", str(data_dir)])
    assert code == 1
    out = capsys.readouterr().out
    assert "rejected=1" in out
    assert "MalformedLine" in out


def test_missing_file_is_a_clean_error(tmp_path, capsys):
    code = main(["ingest", "--file", str(tmp_path / "ghost.jsonl"),
                 "--data-dir", str(tmp_path / "d")])
    assert code == 2
    assert "UnreadableFile" in capsys.readouterr().err
