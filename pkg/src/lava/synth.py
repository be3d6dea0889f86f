"""Synthetic learning-activity generator for demos, benchmarks, and tests.

Students fall into three planted behavior profiles (low/mid/high) whose
material-view counts and assignment-point ratios are separated by far more
than their within-profile spread, so clustering indicators can recover the
profiles exactly.  Generation is fully deterministic for a given seed.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from datetime import datetime, timezone

from .model import format_timestamp

#: Monday 00:00 UTC; every generated week is [start + 7d*w, start + 7d*(w+1)).
TERM_START = int(datetime(2019, 1, 7, tzinfo=timezone.utc).timestamp())
WEEK_SECONDS = 7 * 24 * 3600

#: Planted profiles: (total material views, assignment point ratio).
#: Gaps between profile means exceed 10x the within-profile spread on both
#: features, which is what makes the planted partition recoverable.
CLUSTER_VIEW_MEANS = (20, 60, 180)
CLUSTER_POINT_RATIOS = (0.35, 0.65, 0.95)
VIEW_JITTER = 0.02
RATIO_JITTER = 0.005

_EXTENSIONS = ("pdf", "pptx", "mp4", "docx")
_MARKS = (100, 50, 80, 40, 50)


@dataclass
class SynthResult:
    documents: list[dict]
    truth: dict[str, int]  # user id -> planted cluster index
    students: list[str]


def synthesize(
    students: int = 50,
    materials: int = 20,
    assignments: int = 5,
    weeks: int = 12,
    seed: int = 7,
) -> SynthResult:
    """Generate wire-format event documents for one synthetic course."""
    rng = random.Random(seed)
    users = [f"student-{i + 1:03d}" for i in range(students)]
    truth = {user: i % 3 for i, user in enumerate(users)}

    material_attrs = []
    for m in range(materials):
        ext = _EXTENSIONS[m % len(_EXTENSIONS)]
        material_attrs.append({
            "Name": f"material-{m + 1:02d}.{ext}",
            "File Extension": ext,
            "Size (in Bytes)": rng.randrange(10_000, 5_000_000),
        })
    material_source = ["Moodle" if m % 2 == 0 else "edX" for m in range(materials)]

    assignment_attrs = []
    for a in range(assignments):
        due_week = max(1, ((a + 1) * weeks) // (assignments + 1))
        due = TERM_START + due_week * WEEK_SECONDS
        assignment_attrs.append({
            "Title": f"Assignment {a + 1}",
            "Total Marks": _MARKS[a % len(_MARKS)],
            "Due Date": format_timestamp(due)[:10],
        })

    def platform() -> str:
        return "web" if rng.random() < 0.7 else "mobile"

    def moment(week: int) -> int:
        return TERM_START + week * WEEK_SECONDS + rng.randrange(WEEK_SECONDS)

    records: list[tuple[int, dict]] = []

    def emit(user: str, ts: int, source: str, action: str, category: str, attributes: dict):
        records.append((ts, {
            "user": user,
            "timestamp": format_timestamp(ts),
            "source": source,
            "platform": platform(),
            "action": action,
            "category": category,
            "attributes": attributes,
        }))

    for i, user in enumerate(users):
        cluster = truth[user]

        total_views = round(CLUSTER_VIEW_MEANS[cluster] * (1 + rng.uniform(-VIEW_JITTER, VIEW_JITTER)))
        weights = [rng.uniform(0.5, 1.5) for _ in range(weeks)]
        for _ in range(total_views):
            week = rng.choices(range(weeks), weights=weights)[0]
            m = rng.randrange(materials)
            emit(user, moment(week), material_source[m], "view",
                 "Learning Materials", dict(material_attrs[m]))

        for _ in range(rng.randrange(0, 4)):  # downloads are profile-neutral noise
            week = rng.randrange(weeks)
            m = rng.randrange(materials)
            emit(user, moment(week), material_source[m], "download",
                 "Learning Materials", dict(material_attrs[m]))

        for a in range(assignments):
            attrs = assignment_attrs[a]
            due_week = max(1, ((a + 1) * weeks) // (assignments + 1))
            submit_ts = TERM_START + due_week * WEEK_SECONDS - rng.randrange(WEEK_SECONDS // 2)
            emit(user, submit_ts, "Moodle", "submit", "Assignments", dict(attrs))
            ratio = CLUSTER_POINT_RATIOS[cluster] + rng.uniform(-RATIO_JITTER, RATIO_JITTER)
            points = max(0, min(attrs["Total Marks"], round(ratio * attrs["Total Marks"])))
            grade_ts = submit_ts + rng.randrange(WEEK_SECONDS // 2, WEEK_SECONDS)
            emit(user, grade_ts, "Moodle", "grade", "Assignments",
                 {**attrs, "Points": points})

        for _ in range(rng.randrange(0, 5)):
            week = rng.randrange(weeks)
            emit(user, moment(week), "Moodle", "post", "Discussion Forum", {
                "Thread": f"Thread {rng.randrange(1, 10)}",
                "Post Length": rng.randrange(20, 800),
            })
        for _ in range(rng.randrange(0, 3)):
            week = rng.randrange(weeks)
            emit(user, moment(week), "Moodle", rng.choice(("view", "update")), "Wiki", {
                "Page": f"Page {rng.randrange(1, 6)}",
            })

    records.sort(key=lambda pair: pair[0])
    documents = []
    for seq, (_, doc) in enumerate(records, start=1):
        documents.append({"id": f"evt-{seq:08d}", **doc})
    return SynthResult(documents, truth, users)


def write_events_file(path: str, documents: list[dict]) -> None:
    """Write documents in the document-lines wire format (one JSON per line)."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc in documents:
            fh.write(json.dumps(doc, separators=(",", ":")) + "\n")


def write_truth_file(path: str, truth: dict[str, int]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(truth, fh, indent=2, sort_keys=True)
