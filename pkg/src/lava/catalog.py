"""Goal/question/indicator catalog with crash-safe document persistence.

The catalog is a single logical document store: every mutation appends one
fsynced journal line and then applies in memory; startup loads the last
snapshot, replays complete journal lines, and compacts.  A torn trailing
write is simply ignored, so a killed process never leaves partial state.
"""

from __future__ import annotations

import copy
import hashlib
import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field, replace
from typing import Iterable

from .errors import EngineError

SNAPSHOT_NAME = "catalog.json"
JOURNAL_NAME = "catalog.journal"

GOAL_ACTIVE = "active"
GOAL_REQUESTED = "requested"

KIND_BASIC = "basic"
KIND_COMPOSITE = "composite"
KIND_MULTILEVEL = "multilevel"
INDICATOR_KINDS = (KIND_BASIC, KIND_COMPOSITE, KIND_MULTILEVEL)

#: Every fresh deployment starts with these analytics goals available.
SEED_GOALS = (
    ("Assessment", "Judge learner performance against expectations"),
    ("Intervention", "Spot learners who need support and act early"),
    ("Monitoring", "Follow activity and progress as a course runs"),
    ("Prediction", "Anticipate outcomes from current behavior"),
    ("Recommendation", "Point learners to helpful next steps and resources"),
)


@dataclass(frozen=True)
class Goal:
    goal_id: str
    name: str
    description: str
    status: str = GOAL_ACTIVE
    requested_by: str | None = None

    def to_doc(self) -> dict:
        return {
            "goal_id": self.goal_id,
            "name": self.name,
            "description": self.description,
            "status": self.status,
            "requested_by": self.requested_by,
        }

    @staticmethod
    def from_doc(doc) -> "Goal":
        return Goal(doc["goal_id"], doc["name"], doc["description"],
                    doc.get("status", GOAL_ACTIVE), doc.get("requested_by"))


@dataclass(frozen=True)
class Question:
    question_id: str
    goal_id: str
    text: str
    owner: str
    indicator_ids: tuple[str, ...] = ()

    def to_doc(self) -> dict:
        return {
            "question_id": self.question_id,
            "goal_id": self.goal_id,
            "text": self.text,
            "owner": self.owner,
            "indicator_ids": list(self.indicator_ids),
        }

    @staticmethod
    def from_doc(doc) -> "Question":
        return Question(doc["question_id"], doc["goal_id"], doc["text"],
                        doc["owner"], tuple(doc.get("indicator_ids", ())))


@dataclass(frozen=True)
class IndicatorRecord:
    indicator_id: str
    kind: str
    spec: dict
    owner: str
    created_at: int

    def to_doc(self) -> dict:
        return {
            "indicator_id": self.indicator_id,
            "kind": self.kind,
            "spec": self.spec,
            "owner": self.owner,
            "created_at": self.created_at,
        }

    @staticmethod
    def from_doc(doc) -> "IndicatorRecord":
        return IndicatorRecord(doc["indicator_id"], doc["kind"], doc["spec"],
                               doc["owner"], doc["created_at"])


def _new_id(prefix: str) -> str:
    return f"{prefix}-{uuid.uuid4().hex[:10]}"


class Catalog:
    """Persistent registry of goals, questions, and indicator definitions."""

    def __init__(self, data_dir: str | None = None):
        self._lock = threading.Lock()
        self._data_dir = data_dir
        self._goals: dict[str, Goal] = {}
        self._questions: dict[str, Question] = {}
        self._indicators: dict[str, IndicatorRecord] = {}
        if data_dir:
            os.makedirs(data_dir, exist_ok=True)
            self._snapshot_path = os.path.join(data_dir, SNAPSHOT_NAME)
            self._journal_path = os.path.join(data_dir, JOURNAL_NAME)
            self._load()
            self._compact()
        else:
            self._snapshot_path = self._journal_path = None
        if not self._goals:
            for name, description in SEED_GOALS:
                goal = Goal(f"goal-{name.lower()}", name, description)
                self._commit("put", "goals", goal.goal_id, goal.to_doc())

    # -- persistence -------------------------------------------------------

    def _load(self) -> None:
        if os.path.exists(self._snapshot_path):
            with open(self._snapshot_path, "r", encoding="utf-8") as fh:
                snapshot = json.load(fh)
            for doc in snapshot.get("goals", ()):
                self._apply("put", "goals", doc["goal_id"], doc)
            for doc in snapshot.get("questions", ()):
                self._apply("put", "questions", doc["question_id"], doc)
            for doc in snapshot.get("indicators", ()):
                self._apply("put", "indicators", doc["indicator_id"], doc)
        if os.path.exists(self._journal_path):
            with open(self._journal_path, "r", encoding="utf-8") as fh:
                content = fh.read()
            for line in content.split("\n")[:-1]:
                if not line.strip():
                    continue
                try:
                    entry = json.loads(line)
                except json.JSONDecodeError:
                    continue  # torn trailing write
                self._apply(entry["op"], entry["collection"], entry["id"], entry.get("doc"))

    def _compact(self) -> None:
        if not self._snapshot_path:
            return
        snapshot = {
            "goals": [g.to_doc() for g in self._goals.values()],
            "questions": [q.to_doc() for q in self._questions.values()],
            "indicators": [i.to_doc() for i in self._indicators.values()],
        }
        tmp = self._snapshot_path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(snapshot, fh)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, self._snapshot_path)
        with open(self._journal_path, "w", encoding="utf-8") as fh:
            fh.flush()
            os.fsync(fh.fileno())

    def _apply(self, op: str, collection: str, doc_id: str, doc) -> None:
        table, parse = {
            "goals": (self._goals, Goal.from_doc),
            "questions": (self._questions, Question.from_doc),
            "indicators": (self._indicators, IndicatorRecord.from_doc),
        }[collection]
        if op == "put":
            table[doc_id] = parse(doc)
        elif op == "delete":
            table.pop(doc_id, None)

    def _commit(self, op: str, collection: str, doc_id: str, doc=None) -> None:
        if self._journal_path:
            entry = {"op": op, "collection": collection, "id": doc_id}
            if doc is not None:
                entry["doc"] = doc
            try:
                with open(self._journal_path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(entry, separators=(",", ":")) + "\n")
                    fh.flush()
                    os.fsync(fh.fileno())
            except OSError as e:
                raise EngineError("StoreUnavailable", f"cannot journal catalog change: {e}") from e
        self._apply(op, collection, doc_id, doc)

    def content_hash(self) -> str:
        with self._lock:
            snapshot = {
                "goals": sorted((g.to_doc() for g in self._goals.values()), key=lambda d: d["goal_id"]),
                "questions": sorted((q.to_doc() for q in self._questions.values()), key=lambda d: d["question_id"]),
                "indicators": sorted((i.to_doc() for i in self._indicators.values()), key=lambda d: d["indicator_id"]),
            }
        payload = json.dumps(snapshot, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()

    # -- goals ---------------------------------------------------------------

    def goals(self, status: str | None = None) -> list[Goal]:
        with self._lock:
            goals = sorted(self._goals.values(), key=lambda g: g.name.lower())
        if status is None:
            return goals
        return [g for g in goals if g.status == status]

    def find_goal(self, goal_id: str) -> Goal | None:
        with self._lock:
            return self._goals.get(goal_id)

    def request_goal(self, name: str, description: str, requester: str) -> Goal:
        name = name.strip()
        if not name:
            raise EngineError("DuplicateGoal", "goal name must not be empty")
        with self._lock:
            if any(g.name.lower() == name.lower() and g.status == GOAL_ACTIVE
                   for g in self._goals.values()):
                raise EngineError("DuplicateGoal", f"goal {name!r} already exists")
            goal = Goal(_new_id("goal"), name, description, GOAL_REQUESTED, requester)
            self._commit("put", "goals", goal.goal_id, goal.to_doc())
            return goal

    def review_goal(self, goal_id: str, decision: str, is_admin: bool) -> Goal | None:
        """Approve makes the goal available to questions; reject removes it."""
        if not is_admin:
            raise EngineError("NotAdmin", "goal review requires the admin token")
        if decision not in ("approve", "reject"):
            raise EngineError("BadDecision", "decision must be 'approve' or 'reject'")
        with self._lock:
            goal = self._goals.get(goal_id)
            if goal is None:
                raise EngineError("UnknownGoal", f"no goal {goal_id!r}")
            if decision == "reject":
                self._commit("delete", "goals", goal_id)
                return None
            if any(g.name.lower() == goal.name.lower() and g.status == GOAL_ACTIVE
                   for g in self._goals.values()):
                raise EngineError("DuplicateGoal", f"goal {goal.name!r} already active")
            approved = replace(goal, status=GOAL_ACTIVE)
            self._commit("put", "goals", goal_id, approved.to_doc())
            return approved

    # -- questions -------------------------------------------------------------

    def questions(self) -> list[Question]:
        with self._lock:
            return sorted(self._questions.values(), key=lambda q: q.question_id)

    def find_question(self, question_id: str) -> Question | None:
        with self._lock:
            return self._questions.get(question_id)

    def save_question(self, goal_id: str, text: str, owner: str) -> Question:
        text = text.strip()
        if not text:
            raise EngineError("InvalidQuestion", "question text must not be empty")
        with self._lock:
            goal = self._goals.get(goal_id)
            if goal is None or goal.status != GOAL_ACTIVE:
                raise EngineError("UnknownGoal", f"no active goal {goal_id!r}")
            question = Question(_new_id("q"), goal_id, text, owner)
            self._commit("put", "questions", question.question_id, question.to_doc())
            return question

    def delete_question(self, question_id: str, actor: str, is_admin: bool) -> None:
        with self._lock:
            question = self._questions.get(question_id)
            if question is None:
                raise EngineError("UnknownQuestion", f"no question {question_id!r}")
            if question.owner != actor and not is_admin:
                raise EngineError("NotOwner", "only the owner may delete a question")
            self._commit("delete", "questions", question_id)

    def associate_indicator(self, question_id: str, indicator_id: str,
                            actor: str, is_admin: bool) -> Question:
        with self._lock:
            question = self._questions.get(question_id)
            if question is None:
                raise EngineError("UnknownQuestion", f"no question {question_id!r}")
            if question.owner != actor and not is_admin:
                raise EngineError("NotOwner", "only the owner may edit a question")
            if indicator_id not in self._indicators:
                raise EngineError("UnknownIndicator", f"no indicator {indicator_id!r}")
            if indicator_id in question.indicator_ids:
                raise EngineError("DuplicateAssociation",
                                  f"indicator {indicator_id!r} already associated")
            updated = replace(question, indicator_ids=question.indicator_ids + (indicator_id,))
            self._commit("put", "questions", question_id, updated.to_doc())
            return updated

    def disassociate_indicator(self, question_id: str, indicator_id: str,
                               actor: str, is_admin: bool) -> Question:
        with self._lock:
            question = self._questions.get(question_id)
            if question is None:
                raise EngineError("UnknownQuestion", f"no question {question_id!r}")
            if question.owner != actor and not is_admin:
                raise EngineError("NotOwner", "only the owner may edit a question")
            if indicator_id not in question.indicator_ids:
                raise EngineError("NotAssociated",
                                  f"indicator {indicator_id!r} is not associated")
            remaining = tuple(i for i in question.indicator_ids if i != indicator_id)
            updated = replace(question, indicator_ids=remaining)
            self._commit("put", "questions", question_id, updated.to_doc())
            return updated

    # -- indicators ---------------------------------------------------------------

    def indicators(self) -> list[IndicatorRecord]:
        with self._lock:
            return sorted(self._indicators.values(), key=lambda i: i.created_at)

    def has_indicator(self, indicator_id: str) -> bool:
        with self._lock:
            return indicator_id in self._indicators

    def find_indicator(self, indicator_id: str) -> IndicatorRecord | None:
        with self._lock:
            return self._indicators.get(indicator_id)

    def part_ids(self, record: IndicatorRecord) -> tuple[str, ...]:
        if record.kind == KIND_BASIC:
            return ()
        return tuple(record.spec.get("parts", ()))

    def _check_parts(self, kind: str, spec: dict, ignore: str | None = None) -> None:
        if kind == KIND_BASIC:
            return
        parts = spec.get("parts", ())
        if len(parts) < 2:
            raise EngineError("InvalidSpec", f"{kind} indicators need at least two parts")
        for part_id in parts:
            if part_id == ignore:
                raise EngineError("InvalidSpec", "an indicator cannot reference itself")
            part = self._indicators.get(part_id)
            if part is None:
                raise EngineError("UnknownIndicator", f"part {part_id!r} does not exist")
            if part.kind != KIND_BASIC:
                raise EngineError("InvalidSpec", f"part {part_id!r} is not a basic indicator")

    def save_indicator(self, kind: str, spec: dict, owner: str) -> IndicatorRecord:
        if kind not in INDICATOR_KINDS:
            raise EngineError("InvalidSpec", f"kind must be one of {INDICATOR_KINDS}")
        with self._lock:
            self._check_parts(kind, spec)
            record = IndicatorRecord(_new_id("ind"), kind, copy.deepcopy(spec),
                                     owner, int(time.time()))
            self._commit("put", "indicators", record.indicator_id, record.to_doc())
            return record

    def update_indicator(self, indicator_id: str, spec: dict,
                         actor: str, is_admin: bool) -> IndicatorRecord:
        with self._lock:
            record = self._indicators.get(indicator_id)
            if record is None:
                raise EngineError("UnknownIndicator", f"no indicator {indicator_id!r}")
            if record.owner != actor and not is_admin:
                raise EngineError("NotOwner", "only the owner may edit an indicator")
            self._check_parts(record.kind, spec, ignore=indicator_id)
            updated = replace(record, spec=copy.deepcopy(spec))
            self._commit("put", "indicators", indicator_id, updated.to_doc())
            return updated

    def delete_indicator(self, indicator_id: str, actor: str, is_admin: bool) -> None:
        """Remove an indicator unless a composite/multi-level one builds on it;
        question associations are cleaned up in the same commit scope."""
        with self._lock:
            record = self._indicators.get(indicator_id)
            if record is None:
                raise EngineError("UnknownIndicator", f"no indicator {indicator_id!r}")
            if record.owner != actor and not is_admin:
                raise EngineError("NotOwner", "only the owner may delete an indicator")
            for other in self._indicators.values():
                if other.indicator_id != indicator_id and indicator_id in self.part_ids(other):
                    raise EngineError(
                        "RestrictDelete",
                        f"indicator {indicator_id!r} is a part of {other.indicator_id!r}",
                    )
            for question in list(self._questions.values()):
                if indicator_id in question.indicator_ids:
                    remaining = tuple(i for i in question.indicator_ids if i != indicator_id)
                    updated = replace(question, indicator_ids=remaining)
                    self._commit("put", "questions", question.question_id, updated.to_doc())
            self._commit("delete", "indicators", indicator_id)

    def load_indicator_copy(self, indicator_id: str, new_owner: str) -> IndicatorRecord:
        """Deep copy under a fresh id so the copy can be edited freely;
        composite/multi-level part references stay shared."""
        with self._lock:
            record = self._indicators.get(indicator_id)
            if record is None:
                raise EngineError("UnknownIndicator", f"no indicator {indicator_id!r}")
            clone = IndicatorRecord(_new_id("ind"), record.kind,
                                    copy.deepcopy(record.spec), new_owner, int(time.time()))
            self._commit("put", "indicators", clone.indicator_id, clone.to_doc())
            return clone

    def integrity_errors(self) -> list[str]:
        """Dangling references, if any; empty list means the catalog is sound."""
        problems = []
        with self._lock:
            for question in self._questions.values():
                if question.goal_id not in self._goals:
                    problems.append(f"question {question.question_id} references missing goal")
                for ind in question.indicator_ids:
                    if ind not in self._indicators:
                        problems.append(f"question {question.question_id} references missing indicator {ind}")
            for record in self._indicators.values():
                for part_id in self.part_ids(record):
                    if part_id not in self._indicators:
                        problems.append(f"indicator {record.indicator_id} references missing part {part_id}")
        return problems
