"""Event store plus the dataset-scoping, filtering, and privacy engine.

Storage is an append-only log (one JSON batch per line) with in-memory
state rebuilt at startup.  Readers always work against an immutable
snapshot taken when the query starts; a single lock serializes writers.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import os
import secrets
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .errors import EngineError
from .model import (
    DEFAULT_SCHEMAS,
    CategorySchema,
    ColumnType,
    DataTable,
    LearningEvent,
    MISSING,
    common_attributes,
    events_to_table,
    parse_event_document,
    schema_map,
)

EVENT_LOG_NAME = "events.log"
SECRET_NAME = "secret.key"
SCHEMAS_NAME = "schemas.json"

DIMENSIONS = ("source", "platform", "action", "category")


class PrivacyMode(str, Enum):
    EVERYONE_ANONYMIZED = "everyone_anonymized"
    OWN_DATA_ONLY = "own_data_only"
    EVERYONE_EXCEPT_OWN_ANONYMIZED = "everyone_except_own_anonymized"


@dataclass(frozen=True)
class DatasetScope:
    """Which slice of the store an indicator draws from.

    An empty set on sources/platforms/actions means no restriction on that
    dimension; categories must be selected before execution because the
    table schema is derived from them.
    """

    sources: frozenset[str] = frozenset()
    platforms: frozenset[str] = frozenset()
    actions: frozenset[str] = frozenset()
    categories: frozenset[str] = frozenset()

    @staticmethod
    def build(sources=(), platforms=(), actions=(), categories=()) -> "DatasetScope":
        return DatasetScope(
            frozenset(sources), frozenset(platforms), frozenset(actions), frozenset(categories)
        )

    def matches(self, event: LearningEvent) -> bool:
        if event.category not in self.categories:
            return False
        if self.sources and event.source not in self.sources:
            return False
        if self.platforms and event.platform not in self.platforms:
            return False
        if self.actions and event.action not in self.actions:
            return False
        return True

    def to_doc(self) -> dict:
        return {
            "sources": sorted(self.sources),
            "platforms": sorted(self.platforms),
            "actions": sorted(self.actions),
            "categories": sorted(self.categories),
        }

    @staticmethod
    def from_doc(doc) -> "DatasetScope":
        return DatasetScope.build(
            doc.get("sources", ()), doc.get("platforms", ()),
            doc.get("actions", ()), doc.get("categories", ()),
        )


@dataclass(frozen=True)
class FilterSet:
    """Attribute / time / user refinements applied after scoping.

    Attribute filters are a conjunction across attributes; within one
    attribute the accepted values form a disjunction.  The time window is
    half-open: start inclusive, end exclusive, in epoch seconds.
    """

    attribute_filters: tuple[tuple[str, frozenset], ...] = ()
    time_start: int | None = None
    time_end: int | None = None
    privacy_mode: PrivacyMode = PrivacyMode.EVERYONE_ANONYMIZED

    @staticmethod
    def build(
        attribute_filters: Iterable[tuple[str, Iterable]] = (),
        time_start: int | None = None,
        time_end: int | None = None,
        privacy_mode: PrivacyMode = PrivacyMode.EVERYONE_ANONYMIZED,
    ) -> "FilterSet":
        return FilterSet(
            tuple((name, frozenset(values)) for name, values in attribute_filters),
            time_start,
            time_end,
            PrivacyMode(privacy_mode),
        )

    def matches(self, event: LearningEvent) -> bool:
        if self.time_start is not None and event.timestamp < self.time_start:
            return False
        if self.time_end is not None and event.timestamp >= self.time_end:
            return False
        for name, accepted in self.attribute_filters:
            if event.attributes.get(name, MISSING) not in accepted:
                return False
        return True

    def to_doc(self) -> dict:
        return {
            "attribute_filters": [
                {"attribute": name, "values": sorted(values, key=repr)}
                for name, values in self.attribute_filters
            ],
            "time_start": self.time_start,
            "time_end": self.time_end,
            "privacy_mode": self.privacy_mode.value,
        }

    @staticmethod
    def from_doc(doc) -> "FilterSet":
        return FilterSet.build(
            [(f["attribute"], f["values"]) for f in doc.get("attribute_filters", ())],
            doc.get("time_start"),
            doc.get("time_end"),
            PrivacyMode(doc.get("privacy_mode", PrivacyMode.EVERYONE_ANONYMIZED)),
        )


@dataclass(frozen=True)
class StoreSnapshot:
    """Immutable view of the committed events; what every query runs against."""

    events: tuple[LearningEvent, ...]
    ids: frozenset[str]


class EventStore:
    """Append-only event store with per-batch atomic commits.

    With a data directory the log, pseudonymization secret, and category
    schemas persist across restarts; without one the store is purely
    in-memory (tests, previews).
    """

    def __init__(
        self,
        data_dir: str | None = None,
        schemas: Iterable[CategorySchema] | None = None,
    ):
        self._lock = threading.Lock()
        self._data_dir = data_dir
        self._log_path = os.path.join(data_dir, EVENT_LOG_NAME) if data_dir else None
        events: list[LearningEvent] = []

        if data_dir:
            os.makedirs(data_dir, exist_ok=True)
            self._secret = self._load_or_create_secret(os.path.join(data_dir, SECRET_NAME))
            self.schemas = self._load_or_create_schemas(
                os.path.join(data_dir, SCHEMAS_NAME), schemas
            )
            events = self._replay_log()
        else:
            self._secret = secrets.token_bytes(32)
            self.schemas = schema_map(schemas if schemas is not None else DEFAULT_SCHEMAS)

        self._snapshot = StoreSnapshot(tuple(events), frozenset(e.event_id for e in events))

    # -- persistence ---------------------------------------------------------

    @staticmethod
    def _load_or_create_secret(path: str) -> bytes:
        if os.path.exists(path):
            with open(path, "r", encoding="ascii") as fh:
                return bytes.fromhex(fh.read().strip())
        secret = secrets.token_bytes(32)
        with open(path, "w", encoding="ascii") as fh:
            fh.write(secret.hex())
        return secret

    @staticmethod
    def _load_or_create_schemas(path: str, schemas) -> dict[str, CategorySchema]:
        if os.path.exists(path):
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
            return schema_map(CategorySchema.from_doc(s) for s in doc["categories"])
        chosen = tuple(schemas) if schemas is not None else DEFAULT_SCHEMAS
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({"categories": [s.to_doc() for s in chosen]}, fh, indent=2)
        return schema_map(chosen)

    def _replay_log(self) -> list[LearningEvent]:
        events: list[LearningEvent] = []
        if not self._log_path or not os.path.exists(self._log_path):
            return events
        with open(self._log_path, "r", encoding="utf-8") as fh:
            content = fh.read()
        for line in content.split("\n")[:-1]:  # a line without trailing \n is a torn write
            line = line.strip()
            if not line:
                continue
            try:
                batch = json.loads(line)
            except json.JSONDecodeError:
                continue  # torn or corrupt batch: skip, never partially apply
            for doc in batch:
                event = parse_event_document(doc)
                if isinstance(event, LearningEvent):
                    events.append(event)
        return events

    # -- writes ---------------------------------------------------------------

    def append(self, events: Sequence[LearningEvent]) -> None:
        """Commit a batch: durable first, then visible to readers as one unit."""
        if not events:
            return
        with self._lock:
            snap = self._snapshot
            if self._log_path:
                try:
                    line = json.dumps([e.to_doc() for e in events], separators=(",", ":"))
                    with open(self._log_path, "a", encoding="utf-8") as fh:
                        fh.write(line + "\n")
                        fh.flush()
                        os.fsync(fh.fileno())
                except OSError as e:
                    raise EngineError("StoreUnavailable", f"cannot append to event log: {e}") from e
            self._snapshot = StoreSnapshot(
                snap.events + tuple(events),
                snap.ids | {e.event_id for e in events},
            )

    # -- reads ----------------------------------------------------------------

    def snapshot(self) -> StoreSnapshot:
        return self._snapshot

    def contains(self, event_id: str) -> bool:
        return event_id in self._snapshot.ids

    def __len__(self) -> int:
        return len(self._snapshot.events)

    def pseudonym(self, user_id: str) -> str:
        """Stable keyed pseudonym: same user, same token, per deployment."""
        return hmac.new(self._secret, user_id.encode("utf-8"), hashlib.sha256).hexdigest()[:12]

    def content_hash(self) -> str:
        """Order-sensitive digest of the committed events (restart comparisons)."""
        h = hashlib.sha256()
        for e in self._snapshot.events:
            h.update(json.dumps(e.to_doc(), sort_keys=True, separators=(",", ":")).encode())
            h.update(b"\n")
        return h.hexdigest()


# --- query operations --------------------------------------------------------

def list_dimension_values(store: EventStore, dimension: str) -> list[str]:
    """Distinct stored values of one scope dimension, lexicographically sorted."""
    if dimension not in DIMENSIONS:
        raise EngineError("UnknownDimension", f"dimension must be one of {DIMENSIONS}")
    getter = {
        "source": lambda e: e.source,
        "platform": lambda e: e.platform,
        "action": lambda e: e.action,
        "category": lambda e: e.category,
    }[dimension]
    return sorted({getter(e) for e in store.snapshot().events})


def _require_common(store: EventStore, scope: DatasetScope, attribute: str) -> ColumnType:
    common = {c.name: c.type for c in common_attributes(scope.categories, store.schemas)}
    if attribute not in common:
        raise EngineError(
            "AttributeNotCommon",
            f"attribute {attribute!r} is not common to categories {sorted(scope.categories)}",
        )
    return common[attribute]


def list_attribute_values(
    store: EventStore, scope: DatasetScope, attribute: str, query_prefix: str = ""
) -> list:
    """Distinct values of *attribute* within the scope, filtered by a
    case-insensitive prefix and sorted (numerically for Numeric attributes)."""
    ctype = _require_common(store, scope, attribute)
    prefix = query_prefix.lower()
    values = set()
    for e in store.snapshot().events:
        if not scope.matches(e):
            continue
        value = e.attributes.get(attribute, MISSING)
        if value is MISSING:
            continue
        if prefix and not str(value).lower().startswith(prefix):
            continue
        values.add(value)
    return sorted(values) if ctype is ColumnType.NUMERIC else sorted(values, key=str)


def check_filters(store: EventStore, scope: DatasetScope, filters: FilterSet) -> None:
    """Raise unless the filter set is executable under the scope."""
    if not scope.categories:
        raise EngineError("EmptyScope", "scope must select at least one category")
    if (
        filters.time_start is not None
        and filters.time_end is not None
        and filters.time_start > filters.time_end
    ):
        raise EngineError("InvalidTimeRange", "time_start is after time_end")
    for name, _ in filters.attribute_filters:
        _require_common(store, scope, name)


def query_dataset(
    store: EventStore, scope: DatasetScope, filters: FilterSet, requester: str
) -> DataTable:
    """Materialize the events matching scope, attribute filters, and the time
    window, then apply the privacy mode to the User column.

    own_data_only keeps only the requester's rows with the real user id;
    everyone_anonymized keeps all rows with pseudonymized users;
    everyone_except_own_anonymized drops the requester's rows and
    pseudonymizes the rest.
    """
    check_filters(store, scope, filters)
    selected = [
        e for e in store.snapshot().events
        if scope.matches(e) and filters.matches(e)
    ]

    mode = filters.privacy_mode
    if mode is PrivacyMode.OWN_DATA_ONLY:
        selected = [e for e in selected if e.user_id == requester]
    elif mode is PrivacyMode.EVERYONE_EXCEPT_OWN_ANONYMIZED:
        selected = [e for e in selected if e.user_id != requester]

    table = events_to_table(selected, scope.categories, store.schemas)
    if mode is PrivacyMode.OWN_DATA_ONLY:
        return table

    user_col = table.column_index("User")
    rows = tuple(
        row[:user_col] + (store.pseudonym(row[user_col]),) + row[user_col + 1:]
        for row in table.rows
    )
    return DataTable(table.columns, rows)
