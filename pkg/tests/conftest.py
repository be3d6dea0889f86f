import pytest

from lava.charts import ChartRegistry
from lava.methods import default_registry
from lava.model import CategorySchema, Column, ColumnType, LearningEvent
from lava.store import EventStore

TEXT = ColumnType.TEXT
NUMERIC = ColumnType.NUMERIC


@pytest.fixture(scope="session")
def registry():
    return default_registry()


@pytest.fixture(scope="session")
def chart_registry():
    return ChartRegistry()


@pytest.fixture
def schemas():
    return (
        CategorySchema("Learning Materials", (
            Column("Name", TEXT),
            Column("File Extension", TEXT),
            Column("Size (in Bytes)", NUMERIC),
        )),
        CategorySchema("Assignments", (
            Column("Title", TEXT),
            Column("Total Marks", NUMERIC),
            Column("Due Date", TEXT),
        )),
    )


@pytest.fixture
def store(schemas):
    return EventStore(schemas=schemas)


def make_event(
    event_id="e1",
    user="u1",
    timestamp=1546300800,  # 2019-01-01T00:00:00Z
    source="Moodle",
    platform="web",
    action="view",
    category="Learning Materials",
    attributes=None,
):
    return LearningEvent(event_id, user, timestamp, source, platform,
                         action, category, attributes or {})


@pytest.fixture
def events():
    return [
        make_event("e1", "u1", 1546300800, attributes={"Name": "slides01.pdf", "File Extension": "pdf"}),
        make_event("e2", "u2", 1546387200, attributes={"Name": "intro.mp4", "File Extension": "mp4"}),
        make_event("e3", "u1", 1546905600, action="download",
                   attributes={"Name": "slides01.pdf", "Size (in Bytes)": 20480}),
    ]
