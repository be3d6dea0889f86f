import json
import math
import random

import pytest

from lava.charts import (
    ChartChoice,
    ChartRegistry,
    five_number_summary,
    list_chart_types,
    render_chart,
    validate_chart_spec,
    validate_viz_mapping,
)
from lava.errors import EngineError
from lava.model import Column, ColumnType, DataTable, MISSING

TEXT = ColumnType.TEXT
NUMERIC = ColumnType.NUMERIC

TOP_N_SCHEMA = [("Item", "Text"), ("Count", "Numeric")]


def table(cols, rows):
    return DataTable.build(cols, rows)


class TestChartCatalog:
    def test_stacked_area_roles(self, chart_registry):
        (family,) = [f for f in list_chart_types(chart_registry) if f["library_id"] == "c3js"]
        (stacked,) = [c for c in family["charts"] if c["chart_type"] == "stacked_area"]
        roles = {r["role"]: r for r in stacked["roles"]}
        assert roles["x"]["type"] == "Text" and roles["x"]["required"]
        assert roles["y"]["type"] == "Numeric" and roles["y"]["required"]
        assert roles["series"]["type"] == "Text" and roles["series"]["required"]

    def test_pie_roles(self, chart_registry):
        (family,) = [f for f in list_chart_types(chart_registry) if f["library_id"] == "c3js"]
        (pie,) = [c for c in family["charts"] if c["chart_type"] == "pie"]
        roles = {r["role"]: r["type"] for r in pie["roles"]}
        assert roles == {"label": "Text", "value": "Numeric"}

    def test_unknown_family(self, chart_registry):
        assert list_chart_types(chart_registry, "plotlib9000") == []


class TestValidateVizMapping:
    def test_bar_over_top_n_output(self, chart_registry):
        choice = ChartChoice.build("c3js", "bar", {"x": "Item", "y": "Count"})
        schema = [Column("Item", TEXT), Column("Count", NUMERIC)]
        assert validate_viz_mapping(chart_registry, choice, schema).ok

    def test_y_bound_to_text_column(self, chart_registry):
        choice = ChartChoice.build("c3js", "bar", {"x": "Item", "y": "Item"})
        schema = [Column("Item", TEXT), Column("Count", NUMERIC)]
        report = validate_viz_mapping(chart_registry, choice, schema)
        assert "TypeMismatch" in report.codes()

    def test_stacked_area_needs_series(self, chart_registry):
        choice = ChartChoice.build("c3js", "stacked_area", {"x": "Item", "y": "Count"})
        schema = [Column("Item", TEXT), Column("Count", NUMERIC)]
        report = validate_viz_mapping(chart_registry, choice, schema)
        assert report.codes() == {"MissingRequiredInput"}

    def test_unsupported_combination(self, chart_registry):
        choice = ChartChoice.build("c3js", "box_plot", {"value": "Count"})
        report = validate_viz_mapping(chart_registry, choice, [Column("Count", NUMERIC)])
        assert report.codes() == {"UnsupportedChartType"}


class TestRenderStackedArea:
    def choice(self):
        return ChartChoice.build("c3js", "stacked_area", {"x": "Week", "y": "Count", "series": "Item"})

    def test_three_week_fixture_pivoted_by_hand(self, chart_registry):
        analyzed = table([("Item", "Text"), ("Week", "Text"), ("Count", "Numeric")], [
            ("slides", "2019-W01", 4),
            ("slides", "2019-W03", 1),
            ("video", "2019-W01", 2),
            ("video", "2019-W02", 5),
        ])
        spec = render_chart(chart_registry, self.choice(), analyzed, "demo")
        assert spec["domain"] == ["2019-W01", "2019-W02", "2019-W03"]
        assert spec["series"] == [
            {"name": "slides", "values": [4, 0, 1]},
            {"name": "video", "values": [2, 5, 0]},
        ]
        assert validate_chart_spec(spec).ok

    def test_week_gap_filling_across_year_boundary(self, chart_registry):
        analyzed = table([("Item", "Text"), ("Week", "Text"), ("Count", "Numeric")], [
            ("a", "2019-W52", 1), ("a", "2020-W02", 1),
        ])
        spec = render_chart(chart_registry, self.choice(), analyzed)
        assert spec["domain"] == ["2019-W52", "2020-W01", "2020-W02"]
        assert spec["series"][0]["values"] == [1, 0, 1]

    def test_zero_rows(self, chart_registry):
        analyzed = table([("Item", "Text"), ("Week", "Text"), ("Count", "Numeric")], [])
        spec = render_chart(chart_registry, self.choice(), analyzed)
        assert spec["domain"] == []
        assert spec["series"] == []
        assert validate_chart_spec(spec).ok

    def test_pure_function(self, chart_registry):
        analyzed = table([("Item", "Text"), ("Week", "Text"), ("Count", "Numeric")],
                         [("a", "2019-W01", 1)])
        first = render_chart(chart_registry, self.choice(), analyzed, "t")
        second = render_chart(chart_registry, self.choice(), analyzed, "t")
        assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)


class TestRenderShapes:
    def test_composite_series_from_indicator_column(self, chart_registry):
        analyzed = table(
            [("Indicator", "Text"), ("Item", "Text"), ("Count", "Numeric")],
            [("Number of students", "a", 3), ("Number of students", "b", 2),
             ("Total Views", "a", 9), ("Total Views", "b", 7)],
        )
        choice = ChartChoice.build("c3js", "bar", {"x": "Item", "y": "Count", "series": "Indicator"})
        spec = render_chart(chart_registry, choice, analyzed)
        assert [s["name"] for s in spec["series"]] == ["Number of students", "Total Views"]

    def test_bar_without_series_uses_value_name(self, chart_registry):
        analyzed = table(TOP_N_SCHEMA, [("a", 1), ("b", 2)])
        choice = ChartChoice.build("c3js", "bar", {"x": "Item", "y": "Count"})
        spec = render_chart(chart_registry, choice, analyzed)
        assert spec["series"] == [{"name": "Count", "values": [1, 2]}]
        assert spec["domain"] == ["a", "b"]

    def test_duplicate_x_values_summed(self, chart_registry):
        analyzed = table(TOP_N_SCHEMA, [("a", 1), ("a", 2)])
        choice = ChartChoice.build("c3js", "bar", {"x": "Item", "y": "Count"})
        spec = render_chart(chart_registry, choice, analyzed)
        assert spec["series"][0]["values"] == [3]

    def test_pie(self, chart_registry):
        analyzed = table(TOP_N_SCHEMA, [("a", 3), ("b", 1)])
        choice = ChartChoice.build("c3js", "pie", {"label": "Item", "value": "Count"})
        spec = render_chart(chart_registry, choice, analyzed)
        assert spec["domain"] == ["a", "b"]
        assert spec["series"][0]["values"] == [3, 1]

    def test_scatter_grouped_by_series(self, chart_registry):
        analyzed = table(
            [("Entity", "Text"), ("Cluster", "Text"), ("F1", "Numeric"), ("F2", "Numeric")],
            [("u1", "C0", 1.0, 2.0), ("u2", "C1", 5.0, 6.0), ("u3", "C0", 1.5, 2.5)],
        )
        choice = ChartChoice.build("c3js", "scatter",
                                   {"x": "F1", "y": "F2", "series": "Cluster", "label": "Entity"})
        spec = render_chart(chart_registry, choice, analyzed)
        by_name = {s["name"]: s for s in spec["series"]}
        assert by_name["C0"]["points"] == [[1.0, 2.0], [1.5, 2.5]]
        assert by_name["C0"]["labels"] == ["u1", "u3"]
        assert by_name["C1"]["points"] == [[5.0, 6.0]]

    def test_invalid_mapping_raises(self, chart_registry):
        analyzed = table(TOP_N_SCHEMA, [("a", 1)])
        choice = ChartChoice.build("c3js", "bar", {"x": "Item", "y": "Item"})
        with pytest.raises(EngineError) as err:
            render_chart(chart_registry, choice, analyzed)
        assert err.value.code == "VizMappingInvalid"


class TestSumPreservation:
    @pytest.mark.parametrize("chart_type,mapping", [
        ("bar", {"x": "Item", "y": "Count", "series": "Tag"}),
        ("stacked_area", {"x": "Item", "y": "Count", "series": "Tag"}),
        ("pie", {"label": "Item", "value": "Count"}),
    ])
    def test_random_tables(self, chart_registry, chart_type, mapping):
        rng = random.Random(hash(chart_type) & 0xFFFF)
        for _ in range(150):
            rows = [
                (rng.choice("abcd"), rng.choice(["t1", "t2"]),
                 rng.choice([rng.randrange(-5, 50), rng.random() * 10]))
                for _ in range(rng.randrange(0, 40))
            ]
            analyzed = table([("Item", "Text"), ("Tag", "Text"), ("Count", "Numeric")], rows)
            choice = ChartChoice.build("c3js", chart_type, mapping)
            spec = render_chart(chart_registry, choice, analyzed)
            plotted = sum(sum(s["values"]) for s in spec["series"])
            assert math.isclose(plotted, sum(r[2] for r in rows), rel_tol=0, abs_tol=1e-9)


class TestBoxPlot:
    def test_five_number_summary_odd(self):
        # 1..9: Tukey hinges include the median in both halves.
        summary = five_number_summary(range(1, 10))
        assert summary == {"low": 1.0, "q1": 3.0, "median": 5.0, "q3": 7.0,
                           "high": 9.0, "outliers": []}

    def test_five_number_summary_even(self):
        summary = five_number_summary([1, 2, 3, 4])
        assert summary["q1"] == 1.5 and summary["median"] == 2.5 and summary["q3"] == 3.5

    def test_outliers_beyond_whiskers(self):
        values = [10, 11, 12, 13, 14, 15, 16, 40]
        summary = five_number_summary(values)
        assert summary["outliers"] == [40.0]
        assert summary["high"] == 16.0

    def test_render_grouped(self, chart_registry):
        analyzed = table([("Group", "Text"), ("Aggregate", "Numeric")],
                         [("a", 1), ("a", 2), ("a", 3), ("b", 10), ("b", 20), ("b", 30)])
        choice = ChartChoice.build("googlecharts", "box_plot",
                                   {"value": "Aggregate", "group": "Group"})
        spec = render_chart(chart_registry, choice, analyzed)
        assert spec["domain"] == ["a", "b"]
        assert spec["series"][0]["summary"]["median"] == 2.0
        assert spec["series"][1]["summary"]["median"] == 20.0


class TestMissingCells:
    def test_missing_y_contributes_zero(self, chart_registry):
        analyzed = table(TOP_N_SCHEMA, [("a", 5), ("b", MISSING)])
        choice = ChartChoice.build("c3js", "bar", {"x": "Item", "y": "Count"})
        spec = render_chart(chart_registry, choice, analyzed)
        assert spec["series"][0]["values"] == [5, 0]

    def test_missing_x_becomes_label(self, chart_registry):
        analyzed = table(TOP_N_SCHEMA, [(MISSING, 5)])
        choice = ChartChoice.build("c3js", "bar", {"x": "Item", "y": "Count"})
        spec = render_chart(chart_registry, choice, analyzed)
        assert spec["domain"] == ["(missing)"]
        assert spec["series"][0]["values"] == [5]
