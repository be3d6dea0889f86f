import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from lava.errors import EngineError
from lava.methods import (
    AnalyticsMethodDescriptor,
    MappingSet,
    MethodInput,
    MethodRegistry,
    default_registry,
    execute_method,
    iso_week,
    list_methods,
    suggest_mappings,
    validate_mapping,
)
from lava.model import Column, ColumnType, DataTable, MISSING

import oracles

TEXT = ColumnType.TEXT
NUMERIC = ColumnType.NUMERIC


def table(cols, rows):
    return DataTable.build(cols, rows)


class TestRegistry:
    def test_count_items_per_week_descriptor(self, registry):
        d = registry.get("count_items_per_week")
        by_name = {i.name: i for i in d.inputs}
        assert by_name["Items to count"].type is TEXT and by_name["Items to count"].required
        assert by_name["User"].type is TEXT and not by_name["User"].required
        assert by_name["Timestamp"].type is NUMERIC and by_name["Timestamp"].required

    def test_top_n_default(self, registry):
        d = registry.get("count_n_most_occurring_items")
        assert d.parameters[0].name == "N"
        assert d.parameters[0].default == 10

    def test_empty_registry(self):
        assert list_methods(MethodRegistry()) == []

    def test_listing_contains_all_shipped(self, registry):
        ids = {d.method_id for d in list_methods(registry)}
        assert {"count_items", "count_items_per_week", "count_n_most_occurring_items",
                "sum_per_group", "average_per_group", "count_per_group",
                "pearson_correlation", "kmeans_clustering"} <= ids

    def test_unknown_method(self, registry):
        with pytest.raises(EngineError) as err:
            registry.get("nope")
        assert err.value.code == "UnknownMethod"


class TestValidateMapping:
    def setup_method(self):
        self.schema = [Column("Timestamp", NUMERIC), Column("Category", TEXT),
                       Column("Size (in Bytes)", NUMERIC)]

    def test_valid_binding(self, registry):
        d = registry.get("count_items_per_week")
        report = validate_mapping(d, self.schema, MappingSet.build({
            "Timestamp": "Timestamp", "Items to count": "Category"}))
        assert report.ok

    def test_missing_required_input(self, registry):
        d = registry.get("count_items_per_week")
        report = validate_mapping(d, self.schema, MappingSet.build({"Timestamp": "Timestamp"}))
        assert report.codes() == {"MissingRequiredInput"}
        assert report.issues[0].field == "Items to count"

    def test_type_mismatch(self, registry):
        d = registry.get("count_items_per_week")
        report = validate_mapping(d, self.schema, MappingSet.build({
            "Timestamp": "Timestamp", "Items to count": "Size (in Bytes)"}))
        assert "TypeMismatch" in report.codes()

    def test_unknown_column_and_input(self, registry):
        d = registry.get("count_items")
        report = validate_mapping(d, self.schema, MappingSet.build({
            "Items to count": "Ghost", "Bogus": "Category"}))
        assert {"UnknownColumn", "UnknownInput"} <= report.codes()


class TestSuggestMappings:
    def test_exact_name_and_type(self, registry):
        d = registry.get("count_items_per_week")
        schema = [Column("Timestamp", NUMERIC), Column("Item", TEXT), Column("Other", TEXT)]
        suggested = suggest_mappings(d, schema).as_dict()
        assert suggested["Timestamp"] == "Timestamp"

    def test_unique_type_match(self, registry):
        d = registry.get("count_items")
        schema = [Column("Stuff", TEXT), Column("N", NUMERIC)]
        assert suggest_mappings(d, schema).as_dict() == {"Items to count": "Stuff"}

    def test_ambiguous_left_unbound(self, registry):
        d = registry.get("count_items")
        schema = [Column("A", TEXT), Column("B", TEXT)]
        assert suggest_mappings(d, schema).as_dict() == {}

    def test_exact_match_consumes_column(self):
        d = AnalyticsMethodDescriptor(
            "m", "m",
            inputs=(MethodInput("X", NUMERIC), MethodInput("Y", NUMERIC)),
            outputs=(Column("R", NUMERIC),),
        )
        schema = [Column("X", NUMERIC), Column("Other", NUMERIC)]
        suggested = suggest_mappings(d, schema).as_dict()
        assert suggested == {"X": "X", "Y": "Other"}

    def test_suggestion_soundness_fuzz(self):
        rng = random.Random(99)
        names = [f"c{i}" for i in range(8)]
        for _ in range(300):
            inputs = tuple(
                MethodInput(f"in{i}", rng.choice([TEXT, NUMERIC]), rng.random() < 0.5)
                for i in range(rng.randrange(1, 5))
            )
            descriptor = AnalyticsMethodDescriptor("f", "f", inputs, (Column("out", TEXT),))
            schema = [Column(n, rng.choice([TEXT, NUMERIC]))
                      for n in rng.sample(names, rng.randrange(0, 8))]
            report = validate_mapping(descriptor, schema, suggest_mappings(descriptor, schema))
            assert not report.codes() & {"TypeMismatch", "UnknownColumn", "UnknownInput"}


class TestCountingMethods:
    def test_week_bucketing(self, registry):
        t = table([("Action", "Text"), ("Timestamp", "Numeric")], [
            ("view", 1546300800),   # 2019-01-01 -> W01
            ("view", 1546905600),   # 2019-01-08 -> W02
        ])
        out = execute_method(registry, "count_items_per_week", t,
                             MappingSet.build({"Items to count": "Action", "Timestamp": "Timestamp"}))
        assert out.rows == (("view", "2019-W01", 1), ("view", "2019-W02", 1))

    def test_week_of_year_boundary(self):
        # 2018-12-31 belongs to ISO week 2019-W01.
        assert iso_week(1546214400) == "2019-W01"

    def test_distinct_user_counting(self, registry):
        t = table([("Item", "Text"), ("User", "Text"), ("Timestamp", "Numeric")], [
            ("a", "u1", 1546300800), ("a", "u1", 1546300900), ("a", "u2", 1546301000),
        ])
        out = execute_method(registry, "count_items_per_week", t, MappingSet.build({
            "Items to count": "Item", "User": "User", "Timestamp": "Timestamp"}))
        assert out.rows == (("a", "2019-W01", 2),)

    def test_top_n_tie_break(self, registry):
        t = table([("Item", "Text")], [("C",)] + [("A",)] * 3 + [("B",)] * 3)
        out = execute_method(registry, "count_n_most_occurring_items", t,
                             MappingSet.build({"Items to count": "Item"}), {"N": 2})
        assert out.rows == (("A", 3), ("B", 3))

    def test_top_n_is_prefix_of_full_ranking(self, registry):
        rng = random.Random(5)
        rows = [(rng.choice("abcdef"),) for _ in range(200)]
        t = table([("Item", "Text")], rows)
        full = execute_method(registry, "count_items", t, MappingSet.build({"Items to count": "Item"}))
        ranked = sorted(full.rows, key=lambda r: (-r[1], r[0]))
        for n in (1, 3, 6, 10):
            top = execute_method(registry, "count_n_most_occurring_items", t,
                                 MappingSet.build({"Items to count": "Item"}), {"N": n})
            assert list(top.rows) == ranked[:n]

    def test_top_n_bad_parameter(self, registry):
        t = table([("Item", "Text")], [("a",)])
        with pytest.raises(EngineError) as err:
            execute_method(registry, "count_n_most_occurring_items", t,
                           MappingSet.build({"Items to count": "Item"}), {"N": 0})
        assert err.value.code == "ParameterOutOfRange"

    def test_unknown_parameter(self, registry):
        t = table([("Item", "Text")], [("a",)])
        with pytest.raises(EngineError) as err:
            execute_method(registry, "count_items", t,
                           MappingSet.build({"Items to count": "Item"}), {"N": 3})
        assert err.value.code == "ParameterOutOfRange"

    def test_counting_empty_input_returns_zero_rows(self, registry):
        t = table([("Item", "Text")], [])
        out = execute_method(registry, "count_items", t, MappingSet.build({"Items to count": "Item"}))
        assert out.rows == ()
        assert [c.name for c in out.columns] == ["Item", "Count"]

    def test_missing_cells_dropped(self, registry):
        t = table([("Item", "Text")], [("a",), (MISSING,), ("a",)])
        out = execute_method(registry, "count_items", t, MappingSet.build({"Items to count": "Item"}))
        assert out.rows == (("a", 2),)

    def test_counting_matches_recount_oracle(self, registry):
        rng = random.Random(17)
        for _ in range(500):  # two checks per round: >=1000 oracle comparisons
            rows = [(rng.choice("abcd"), rng.choice(["u1", "u2", "u3"]))
                    for _ in range(rng.randrange(0, 60))]
            t = table([("Item", "Text"), ("User", "Text")], rows)
            out = execute_method(registry, "count_items", t,
                                 MappingSet.build({"Items to count": "Item"}))
            assert dict(out.rows) == oracles.count_rows(r[0] for r in rows)
            top = execute_method(registry, "count_n_most_occurring_items", t,
                                 MappingSet.build({"Items to count": "Item", "User": "User"}),
                                 {"N": 3})
            assert list(top.rows) == oracles.top_n(oracles.count_distinct(rows), 3)


class TestGroupMethods:
    def test_sum_and_average(self, registry):
        t = table([("Group", "Text"), ("Value", "Numeric")], [
            ("u1", 10), ("u1", 20), ("u2", 5)])
        mapping = MappingSet.build({"Group": "Group", "Value": "Value"})
        sums = execute_method(registry, "sum_per_group", t, mapping)
        assert sums.rows == (("u1", 30), ("u2", 5))
        avgs = execute_method(registry, "average_per_group", t, mapping)
        assert avgs.rows == (("u1", 15.0), ("u2", 5.0))

    def test_count_per_group(self, registry):
        t = table([("Group", "Text")], [("u1",), ("u1",), ("u2",)])
        out = execute_method(registry, "count_per_group", t, MappingSet.build({"Group": "Group"}))
        assert out.rows == (("u1", 2), ("u2", 1))

    def test_group_outputs_sorted(self, registry):
        t = table([("Group", "Text"), ("Value", "Numeric")], [("z", 1), ("a", 1)])
        out = execute_method(registry, "sum_per_group", t,
                             MappingSet.build({"Group": "Group", "Value": "Value"}))
        assert [r[0] for r in out.rows] == ["a", "z"]


class TestPearson:
    def mapping(self):
        return MappingSet.build({"X": "X", "Y": "Y"})

    def test_perfect_linearity(self, registry):
        t = table([("X", "Numeric"), ("Y", "Numeric")], [(1, 2), (2, 4), (3, 6)])
        out = execute_method(registry, "pearson_correlation", t, self.mapping())
        ((r, count),) = out.rows
        assert count == 3
        assert abs(r - 1.0) <= 1e-12

    def test_zero_variance_gives_missing_r(self, registry):
        t = table([("X", "Numeric"), ("Y", "Numeric")], [(1, 2), (1, 4)])
        out = execute_method(registry, "pearson_correlation", t, self.mapping())
        ((r, count),) = out.rows
        assert r is MISSING and count == 2

    def test_empty_input_is_an_error(self, registry):
        t = table([("X", "Numeric"), ("Y", "Numeric")], [])
        with pytest.raises(EngineError) as err:
            execute_method(registry, "pearson_correlation", t, self.mapping())
        assert err.value.code == "EmptyInput"

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(
            st.tuples(st.integers(-100, 100), st.integers(-100, 100)),
            min_size=3, max_size=40,
        ),
        st.floats(min_value=0.1, max_value=50),
        st.floats(min_value=-100, max_value=100),
    )
    def test_range_and_affine_invariance(self, pairs, scale, shift):
        registry = default_registry()
        t = table([("X", "Numeric"), ("Y", "Numeric")], pairs)
        out = execute_method(registry, "pearson_correlation", t, self.mapping())
        ((r, _),) = out.rows
        if r is MISSING:
            return
        assert -1.0 <= r <= 1.0
        transformed = table(
            [("X", "Numeric"), ("Y", "Numeric")],
            [(x * scale + shift, y) for x, y in pairs],
        )
        ((r2, _),) = execute_method(registry, "pearson_correlation", transformed, self.mapping()).rows
        assert abs(r - r2) <= 1e-9


class TestKMeans:
    def mapping(self):
        return MappingSet.build({"Entity": "E", "Feature1": "F1", "Feature2": "F2"})

    def planted(self, rng, centers, spread, per_cluster=12):
        rows, truth = [], []
        for c, (cx, cy) in enumerate(centers):
            for i in range(per_cluster):
                rows.append((f"e{c}-{i}",
                             cx + rng.uniform(-spread, spread),
                             cy + rng.uniform(-spread, spread)))
                truth.append(c)
        return rows, truth

    def test_planted_two_clusters_recovered(self, registry):
        rng = random.Random(3)
        rows, truth = self.planted(rng, [(0.0, 0.0), (100.0, 100.0)], spread=1.0)
        t = table([("E", "Text"), ("F1", "Numeric"), ("F2", "Numeric")], rows)
        out = execute_method(registry, "kmeans_clustering", t, self.mapping(), {"k": 2})
        labels = out.column_values("Cluster")
        assert oracles.adjusted_rand_index(labels, truth) == 1.0
        assert set(labels) == {"C0", "C1"}

    def test_deterministic_with_seed(self, registry):
        rng = random.Random(4)
        rows, _ = self.planted(rng, [(0, 0), (50, 0), (0, 50)], spread=2.0)
        t = table([("E", "Text"), ("F1", "Numeric"), ("F2", "Numeric")], rows)
        first = execute_method(registry, "kmeans_clustering", t, self.mapping(), {"k": 3, "seed": 42})
        second = execute_method(registry, "kmeans_clustering", t, self.mapping(), {"k": 3, "seed": 42})
        assert first == second

    def test_every_entity_labeled_once(self, registry):
        rng = random.Random(5)
        rows, _ = self.planted(rng, [(0, 0), (30, 30)], spread=5.0)
        t = table([("E", "Text"), ("F1", "Numeric"), ("F2", "Numeric")], rows)
        out = execute_method(registry, "kmeans_clustering", t, self.mapping(), {"k": 2})
        assert out.column_values("Entity") == [r[0] for r in rows]

    def test_single_feature_clustering(self, registry):
        t = table([("E", "Text"), ("F1", "Numeric")],
                  [("a", 0.0), ("b", 0.5), ("c", 100.0), ("d", 100.5)])
        out = execute_method(registry, "kmeans_clustering", t,
                             MappingSet.build({"Entity": "E", "Feature1": "F1"}), {"k": 2})
        labels = out.column_values("Cluster")
        assert labels[0] == labels[1] and labels[2] == labels[3]
        assert labels[0] != labels[2]
        assert set(out.column_values("Feature2")) == {MISSING}

    def test_empty_input_is_an_error(self, registry):
        t = table([("E", "Text"), ("F1", "Numeric"), ("F2", "Numeric")], [])
        with pytest.raises(EngineError) as err:
            execute_method(registry, "kmeans_clustering", t, self.mapping(), {"k": 2})
        assert err.value.code == "EmptyInput"

    def test_k_larger_than_points(self, registry):
        t = table([("E", "Text"), ("F1", "Numeric"), ("F2", "Numeric")], [("a", 1, 2)])
        with pytest.raises(EngineError) as err:
            execute_method(registry, "kmeans_clustering", t, self.mapping(), {"k": 3})
        assert err.value.code == "ParameterOutOfRange"


class TestExecuteContract:
    def test_invalid_mapping_rejected(self, registry):
        t = table([("Item", "Text")], [("a",)])
        with pytest.raises(EngineError) as err:
            execute_method(registry, "count_items", t, MappingSet.build({}))
        assert err.value.code == "MappingInvalid"
        assert "MissingRequiredInput" in err.value.issues.codes()

    def test_output_schema_always_matches_descriptor(self, registry):
        t = table([("Item", "Text")], [("a",)])
        out = execute_method(registry, "count_items", t, MappingSet.build({"Items to count": "Item"}))
        assert out.columns == registry.get("count_items").outputs

    def test_float_parameter_with_integral_value(self, registry):
        t = table([("Item", "Text")], [("a",), ("b",)])
        out = execute_method(registry, "count_n_most_occurring_items", t,
                             MappingSet.build({"Items to count": "Item"}), {"N": 1.0})
        assert len(out.rows) == 1
