"""instance-io: triplet parsing, writing, and the shipped catalog."""

import pytest

from qready import (
    CatalogError,
    ParseError,
    QuboInstance,
    catalog_lookup,
    density,
    from_maxcut,
    load_catalog,
    parse_instance,
    write_instance,
)
from qready.model import MaxCutGraph

from .oracles import random_entries


class TestParse:
    def test_single_entry(self):
        q = parse_instance("2 1\n1 2 -2.0", "qubo")
        assert q.num_variables == 2
        assert q.entries == {(0, 1): -2.0}

    def test_maxcut_triangle_matches_conversion(self):
        parsed = parse_instance("3 3\n1 2 1\n1 3 1\n2 3 1", "maxcut")
        direct = from_maxcut(MaxCutGraph(3, ((0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0))))
        assert parsed == direct

    def test_count_mismatch(self):
        with pytest.raises(ParseError, match="declared 2 entries, found 1"):
            parse_instance("2 2\n1 2 1", "qubo")

    def test_too_many_entries(self):
        with pytest.raises(ParseError, match="found more"):
            parse_instance("2 1\n1 2 1\n1 1 1", "qubo")

    def test_comments_and_blanks_skipped(self):
        text = "# generated\n\n2 1\n\n# entry\n1 2 3.5\n"
        q = parse_instance(text, "qubo")
        assert q.entries == {(0, 1): 3.5}

    def test_malformed_header(self):
        with pytest.raises(ParseError, match="header"):
            parse_instance("not a header\n", "qubo")

    def test_index_out_of_range_reports_line(self):
        with pytest.raises(ParseError, match="line 3"):
            parse_instance("# c\n2 1\n1 3 1.0", "qubo")

    def test_duplicate_pair(self):
        with pytest.raises(ParseError, match="duplicate"):
            parse_instance("2 2\n1 2 1\n1 2 2", "qubo")
        # (i, j) and (j, i) in a maxcut file name the same edge
        with pytest.raises(ParseError, match="duplicate"):
            parse_instance("2 2\n1 2 1\n2 1 2", "maxcut")

    def test_non_finite_weight(self):
        with pytest.raises(ParseError, match="non-finite"):
            parse_instance("2 1\n1 2 inf", "qubo")

    def test_qubo_requires_upper_triangle(self):
        with pytest.raises(ParseError, match="i <= j"):
            parse_instance("2 1\n2 1 1.0", "qubo")

    def test_maxcut_rejects_self_loop(self):
        with pytest.raises(ParseError, match="i != j"):
            parse_instance("2 1\n1 1 1.0", "maxcut")

    def test_unknown_format(self):
        with pytest.raises(ParseError, match="unknown instance format"):
            parse_instance("1 0\n", "ising")

    def test_file_object_source(self, tmp_path):
        path = tmp_path / "inst.txt"
        path.write_text("2 1\n1 2 -2.0\n")
        with open(path) as fh:
            q = parse_instance(fh, "qubo")
        assert q.entries == {(0, 1): -2.0}


class TestWrite:
    def test_empty(self):
        assert write_instance(QuboInstance(3)) == "3 0\n"

    def test_single_diagonal(self):
        assert write_instance(QuboInstance(1, {(0, 0): 1.5})) == "1 1\n1 1 1.5\n"

    def test_round_trip_random(self, rng):
        for _ in range(25):
            n = int(rng.integers(1, 30))
            entries = random_entries(rng, n, int(rng.integers(0, n + 1)))
            q = QuboInstance(n, entries)
            again = parse_instance(write_instance(q), "qubo")
            assert again.num_variables == q.num_variables
            assert again.entries == q.entries


class TestCatalog:
    def test_has_45_rows(self):
        assert len(load_catalog()) == 45

    def test_known_rows(self):
        catalog = load_catalog()
        g644 = catalog_lookup(catalog, "g000644")
        assert g644.num_variables == 10000
        assert g644.num_nonzeros == 79778
        p7000 = catalog_lookup(catalog, "p7000_2")
        assert p7000.num_variables == 7001
        assert p7000.num_nonzeros == 19505601
        assert p7000.density == pytest.approx(0.7960, abs=1e-6)

    def test_unknown_name_absent(self):
        assert catalog_lookup(load_catalog(), "nonexistent") is None

    def test_density_cross_check_all_rows(self):
        for entry in load_catalog():
            computed = density(entry.num_variables, entry.num_nonzeros)
            assert computed == pytest.approx(entry.density, abs=0.00005), entry.name

    def test_selection_criteria_flags(self):
        catalog = load_catalog()
        flagged = {e.name for e in catalog if not e.meets_selection_criteria}
        assert flagged == {
            "g000432", "g000524", "g001269", "g001883", "g002204",
            "g002440", "g002586", "g002898", "g003215",
        }

    def test_schema_mismatch(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("name,num_variables\nx,3\n")
        with pytest.raises(CatalogError, match="missing columns"):
            load_catalog(bad)

    def test_duplicate_name_rejected(self, tmp_path):
        bad = tmp_path / "dup.csv"
        bad.write_text(
            "name,num_variables,num_nonzeros,density,best_known_energy,sense\n"
            "a,2,1,1.0,,minimize\na,2,1,1.0,,minimize\n"
        )
        with pytest.raises(CatalogError, match="duplicate"):
            load_catalog(bad)

    def test_best_known_sense_conversion(self, tmp_path):
        path = tmp_path / "cat.csv"
        path.write_text(
            "name,num_variables,num_nonzeros,density,best_known_energy,sense\n"
            "mx,2,1,1.0,100.0,maximize\nmn,2,1,1.0,-7.5,minimize\n"
        )
        catalog = load_catalog(path)
        assert catalog_lookup(catalog, "mx").best_known_min_energy() == -100.0
        assert catalog_lookup(catalog, "mn").best_known_min_energy() == -7.5
