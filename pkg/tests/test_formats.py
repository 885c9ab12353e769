"""Text formats: edge lists, bipartite lists, spectrum CSV, JSON records."""

from __future__ import annotations

import random

import pytest

from omitlab.core import Hypergraph
from omitlab.errors import ParseError
from omitlab.field import build_polynomial_graph
from omitlab.formats import (
    bipartite_to_string,
    edge_list_to_string,
    parse_bipartite,
    parse_edge_list,
    read_json,
    spectrum_to_csv,
    write_json,
)

from conftest import random_uniform


class TestEdgeListRoundTrip:
    def test_simple(self):
        H = Hypergraph(5, [[0, 1, 2], [2, 3, 4]])
        back = parse_edge_list(edge_list_to_string(H))
        assert back.n == H.n and back.edges == H.edges

    def test_random_instances(self):
        rng = random.Random(1)
        for _ in range(20):
            H = random_uniform(10, 3, 12, rng)
            back = parse_edge_list(edge_list_to_string(H))
            assert back.edges == H.edges

    def test_empty_hypergraph(self):
        H = Hypergraph(4, [])
        back = parse_edge_list(edge_list_to_string(H))
        assert back.n == 4 and back.num_edges == 0

    def test_comments_ignored(self):
        text = "# a comment\n3 1\n# another\n0 1 2\n"
        H = parse_edge_list(text)
        assert H.edges == ((0, 1, 2),)

    def test_writer_is_sorted(self):
        H = Hypergraph(4, [[3, 2, 1], [1, 0, 2]])
        lines = edge_list_to_string(H).splitlines()
        assert lines[1:] == ["0 1 2", "1 2 3"]


class TestEdgeListErrors:
    def test_bad_token_carries_line(self):
        with pytest.raises(ParseError) as err:
            parse_edge_list("3 1\n0 x 2\n")
        assert err.value.line == 2
        assert "line 2" in str(err.value)

    def test_missing_header(self):
        with pytest.raises(ParseError):
            parse_edge_list("")

    def test_header_arity(self):
        with pytest.raises(ParseError) as err:
            parse_edge_list("3 1 7\n0 1 2\n")
        assert err.value.line == 1

    def test_edge_count_mismatch(self):
        with pytest.raises(ParseError):
            parse_edge_list("3 2\n0 1 2\n")

    def test_vertex_out_of_range_located(self):
        with pytest.raises(ParseError) as err:
            parse_edge_list("3 2\n0 1 2\n0 1 9\n")
        assert err.value.line == 3


class TestBipartiteRoundTrip:
    def test_polynomial_graph(self):
        G = build_polynomial_graph(3, 2)
        back = parse_bipartite(bipartite_to_string(G))
        assert back.m == G.m and back.n_right == G.n_right
        assert back.adjacency == G.adjacency

    def test_isolated_left_vertex(self):
        text = "BIPARTITE 2 3 1\n0 2\n"
        G = parse_bipartite(text)
        assert G.adjacency == ((2,), ())

    def test_bad_neighbor_line(self):
        with pytest.raises(ParseError) as err:
            parse_bipartite("BIPARTITE 1 2 1\n0 oops\n")
        assert err.value.line == 2

    def test_pair_out_of_range(self):
        with pytest.raises(ParseError) as err:
            parse_bipartite("BIPARTITE 1 2 1\n0 5\n")
        assert err.value.line == 2


class TestSpectrumCsv:
    def test_groups_multiplicities(self):
        csv = spectrum_to_csv([3.0, 1.7320508, 1.7320508, 0.0, -3.0])
        rows = csv.strip().splitlines()
        assert rows[0] == "eigenvalue,multiplicity"
        parsed = [r.split(",") for r in rows[1:]]
        assert [int(m) for _, m in parsed] == [1, 2, 1, 1]

    def test_near_values_cluster(self):
        csv = spectrum_to_csv([1.0, 1.0 + 1e-9, 1.0 - 1e-9])
        rows = csv.strip().splitlines()
        assert len(rows) == 2 and rows[1].endswith(",3")

    def test_order_descending(self):
        csv = spectrum_to_csv([-1.0, 2.0, 0.5])
        values = [float(r.split(",")[0]) for r in csv.strip().splitlines()[1:]]
        assert values == sorted(values, reverse=True)


class TestJson:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "obj.json"
        write_json({"a": 1, "b": [1, 2]}, path)
        assert read_json(path) == {"a": 1, "b": [1, 2]}

    def test_tuples_become_lists(self, tmp_path):
        path = tmp_path / "t.json"
        write_json({"t": (1, 2)}, path)
        assert read_json(path) == {"t": [1, 2]}

    def test_malformed_carries_line(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{\n  "a": ]\n}\n')
        with pytest.raises(ParseError) as err:
            read_json(path)
        assert err.value.line == 2
