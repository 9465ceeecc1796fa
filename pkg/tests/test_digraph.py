import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linkage_lab.digraph import (
    Digraph,
    Label,
    concat_walks,
    digraph_dumps,
    digraph_from_json,
    digraph_loads,
    digraph_to_json,
    export_dot,
    gen_acyclic_grid,
    gen_acyclic_wall,
    gen_transitive_tournament,
    is_path,
    is_walk,
    split_labels,
    split_vertex,
)
from linkage_lab.errors import (
    CyclicDigraphError,
    DuplicateLabelError,
    LoopArcError,
    MalformedDocumentError,
    MissingBridgeArcError,
    UnknownVertexError,
)


def plain(*ix):
    return Label("plain", tuple(ix))


def chain_digraph(n):
    vs = [plain(i) for i in range(1, n + 1)]
    return Digraph(vs, zip(vs, vs[1:])), vs


class TestLabel:
    def test_text_round_trip(self):
        for lab in (
            Label("p", (1, 2, 0), "r"),
            Label("a", (1, 1, 2, 2)),
            Label("src", (2, 1), "c"),
            Label("split-in", (5,)),
            Label("plain"),
        ):
            assert Label.parse(str(lab)) == lab

    def test_json_round_trip(self):
        lab = Label("q", (1, 2, 3), "c")
        assert Label.from_json(lab.to_json()) == lab

    def test_rejects_bad_side_and_role(self):
        with pytest.raises(ValueError):
            Label("p", (), "x")
        with pytest.raises(ValueError):
            Label("P", ())

    def test_ordering_is_total_and_numeric(self):
        assert Label("p", (2,)) < Label("p", (10,))
        assert Label("a", ()) < Label("b", ())


class TestDigraph:
    def test_rejects_loops(self):
        with pytest.raises(LoopArcError):
            Digraph([plain(1)], [(plain(1), plain(1))])

    def test_rejects_undeclared_endpoints(self):
        with pytest.raises(UnknownVertexError):
            Digraph([plain(1)], [(plain(1), plain(2))])

    def test_rejects_duplicate_labels(self):
        with pytest.raises(DuplicateLabelError):
            Digraph([plain(1), plain(1)], [])

    def test_adjacency_is_sorted_both_ways(self):
        g = Digraph(
            [plain(1), plain(2), plain(3)],
            [(plain(1), plain(3)), (plain(1), plain(2)), (plain(2), plain(3))],
        )
        assert g.out_neighbors(plain(1)) == (plain(2), plain(3))
        assert g.in_neighbors(plain(3)) == (plain(1), plain(2))
        assert g.sources() == (plain(1),)
        assert g.sinks() == (plain(3),)

    def test_induced_subgraph(self):
        g, vs = chain_digraph(4)
        sub = g.induced(vs[:2])
        assert sub.arcs == ((vs[0], vs[1]),)


class TestTopologicalOrder:
    def test_single_arc(self):
        g, vs = chain_digraph(2)
        assert g.topological_order() == (vs[0], vs[1])

    def test_tt4_has_unique_order(self):
        g = gen_transitive_tournament(4)
        assert g.topological_order() == tuple(plain(i) for i in range(1, 5))

    def test_two_cycle_witness(self):
        u, v = plain(1), plain(2)
        g = Digraph([u, v], [(u, v), (v, u)])
        with pytest.raises(CyclicDigraphError) as err:
            g.topological_order()
        assert err.value.cycle == (u, v, u)
        assert not g.is_dag()


class TestWalks:
    def test_concat_shared_endpoint(self):
        g, vs = chain_digraph(3)
        assert concat_walks(g, (vs[0], vs[1]), (vs[1], vs[2])) == (vs[0], vs[1], vs[2])

    def test_concat_empty_identity(self):
        g, vs = chain_digraph(2)
        assert concat_walks(g, (), (vs[0], vs[1])) == (vs[0], vs[1])
        assert concat_walks(g, (vs[0], vs[1]), ()) == (vs[0], vs[1])
        assert concat_walks(g, (), ()) == ()

    def test_concat_bridging_arc(self):
        g, vs = chain_digraph(4)
        assert concat_walks(g, (vs[0], vs[1]), (vs[2], vs[3])) == tuple(vs)

    def test_concat_missing_bridge(self):
        g, vs = chain_digraph(4)
        with pytest.raises(MissingBridgeArcError):
            concat_walks(g, (vs[1], vs[2]), (vs[0],))

    def test_walk_and_path_predicates(self):
        g, vs = chain_digraph(3)
        assert is_walk(g, tuple(vs))
        assert is_path(g, tuple(vs))
        assert not is_walk(g, (vs[2], vs[0]))


class TestSplit:
    def test_isolated_vertex(self):
        v = plain(7)
        g = split_vertex(Digraph([v], []), v)
        v_in, v_out = split_labels(v)
        assert set(g.vertices) == {v_in, v_out}
        assert g.arcs == ((v_in, v_out),)

    def test_path_through_vertex(self):
        g, (u, v, w) = chain_digraph(3)
        v_in, v_out = split_labels(v)
        h = split_vertex(g, v)
        assert is_path(h, (u, v_in, v_out, w))
        assert len(h.arcs) == 3

    def test_degree_two_two(self):
        v = plain(0)
        ins = [plain(1), plain(2)]
        outs = [plain(3), plain(4)]
        g = Digraph([v] + ins + outs, [(x, v) for x in ins] + [(v, y) for y in outs])
        h = split_vertex(g, v)
        v_in, v_out = split_labels(v)
        assert h.in_degree(v_in) == 2 and h.out_degree(v_in) == 1
        assert h.in_degree(v_out) == 1 and h.out_degree(v_out) == 2

    def test_unknown_vertex(self):
        g, _ = chain_digraph(2)
        with pytest.raises(UnknownVertexError):
            split_vertex(g, plain(99))


class TestGenerators:
    def test_tournament_arc_counts(self):
        assert len(gen_transitive_tournament(1).arcs) == 0
        assert len(gen_transitive_tournament(3).arcs) == 3
        assert len(gen_transitive_tournament(9).arcs) == 36

    def test_grid_counts(self):
        g11 = gen_acyclic_grid(1, 1)
        assert len(g11.vertices) == 1 and len(g11.arcs) == 0
        g34 = gen_acyclic_grid(3, 4)
        assert len(g34.vertices) == 12 and len(g34.arcs) == 17
        g55 = gen_acyclic_grid(5, 5)
        assert len(g55.vertices) == 25 and len(g55.arcs) == 40

    def test_grid_count_formula_exhaustive(self):
        for p in range(1, 9):
            for q in range(1, 9):
                g = gen_acyclic_grid(p, q)
                assert len(g.vertices) == p * q
                assert len(g.arcs) == p * (q - 1) + q * (p - 1)
                assert g.is_dag()

    def test_wall_counts(self):
        wall34 = gen_acyclic_wall(3, 4)
        assert len(wall34.graph.vertices) == 14
        assert len(wall34.split_pairs) == 2
        wall22 = gen_acyclic_wall(2, 2)
        assert len(wall22.split_pairs) == 0
        assert len(wall22.graph.vertices) == 4
        wall77 = gen_acyclic_wall(7, 7)
        assert len(wall77.graph.vertices) == 74

    def test_wall_split_count_formula_exhaustive(self):
        for p in range(1, 9):
            for q in range(1, 9):
                wall = gen_acyclic_wall(p, q)
                expected_splits = max(0, p - 2) * max(0, q - 2)
                assert len(wall.split_pairs) == expected_splits
                assert len(wall.graph.vertices) == p * q + expected_splits
                assert wall.graph.is_dag()

    def test_wall_total_degree_at_most_three(self):
        for p in range(2, 7):
            for q in range(2, 7):
                g = gen_acyclic_wall(p, q).graph
                assert all(g.in_degree(v) + g.out_degree(v) <= 3 for v in g.vertices)

    def test_tournament_is_dag(self):
        for k in range(1, 10):
            assert gen_transitive_tournament(k).is_dag()


def _random_digraphs():
    """Small random digraphs (possibly cyclic) as a hypothesis strategy."""

    @st.composite
    def build(draw):
        n = draw(st.integers(min_value=1, max_value=7))
        vs = [plain(i) for i in range(1, n + 1)]
        arcs = []
        for i in range(n):
            for j in range(n):
                if i != j and draw(st.booleans()):
                    arcs.append((vs[i], vs[j]))
        return Digraph(vs, arcs)

    return build()


def _random_dags():
    @st.composite
    def build(draw):
        n = draw(st.integers(min_value=1, max_value=7))
        vs = [plain(i) for i in range(1, n + 1)]
        arcs = []
        for i in range(n):
            for j in range(i + 1, n):
                if draw(st.booleans()):
                    arcs.append((vs[i], vs[j]))
        return Digraph(vs, arcs)

    return build()


class TestSerialization:
    def test_empty_digraph_exact_text(self):
        assert digraph_dumps(Digraph([], [])) == '{"vertices":[],"arcs":[]}'
        assert digraph_loads('{"vertices":[],"arcs":[]}') == Digraph([], [])

    def test_tt3_round_trip(self):
        g = gen_transitive_tournament(3)
        assert digraph_loads(digraph_dumps(g)) == g

    def test_gadget_digraph_round_trip(self):
        wall = gen_acyclic_wall(4, 4).graph
        assert digraph_from_json(digraph_to_json(wall)) == wall

    @settings(max_examples=60, deadline=None)
    @given(_random_digraphs())
    def test_round_trip_property(self, g):
        assert digraph_loads(digraph_dumps(g)) == g

    def test_malformed_document(self):
        with pytest.raises(MalformedDocumentError):
            digraph_loads("{}")
        with pytest.raises(MalformedDocumentError):
            digraph_loads('{"vertices":[],"arcs":[["x!","y"]]}')
        with pytest.raises(MalformedDocumentError):
            digraph_loads('{"vertices":[],"arcs":[["plain:1","plain:2"]]}')

    def test_dot_is_deterministic_and_quoted(self):
        g = gen_transitive_tournament(3)
        dot = export_dot(g)
        assert dot == export_dot(g)
        assert dot.startswith("digraph {")
        assert '"plain:1" -> "plain:2";' in dot


class TestSplitInvariants:
    @settings(max_examples=60, deadline=None)
    @given(_random_dags(), st.integers(min_value=0, max_value=6))
    def test_split_preserves_acyclicity_sources_sinks(self, g, pick):
        v = g.vertices[pick % len(g.vertices)]
        h = split_vertex(g, v)
        assert h.is_dag()
        assert len(h.sources()) == len(g.sources())
        assert len(h.sinks()) == len(g.sinks())
