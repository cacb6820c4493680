import pytest
from hypothesis import given, settings, strategies as st

from plumb import fixtures
from plumb.errors import GraphSyntaxError, InvalidGraph, NotNegativeDefinite, UnknownVertex
from plumb.graph import (
    VertexData,
    blow_up_edge,
    blow_up_sequence_at,
    blow_up_vertex,
    full_subgraph,
    parse_graph,
    pullback,
    random_negdef_graph,
    serialize_graph,
    to_dot,
)
from plumb.lattice import chi_int, discriminant_order, pairing


def test_parse_single_vertex():
    g, cycles = parse_graph("v a euler=-2\n")
    assert g.ids == ("a",)
    assert g.vertices["a"] == VertexData(-2, 0)
    assert cycles == {}


def test_parse_dpp_text():
    text = serialize_graph(fixtures.dpp())
    g, _ = parse_graph(text)
    assert len(g) == 10 and len(g.edges) == 9
    assert [g.euler(v) for v in ("E1", "m1", "x1", "x2", "x3", "x4", "m2", "E2")] == [-2, -1, -7, -3, -3, -7, -1, -2]


def test_parse_comments_genus_multiedge_and_cycles():
    text = "# two curves\ngraph dbl\nv a euler=-3 genus=0\nv b euler=-3  # trailing\ne a b\ne a b\ncycle z a=1 b=2\n"
    g, cycles = parse_graph(text)
    assert g.name == "dbl"
    assert g.edge_multiplicity("a", "b") == 2
    assert cycles == {"z": {"a": 1, "b": 2}}


@pytest.mark.parametrize(
    "text, fragment, line",
    [
        ("v a euler=-2\nv a euler=-3\n", "duplicate", 2),
        ("v a\n", "euler", 1),
        ("v a euler=x\n", "integer", 1),
        ("w a euler=-2\n", "directive", 1),
        ("v a euler=-2\ne a a\n", "self-loop", 2),
        ("v a euler=-2\ne a b\n", "b", 2),
        ("v a euler=-2\ncycle z b=1\n", "b", 2),
        ("", "no vertices", None),
    ],
)
def test_parse_errors_carry_location(text, fragment, line):
    with pytest.raises(GraphSyntaxError) as info:
        parse_graph(text)
    assert fragment in str(info.value)
    assert info.value.line == line


@pytest.mark.parametrize("text", ["v a euler=0\n", "v a euler=1\n", "v a euler=-1\nv b euler=-1\ne a b\n"])
def test_parse_rejects_non_negative_definite(text):
    with pytest.raises(NotNegativeDefinite) as info:
        parse_graph(text)
    assert info.value.pivot >= 0


def test_parse_rejects_disconnected():
    with pytest.raises(InvalidGraph, match="connected"):
        parse_graph("v a euler=-2\nv b euler=-2\n")


def test_serialize_single_vertex():
    g, _ = parse_graph("v a euler=-2\n")
    assert serialize_graph(g) == "v a euler=-2 genus=0\n"


def test_serialize_a2_has_one_edge_line():
    lines = serialize_graph(fixtures.a_n(2)).splitlines()
    assert sum(line.startswith("e ") for line in lines) == 1


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 9))
def test_round_trip(seed, n):
    g = random_negdef_graph(seed, n)
    h, _ = parse_graph(serialize_graph(g))
    assert h == g and h.ids == g.ids


def test_round_trip_with_cycles():
    g = fixtures.dpp()
    cycles = {"z": {"E1": 3, "m1": 6}}
    h, back = parse_graph(serialize_graph(g, cycles))
    assert h == g
    assert back["z"] == {"E1": 3, "m1": 6}


def test_dot_labels():
    dot = to_dot(fixtures.elliptic())
    assert "e=-1,g=1" in dot and dot.startswith("graph")


def test_blow_up_vertex_single():
    g = fixtures.a_n(1)
    h, rec = blow_up_vertex(g, "a1")
    w = rec.new_vertex
    assert h.euler("a1") == -3 and h.euler(w) == -1 and h.genus(w) == 0
    assert h.edge_multiplicity("a1", w) == 1
    pe = rec.pullback({"a1": 1})
    assert pe == {"a1": 1, w: 1}
    assert pairing(h, pe, pe) == -2
    assert discriminant_order(g) == discriminant_order(h) == 2


def test_blow_up_edge_a2():
    g = fixtures.a_n(2)
    h, rec = blow_up_edge(g, "a1", "a2")
    n = rec.new_vertex
    assert [h.euler(v) for v in ("a1", n, "a2")] == [-3, -1, -3]
    assert h.edge_multiplicity("a1", "a2") == 0
    assert pairing(h, rec.pullback({"a1": 1}), rec.pullback({"a2": 1})) == 1
    assert discriminant_order(h) == 3


def test_blow_up_edge_multi_edge_removes_one_copy():
    g, _ = parse_graph("v a euler=-3\nv b euler=-3\ne a b\ne a b\n")
    h, _ = blow_up_edge(g, "a", "b")
    assert h.edge_multiplicity("a", "b") == 1
    assert discriminant_order(h) == discriminant_order(g) == 5


def test_blow_up_errors():
    g = fixtures.a_n(3)
    with pytest.raises(UnknownVertex):
        blow_up_vertex(g, "zz")
    with pytest.raises(InvalidGraph):
        blow_up_edge(g, "a1", "a3")


def test_blow_up_sequence():
    g = fixtures.a_n(1)
    h, recs = blow_up_sequence_at(g, "a1", 2)
    w1, w2 = (r.new_vertex for r in recs)
    assert [h.euler(v) for v in ("a1", w1, w2)] == [-3, -2, -1]
    assert h.edge_multiplicity("a1", w1) == 1 and h.edge_multiplicity(w1, w2) == 1
    assert pullback(recs, {"a1": 1}) == {"a1": 1, w1: 1, w2: 1}
    one, rec = blow_up_vertex(g, "a1")
    assert blow_up_sequence_at(g, "a1", 1)[0] == one


def test_blow_up_preserves_connectivity_and_count():
    g = fixtures.dpp()
    for v in g.ids:
        h, _ = blow_up_vertex(g, v)
        assert len(h) == len(g) + 1
        assert len(full_subgraph(h, h.ids).components()) == 1


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 6), data=st.data())
def test_blow_up_invariance(seed, n, data):
    g = random_negdef_graph(seed, n)
    if g.edges and data.draw(st.booleans()):
        u, w = data.draw(st.sampled_from(g.edges))
        h, rec = blow_up_edge(g, u, w)
    else:
        h, rec = blow_up_vertex(g, data.draw(st.sampled_from(g.ids)))
    coef = st.integers(-4, 6)
    x = {v: data.draw(coef) for v in g.ids}
    y = {v: data.draw(coef) for v in g.ids}
    px, py = rec.pullback(x), rec.pullback(y)
    assert pairing(h, px, py) == pairing(g, x, y)
    assert chi_int(h, px) == chi_int(g, x)
    assert discriminant_order(h) == discriminant_order(g)


def test_full_subgraph_cases():
    g = fixtures.dpp()
    assert full_subgraph(g, g.ids).components() == [g]
    assert full_subgraph(g, []).components() == []
    sub = full_subgraph(g, [v for v in g.ids if g.euler(v) != -1])
    sets = sub.component_vertex_sets()
    assert sorted(map(len, sets)) == [1, 1, 1, 1, 4]
    with pytest.raises(UnknownVertex):
        full_subgraph(g, ["nope"])


def test_full_subgraph_components_are_negative_definite(random_corpus):
    for g in random_corpus[:60]:
        for comp in full_subgraph(g, g.ids[::2]).components():
            assert comp.matrix()  # construction validates


def test_random_generator():
    assert random_negdef_graph(7, 5) == random_negdef_graph(7, 5)
    g = random_negdef_graph(3, 1)
    assert len(g) == 1 and g.euler(g.ids[0]) <= -2
    for seed in range(30):
        g = random_negdef_graph(seed, 6)
        assert len(g.edges) == 5
        for v in g.ids:
            assert g.euler(v) <= -(g.degree(v) + 1)


def test_graph_is_immutable_and_hashable():
    g = fixtures.a_n(2)
    with pytest.raises(TypeError):
        g.vertices["a1"] = VertexData(-5)
    assert {g: 1}[fixtures.a_n(2)] == 1
    assert isinstance(hash(g), int)


def test_matrix_entries():
    g, _ = parse_graph("v a euler=-3\nv b euler=-4\ne a b\ne a b\n")
    assert g.matrix() == [[-3, 2], [2, -4]]
