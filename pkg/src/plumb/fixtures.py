"""Built-in example graphs: ADE families, an elliptic vertex, the star family
with (-1)-vertices, and the ten-vertex Gorenstein graph ``dpp``."""

from __future__ import annotations

from .graph import PlumbingGraph, VertexData


def _chain(ids, weights):
    return {v: VertexData(e) for v, e in zip(ids, weights)}, tuple(zip(ids, ids[1:]))


def a_n(n: int) -> PlumbingGraph:
    if n < 1:
        raise ValueError("A_n needs n >= 1")
    ids = [f"a{i}" for i in range(1, n + 1)]
    verts, edges = _chain(ids, [-2] * n)
    return PlumbingGraph(verts, edges, f"A{n}")


def d_n(n: int) -> PlumbingGraph:
    if n < 4:
        raise ValueError("D_n needs n >= 4")
    ids = [f"d{i}" for i in range(1, n + 1)]
    verts, edges = _chain(ids[: n - 1], [-2] * (n - 1))
    verts[ids[-1]] = VertexData(-2)
    edges = edges + ((ids[n - 3], ids[-1]),)
    return PlumbingGraph(verts, edges, f"D{n}")


def e_n(n: int) -> PlumbingGraph:
    if n not in (6, 7, 8):
        raise ValueError("E_n needs n in {6, 7, 8}")
    ids = [f"e{i}" for i in range(1, n + 1)]
    verts, edges = _chain(ids[: n - 1], [-2] * (n - 1))
    verts[ids[-1]] = VertexData(-2)
    edges = edges + ((ids[2], ids[-1]),)
    return PlumbingGraph(verts, edges, f"E{n}")


def elliptic() -> PlumbingGraph:
    """One genus-1 curve with self-intersection -1."""
    return PlumbingGraph({"a": VertexData(-1, 1)}, (), "elliptic")


def star(n: int, big: int) -> PlumbingGraph:
    """Central -N vertex ``e0`` with ``n`` arms ``e0 - a_i - v_i < b_i, c_i``.

    ``v_i`` are the (-1)-vertices; every other vertex, ``e0`` included, has
    weight ``-big``.
    """
    if n < 1:
        raise ValueError("star needs n >= 1")
    verts = {"e0": VertexData(-big)}
    edges = []
    for i in range(1, n + 1):
        a, v, b, c = f"a{i}", f"v{i}", f"b{i}", f"c{i}"
        verts[a] = VertexData(-big)
        verts[v] = VertexData(-1)
        verts[b] = VertexData(-big)
        verts[c] = VertexData(-big)
        edges += [("e0", a), (a, v), (v, b), (v, c)]
    return PlumbingGraph(verts, tuple(edges), f"star_n{n}_N{big}")


def dpp() -> PlumbingGraph:
    """Chain -2,-1,-7,-3,-3,-7,-1,-2 with a -3 leaf on each (-1)-vertex.

    ``E1`` and ``E2`` are the two -2 ends.
    """
    verts = {
        "E1": VertexData(-2),
        "m1": VertexData(-1),
        "s1": VertexData(-3),
        "x1": VertexData(-7),
        "x2": VertexData(-3),
        "x3": VertexData(-3),
        "x4": VertexData(-7),
        "m2": VertexData(-1),
        "s2": VertexData(-3),
        "E2": VertexData(-2),
    }
    edges = (
        ("E1", "m1"),
        ("m1", "s1"),
        ("m1", "x1"),
        ("x1", "x2"),
        ("x2", "x3"),
        ("x3", "x4"),
        ("x4", "m2"),
        ("m2", "s2"),
        ("m2", "E2"),
    )
    return PlumbingGraph(verts, edges, "dpp")


def ade(kind: str, n: int) -> PlumbingGraph:
    return {"A": a_n, "D": d_n, "E": e_n}[kind.upper()](n)


def by_name(name: str, **params) -> PlumbingGraph:
    """Look up a fixture by CLI name: dpp, star, elliptic, A<n>, D<n>, E<n>."""
    key = name.lower()
    if key == "dpp":
        return dpp()
    if key == "elliptic":
        return elliptic()
    if key == "star":
        return star(params.get("n", 2), params.get("big", 20))
    if key[:1] in ("a", "d", "e") and key[1:].isdigit():
        return ade(key[0], int(key[1:]))
    raise KeyError(f"unknown example {name!r}")
