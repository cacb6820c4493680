"""Plumbing graphs: model, file format, validation and blow-up calculus.

A graph file is line based::

    graph <name>
    v <id> euler=<int> [genus=<uint>]
    e <id> <id>
    cycle <name> <id>=<int> ...

``#`` starts a comment.  Edges may be repeated (multi-edges); self-loops are
rejected.  Cycles are plain ``dict[str, int]`` keyed by vertex id, missing ids
meaning coefficient zero.
"""

from __future__ import annotations

import random
import re
from collections import Counter
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

from . import linalg
from .errors import GraphSyntaxError, InvalidGraph, NotNegativeDefinite, UnknownVertex

Cycle = dict  # vertex id -> int (or Fraction for rational cycles)

_ID_RE = re.compile(r"^[A-Za-z0-9_.\-']+$")
_INT_RE = re.compile(r"^[+-]?\d+$")


@dataclass(frozen=True)
class VertexData:
    euler: int
    genus: int = 0

    def __post_init__(self):
        if self.genus < 0:
            raise InvalidGraph(f"genus must be non-negative, got {self.genus}")


@dataclass(frozen=True, eq=False)
class PlumbingGraph:
    """A connected, negative definite plumbing graph.

    ``vertices`` keeps insertion order; that order indexes the intersection
    matrix and breaks every tie in the algorithms downstream.
    """

    vertices: Mapping[str, VertexData]
    edges: tuple[tuple[str, str], ...]
    name: str | None = None
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        verts = dict(self.vertices)
        order = {v: i for i, v in enumerate(verts)}
        norm = []
        for u, w in self.edges:
            for x in (u, w):
                if x not in order:
                    raise UnknownVertex(x)
            if u == w:
                raise InvalidGraph(f"self-loop at vertex {u!r}")
            norm.append((u, w) if order[u] <= order[w] else (w, u))
        norm.sort(key=lambda e: (order[e[0]], order[e[1]]))
        object.__setattr__(self, "vertices", MappingProxyType(verts))
        object.__setattr__(self, "edges", tuple(norm))
        if self.validate:
            check_graph(self)

    # structural identity: vertex order, vertex data, edge multiset, name
    def _key(self):
        return (tuple(self.vertices.items()), self.edges, self.name)

    def __eq__(self, other):
        if not isinstance(other, PlumbingGraph):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __getstate__(self):
        return {"vertices": dict(self.vertices), "edges": self.edges, "name": self.name}

    def __setstate__(self, state):
        object.__setattr__(self, "vertices", MappingProxyType(state["vertices"]))
        object.__setattr__(self, "edges", state["edges"])
        object.__setattr__(self, "name", state["name"])
        object.__setattr__(self, "validate", False)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(self.vertices)

    @property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, v):
        return v in self.vertices

    def euler(self, v: str) -> int:
        return self.vertices[v].euler

    def genus(self, v: str) -> int:
        return self.vertices[v].genus

    def degree(self, v: str) -> int:
        return sum((a == v) + (b == v) for a, b in self.edges)

    def neighbors(self, v: str) -> list[str]:
        out = []
        for a, b in self.edges:
            if a == v:
                out.append(b)
            elif b == v:
                out.append(a)
        return out

    def edge_multiplicity(self, u: str, w: str) -> int:
        key = frozenset((u, w))
        return sum(frozenset(e) == key for e in self.edges)

    def matrix(self) -> list[list[int]]:
        """Integer intersection matrix in vertex order."""
        idx = self.index
        m = [[0] * len(idx) for _ in idx]
        for v, data in self.vertices.items():
            m[idx[v]][idx[v]] = data.euler
        for a, b in self.edges:
            m[idx[a]][idx[b]] += 1
            m[idx[b]][idx[a]] += 1
        return m

    def to_vector(self, cycle: Mapping[str, object]) -> list:
        for v in cycle:
            if v not in self.vertices:
                raise UnknownVertex(v)
        return [cycle.get(v, 0) for v in self.vertices]

    def from_vector(self, vec) -> dict:
        return dict(zip(self.vertices, vec))

    def reduced(self) -> dict[str, int]:
        """The cycle E = sum of all E_v."""
        return {v: 1 for v in self.vertices}


def connected_components(vertices: Iterable[str], edges: Iterable[tuple[str, str]]) -> list[list[str]]:
    """Components in order of first vertex; vertices keep their input order."""
    verts = list(vertices)
    adj: dict[str, set[str]] = {v: set() for v in verts}
    for a, b in edges:
        if a in adj and b in adj:
            adj[a].add(b)
            adj[b].add(a)
    seen: set[str] = set()
    comps = []
    for v in verts:
        if v in seen:
            continue
        stack, comp = [v], set()
        while stack:
            x = stack.pop()
            if x in comp:
                continue
            comp.add(x)
            stack.extend(adj[x] - comp)
        seen |= comp
        comps.append([u for u in verts if u in comp])
    return comps


def check_graph(g: PlumbingGraph) -> None:
    if not g.vertices:
        raise InvalidGraph("no vertices")
    if len(connected_components(g.vertices, g.edges)) != 1:
        raise InvalidGraph("graph is disconnected")
    check_negative_definite(g)


def check_negative_definite(g: PlumbingGraph) -> None:
    m = g.matrix()
    bad = linalg.first_nonnegative_pivot(m)
    if bad is not None:
        i, p = bad
        minor = linalg.determinant([row[: i + 1] for row in m[: i + 1]])
        raise NotNegativeDefinite(i, g.ids[i], p, minor)


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------


def _parse_kv(token: str, lineno: int, col: int) -> tuple[str, str]:
    if "=" not in token:
        raise GraphSyntaxError(f"expected key=value, got {token!r}", lineno, col)
    key, _, value = token.partition("=")
    return key, value


def _tokens(line: str) -> list[tuple[str, int]]:
    return [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]


def parse_graph(text: str) -> tuple[PlumbingGraph, dict[str, dict[str, int]]]:
    """Parse and validate a graph file; returns the graph and its named cycles."""
    name: str | None = None
    vertices: dict[str, VertexData] = {}
    edges: list[tuple[str, str, int]] = []
    cycles: dict[str, tuple[dict[str, int], int]] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = _tokens(line)
        if not toks:
            continue
        head, hcol = toks[0]
        args = toks[1:]
        if head == "graph":
            if name is not None:
                raise GraphSyntaxError("duplicate graph line", lineno, hcol)
            if len(args) != 1:
                raise GraphSyntaxError("expected: graph <name>", lineno, hcol)
            name = args[0][0]
        elif head == "v":
            if not args:
                raise GraphSyntaxError("expected: v <id> euler=<int> [genus=<uint>]", lineno, hcol)
            vid, vcol = args[0]
            if not _ID_RE.match(vid):
                raise GraphSyntaxError(f"invalid vertex id {vid!r}", lineno, vcol)
            if vid in vertices:
                raise GraphSyntaxError(f"duplicate vertex {vid!r}", lineno, vcol)
            props: dict[str, int] = {}
            for tok, col in args[1:]:
                key, value = _parse_kv(tok, lineno, col)
                if key not in ("euler", "genus"):
                    raise GraphSyntaxError(f"unknown vertex attribute {key!r}", lineno, col)
                if key in props:
                    raise GraphSyntaxError(f"repeated attribute {key!r}", lineno, col)
                if not _INT_RE.match(value):
                    raise GraphSyntaxError(f"{key} must be an integer, got {value!r}", lineno, col)
                props[key] = int(value)
                if key == "genus" and props[key] < 0:
                    raise GraphSyntaxError("genus must be non-negative", lineno, col)
            if "euler" not in props:
                raise GraphSyntaxError(f"vertex {vid!r} has no euler=", lineno, vcol)
            vertices[vid] = VertexData(props["euler"], props.get("genus", 0))
        elif head == "e":
            if len(args) != 2:
                raise GraphSyntaxError("expected: e <id> <id>", lineno, hcol)
            (u, _), (w, wcol) = args
            if u == w:
                raise GraphSyntaxError(f"self-loop at vertex {u!r}", lineno, wcol)
            edges.append((u, w, lineno))
        elif head == "cycle":
            if not args:
                raise GraphSyntaxError("expected: cycle <name> <id>=<int> ...", lineno, hcol)
            cname, ccol = args[0]
            if cname in cycles:
                raise GraphSyntaxError(f"duplicate cycle {cname!r}", lineno, ccol)
            coeffs: dict[str, int] = {}
            for tok, col in args[1:]:
                key, value = _parse_kv(tok, lineno, col)
                if not _INT_RE.match(value):
                    raise GraphSyntaxError(f"cycle coefficient must be an integer, got {value!r}", lineno, col)
                if key in coeffs:
                    raise GraphSyntaxError(f"repeated vertex {key!r} in cycle", lineno, col)
                coeffs[key] = int(value)
            cycles[cname] = (coeffs, lineno)
        else:
            raise GraphSyntaxError(f"unknown directive {head!r}", lineno, hcol)

    if not vertices:
        raise GraphSyntaxError("no vertices")
    for u, w, lineno in edges:
        for x in (u, w):
            if x not in vertices:
                raise GraphSyntaxError(f"edge names unknown vertex {x!r}", lineno)
    for cname, (coeffs, lineno) in cycles.items():
        for x in coeffs:
            if x not in vertices:
                raise GraphSyntaxError(f"cycle {cname!r} names unknown vertex {x!r}", lineno)

    g = PlumbingGraph(vertices, tuple((u, w) for u, w, _ in edges), name)
    return g, {k: dict(c) for k, (c, _) in cycles.items()}


def format_cycle_line(name: str, cycle: Mapping[str, int], order: Iterable[str]) -> str:
    parts = [f"{v}={cycle[v]}" for v in order if cycle.get(v, 0) != 0]
    return " ".join(["cycle", name, *parts])


def serialize_graph(g: PlumbingGraph, cycles: Mapping[str, Mapping[str, int]] | None = None) -> str:
    lines = []
    if g.name is not None:
        lines.append(f"graph {g.name}")
    for v, data in g.vertices.items():
        lines.append(f"v {v} euler={data.euler} genus={data.genus}")
    for a, b in g.edges:
        lines.append(f"e {a} {b}")
    for cname, c in (cycles or {}).items():
        lines.append(format_cycle_line(cname, c, g.ids))
    return "\n".join(lines) + "\n"


def to_dot(g: PlumbingGraph) -> str:
    title = g.name or "plumbing"
    lines = [f'graph "{title}" {{']
    for v, data in g.vertices.items():
        lines.append(f'  "{v}" [label="{v}\\ne={data.euler},g={data.genus}"];')
    for a, b in g.edges:
        lines.append(f'  "{a}" -- "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlowupRecord:
    """One blow-up.  ``targets`` is ``(v,)`` for a vertex, ``(u, w)`` for an edge.

    The pullback adds ``sum(l[t] for t in targets)`` copies of the new curve.
    """

    kind: str
    targets: tuple[str, ...]
    new_vertex: str

    def pullback(self, cycle: Mapping[str, object]) -> dict:
        out = dict(cycle)
        out[self.new_vertex] = sum((cycle.get(t, 0) for t in self.targets), 0)
        return out


def pullback(records: Iterable[BlowupRecord], cycle: Mapping[str, object]) -> dict:
    """Composite pullback through a sequence of blow-ups (applied in order)."""
    out = dict(cycle)
    for rec in records:
        out = rec.pullback(out)
    return out


def fresh_id(g: PlumbingGraph, prefix: str = "_b") -> str:
    k = 1
    while f"{prefix}{k}" in g.vertices:
        k += 1
    return f"{prefix}{k}"


def blow_up_vertex(g: PlumbingGraph, v: str) -> tuple[PlumbingGraph, BlowupRecord]:
    if v not in g.vertices:
        raise UnknownVertex(v)
    new = fresh_id(g)
    verts = dict(g.vertices)
    verts[v] = VertexData(verts[v].euler - 1, verts[v].genus)
    verts[new] = VertexData(-1, 0)
    h = PlumbingGraph(verts, g.edges + ((v, new),), g.name, validate=False)
    return h, BlowupRecord("vertex", (v,), new)


def blow_up_edge(g: PlumbingGraph, u: str, w: str) -> tuple[PlumbingGraph, BlowupRecord]:
    for x in (u, w):
        if x not in g.vertices:
            raise UnknownVertex(x)
    key = frozenset((u, w))
    edges = list(g.edges)
    pos = next((i for i, e in enumerate(edges) if frozenset(e) == key and u != w), None)
    if pos is None:
        raise InvalidGraph(f"no edge between {u!r} and {w!r}")
    del edges[pos]
    new = fresh_id(g)
    verts = dict(g.vertices)
    verts[u] = VertexData(verts[u].euler - 1, verts[u].genus)
    verts[w] = VertexData(verts[w].euler - 1, verts[w].genus)
    verts[new] = VertexData(-1, 0)
    edges += [(u, new), (new, w)]
    h = PlumbingGraph(verts, tuple(edges), g.name, validate=False)
    return h, BlowupRecord("edge", (u, w), new)


def blow_up_sequence_at(g: PlumbingGraph, u: str, times: int) -> tuple[PlumbingGraph, list[BlowupRecord]]:
    """Blow up ``u`` at a generic point, then each newly created curve, ``times`` times."""
    if times < 1:
        raise ValueError("times must be >= 1")
    records = []
    target = u
    for _ in range(times):
        g, rec = blow_up_vertex(g, target)
        records.append(rec)
        target = rec.new_vertex
    return g, records


@dataclass(frozen=True)
class Subconfiguration:
    """Induced subgraph of ``parent`` on ``kept``; may be disconnected or empty."""

    parent: PlumbingGraph
    kept: frozenset

    @property
    def vertices(self) -> list[str]:
        return [v for v in self.parent.ids if v in self.kept]

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        return tuple(e for e in self.parent.edges if e[0] in self.kept and e[1] in self.kept)

    def component_vertex_sets(self) -> list[list[str]]:
        return connected_components(self.vertices, self.edges)

    def components(self) -> list[PlumbingGraph]:
        out = []
        for comp in self.component_vertex_sets():
            cs = set(comp)
            out.append(
                PlumbingGraph(
                    {v: self.parent.vertices[v] for v in comp},
                    tuple(e for e in self.edges if e[0] in cs),
                    self.parent.name,
                )
            )
        return out

    def restrict(self, cycle: Mapping[str, object]) -> dict:
        return {v: c for v, c in cycle.items() if v in self.kept}


def full_subgraph(g: PlumbingGraph, kept: Iterable[str]) -> Subconfiguration:
    kept = frozenset(kept)
    for v in kept:
        if v not in g.vertices:
            raise UnknownVertex(v)
    return Subconfiguration(g, kept)


def induced_graph(g: PlumbingGraph, kept: Iterable[str]) -> PlumbingGraph:
    """The full subgraph on ``kept`` as a validated graph (must be connected)."""
    comps = full_subgraph(g, kept).components()
    if len(comps) != 1:
        raise InvalidGraph(f"kept set induces {len(comps)} components, expected 1")
    return comps[0]


def random_negdef_graph(seed: int, n_vertices: int) -> PlumbingGraph:
    """Random tree with genera in {0, 1} and ``euler <= -(degree + 1)``.

    Strict diagonal dominance of the negated matrix makes every output negative
    definite without rejection sampling.
    """
    if n_vertices < 1:
        raise ValueError("n_vertices must be >= 1")
    rng = random.Random(seed)
    ids = [f"v{i}" for i in range(n_vertices)]
    edges = [(ids[rng.randrange(i)], ids[i]) for i in range(1, n_vertices)]
    deg = Counter(x for e in edges for x in e)
    verts = {}
    for v in ids:
        base = max(deg[v], 1) + 1
        verts[v] = VertexData(-(base + rng.choice((0, 0, 1, 2))), rng.choice((0, 0, 0, 1)))
    return PlumbingGraph(verts, tuple(edges), f"random_{seed}_{n_vertices}")
