"""Topological invariants and bounds built on the min-χ engine.

``p_a = 1 - min_{l>0} χ(l)`` is the arithmetic genus; it bounds the normal
reduction number by ``p_a + 1`` and, restricted to a box ``0 < l <= Z``, gives
the stability index bound ``1 - min_{Z>=l>0} χ(l)`` for both ``h^1(Z, L^n)`` and
the Abel-map image dimensions.  ``generic_h1`` and ``generic_e_Z`` return the
values realized by the generic analytic structure, not those of an arbitrary
analytic type.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .cycles import laufer_minimal_cycle, min_chi
from .errors import BudgetExhausted, NotQhsLink, QOutOfRange, UnknownVertex
from .graph import (
    BlowupRecord,
    PlumbingGraph,
    blow_up_edge,
    blow_up_sequence_at,
    blow_up_vertex,
    full_subgraph,
    induced_graph,
)
from .lattice import chi_int, discriminant_order

SUBSET_CAP = 2**15


@dataclass(frozen=True)
class ClassificationReport:
    min_chi_unbounded: int
    p_a: int
    verdict: str
    reduction_bound: int
    qhs_link: bool
    discriminant_order: int
    z_min: dict[str, int]
    chi_z_min: int


def arithmetic_genus(g: PlumbingGraph) -> int:
    return 1 - min_chi(g).minimum


def verdict_for(min_value: int) -> str:
    if min_value == 1:
        return "rational"
    if min_value == 0:
        return "elliptic"
    return "general"


def classify(g: PlumbingGraph) -> ClassificationReport:
    """Rational / elliptic / general, with both rationality certificates checked."""
    res = min_chi(g)
    zmin = laufer_minimal_cycle(g).result
    chi_z = chi_int(g, zmin)
    if (res.minimum == 1) != (chi_z == 1):
        raise AssertionError(f"rationality certificates disagree: min χ = {res.minimum}, χ(Z_min) = {chi_z}")
    return ClassificationReport(
        min_chi_unbounded=res.minimum,
        p_a=1 - res.minimum,
        verdict=verdict_for(res.minimum),
        reduction_bound=2 - res.minimum,
        qhs_link=qhs_link(g),
        discriminant_order=discriminant_order(g),
        z_min=zmin,
        chi_z_min=chi_z,
    )


def reduction_number_bound(g: PlumbingGraph) -> int:
    """Topological upper bound ``2 - min_{l>0} χ(l)`` for the normal reduction number."""
    return 2 - min_chi(g).minimum


def qhs_link(g: PlumbingGraph) -> bool:
    """Tree with all genera zero, i.e. the link is a rational homology sphere."""
    if any(d.genus for d in g.vertices.values()):
        return False
    if len(g.edges) != len(g) - 1:
        return False
    return len(set(map(frozenset, g.edges))) == len(g.edges)


# ---------------------------------------------------------------------------
# bounds over a box 0 < l <= Z
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StabilityBound:
    Z: dict[str, int]
    bound: int


def stability_bound(g: PlumbingGraph, Z: Mapping[str, int]) -> StabilityBound:
    """``1 - min_{Z>=l>0} χ(l)``; bounds both stability indices n_0(Z, L) and n_0'(Z, l')."""
    res = min_chi(g, Z)
    return StabilityBound(dict(res.box), 1 - res.minimum)


@dataclass(frozen=True)
class GenericH1:
    Z: dict[str, int]
    value: int
    per_component: dict[tuple[str, ...], int]


def generic_h1(g: PlumbingGraph, Z: Mapping[str, int]) -> GenericH1:
    """Smallest possible ``h^1(O_Z)`` over analytic structures on ``g``.

    Each connected component C of the support contributes
    ``1 - min_{Z|_C >= l > 0} χ(l)``, computed on C's own lattice.
    """
    for v in Z:
        if v not in g.vertices:
            raise UnknownVertex(v)
    if any(c < 0 for c in Z.values()):
        raise ValueError("Z must be effective")
    support = [v for v in g.ids if Z.get(v, 0) > 0]
    per = {}
    for comp in full_subgraph(g, support).components():
        res = min_chi(comp, {v: Z[v] for v in comp.ids})
        per[comp.ids] = 1 - res.minimum
    return GenericH1({v: Z.get(v, 0) for v in g.ids}, sum(per.values()), per)


def restrict_away(Z: Mapping[str, int], removed: Iterable[str]) -> dict[str, int]:
    """``Z|_{V \\ I}``: zero the coefficients on ``removed``."""
    removed = set(removed)
    return {v: (0 if v in removed else c) for v, c in Z.items()}


def generic_e_Z(g: PlumbingGraph, Z: Mapping[str, int], I: Iterable[str]) -> int:
    """Generic-structure value of ``e_Z(I) = h^1(O_Z) - h^1(O_{Z|V\\I})``."""
    I = set(I)
    if not I:
        raise ValueError("I must be non-empty")
    for v in I:
        if v not in g.vertices:
            raise UnknownVertex(v)
    return generic_h1(g, Z).value - generic_h1(g, restrict_away(Z, I)).value


def scale(Z: Mapping[str, int], k: int) -> dict[str, int]:
    return {v: k * c for v, c in Z.items()}


@dataclass(frozen=True)
class StabilizedValue:
    k: int
    value: int
    history: tuple[tuple[int, int], ...]  # (k, value) for k = 1, 2, 4, ...


def stabilized(g: PlumbingGraph, fn, base: Mapping[str, int] | None = None, max_doublings: int = 12) -> StabilizedValue:
    """Evaluate ``fn(g, k * base)`` for k = 1, 2, 4, ... until four consecutive values agree.

    ``base`` defaults to Artin's minimal cycle.  This is the ``Z >> 0`` proxy:
    χ-minimizers are bounded, so box minima become constant for large k.
    """
    base = laufer_minimal_cycle(g).result if base is None else dict(base)
    history = []
    k = 1
    for _ in range(max_doublings + 1):
        history.append((k, fn(g, scale(base, k))))
        vals = {v for _, v in history[-4:]}
        if len(history) >= 4 and len(vals) == 1:
            return StabilizedValue(history[-4][0], history[-1][1], tuple(history))
        k *= 2
    raise RuntimeError(f"no stabilization after {max_doublings} doublings: {history}")


# ---------------------------------------------------------------------------
# subgraph spectrum and the realization procedure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Stage:
    graph: PlumbingGraph
    kept: tuple[str, ...]
    p_a: int
    note: str = ""


@dataclass(frozen=True)
class SpectrumWitness:
    target_q: int
    moves: tuple[BlowupRecord, ...]
    kept: tuple[str, ...]
    stages: tuple[Stage, ...] = ()

    def replay(self, g: PlumbingGraph) -> PlumbingGraph:
        """Re-apply the recorded blow-ups to ``g``."""
        for rec in self.moves:
            if rec.kind == "vertex":
                g, _ = blow_up_vertex(g, rec.targets[0])
            else:
                g, _ = blow_up_edge(g, *rec.targets)
        return g


@dataclass(frozen=True)
class Spectrum:
    values: dict[int, SpectrumWitness]
    partial: bool = False
    subsets_checked: int = 0
    graphs_checked: int = 0


def connected_subsets(g: PlumbingGraph, limit: int | None = None):
    """Yield every vertex set inducing a connected subgraph, smallest first.

    Stops after ``limit`` sets.  Order: size, then position in vertex order.
    """
    ids = g.ids
    idx = g.index
    adj = {v: set() for v in ids}
    for a, b in g.edges:
        adj[a].add(b)
        adj[b].add(a)
    found: set[frozenset] = set()
    layer = [frozenset([v]) for v in ids]
    count = 0
    while layer:
        for s in sorted(layer, key=lambda s: sorted(idx[v] for v in s)):
            if limit is not None and count >= limit:
                return
            count += 1
            yield tuple(v for v in ids if v in s)
        found.update(layer)
        nxt = set()
        for s in layer:
            for v in s:
                for w in adj[v] - s:
                    t = s | {w}
                    if t not in found:
                        nxt.add(t)
        layer = list(nxt)


def subgraph_genus_spectrum(g: PlumbingGraph, max_blowups: int = 0, cap: int = SUBSET_CAP) -> Spectrum:
    """Arithmetic genera of connected full subgraphs, after at most ``max_blowups``
    generic vertex blow-ups, with one witness per value.

    ``cap`` bounds the total number of subsets examined; hitting it marks the
    result ``partial``.
    """
    values: dict[int, SpectrumWitness] = {}
    checked = 0
    graphs = 0
    partial = False
    # blow-up sequences with non-decreasing target positions (vertex blow-ups at
    # distinct generic points commute)
    frontier: list[tuple[PlumbingGraph, tuple[BlowupRecord, ...], int]] = [(g, (), 0)]
    for depth in range(max_blowups + 1):
        nxt = []
        for h, moves, start in frontier:
            graphs += 1
            for kept in connected_subsets(h, limit=cap - checked + 1):
                if checked >= cap:
                    partial = True
                    break
                checked += 1
                pa = arithmetic_genus(induced_graph(h, kept))
                if pa not in values:
                    values[pa] = SpectrumWitness(pa, moves, kept)
            if partial:
                break
            if depth < max_blowups:
                for pos in range(start, len(h)):
                    h2, rec = blow_up_vertex(h, h.ids[pos])
                    nxt.append((h2, moves + (rec,), pos))
        if partial:
            break
        frontier = nxt
    return Spectrum(dict(sorted(values.items())), partial, checked, graphs)


def realize_q(g: PlumbingGraph, q: int, budget: int = 10, cap: int = SUBSET_CAP) -> SpectrumWitness:
    """Search for a connected full subgraph (after blow-ups) with ``p_a = q``.

    Greedy descent: the lattice-minimal χ-minimizer of the current subgraph
    stands in for the cohomological cycle; at a vertex ``u`` with multiplicity
    ``m_u >= 2`` we blow up ``m_u - 1`` times along generic points and drop the
    last new curve.  Every stage's ``p_a`` is recomputed, never assumed.  When
    the descent stalls or ``budget`` moves are spent, connected full subgraphs
    of the current subgraph are searched (up to ``cap`` of them).  Raises
    :class:`BudgetExhausted` with the stage trace if nothing is found.
    """
    if not qhs_link(g):
        raise NotQhsLink("realize_q needs a tree with all genera zero")
    pa = arithmetic_genus(g)
    if not 0 <= q <= pa:
        raise QOutOfRange(f"q = {q} is outside [0, {pa}]")
    cur = g
    kept = g.ids
    moves: list[BlowupRecord] = []
    stages = [Stage(cur, kept, pa, "start")]
    steps = 0
    while pa != q and steps < budget:
        sub = induced_graph(cur, kept)
        zc = min_chi(sub).min_minimizer
        best = None
        for u in sub.ids:
            if zc[u] < 2:
                continue
            h, recs = blow_up_sequence_at(cur, u, zc[u] - 1)
            last = recs[-1].new_vertex
            new_kept = tuple(v for v in h.ids if v in set(kept) or v in {r.new_vertex for r in recs})
            new_kept = tuple(v for v in new_kept if v != last)
            new_pa = arithmetic_genus(induced_graph(h, new_kept))
            if not q <= new_pa < pa:
                continue
            if best is None or new_pa > best[0]:
                best = (new_pa, u, h, recs, new_kept)
            if new_pa == pa - 1:
                break
        if best is None:
            break
        pa, u, cur, recs, kept = best
        moves.extend(recs)
        steps += 1
        stages.append(Stage(cur, kept, pa, f"blow up {u} x{len(recs)}, drop {recs[-1].new_vertex}"))
    if pa == q:
        return SpectrumWitness(q, tuple(moves), kept, tuple(stages))

    sub = induced_graph(cur, kept)
    for cand in connected_subsets(sub, limit=cap):
        if arithmetic_genus(induced_graph(cur, cand)) == q:
            stages.append(Stage(cur, cand, q, "connected full subgraph"))
            return SpectrumWitness(q, tuple(moves), cand, tuple(stages))
    raise BudgetExhausted(f"no stage with p_a = {q} within budget {budget}", stages)
