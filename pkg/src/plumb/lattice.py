"""Exact arithmetic on the intersection lattice L and its dual L'.

Rational cycles are ``dict[str, Fraction]``; integral cycles ``dict[str, int]``.
Anything accepting a rational cycle also accepts an integral one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from . import linalg
from .errors import NotNegativeDefinite, UnknownVertex
from .graph import PlumbingGraph

RatCycle = Mapping[str, "Fraction | int"]


@dataclass(frozen=True)
class IntersectionData:
    vertices: tuple[str, ...]
    matrix: tuple[tuple[int, ...], ...]
    inverse: tuple[tuple[Fraction, ...], ...]
    det: int
    pivots: tuple[Fraction, ...]
    duals: Mapping[str, Mapping[str, Fraction]]


@lru_cache(maxsize=1024)
def build_intersection(g: PlumbingGraph) -> IntersectionData:
    """Matrix, LDL^T pivots, determinant, exact inverse and dual cycles E*_v.

    Raises :class:`NotNegativeDefinite` when some pivot is ``>= 0``.
    """
    m = g.matrix()
    _, pivots = linalg.ldl(m)
    for i, p in enumerate(pivots):
        if p >= 0:
            minor = linalg.determinant([row[: i + 1] for row in m[: i + 1]])
            raise NotNegativeDefinite(i, g.ids[i], p, minor)
    det = math.prod(pivots)
    assert det.denominator == 1
    inv = linalg.inverse(m)
    ids = g.ids
    # (E*_v, E_w) = -delta_vw, so E*_v is minus the v-th column of I^{-1}
    duals = {v: {w: -inv[j][i] for j, w in enumerate(ids)} for i, v in enumerate(ids)}
    return IntersectionData(
        vertices=ids,
        matrix=tuple(map(tuple, m)),
        inverse=tuple(map(tuple, inv)),
        det=int(det),
        pivots=tuple(pivots),
        duals=duals,
    )


def _vec(g: PlumbingGraph, x: RatCycle) -> list:
    for v in x:
        if v not in g.vertices:
            raise UnknownVertex(v)
    return [x.get(v, 0) for v in g.ids]


def pairing(g: PlumbingGraph, x: RatCycle, y: RatCycle) -> Fraction:
    """Intersection pairing ``(x, y)``."""
    return Fraction(linalg.quad(g.matrix(), _vec(g, x), _vec(g, y)))


def pairings_with_basis(g: PlumbingGraph, x: RatCycle) -> dict[str, Fraction]:
    """``{v: (x, E_v)}``."""
    return dict(zip(g.ids, (Fraction(t) for t in linalg.matvec(g.matrix(), _vec(g, x)))))


def dual(g: PlumbingGraph, v: str) -> dict[str, Fraction]:
    if v not in g.vertices:
        raise UnknownVertex(v)
    return dict(build_intersection(g).duals[v])


def adjunction_rhs(g: PlumbingGraph) -> dict[str, int]:
    """``(Z_K, E_v) = e_v + 2 - 2 g_v``."""
    return {v: d.euler + 2 - 2 * d.genus for v, d in g.vertices.items()}


@lru_cache(maxsize=1024)
def _canonical(g: PlumbingGraph) -> tuple[Fraction, ...]:
    inv = build_intersection(g).inverse
    rhs = list(adjunction_rhs(g).values())
    return tuple(Fraction(t) for t in linalg.matvec(inv, rhs))


def canonical_cycle(g: PlumbingGraph) -> dict[str, Fraction]:
    """The anticanonical cycle Z_K, solved with the cached exact inverse."""
    return dict(zip(g.ids, _canonical(g)))


def chi(g: PlumbingGraph, x: RatCycle) -> Fraction:
    """Riemann-Roch expression ``-(x, x - Z_K) / 2``."""
    zk = canonical_cycle(g)
    diff = {v: x.get(v, 0) - zk[v] for v in g.ids}
    return -pairing(g, x, diff) / 2


def chi_int(g: PlumbingGraph, x: Mapping[str, int]) -> int:
    """Integer-only χ for integral cycles (no Z_K solve needed)."""
    vec = _vec(g, x)
    rhs = adjunction_rhs(g)
    twice = -linalg.quad(g.matrix(), vec) + sum(c * rhs[v] for v, c in zip(g.ids, vec))
    assert twice % 2 == 0
    return twice // 2


def in_dual_lattice(g: PlumbingGraph, x: RatCycle) -> bool:
    return all(p.denominator == 1 for p in pairings_with_basis(g, x).values())


def is_in_lipman_cone(g: PlumbingGraph, x: RatCycle) -> bool:
    p = pairings_with_basis(g, x)
    return all(t <= 0 and t.denominator == 1 for t in p.values())


@dataclass(frozen=True)
class EStarSupport:
    support: frozenset
    coefficients: Mapping[str, Fraction]
    in_dual_lattice: bool


def estar_support(g: PlumbingGraph, x: RatCycle) -> EStarSupport:
    """Write ``x = sum a_v E*_v`` (``a_v = -(x, E_v)``) and return ``{v : a_v != 0}``."""
    a = {v: -t for v, t in pairings_with_basis(g, x).items()}
    return EStarSupport(
        support=frozenset(v for v, t in a.items() if t != 0),
        coefficients=a,
        in_dual_lattice=all(t.denominator == 1 for t in a.values()),
    )


def floor_cycle(x: RatCycle) -> dict[str, int]:
    return {v: math.floor(c) for v, c in x.items()}


def discriminant_order(g: PlumbingGraph) -> int:
    """``|L'/L| = |det I|``."""
    return abs(build_intersection(g).det)


def eca_dimension(g: PlumbingGraph, lprime: RatCycle, z: Mapping[str, int]) -> Fraction | None:
    """``dim ECa^{l'}(Z) = (l', Z)``, or ``None`` when ECa^{l'}(Z) is empty (``l' not in -S'``).

    ``l' = 0`` gives 0: ECa^0 is the one-point space of the empty divisor.
    """
    neg = {v: -c for v, c in lprime.items()}
    if not is_in_lipman_cone(g, neg):
        return None
    return pairing(g, lprime, z)
