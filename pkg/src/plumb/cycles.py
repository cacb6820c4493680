"""Artin's minimal cycle and certified minimization of χ over effective cycles.

For integral ``l`` write ``Q = -I`` (positive definite) and ``k_v = e_v + 2 - 2g_v``.
Then ``2χ(l) = l^T Q l + k·l = (l - c)^T Q (l - c) - c^T Q c`` with centre
``c = Z_K / 2``.  Every cycle with ``χ <= level`` therefore lies in an
ellipsoid, whose coordinate extents give the certified search box.  The search
itself is a Fincke-Pohst style enumeration over a Q = U D U^T splitting, so
each level of the depth-first search gets its admissible integer interval in
closed form.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from . import linalg
from .errors import EmptyRegion, RegionTooLarge, UnknownVertex
from .graph import PlumbingGraph
from .lattice import adjunction_rhs, build_intersection, canonical_cycle

ORACLE_CAP = 10**8


# ---------------------------------------------------------------------------
# Laufer sequence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LauferTrace:
    result: dict[str, int]
    steps: tuple[tuple[str, int], ...]  # (vertex bumped, (z, E_v) that triggered it)


def laufer_minimal_cycle(g: PlumbingGraph, tie_break: str = "smallest") -> LauferTrace:
    """Artin's fundamental cycle via Laufer's computation sequence.

    Starts at ``z = E`` and adds ``E_v`` while some ``(z, E_v) > 0``.  Among the
    violators the first (``"smallest"``) or last (``"largest"``) vertex in file
    order is bumped.
    """
    if tie_break not in ("smallest", "largest"):
        raise ValueError("tie_break must be 'smallest' or 'largest'")
    m = g.matrix()
    n = len(m)
    z = [1] * n
    p = [sum(row) for row in m]
    steps = []
    while True:
        bad = [i for i in range(n) if p[i] > 0]
        if not bad:
            break
        i = bad[0] if tie_break == "smallest" else bad[-1]
        steps.append((g.ids[i], p[i]))
        z[i] += 1
        for j in range(n):
            p[j] += m[j][i]
    return LauferTrace(dict(zip(g.ids, z)), tuple(steps))


# ---------------------------------------------------------------------------
# helpers on cycles
# ---------------------------------------------------------------------------


def meet(a: Mapping[str, int], b: Mapping[str, int]) -> dict[str, int]:
    return {v: min(a.get(v, 0), b.get(v, 0)) for v in a.keys() | b.keys()}


def join(a: Mapping[str, int], b: Mapping[str, int]) -> dict[str, int]:
    return {v: max(a.get(v, 0), b.get(v, 0)) for v in a.keys() | b.keys()}


def _chi_vec(m, rhs, vec) -> int:
    twice = -linalg.quad(m, vec) + sum(c * k for c, k in zip(vec, rhs))
    return twice // 2


def extreme_minimizers(vectors: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Canonical lattice-minimal and lattice-maximal elements of a minimizer set.

    The minimal one has the smallest coefficient sum, ties going to the
    lexicographically largest (weight on earlier vertices).  The maximal one is
    taken among minimizers dominating it: largest sum, lexicographically
    largest on ties.  When the set is closed under meet and join these are its
    unique bottom and top.
    """
    lo = min(vectors, key=lambda v: (sum(v), tuple(-x for x in v)))
    above = [v for v in vectors if all(x >= y for x, y in zip(v, lo))]
    hi = max(above, key=lambda v: (sum(v), tuple(v)))
    return tuple(lo), tuple(hi)


# ---------------------------------------------------------------------------
# certified box
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """Why the search box suffices.

    Every cycle in the region with ``χ <= level`` satisfies
    ``(l - center)^T Q (l - center) <= 2 * radius`` and hence ``l_v <= bounds[v]``.
    """

    level: int
    level_witness: dict[str, int]
    center: dict[str, Fraction]
    radius: Fraction
    bounds: dict[str, int]
    order: tuple[str, ...]


@dataclass(frozen=True)
class MinChiResult:
    minimum: int
    min_minimizer: dict[str, int]
    max_minimizer: dict[str, int]
    minimizer_count: int | None
    certificate: Certificate | None
    box: dict[str, int] | None = None  # None means the unbounded region l > 0
    minimizers: tuple[tuple[int, ...], ...] = field(default=(), repr=False, compare=False)


def _floor_center_plus_sqrt(a: Fraction, r: Fraction) -> int:
    """Exact ``floor(a + sqrt(r))`` for rationals ``a`` and ``r >= 0``."""
    t = math.floor(a) + math.isqrt(math.floor(r)) + 1
    while t - a > 0 and (t - a) ** 2 > r:
        t -= 1
    return t


def _ceil_center_minus_sqrt(a: Fraction, r: Fraction) -> int:
    return -_floor_center_plus_sqrt(-a, r)


def _normalize_box(g: PlumbingGraph, box: Mapping[str, int] | None) -> list[int] | None:
    if box is None:
        return None
    for v in box:
        if v not in g.vertices:
            raise UnknownVertex(v)
    vec = [int(box.get(v, 0)) for v in g.ids]
    if any(x < 0 for x in vec):
        raise ValueError("box cycle must be effective")
    if not any(vec):
        raise EmptyRegion("region 0 < l <= 0 is empty")
    return vec


def _search_order(g: PlumbingGraph) -> list[int]:
    return sorted(range(len(g)), key=lambda i: -abs(g.euler(g.ids[i])))


def certified_box(g: PlumbingGraph, box: Mapping[str, int] | None = None) -> Certificate:
    """Per-coordinate bounds containing every cycle with ``χ <= level``.

    ``level`` is the smallest χ among the basis cycles in the region and
    Artin's minimal cycle (when it lies in the region).
    """
    zvec = _normalize_box(g, box)
    m = g.matrix()
    rhs = list(adjunction_rhs(g).values())
    n = len(m)
    candidates = [[int(i == j) for j in range(n)] for i in range(n) if zvec is None or zvec[i] > 0]
    zmin = list(laufer_minimal_cycle(g).result.values())
    if zvec is None or all(a <= b for a, b in zip(zmin, zvec)):
        candidates.append(zmin)
    witness = min(candidates, key=lambda v: (_chi_vec(m, rhs, v), sum(v)))
    level = _chi_vec(m, rhs, witness)

    inv = build_intersection(g).inverse
    zk = [canonical_cycle(g)[v] for v in g.ids]
    center = [x / 2 for x in zk]
    # q(c) = c^T Q c / 2 = -(Z_K, Z_K) / 8 = -(sum Z_K,v k_v) / 8
    q_center = -sum((a * b for a, b in zip(zk, rhs)), Fraction(0)) / 8
    radius = level + q_center
    bounds = {}
    for i, v in enumerate(g.ids):
        qinv_vv = -inv[i][i]
        b = _floor_center_plus_sqrt(center[i], 2 * radius * qinv_vv) if radius >= 0 else -1
        b = max(b, 0)
        if zvec is not None:
            b = min(b, zvec[i])
        bounds[v] = b
    return Certificate(
        level=level,
        level_witness=dict(zip(g.ids, witness)),
        center=dict(zip(g.ids, center)),
        radius=radius,
        bounds=bounds,
        order=tuple(g.ids[i] for i in _search_order(g)),
    )


# ---------------------------------------------------------------------------
# pruned search
# ---------------------------------------------------------------------------


def _splitting(qp):
    """``(U, d)`` with ``x^T qp x = sum_i d_i (x_i + sum_{j<i} U[j][i] x_j)^2``."""
    n = len(qp)
    rev = [[qp[n - 1 - i][n - 1 - j] for j in range(n)] for i in range(n)]
    lo, d = linalg.ldl(rev)
    u = [[lo[n - 1 - i][n - 1 - j] for j in range(n)] for i in range(n)]
    return u, [d[n - 1 - i] for i in range(n)]


@dataclass
class _Problem:
    u: list
    d: list
    center: list
    lower: list
    upper: list
    cqc: Fraction


def _prepare(g: PlumbingGraph, cert: Certificate, zvec) -> tuple[_Problem, list[int]]:
    order = [g.index[v] for v in cert.order]
    m = g.matrix()
    q = [[-m[i][j] for j in order] for i in order]
    u, d = _splitting(q)
    zk = canonical_cycle(g)
    rhs = adjunction_rhs(g)
    cqc = -sum((zk[v] * rhs[v] for v in g.ids), Fraction(0)) / 4
    center = [zk[g.ids[i]] / 2 for i in order]
    upper = [cert.bounds[g.ids[i]] for i in order]
    return _Problem(u, d, center, [0] * len(order), upper, cqc), order


def _enumerate(prob: _Problem, level: int, first_values=None):
    """All ``l`` in the box with ``0 < l`` and ``χ(l) <= current best``.

    Returns ``(best, minimizers)``; ``best`` starts at ``level`` and only
    decreases.  ``first_values`` restricts coordinate 0 (used to split work).
    """
    n = len(prob.d)
    u, d, c = prob.u, prob.d, prob.center
    best = level
    found: list[tuple[int, ...]] = []
    limit = 2 * best + prob.cqc
    x = [Fraction(0)] * n
    l = [0] * n

    def interval(i, acc):
        s = sum((u[j][i] * x[j] for j in range(i)), Fraction(0))
        a = c[i] - s
        r = (limit - acc) / d[i]
        if r < 0:
            return a, 1, 0
        lo = max(prob.lower[i], _ceil_center_minus_sqrt(a, r))
        hi = min(prob.upper[i], _floor_center_plus_sqrt(a, r))
        return a, lo, hi

    def rec(i, acc):
        nonlocal best, limit, found
        a, lo, hi = interval(i, acc)
        values = range(lo, hi + 1)
        if i == 0 and first_values is not None:
            values = [t for t in first_values if lo <= t <= hi]
        for t in values:
            y = t - a
            term = d[i] * y * y
            if acc + term > limit:
                if t > a:
                    break
                continue
            l[i] = t
            x[i] = t - c[i]
            if i + 1 < n:
                rec(i + 1, acc + term)
            elif any(l):
                val = (acc + term - prob.cqc) / 2
                assert val.denominator == 1
                val = int(val)
                if val < best:
                    best = val
                    limit = 2 * best + prob.cqc
                    found = []
                if val == best:
                    found.append(tuple(l))
        l[i] = 0
        x[i] = Fraction(0)

    rec(0, Fraction(0))
    return best, found


def _enumerate_part(args):
    prob, level, values = args
    return _enumerate(prob, level, values)


def min_chi(
    g: PlumbingGraph,
    box: Mapping[str, int] | None = None,
    *,
    threads: int = 1,
) -> MinChiResult:
    """Exact minimum of χ over ``l > 0`` (``box=None``) or ``0 < l <= box``.

    Returns the canonical lattice-minimal and lattice-maximal minimizers, the
    number of minimizers and the certificate bounding the search.
    """
    zvec = _normalize_box(g, box)
    cert = certified_box(g, box)
    prob, order = _prepare(g, cert, zvec)
    if threads > 1 and prob.upper[0] > 0:
        firsts = list(range(prob.lower[0], prob.upper[0] + 1))
        chunks = [firsts[i::threads] for i in range(threads)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_enumerate_part, [(prob, cert.level, ch) for ch in chunks if ch]))
        best = min(b for b, _ in parts)
        found = [v for b, vs in parts if b == best for v in vs]
    else:
        best, found = _enumerate(prob, cert.level)
    if not found:
        raise AssertionError("certified search found no minimizer; the level witness should be one")
    # back to file order
    back = [0] * len(order)
    for pos, i in enumerate(order):
        back[i] = pos
    vecs = sorted({tuple(v[back[i]] for i in range(len(order))) for v in found})
    lo, hi = extreme_minimizers(vecs)
    return MinChiResult(
        minimum=best,
        min_minimizer=dict(zip(g.ids, lo)),
        max_minimizer=dict(zip(g.ids, hi)),
        minimizer_count=len(vecs),
        certificate=cert,
        box=None if zvec is None else dict(zip(g.ids, zvec)),
        minimizers=tuple(vecs),
    )


def chi_minimizer_lattice(g: PlumbingGraph, box: Mapping[str, int] | None = None):
    """``(min_minimizer, max_minimizer)`` of χ over the region."""
    res = min_chi(g, box)
    return res.min_minimizer, res.max_minimizer


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------


def min_chi_oracle(g: PlumbingGraph, box: Mapping[str, int], cap: int = ORACLE_CAP) -> MinChiResult:
    """Evaluate χ at every ``0 < l <= box``; no pruning, no ellipsoid.

    The box is split into an inner numpy grid and an outer Python loop, and
    ``χ(a + b) = χ(a) + χ(b) - (a, b)`` glues them, so each point costs O(1).
    Falls back to pure Python when int64 could overflow.
    """
    zvec = _normalize_box(g, box)
    size = math.prod(b + 1 for b in zvec)
    if size > cap:
        raise RegionTooLarge(f"oracle region has {size} points, cap is {cap}")
    m = g.matrix()
    rhs = list(adjunction_rhs(g).values())
    n = len(m)
    magnitude = sum(abs(m[i][j]) * zvec[i] * zvec[j] for i in range(n) for j in range(n))
    magnitude += sum(abs(k) * b for k, b in zip(rhs, zvec))
    if magnitude < 2**60:
        best, vecs = _oracle_numpy(m, rhs, zvec)
    else:
        best, vecs = _oracle_python(m, rhs, zvec)
    vecs = sorted(vecs)
    lo, hi = extreme_minimizers(vecs)
    return MinChiResult(
        minimum=best,
        min_minimizer=dict(zip(g.ids, lo)),
        max_minimizer=dict(zip(g.ids, hi)),
        minimizer_count=len(vecs),
        certificate=None,
        box=dict(zip(g.ids, zvec)),
        minimizers=tuple(vecs),
    )


def _oracle_python(m, rhs, zvec):
    best = None
    vecs = []
    for l in itertools.product(*(range(b + 1) for b in zvec)):
        if not any(l):
            continue
        val = _chi_vec(m, rhs, l)
        if best is None or val < best:
            best, vecs = val, [l]
        elif val == best:
            vecs.append(l)
    return best, vecs


def _oracle_numpy(m, rhs, zvec, inner_target: int = 1 << 16):
    import numpy as np

    n = len(zvec)
    by_size = sorted(range(n), key=lambda i: -zvec[i])
    inner, size = [], 1
    for i in by_size:
        if size >= inner_target:
            break
        inner.append(i)
        size *= zvec[i] + 1
    inner.sort()
    outer = [i for i in range(n) if i not in inner]

    mat = np.array(m, dtype=np.int64)
    k = np.array(rhs, dtype=np.int64)
    grids = np.meshgrid(*(np.arange(zvec[i] + 1, dtype=np.int64) for i in inner), indexing="ij")
    pts = np.stack([gr.ravel() for gr in grids], axis=1)  # inner coordinates
    sub = mat[np.ix_(inner, inner)]
    twice_inner = -np.einsum("ij,jk,ik->i", pts, sub, pts) + pts @ k[inner]

    best = None
    vecs: list[tuple[int, ...]] = []
    for a in itertools.product(*(range(zvec[i] + 1) for i in outer)):
        full = [0] * n
        for i, t in zip(outer, a):
            full[i] = t
        twice_a = -linalg.quad(m, full) + sum(c * kk for c, kk in zip(full, rhs))
        ia = linalg.matvec(m, full)  # (a, E_j)
        cross = pts @ np.array([ia[i] for i in inner], dtype=np.int64)
        twice = twice_a + twice_inner - 2 * cross
        if not any(a):
            twice = twice.copy()
            twice[0] = np.iinfo(np.int64).max  # zero cycle is outside the region
        low = int(twice.min())
        if best is None or low < 2 * best:
            best = low // 2
            vecs = []
        if low == 2 * best:
            for row in pts[twice == low]:
                full_l = list(full)
                for i, t in zip(inner, row):
                    full_l[i] = int(t)
                vecs.append(tuple(full_l))
    return best, vecs
