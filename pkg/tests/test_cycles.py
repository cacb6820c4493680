import random

import pytest
from hypothesis import given, settings, strategies as st

from plumb import fixtures
from plumb.cycles import (
    certified_box,
    chi_minimizer_lattice,
    join,
    laufer_minimal_cycle,
    meet,
    min_chi,
    min_chi_oracle,
)
from plumb.errors import EmptyRegion, RegionTooLarge
from plumb.graph import PlumbingGraph, VertexData, blow_up_edge, blow_up_vertex, random_negdef_graph
from plumb.lattice import chi_int, pairings_with_basis

DPP_ZMIN = {"E1": 3, "m1": 6, "s1": 2, "x1": 1, "x2": 1, "x3": 1, "x4": 1, "m2": 6, "s2": 2, "E2": 3}


def single(euler, genus=0):
    return PlumbingGraph({"a": VertexData(euler, genus)}, ())


def is_anti_nef(g, z):
    return all(p <= 0 for p in pairings_with_basis(g, z).values())


def test_laufer_single_and_chain():
    assert laufer_minimal_cycle(single(-2)).result == {"a": 1}
    for n in range(1, 9):
        g = fixtures.a_n(n)
        assert laufer_minimal_cycle(g).result == {v: 1 for v in g.ids}


@pytest.mark.parametrize("n", [2, 3])
def test_laufer_star(n):
    g = fixtures.star(n, 20)
    tr = laufer_minimal_cycle(g)
    assert tr.result == {v: 3 if g.euler(v) == -1 else 1 for v in g.ids}
    assert chi_int(g, tr.result) == 1 - n
    assert all(p > 0 for _, p in tr.steps)


def test_laufer_dpp():
    g = fixtures.dpp()
    assert laufer_minimal_cycle(g).result == DPP_ZMIN
    assert chi_int(g, DPP_ZMIN) == -1


def test_laufer_e8_is_highest_root():
    g = fixtures.e_n(8)
    z = laufer_minimal_cycle(g).result
    assert sorted(z.values()) == [2, 2, 3, 3, 4, 4, 5, 6]


def test_laufer_properties(random_corpus):
    for g in random_corpus:
        z = laufer_minimal_cycle(g).result
        assert all(c >= 1 for c in z.values())
        assert is_anti_nef(g, z)
        assert laufer_minimal_cycle(g, tie_break="largest").result == z
        for v in g.ids:
            if z[v] > 1:
                smaller = dict(z, **{v: z[v] - 1})
                assert not is_anti_nef(g, smaller)


def test_min_chi_fixtures():
    assert min_chi(single(-2)).minimum == 1
    assert min_chi(single(-2)).min_minimizer == {"a": 1}
    assert min_chi(fixtures.dpp()).minimum == -1
    for n in (2, 3):
        res = min_chi(fixtures.star(n, 20))
        assert res.minimum == 1 - n


@pytest.mark.parametrize(
    "g, count",
    [(fixtures.e_n(8), 120), (fixtures.a_n(8), 36), (fixtures.d_n(4), 12)],
)
def test_rational_minimizer_counts(g, count):
    res = min_chi(g)
    assert res.minimum == 1 and res.minimizer_count == count
    (v,) = [w for w, c in res.min_minimizer.items() if c]
    assert res.min_minimizer[v] == 1 and g.genus(v) == 0


def test_elliptic_vertex():
    g = fixtures.elliptic()
    res = min_chi(g)
    assert res.minimum == 0
    assert res.min_minimizer == res.max_minimizer == {"a": 1}


def test_dpp_minimizers():
    res = min_chi(fixtures.dpp())
    assert res.minimizer_count == 256
    assert res.certificate.level == -1
    assert list(res.min_minimizer.values()) == [1, 2, 1, 1, 1, 1, 1, 2, 1, 1]
    assert list(res.max_minimizer.values()) == [6, 12, 4, 2, 1, 1, 2, 12, 4, 6]


def test_oracle_small_boxes():
    r = min_chi_oracle(single(-2), {"a": 5})
    assert r.minimum == 1 and r.min_minimizer == {"a": 1}
    r = min_chi_oracle(fixtures.elliptic(), {"a": 5})
    assert r.minimum == 0 and r.min_minimizer == {"a": 1}
    with pytest.raises(RegionTooLarge):
        min_chi_oracle(fixtures.dpp(), {v: 50 for v in fixtures.dpp().ids})


def test_box_errors():
    g = fixtures.a_n(2)
    with pytest.raises(EmptyRegion):
        min_chi(g, {})
    with pytest.raises(ValueError):
        min_chi(g, {"a1": -1})


def test_box_with_zero_coordinates():
    g = fixtures.dpp()
    box = {"E1": 3, "m1": 6, "s1": 2}
    res = min_chi(g, box)
    ora = min_chi_oracle(g, box)
    assert (res.minimum, res.min_minimizer, res.max_minimizer) == (ora.minimum, ora.min_minimizer, ora.max_minimizer)
    assert all(res.max_minimizer[v] == 0 for v in g.ids if v not in box)


def test_box_zmin_dpp_matches_oracle():
    g = fixtures.dpp()
    res = min_chi(g, DPP_ZMIN)
    ora = min_chi_oracle(g, DPP_ZMIN)
    assert res.minimum == ora.minimum == -1
    assert res.minimizers == ora.minimizers


def _agree(g, box=None):
    res = min_chi(g, box)
    ora = min_chi_oracle(g, res.certificate.bounds)
    if box is None:
        assert res.minimum <= 1
    assert res.minimum == ora.minimum
    assert res.min_minimizer == ora.min_minimizer
    assert res.max_minimizer == ora.max_minimizer
    assert res.minimizer_count == ora.minimizer_count
    return res


def test_oracle_agreement_corpus(random_corpus):
    for g in random_corpus[:80]:
        _agree(g)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 6), data=st.data())
def test_oracle_agreement_boxes(seed, n, data):
    g = random_negdef_graph(seed, n)
    box = {v: data.draw(st.integers(0, 4)) for v in g.ids}
    if not any(box.values()):
        box[g.ids[0]] = 1
    res = _agree(g, box)
    unbounded = min_chi(g).minimum
    assert res.minimum >= unbounded


def test_threads_match_serial():
    g = fixtures.dpp()
    a = min_chi(g)
    b = min_chi(g, threads=2)
    assert (a.minimum, a.min_minimizer, a.max_minimizer, a.minimizer_count) == (
        b.minimum,
        b.min_minimizer,
        b.max_minimizer,
        b.minimizer_count,
    )


def test_minimizer_lattice_closure(random_corpus):
    for g in random_corpus[:60]:
        res = min_chi(g)
        vecs = [dict(zip(g.ids, v)) for v in res.minimizers]
        rng = random.Random(len(g))
        for _ in range(10):
            a, b = rng.choice(vecs), rng.choice(vecs)
            lo = meet(a, b)
            # with a nonzero meet, submodularity forces both to be minimizers
            if any(lo.values()):
                assert chi_int(g, lo) == res.minimum
                assert chi_int(g, join(a, b)) == res.minimum
        lo, hi = chi_minimizer_lattice(g)
        assert all(lo[v] <= hi[v] for v in g.ids)
        assert chi_int(g, lo) == chi_int(g, hi) == res.minimum


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 6), data=st.data())
def test_submodularity(seed, n, data):
    g = random_negdef_graph(seed, n)
    coef = st.integers(0, 6)
    a = {v: data.draw(coef) for v in g.ids}
    b = {v: data.draw(coef) for v in g.ids}
    assert chi_int(g, meet(a, b)) + chi_int(g, join(a, b)) <= chi_int(g, a) + chi_int(g, b)


def test_certificate_shell(random_corpus):
    rng = random.Random(1)
    for g in random_corpus[:80]:
        res = min_chi(g)
        bounds = res.certificate.bounds
        for _ in range(20):
            l = {v: rng.randint(0, bounds[v] + 2) for v in g.ids}
            v = rng.choice(g.ids)
            l[v] = bounds[v] + 1
            assert chi_int(g, l) > res.minimum


def test_certificate_contents():
    g = fixtures.dpp()
    cert = certified_box(g)
    assert cert.level == chi_int(g, cert.level_witness)
    assert cert.order[0] == "x1"
    assert all(cert.bounds[v] >= DPP_ZMIN[v] for v in g.ids)


def test_min_chi_invariant_under_blowup(random_corpus):
    for g in random_corpus[:60]:
        base = min_chi(g).minimum
        h, _ = blow_up_vertex(g, g.ids[-1])
        assert min_chi(h).minimum == base
        if g.edges:
            h, _ = blow_up_edge(g, *g.edges[0])
            assert min_chi(h).minimum == base
