from __future__ import annotations

import math
from fractions import Fraction

import pytest

from domiso.errors import PreconditionError
from domiso.graph import build_collapsed, build_full, parse_spec
from domiso.setops import VertexSet, collapse_set, fiber, sort_relabel
from domiso.stability import (enumerate_large_independent_sets, eta, lemma4_dichotomy_check, omega,
                              prop2_holds, prop2_lower_bound, stability_bound, thm6_verify)

F = Fraction


def brute_large_independent(graph, thr: float) -> set[int]:
    nbr = graph.neighbor_masks()
    out = set()
    for mask in range(1 << graph.size):
        verts = [v for v in range(graph.size) if mask >> v & 1]
        if any(nbr[v] & mask for v in verts):
            continue
        if sum(graph.weight(v) for v in verts) > thr:
            out.add(mask)
    return out


def test_eta_values():
    assert eta(2).is_exact and eta(2).lo == 1
    e3, e4 = eta(3), eta(4)
    assert F("2.70951") <= e3.lo and e3.hi <= F("2.70952")
    assert F("4.81884") <= e4.lo and e4.hi <= F("4.81885")
    assert e3.width <= F(1, 10**12)
    assert abs(float(e3.mid) - math.log(3) / math.log(1.5)) < 1e-12
    with pytest.raises(PreconditionError):
        eta(1)


def test_omega_values():
    w3, w4 = omega(3), omega(4)
    assert round(float(w3.mid), 4) == 0.2779 and round(float(w4.mid), 4) == 0.1741
    assert omega(5) == F(17, 125)
    assert abs(float(w3.mid) - (37 / 81 - 0.5 * (5 / 81) ** (math.log(1.5) / math.log(3)))) < 1e-12
    with pytest.raises(PreconditionError):
        omega(2)


def test_fiber_lower_bound_examples():
    z = prop2_lower_bound(3, 3, 0)
    assert z.is_exact and z.lo == 0
    b = prop2_lower_bound(3, 3, F(5, 27))
    expect = -5 / 9 + 1.5 * (5 / 54) ** (math.log(1.5) / math.log(3))
    assert abs(float(b.mid) - expect) < 1e-12 and abs(float(b.mid) - 0.0678) < 1e-4
    assert b.certainly_lt(F(1, 9))


def test_fiber_lower_bound_on_sorted_subset():
    g = build_collapsed(parse_spec("K_3^3"))
    J = fiber(g, 1, 1)
    I = J.with_vertex(J.indices()[-1], False)
    assert len(I) == 8
    res = dict(prop2_holds(g, I))
    assert all(res.values())


def test_stability_verifier_examples():
    g2 = build_collapsed(parse_spec("K_3^2"))
    rep = thm6_verify(g2, fiber(g2, 1, 2))
    assert rep.eps == 0 and rep.status == "extremal" and rep.delta == 0

    g3 = build_collapsed(parse_spec("K_3^3"))
    J = fiber(g3, 2, 3)
    I = J.with_vertex(J.indices()[0], False)
    rep = thm6_verify(g3, I)
    assert rep.status == "ok" and rep.eps == F(1, 9) and rep.delta == 0
    assert rep.threshold == F(27, 8) and (rep.j, rep.a) == (3, 2)
    assert round(float(rep.bound.mid), 4) == 0.0104
    assert rep.to_json()["eps"] == "1/9"


def test_stability_verifier_below_threshold():
    g = build_collapsed(parse_spec("K_4xK_3"))
    with pytest.raises(PreconditionError, match="below threshold"):
        thm6_verify(g, fiber(g, 1, 1))


def test_stability_verifier_rejects_dependent_set():
    g = build_collapsed(parse_spec("K_3^2"))
    with pytest.raises(PreconditionError):
        thm6_verify(g, VertexSet.from_coords(g, [(1, 1), (2, 2), (3, 3)]))


def test_enumeration_examples():
    g2 = build_collapsed(parse_spec("K_3^2"))
    sets = list(enumerate_large_independent_sets(g2, omega(3)))
    fibers = {fiber(g2, a, j) for j in (1, 2) for a in (1, 2, 3)}
    assert len(sets) == 6 and set(sets) == fibers
    k3 = build_collapsed(parse_spec("K_3"))
    assert sorted(len(s) for s in enumerate_large_independent_sets(k3, 0)) == [1, 1, 1]


@pytest.mark.parametrize("text", ["K_3^2", "K_4xK_3", "K_3xK_2^2", "K_4xK_2"])
def test_enumeration_matches_brute_force(text):
    g = build_collapsed(parse_spec(text))
    thr = F(1, 5)
    got = [s.to_mask() for s in enumerate_large_independent_sets(g, thr)]
    assert len(got) == len(set(got))
    assert set(got) == brute_large_independent(g, thr)


def test_enumeration_k3_cubed_sizes():
    g = build_collapsed(parse_spec("K_3^3"))
    sets = list(enumerate_large_independent_sets(g, omega(3)))
    assert {len(s) for s in sets} == {8, 9}
    assert len(sets) == 9 * 9 + 9


def test_dichotomy_examples():
    g = build_collapsed(parse_spec("K_3^2"))
    res = lemma4_dichotomy_check(g, fiber(g, 1, 1))
    assert res[0].branch == "small" and res[0].delta == 0
    assert res[1].branch == "large" and res[1].delta == F(2, 9)
    assert res[1].large_limit == F(10, 81)


def test_dichotomy_requires_sorted():
    g = build_collapsed(parse_spec("K_3^2"))
    with pytest.raises(PreconditionError):
        lemma4_dichotomy_check(g, fiber(g, 3, 1))


def test_stability_bound_exact_power():
    # (2/3)^eta(3) = 1/3 exactly
    b = stability_bound(3, F(2, 3))
    assert b.is_exact and b.lo == F(4, 3)


def test_collapse_agreement_on_full_graph():
    spec = parse_spec("K[2,3]^2")
    full, coll = build_full(spec), build_collapsed(spec)
    J = fiber(full, 1, 1)
    I = J.with_vertex(J.indices()[0], False)
    assert I.measure() == F(11, 36)
    a, b = thm6_verify(full, I), thm6_verify(coll, collapse_set(I, coll))
    assert (a.status == "fail") == (b.status == "fail")


@pytest.mark.parametrize("text", ["K_3^2", "K_4xK_3", "K_3^3"])
def test_sorted_corpus(text):
    g = build_collapsed(parse_spec(text))
    for I in enumerate_large_independent_sets(g, omega(3)):
        _, Is, _ = sort_relabel(I)
        assert all(ok for _, ok in prop2_holds(g, Is))
        assert all(e.branch != "middle" for e in lemma4_dichotomy_check(g, Is))
        assert thm6_verify(g, I).status in ("ok", "extremal")
