from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from domiso.domination import (IrredundantCertificate, RedundancyWitness, irredundance_bounds,
                               irredundance_certificate, is_irredundant, max_independent_set,
                               soc_rank_certificate, upper_irredundance)
from domiso.errors import BudgetExceeded, PreconditionError
from domiso.graph import alpha_formula, build_collapsed, build_full, parse_spec
from domiso.setops import VertexSet, closed_neighborhood, fiber


def closed_mask(nbr, mask):
    out = mask
    for v in range(len(nbr)):
        if mask >> v & 1:
            out |= nbr[v]
    return out


def brute_params(graph):
    """(alpha, Gamma, IR) from the definitions, over every subset."""
    nbr = graph.neighbor_masks()
    N = graph.size
    full = (1 << N) - 1
    alpha = gamma = ir = 0
    for mask in range(1, 1 << N):
        size = bin(mask).count("1")
        if all(not nbr[v] & mask for v in range(N) if mask >> v & 1):
            alpha = max(alpha, size)
        n_all = closed_mask(nbr, mask)
        irr = all(closed_mask(nbr, mask & ~(1 << v)) != n_all for v in range(N) if mask >> v & 1)
        if irr:
            ir = max(ir, size)
            if n_all == full:
                gamma = max(gamma, size)
    return alpha, gamma, ir


@pytest.mark.parametrize("text, alpha", [("K_3", 1), ("K_3xK_3", 3), ("K[2,3]xK_3", 6)])
def test_alpha_examples(text, alpha):
    g = build_full(parse_spec(text))
    rep = max_independent_set(g)
    assert rep.value == alpha and rep.optimal
    assert rep.witness.is_independent() and len(rep.witness) == alpha
    assert rep.value == alpha_formula(parse_spec(text))


def test_alpha_witness_is_a_fiber():
    g = build_full(parse_spec("K_3xK_3"))
    w = max_independent_set(g).witness
    assert any(w == fiber(g, a, j) for j in (1, 2) for a in (1, 2, 3))


@pytest.mark.parametrize("text", ["K_3", "K[2,2]", "K_3xK_3", "K_2xK_3", "K_2^3", "K(2,1)xK_3", "K(2,1)^2"])
def test_solvers_match_brute_force(text):
    g = build_full(parse_spec(text))
    alpha, gamma, ir = brute_params(g)
    assert max_independent_set(g).value == alpha
    rg = upper_irredundance(g, "gamma")
    ri = upper_irredundance(g, "ir")
    assert (rg.value, ri.value) == (gamma, ir)
    assert is_irredundant(ri.witness) and len(ri.witness) == ir
    assert closed_neighborhood(rg.witness) == VertexSet.full(g)


def test_ir_examples():
    assert upper_irredundance(build_full(parse_spec("K_3"))).value == 1
    assert upper_irredundance(build_full(parse_spec("K_3")), "gamma").value == 1
    assert upper_irredundance(build_full(parse_spec("K_3xK_3"))).value == 3
    assert upper_irredundance(build_full(parse_spec("K[2,2]"))).value == 2


def test_budget_and_mode_errors():
    g = build_full(parse_spec("K_3^4"))
    with pytest.raises(BudgetExceeded):
        max_independent_set(g)
    with pytest.raises(PreconditionError):
        upper_irredundance(build_full(parse_spec("K_3")), "lower")


def test_timeout_flags_non_optimal():
    g = build_full(parse_spec("K_4xK_3xK_2"))
    rep = upper_irredundance(g, "ir", timeout=0.0)
    assert not rep.optimal and rep.value >= 0


def test_certificate_examples():
    g = build_collapsed(parse_spec("K_3xK_3"))
    ind = fiber(g, 1, 1)
    cert = irredundance_certificate(ind)
    assert isinstance(cert, IrredundantCertificate)
    assert cert.social == () and set(cert.lonely) == set(ind.indices())
    pair = VertexSet.from_coords(g, [(1, 1), (2, 2)])
    cert = irredundance_certificate(pair)
    a, b = g.encode((1, 1)), g.encode((2, 2))
    assert cert.private == {a: g.encode((2, 3)), b: g.encode((1, 3))}
    assert soc_rank_certificate(cert) == 2


def test_certificate_smallest_index_private_neighbour():
    g = build_collapsed(parse_spec("K_3xK_3"))
    pair = VertexSet.from_coords(g, [(1, 1), (2, 2)])
    smask = pair.to_mask()
    nbr = g.neighbor_masks()
    cert = irredundance_certificate(pair)
    for v, p in cert.private.items():
        valid = [w for w in range(g.size) if not smask >> w & 1 and nbr[w] >> v & 1
                 and nbr[w] & smask == 1 << v]
        assert p == min(valid)


def test_path_in_four_cycle():
    g = build_full(parse_spec("K[2,2]"))
    nbr = g.neighbor_masks()
    # vertices 0,1 in part 1 and 2,3 in part 2; the path 0-2-1 has middle vertex 2
    path = VertexSet.from_indices(g, [0, 2, 1])
    assert nbr[0] >> 2 & 1 and nbr[2] >> 1 & 1
    wit = irredundance_certificate(path)
    assert isinstance(wit, RedundancyWitness)
    assert 2 in wit.redundant
    N = closed_neighborhood(path)
    for v in wit.redundant:
        assert closed_neighborhood(path.with_vertex(v, False)) == N


def test_empty_set_precondition():
    with pytest.raises(PreconditionError):
        irredundance_certificate(VertexSet.empty(build_collapsed(parse_spec("K_3"))))


@given(st.sampled_from(["K_3xK_3", "K_2xK_3", "K[2,2]xK_2", "K(2,1)xK_3"]), st.data())
def test_certificate_iff_definition(text, data):
    g = build_full(parse_spec(text))
    mask = data.draw(st.integers(1, (1 << g.size) - 1))
    T = VertexSet.from_mask(g, mask)
    N = closed_neighborhood(T)
    definitional = all(closed_neighborhood(T.with_vertex(v, False)) != N for v in T.indices())
    cert = irredundance_certificate(T)
    assert isinstance(cert, IrredundantCertificate) == definitional
    if definitional:
        nbr = g.neighbor_masks()
        chosen = [p for p in cert.private.values() if p is not None]
        assert len(set(chosen)) == len(chosen) and not any(p in T for p in chosen)
        assert VertexSet.from_indices(g, cert.lonely).is_independent()
        for v, p in cert.private.items():
            if p is not None:
                assert nbr[v] >> p & 1 and nbr[p] & mask == 1 << v


def test_soc_rank_exhaustive_k3_squared():
    g = build_collapsed(parse_spec("K_3xK_3"))
    for mask in range(1, 1 << g.size):
        cert = irredundance_certificate(VertexSet.from_mask(g, mask))
        if isinstance(cert, IrredundantCertificate):
            r = soc_rank_certificate(cert)
            assert r == len(cert.social) <= 4


def test_rank_of_empty_social_set():
    g = build_collapsed(parse_spec("K_3xK_3"))
    assert soc_rank_certificate(irredundance_certificate(fiber(g, 1, 1))) == 0


@pytest.mark.parametrize("text", ["K_3xK_3", "K_4xK_3", "K_2^3", "K[2,2]xK_3"])
def test_upper_bounds_hold(text):
    g = build_full(parse_spec(text))
    alpha = max_independent_set(g).value
    ir = upper_irredundance(g).value
    bounds = irredundance_bounds(g, alpha)
    assert bounds["alpha+2^n"] == alpha + 2 ** g.n
    assert all(ir <= b for b in bounds.values())
    t_n = min(g.part_counts)
    assert Fraction(ir) <= Fraction(t_n * t_n, 2 * t_n - 1) * alpha


def balanced_family(max_order: int, max_vertices: int) -> list[list[tuple[int, int]]]:
    """Every multiset of factors K[u,t] with t >= 2, u*t <= max_order and product <= max_vertices."""
    facs = [(u, t) for t in range(2, max_order + 1) for u in range(1, max_order // t + 1)]
    out = []

    def rec(i, prefix, prod):
        if prefix:
            out.append(list(prefix))
        for k in range(i, len(facs)):
            u, t = facs[k]
            if prod * u * t <= max_vertices:
                rec(k, prefix + [(u, t)], prod * u * t)

    rec(0, [], 1)
    return out


def test_alpha_formula_on_enumerated_family():
    from domiso.graph import ProductSpec, format_spec

    family = balanced_family(8, 4096)
    assert len(family) == 6267
    wrong = []
    for pairs in family:
        spec = ProductSpec.balanced_product(pairs)
        rep = max_independent_set(build_full(spec), budget=4096, timeout=30)
        if not rep.optimal or rep.value != alpha_formula(spec) or not rep.witness.is_independent():
            wrong.append(format_spec(spec))
    assert wrong == []
