from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from domiso.errors import BudgetExceeded, HypothesisViolation, PreconditionError
from domiso.graph import build_collapsed, parse_spec
from domiso.isoperimetry import (check_recursion_hypothesis, corollary1_bound, corollary1_holds,
                                 nested_optimum_witness, profile_eval, profile_oracle,
                                 profile_steps)
from domiso.setops import boundary, fiber

F = Fraction


def brute_profile(text: str, nu: Fraction) -> Fraction:
    """Minimum boundary weight over subsets of weight at least nu, by plain loops."""
    g = build_collapsed(parse_spec(text).beta_asc())
    N = g.size
    w = [g.weight(v) for v in range(N)]
    nbr = g.neighbor_masks()
    best = F(1)
    for mask in range(1 << N):
        if sum(w[v] for v in range(N) if mask >> v & 1) < nu:
            continue
        b = 0
        for v in range(N):
            if mask >> v & 1:
                b |= nbr[v]
        best = min(best, sum(w[v] for v in range(N) if b >> v & 1))
    return best


def test_hypothesis_examples():
    assert check_recursion_hypothesis(parse_spec("K_3^2xK[2,4]")).holds
    assert check_recursion_hypothesis(parse_spec("K(3,1)xK(5,1)")).holds
    bad = check_recursion_hypothesis(parse_spec("K(3,1)^3"))
    assert not bad.holds and bad.witness == frozenset({1, 2})
    assert bad.lhs == F(1, 9) and bad.rhs == F(1, 3)


def test_hypothesis_holds_when_first_ratios_small():
    assert check_recursion_hypothesis(parse_spec("K(2,1,1)xK(2,1)xK(3,1)")).holds


def test_profile_examples():
    assert profile_eval(parse_spec("K_3"), F(1, 3)) == F(2, 3)
    assert profile_eval(parse_spec("K_3^2"), F(1, 9)) == F(4, 9)
    assert profile_eval(parse_spec("K_3^2"), F(1, 2)) == F(8, 9)
    assert profile_eval(parse_spec("K_3^2"), 0) == 0


def test_profile_errors():
    with pytest.raises(HypothesisViolation):
        profile_eval(parse_spec("K(3,1)^3"), F(1, 2))
    with pytest.raises(PreconditionError):
        profile_eval(parse_spec("K_3"), F(3, 2))


def test_step_examples():
    assert profile_steps(parse_spec("K_3")).steps == ((F(1, 3), F(2, 3)), (F(1), F(1)))
    assert profile_steps(parse_spec("K_3^2")).steps == (
        (F(1, 9), F(4, 9)), (F(1, 3), F(2, 3)), (F(5, 9), F(8, 9)), (F(1), F(1)))
    st43 = profile_steps(parse_spec("K_4xK_3"))
    assert len(st43.steps) == 4 and st43.steps[0] == (F(1, 12), F(1, 2))


@pytest.mark.parametrize("text", ["K_3", "K_4xK_3", "K(2,1)xK_3", "K_2^3", "K(3,1)xK_3", "K_3^2"])
def test_steps_match_brute_force(text):
    steps = profile_steps(parse_spec(text))
    for nu in steps.probe_points():
        assert steps(nu) == profile_eval(parse_spec(text), nu) == brute_profile(text, nu)


@settings(max_examples=60)
@given(st.sampled_from(["K_3^2", "K_4xK_3", "K(2,1)xK_3", "K_2^2xK_3", "K[2,3]xK_4"]),
       st.fractions(0, 1, max_denominator=50))
def test_oracle_matches_recursion(text, nu):
    spec = parse_spec(text)
    res = profile_oracle(spec, nu)
    assert res.value == profile_eval(spec, nu)
    assert res.witness_measure >= nu
    assert boundary(res.witness).measure() == res.value


def test_step_invariants():
    for text in ["K_3^2", "K_4xK_3", "K(2,1)xK[2,3]xK_4"]:
        steps = profile_steps(parse_spec(text))
        th, vals = steps.thresholds, steps.values
        assert th == sorted(set(th)) and th[-1] == 1
        assert vals == sorted(vals) and vals[-1] == 1
        assert len(th) <= 2 ** parse_spec(text).n


def test_oracle_examples():
    r = profile_oracle(parse_spec("K_3"), F(1, 3))
    assert r.value == F(2, 3) and len(r.witness) == 1
    r = profile_oracle(parse_spec("K_3^2"), F(1, 9))
    assert r.value == F(4, 9) and len(r.witness) == 1
    r = profile_oracle(parse_spec("K_3^2"), F(1, 3))
    g = r.witness.graph
    assert r.value == F(2, 3)
    assert any(r.witness == fiber(g, a, j) for j in (1, 2) for a in (1, 2, 3))


def test_oracle_selects_heaviest_minimiser():
    # among all sets with the minimal boundary the witness has the largest measure
    spec = parse_spec("K_4xK_3")
    r = profile_oracle(spec, F(1, 12))
    g = build_collapsed(spec.beta_asc())
    nbr = g.neighbor_masks()
    heaviest = F(0)
    for mask in range(1 << g.size):
        b = 0
        for v in range(g.size):
            if mask >> v & 1:
                b |= nbr[v]
        if F(bin(b).count("1"), g.size) == r.value:
            heaviest = max(heaviest, F(bin(mask).count("1"), g.size))
    assert r.witness_measure == heaviest


def test_oracle_budget():
    with pytest.raises(BudgetExceeded):
        profile_oracle(parse_spec("K_5^2"), F(1, 2))


def test_oracle_runs_without_hypothesis():
    r = profile_oracle(parse_spec("K(3,1)^3"), F(1, 3))
    assert r.value == brute_profile("K(3,1)^3", F(1, 3))


@pytest.mark.parametrize("nu", [F(1, 9), F(1, 3), F(5, 9)])
def test_nested_examples(nu):
    spec = parse_spec("K_3^2")
    W = nested_optimum_witness(spec, nu)
    assert W is not None
    J = fiber(W.graph, 1, 2)
    assert W.issubset(J) or J.issubset(W)
    opt = profile_oracle(spec, nu)
    assert W.measure() == opt.witness_measure and boundary(W).measure() == opt.value
    if nu == F(1, 3):
        assert W == J
    if nu == F(1, 9):
        assert len(W) == 1 and W.issubset(J)


def test_power_bound_examples():
    assert corollary1_bound(1, F(1, 3)).lo == 1
    x = corollary1_bound(F(1, 3), F(1, 3))
    assert x.contains(F(2, 3))
    y = corollary1_bound(F(1, 9), F(1, 3))
    assert y.contains(F(4, 9)) and y.width <= F(1, 10**12)
    assert corollary1_bound(0, F(1, 3)).is_exact
    with pytest.raises(PreconditionError):
        corollary1_bound(F(1, 2), F(2, 3))


def test_power_bound_matches_float():
    import math

    for nu, beta in [(F(1, 7), F(1, 4)), (F(2, 5), F(1, 3)), (F(9, 10), F(2, 5))]:
        approx = float(nu) ** (math.log(1 - beta) / math.log(beta))
        assert abs(float(corollary1_bound(nu, beta).mid) - approx) < 1e-12


@settings(max_examples=200)
@given(st.sampled_from(["K_3^2", "K_4xK_3", "K_3^3", "K_5xK_4xK_3", "K[2,3]xK_4"]),
       st.fractions(F(1, 1000), 1, max_denominator=1000))
def test_profile_above_power_bound(text, nu):
    assert corollary1_holds(parse_spec(text), nu)


def test_power_bound_thousand_samples():
    import random

    rng = random.Random(11)
    specs = [parse_spec(s) for s in ["K_3^2", "K_4xK_3", "K_3^3", "K[2,4]xK_3", "K_5^2xK_4"]]
    for k in range(1000):
        nu = F(rng.randint(1, 999), 1000)
        assert corollary1_holds(specs[k % len(specs)], nu)
