from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from domiso.certificates import (classify, cutoffs, enumerate_exceptions, epsilon0, listing_key,
                                 threshold)
from domiso.errors import PreconditionError
from domiso.graph import ProductSpec, format_spec, parse_spec
from reference_lists import LISTED


@pytest.fixture(scope="module")
def records():
    return enumerate_exceptions()


def test_listed_count():
    assert len(LISTED) == 37 and len({parse_spec(s) for s in LISTED}) == 37


def test_enumeration_equals_list(records):
    exc = [r for r in records if r.verdict == "exceptional"]
    special = [r for r in records if r.verdict == "special-case"]
    assert {r.spec for r in exc} == {parse_spec(s) for s in LISTED}
    assert len(exc) == 37
    assert [r.spec for r in special] == [parse_spec("K_3^7")]


def test_enumeration_order(records):
    names = [r.name for r in records if r.verdict == "exceptional"]
    assert names == LISTED
    assert records[-1].verdict == "special-case"


def test_epsilon0_examples():
    assert epsilon0(parse_spec("K_3^4")) == Fraction(16, 27)
    assert epsilon0(parse_spec("K_3^7")) == Fraction(128, 729)
    assert epsilon0(parse_spec("K_4^3xK_3^2")) == Fraction(1, 6)
    with pytest.raises(PreconditionError):
        epsilon0(parse_spec("K(2,1)xK_3"))


@given(st.lists(st.tuples(st.integers(1, 4), st.integers(3, 9)), min_size=1, max_size=7))
def test_epsilon0_closed_forms(pairs):
    spec = ProductSpec.balanced_product(pairs)
    t_n = min(spec.part_counts)
    assert epsilon0(spec) == Fraction(2**spec.n * t_n, spec.vertex_count)


def test_epsilon0_strictly_monotone():
    rng = random.Random(7)
    for _ in range(2000):
        n = rng.randint(1, 7)
        pairs = [(rng.randint(1, 4), rng.randint(3, 9)) for _ in range(n)]
        spec = ProductSpec.balanced_product(pairs).t_desc()
        base = epsilon0(spec)
        pairs = [(f.u, f.t) for f in spec.factors]
        i = rng.randrange(n)
        bumped_u = list(pairs)
        bumped_u[i] = (pairs[i][0] + 1, pairs[i][1])
        assert epsilon0(ProductSpec.balanced_product(bumped_u)) < base
        if i < n - 1:
            bumped_t = list(pairs)
            bumped_t[i] = (pairs[i][0], pairs[i][1] + 1)
            assert epsilon0(ProductSpec.balanced_product(bumped_t)) < base


def test_epsilon0_ratio_algebra():
    # raising u_i multiplies eps0 by u_i/(u_i+1); raising t_i (i < n) by t_i/(t_i+1)
    spec = parse_spec("K[2,5]xK_4xK_3^2")
    e = epsilon0(spec)
    assert epsilon0(parse_spec("K[3,5]xK_4xK_3^2")) == e * Fraction(2, 3)
    assert epsilon0(parse_spec("K[2,6]xK_4xK_3^2")) == e * Fraction(5, 6)
    assert epsilon0(parse_spec("K[2,5]xK_4xK_3xK_4")) == epsilon0(parse_spec("K[2,5]xK_4^2xK_3"))


def test_classify_examples():
    r = classify(parse_spec("K_10xK_3^3"))
    assert r.verdict == "exceptional" and r.eps0 == Fraction(16, 90)
    assert classify(parse_spec("K_11xK_3^3")).verdict == "passes"
    assert classify(parse_spec("K_3^7")).verdict == "special-case"
    assert classify(parse_spec("K_3^8")).verdict == "passes"
    with pytest.raises(PreconditionError):
        classify(parse_spec("K_3^3"))


def test_tight_case():
    r = classify(parse_spec("K_4^3xK_3^2"))
    assert r.verdict == "exceptional"
    thr = threshold(3)
    assert thr.width <= Fraction(1, 10**6)
    assert thr.hi <= Fraction(1, 6)
    assert Fraction(1, 6) - thr.hi > Fraction(3, 10**4)


def test_threshold_decimal():
    thr = threshold(3)
    assert abs(float(thr.mid) - 0.166285) <= 5e-7


@pytest.mark.parametrize("n, expect", [(4, (10, 3)), (5, (7, 2)), (6, (4, 1)), (7, (3, 1))])
def test_cutoffs_are_tight(n, expect):
    t_max, u_max = cutoffs(n)
    assert (t_max, u_max) == expect
    rest = "xK_3" * (n - 1)
    assert classify(parse_spec(f"K_{t_max + 1}{rest}")).verdict == "passes"
    assert classify(parse_spec(f"K_{t_max}{rest}")).verdict != "passes"
    assert classify(parse_spec(f"K[{u_max + 1},3]{rest}")).verdict == "passes"
    assert classify(parse_spec(f"K[{u_max},3]{rest}")).verdict != "passes"


def test_nothing_fails_for_n_at_least_8():
    for n in range(8, 14):
        assert classify(parse_spec(f"K_3^{n}")).verdict == "passes"


def test_records_serialise(records):
    js = records[0].to_json()
    assert js["spec"] == "K_3^4" and js["eps0"] == "16/27" and js["n"] == 4
    assert js["canonical"] == [[1, 1, 1]] * 4
    assert set(js["threshold"]) == {"lo", "hi", "bits"}


def test_listing_key_orders_by_n_first():
    assert listing_key(parse_spec("K_10xK_3^3")) < listing_key(parse_spec("K_3^5"))
    assert format_spec(parse_spec("K_3xK_10xK_3^2").t_desc()) == "K_10xK_3^3"
    assert math.prod(parse_spec("K[2,3]xK_3^3").part_counts) == 81
