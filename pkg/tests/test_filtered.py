import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewpower import (
    INF,
    ProductRing,
    RingError,
    SkewData,
    TruncPoly,
    ZMod,
    build_truncpoly,
    leading_form,
    validate_skew_data,
    valuation,
)
from skewpower.filtered import ideal_power_set, span_valuation


@pytest.fixture(scope="module")
def Z8():
    return ZMod(2, 3)


@pytest.fixture(scope="module")
def F2x4():
    return TruncPoly(2, 4)


def test_valuation_examples(Z8, F2x4):
    assert valuation(Z8, 4) == 2
    assert valuation(Z8, 0) == INF
    assert valuation(F2x4, F2x4.parse("x^2 + x^3")) == 2


def test_leading_form_examples(Z8, F2x4):
    lf = leading_form(Z8, 6)
    assert lf.degree == 1
    # i/i^2 = {2, 6} mod 4: the class of 6 is the class of 2
    assert (lf.residue - 6) % 4 == 0
    assert leading_form(Z8, 1).degree == 0 and leading_form(Z8, 1).residue == 1
    lf = leading_form(F2x4, F2x4.parse("x + x^3"))
    assert lf.degree == 1 and lf.residue == F2x4.reduce(F2x4.parse("x"), 2)
    assert leading_form(Z8, 0).degree == INF


def test_ideal_powers_and_cap(Z8, F2x4):
    assert ideal_power_set(Z8, 1) == frozenset({0, 2, 4, 6})
    assert ideal_power_set(Z8, 3) == frozenset({0})
    assert len(ideal_power_set(F2x4, 2)) == 4
    assert ideal_power_set(F2x4, 4) == frozenset({F2x4.zero})


@pytest.mark.parametrize("ring", [ZMod(2, 3), ZMod(3, 2), TruncPoly(2, 4), TruncPoly(3, 3)], ids=str)
def test_span_valuation_matches_closed_form(ring):
    for a in ring.elements():
        assert span_valuation(ring, a) == ring.valuation(a)


@pytest.mark.parametrize("ring", [ZMod(2, 3), TruncPoly(2, 4)], ids=str)
def test_valuation_subadditive_exhaustive(ring):
    for a, b in itertools.product(list(ring.elements()), repeat=2):
        va, vb = ring.valuation(a), ring.valuation(b)
        vab = ring.valuation(ring.mul(a, b))
        assert vab >= min(va + vb, ring.precision_cap) or vab == INF
        assert ring.valuation(ring.add(a, b)) >= min(va, vb)


@pytest.mark.parametrize("ring", [ZMod(2, 3), ZMod(5, 2), TruncPoly(2, 4)], ids=str)
def test_leading_forms_multiply(ring):
    for a, b in itertools.product(list(ring.elements()), repeat=2):
        va, vb = ring.valuation(a), ring.valuation(b)
        if va == INF or vb == INF or va + vb >= ring.precision_cap:
            continue
        d = va + vb
        graded_product = ring.reduce(ring.mul(a, b), d + 1)
        if graded_product != ring.zero:
            assert leading_form(ring, ring.mul(a, b)).degree == d


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 242), st.integers(0, 242))
def test_zmod_valuation_properties(a, b):
    R = ZMod(3, 5)
    va, vb = R.valuation(a), R.valuation(b)
    assert R.valuation(R.mul(a, b)) >= min(va + vb, 5)
    assert R.valuation(R.add(a, b)) >= min(va, vb)
    assert (va == INF) == (a == 0)


def test_validate_trivial(Z8):
    report = validate_skew_data(Z8, SkewData.trivial(Z8))
    assert report.ok and report.exhaustive


def test_validate_tau_minus_id():
    R, s = build_truncpoly(2, 4, "x + x^2", "tau-minus-id")
    report = validate_skew_data(R, s)
    assert report.ok and report.exhaustive
    x = R.parse("x")
    assert s.delta(x) == R.parse("x^2")
    assert R.valuation(s.delta(x)) >= 2
    for a in R.elements():
        assert s.tau(s.tau(a)) == a


def test_validate_reports_bad_delta_with_witness():
    R, s = build_truncpoly(2, 4, "x", "1", strict=False)
    report = validate_skew_data(R, s)
    assert not report.ok
    check = report["delta-into-i"]
    assert not check.passed
    assert check.witness == (R.parse("x"),)


def test_validate_raises_only_on_out_of_domain(Z8):
    bad = SkewData(Z8, lambda a: a + 100, None, lambda a: 0)
    with pytest.raises(RingError):
        validate_skew_data(Z8, bad)


def test_product_ring_basics():
    R = ProductRing(2, 2)
    assert R.size() == 4
    assert R.mul((1, 0), (0, 1)) == R.zero
