import itertools
import random

import pytest
from oracles import oracle_mul, truncate_series

from skewpower import (
    INF,
    PrecisionError,
    SeriesRing,
    SkewData,
    SkewPolyRing,
    TruncSeries,
    as_filtered_ring,
    build_quantum_plane,
    conjugate_by_z,
    convert_side_series,
    extend_tau_series,
    invert_one_plus,
    j_valuation,
    limit_of_sequence,
    spoly_mul,
    ts_mul,
)
from skewpower.filtered import span_valuation
from skewpower.series import coefficient_dump, embed_poly, render
from skewpower.skewpoly import RIGHT


@pytest.fixture(scope="module")
def plane():
    return build_quantum_plane(5, 2, 6)


@pytest.fixture(scope="module")
def T_iw4(iwasawa):
    return SeriesRing(iwasawa[1], 4)


def gens(T):
    return {k: TruncSeries(T, v) for k, v in T.generators().items()}


def test_quantum_plane_commutation(plane):
    g = gens(plane)
    y, x = g["y"], g["x"]
    assert y * x == 2 * (x * y)
    assert y * x - 2 * (x * y) == TruncSeries(plane, plane.zero)
    P = SkewPolyRing(plane.skew)
    exact = spoly_mul(P.gen(), P.constant(plane.base.y))
    assert embed_poly(plane, exact) == y * x


def test_geometric_series_trivial(T64):
    one = TruncSeries(T64, T64.one)
    y = TruncSeries(T64, T64.y)
    geometric = T64([1] * T64.N)
    assert geometric * (one - y) == one


def test_product_is_well_defined_on_classes(iwasawa):
    """Lifting coefficients and multiplying exactly in S gives the same class."""
    R, s = iwasawa
    N = 3
    T = SeriesRing(s, N)
    rng = random.Random(7)
    for _ in range(100):
        a = [R.random_element(rng) for _ in range(N)]
        b = [R.random_element(rng) for _ in range(N)]
        a_lift = [R.add(c, R.mul(R.random_element(rng), R.monomial((N - k,)))) for k, c in enumerate(a)]
        b_lift = [R.add(c, R.mul(R.random_element(rng), R.monomial((N - k,)))) for k, c in enumerate(b)]
        exact = oracle_mul(R, s.tau, s.delta, a_lift, b_lift)
        assert T.mul(T.from_coeffs(a), T.from_coeffs(b)) == truncate_series(R, exact, N)


def test_precision_mismatch(zmod8):
    _, s = zmod8
    f = TruncSeries(SeriesRing(s, 3), SeriesRing(s, 3).one)
    g = TruncSeries(SeriesRing(s, 4), SeriesRing(s, 4).one)
    with pytest.raises(PrecisionError):
        ts_mul(f, g)


def test_j_valuation_examples(T64):
    assert j_valuation(T64([0, 2])) == 2
    assert j_valuation(T64([1])) == 0
    assert j_valuation(T64([0, 0, 2])) == INF
    assert j_valuation(T64([0, 0, 1])) == 2


def test_j_valuation_separated(T64):
    for a in T64.elements():
        assert (j_valuation(TruncSeries(T64, a)) == INF) == (a == T64.zero)


def test_neumann_examples(T64):
    y = TruncSeries(T64, T64.y)
    assert invert_one_plus(y).coeffs == T64.from_coeffs([1, -1, 1])
    assert invert_one_plus(T64([0])) == T64([1])
    with pytest.raises(PrecisionError, match="j_valuation"):
        invert_one_plus(T64([1]))


def test_neumann_random(T64):
    rng = random.Random(8)
    one = T64([1])
    for _ in range(100):
        g = T64([2 * rng.randrange(4), rng.randrange(4), rng.randrange(2)])
        assert (one + g) * invert_one_plus(g) == one
        assert invert_one_plus(g) * (one + g) == one


def test_conjugate_by_z_examples(iwasawa, T_iw4):
    R, _ = iwasawa
    x = T_iw4([R.parse("x")])
    assert conjugate_by_z(x) == T_iw4([R.parse("x + x^2")])
    y = TruncSeries(T_iw4, T_iw4.y)
    assert conjugate_by_z(y) == y
    assert conjugate_by_z(T_iw4([R.one])) == T_iw4([R.one])


def test_conjugate_by_z_rejects_other_delta(plane):
    with pytest.raises(ValueError, match="tau - id"):
        conjugate_by_z(TruncSeries(plane, plane.one))


def test_convert_side_series_example(iwasawa, T_iw4):
    R, _ = iwasawa
    f = T_iw4([R.zero, R.parse("x")], RIGHT)
    assert convert_side_series(f, "right-to-left") == T_iw4([R.parse("x^2"), R.parse("x + x^2")])


def test_convert_side_series_trivial(T64):
    f = T64([3, 1, 1])
    assert convert_side_series(f, "left-to-right").coeffs == f.coeffs


def test_convert_side_series_round_trip(T_iw4, plane):
    rng = random.Random(9)
    for T in (T_iw4, plane):
        for _ in range(200):
            f = TruncSeries(T, T.random_element(rng))
            assert convert_side_series(convert_side_series(f, "left-to-right"), "right-to-left") == f


def test_extend_tau_q_one(iwasawa, T_iw4):
    R, s = iwasawa
    rng = random.Random(10)
    for _ in range(50):
        f = TruncSeries(T_iw4, T_iw4.random_element(rng))
        assert extend_tau_series(f).coeffs == T_iw4.from_coeffs([s.tau(c) for c in f.coeffs])
    y = TruncSeries(T_iw4, T_iw4.y)
    assert extend_tau_series(y) == y


@pytest.mark.parametrize("q", [1, 3])
def test_extend_tau_multiplicative(plane, q):
    rng = random.Random(q)
    qq = plane.base.from_int(q)
    for _ in range(100):
        f = TruncSeries(plane, plane.random_element(rng))
        g = TruncSeries(plane, plane.random_element(rng))
        assert extend_tau_series(f * g, qq) == extend_tau_series(f, qq) * extend_tau_series(g, qq)


def test_extend_tau_preserves_j_valuation(T_iw4, plane):
    for T in (T_iw4, plane):
        for k in range(T.N):
            for e in _basis_exponents(T.base):
                mono = TruncSeries(T, T.monomial_term(T.base.monomial(e), k))
                assert j_valuation(extend_tau_series(mono)) == j_valuation(mono)


def _basis_exponents(R):
    n = len(R.generators())
    return [e for e in itertools.product(range(R.precision_cap), repeat=n) if sum(e) < R.precision_cap]


def test_as_filtered_ring_size_and_valuation(zmod8):
    R, s = zmod8
    T = as_filtered_ring(R, s, 3)
    elems = list(T.elements())
    assert len(elems) == 64 == 2**3 * 2**2 * 2
    for a in elems:
        assert span_valuation(T, a) == j_valuation(TruncSeries(T, a))


def test_iterated_trivial_layer_is_commutative(T64):
    T2 = SeriesRing(SkewData.trivial(T64), 2, var="w")
    rng = random.Random(13)
    for _ in range(2000):
        a, b = T2.random_element(rng), T2.random_element(rng)
        assert T2.mul(a, b) == T2.mul(b, a)


def test_limit_of_sequence(zmod8):
    _, s = zmod8
    T = SeriesRing(s, 4)
    f = T([1, 2, 3])
    assert limit_of_sequence([f, f, f]) == f
    partial = [T([1] * m) for m in range(1, 6)]
    assert limit_of_sequence(partial) == T([1, 1, 1, 1])


def test_limit_with_coefficientwise_drift(zmod8):
    _, s = zmod8
    T = SeriesRing(s, 3)
    # a_0 drifts by 2, then 4: differences lie in j^1, j^2, then vanish
    seq = [T([1, 1]), T([3, 1]), T([7, 1]), T([7, 1])]
    assert limit_of_sequence(seq) == T([7, 1])


def test_limit_rejects_non_cauchy(zmod8):
    _, s = zmod8
    T = SeriesRing(s, 3)
    with pytest.raises(ValueError, match="index 2"):
        limit_of_sequence([T([0]), T([4]), T([5]), T([5])])
    with pytest.raises(ValueError, match="not stabilized"):
        limit_of_sequence([T([0]), T([1])])


def test_embedding_is_ring_map(iwasawa, T_iw4):
    R, s = iwasawa
    P = SkewPolyRing(s)
    rng = random.Random(14)
    for _ in range(100):
        f = P([R.random_element(rng) for _ in range(3)])
        g = P([R.random_element(rng) for _ in range(3)])
        assert embed_poly(T_iw4, f) * embed_poly(T_iw4, g) == embed_poly(T_iw4, f * g)


def test_render_and_dump(T64):
    assert render(T64([1])) == "1 + O(j^3)"
    assert render(T64([0])) == "0 + O(j^3)"
    dump = coefficient_dump(T64([5, 3, 1]))
    assert [d["modulus_exponent"] for d in dump] == [3, 2, 1]
    assert [d["residue"] for d in dump] == ["5", "3", "1"]


def test_series_ring_associativity_sampled(T_iw4):
    rng = random.Random(15)
    for _ in range(10_000):
        a, b, c = (T_iw4.random_element(rng) for _ in range(3))
        assert T_iw4.mul(T_iw4.mul(a, b), c) == T_iw4.mul(a, T_iw4.mul(b, c))
