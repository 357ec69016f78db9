import pytest

from skewpower import SeriesRing, build_truncpoly, build_zmod
from skewpower.config import build_tower, parse_config
from skewpower.suites import SUITES, delta_bar_vanishes, graded_rule_witness, run_suite

INSTANCES = {
    "Z/8": lambda: build_zmod(2, 3),
    "F2[x]/(x^4) tau-minus-id": lambda: build_truncpoly(2, 4, "x + x^2", "tau-minus-id"),
    "F3[x]/(x^3) tau(x)=2x": lambda: build_truncpoly(3, 3, "2*x"),
}


@pytest.mark.parametrize("name", INSTANCES)
@pytest.mark.parametrize("N", [3, 4])
def test_graded_rule_with_delta_bar_always_holds(name, N):
    _, s = INSTANCES[name]()
    assert graded_rule_witness(SeriesRing(s, N)) is None


@pytest.mark.parametrize("name", INSTANCES)
def test_tau_bar_only_rule_iff_delta_bar_vanishes(name):
    _, s = INSTANCES[name]()
    T = SeriesRing(s, 3)
    assert (graded_rule_witness(T, tau_bar_only=True) is None) == delta_bar_vanishes(T)


def test_delta_bar_nonzero_on_tau_minus_id():
    _, s = INSTANCES["F2[x]/(x^4) tau-minus-id"]()
    T = SeriesRing(s, 3)
    assert not delta_bar_vanishes(T)
    assert "gr((y)*(x))" in graded_rule_witness(T, tau_bar_only=True)


def test_every_suite_runs_on_z8():
    text = "[base]\nfamily = zmod\np = 2\nm = 3\n[layer]\nN = 3\n"
    tower = build_tower(parse_config(text))
    for name in SUITES:
        records = run_suite(tower, name)
        assert records, name
        assert all(r.status in ("pass", "skipped") for r in records), (name, records)
        assert [r.case for r in records] == sorted(r.case for r in records)


def test_unknown_suite():
    tower = build_tower(parse_config("[base]\nfamily = zmod\np = 2\nm = 3\n"))
    with pytest.raises(KeyError):
        run_suite(tower, "no-such-suite")
