"""Verification suites run by the command line tool.

Each suite takes a built Tower and returns Records.  A case that cannot run
within the configured budgets is "skipped", never "fail"; so is a case whose
hypotheses the tower does not meet (say, z-conjugation without
delta = tau - id), with the reason in the witness.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import ideals as il
from .config import Tower
from .filtered import INF, FilteredRing, validate_skew_data
from .series import (
    PrecisionError,
    SeriesRing,
    TruncSeries,
    conjugate_by_z,
    convert_side_series,
    extend_tau_series,
    invert_one_plus,
    j_valuation,
)
from .skewpoly import SkewPolyRing, theta


class Skip(Exception):
    """Raised inside a case to mark it skipped."""


@dataclass
class Record:
    suite: str
    case: str
    status: str
    witness: str | None = None
    micros: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


class _Run:
    def __init__(self, suite: str):
        self.suite = suite
        self.records: list[Record] = []

    def case(self, name: str, fn: Callable[[], object]) -> None:
        """fn returns None on success or a witness describing the failure."""
        start = time.perf_counter()
        try:
            witness = fn()
            status = "pass" if witness is None else "fail"
        except (Skip, il.BudgetExceeded) as exc:
            status, witness = "skipped", str(exc)
        micros = int((time.perf_counter() - start) * 1e6)
        self.records.append(Record(self.suite, name, status, None if witness is None else str(witness), micros))


def _skip(reason: str):
    raise Skip(reason)


def _series(tower: Tower) -> SeriesRing:
    T = tower.top
    if not isinstance(T, SeriesRing):
        raise Skip("needs at least one series layer")
    return T


def _elements_of(R: FilteredRing, budget: dict, seed: int = 0) -> tuple[list, bool]:
    """All elements when within the sample budget, else a seeded sample."""
    try:
        n = R.size()
    except NotImplementedError:
        n = None
    if n is not None and n <= max(budget["samples"], budget["elements"]):
        return list(R.elements()), True
    rng = random.Random(seed)
    return [R.random_element(rng) for _ in range(budget["samples"])], False


def _table(tower: Tower, R: FilteredRing) -> il.RingTable:
    cache = tower.__dict__.setdefault("_tables", {})
    if id(R) not in cache:
        cache[id(R)] = il.RingTable(R, tower.budget["elements"])
    return cache[id(R)]


def _lab(tower: Tower) -> il.SeriesLab:
    T = _series(tower)
    if "_lab" not in tower.__dict__:
        if T.skew.q is None:
            raise Skip("needs a commutation scalar q to extend tau")
        tower.__dict__["_lab"] = il.SeriesLab(T, tower.budget["elements"])
    return tower.__dict__["_lab"]


# ---------------------------------------------------------------------------


def suite_ring_axioms(tower: Tower) -> list[Record]:
    run = _Run("ring-axioms")
    R = tower.top
    budget = tower.budget

    def exhaustive():
        tab = _table(tower, R)
        M, A = tab.mul, tab.add
        checks = {
            "associativity": (M[M], M[:, M]),
            "left-distributivity": (M[:, A], A[M[:, :, None], M[:, None, :]]),
            "right-distributivity": (M[A], A[M[:, None, :], M[None, :, :]]),
        }
        out = []
        for name, (lhs, rhs) in checks.items():
            bad = np.argwhere(lhs != rhs)
            if len(bad):
                a, b, c = (tab.elements[k] for k in bad[0])
                out.append(f"{name} at ({R.format(a)}, {R.format(b)}, {R.format(c)})")
        one = tab.one
        if not (np.array_equal(M[one], np.arange(tab.n)) and np.array_equal(M[:, one], np.arange(tab.n))):
            out.append("unit law")
        return "; ".join(out) or None

    def sampled():
        rng = random.Random(budget["seed"])
        for _ in range(budget["samples"]):
            a, b, c = (R.random_element(rng) for _ in range(3))
            if R.mul(R.mul(a, b), c) != R.mul(a, R.mul(b, c)):
                return f"associativity at ({R.format(a)}, {R.format(b)}, {R.format(c)})"
            if R.mul(a, R.add(b, c)) != R.add(R.mul(a, b), R.mul(a, c)):
                return f"left-distributivity at ({R.format(a)}, {R.format(b)}, {R.format(c)})"
            if R.mul(R.add(a, b), c) != R.add(R.mul(a, c), R.mul(b, c)):
                return f"right-distributivity at ({R.format(a)}, {R.format(b)}, {R.format(c)})"
        return None

    try:
        small = R.size() <= budget["elements"]
    except NotImplementedError:
        small = False
    if small:
        run.case(f"exhaustive-{R.size()}", exhaustive)
    else:
        run.case(f"sampled-{budget['samples']}", sampled)
    return run.records


def suite_skew_data(tower: Tower) -> list[Record]:
    run = _Run("skew-data")
    if not tower.layers:
        run.case("layers", lambda: _skip("no series layers"))
    for T in tower.layers:
        report = validate_skew_data(T.skew.ring, T.skew, tower.budget["validation"], tower.budget["seed"])
        for check in report.checks:
            run.case(
                f"{T.var}:{check.law}",
                lambda c=check: None if c.passed else f"witness {c.witness}",
            )
    return run.records


def _iterated_y_times(P: SkewPolyRing, r, i: int):
    """y^i r by i single steps y*(...), each using only tau and delta."""
    f = P.constant(r)
    y = P.gen()
    for _ in range(i):
        f = y * f
    return f


def suite_theta(tower: Tower) -> list[Record]:
    run = _Run("theta")
    T = _series(tower)
    s = T.skew
    R = s.ring
    elems, _ = _elements_of(R, tower.budget, tower.budget["seed"])
    top = min(5, s.max_order)

    def containment():
        for i in range(top + 1):
            for k in range(i + 1):
                for r in elems:
                    v = R.valuation(theta(s, i, k, r))
                    if v < min(i - k, R.precision_cap) and v != INF:
                        return f"theta_{i},{k}({R.format(r)}) has valuation {v} < {i - k}"
        return None

    def expansion():
        P = SkewPolyRing(s)
        for r in elems:
            for i in range(top + 1):
                lhs = _iterated_y_times(P, r, i)
                rhs = P([theta(s, i, k, r) for k in range(i + 1)])
                if lhs.coeffs != rhs.coeffs:
                    return f"y^{i}*{R.format(r)}: {lhs} vs {rhs}"
        return None

    run.case("containment-i<=5", containment)
    run.case("expansion-i<=5", expansion)
    return run.records


def suite_jt(tower: Tower) -> list[Record]:
    run = _Run("jt")
    T = _series(tower)
    B = T.base

    def check(ell):
        tab = _table(tower, T)
        j = il.filtration_ideal(tab)
        enumerated = il.ideal_power(j, ell)
        pools = [
            list({B.reduce(a, T.N - k) for a in il_power_set(B, max(ell - k, 0))}) if k < T.N else [B.zero]
            for k in range(T.N)
        ]
        structural = tab.mask(itertools.product(*pools))
        if not np.array_equal(enumerated.mask, structural):
            diff = np.flatnonzero(enumerated.mask != structural)[0]
            return f"sets differ at {T.format(tab.elements[diff])}"
        return None

    for ell in range(1, T.N + 1):
        run.case(f"ell-{ell}", lambda ell=ell: check(ell))
    return run.records


def il_power_set(R: FilteredRing, ell: int):
    """Elements of i^ell by valuation (the structural side of the comparison)."""
    return [a for a in R.elements() if R.valuation(a) >= ell]


def graded_rule_witness(T: SeriesRing, tau_bar_only: bool = False):
    """Compare gr(f)gr(g) with gr(fg) on all pairs of one-term series a y^k.

    The graded product is computed in (gr R)[y; tau_bar, delta_bar] by
    rewriting y c = tau(c) y + delta(c) on leading forms, where delta_bar
    raises the degree by one; with tau_bar_only the delta_bar terms are
    dropped.  Returns None or a description of the first mismatch.
    """
    s, R, N = T.skew, T.base, T.N
    monos = [(k, a) for k in range(N) for a in R.residues(N - k) if a != R.zero]

    def y_power_times(k, b):
        # y^k b = sum_n c_n y^n, with c_n homogeneous of degree v(b) + k - n
        terms = {0: b}
        for _ in range(k):
            new: dict = {}
            for n, c in terms.items():
                new[n + 1] = R.add(new.get(n + 1, R.zero), s.tau(c))
                if not tau_bar_only:
                    new[n] = R.add(new.get(n, R.zero), s.delta(c))
            terms = new
        return terms

    for (k, a), (l, b) in itertools.product(monos, repeat=2):
        d = k + R.valuation(a) + l + R.valuation(b)
        f, g = T.monomial_term(a, k), T.monomial_term(b, l)
        fg = T.mul(f, g)
        where = f"({T.format(f)})*({T.format(g)})"
        if d >= N:
            if fg != T.zero:
                return f"{where} should vanish mod j^{N}"
            continue
        if any(R.valuation(c) < d - m for m, c in enumerate(fg)):
            return f"{where} has j-valuation below {d}"
        pred = [R.zero] * N
        for n, c in y_power_times(k, b).items():
            m = n + l
            if m < N and m <= d:
                pred[m] = R.reduce(R.mul(a, c), min(d - m + 1, N - m))
        actual = [R.reduce(c, d - m + 1) if m <= d else R.zero for m, c in enumerate(fg)]
        if actual != pred:
            return f"gr({where}) = {T.format(tuple(actual))}, rule gives {T.format(tuple(pred))}"
    return None


def delta_bar_vanishes(T: SeriesRing) -> bool:
    """delta(i^v) inside i^(v+2) for every v, i.e. delta induces 0 on gr R."""
    R, s = T.base, T.skew
    for a in R.elements():
        v = R.valuation(a)
        if v == INF:
            continue
        if R.valuation(s.delta(a)) < min(v + 2, R.precision_cap):
            return False
    return True


def suite_graded(tower: Tower) -> list[Record]:
    run = _Run("graded")
    T = _series(tower)

    def full_rule():
        return graded_rule_witness(T)

    def tau_bar_rule():
        vanishes = delta_bar_vanishes(T)
        holds = graded_rule_witness(T, tau_bar_only=True) is None
        if vanishes != holds:
            return f"tau_bar-only rule holds={holds} but delta_bar vanishes={vanishes}"
        return None

    run.case("gr-R[y;tau_bar,delta_bar]", full_rule)
    run.case("gr-R[y;tau_bar]-iff-delta_bar=0", tau_bar_rule)
    return run.records


def suite_neumann(tower: Tower) -> list[Record]:
    run = _Run("neumann")
    T = _series(tower)
    y = TruncSeries(T, T.y)
    one = TruncSeries(T, T.one)

    def geometric():
        inv = invert_one_plus(y)
        expected = T([T.base.from_int((-1) ** k) for k in range(T.N)])
        if inv != expected:
            return f"inverse of 1+y is {inv}"
        if (one + y) * inv != one or inv * (one + y) != one:
            return "1+y times its inverse is not 1"
        return None

    def random_g():
        rng = random.Random(tower.budget["seed"])
        for _ in range(min(100, tower.budget["samples"])):
            rest = T.random_element(rng)[1:]
            g = T([_in_i(T.base, rng), *rest])
            inv = invert_one_plus(g)
            if (one + g) * inv != one or inv * (one + g) != one:
                return f"g = {g}"
        return None

    def precondition():
        try:
            invert_one_plus(one)
        except PrecisionError:
            return None
        return "accepted g = 1 outside j"

    run.case("one-plus-y", geometric)
    run.case("random-g-in-j", random_g)
    run.case("rejects-g-outside-j", precondition)
    return run.records


def _in_i(R: FilteredRing, rng: random.Random):
    if not R.ideal_generators:
        return R.zero
    g = rng.choice(R.ideal_generators)
    return R.mul(R.random_element(rng), g)


def suite_z_conjugation(tower: Tower) -> list[Record]:
    run = _Run("z-conjugation")
    T = _series(tower)
    s, R = T.skew, T.base

    def require():
        for r in _elements_of(R, tower.budget)[0]:
            if s.delta(r) != R.sub(s.tau(r), r):
                raise Skip(f"delta != tau - id at {R.format(r)}")

    def constants():
        require()
        for r in R.residues(T.N):
            c = conjugate_by_z(TruncSeries(T, T.constant(r)))
            if c.coeffs != T.constant(s.tau(r)):
                return f"z {R.format(r)} z^-1 = {c}"
        return None

    def fixes_y():
        require()
        c = conjugate_by_z(TruncSeries(T, T.y))
        return None if c.coeffs == T.y else f"z y z^-1 = {c}"

    def multiplicative():
        require()
        rng = random.Random(tower.budget["seed"])
        for _ in range(256):
            f = TruncSeries(T, T.random_element(rng))
            g = TruncSeries(T, T.random_element(rng))
            if conjugate_by_z(f * g) != conjugate_by_z(f) * conjugate_by_z(g):
                return f"f = {f}, g = {g}"
        return None

    def ideals_fixed():
        require()
        lab = _lab(tower)
        perm = il.conjugation_perm(lab)
        if len(np.unique(perm)) != lab.top.n:
            return "conjugation is not bijective"
        for I in il.all_ideals(lab.top):
            if not il.is_stable(I, perm):
                return f"ideal {I} moved"
        return None

    run.case("constants-map-to-tau", constants)
    run.case("fixes-y", fixes_y)
    run.case("multiplicative-256", multiplicative)
    run.case("every-ideal-fixed", ideals_fixed)
    return run.records


def suite_side_conversion(tower: Tower) -> list[Record]:
    run = _Run("side-conversion")
    T = _series(tower)
    seed, n = tower.budget["seed"], tower.budget["samples"]

    def round_trip():
        rng = random.Random(seed)
        for _ in range(n):
            f = TruncSeries(T, T.random_element(rng))
            back = convert_side_series(convert_side_series(f, "left-to-right"), "right-to-left")
            if back != f:
                return f"left->right->left moves {f} to {back}"
            g = TruncSeries(T, T.random_element(rng), "right")
            back = convert_side_series(convert_side_series(g, "right-to-left"), "left-to-right")
            if back != g:
                return f"right->left->right moves {g}"
        return None

    def ring_map():
        rng = random.Random(seed + 1)
        for _ in range(100):
            f = TruncSeries(T, T.random_element(rng))
            g = TruncSeries(T, T.random_element(rng))
            lhs = convert_side_series(f * g, "left-to-right")
            rhs = convert_side_series(f, "left-to-right") * convert_side_series(g, "left-to-right")
            if lhs != rhs:
                return f"f = {f}, g = {g}"
        return None

    run.case(f"round-trip-{n}", round_trip)
    run.case("ring-map-100", ring_map)
    return run.records


def suite_tau_extension(tower: Tower) -> list[Record]:
    run = _Run("tau-extension")
    T = _series(tower)
    s, R = T.skew, T.base

    def need_q():
        if s.q is None:
            raise Skip("no commutation scalar q")

    def y_image():
        need_q()
        img = extend_tau_series(TruncSeries(T, T.y))
        want = T.mul(T.constant(R.inverse(s.q)), T.y)
        return None if img.coeffs == want else f"tau(y) = {img}"

    def multiplicative():
        need_q()
        rng = random.Random(tower.budget["seed"])
        for _ in range(100):
            f = TruncSeries(T, T.random_element(rng))
            g = TruncSeries(T, T.random_element(rng))
            if extend_tau_series(f * g) != extend_tau_series(f) * extend_tau_series(g):
                return f"f = {f}, g = {g}"
        return None

    def valuations():
        need_q()
        for k in range(T.N):
            for a in R.residues(T.N - k):
                f = TruncSeries(T, T.monomial_term(a, k))
                if j_valuation(extend_tau_series(f)) != j_valuation(f):
                    return f"j-valuation moves on {f}"
        return None

    run.case("y-to-q^-1-y", y_image)
    run.case("multiplicative-100", multiplicative)
    run.case("preserves-j-valuation", valuations)
    return run.records


def suite_induced_ideals(tower: Tower) -> list[Record]:
    run = _Run("induced-ideals")
    lab = _lab(tower)
    for idx, Q in enumerate(lab.tau_delta_ideals()):

        def case(Q=Q):
            ind = il.induced_ideal_truncated(lab, Q)
            if not ind.three_way_equal:
                return f"left set, generated ideal and right set differ for Q = {Q.to_list()}"
            if il.contract(lab, ind.ideal).ideal != Q:
                return f"contraction of QT is not Q = {Q.to_list()}"
            return None

        run.case(f"Q{idx:02d}-size{Q.size}", case)
    return run.records


def suite_contraction(tower: Tower) -> list[Record]:
    run = _Run("contraction")
    lab = _lab(tower)
    for idx, I in enumerate(lab.tau_ideals_top()):

        def case(I=I):
            c = il.contract(lab, I)
            if not (c.tau_delta_stable and c.commutator_in_ideal):
                return f"contraction {c.ideal.to_list()} is not a tau-delta-ideal"
            if not I.is_whole and il.is_tau_prime(I, lab.ext_tau):
                if not il.is_tau_delta_prime(c.ideal, lab.tau, lab.delta):
                    return f"tau-prime contracts to non-tau-delta-prime {c.ideal.to_list()}"
            return None

        run.case(f"I{idx:03d}-size{I.size}", case)
    return run.records


def suite_cutting_down(tower: Tower) -> list[Record]:
    run = _Run("cutting-down")
    lab = _lab(tower)
    for idx, P in enumerate(il.primes(lab.top)):

        def case(P=P):
            c = il.contract(lab, P).ideal
            mins = il.minimal_primes_over(c)
            if not il.forms_single_orbit(mins, lab.tau):
                return f"minimal primes over {c.to_list()} are not one tau-orbit"
            return None

        run.case(f"P{idx:02d}-size{P.size}", case)
    return run.records


def suite_lying_over(tower: Tower) -> list[Record]:
    run = _Run("lying-over")
    lab = _lab(tower)
    tau_primes = [P for P in lab.tau_ideals_top() if il.is_tau_prime(P, lab.ext_tau)]
    for idx, Q in enumerate(lab.tau_delta_ideals()):
        if not il.is_tau_delta_prime(Q, lab.tau, lab.delta):
            continue

        def case(Q=Q):
            ind = il.induced_ideal_truncated(lab, Q)
            if il.contract(lab, ind.ideal).ideal != Q:
                return "QT does not contract to Q"
            if not any(il.contract(lab, P).ideal == Q for P in tau_primes):
                return f"no tau-prime of T/j^{lab.N} lies over {Q.to_list()}"
            return None

        run.case(f"Q{idx:02d}-size{Q.size}", case)
    return run.records


def _orbit_setting(tower: Tower):
    if tower.family == "product":
        tab = _table(tower, tower.base)
        return tab, tab.map_array(tower.alpha)
    lab = _lab(tower)
    return lab.top, lab.ext_tau


def suite_orbit_decomposition(tower: Tower) -> list[Record]:
    run = _Run("orbit-decomposition")
    tab, alpha = _orbit_setting(tower)
    stable = [I for I in il.all_ideals(tab) if not I.is_whole and il.is_stable(I, alpha)]
    for idx, P in enumerate(stable):

        def case(P=P):
            ap = il.is_alpha_prime(P, alpha)
            if il.is_prime(P) and not ap:
                return "alpha-stable prime is not alpha-prime"
            mins = il.minimal_primes_over(P)
            meet = mins[0] if mins else None
            for Q in mins[1:]:
                meet = il.ideal_intersection(meet, Q)
            orbit_form = bool(mins) and il.forms_single_orbit(mins, alpha) and meet == P
            if ap != orbit_form:
                return f"alpha-prime={ap} but single-orbit decomposition={orbit_form}"
            if ap:
                dec = il.tau_orbit_decomposition(P, alpha)
                if not dec.ok:
                    return "orbit decomposition inconsistent"
            return None

        run.case(f"P{idx:02d}-size{P.size}", case)
    return run.records


def suite_quantum_relations(tower: Tower) -> list[Record]:
    run = _Run("quantum-relations")
    if tower.family == "quantum-plane":
        T = tower.top
        g = T.generators()
        q = tower.plane_q

        def plane():
            res = T.sub(T.mul(g["y"], g["x"]), T.scale(q, T.mul(g["x"], g["y"])))
            return None if res == T.zero else f"y*x - {q}*x*y = {T.format(res)}"

        run.case("yx-qxy", plane)
    elif tower.family == "quantum-matrices":
        rep = tower.quantum
        for r in rep.relations:
            if r.form != rep.spec.relation_form:
                continue
            run.case(
                f"{r.label}:{r.form}",
                lambda r=r: None if r.zero else f"residual {tower.top.format(r.residual)}",
            )
        for r in rep.relations:
            if r.form == rep.spec.relation_form:
                continue
            # the alternative form is reported, not required
            run.case(
                f"{r.label}:{r.form}:informational",
                lambda r=r: None,
            )
            run.records[-1].witness = "residual zero" if r.zero else "residual nonzero"
    else:
        run.case("instance", lambda: _skip("not a quantum family"))
    return run.records


def suite_open_question(tower: Tower) -> list[Record]:
    """Records, for each tau-delta-prime Q, whether QT is tau-prime in T/j^N.

    The answer at finite precision says nothing definite about T itself;
    cases always pass and carry the observation as witness.
    """
    run = _Run("open-question")
    lab = _lab(tower)
    for idx, Q in enumerate(lab.tau_delta_ideals()):
        if not il.is_tau_delta_prime(Q, lab.tau, lab.delta):
            continue
        ind = il.induced_ideal_truncated(lab, Q)
        observed = il.is_tau_prime(ind.ideal, lab.ext_tau)
        run.case(f"Q{idx:02d}-size{Q.size}", lambda: None)
        run.records[-1].witness = f"QT tau-prime in T/j^{lab.N}: {'yes' if observed else 'no'}"
    return run.records


SUITES: dict[str, Callable[[Tower], list[Record]]] = {
    "ring-axioms": suite_ring_axioms,
    "skew-data": suite_skew_data,
    "theta": suite_theta,
    "jt": suite_jt,
    "graded": suite_graded,
    "neumann": suite_neumann,
    "z-conjugation": suite_z_conjugation,
    "side-conversion": suite_side_conversion,
    "tau-extension": suite_tau_extension,
    "induced-ideals": suite_induced_ideals,
    "contraction": suite_contraction,
    "cutting-down": suite_cutting_down,
    "lying-over": suite_lying_over,
    "orbit-decomposition": suite_orbit_decomposition,
    "quantum-relations": suite_quantum_relations,
    "open-question": suite_open_question,
}


def run_suite(tower: Tower, name: str) -> list[Record]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(SUITES)}")
    try:
        records = SUITES[name](tower)
    except (Skip, il.BudgetExceeded) as exc:
        records = [Record(name, "setup", "skipped", str(exc), 0)]
    return sorted(records, key=lambda r: r.case)
