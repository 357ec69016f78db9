"""Concrete ring families and their skew data.

Everything here returns validated data: builders raise SkewDataError (with
the failing ValidationReport attached) rather than hand back maps that
break the automorphism/derivation laws.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .filtered import (
    FilteredRing,
    ProductRing,
    RingError,
    SkewData,
    SkewDataError,
    TruncPoly,
    ValidationReport,
    ZMod,
    validate_skew_data,
)
from .series import SeriesRing


class MonomialExtension:
    """Extend generator images of tau and delta to the whole ring.

    tau is extended multiplicatively and delta by the Leibniz rule
    delta(m g) = tau(m) delta(g) + delta(m) g over the ordered monomial basis
    g_1^e_1 ... g_k^e_k; both are then extended additively.  Nothing here
    checks that the result respects the ring's relations: that is what
    validation (and ``leibniz_defects``) is for.
    """

    def __init__(self, ring: FilteredRing, tau_images: Sequence, delta_images: Sequence | None):
        self.ring = ring
        self.gens = list(ring.generators().values())
        if len(tau_images) != len(self.gens):
            raise RingError(f"need {len(self.gens)} tau images, got {len(tau_images)}")
        self.tau_images = list(tau_images)
        self.delta_images = None if delta_images is None else list(delta_images)
        self._tau_m: dict = {}
        self._delta_m: dict = {}

    def _peel(self, e):
        t = max(k for k, x in enumerate(e) if x)
        rest = e[:t] + (e[t] - 1,) + e[t + 1 :]
        return t, rest

    def tau_mono(self, e):
        if e not in self._tau_m:
            R = self.ring
            if not any(e):
                val = R.one
            else:
                t, rest = self._peel(e)
                val = R.mul(self.tau_mono(rest), self.tau_images[t])
            self._tau_m[e] = val
        return self._tau_m[e]

    def delta_mono(self, e):
        if e not in self._delta_m:
            R = self.ring
            if not any(e):
                val = R.zero
            else:
                t, rest = self._peel(e)
                val = R.add(
                    R.mul(self.tau_mono(rest), self.delta_images[t]),
                    R.mul(self.delta_mono(rest), self.gens[t]),
                )
            self._delta_m[e] = val
        return self._delta_m[e]

    def _apply(self, mono, a):
        R = self.ring
        acc = R.zero
        for c, e in R.monomials(a):
            acc = R.add(acc, R.scale(c, mono(e)))
        return acc

    def tau(self, a):
        return self._apply(self.tau_mono, a)

    def delta(self, a):
        if self.delta_images is None:
            return self.ring.zero
        return self._apply(self.delta_mono, a)


def graded_inverse(ring: FilteredRing, tau: Callable, max_iter: int | None = None):
    """tau^-1 for a tau with tau(g) = c_g g + (higher order), c_g a unit scalar.

    Solves tau(s) = a by s <- s + D^-1 (a - tau(s)), D the diagonal part on
    monomials.  Each step raises the filtration degree of the residual, so
    the loop ends within the precision cap.  Returns None when some c_g is
    not a unit (tau is then not bijective on the graded ring).
    """
    gens = list(ring.generators().values())
    char = ring.characteristic
    diag = []
    for t, g in enumerate(gens):
        target = tuple(int(k == t) for k in range(len(gens)))
        c = sum(coef for coef, e in ring.monomials(tau(g)) if e == target) % char
        try:
            diag.append(pow(c, -1, char))
        except ValueError:
            return None
    limit = max_iter or 2 * ring.precision_cap + 4

    def d_inv(a):
        acc = ring.zero
        for c, e in ring.monomials(a):
            scale = c
            for t, x in enumerate(e):
                scale = scale * pow(diag[t], x, char) % char
            acc = ring.add(acc, ring.scale(scale, ring.monomial(e)))
        return acc

    def inverse(a):
        s = ring.zero
        for _ in range(limit):
            err = ring.sub(a, tau(s))
            if err == ring.zero:
                return s
            s = ring.add(s, d_inv(err))
        raise RingError(f"tau inverse did not converge on {ring.format(a)}")

    return inverse


def _memoize(f):
    cache: dict = {}

    def g(a):
        try:
            return cache[a]
        except KeyError:
            val = cache[a] = f(a)
            return val

    return g


def skew_from_images(
    ring: FilteredRing,
    tau_images: Sequence,
    delta_images: Sequence | None = None,
    tau_inverse_images: Sequence | None = None,
    q=None,
    label: str = "",
) -> SkewData:
    """SkewData from generator images (tau, delta, optionally tau^-1)."""
    ext = MonomialExtension(ring, tau_images, delta_images)
    if tau_inverse_images is not None:
        tinv = MonomialExtension(ring, tau_inverse_images, None).tau
    else:
        tinv = graded_inverse(ring, ext.tau)
    if delta_images is None:
        delta = lambda a: ring.zero  # noqa: E731
    else:
        delta = _memoize(ext.delta)
    return SkewData(
        ring,
        _memoize(ext.tau),
        None if tinv is None else _memoize(tinv),
        delta,
        q=q,
        label=label,
    )


def _require(report: ValidationReport, what: str, strict: bool = True) -> ValidationReport:
    if strict and not report.ok:
        failed = ", ".join(f"{c.law} (witness {c.witness})" for c in report.failures())
        raise SkewDataError(f"{what}: {failed}", report)
    return report


# ---------------------------------------------------------------------------


def build_zmod(p: int, m: int) -> tuple[ZMod, SkewData]:
    """Z/p^m, i = (p), with tau = id and delta = 0."""
    R = ZMod(p, m)
    return R, SkewData.trivial(R)


def build_truncpoly(
    p: int,
    m: int,
    tau_image="x",
    delta="zero",
    var: str = "x",
    budget: int = 100_000,
    strict: bool = True,
) -> tuple[TruncPoly, SkewData]:
    """F_p[x]/(x^m), i = (x), with tau(x) given and delta chosen by the caller.

    ``delta`` is "zero", "tau-minus-id", or the image delta(x) (extended by
    the Leibniz rule).  Images may be elements or expression strings in x.
    """
    R = TruncPoly(p, m, var)
    t_img = R.parse(tau_image) if isinstance(tau_image, str) else tau_image
    if delta == "tau-minus-id":
        base = skew_from_images(R, [t_img])
        skew = build_delta_tau_minus_id(R, base.tau, base.tau_inverse, budget=budget)
        return R, skew
    if delta == "zero":
        d_imgs = None
        q = R.one
        label = "trivial" if t_img == R.monomial((1,)) else "automorphism"
    else:
        d_imgs = [R.parse(delta) if isinstance(delta, str) else delta]
        q = None
        label = "leibniz"
    skew = skew_from_images(R, [t_img], d_imgs, q=q, label=label)
    report = validate_skew_data(R, skew, budget=budget)
    _require(report, f"skew data on {R.name}", strict)
    return R, skew


def build_delta_tau_minus_id(
    R: FilteredRing,
    tau: Callable,
    tau_inverse: Callable | None = None,
    budget: int = 100_000,
    seed: int = 0,
) -> SkewData:
    """delta := tau - id, after checking tau = id on R/i and on i/i^2.

    The Leibniz rule is automatic for this delta:
    tau(a)(tau(b) - b) + (tau(a) - a) b = tau(ab) - ab.
    """
    try:
        exhaustive = R.size() <= budget
    except NotImplementedError:
        exhaustive = False
    if exhaustive:
        elems = list(R.elements())
    else:
        rng = random.Random(seed)
        elems = list(R.generators().values()) + [R.random_element(rng) for _ in range(min(budget, 2000))]
    for r in elems:
        if R.valuation(R.sub(tau(r), r)) < 1:
            raise SkewDataError(f"tau(r) - r not in i for r = {R.format(r)}")
        if R.valuation(r) >= 1 and R.valuation(R.sub(tau(r), r)) < 2:
            raise SkewDataError(f"tau(a) - a not in i^2 for a = {R.format(r)} in i")
    if tau_inverse is None:
        tau_inverse = graded_inverse(R, tau)
    skew = SkewData(R, tau, tau_inverse, lambda a: R.sub(tau(a), a), q=R.one, label="tau-minus-id")
    _require(validate_skew_data(R, skew, budget=budget, seed=seed), "delta = tau - id")
    return skew


def build_quantum_plane(p: int, q: int, N: int, budget: int = 20_000) -> SeriesRing:
    """k[[x]][[y; tau]] with tau(x) = q x, delta = 0, both truncated at N.

    In the result y x = q x y.
    """
    k = ZMod(p, 1)
    q = q % p
    if q == 0:
        raise RingError("q must be a unit")
    inner = SeriesRing(SkewData.trivial(k), N, var="x")
    x = inner.y
    qinv = pow(q, -1, p)
    skew = skew_from_images(
        inner,
        [inner.scale(q, x)],
        tau_inverse_images=[inner.scale(qinv, x)],
        q=inner.one,
        label="quantum-plane",
    )
    _require(validate_skew_data(inner, skew, budget=budget), "quantum plane")
    return SeriesRing(skew, N, var="y")


def build_swap_product(p: int, t: int) -> tuple[ProductRing, Callable]:
    """F_p^t with alpha cycling the coordinates (alpha = id when t = 1)."""
    R = ProductRing(p, t)

    def alpha(a):
        return a[-1:] + a[:-1]

    return R, alpha


# ---------------------------------------------------------------------------
# quantum matrices


@dataclass
class QuantumMatrixSpec:
    """Parameters of O_{lambda,p}(M_n(F_prime)) truncated at precision N.

    ``params`` holds p_ij for i < j; the rest of the matrix follows from
    p_ji = p_ij^-1 and p_ii = 1.
    """

    n: int
    lam: int
    prime: int
    N: int
    params: dict = field(default_factory=dict)
    relation_form: str = "standard"

    def matrix(self) -> list[list[int]]:
        pr, n = self.prime, self.n
        P = [[1] * (n + 1) for _ in range(n + 1)]
        for (i, j), v in self.params.items():
            if not 1 <= i < j <= n:
                raise RingError(f"parameter p_{i}{j}: need 1 <= i < j <= n")
            v %= pr
            if v == 0:
                raise RingError(f"p_{i}{j} must be a unit mod {pr}")
            P[i][j] = v
            P[j][i] = pow(v, -1, pr)
        return P

    def validate(self) -> None:
        if self.n < 1:
            raise RingError("n must be >= 1")
        if self.lam % self.prime == 0:
            raise RingError("lambda must be nonzero")
        if self.relation_form not in ("standard", "as-printed"):
            raise RingError(f"unknown relation_form {self.relation_form!r}")
        P = self.matrix()
        for i in range(1, self.n + 1):
            for j in range(1, self.n + 1):
                if P[i][j] * P[j][i] % self.prime != 1:
                    raise RingError("p is not multiplicatively antisymmetric")


@dataclass
class RelationResidual:
    label: str
    form: str
    residual: tuple
    zero: bool


@dataclass
class QuantumMatrixReport:
    spec: QuantumMatrixSpec
    relations: list[RelationResidual]
    validations: dict[str, ValidationReport]
    notes: list[str]

    @property
    def ok(self) -> bool:
        return all(r.zero for r in self.relations if r.form == self.spec.relation_form) and all(
            v.ok for v in self.validations.values()
        )


class LeibnizInconsistency(SkewDataError):
    pass


def _relation(spec: QuantumMatrixSpec, P, i, j, r, s, form):
    """(coefficient, extra-term factors) with y_ij y_rs = coef y_rs y_ij + extra.

    extra is None or (scalar, first variable, second variable).
    """
    lam, pr = spec.lam % spec.prime, spec.prime
    if i > r and j > s:
        coef = P[i][r] * P[s][j] % pr
        second = (i, s) if form == "standard" else (r, s)
        return coef, ((lam - 1) * P[i][r] % pr, (r, j), second)
    if i > r and j <= s:
        return lam * P[i][r] * P[s][j] % pr, None
    if i == r and j > s:
        return P[s][j] % pr, None
    raise ValueError("relation only defined for later y_ij against earlier y_rs")


def leibniz_defects(ring: FilteredRing, skew: SkewData) -> list[tuple[str, str]]:
    """Generator pairs (g, h) where delta(gh) != tau(g)delta(h) + delta(g)h."""
    R = ring
    bad = []
    gens = ring.generators()
    for (ng, g), (nh, h) in itertools.product(gens.items(), repeat=2):
        lhs = skew.delta(R.mul(g, h))
        rhs = R.add(R.mul(skew.tau(g), skew.delta(h)), R.mul(skew.delta(g), h))
        if lhs != rhs:
            bad.append((ng, nh))
    return bad


def build_quantum_matrices(
    spec: QuantumMatrixSpec, budget: int = 200, seed: int = 0
) -> tuple[SeriesRing, QuantumMatrixReport]:
    """The tower k[[y11]][[y12; tau, delta]]...[[ynn; tau, delta]] at precision N.

    Variables are adjoined in row-major order.  For a new y_ij the images of
    the earlier y_rs are read off the defining relation
    y_ij y_rs = c y_rs y_ij + e: tau(y_rs) = c y_rs and delta(y_rs) = e.
    """
    spec.validate()
    P = spec.matrix()
    pr, N = spec.prime, spec.N
    k = ZMod(pr, 1)
    order = [(i, j) for i in range(1, spec.n + 1) for j in range(1, spec.n + 1)]
    names = {v: f"y{v[0]}{v[1]}" for v in order}
    ring = SeriesRing(SkewData.trivial(k), N, var=names[order[0]])
    validations: dict[str, ValidationReport] = {}
    notes = []
    lam_inv = pow(spec.lam % pr, -1, pr)
    for idx in range(1, len(order)):
        i, j = order[idx]
        gens = ring.generators()
        tau_imgs, tinv_imgs, delta_imgs = [], [], []
        any_delta = False
        for r, s in order[:idx]:
            g = gens[names[(r, s)]]
            coef, extra = _relation(spec, P, i, j, r, s, spec.relation_form)
            tau_imgs.append(ring.scale(coef, g))
            tinv_imgs.append(ring.scale(pow(coef, -1, pr), g))
            if extra is None or extra[0] == 0:
                delta_imgs.append(ring.zero)
            else:
                c, first, second = extra
                prod = ring.mul(gens[names[first]], gens[names[second]])
                delta_imgs.append(ring.scale(c, prod))
                any_delta = True
        q = ring.from_int(lam_inv) if any_delta else ring.one
        skew = skew_from_images(
            ring,
            tau_imgs,
            delta_imgs if any_delta else None,
            tinv_imgs,
            q=q,
            label="quantum-matrix" if any_delta else "quantum-matrix-diagonal",
        )
        name = names[(i, j)]
        if any_delta:
            defects = leibniz_defects(ring, skew)
            if defects:
                pairs = ", ".join(f"{a}*{b}" for a, b in defects)
                raise LeibnizInconsistency(
                    f"delta for {name} ({spec.relation_form} relations) violates the Leibniz rule "
                    f"on {pairs}"
                )
        report = validate_skew_data(ring, skew, budget=budget, seed=seed + idx)
        validations[name] = report
        _require(report, f"skew data for {name}")
        ring = SeriesRing(skew, N, var=name)

    relations = quantum_relation_residuals(ring, spec, P, names, order)
    if spec.n >= 2 and spec.lam % pr != 1:
        notes.append(
            "printed form of the (i>r, j>s) relation ends in y_rj y_rs; the standard form ends "
            "in y_rj y_is; residuals for both are listed"
        )
    report = QuantumMatrixReport(spec, relations, validations, notes)
    return ring, report


def quantum_relation_residuals(ring: SeriesRing, spec, P, names, order) -> list[RelationResidual]:
    gens = ring.generators()
    out = []
    forms = ["standard", "as-printed"]
    for a, b in itertools.combinations(order, 2):
        (r, s), (i, j) = a, b
        lhs = ring.mul(gens[names[(i, j)]], gens[names[(r, s)]])
        seen = set()
        for form in forms:
            coef, extra = _relation(spec, P, i, j, r, s, form)
            rhs = ring.scale(coef, ring.mul(gens[names[(r, s)]], gens[names[(i, j)]]))
            if extra is not None:
                c, first, second = extra
                rhs = ring.add(rhs, ring.scale(c, ring.mul(gens[names[first]], gens[names[second]])))
            if extra is None and form != spec.relation_form:
                continue  # identical in both forms
            key = (extra is None, rhs)
            if key in seen:
                continue
            seen.add(key)
            residual = ring.sub(lhs, rhs)
            out.append(
                RelationResidual(
                    f"{names[(i, j)]}*{names[(r, s)]}",
                    form if extra is not None else spec.relation_form,
                    residual,
                    residual == ring.zero,
                )
            )
    return out
