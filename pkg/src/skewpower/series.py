"""Truncated skew power series T/j^N, T = R[[y; tau, delta]].

Since j^N = i^N + i^(N-1) y + ... + i y^(N-1) + T y^N, a class in T/j^N is
exactly a tuple (a_0, ..., a_{N-1}) with a_k known modulo i^(N-k).  That is
the storage layout used throughout: coefficient k is kept as R's canonical
representative modulo i^(N-k).

``SeriesRing`` is itself a FilteredRing (ideal j, precision cap N) on raw
coefficient tuples, so towers R[[y1]][[y2; tau2, delta2]]... are built by
stacking.  ``TruncSeries`` is the value wrapper with operator overloads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .filtered import INF, FilteredRing, RingError, SkewData
from .skewpoly import LEFT, RIGHT, SkewPoly, _render_terms, left_product, right_product, swap_side


class PrecisionError(ValueError):
    """A precondition on j-adic valuation or precision was violated."""


class SeriesRing(FilteredRing):
    """T/j^N as a filtered ring whose elements are coefficient tuples."""

    def __init__(self, skew: SkewData, N: int, var: str = "y"):
        super().__init__()
        if N < 1:
            raise RingError("precision N must be >= 1")
        if N > skew.max_order:
            raise RingError(f"precision {N} exceeds maximum order {skew.max_order}")
        self.skew = skew
        self.base: FilteredRing = skew.ring
        self.N = N
        self.var = var
        self.precision_cap = N
        self.characteristic = self.base.characteristic
        self.name = f"{self.base.name}[[{var}]]/j^{N}"
        B = self.base
        self._zero = (B.zero,) * N
        self._one = self.constant(B.one)
        gens = [self.constant(g) for g in B.ideal_generators]
        if N > 1:
            gens.append(self.y)
        self.ideal_generators = tuple(g for g in gens if g != self._zero) or (self._zero,)
        self._ext_tau: dict = {}

    # -- element construction ---------------------------------------------
    @property
    def zero(self):
        return self._zero

    @property
    def one(self):
        return self._one

    @property
    def y(self):
        B = self.base
        if self.N == 1:
            return self._zero
        return (B.zero, B.reduce(B.one, self.N - 1)) + (B.zero,) * (self.N - 2)

    def constant(self, a):
        B = self.base
        return (B.reduce(a, self.N),) + (B.zero,) * (self.N - 1)

    def monomial_term(self, a, k: int) -> tuple:
        """The one-term series a y^k."""
        return self.from_coeffs([self.base.zero] * k + [a])

    def from_coeffs(self, coeffs: Sequence) -> tuple:
        """Canonical element from a (possibly short) coefficient list."""
        B, N = self.base, self.N
        coeffs = list(coeffs)[:N]
        coeffs += [B.zero] * (N - len(coeffs))
        return tuple(B.reduce(c, N - k) for k, c in enumerate(coeffs))

    def wrap(self, raw, side: str = LEFT) -> TruncSeries:
        return TruncSeries(self, tuple(raw), side)

    def __call__(self, coeffs: Sequence, side: str = LEFT) -> TruncSeries:
        return TruncSeries(self, self.from_coeffs(coeffs), side)

    # -- arithmetic -------------------------------------------------------
    def add(self, a, b):
        B, N = self.base, self.N
        return tuple(B.reduce(B.add(u, v), N - k) for k, (u, v) in enumerate(zip(a, b)))

    def neg(self, a):
        B, N = self.base, self.N
        return tuple(B.reduce(B.neg(u), N - k) for k, u in enumerate(a))

    def sub(self, a, b):
        B, N = self.base, self.N
        return tuple(B.reduce(B.sub(u, v), N - k) for k, (u, v) in enumerate(zip(a, b)))

    def mul(self, a, b):
        return tuple(left_product(self.skew, a, b, self.N))

    def mul_mod(self, a, b, level):
        if level >= self.N:
            return self.mul(a, b)
        if level <= 0:
            return self._zero
        out = left_product(self.skew, a, b, level)
        return tuple(out) + (self.base.zero,) * (self.N - level)

    def mul_right(self, b, c):
        """Product of two right-form coefficient tuples, in right form."""
        return tuple(right_product(self.skew, b, c, self.N))

    def from_int(self, n):
        return self.constant(self.base.from_int(n))

    def scale(self, c, a):
        B, N = self.base, self.N
        return tuple(B.reduce(B.scale(c, u), N - k) for k, u in enumerate(a))

    def inverse(self, a):
        """Inverse of a series whose constant term is a unit of R.

        Factored as f = a0 (1 + g) with g = a0^-1 (f - a0), so
        f^-1 = (1 + g)^-1 a0^-1 and the first factor is a Neumann series.
        """
        B = self.base
        a0 = a[0]
        try:
            a0_inv = B.inverse(a0)
        except (RingError, NotImplementedError) as exc:
            raise RingError(f"{self.format(a)} is not a unit: constant term not invertible") from exc
        c_inv = self.constant(a0_inv)
        g = self.mul(c_inv, self.sub(a, self.constant(a0)))
        return self.mul(_neumann(self, g), c_inv)

    # -- filtration -------------------------------------------------------
    def reduce(self, a, level):
        if level >= self.N:
            return a
        B = self.base
        return tuple(B.reduce(c, level - k) if k < level else B.zero for k, c in enumerate(a))

    def residues(self, level):
        L = min(level, self.N)
        pad = (self.base.zero,) * (self.N - L)
        pools = [list(self.base.residues(L - k)) for k in range(L)]
        for combo in itertools.product(*pools):
            yield combo + pad

    def residue_count(self, level):
        L = min(level, self.N)
        count = 1
        for k in range(L):
            count *= self.base.residue_count(L - k)
        return count

    def is_element(self, a):
        B, N = self.base, self.N
        return (
            isinstance(a, tuple)
            and len(a) == N
            and all(B.is_element(c) and B.reduce(c, N - k) == c for k, c in enumerate(a))
        )

    def valuation(self, a):
        return _j_valuation_raw(self, a)

    # -- presentation -----------------------------------------------------
    def generators(self):
        gens = {k: self.constant(v) for k, v in self.base.generators().items()}
        gens[self.var] = self.y
        return gens

    def monomials(self, a):
        for k, c in enumerate(a):
            for coef, exps in self.base.monomials(c):
                yield coef, exps + (k,)

    def monomial(self, exps):
        *inner, k = exps
        out = [self.base.zero] * self.N
        if k < self.N:
            out[k] = self.base.reduce(self.base.monomial(tuple(inner)), self.N - k)
        return tuple(out)

    def format(self, a):
        terms = _render_terms(self.base, a, self.var, LEFT)
        return " + ".join(terms) if terms else "0"

    def random_element(self, rng):
        B, N = self.base, self.N
        return tuple(B.reduce(B.random_element(rng), N - k) for k in range(N))

    # -- extended tau -----------------------------------------------------
    def extended_tau(self, q=None):
        """Raw map sum a_i y^i -> sum tau(a_i) q^-i y^i on T/j^N."""
        q = self.skew.q if q is None else q
        if q is None:
            raise RingError("skew data has no commutation scalar q; tau does not extend")
        if q in self._ext_tau:
            return self._ext_tau[q]
        B, N, tau = self.base, self.N, self.skew.tau
        qinv = B.inverse(q)
        scales = [B.power(qinv, i) for i in range(N)]

        def ext(a):
            return tuple(B.mul_mod(tau(c), scales[i], N - i) for i, c in enumerate(a))

        self._ext_tau[q] = ext
        return ext


def _j_valuation_raw(T: SeriesRing, a):
    best = INF
    for k, c in enumerate(a):
        v = T.base.valuation(c)
        if k + v < best:
            best = k + v
    return INF if best >= T.N else best


def _neumann(T: SeriesRing, g):
    """sum_{m < N} (-g)^m, the inverse of 1 + g when g lies in j."""
    minus_g = T.neg(g)
    acc, term = T.one, T.one
    for _ in range(1, T.N):
        term = T.mul(term, minus_g)
        if term == T.zero:
            break
        acc = T.add(acc, term)
    return acc


@dataclass(frozen=True)
class TruncSeries:
    """Element of T/j^N; coefficient k is a residue modulo i^(N-k)."""

    ring: SeriesRing
    coeffs: tuple
    side: str = LEFT

    @property
    def N(self) -> int:
        return self.ring.N

    @property
    def skew(self) -> SkewData:
        return self.ring.skew

    def _coerce(self, other):
        if isinstance(other, int):
            return TruncSeries(self.ring, self.ring.from_int(other), LEFT).as_side(self.side)
        if not isinstance(other, TruncSeries) or other.ring is not self.ring:
            raise TypeError("series over different rings, skew data or precision")
        if other.side != self.side:
            raise TypeError("mixed normal forms; convert first")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        return TruncSeries(self.ring, self.ring.add(self.coeffs, other.coeffs), self.side)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries(self.ring, self.ring.neg(self.coeffs), self.side)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        return ts_mul(self, self._coerce(other))

    def __rmul__(self, other):
        return ts_mul(self._coerce(other), self)

    def __pow__(self, e: int):
        if e < 0:
            return invert(self) ** (-e)
        result = TruncSeries(self.ring, self.ring.one, LEFT).as_side(self.side)
        for _ in range(e):
            result = result * self
        return result

    def as_side(self, side: str) -> TruncSeries:
        if side == self.side:
            return self
        return convert_side_series(self, "left-to-right" if side == RIGHT else "right-to-left")

    def __str__(self):
        return render(self)


def _check_pair(f: TruncSeries, g: TruncSeries) -> None:
    if f.ring is not g.ring:
        if f.ring.N != g.ring.N:
            raise PrecisionError(f"precision mismatch: {f.ring.N} vs {g.ring.N}")
        raise TypeError("series over different rings or skew data")
    if f.side != g.side:
        raise TypeError("mixed normal forms; convert first")


def ts_mul(f: TruncSeries, g: TruncSeries) -> TruncSeries:
    """Product in T/j^N, in the common normal form of the factors."""
    _check_pair(f, g)
    T = f.ring
    if f.side == LEFT:
        return TruncSeries(T, T.mul(f.coeffs, g.coeffs), LEFT)
    return TruncSeries(T, T.mul_right(f.coeffs, g.coeffs), RIGHT)


def j_valuation(f: TruncSeries):
    """min_k (k + v(a_k)); INF for the zero class.  Side independent."""
    return _j_valuation_raw(f.ring, f.coeffs)


def invert_one_plus(g: TruncSeries) -> TruncSeries:
    """Inverse of 1 + g for g in j, as the terminating series sum (-g)^m."""
    v = j_valuation(g)
    if v < 1:
        raise PrecisionError(f"invert_one_plus needs g in j; j_valuation(g) = {v}")
    g = g.as_side(LEFT)
    return TruncSeries(g.ring, _neumann(g.ring, g.coeffs), LEFT)


def invert(f: TruncSeries) -> TruncSeries:
    T = f.ring
    return TruncSeries(T, T.inverse(f.as_side(LEFT).coeffs), LEFT).as_side(f.side)


def _require_tau_minus_id(skew: SkewData, budget: int = 4096) -> None:
    if skew.label in ("tau-minus-id", "trivial") or skew._memo.get("tau-minus-id"):
        return
    R = skew.ring
    try:
        exhaustive = R.size() <= budget
    except NotImplementedError:
        exhaustive = False
    if exhaustive:
        candidates = R.elements()
    else:
        import random

        rng = random.Random(0)
        candidates = [R.random_element(rng) for _ in range(256)] + list(R.generators().values())
    for r in candidates:
        if skew.delta(r) != R.sub(skew.tau(r), r):
            raise ValueError(f"delta != tau - id: witness {R.format(r)}")
    skew._memo["tau-minus-id"] = True


def z_element(T: SeriesRing) -> TruncSeries:
    return TruncSeries(T, T.add(T.one, T.y), LEFT)


def conjugate_by_z(f: TruncSeries) -> TruncSeries:
    """z f z^-1 with z = 1 + y, for skew data with delta = tau - id."""
    _require_tau_minus_id(f.skew)
    f = f.as_side(LEFT)
    T = f.ring
    z = z_element(T)
    z_inv = invert_one_plus(TruncSeries(T, T.y, LEFT))
    return ts_mul(ts_mul(z, f), z_inv)


def convert_side_series(f: TruncSeries, direction: str) -> TruncSeries:
    """Move coefficients across y^i; truncation at N is exact by the theta bounds."""
    source = RIGHT if direction == "right-to-left" else LEFT
    if f.side != source:
        raise ValueError(f"{direction} needs a {source}-form series")
    coeffs = swap_side(f.skew, f.coeffs, direction, prec=f.N)
    return TruncSeries(f.ring, tuple(coeffs), LEFT if source == RIGHT else RIGHT)


def extend_tau_series(f: TruncSeries, q=None) -> TruncSeries:
    """sum tau(a_i) q^-i y^i, the automorphism of T/j^N extending tau."""
    f = f.as_side(LEFT)
    return TruncSeries(f.ring, f.ring.extended_tau(q)(f.coeffs), LEFT)


def as_filtered_ring(ring: FilteredRing, skew: SkewData, N: int, var: str = "y") -> SeriesRing:
    if skew.ring is not ring:
        raise RingError("skew data belongs to a different ring")
    return SeriesRing(skew, N, var)


def embed_poly(T: SeriesRing, f: SkewPoly) -> TruncSeries:
    """Image of a left-form skew polynomial in T/j^N."""
    return T(f.as_side(LEFT).coeffs)


def limit_of_sequence(fs: Sequence[TruncSeries]) -> TruncSeries:
    """The stabilized class of a Cauchy sequence at the working precision.

    Successive differences must have nondecreasing j-valuation reaching INF.
    Coefficientwise, a_k of each difference must lie in i^(v-k) where v is
    the difference's j-valuation (coefficientwise convergence).
    """
    if not fs:
        raise ValueError("empty sequence")
    fs = [f.as_side(LEFT) for f in fs]
    T = fs[0].ring
    last = -1
    for idx in range(1, len(fs)):
        if fs[idx].ring is not T:
            raise TypeError("sequence mixes rings")
        diff = T.sub(fs[idx].coeffs, fs[idx - 1].coeffs)
        v = _j_valuation_raw(T, diff)
        if v < last:
            raise ValueError(f"not Cauchy: j-valuation drops from {last} to {v} at index {idx}")
        for k, c in enumerate(diff):
            if T.base.valuation(c) < v - k:
                raise ValueError(f"coefficient {k} fails to converge at index {idx}")
        last = v
    if len(fs) > 1 and last != INF:
        raise ValueError(f"not stabilized: last difference has j-valuation {last} < N = {T.N}")
    return fs[-1]


def render(f: TruncSeries) -> str:
    """'a0 + a1*y + ... + O(j^N)' in the series' own normal form."""
    terms = _render_terms(f.ring.base, f.coeffs, f.ring.var, f.side)
    body = " + ".join(terms) if terms else "0"
    return f"{body} + O(j^{f.N})"


def coefficient_dump(f: TruncSeries) -> list[dict]:
    """Machine-readable coefficients: index, modulus exponent, canonical residue."""
    B = f.ring.base
    return [
        {"index": k, "modulus_exponent": f.N - k, "residue": B.format(c), "side": f.side}
        for k, c in enumerate(f.coeffs)
    ]
