"""Skew polynomials R[y; tau, delta] and the theta operator calculus.

For r in R, y^i r = sum_k theta_{i,k}(r) y^k, where

    theta_{0,0} = id,   theta_{i+1,k} = tau o theta_{i,k-1} + delta o theta_{i,k},

and theta_{i,k} = 0 outside 0 <= k <= i.  Products in left normal form are

    (sum a_i y^i)(sum b_j y^j) = sum_n sum_j sum_i a_i theta_{i,n-j}(b_j) y^n.

Right normal form sum y^i b_i uses the same recursion with the primed data
tau' = tau^-1, delta' = -delta tau^-1 (r y = y tau'(r) + delta'(r)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .filtered import FilteredRing, RingError, SkewData

NEG_INF = -math.inf

LEFT, RIGHT = "left", "right"


def theta_rows(skew: SkewData, r, upto: int) -> list[tuple]:
    """rows[i][k] = theta_{i,k}(r) for 0 <= k <= i <= upto.

    Rows are memoized per element on the skew data; extending an existing
    entry only computes the missing rows.  Concurrent callers may duplicate
    work but never observe a partial row list.
    """
    if upto > skew.max_order:
        raise RingError(f"theta order {upto} exceeds configured maximum {skew.max_order}")
    memo = skew._memo.setdefault("theta", {})
    rows = memo.get(r)
    if rows is not None and len(rows) > upto:
        return rows
    R = skew.ring
    rows = list(rows) if rows else [(r,)]
    tau, delta, zero = skew.tau, skew.delta, R.zero
    trivial = skew.is_trivial
    while len(rows) <= upto:
        prev = rows[-1]
        if trivial:
            rows.append((zero,) * len(prev) + (r,))
            continue
        t = [tau(c) for c in prev]
        d = [delta(c) for c in prev]
        new = [d[0]]
        for k in range(1, len(prev)):
            new.append(R.add(t[k - 1], d[k]))
        new.append(t[-1])
        rows.append(tuple(new))
    memo[r] = rows
    return rows


def theta(skew: SkewData, i: int, k: int, r):
    """theta_{i,k}(r); zero for k < 0 or k > i."""
    if i < 0:
        raise ValueError("i must be nonnegative")
    if k < 0 or k > i:
        return skew.ring.zero
    return theta_rows(skew, r, i)[i][k]


def left_product(skew: SkewData, a, b, prec: int | None = None) -> list:
    """Coefficients of (sum a_i y^i)(sum b_j y^j) in left normal form.

    With ``prec`` set, coefficient n is computed modulo i^(prec-n) and only
    n < prec is produced; the inner sum stops at i < prec - j because
    theta_{i,n-j}(R) lies in i^(i-n+j).
    """
    R = skew.ring
    zero = R.zero
    la, lb = len(a), len(b)
    n_out = la + lb - 1 if prec is None else prec
    out = []
    for n in range(n_out):
        level = None if prec is None else prec - n
        acc = zero
        for j in range(min(n, lb - 1) + 1):
            bj = b[j]
            if bj == zero:
                continue
            k = n - j
            stop = la if prec is None else min(la, prec - j)
            if stop <= k:
                continue
            rows = theta_rows(skew, bj, stop - 1)
            for i in range(k, stop):
                ai = a[i]
                if ai == zero:
                    continue
                th = rows[i][k]
                if th == zero:
                    continue
                term = R.mul(ai, th) if level is None else R.mul_mod(ai, th, level)
                acc = R.add(acc, term)
        out.append(acc if level is None else R.reduce(acc, level))
    return out


def right_product(skew: SkewData, b, c, prec: int | None = None) -> list:
    """Coefficients of (sum y^i b_i)(sum y^j c_j) in right normal form.

    b_i y^j = sum_k y^k theta'_{j,k}(b_i), so the y^n coefficient is
    sum_i sum_j theta'_{j,n-i}(b_i) c_j.
    """
    sp = skew.primed()
    R = skew.ring
    zero = R.zero
    lb, lc = len(b), len(c)
    n_out = lb + lc - 1 if prec is None else prec
    out = []
    for n in range(n_out):
        level = None if prec is None else prec - n
        acc = zero
        for i in range(min(n, lb - 1) + 1):
            bi = b[i]
            if bi == zero:
                continue
            k = n - i
            stop = lc if prec is None else min(lc, prec - i)
            if stop <= k:
                continue
            rows = theta_rows(sp, bi, stop - 1)
            for j in range(k, stop):
                cj = c[j]
                if cj == zero:
                    continue
                th = rows[j][k]
                if th == zero:
                    continue
                term = R.mul(th, cj) if level is None else R.mul_mod(th, cj, level)
                acc = R.add(acc, term)
        out.append(acc if level is None else R.reduce(acc, level))
    return out


def swap_side(skew: SkewData, coeffs, direction: str, prec: int | None = None) -> list:
    """Re-express coefficients in the opposite normal form.

    right-to-left: a_k = sum_{i >= k} theta_{i,k}(b_i)
    left-to-right: b_k = sum_{i >= k} theta'_{i,k}(a_i)
    """
    if direction == "right-to-left":
        data = skew
    elif direction == "left-to-right":
        data = skew.primed()
    else:
        raise ValueError(f"unknown direction {direction!r}")
    R = skew.ring
    length = len(coeffs)
    out = [R.zero] * length
    for i, c in enumerate(coeffs):
        if c == R.zero:
            continue
        rows = theta_rows(data, c, i)[i]
        for k in range(i + 1):
            if rows[k] != R.zero:
                out[k] = R.add(out[k], rows[k])
    if prec is not None:
        out = [R.reduce(x, prec - k) for k, x in enumerate(out)]
    return out


# ---------------------------------------------------------------------------


def _trim(R: FilteredRing, coeffs) -> tuple:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == R.zero:
        coeffs.pop()
    return tuple(coeffs)


def _render_terms(R: FilteredRing, coeffs, var: str, side: str) -> list[str]:
    terms = []
    for k, c in enumerate(coeffs):
        if c == R.zero:
            continue
        s = R.format(c)
        if k == 0:
            terms.append(s)
            continue
        mono = var if k == 1 else f"{var}^{k}"
        if s == "1":
            terms.append(mono)
            continue
        if " + " in s:
            s = f"({s})"
        terms.append(f"{s}*{mono}" if side == LEFT else f"{mono}*{s}")
    return terms


class SkewPolyRing:
    """The ring S = R[y; tau, delta] as a parent for SkewPoly values."""

    def __init__(self, skew: SkewData, var: str = "y"):
        self.skew = skew
        self.ring = skew.ring
        self.var = var

    def __call__(self, coeffs, side: str = LEFT) -> SkewPoly:
        R = self.ring
        for c in coeffs:
            if not R.is_element(c):
                raise RingError(f"{c!r} is not an element of {R.name}")
        return SkewPoly(self, _trim(R, coeffs), side)

    @property
    def zero(self):
        return self(())

    @property
    def one(self):
        return self((self.ring.one,))

    def gen(self) -> SkewPoly:
        return self((self.ring.zero, self.ring.one))

    def constant(self, a) -> SkewPoly:
        return self((a,))

    def from_int(self, n: int) -> SkewPoly:
        return self.constant(self.ring.from_int(n))

    def generators(self) -> dict:
        gens = {k: self.constant(v) for k, v in self.ring.generators().items()}
        gens[self.var] = self.gen()
        return gens

    # arithmetic hooks for the expression evaluator
    def add(self, f, g):
        return f + g

    def neg(self, f):
        return -f

    def sub(self, f, g):
        return f - g

    def mul(self, f, g):
        return f * g

    def power(self, f, e):
        return f**e

    def inverse(self, f):
        if f.degree == 0:
            return self.constant(self.ring.inverse(f.coeffs[0]))
        raise RingError("only constant skew polynomials are invertible here")

    def parse(self, text: str) -> SkewPoly:
        from .expr import evaluate

        return evaluate(self, text)

    def __repr__(self):
        return f"<SkewPolyRing {self.ring.name}[{self.var}]>"


@dataclass(frozen=True)
class SkewPoly:
    """A skew polynomial; ``side`` says whether coefficients sit left or right of y^i."""

    parent: SkewPolyRing
    coeffs: tuple
    side: str = LEFT

    @property
    def ring(self) -> FilteredRing:
        return self.parent.ring

    @property
    def skew(self) -> SkewData:
        return self.parent.skew

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def _same(self, other: SkewPoly) -> None:
        if not isinstance(other, SkewPoly) or other.parent is not self.parent:
            raise TypeError("skew polynomials over different rings or skew data")
        if other.side != self.side:
            raise TypeError("mixed normal forms; convert_side first")

    def __add__(self, other):
        if isinstance(other, int):
            other = self.parent.from_int(other).as_side(self.side)
        self._same(other)
        R = self.ring
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (R.zero,) * (n - len(self.coeffs))
        b = other.coeffs + (R.zero,) * (n - len(other.coeffs))
        return SkewPoly(self.parent, _trim(R, map(R.add, a, b)), self.side)

    __radd__ = __add__

    def __neg__(self):
        return SkewPoly(self.parent, tuple(map(self.ring.neg, self.coeffs)), self.side)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            other = self.parent.from_int(other).as_side(self.side)
        return spoly_mul(self, other)

    def __pow__(self, e: int):
        result = self.parent.one.as_side(self.side)
        for _ in range(e):
            result = result * self
        return result

    def as_side(self, side: str) -> SkewPoly:
        if side == self.side:
            return self
        return convert_side(self, "left-to-right" if side == RIGHT else "right-to-left")

    def __str__(self):
        terms = _render_terms(self.ring, self.coeffs, self.parent.var, self.side)
        return " + ".join(terms) if terms else "0"


def spoly_mul(f: SkewPoly, g: SkewPoly) -> SkewPoly:
    """Exact product, in the common normal form of f and g."""
    f._same(g)
    if not f.coeffs or not g.coeffs:
        return SkewPoly(f.parent, (), f.side)
    product = left_product if f.side == LEFT else right_product
    coeffs = product(f.skew, f.coeffs, g.coeffs)
    return SkewPoly(f.parent, _trim(f.ring, coeffs), f.side)


def convert_side(f: SkewPoly, direction: str) -> SkewPoly:
    """Same ring element, opposite normal form."""
    source = RIGHT if direction == "right-to-left" else LEFT
    if f.side != source:
        raise ValueError(f"{direction} needs a {source}-form polynomial")
    coeffs = swap_side(f.skew, f.coeffs, direction)
    target = LEFT if source == RIGHT else RIGHT
    return SkewPoly(f.parent, _trim(f.ring, coeffs), target)


def spoly_apply_extended_tau(f: SkewPoly, q=None) -> SkewPoly:
    """Apply the extension of tau to S with tau(y) = q^-1 y.

    q defaults to the skew data's commutation scalar.
    """
    q = f.skew.q if q is None else q
    if q is None:
        raise RingError("no commutation scalar q: tau does not extend")
    R = f.ring
    qinv = R.inverse(q)
    f = f.as_side(LEFT)
    out, scale = [], R.one
    for a in f.coeffs:
        out.append(R.mul(f.skew.tau(a), scale))
        scale = R.mul(scale, qinv)
    return SkewPoly(f.parent, _trim(R, out), LEFT)
